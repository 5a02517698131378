//! Foliation movies shipped as JSON under `fixtures/`.

use crate::foliation::{circular_fixture, torus35_fixture, grid_fixture, FoliationMovie};
use crate::foliation::random_movie;
use crate::rewrite::{eliminate_valence_two, tiled_to_mixed, valence_two_vertices};

macro_rules! fixture {
    ($name:literal) => {
        ($name, include_str!(concat!("../fixtures/", $name, ".json")))
    };
}

const FILES: &[(&str, &str)] = &[
    fixture!("torus35"),
    fixture!("circular"),
    fixture!("grid4"),
    fixture!("grid6"),
    fixture!("grid8"),
    fixture!("grid10"),
    fixture!("grid12"),
    fixture!("mixed_torus35"),
    fixture!("mixed_bebe"),
    fixture!("mixed_grid6"),
    fixture!("mixed_grid8"),
    fixture!("valence_two"),
];

/// Every shipped fixture by name.
pub fn corpus() -> Vec<(&'static str, FoliationMovie)> {
    FILES
        .iter()
        .map(|(name, text)| (*name, FoliationMovie::from_json(text).expect("shipped fixture parses")))
        .collect()
}

pub fn fixture(name: &str) -> Option<FoliationMovie> {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| FoliationMovie::from_json(text).expect("shipped fixture parses"))
}

/// Rebuild the fixtures from their generators. Mixed ones are the tiled
/// stage's output on a tiled fixture.
pub fn generate() -> Vec<(&'static str, FoliationMovie)> {
    let grid = |l| grid_fixture(l).expect("grid");
    let mixed = |m: &FoliationMovie| tiled_to_mixed(m).expect("tiled stage").0;
    vec![
        ("torus35", torus35_fixture()),
        ("circular", circular_fixture(3)),
        ("grid4", grid(4)),
        ("grid6", grid(6)),
        ("grid8", grid(8)),
        ("grid10", grid(10)),
        ("grid12", grid(12)),
        ("mixed_torus35", mixed(&torus35_fixture())),
        ("mixed_bebe", mixed(&grid(4))),
        ("mixed_grid6", mixed(&grid(6))),
        ("mixed_grid8", mixed(&grid(8))),
        ("valence_two", valence_two()),
    ]
}

/// First seeded eight-vertex random tiling with an eliminable valence-two
/// vertex.
fn valence_two() -> FoliationMovie {
    let mut rng = crate::random::rng(5);
    loop {
        let Some(m) = random_movie(&mut rng, 8, 50) else { continue };
        if valence_two_vertices(&m).into_iter().any(|v| eliminate_valence_two(&m, v).is_ok()) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_match_generators() {
        let shipped = corpus();
        let built = generate();
        assert_eq!(shipped.len(), built.len());
        for ((a, x), (b, y)) in shipped.iter().zip(&built) {
            assert_eq!(a, b);
            assert_eq!(x, y, "fixtures/{a}.json is stale");
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(fixture("torus35"), Some(torus35_fixture()));
        assert!(fixture("nope").is_none());
    }
}
