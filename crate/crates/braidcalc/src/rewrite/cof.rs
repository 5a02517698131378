use std::collections::BTreeSet;

use super::{checked, require_valid, RewriteError};
use crate::foliation::{
    assemble, derive, reconnect, route, simulate, BbData, Chord, Curve, FaceMap, FoliationMovie, Leaf, Lists,
    Transition, TransitionKind,
};

/// Two consecutive saddles of equal parity, the first creating the b-arc
/// `region` between `v_plus` and `v_minus` and the second destroying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoliationSite {
    pub saddle: usize,
    pub region: Chord,
}

/// One admissible way of reconnecting a site without its region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub first: [Chord; 2],
    pub second: [Chord; 2],
    lists: Lists,
}

fn bb(movie: &FoliationMovie, t: usize) -> Option<BbData> {
    match movie.transitions[t].kind {
        TransitionKind::Bb(d) => Some(d),
        TransitionKind::Bc(_) => None,
    }
}

pub fn foliation_sites(movie: &FoliationMovie) -> Vec<FoliationSite> {
    let f = movie.transitions.len();
    let pos = movie.positions();
    let mut out = Vec::new();
    for s in 0..f.saturating_sub(1) {
        let (Some(d1), Some(d2)) = (bb(movie, s), bb(movie, s + 1)) else { continue };
        if movie.transitions[s].parity != movie.transitions[s + 1].parity {
            continue;
        }
        let Some(made) = reconnect(&pos, d1.chords[0], d1.chords[1]) else { continue };
        for region in made {
            let other = if made[0] == region { made[1] } else { made[0] };
            if d2.chords.contains(&region) && !d2.chords.contains(&other) {
                out.push(FoliationSite { saddle: s, region });
            }
        }
    }
    out
}

fn with(chords: &[Chord], drop: &[Chord], add: &[Chord], pos: &std::collections::HashMap<u32, usize>) -> Vec<Chord> {
    let mut out: Vec<Chord> = chords.iter().copied().filter(|c| !drop.contains(c)).collect();
    out.extend_from_slice(add);
    out.sort_by_key(|c| pos[&c.0]);
    out
}

fn splits(n: u32) -> impl Iterator<Item = u32> + Clone {
    0..=n
}

/// Reconnections of the site's three b-arcs that avoid the region and carry
/// K and m transversely, in a fixed order.
pub fn variants(movie: &FoliationMovie, site: &FoliationSite) -> Result<Vec<Variant>, RewriteError> {
    let s = site.saddle;
    if !foliation_sites(movie).contains(site) {
        let f = movie.transitions.len();
        if s + 1 < f && movie.transitions[s].parity != movie.transitions[s + 1].parity {
            return Err(RewriteError::Precondition("boundary saddles have unequal parity".into()));
        }
        return Err(RewriteError::Precondition(format!("{site:?} is not a change-of-foliation site")));
    }
    let sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let pos = movie.positions();
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let (d1, d2) = (bb(movie, s).expect("bb"), bb(movie, s + 1).expect("bb"));
    let d = if d2.chords[0] == site.region { d2.chords[1] } else { d2.chords[0] };
    let before = &movie.frames[s].chords;
    let target: BTreeSet<Chord> = movie.frames[(s + 2) % movie.frames.len()].chords.iter().copied().collect();
    let (src, dst) = (&sim.lists[s], &sim.lists[s + 2]);
    let count = |c: Chord, curve: Curve| src.count(curve, Leaf::Chord(c.0, c.1));
    let parity = movie.transitions[s].parity;
    let mut out = Vec::new();
    for (xi, &x) in d1.chords.iter().enumerate() {
        let y = d1.chords[1 - xi];
        let Some(made) = reconnect(&pos, x, d) else { continue };
        let mid = with(before, &[x, d], &made, &pos);
        if FaceMap::new(&order, &mid).is_none() {
            continue;
        }
        for r in made {
            let Some(last) = reconnect(&pos, y, r) else { continue };
            let end = with(&mid, &[y, r], &last, &pos);
            if end.iter().copied().collect::<BTreeSet<_>>() != target {
                continue;
            }
            let sorted = |mut p: [Chord; 2]| {
                p.sort_by_key(|c| pos[&c.0]);
                p
            };
            let first = sorted([x, d]);
            let second = sorted([y, r]);
            let ks = splits(count(x, Curve::K)).flat_map(|a| splits(count(d, Curve::K)).map(move |b| [a, b]));
            let ms: Vec<[u32; 2]> =
                splits(count(x, Curve::M)).flat_map(|a| splits(count(d, Curve::M)).map(move |b| [a, b])).collect();
            let found = ks.flat_map(|k| ms.iter().map(move |&m| (k, m))).find_map(|(k, m)| {
                let t1 = Transition { kind: TransitionKind::Bb(BbData { chords: first, k, m }), parity };
                let (lists, _) = route(&pos, src, &t1, s).ok()?;
                let t2 = Transition { kind: TransitionKind::Bb(BbData { chords: second, k: [0, 0], m: [0, 0] }), parity };
                derive(&pos, &lists, dst, &t2).map(|_| lists)
            });
            if let Some(lists) = found {
                out.push(Variant { first, second, lists });
            }
        }
    }
    if out.is_empty() {
        return Err(RewriteError::Precondition("no variant keeps K transverse".into()));
    }
    Ok(out)
}

/// Replace the two saddles of a site by a variant. Counts are unchanged and
/// the region's two vertices each lose one singularity.
pub fn change_of_foliation(movie: &FoliationMovie, site: &FoliationSite) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    let mut last = RewriteError::Precondition("no admissible variant".into());
    for variant in variants(movie, site)? {
        match apply(movie, site, &variant) {
            Ok(out) => return Ok(out),
            Err(e) => last = e,
        }
    }
    Err(RewriteError::Precondition(format!("no admissible variant ({last})")))
}

pub fn apply_variant(movie: &FoliationMovie, site: &FoliationSite, variant: &Variant) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    if !variants(movie, site)?.contains(variant) {
        return Err(RewriteError::Precondition("not a variant of this site".into()));
    }
    apply(movie, site, variant)
}

fn apply(movie: &FoliationMovie, site: &FoliationSite, variant: &Variant) -> Result<FoliationMovie, RewriteError> {
    let s = site.saddle;
    let pos = movie.positions();
    let mut sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let mut out = movie.clone();
    out.frames[s + 1].chords = with(&movie.frames[s].chords, &variant.first, &reconnect(&pos, variant.first[0], variant.first[1]).expect("variant"), &pos);
    for (t, chords) in [(s, variant.first), (s + 1, variant.second)] {
        out.transitions[t].kind = TransitionKind::Bb(BbData { chords, k: [0, 0], m: [0, 0] });
    }
    sim.lists[s + 1] = variant.lists.clone();
    let out = assemble(out, &sim.lists).ok_or(RewriteError::NoRouting)?;
    checked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{random_movie, validate};

    #[test]
    fn random_sites_keep_n1_n2_and_unload_the_region() {
        let mut rng = crate::random::rng(11);
        let mut applied = 0;
        for _ in 0..6 {
            let Some(m) = random_movie(&mut rng, 6, 50) else { continue };
            for site in foliation_sites(&m) {
                let Ok(out) = change_of_foliation(&m, &site) else { continue };
                assert!(validate(&out).is_valid());
                assert_eq!((out.n1, out.n2()), (m.n1, m.n2()));
                assert_eq!(out.total_valence(), m.total_valence());
                let (before, after) = (m.valences(), out.valences());
                for v in [site.region.0, site.region.1] {
                    assert_eq!(after[&v] + 1, before[&v]);
                }
                applied += 1;
            }
        }
        assert!(applied > 0);
    }
}
