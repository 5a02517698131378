use super::exchange::{pair_sites, push_loops};
use super::excise::{adjacent, excise_unchecked, Excision};
use super::{checked, require_valid, RewriteError};
use crate::foliation::{families, simulate, Curve, FoliationMovie, Leaf, TransitionKind};

/// Result of eliminating a valence-two vertex.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub movie: FoliationMovie,
    /// The vertex removed along with `v0`.
    pub partner: u32,
    pub exchanges: u32,
    pub destabilizations: u32,
}

/// Valence-two vertices whose two singularities are bb saddles of opposite
/// parity.
pub fn valence_two_vertices(movie: &FoliationMovie) -> Vec<u32> {
    movie
        .vertices
        .iter()
        .map(|v| v.id)
        .filter(|&v| star_disc(movie, v).is_ok())
        .collect()
}

fn star_disc(movie: &FoliationMovie, v0: u32) -> Result<[usize; 2], RewriteError> {
    let saddles = movie.saddles_at(v0);
    if saddles.len() != 2 {
        return Err(RewriteError::Precondition(format!("vertex {v0} has valence {}, not 2", saddles.len())));
    }
    let (s1, s2) = (saddles[0], saddles[1]);
    let bb = |t: usize| matches!(movie.transitions[t].kind, TransitionKind::Bb(_));
    if !bb(s1) || !bb(s2) || movie.transitions[s1].parity == movie.transitions[s2].parity {
        return Err(RewriteError::Precondition(format!("star of vertex {v0} is not a disc")));
    }
    Ok([s1, s2])
}

/// Remove `v0` and an axis neighbour it shares a b-arc family with. A
/// K-free family is excised after one exchange. A family of one fiber that
/// K crosses is cleared by rerouting through the long arc; the strands that
/// then close up after one turn are destabilizations.
pub fn eliminate_valence_two(movie: &FoliationMovie, v0: u32) -> Result<Elimination, RewriteError> {
    require_valid(movie)?;
    let saddles = star_disc(movie, v0)?;
    let sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let f = movie.transitions.len();
    let mut last = RewriteError::Precondition(format!("no b-arc family at vertex {v0} can be removed"));
    for fam in families(movie) {
        let (c, (Some(start), Some(end))) = (fam.chord, (fam.start, fam.end)) else { continue };
        let at_v0 = c.0 == v0 || c.1 == v0;
        if !at_v0 || !saddles.contains(&start) || !saddles.contains(&end) || adjacent(&order, c).is_none() {
            continue;
        }
        let partner = if c.0 == v0 { c.1 } else { c.0 };
        let leaf = Leaf::Chord(c.0, c.1);
        let free = fam.frames.iter().all(|&fr| sim.lists[fr].count(Curve::K, leaf) + sim.lists[fr].count(Curve::M, leaf) == 0);
        let attempt = if free {
            excise_unchecked(movie, &Excision { chord: c, frames: fam.frames.clone() }).map(|m| (m, 0))
        } else if let (1, Some(site)) = (fam.frames.len(), pair_sites(movie).into_iter().find(|p| p.short == c && (p.saddle + 1) % f == fam.frames[0])) {
            push_loops(movie, &site)
        } else {
            Err(RewriteError::Precondition("K crosses a family of several fibers".into()))
        };
        match attempt.and_then(|(m, d)| checked(m).map(|m| (m, d))) {
            Ok((out, destabilizations)) => {
                return Ok(Elimination { movie: out, partner, exchanges: 1, destabilizations });
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::validate;

    #[test]
    fn elimination_removes_two_vertices() {
        let m = crate::corpus::fixture("valence_two").unwrap();
        let mut applied = 0;
        for v in valence_two_vertices(&m) {
            let Ok(e) = eliminate_valence_two(&m, v) else { continue };
            assert!(validate(&e.movie).is_valid());
            assert_eq!(e.movie.n2() + 2, m.n2());
            assert_eq!(e.movie.saddle_count() + 2, m.saddle_count());
            assert_eq!(e.exchanges, 1);
            assert!(!e.movie.vertices.iter().any(|x| x.id == v || x.id == e.partner));
            applied += 1;
        }
        assert!(applied > 0);
    }

    #[test]
    fn valence_four_vertex_is_rejected() {
        let m = crate::foliation::grid_fixture(4).unwrap();
        assert!(valence_two_vertices(&m).is_empty());
        assert!(eliminate_valence_two(&m, m.vertices[0].id).is_err());
    }
}
