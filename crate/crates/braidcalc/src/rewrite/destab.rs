use super::excise::cleanup;
use super::{checked, require_valid, RewriteError};
use crate::foliation::{
    assemble, simulate, Chord, Curve, Direction, FoliationMovie, Leaf, Lists, TransitionKind,
};

/// A K-subarc that runs once around the axis next to vertex `vertex`,
/// leaving and re-entering the saddle `saddle` through its singular leaf.
/// Together with that leaf it bounds a disc holding one vertex and no
/// singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DestabSite {
    pub saddle: usize,
    pub vertex: u32,
}

fn chord_at(movie: &FoliationMovie, f: usize, v: u32) -> Option<Chord> {
    movie.chord_at(f, v)
}

/// Index from `v` of the strand nearest `v` on chord `c` with `len` strands.
fn near(c: Chord, v: u32, len: usize) -> usize {
    if c.0 == v {
        0
    } else {
        len - 1
    }
}

/// Number of K strands on `c` that a bb saddle sends along endpoint `v`.
fn part_at(split: u32, c: Chord, v: u32, len: u32) -> u32 {
    if c.0 == v {
        split
    } else {
        len - split
    }
}

/// Whether the v-nearest K strand on v's chord stays there across
/// transition `t`.
fn hugs(movie: &FoliationMovie, t: usize, v: u32) -> bool {
    let Some(c) = chord_at(movie, t, v) else { return false };
    let len = movie.frames[t].count(Leaf::Chord(c.0, c.1), Curve::K);
    if len == 0 {
        return false;
    }
    match &movie.transitions[t].kind {
        TransitionKind::Bb(d) => match d.chords.iter().position(|&x| x == c) {
            Some(i) => part_at(d.k[i], c, v, len) > 0,
            None => true,
        },
        TransitionKind::Bc(d) if d.chord == c => {
            let at = d.k[0];
            match d.dir {
                Direction::Absorb => {
                    if c.0 == v {
                        at >= 1 || movie.frames[t].count(Leaf::Circle(d.circle), Curve::K) == 0
                    } else {
                        at < len
                    }
                }
                Direction::Emit => {
                    let idx = near(c, v, len as usize) as u32;
                    idx < at || idx >= at + d.k[1]
                }
            }
        }
        TransitionKind::Bc(_) => true,
    }
}

/// Whether the v-nearest K strand on v's chord stops being v-nearest at
/// transition `s` while a strand stays next to `v` after it.
fn breaks(movie: &FoliationMovie, s: usize, v: u32) -> bool {
    let f = movie.transitions.len();
    let Some(c) = chord_at(movie, s, v) else { return false };
    let len = movie.frames[s].count(Leaf::Chord(c.0, c.1), Curve::K);
    if len == 0 {
        return false;
    }
    let broken = match &movie.transitions[s].kind {
        TransitionKind::Bb(d) => match d.chords.iter().position(|&x| x == c) {
            Some(i) => part_at(d.k[i], c, v, len) == 0,
            None => false,
        },
        TransitionKind::Bc(d) if d.chord == c => {
            let at = d.k[0];
            match d.dir {
                Direction::Absorb => {
                    movie.frames[s].count(Leaf::Circle(d.circle), Curve::K) > 0 && if c.0 == v { at == 0 } else { at == len }
                }
                Direction::Emit => {
                    let idx = near(c, v, len as usize) as u32;
                    idx >= at && idx < at + d.k[1]
                }
            }
        }
        TransitionKind::Bc(_) => false,
    };
    let after = (s + 1) % f;
    broken
        && chord_at(movie, after, v).is_some_and(|c| movie.frames[after].count(Leaf::Chord(c.0, c.1), Curve::K) > 0)
}

pub fn destab_sites(movie: &FoliationMovie) -> Vec<DestabSite> {
    let f = movie.transitions.len();
    let mut out = Vec::new();
    for s in 0..f {
        let mut ends: Vec<u32> = movie.frames[s].chords.iter().flat_map(|c| [c.0, c.1]).collect();
        ends.sort_unstable();
        for v in ends {
            if breaks(movie, s, v) && (1..f).map(|k| (s + k) % f).all(|t| hugs(movie, t, v)) {
                out.push(DestabSite { saddle: s, vertex: v });
            }
        }
    }
    out
}

fn nearest_label(movie: &FoliationMovie, lists: &Lists, f: usize, v: u32) -> Option<u32> {
    let c = chord_at(movie, f % movie.frames.len(), v)?;
    let l = lists.get(Curve::K, Leaf::Chord(c.0, c.1));
    if l.is_empty() {
        return None;
    }
    Some(l[near(c, v, l.len())])
}

/// Push the K-subarc of a site across its disc, reducing the braid index
/// by one.
pub fn destabilize(movie: &FoliationMovie, site: DestabSite) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    if !destab_sites(movie).contains(&site) {
        return Err(RewriteError::Precondition(format!("{site:?} is not a destabilization site")));
    }
    let sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let s = site.saddle;
    let v = site.vertex;
    let end = nearest_label(movie, &sim.lists[s], s, v).ok_or(RewriteError::NoRouting)?;
    let start = nearest_label(movie, &sim.lists[s + 1], s + 1, v).ok_or(RewriteError::NoRouting)?;
    let mut lists = sim.lists.clone();
    for (fr, l) in lists.iter_mut().enumerate() {
        let gone = if fr <= s { end } else { start };
        for list in l.k.values_mut() {
            list.retain(|&x| x != gone);
        }
        if fr > s {
            for list in l.k.values_mut() {
                for x in list.iter_mut() {
                    if *x == end {
                        *x = start;
                    }
                }
            }
        }
        l.k.retain(|_, x| !x.is_empty());
    }
    let mut out = assemble(movie.clone(), &lists).ok_or(RewriteError::NoRouting)?;
    cleanup(&mut out)?;
    checked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use crate::foliation::{classify, grid_fixture, Classification};

    #[test]
    fn bebe_vertex_has_a_site() {
        let m = fixture("mixed_bebe").unwrap();
        let sites = destab_sites(&m);
        assert!(!sites.is_empty());
        let out = destabilize(&m, sites[0]).unwrap();
        assert_eq!(out.n1, m.n1 - 1);
    }

    #[test]
    fn coherent_tiling_has_no_sites() {
        assert!(destab_sites(&grid_fixture(6).unwrap()).is_empty());
    }

    #[test]
    fn destabilizing_down_to_circular() {
        let mut m = fixture("mixed_bebe").unwrap();
        while let Some(&s) = destab_sites(&m).first() {
            let n1 = m.n1;
            m = destabilize(&m, s).unwrap();
            assert_eq!(m.n1, n1 - 1);
        }
        assert!(matches!(classify(&m), Ok(Classification::Circular | Classification::Mixed)));
    }
}
