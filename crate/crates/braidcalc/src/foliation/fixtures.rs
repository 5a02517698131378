use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::sim::{assemble, reconnect, route, Lists};
use super::{
    canonical_chord, BbData, Chord, Circle, Curve, FiberState, FoliationMovie, Leaf, Parity,
    Transition, TransitionKind, Vertex,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid length must be even and at least 4, got {0}")]
    Length(usize),
    #[error("no strand routing found for saddle pair {0}")]
    NoRouting(usize),
}

/// Undecorated 2×l grid: vertices in staircase axis order, frames as
/// chord lists and transitions with empty routing.
fn grid_skeleton(l: usize) -> (Vec<Vertex>, Vec<Vec<Chord>>, Vec<Transition>) {
    let l = l as i64;
    let wrap = |i: i64, j: i64| (i.rem_euclid(2), j.rem_euclid(l));
    let mut order = vec![(0i64, 0i64)];
    let mut i = 0;
    for j in 1..l {
        order.push((i, j));
        i = 1 - i;
        order.push((i, j));
    }
    order.push((1, 0));
    let id: HashMap<(i64, i64), u32> =
        order.iter().enumerate().map(|(n, &v)| (v, n as u32)).collect();
    let parity = |i: i64, j: i64| if (i + j).rem_euclid(2) == 0 { Parity::Pos } else { Parity::Neg };
    let vertices: Vec<Vertex> =
        order.iter().map(|&(i, j)| Vertex { id: id[&(i, j)], parity: parity(i, j) }).collect();
    let theta = |i: i64, j: i64| {
        let (i, j) = wrap(i, j);
        2 * j + if j % 2 == 0 { i } else { 1 - i }
    };
    let f = (2 * l) as usize;
    // For each vertex, the saddles at it in θ order with the vertex it is
    // joined to right after each one.
    let mut events: HashMap<u32, Vec<(i64, u32)>> = HashMap::new();
    for &(i, j) in &order {
        let v = |a: i64, b: i64| id[&wrap(a, b)];
        let (ne, nw, sw, se) = (theta(i, j), theta(i - 1, j), theta(i - 1, j - 1), theta(i, j - 1));
        let (n, w, s, e) = (v(i, j + 1), v(i - 1, j), v(i, j - 1), v(i + 1, j));
        let mut ev = if parity(i, j) == Parity::Pos {
            vec![(ne, n), (nw, w), (sw, s), (se, e)]
        } else {
            vec![(ne, e), (se, s), (sw, w), (nw, n)]
        };
        ev.sort_unstable();
        events.insert(id[&(i, j)], ev);
    }
    let pos: HashMap<u32, usize> = (0..order.len() as u32).map(|v| (v, v as usize)).collect();
    let matching_after = |t: i64| -> Vec<Chord> {
        let mut out = BTreeSet::new();
        for (&v, ev) in &events {
            let partner = ev.iter().rev().find(|e| e.0 <= t).unwrap_or(ev.last().unwrap()).1;
            out.insert(canonical_chord(&pos, v, partner));
        }
        out.into_iter().collect()
    };
    let frames: Vec<Vec<Chord>> =
        (0..f).map(|fr| matching_after((fr as i64 - 1).rem_euclid(f as i64))).collect();
    let mut tiles = HashMap::new();
    for i in 0..2 {
        for j in 0..l {
            tiles.insert(theta(i, j), (i, j));
        }
    }
    let transitions = (0..f)
        .map(|t| {
            let (i, j) = tiles[&(t as i64)];
            let corners = [id[&wrap(i, j)], id[&wrap(i + 1, j)], id[&wrap(i, j + 1)], id[&wrap(i + 1, j + 1)]];
            let hit: Vec<Chord> = frames[t]
                .iter()
                .copied()
                .filter(|c| corners.contains(&c.0))
                .collect();
            debug_assert_eq!(hit.len(), 2);
            Transition {
                kind: TransitionKind::Bb(BbData { chords: [hit[0], hit[1]], k: [0, 0], m: [0, 0] }),
                parity: parity(i, j),
            }
        })
        .collect();
    (vertices, frames, transitions)
}

fn splits(a: usize, b: usize) -> impl Iterator<Item = [u32; 2]> {
    (0..=a as u32).flat_map(move |x| (0..=b as u32).map(move |y| [x, y]))
}

fn set(l: &Lists, chord: Chord) -> BTreeSet<u32> {
    l.get(Curve::K, Leaf::Chord(chord.0, chord.1)).iter().copied().collect()
}

fn adjacent(pos: &HashMap<u32, usize>, c: Chord) -> bool {
    let d = pos[&c.0].abs_diff(pos[&c.1]);
    d == 1 || d == pos.len() - 1
}

/// K lists after a saddle pair in which one strand moves from the doubly
/// punctured chord to its neighbour and every strand passes the short
/// middle arc.
fn advance_pair(
    pos: &HashMap<u32, usize>,
    start: &Lists,
    first: [Chord; 2],
) -> Option<(Lists, Lists, [u32; 2], [u32; 2])> {
    let mid_chords = reconnect(pos, first[0], first[1])?;
    let long = *mid_chords.iter().find(|&&c| !adjacent(pos, c))?;
    let len = |l: &Lists, ch: Chord| l.get(Curve::K, Leaf::Chord(ch.0, ch.1)).len();
    let (dbl, single) = if set(start, first[0]).len() == 2 { (first[0], first[1]) } else { (first[1], first[0]) };
    for k in splits(len(start, first[0]), len(start, first[1])) {
        let t1 = Transition { kind: TransitionKind::Bb(BbData { chords: first, k, m: [0, 0] }), parity: Parity::Pos };
        let Ok((mid, _)) = route(pos, start, &t1, 0) else { continue };
        if len(&mid, long) != 0 {
            continue;
        }
        for k2 in splits(len(&mid, mid_chords[0]), len(&mid, mid_chords[1])) {
            let t2 = Transition { kind: TransitionKind::Bb(BbData { chords: mid_chords, k: k2, m: [0, 0] }), parity: Parity::Pos };
            let Ok((end, _)) = route(pos, &mid, &t2, 1) else { continue };
            let moved = set(&end, dbl).len() == 1
                && set(&end, dbl).is_subset(&set(start, dbl))
                && set(start, single).is_subset(&set(&end, single));
            if moved {
                return Some((mid, end, k, k2));
            }
        }
    }
    None
}

fn skeleton_movie(l: usize) -> FoliationMovie {
    let (vertices, chords, transitions) = grid_skeleton(l);
    let frames = chords
        .into_iter()
        .map(|chords| FiberState { chords, circles: vec![], punctures: BTreeMap::new() })
        .collect();
    FoliationMovie { vertices, frames, transitions, n1: 0, n3: 0 }
}

/// Standard checkerboard tiling of the 2×l grid carrying an (l+1)-strand
/// knot. Each saddle pair moves one strand on to the next b-arc, every
/// strand passing the short arc in between.
pub fn grid_fixture(l: usize) -> Result<FoliationMovie, GridError> {
    if l < 4 || l % 2 == 1 {
        return Err(GridError::Length(l));
    }
    let movie = skeleton_movie(l);
    let pos = movie.positions();
    let chords_of = |t: usize| match movie.transitions[t].kind {
        TransitionKind::Bb(d) => d.chords,
        TransitionKind::Bc(_) => unreachable!(),
    };
    // The doubled chord starts on the arc of the first pair that the second
    // pair does not touch.
    let (first, next) = (chords_of(0), chords_of(2));
    let home = if next.contains(&first[0]) { first[1] } else { first[0] };
    let mut start = Lists::default();
    let mut label = 0;
    for &c in &movie.frames[0].chords {
        let n = if c == home { 2 } else { 1 };
        start.k.insert(Leaf::Chord(c.0, c.1), (label..label + n).collect());
        label += n;
    }
    let mut lists = vec![start];
    for j in 0..l {
        let cur = lists.last().unwrap().clone();
        let (mid, end, _, _) = advance_pair(&pos, &cur, chords_of(2 * j)).ok_or(GridError::NoRouting(j))?;
        lists.push(mid);
        lists.push(end);
    }
    assemble(movie, &lists).ok_or(GridError::NoRouting(l))
}

fn lists_of(k: &[(Chord, &[u32])], m: &[(Chord, &[u32])]) -> Lists {
    let mut out = Lists::default();
    for (c, l) in k {
        out.k.insert(Leaf::Chord(c.0, c.1), l.to_vec());
    }
    for (c, l) in m {
        out.m.insert(Leaf::Chord(c.0, c.1), l.to_vec());
    }
    out
}

/// The eight-vertex grid with a four-strand knot and a meridian m. The arc
/// (0,7) carries K in frame 0 only; over frames 2 to 6 only m meets it.
pub fn torus35_fixture() -> FoliationMovie {
    let k: [&[(Chord, &[u32])]; 9] = [
        &[((0, 7), &[0]), ((1, 2), &[1]), ((3, 4), &[2]), ((5, 6), &[3])],
        &[((0, 1), &[0, 1]), ((3, 4), &[2]), ((5, 6), &[3])],
        &[((1, 2), &[1, 0]), ((3, 4), &[2]), ((5, 6), &[3])],
        &[((2, 3), &[0, 1, 2]), ((5, 6), &[3])],
        &[((1, 2), &[0]), ((3, 4), &[2, 1]), ((5, 6), &[3])],
        &[((1, 2), &[0]), ((4, 5), &[1, 2, 3])],
        &[((1, 2), &[0]), ((3, 4), &[1]), ((5, 6), &[3, 2])],
        &[((1, 2), &[0]), ((3, 4), &[1]), ((6, 7), &[2, 3])],
        &[((0, 7), &[3]), ((1, 2), &[0]), ((3, 4), &[1]), ((5, 6), &[2])],
    ];
    let m_on = |f: usize| match f {
        1 => (0, 1),
        7 => (6, 7),
        _ => (0, 7),
    };
    let lists: Vec<Lists> = (0..9).map(|f| lists_of(k[f], &[(m_on(f), &[0])])).collect();
    assemble(skeleton_movie(4), &lists).expect("eight-vertex decoration routes")
}

/// A single circle carrying K, with no saddles.
pub fn circular_fixture(n1: u32) -> FoliationMovie {
    let circle = Circle { id: 0, face: None, parent: None };
    FoliationMovie {
        vertices: vec![],
        frames: vec![FiberState {
            chords: vec![],
            circles: vec![circle],
            punctures: BTreeMap::from([(Leaf::Circle(0), (n1, 0))]),
        }],
        transitions: vec![],
        n1,
        n3: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{
        b_support, classify, intersection_sequence, is_standard_tiling, simulate, validate,
        Classification, TopologyClass,
    };

    #[test]
    fn skeleton_frames_for_eight_vertices() {
        let (_, frames, _) = grid_skeleton(4);
        assert_eq!(frames[1], vec![(0, 1), (2, 7), (3, 4), (5, 6)]);
        assert_eq!(frames[0], vec![(0, 7), (1, 2), (3, 4), (5, 6)]);
    }

    #[test]
    fn grids_are_valid_tilings() {
        for l in [4, 6, 8, 10, 12] {
            let g = grid_fixture(l).unwrap();
            let r = validate(&g);
            assert!(r.is_valid(), "l={l}: {r}");
            assert_eq!(classify(&g).unwrap(), Classification::Tiled);
            assert_eq!(simulate(&g).unwrap().components(Curve::K).len(), 1);
            assert!(is_standard_tiling(&g).is_ok());
            assert!(intersection_sequence(&g, Curve::K).unwrap().coherent(), "l={l}");
        }
        assert_eq!(grid_fixture(5), Err(GridError::Length(5)));
    }

    #[test]
    fn torus35_is_valid() {
        let g = torus35_fixture();
        let r = validate(&g);
        assert!(r.is_valid(), "{r}");
        assert_eq!(g.n2(), 8);
        assert_eq!((g.n1, g.n3), (4, 1));
        assert!(intersection_sequence(&g, Curve::K).unwrap().coherent());
        assert!(intersection_sequence(&g, Curve::M).unwrap().coherent());
        let sm = b_support(&g, Curve::M).unwrap();
        assert_eq!(sm.class, TopologyClass::Annulus);
        assert!((0..2).all(|i| sm.boundary_saddles(i) == 2));
    }

    #[test]
    fn circular_is_circular() {
        assert_eq!(classify(&circular_fixture(3)).unwrap(), Classification::Circular);
    }
}
