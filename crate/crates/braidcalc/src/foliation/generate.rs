use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::sim::{assemble, reconnect, route, Lists};
use super::{
    validate, BbData, Chord, Curve, FaceMap, FiberState, FoliationMovie, Leaf, Parity, Transition,
    TransitionKind, Vertex,
};

/// Pairs of chords that cobound a face.
fn face_pairs(order: &[u32], chords: &[Chord]) -> Vec<[Chord; 2]> {
    let Some(fm) = FaceMap::new(order, chords) else { return vec![] };
    let mut out = Vec::new();
    for (i, &x) in chords.iter().enumerate() {
        for &y in &chords[i + 1..] {
            if (0..fm.face_count()).any(|f| fm.borders(x, f) && fm.borders(y, f)) {
                out.push([x, y]);
            }
        }
    }
    out
}

fn sorted(pos: &HashMap<u32, usize>, mut c: Vec<Chord>) -> Vec<Chord> {
    c.sort_by_key(|x| pos[&x.0]);
    c
}

/// Saddle walk of `n / 2` steps from the matching of consecutive vertices,
/// followed by its mirror image with opposite parities. Every vertex then
/// sees both parities and the Euler count closes up.
fn palindrome<R: Rng>(rng: &mut R, n: usize) -> Option<FoliationMovie> {
    let order: Vec<u32> = (0..n as u32).collect();
    let pos: HashMap<u32, usize> = order.iter().map(|&v| (v, v as usize)).collect();
    let shift = rng.gen_range(0..2u32);
    let start: Vec<Chord> = sorted(
        &pos,
        (0..n as u32 / 2)
            .map(|i| {
                let (a, b) = ((2 * i + shift) % n as u32, (2 * i + 1 + shift) % n as u32);
                (a.min(b), a.max(b))
            })
            .collect(),
    );
    let mut frames = vec![start];
    let mut steps: Vec<([Chord; 2], Parity)> = Vec::new();
    let mut made: Option<[Chord; 2]> = None;
    for _ in 0..n / 2 {
        let cur = frames.last().expect("frame").clone();
        let mut pairs = face_pairs(&order, &cur);
        if let Some(m) = made {
            pairs.retain(|p| !(p.contains(&m[0]) && p.contains(&m[1])));
            if rng.gen_bool(0.6) {
                let follow: Vec<[Chord; 2]> = pairs.iter().copied().filter(|p| p.contains(&m[0]) || p.contains(&m[1])).collect();
                if !follow.is_empty() {
                    pairs = follow;
                }
            }
        }
        let pair = *pairs.choose(rng)?;
        let new = reconnect(&pos, pair[0], pair[1])?;
        let mut next: Vec<Chord> = cur.into_iter().filter(|c| !pair.contains(c)).collect();
        next.extend(new);
        frames.push(sorted(&pos, next));
        let parity = if rng.gen_bool(0.5) { Parity::Pos } else { Parity::Neg };
        steps.push((pair, parity));
        made = Some(new);
    }
    let mut transitions: Vec<Transition> =
        steps.iter().map(|&(chords, parity)| Transition { kind: TransitionKind::Bb(BbData { chords, k: [0, 0], m: [0, 0] }), parity }).collect();
    for i in (0..steps.len()).rev() {
        let (pair, parity) = steps[i];
        let back = reconnect(&pos, pair[0], pair[1])?;
        transitions.push(Transition {
            kind: TransitionKind::Bb(BbData { chords: back, k: [0, 0], m: [0, 0] }),
            parity: parity.flip(),
        });
        if i > 0 {
            frames.push(frames[i].clone());
        }
    }
    let vertices = order
        .iter()
        .map(|&id| Vertex { id, parity: if id % 2 == 0 { Parity::Pos } else { Parity::Neg } })
        .collect();
    let frames = frames
        .into_iter()
        .map(|chords| FiberState { chords, circles: vec![], punctures: Default::default() })
        .collect();
    Some(FoliationMovie { vertices, frames, transitions, n1: 0, n3: 0 })
}

/// Random K routing through a skeleton. `None` unless the strands close up
/// into one valid knot.
fn decorate<R: Rng>(rng: &mut R, skeleton: &FoliationMovie) -> Option<FoliationMovie> {
    let pos = skeleton.positions();
    let mut lists = Lists::default();
    let mut label = 0;
    for &c in &skeleton.frames[0].chords {
        let n = rng.gen_range(1..=2);
        lists.k.insert(Leaf::Chord(c.0, c.1), (label..label + n).collect());
        label += n;
    }
    let mut all = vec![lists];
    for (t, tr) in skeleton.transitions.iter().enumerate() {
        let cur = all.last().expect("lists");
        let TransitionKind::Bb(d) = tr.kind else { return None };
        let len = |c: Chord| cur.count(Curve::K, Leaf::Chord(c.0, c.1));
        let k = [rng.gen_range(0..=len(d.chords[0])), rng.gen_range(0..=len(d.chords[1]))];
        let probe = Transition { kind: TransitionKind::Bb(BbData { k, ..d }), parity: tr.parity };
        let (next, _) = route(&pos, cur, &probe, t).ok()?;
        all.push(next);
    }
    let (first, last) = (&all[0], all.last().expect("lists"));
    if skeleton.frames[0].chords.iter().any(|c| first.count(Curve::K, Leaf::Chord(c.0, c.1)) != last.count(Curve::K, Leaf::Chord(c.0, c.1))) {
        return None;
    }
    let sim = super::Simulation { lists: all.clone(), crossings: vec![] };
    if sim.components(Curve::K).len() != 1 {
        return None;
    }
    let movie = assemble(skeleton.clone(), &all)?;
    validate(&movie).is_valid().then_some(movie)
}

/// A random valid tiled movie on `vertices` axis points (even, at least 4),
/// built from a saddle walk and its mirror image with a random single
/// component K. Gives up after `attempts` tries.
pub fn random_movie<R: Rng>(rng: &mut R, vertices: usize, attempts: usize) -> Option<FoliationMovie> {
    if vertices < 4 || vertices % 2 == 1 {
        return None;
    }
    for _ in 0..attempts {
        let Some(skeleton) = palindrome(rng, vertices) else { continue };
        for _ in 0..2000 {
            if let Some(m) = decorate(rng, &skeleton) {
                return Some(m);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::validate;

    #[test]
    fn generated_movies_are_valid_tilings() {
        let mut rng = crate::random::rng(1);
        let m = random_movie(&mut rng, 6, 50).expect("a six-vertex movie");
        assert_eq!(m.n2(), 6);
        assert_eq!(m.saddle_count(), 6);
        assert!(validate(&m).is_valid());
        assert!(!m.has_circles());
    }

    #[test]
    fn odd_or_tiny_counts_give_nothing() {
        let mut rng = crate::random::rng(1);
        assert!(random_movie(&mut rng, 5, 5).is_none());
        assert!(random_movie(&mut rng, 2, 5).is_none());
    }
}
