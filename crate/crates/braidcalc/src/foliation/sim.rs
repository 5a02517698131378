use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{
    canonical_chord, Chord, Curve, Direction, FiberState, FoliationMovie, Leaf, Transition,
    TransitionKind,
};

/// Ordered strand labels per leaf, for K and for m.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lists {
    pub k: BTreeMap<Leaf, Vec<u32>>,
    pub m: BTreeMap<Leaf, Vec<u32>>,
}

impl Lists {
    pub fn curve(&self, c: Curve) -> &BTreeMap<Leaf, Vec<u32>> {
        match c {
            Curve::K => &self.k,
            Curve::M => &self.m,
        }
    }

    pub fn curve_mut(&mut self, c: Curve) -> &mut BTreeMap<Leaf, Vec<u32>> {
        match c {
            Curve::K => &mut self.k,
            Curve::M => &mut self.m,
        }
    }

    pub fn get(&self, c: Curve, leaf: Leaf) -> &[u32] {
        self.curve(c).get(&leaf).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, c: Curve, leaf: Leaf) -> u32 {
        self.get(c, leaf).len() as u32
    }

    /// Leaf and index holding a label.
    pub fn locate(&self, c: Curve, label: u32) -> Option<(Leaf, usize)> {
        self.curve(c)
            .iter()
            .find_map(|(leaf, l)| l.iter().position(|&x| x == label).map(|i| (*leaf, i)))
    }

    pub fn total(&self, c: Curve) -> usize {
        self.curve(c).values().map(|l| l.len()).sum()
    }

    /// Lists seeded from a frame's puncture counts, labelling strands in
    /// leaf order.
    pub fn seed(frame: &FiberState) -> Lists {
        let mut out = Lists::default();
        let mut next = [0u32; 2];
        for leaf in frame.leaves() {
            for (i, c) in [Curve::K, Curve::M].into_iter().enumerate() {
                let n = frame.count(leaf, c);
                let list: Vec<u32> = (next[i]..next[i] + n).collect();
                next[i] += n;
                out.curve_mut(c).insert(leaf, list);
            }
        }
        out
    }
}

/// What a strand passes through at a saddle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Crossing {
    /// The singular-leaf prong ending at this vertex.
    Prong(u32),
    IntoCircle,
    OutOfCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrandCrossing {
    pub curve: Curve,
    pub label: u32,
    pub crossing: Crossing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("transition {t}: chord {chord:?} is not in the source frame")]
    MissingChord { t: usize, chord: Chord },
    #[error("transition {t}: circle {id} is not in the source frame")]
    MissingCircle { t: usize, id: u32 },
    #[error("transition {t}: circle {id} already exists")]
    CircleExists { t: usize, id: u32 },
    #[error("transition {t}: chords of a bb saddle cross or coincide")]
    BadPair { t: usize },
    #[error("transition {t}: {curve:?} routing out of range")]
    RoutingRange { t: usize, curve: Curve },
    #[error("transition {t}: result does not match the next frame's leaves")]
    Structure { t: usize },
    #[error("frame {frame}: {curve:?} count on {leaf:?} is {got}, routing gives {expected}")]
    Count { frame: usize, leaf: Leaf, curve: Curve, expected: u32, got: u32 },
    #[error("frame/transition counts do not close up")]
    Shape,
}

/// Strand positions in every frame, plus the closing copy of frame 0 after
/// one full turn.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub lists: Vec<Lists>,
    pub crossings: Vec<Vec<StrandCrossing>>,
}

impl Simulation {
    /// Cycles of the first-return map on frame-0 labels.
    pub fn components(&self, c: Curve) -> Vec<Vec<u32>> {
        let first = &self.lists[0];
        let last = self.lists.last().expect("at least one frame");
        let next: HashMap<u32, u32> = last
            .curve(c)
            .iter()
            .flat_map(|(leaf, l)| {
                l.iter().enumerate().map(move |(i, &lab)| (lab, first.get(c, *leaf)[i]))
            })
            .collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut labels: Vec<u32> = first.curve(c).values().flatten().copied().collect();
        labels.sort_unstable();
        for start in labels {
            if seen.contains(&start) {
                continue;
            }
            let mut cyc = vec![start];
            seen.insert(start);
            let mut x = next[&start];
            while x != start {
                seen.insert(x);
                cyc.push(x);
                x = next[&x];
            }
            out.push(cyc);
        }
        out
    }
}

/// Alternative non-crossing pairing of two chords, in axis order.
pub(crate) fn reconnect(pos: &HashMap<u32, usize>, x: Chord, y: Chord) -> Option<[Chord; 2]> {
    let mut pts = [x.0, x.1, y.0, y.1];
    pts.sort_by_key(|v| pos[v]);
    let [p1, p2, p3, p4] = pts;
    let pair = |a: u32, b: u32| canonical_chord(pos, a, b);
    let has = |a: u32, b: u32| {
        let c = pair(a, b);
        c == x || c == y
    };
    if has(p1, p2) && has(p3, p4) {
        Some([pair(p1, p4), pair(p2, p3)])
    } else if has(p1, p4) && has(p2, p3) {
        Some([pair(p1, p2), pair(p3, p4)])
    } else {
        None
    }
}

/// Leaves of the frame after a transition: chords, and circle ids.
pub(crate) fn surgery(
    pos: &HashMap<u32, usize>,
    frame: &FiberState,
    tr: &Transition,
    t: usize,
) -> Result<(Vec<Chord>, Vec<u32>), SimError> {
    let mut chords = frame.chords.clone();
    let mut circles: Vec<u32> = frame.circles.iter().map(|c| c.id).collect();
    match &tr.kind {
        TransitionKind::Bb(d) => {
            for c in d.chords {
                if !chords.contains(&c) {
                    return Err(SimError::MissingChord { t, chord: c });
                }
            }
            if d.chords[0] == d.chords[1] {
                return Err(SimError::BadPair { t });
            }
            let new = reconnect(pos, d.chords[0], d.chords[1]).ok_or(SimError::BadPair { t })?;
            chords.retain(|c| !d.chords.contains(c));
            chords.extend(new);
        }
        TransitionKind::Bc(d) => {
            if !chords.contains(&d.chord) {
                return Err(SimError::MissingChord { t, chord: d.chord });
            }
            match d.dir {
                Direction::Absorb => {
                    if !circles.contains(&d.circle) {
                        return Err(SimError::MissingCircle { t, id: d.circle });
                    }
                    circles.retain(|&c| c != d.circle);
                }
                Direction::Emit => {
                    if circles.contains(&d.circle) {
                        return Err(SimError::CircleExists { t, id: d.circle });
                    }
                    circles.push(d.circle);
                }
            }
        }
    }
    chords.sort_by_key(|&(a, _)| pos[&a]);
    circles.sort_unstable();
    Ok((chords, circles))
}

/// Push the strand lists through one transition.
pub(crate) fn route(
    pos: &HashMap<u32, usize>,
    lists: &Lists,
    tr: &Transition,
    t: usize,
) -> Result<(Lists, Vec<StrandCrossing>), SimError> {
    let mut out = lists.clone();
    let mut crossings = Vec::new();
    for curve in [Curve::K, Curve::M] {
        let map = out.curve_mut(curve);
        match &tr.kind {
            TransitionKind::Bb(d) => {
                let split = match curve {
                    Curve::K => d.k,
                    Curve::M => d.m,
                };
                let mut parts: HashMap<u32, Vec<u32>> = HashMap::new();
                for (c, s) in d.chords.iter().zip(split) {
                    let l = map.remove(&Leaf::Chord(c.0, c.1)).unwrap_or_default();
                    let s = s as usize;
                    if s > l.len() {
                        return Err(SimError::RoutingRange { t, curve });
                    }
                    parts.insert(c.0, l[..s].to_vec());
                    parts.insert(c.1, l[s..].iter().rev().copied().collect());
                }
                for (&v, p) in &parts {
                    crossings.extend(p.iter().map(|&label| StrandCrossing {
                        curve,
                        label,
                        crossing: Crossing::Prong(v),
                    }));
                }
                let new = reconnect(pos, d.chords[0], d.chords[1]).ok_or(SimError::BadPair { t })?;
                for (p, q) in new {
                    let mut l = parts[&p].clone();
                    l.extend(parts[&q].iter().rev());
                    map.insert(Leaf::Chord(p, q), l);
                }
            }
            TransitionKind::Bc(d) => {
                let r = match curve {
                    Curve::K => d.k,
                    Curve::M => d.m,
                };
                let key = Leaf::Chord(d.chord.0, d.chord.1);
                let mut l = map.remove(&key).unwrap_or_default();
                let at = r[0] as usize;
                match d.dir {
                    Direction::Absorb => {
                        let mut c = map.remove(&Leaf::Circle(d.circle)).unwrap_or_default();
                        if d.reversed {
                            c.reverse();
                        }
                        let rot = r[1] as usize;
                        if at > l.len() || (rot > 0 && rot >= c.len()) {
                            return Err(SimError::RoutingRange { t, curve });
                        }
                        c.rotate_left(rot);
                        crossings.extend(c.iter().map(|&label| StrandCrossing {
                            curve,
                            label,
                            crossing: Crossing::OutOfCircle,
                        }));
                        l.splice(at..at, c);
                    }
                    Direction::Emit => {
                        let cnt = r[1] as usize;
                        if at + cnt > l.len() {
                            return Err(SimError::RoutingRange { t, curve });
                        }
                        let c: Vec<u32> = l.drain(at..at + cnt).collect();
                        crossings.extend(c.iter().map(|&label| StrandCrossing {
                            curve,
                            label,
                            crossing: Crossing::IntoCircle,
                        }));
                        map.insert(Leaf::Circle(d.circle), c);
                    }
                }
                map.insert(key, l);
            }
        }
    }
    Ok((out, crossings))
}

fn check_counts(frame: &FiberState, lists: &Lists, index: usize) -> Result<(), SimError> {
    for curve in [Curve::K, Curve::M] {
        for leaf in frame.leaves() {
            let expected = lists.count(curve, leaf);
            let got = frame.count(leaf, curve);
            if expected != got {
                return Err(SimError::Count { frame: index, leaf, curve, expected, got });
            }
        }
    }
    Ok(())
}

/// Route strands through the whole cycle, checking each frame's leaves and
/// puncture counts against the routing.
pub fn simulate(movie: &FoliationMovie) -> Result<Simulation, SimError> {
    let f = movie.frames.len();
    if f == 0 || (movie.transitions.len() != f && !(movie.transitions.is_empty() && f == 1)) {
        return Err(SimError::Shape);
    }
    let pos = movie.positions();
    let first = Lists::seed(&movie.frames[0]);
    let mut lists = vec![first.clone()];
    let mut crossings = Vec::new();
    if movie.transitions.is_empty() {
        lists.push(first);
        return Ok(Simulation { lists, crossings });
    }
    for (t, tr) in movie.transitions.iter().enumerate() {
        let frame = &movie.frames[t];
        let next = &movie.frames[(t + 1) % f];
        let (chords, circles) = surgery(&pos, frame, tr, t)?;
        let next_circles: Vec<u32> = next.circles.iter().map(|c| c.id).collect();
        if chords != next.chords || circles != next_circles {
            return Err(SimError::Structure { t });
        }
        let (l, c) = route(&pos, &lists[t], tr, t)?;
        check_counts(next, &l, (t + 1) % f)?;
        lists.push(l);
        crossings.push(c);
    }
    Ok(Simulation { lists, crossings })
}

fn same_cycle(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| a[r..].iter().chain(&a[..r]).eq(b.iter()))
}

pub(crate) fn lists_match(got: &Lists, want: &Lists) -> bool {
    [Curve::K, Curve::M].into_iter().all(|c| {
        let keys: std::collections::BTreeSet<Leaf> = got
            .curve(c)
            .iter()
            .chain(want.curve(c).iter())
            .filter(|(_, l)| !l.is_empty())
            .map(|(k, _)| *k)
            .collect();
        keys.into_iter().all(|leaf| match leaf {
            Leaf::Circle(_) => same_cycle(got.get(c, leaf), want.get(c, leaf)),
            Leaf::Chord(..) => got.get(c, leaf) == want.get(c, leaf),
        })
    })
}

fn bc_options(len: usize, circle: usize, dir: Direction) -> Vec<[u32; 2]> {
    match dir {
        Direction::Absorb => (0..=len)
            .flat_map(|at| (0..circle.max(1)).map(move |r| [at as u32, r as u32]))
            .collect(),
        Direction::Emit => (0..=len.saturating_sub(circle))
            .map(|at| [at as u32, circle as u32])
            .collect(),
    }
}

/// Routing data that carries `src` to `dst` across a transition whose
/// leaves are given by `tr`. Circle lists are compared up to rotation.
pub(crate) fn derive(
    pos: &HashMap<u32, usize>,
    src: &Lists,
    dst: &Lists,
    tr: &Transition,
) -> Option<Transition> {
    let mut out = *tr;
    match &mut out.kind {
        TransitionKind::Bb(d) => {
            let new = reconnect(pos, d.chords[0], d.chords[1])?;
            for curve in [Curve::K, Curve::M] {
                let mut split = [0u32; 2];
                for (i, c) in d.chords.iter().enumerate() {
                    let with_first = new
                        .iter()
                        .find(|n| n.0 == c.0 || n.1 == c.0)
                        .copied()
                        .expect("endpoint survives");
                    let target = dst.get(curve, Leaf::Chord(with_first.0, with_first.1));
                    let l = src.get(curve, Leaf::Chord(c.0, c.1));
                    split[i] = l.iter().take_while(|x| target.contains(x)).count() as u32;
                }
                match curve {
                    Curve::K => d.k = split,
                    Curve::M => d.m = split,
                }
            }
            let (got, _) = route(pos, src, &out, 0).ok()?;
            lists_match(&got, dst).then_some(out)
        }
        TransitionKind::Bc(d) => {
            let chord = Leaf::Chord(d.chord.0, d.chord.1);
            let circle = Leaf::Circle(d.circle);
            let side = match d.dir {
                Direction::Absorb => src,
                Direction::Emit => dst,
            };
            let flags: &[bool] = match d.dir {
                Direction::Absorb => &[false, true],
                Direction::Emit => &[false],
            };
            for &rev in flags {
                d.reversed = rev;
                let mut found = [None, None];
                for (i, curve) in [Curve::K, Curve::M].into_iter().enumerate() {
                    let len = src.get(curve, chord).len();
                    let clen = side.get(curve, circle).len();
                    for opt in bc_options(len, clen, d.dir) {
                        let mut probe = *d;
                        match curve {
                            Curve::K => probe.k = opt,
                            Curve::M => probe.k = found[0].unwrap_or(probe.k),
                        }
                        if curve == Curve::M {
                            probe.m = opt;
                        }
                        let t = Transition { kind: TransitionKind::Bc(probe), parity: tr.parity };
                        let Ok((got, _)) = route(pos, src, &t, 0) else { continue };
                        let ok = match leaf_part(&got, dst, curve, chord, circle) {
                            Some(v) => v,
                            None => continue,
                        };
                        if ok {
                            found[i] = Some(opt);
                            break;
                        }
                    }
                }
                if let [Some(k), Some(m)] = found {
                    d.k = k;
                    d.m = m;
                    let (got, _) = route(pos, src, &out, 0).ok()?;
                    return lists_match(&got, dst).then_some(out);
                }
            }
            None
        }
    }
}

fn leaf_part(got: &Lists, want: &Lists, curve: Curve, chord: Leaf, circle: Leaf) -> Option<bool> {
    Some(
        got.get(curve, chord) == want.get(curve, chord)
            && same_cycle(got.get(curve, circle), want.get(curve, circle)),
    )
}

/// Fill in puncture counts and routing from explicit strand lists, one per
/// frame plus the closing copy of frame 0. `None` when some transition
/// cannot carry its lists.
pub(crate) fn assemble(mut movie: FoliationMovie, lists: &[Lists]) -> Option<FoliationMovie> {
    let f = movie.frames.len();
    if lists.len() != f + 1 {
        return None;
    }
    let pos = movie.positions();
    for (fr, frame) in movie.frames.iter_mut().enumerate() {
        let mut punctures = BTreeMap::new();
        for leaf in frame.leaves() {
            let counts = (lists[fr].count(Curve::K, leaf), lists[fr].count(Curve::M, leaf));
            if counts != (0, 0) {
                punctures.insert(leaf, counts);
            }
        }
        frame.punctures = punctures;
    }
    for t in 0..movie.transitions.len() {
        movie.transitions[t] = derive(&pos, &lists[t], &lists[t + 1], &movie.transitions[t])?;
    }
    movie.n1 = lists[0].total(Curve::K) as u32;
    movie.n3 = lists[0].total(Curve::M) as u32;
    Some(movie)
}
