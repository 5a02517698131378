use std::collections::{BTreeSet, HashMap};

use super::{checked, require_valid, RewriteError};
use crate::foliation::{
    assemble, canonical_chord, essential, families, lists_match, simulate, BbData, BcData, Chord, Circle,
    Curve, Direction, FaceMap, FiberState, FoliationMovie, Leaf, Lists, Transition,
    TransitionKind, Vertex,
};

/// A run of frames in which the b-arc `chord`, joining two axis-adjacent
/// vertices, carries no K strand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excision {
    pub chord: Chord,
    pub frames: Vec<usize>,
}

pub(crate) fn adjacent(order: &[u32], c: Chord) -> Option<(u32, u32)> {
    let n = order.len();
    let pa = order.iter().position(|&x| x == c.0)?;
    let pb = order.iter().position(|&x| x == c.1)?;
    if (pa + 1) % n == pb {
        Some((c.0, c.1))
    } else if (pb + 1) % n == pa {
        Some((c.1, c.0))
    } else {
        None
    }
}

/// Families of K-free b-arcs between adjacent vertices, bounded by saddles
/// on both ends, in (first frame, vertex) order.
pub fn inessential_families(movie: &FoliationMovie) -> Vec<Excision> {
    let Ok(sim) = simulate(movie) else { return vec![] };
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let mut out: Vec<Excision> = families(movie)
        .into_iter()
        .filter(|fam| fam.start.is_some() && fam.end.is_some())
        .filter(|fam| adjacent(&order, fam.chord).is_some())
        .filter(|fam| {
            let leaf = Leaf::Chord(fam.chord.0, fam.chord.1);
            fam.frames.iter().all(|&fr| sim.lists[fr].count(Curve::K, leaf) == 0)
        })
        .map(|fam| Excision { chord: fam.chord, frames: fam.frames })
        .collect();
    out.sort_by_key(|e| (e.frames.iter().min().copied(), e.chord));
    out
}

struct Node {
    state: FiberState,
    lists: Lists,
    merged: Option<Chord>,
}

struct Ctx<'a> {
    order: &'a [u32],
    new_order: Vec<u32>,
    npos: HashMap<u32, usize>,
    chord: Chord,
    a: u32,
    prev_a: u32,
    release_m: bool,
}

impl Ctx<'_> {
    fn touches(&self, c: Chord) -> bool {
        c != self.chord && [c.0, c.1].iter().any(|x| *x == self.chord.0 || *x == self.chord.1)
    }

    fn node(&self, state: &FiberState, lists: &Lists, excised: bool, circle: Option<u32>) -> Result<Node, RewriteError> {
        let (v, w) = self.chord;
        let present = state.chords.contains(&self.chord);
        let mut out = Lists::default();
        let mut chords = Vec::new();
        let oriented = |c: Chord, from: u32, curve: Curve| -> Vec<u32> {
            let mut l = lists.get(curve, Leaf::Chord(c.0, c.1)).to_vec();
            if c.0 != from {
                l.reverse();
            }
            l
        };
        for &c in &state.chords {
            if c == self.chord || self.touches(c) {
                continue;
            }
            chords.push(c);
            for curve in [Curve::K, Curve::M] {
                out.curve_mut(curve).insert(Leaf::Chord(c.0, c.1), lists.get(curve, Leaf::Chord(c.0, c.1)).to_vec());
            }
        }
        let mut merged = None;
        if !present {
            let at = |u: u32| state.chords.iter().copied().find(|&(p, q)| p == u || q == u).expect("matching");
            let (cv, cw) = (at(v), at(w));
            let other = |c: Chord, u: u32| if c.0 == u { c.1 } else { c.0 };
            let (x, y) = (other(cv, v), other(cw, w));
            let m = canonical_chord(&self.npos, x, y);
            for curve in [Curve::K, Curve::M] {
                let mut l = oriented(cv, x, curve);
                l.extend(oriented(cw, w, curve));
                if m.0 != x {
                    l.reverse();
                }
                out.curve_mut(curve).insert(Leaf::Chord(m.0, m.1), l);
            }
            chords.push(m);
            merged = Some(m);
        }
        chords.sort_by_key(|c| self.npos[&c.0]);
        let old_fm = FaceMap::new(self.order, &state.chords).ok_or(RewriteError::NoRouting)?;
        let new_fm = FaceMap::new(&self.new_order, &chords)
            .ok_or_else(|| RewriteError::Precondition("merged b-arcs cross".into()))?;
        let map_face = |old: Option<u32>| -> Option<u32> {
            if chords.is_empty() {
                return None;
            }
            let g = old_fm
                .face_named(old)
                .map(|fi| old_fm.gaps(fi))
                .and_then(|gaps| gaps.into_iter().find(|&u| u != v && u != w))
                .unwrap_or(self.prev_a);
            new_fm.face_id(new_fm.face_after(g)?)
        };
        let small = present.then(|| old_fm.face_after(self.a)).flatten();
        let mut circles = Vec::new();
        for c in &state.circles {
            let inside = small.is_some() && old_fm.face_named(c.face) == small;
            let parent = match (inside && !excised && c.parent.is_none(), circle) {
                (true, Some(id)) => Some(id),
                _ => c.parent,
            };
            circles.push(Circle { id: c.id, face: map_face(c.face), parent });
            for curve in [Curve::K, Curve::M] {
                out.curve_mut(curve).insert(Leaf::Circle(c.id), lists.get(curve, Leaf::Circle(c.id)).to_vec());
            }
        }
        if present && !excised {
            let id = circle.ok_or(RewriteError::NoRouting)?;
            let face = if chords.is_empty() { None } else { new_fm.face_id(new_fm.face_after(self.prev_a).expect("vertex")) };
            circles.push(Circle { id, face, parent: None });
            for curve in [Curve::K, Curve::M] {
                out.curve_mut(curve).insert(Leaf::Circle(id), oriented(self.chord, self.a, curve));
            }
        }
        circles.sort_by_key(|c| c.id);
        if self.release_m {
            out.m.clear();
        }
        out.k.retain(|_, l| !l.is_empty());
        out.m.retain(|_, l| !l.is_empty());
        Ok(Node { state: FiberState { chords, circles, punctures: Default::default() }, lists: out, merged })
    }
}

/// Remove the two vertices of a K-free b-arc family. The saddles bounding
/// the family become trivial and are dropped. Other families of the same
/// b-arc close up into c-circles, so the saddles creating and destroying
/// them become bc saddles. When m meets the family, m is released.
pub fn excise(movie: &FoliationMovie, site: &Excision) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    checked(excise_unchecked(movie, site)?)
}

/// Excision of a family that an exchange has just emptied, so the input
/// may hold that one inessential b-arc.
pub(crate) fn excise_unchecked(movie: &FoliationMovie, site: &Excision) -> Result<FoliationMovie, RewriteError> {
    let sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let chord = site.chord;
    let forced: BTreeSet<usize> = site.frames.iter().copied().collect();
    let own = families(movie)
        .into_iter()
        .find(|fam| fam.chord == chord && fam.frames.iter().any(|x| forced.contains(x)))
        .ok_or_else(|| RewriteError::Precondition("not a b-arc family".into()))?;
    if own.frames.iter().copied().collect::<BTreeSet<_>>() != forced || own.start.is_none() || own.end.is_none() {
        return Err(RewriteError::Precondition("frames are not one bounded family".into()));
    }
    let leaf = Leaf::Chord(chord.0, chord.1);
    if forced.iter().any(|&fr| sim.lists[fr].count(Curve::K, leaf) > 0) {
        return Err(RewriteError::Precondition("family carries K".into()));
    }
    remove_arc(movie, chord, &forced)
}

/// Collapse a b-arc between adjacent vertices that is inessential in some
/// frames. Where it is unpunctured it disappears, elsewhere it closes up
/// into a c-circle. A bc saddle on the arc that only hands a circle over to
/// the arc, or the arc's strands over to a circle, becomes trivial.
pub fn collapse_arc(movie: &FoliationMovie, chord: Chord) -> Result<FoliationMovie, RewriteError> {
    checked(remove_arc(movie, chord, &BTreeSet::new())?)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Absent,
    Gone,
    Circle,
}

fn same_circle(a: &[u32], b: &[u32]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    if n == 0 {
        return true;
    }
    let rev: Vec<u32> = b.iter().rev().copied().collect();
    (0..n).any(|r| (0..n).all(|i| a[(i + r) % n] == b[i]) || (0..n).all(|i| a[(i + r) % n] == rev[i]))
}

fn same_lists(src: &Lists, dst: &Lists) -> bool {
    if lists_match(src, dst) {
        return true;
    }
    [Curve::K, Curve::M].into_iter().all(|c| {
        let keys: BTreeSet<Leaf> = src.curve(c).keys().chain(dst.curve(c).keys()).copied().collect();
        keys.into_iter().all(|leaf| match leaf {
            Leaf::Circle(_) => same_circle(src.get(c, leaf), dst.get(c, leaf)),
            Leaf::Chord(..) => src.get(c, leaf) == dst.get(c, leaf),
        })
    })
}

fn find(parent: &mut HashMap<u32, u32>, x: u32) -> u32 {
    let p = *parent.get(&x).unwrap_or(&x);
    if p == x {
        return x;
    }
    let r = find(parent, p);
    parent.insert(x, r);
    r
}

fn union(parent: &mut HashMap<u32, u32>, x: u32, y: u32) {
    let (rx, ry) = (find(parent, x), find(parent, y));
    if rx != ry {
        parent.insert(rx.max(ry), rx.min(ry));
    }
}

fn rename(node: &mut Node, to: &dyn Fn(u32) -> u32) {
    for c in &mut node.state.circles {
        c.id = to(c.id);
        c.parent = c.parent.map(to);
    }
    node.state.circles.sort_by_key(|c| c.id);
    for curve in [Curve::K, Curve::M] {
        let old = std::mem::take(node.lists.curve_mut(curve));
        for (leaf, l) in old {
            let leaf = match leaf {
                Leaf::Circle(id) => Leaf::Circle(to(id)),
                other => other,
            };
            node.lists.curve_mut(curve).insert(leaf, l);
        }
    }
}

/// Remove the vertices of `chord`. In the `forced` frames, and wherever it
/// is unpunctured, the arc disappears; elsewhere it becomes a circle.
pub(crate) fn remove_arc(movie: &FoliationMovie, chord: Chord, forced: &BTreeSet<usize>) -> Result<FoliationMovie, RewriteError> {
    let sim = simulate(movie).map_err(|_| RewriteError::NoRouting)?;
    let f = movie.frames.len();
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let (a, b) = adjacent(&order, chord)
        .ok_or_else(|| RewriteError::Precondition(format!("{chord:?} does not join adjacent vertices")))?;
    let leaf = Leaf::Chord(chord.0, chord.1);
    let puncts = |fr: usize| sim.lists[fr].count(Curve::K, leaf) + sim.lists[fr].count(Curve::M, leaf);
    let status: Vec<Status> = (0..f)
        .map(|fr| {
            if !movie.frames[fr].chords.contains(&chord) {
                Status::Absent
            } else if forced.contains(&fr) || puncts(fr) == 0 {
                Status::Gone
            } else {
                Status::Circle
            }
        })
        .collect();
    for fr in (0..f).filter(|&fr| status[fr] == Status::Gone && !forced.contains(&fr)) {
        let fm = FaceMap::new(&order, &movie.frames[fr].chords).ok_or(RewriteError::NoRouting)?;
        if essential(&movie.frames[fr], &fm, chord) {
            return Err(RewriteError::Precondition(format!("b-arc separates punctured leaves in frame {fr}")));
        }
    }
    if !status.contains(&Status::Gone) {
        return Err(RewriteError::Precondition("b-arc is never inessential".into()));
    }
    let release_m = (0..f).any(|fr| status[fr] == Status::Gone && sim.lists[fr].count(Curve::M, leaf) > 0);
    let n = order.len();
    let pa = order.iter().position(|&x| x == a).expect("vertex");
    let new_order: Vec<u32> = order.iter().copied().filter(|&x| x != a && x != b).collect();
    let ctx = Ctx {
        order: &order,
        npos: new_order.iter().enumerate().map(|(i, &x)| (x, i)).collect(),
        new_order,
        chord,
        a,
        prev_a: order[(pa + n - 1) % n],
        release_m,
    };
    let on_chord = |t: usize| match &movie.transitions[t].kind {
        TransitionKind::Bb(d) => d.chords.contains(&chord) || movie.frames[(t + 1) % f].chords.contains(&chord) && !movie.frames[t].chords.contains(&chord),
        TransitionKind::Bc(d) => d.chord == chord,
    };
    // One fresh circle per run of circle frames between saddles on the arc.
    let mut next_id = movie.frames.iter().flat_map(|fr| fr.circles.iter().map(|c| c.id + 1)).max().unwrap_or(0);
    let mut circle_of: HashMap<usize, u32> = HashMap::new();
    let first = (0..f).find(|&t| on_chord(t)).map(|t| (t + 1) % f).unwrap_or(0);
    for k in 0..f {
        let fr = (first + k) % f;
        if status[fr] != Status::Circle {
            continue;
        }
        let prev = (fr + f - 1) % f;
        let id = if k > 0 && status[prev] == Status::Circle && !on_chord(prev) {
            circle_of[&prev]
        } else {
            next_id += 1;
            next_id - 1
        };
        circle_of.insert(fr, id);
    }
    let mut nodes: Vec<Node> = (0..=f)
        .map(|fr| {
            let i = fr % f;
            ctx.node(&movie.frames[i], &sim.lists[fr], status[i] == Status::Gone, circle_of.get(&i).copied())
        })
        .collect::<Result<_, _>>()?;
    let mut same: HashMap<u32, u32> = HashMap::new();
    let mut templates: Vec<Option<Transition>> = Vec::with_capacity(f);
    for (t, tr) in movie.transitions.iter().enumerate() {
        let next = (t + 1) % f;
        let merged = |fr: usize| nodes[fr].merged.expect("merged b-arc");
        let map = |c: Chord| if ctx.touches(c) { merged(t) } else { c };
        let kind = match &tr.kind {
            TransitionKind::Bb(d) if d.chords.contains(&chord) => match status[t] {
                Status::Gone => None,
                _ => {
                    let other = if d.chords[0] == chord { d.chords[1] } else { d.chords[0] };
                    Some(TransitionKind::Bc(BcData {
                        chord: other,
                        circle: circle_of[&t],
                        dir: Direction::Absorb,
                        k: [0, 0],
                        m: [0, 0],
                        reversed: false,
                    }))
                }
            },
            TransitionKind::Bb(_) if status[next] != Status::Absent && status[t] == Status::Absent => match status[next] {
                Status::Gone => None,
                _ => Some(TransitionKind::Bc(BcData {
                    chord: merged(t),
                    circle: circle_of[&next],
                    dir: Direction::Emit,
                    k: [0, 0],
                    m: [0, 0],
                    reversed: false,
                })),
            },
            TransitionKind::Bb(d) => {
                let chords = [map(d.chords[0]), map(d.chords[1])];
                if chords[0] == chords[1] {
                    return Err(RewriteError::Precondition("saddle collapses onto one b-arc".into()));
                }
                Some(TransitionKind::Bb(BbData { chords, k: [0, 0], m: [0, 0] }))
            }
            TransitionKind::Bc(d) if d.chord == chord => {
                let arc = match (d.dir, status[t], status[next]) {
                    (Direction::Absorb, Status::Gone, Status::Circle) => circle_of[&next],
                    (Direction::Emit, Status::Circle, Status::Gone) => circle_of[&t],
                    _ => return Err(RewriteError::Precondition("bc saddle would join two circles".into())),
                };
                union(&mut same, arc, d.circle);
                None
            }
            TransitionKind::Bc(d) => Some(TransitionKind::Bc(BcData { chord: map(d.chord), ..*d })),
        };
        templates.push(kind.map(|kind| Transition { kind, parity: tr.parity }));
    }
    let ids: BTreeSet<u32> = nodes.iter().flat_map(|n| n.state.circles.iter().map(|c| c.id)).collect();
    let to: HashMap<u32, u32> = ids.iter().map(|&id| (id, find(&mut same, id))).collect();
    for node in &mut nodes {
        rename(node, &|id| to[&id]);
        let mut seen: Vec<u32> = node.state.circles.iter().map(|c| c.id).collect();
        seen.dedup();
        if seen.len() != node.state.circles.len() {
            return Err(RewriteError::Precondition("one circle would appear twice in a fiber".into()));
        }
    }
    for t in (0..f).filter(|&t| templates[t].is_none()) {
        let (src, dst) = (&nodes[t], &nodes[t + 1]);
        let ids = |n: &Node| n.state.circles.iter().map(|c| c.id).collect::<Vec<_>>();
        if src.state.chords != dst.state.chords || ids(src) != ids(dst) || !same_lists(&src.lists, &dst.lists) {
            return Err(RewriteError::NoRouting);
        }
    }
    for (t, tmpl) in templates.iter_mut().enumerate() {
        if let Some(Transition { kind: TransitionKind::Bc(d), .. }) = tmpl {
            d.circle = to.get(&d.circle).copied().unwrap_or(d.circle);
            let _ = t;
        }
    }
    let live: Vec<usize> = (0..f).filter(|&t| templates[t].is_some()).collect();
    let vertices: Vec<Vertex> = movie.vertices.iter().copied().filter(|x| x.id != a && x.id != b).collect();
    let mut keep = vec![0];
    keep.extend(live.iter().take(live.len().saturating_sub(1)).map(|&t| t + 1));
    let frames: Vec<FiberState> = keep.iter().map(|&i| nodes[i].state.clone()).collect();
    let mut lists: Vec<Lists> = keep.iter().map(|&i| nodes[i].lists.clone()).collect();
    lists.push(if live.is_empty() { nodes[0].lists.clone() } else { nodes[f].lists.clone() });
    let out = FoliationMovie {
        vertices,
        frames,
        transitions: live.iter().map(|&t| templates[t].expect("live")).collect(),
        n1: movie.n1,
        n3: if release_m { 0 } else { movie.n3 },
    };
    assemble(out, &lists).ok_or(RewriteError::NoRouting)
}


/// Remove b-arcs between adjacent vertices that are unpunctured in some
/// frame until none is left. Returns the number of removals.
pub(crate) fn cleanup(movie: &mut FoliationMovie) -> Result<usize, RewriteError> {
    let mut count = 0;
    'outer: loop {
        let Ok(sim) = simulate(movie) else { return Err(RewriteError::NoRouting) };
        let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
        let mut arcs: Vec<Chord> = Vec::new();
        for (fr, frame) in movie.frames.iter().enumerate() {
            for &c in &frame.chords {
                let leaf = Leaf::Chord(c.0, c.1);
                let empty = sim.lists[fr].count(Curve::K, leaf) + sim.lists[fr].count(Curve::M, leaf) == 0;
                if empty && adjacent(&order, c).is_some() && !arcs.contains(&c) {
                    arcs.push(c);
                }
            }
        }
        for c in arcs {
            if let Ok(out) = remove_arc(movie, c, &BTreeSet::new()) {
                *movie = out;
                count += 1;
                continue 'outer;
            }
        }
        return Ok(count);
    }
}

/// A movie without saddles is a torus swept out by its b-arcs. Pushing it
/// off the axis turns every arc into a c-circle and removes all vertices.
pub fn arcs_to_circles(movie: &FoliationMovie) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    if !movie.transitions.is_empty() || movie.frames.len() != 1 {
        return Err(RewriteError::Precondition("movie has saddles".into()));
    }
    let frame = &movie.frames[0];
    if !frame.circles.is_empty() {
        return Err(RewriteError::Precondition("frame already holds circles".into()));
    }
    if frame.chords.iter().any(|&(a, b)| frame.count(Leaf::Chord(a, b), Curve::K) == 0) {
        return Err(RewriteError::Precondition("an arc carries no K strand".into()));
    }
    let pos = movie.positions();
    let span = |c: Chord| (pos[&c.0], pos[&c.1]);
    let mut out = FiberState::default();
    for (id, &c) in frame.chords.iter().enumerate() {
        let (lo, hi) = span(c);
        // Innermost enclosing arc.
        let parent = frame
            .chords
            .iter()
            .enumerate()
            .filter(|&(_, &d)| {
                let (a, b) = span(d);
                a < lo && hi < b
            })
            .min_by_key(|&(_, &d)| {
                let (a, b) = span(d);
                b - a
            })
            .map(|(j, _)| j as u32);
        out.circles.push(Circle { id: id as u32, face: None, parent });
        if let Some(&counts) = frame.punctures.get(&Leaf::Chord(c.0, c.1)) {
            out.punctures.insert(Leaf::Circle(id as u32), counts);
        }
    }
    checked(FoliationMovie { vertices: vec![], frames: vec![out], transitions: vec![], n1: movie.n1, n3: movie.n3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{classify, torus35_fixture, Classification};

    #[test]
    fn torus35_outer_family_excises_to_mixed() {
        let movie = torus35_fixture();
        let sites = inessential_families(&movie);
        let site = sites
            .iter()
            .find(|s| s.chord == (0, 7) && s.frames.len() == 5)
            .expect("K-free outer family");
        let out = excise(&movie, site).expect("excision");
        assert_eq!(out.n2(), 6);
        assert_eq!(out.saddle_count(), 6);
        assert_eq!(out.n3, 0);
        assert_eq!(classify(&out), Ok(Classification::Mixed));
        assert_eq!(out.transitions.iter().filter(|t| t.is_bc()).count(), 2);
    }

    #[test]
    fn rejects_k_carrying_family() {
        let movie = torus35_fixture();
        let bad = Excision { chord: (0, 7), frames: vec![0] };
        assert!(excise(&movie, &bad).is_err());
    }

    #[test]
    fn saddle_free_arc_becomes_a_circle() {
        use crate::foliation::{circular_fixture, validate, Parity};
        let arc = FoliationMovie {
            vertices: vec![Vertex { id: 3, parity: Parity::Neg }, Vertex { id: 4, parity: Parity::Pos }],
            frames: vec![FiberState {
                chords: vec![(3, 4)],
                circles: vec![],
                punctures: std::collections::BTreeMap::from([(Leaf::Chord(3, 4), (1, 0))]),
            }],
            transitions: vec![],
            n1: 1,
            n3: 0,
        };
        assert!(validate(&arc).is_valid());
        assert_eq!(arcs_to_circles(&arc).unwrap(), circular_fixture(1));
        assert!(arcs_to_circles(&circular_fixture(1)).is_err());
        assert!(arcs_to_circles(&torus35_fixture()).is_err());
    }
}
