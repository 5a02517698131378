use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::sim::{reconnect, simulate, Crossing};
use super::stats::{classify_unchecked, Classification};
use super::{Chord, Curve, FoliationMovie, Leaf, Parity, TransitionKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("movie is not tiled")]
    NotTiled,
    #[error("vertex {0} has valence {1}, expected 4")]
    Valence(u32, usize),
    #[error("saddle parities do not alternate around vertex {0}")]
    Alternation(u32),
    #[error("{0} vertices but {1} saddles")]
    Euler(usize, usize),
    #[error("strand routing failed: {0}")]
    Routing(String),
    #[error("vertex {0} meets no saddle")]
    Isolated(u32),
}

/// Maximal run of frames in which a chord persists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub chord: Chord,
    /// Frame indices in θ order, starting right after `start`.
    pub frames: Vec<usize>,
    /// The bb saddle creating the chord; `None` when it persists all turn.
    pub start: Option<usize>,
    pub end: Option<usize>,
}

fn bb_makes(movie: &FoliationMovie, t: usize, c: Chord) -> bool {
    !movie.frames[t].chords.contains(&c) && movie.frames[movie.next_frame(t)].chords.contains(&c)
}

pub(crate) fn families(movie: &FoliationMovie) -> Vec<Family> {
    let f = movie.frames.len();
    let mut out = Vec::new();
    let mut seen: HashSet<(Chord, usize)> = HashSet::new();
    for fr in 0..f {
        for &c in &movie.frames[fr].chords {
            if seen.contains(&(c, fr)) {
                continue;
            }
            // Walk back to the creating saddle.
            let mut first = fr;
            let mut start = None;
            for _ in 0..f {
                let prev = (first + f - 1) % f;
                if movie.transitions.is_empty() || bb_makes(movie, prev, c) {
                    start = (!movie.transitions.is_empty()).then_some(prev);
                    break;
                }
                first = prev;
            }
            let mut frames = vec![];
            let mut cur = first;
            let mut end = None;
            loop {
                frames.push(cur);
                seen.insert((c, cur));
                if movie.transitions.is_empty() {
                    break;
                }
                let nxt = (cur + 1) % f;
                if !movie.frames[nxt].chords.contains(&c) {
                    end = Some(cur);
                    break;
                }
                if nxt == first {
                    break;
                }
                cur = nxt;
            }
            if start.is_none() {
                end = None;
            }
            out.push(Family { chord: c, frames, start, end });
        }
    }
    out
}

pub fn is_standard_tiling(movie: &FoliationMovie) -> Result<(), TilingError> {
    if classify_unchecked(movie) != Ok(Classification::Tiled) {
        return Err(TilingError::NotTiled);
    }
    if movie.n2() != movie.saddle_count() {
        return Err(TilingError::Euler(movie.n2(), movie.saddle_count()));
    }
    for v in &movie.vertices {
        let at = movie.saddles_at(v.id);
        if at.len() != 4 {
            return Err(TilingError::Valence(v.id, at.len()));
        }
        let par: Vec<Parity> = at.iter().map(|&t| movie.transitions[t].parity).collect();
        if (0..4).any(|i| par[i] == par[(i + 1) % 4]) {
            return Err(TilingError::Alternation(v.id));
        }
    }
    Ok(())
}

/// Edge of `G_{δ,ε}` through a saddle, joining its two δ-parity corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdge {
    pub saddle: usize,
    pub from: u32,
    pub to: u32,
}

/// The graph whose vertices have parity δ and whose edges run through the
/// saddles of parity ε. Cycles are oriented by the walk that found them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGraph {
    pub vertex_parity: Parity,
    pub saddle_parity: Parity,
    pub cycles: Vec<Vec<GraphEdge>>,
}

impl ParityGraph {
    fn edge_of(&self, saddle: usize) -> Option<(usize, GraphEdge)> {
        self.cycles
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.iter().find(|e| e.saddle == saddle).map(|e| (i, *e)))
    }
}

pub fn build_graphs(movie: &FoliationMovie) -> Result<Vec<ParityGraph>, TilingError> {
    is_standard_tiling(movie)?;
    let parity: HashMap<u32, Parity> = movie.vertices.iter().map(|v| (v.id, v.parity)).collect();
    let mut out = Vec::new();
    for delta in [Parity::Pos, Parity::Neg] {
        for eps in [Parity::Pos, Parity::Neg] {
            let mut adj: HashMap<u32, Vec<(usize, u32)>> = HashMap::new();
            for (t, tr) in movie.transitions.iter().enumerate() {
                if tr.parity != eps {
                    continue;
                }
                let ends: Vec<u32> = tr.corners().into_iter().filter(|c| parity[c] == delta).collect();
                adj.entry(ends[0]).or_default().push((t, ends[1]));
                adj.entry(ends[1]).or_default().push((t, ends[0]));
            }
            let mut used = HashSet::new();
            let mut cycles = Vec::new();
            let mut starts: Vec<u32> = adj.keys().copied().collect();
            starts.sort_unstable();
            for s in starts {
                let Some(&(t0, _)) = adj[&s].iter().find(|(t, _)| !used.contains(t)) else { continue };
                let mut cyc = Vec::new();
                let (mut at, mut t) = (s, t0);
                while used.insert(t) {
                    let to = adj[&at].iter().find(|e| e.0 == t).unwrap().1;
                    cyc.push(GraphEdge { saddle: t, from: at, to });
                    at = to;
                    match adj[&at].iter().find(|e| !used.contains(&e.0)) {
                        Some(&(nt, _)) => t = nt,
                        None => break,
                    }
                }
                cycles.push(cyc);
            }
            out.push(ParityGraph { vertex_parity: delta, saddle_parity: eps, cycles });
        }
    }
    Ok(out)
}

/// Side change of a strand crossing prong `x` of saddle `t`: +1 when it
/// passes from the right of the oriented edge to its left. Around a saddle
/// the prongs run in axis order, reversed for a negative saddle.
fn crossing_sign(
    movie: &FoliationMovie,
    pos: &HashMap<u32, usize>,
    t: usize,
    x: u32,
    edge: GraphEdge,
) -> i8 {
    let TransitionKind::Bb(d) = movie.transitions[t].kind else { return 0 };
    let after = reconnect(pos, d.chords[0], d.chords[1]).expect("valid saddle");
    let partner = |cs: &[Chord], v: u32| {
        cs.iter().find_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
    };
    let y_after = partner(&after, x).expect("corner");
    let mut ring = movie.transitions[t].corners();
    ring.sort_by_key(|c| pos[c]);
    let next = |v: u32| ring[(ring.iter().position(|&c| c == v).unwrap() + 1) % 4];
    let left = next(edge.to);
    let s = if y_after == left { 1 } else { -1 };
    match movie.transitions[t].parity {
        Parity::Pos => s,
        Parity::Neg => -s,
    }
}

/// One crossing of a curve strand with a graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphEdgeCrossing {
    pub label: u32,
    pub saddle: usize,
    pub vertex: u32,
    /// Index into the list returned by [`build_graphs`].
    pub graph: usize,
    pub cycle: usize,
    pub sign: i8,
}

/// Signed crossings of a curve with the graph cycles, in θ order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSequence {
    pub curve: Curve,
    pub crossings: Vec<GraphEdgeCrossing>,
    /// Indices of crossings whose sign disagrees with the majority on
    /// their cycle.
    pub flagged: Vec<usize>,
}

impl CurveSequence {
    pub fn coherent(&self) -> bool {
        self.flagged.is_empty()
    }
}

pub fn intersection_sequence(movie: &FoliationMovie, curve: Curve) -> Result<CurveSequence, TilingError> {
    let graphs = build_graphs(movie)?;
    let sim = simulate(movie).map_err(|e| TilingError::Routing(e.to_string()))?;
    let parity: HashMap<u32, Parity> = movie.vertices.iter().map(|v| (v.id, v.parity)).collect();
    let pos = movie.positions();
    let mut crossings = Vec::new();
    for (t, list) in sim.crossings.iter().enumerate() {
        for sc in list.iter().filter(|c| c.curve == curve) {
            let Crossing::Prong(v) = sc.crossing else { continue };
            let gi = graphs
                .iter()
                .position(|g| g.vertex_parity == parity[&v] && g.saddle_parity == movie.transitions[t].parity)
                .expect("four graphs");
            let (cycle, edge) = graphs[gi].edge_of(t).expect("saddle lies on its graph");
            let sign = crossing_sign(movie, &pos, t, v, edge);
            crossings.push(GraphEdgeCrossing { label: sc.label, saddle: t, vertex: v, graph: gi, cycle, sign });
        }
    }
    let mut tally: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for c in &crossings {
        let e = tally.entry((c.graph, c.cycle)).or_default();
        if c.sign > 0 {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let flagged = crossings
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let (p, n) = tally[&(c.graph, c.cycle)];
            p > 0 && n > 0 && if p >= n { c.sign < 0 } else { c.sign > 0 }
        })
        .map(|(i, _)| i)
        .collect();
    Ok(CurveSequence { curve, crossings, flagged })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyClass {
    TorusMinusDisc,
    TorusMinusDiscs,
    Annulus,
    AnnulusMinusDiscs,
    Other,
}

/// How the boundary of a support surface passes a valence-four vertex,
/// by the number of surface sectors around it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryState {
    /// One sector inside.
    OutsideCorner,
    /// Three sectors inside.
    InsideCorner,
    /// Two adjacent sectors: the boundary runs straight through.
    Null,
    /// Two opposite sectors.
    Pinch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Vertex(u32),
    Saddle(usize),
}

/// Union of the b-arc families a curve punctures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSurface {
    pub curve: Curve,
    pub families: Vec<Family>,
    pub euler: i64,
    pub genus: i64,
    pub boundary: Vec<Vec<Node>>,
    pub class: TopologyClass,
    pub states: BTreeMap<u32, BoundaryState>,
}

impl SupportSurface {
    /// Saddles on a boundary component.
    pub fn boundary_saddles(&self, i: usize) -> usize {
        self.boundary[i].iter().filter(|n| matches!(n, Node::Saddle(_))).count()
    }
}

type Edge = (usize, u32);

pub fn b_support(movie: &FoliationMovie, curve: Curve) -> Result<SupportSurface, TilingError> {
    if classify_unchecked(movie) != Ok(Classification::Tiled) {
        return Err(TilingError::NotTiled);
    }
    for v in &movie.vertices {
        if movie.saddles_at(v.id).is_empty() {
            return Err(TilingError::Isolated(v.id));
        }
    }
    let fams = families(movie);
    let fam_of: HashMap<(Chord, usize), usize> = fams
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.frames.iter().map(move |&fr| ((f.chord, fr), i)))
        .collect();
    let selected: Vec<bool> = fams
        .iter()
        .map(|f| {
            f.frames
                .iter()
                .any(|&fr| movie.frames[fr].count(Leaf::Chord(f.chord.0, f.chord.1), curve) > 0)
        })
        .collect();
    let pos = movie.positions();
    let fcount = movie.frames.len();
    // Rotation at each node: (edge, face) pairs, the face following the edge.
    let mut rotation: BTreeMap<Node, Vec<(Edge, usize)>> = BTreeMap::new();
    for v in &movie.vertices {
        let at = movie.saddles_at(v.id);
        let rot = at
            .iter()
            .map(|&t| {
                let fr = movie.next_frame(t);
                let c = movie.chord_at(fr, v.id).expect("perfect matching");
                ((t, v.id), fam_of[&(c, fr)])
            })
            .collect();
        rotation.insert(Node::Vertex(v.id), rot);
    }
    for (t, tr) in movie.transitions.iter().enumerate() {
        let mut cs = tr.corners();
        cs.sort_by_key(|c| pos[c]);
        let before = &movie.frames[t];
        let after = &movie.frames[(t + 1) % fcount];
        let rot = (0..4)
            .map(|i| {
                let (a, b) = (cs[i], cs[(i + 1) % 4]);
                let c = if pos[&a] < pos[&b] { (a, b) } else { (b, a) };
                let fam = if before.chords.contains(&c) {
                    fam_of[&(c, t)]
                } else {
                    fam_of[&(c, (t + 1) % fcount)]
                };
                let _ = after;
                ((t, a), fam)
            })
            .collect();
        rotation.insert(Node::Saddle(t), rot);
    }
    // Faces on the two sides of every edge, read at its saddle end.
    let mut sides: HashMap<Edge, [usize; 2]> = HashMap::new();
    for (node, rot) in &rotation {
        if let Node::Saddle(_) = node {
            for i in 0..rot.len() {
                let prev = rot[(i + rot.len() - 1) % rot.len()].1;
                sides.insert(rot[i].0, [prev, rot[i].1]);
            }
        }
    }
    let inside = |e: &Edge| sides[e].iter().filter(|&&f| selected[f]).count();
    // Fans: maximal cyclic runs of selected faces at a node. Each open fan
    // is identified by (node, index of its first face).
    let mut fans = 0i64;
    let mut fan_of_edge: HashMap<(Node, Edge), (Node, usize)> = HashMap::new();
    let mut states = BTreeMap::new();
    for (&node, rot) in &rotation {
        let d = rot.len();
        let sel: Vec<bool> = rot.iter().map(|(_, f)| selected[*f]).collect();
        if sel.iter().all(|&s| s) {
            fans += 1;
            continue;
        }
        for i in 0..d {
            if sel[i] && !sel[(i + d - 1) % d] {
                fans += 1;
                let mut j = i;
                while sel[(j + 1) % d] {
                    j = (j + 1) % d;
                }
                fan_of_edge.insert((node, rot[i].0), (node, i));
                fan_of_edge.insert((node, rot[(j + 1) % d].0), (node, i));
            }
        }
        if let Node::Vertex(v) = node {
            let n = sel.iter().filter(|&&s| s).count();
            if d == 4 && (1..=3).contains(&n) {
                let st = match n {
                    1 => BoundaryState::OutsideCorner,
                    3 => BoundaryState::InsideCorner,
                    _ if sel[0] == sel[2] => BoundaryState::Pinch,
                    _ => BoundaryState::Null,
                };
                states.insert(v, st);
            }
        }
    }
    let mut edges_in = 0i64;
    let mut boundary_edges = Vec::new();
    for e in sides.keys() {
        match inside(e) {
            0 => {}
            1 => {
                edges_in += 1;
                boundary_edges.push(*e);
            }
            _ => edges_in += 1,
        }
    }
    boundary_edges.sort_unstable();
    let faces_in = selected.iter().filter(|&&s| s).count() as i64;
    let euler = fans - edges_in + faces_in;
    // Boundary cycles: fans joined by boundary edges.
    let mut adj: HashMap<(Node, usize), Vec<(Node, usize)>> = HashMap::new();
    for e in &boundary_edges {
        let a = fan_of_edge[&(Node::Saddle(e.0), *e)];
        let b = fan_of_edge[&(Node::Vertex(e.1), *e)];
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = HashSet::new();
    let mut boundary = Vec::new();
    let mut keys: Vec<(Node, usize)> = adj.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        if !seen.insert(k) {
            continue;
        }
        let mut comp = vec![k.0];
        let mut stack = vec![k];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    comp.push(y.0);
                    stack.push(y);
                }
            }
        }
        boundary.push(comp);
    }
    let b = boundary.len() as i64;
    let genus = (2 - b - euler).div_euclid(2);
    let class = match (genus, b) {
        (1, 1) => TopologyClass::TorusMinusDisc,
        (1, _) => TopologyClass::TorusMinusDiscs,
        (0, 2) => TopologyClass::Annulus,
        (0, b) if b >= 3 => TopologyClass::AnnulusMinusDiscs,
        _ => TopologyClass::Other,
    };
    let families = fams.into_iter().zip(&selected).filter(|(_, &s)| s).map(|(f, _)| f).collect();
    Ok(SupportSurface { curve, families, euler, genus, boundary, class, states })
}
