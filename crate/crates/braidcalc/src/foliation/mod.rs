//! Fiberwise movie model of the singular foliation that the disc fibration
//! around the braid axis induces on a torus containing the knot.
//!
//! Vertices are the axis intersections in cyclic order. Each frame is a
//! generic fiber: a non-crossing perfect matching of the vertices (the
//! b-arcs) plus nested circles (the c-circles), with K and m punctures per
//! leaf. Transition `t` is the saddle taking frame `t` to frame `t+1`
//! (cyclically).
//!
//! Strand routing is stored per transition. In a bb saddle the strands of a
//! chord, listed from its first endpoint, split into a prefix that follows
//! the first endpoint and a suffix that follows the second. A new chord
//! `(p,q)` lists the strands that came with `p` (outward from `p`) followed
//! by those that came with `q` (inward toward `q`). A bc absorb inserts the
//! circle's list, rotated, at a position of the chord; a bc emit cuts a
//! contiguous block out of the chord to form the circle.

mod dot;
mod faces;
mod fixtures;
mod generate;
mod json;
mod sim;
mod stats;
mod tiling;
mod validate;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use dot::export_dot;
pub use faces::FaceMap;
pub use generate::random_movie;
pub use fixtures::{circular_fixture, torus35_fixture, grid_fixture, GridError};
pub use sim::{simulate, Crossing, Lists, SimError, Simulation, StrandCrossing};
pub use stats::{
    be_histogram, be_statistics, classify, be_balance, valence_balance, statistics, valence_histogram, vertex_valences, BeStatistics,
    Classification, EquationCheck, Statistics, StatsError,
};
pub use tiling::{
    b_support, build_graphs, intersection_sequence, is_standard_tiling, BoundaryState,
    CurveSequence, Family, GraphEdge, GraphEdgeCrossing, Node, ParityGraph, SupportSurface,
    TilingError, TopologyClass,
};
pub use validate::{validate, ValidationReport, Violation, ViolationKind};
pub(crate) use validate::essential;

pub(crate) use sim::{assemble, derive, lists_match, reconnect, route};
pub(crate) use tiling::families;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Pos,
    Neg,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Pos => Parity::Neg,
            Parity::Neg => Parity::Pos,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Parity::Pos => "+",
            Parity::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: u32,
    pub parity: Parity,
}

/// A chord is stored with its endpoints in axis order.
pub type Chord = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leaf {
    Chord(u32, u32),
    Circle(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve {
    K,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Circle {
    pub id: u32,
    /// Face of the chord arrangement holding the circle, named by the
    /// smallest vertex id whose following gap lies in it. `None` when the
    /// frame has no chords.
    pub face: Option<u32>,
    pub parent: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiberState {
    pub chords: Vec<Chord>,
    pub circles: Vec<Circle>,
    /// `(k_count, m_count)` per leaf; missing leaves count as zero.
    pub punctures: BTreeMap<Leaf, (u32, u32)>,
}

impl FiberState {
    pub fn count(&self, leaf: Leaf, curve: Curve) -> u32 {
        let (k, m) = self.punctures.get(&leaf).copied().unwrap_or((0, 0));
        match curve {
            Curve::K => k,
            Curve::M => m,
        }
    }

    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out: Vec<Leaf> = self.chords.iter().map(|&(a, b)| Leaf::Chord(a, b)).collect();
        out.extend(self.circles.iter().map(|c| Leaf::Circle(c.id)));
        out
    }

    pub fn circle(&self, id: u32) -> Option<&Circle> {
        self.circles.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Absorb,
    Emit,
}

/// Split of one curve's strands at a bb saddle: for each participating
/// chord, how many strands (from its first endpoint) follow that endpoint.
pub type Split = [u32; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BbData {
    pub chords: [Chord; 2],
    pub k: Split,
    pub m: Split,
}

/// Routing of one curve at a bc saddle. For an absorb `(at, rotation)`: the
/// circle's list rotated left by `rotation` is inserted at position `at`.
/// For an emit `(at, count)`: positions `at..at+count` become the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BcData {
    pub chord: Chord,
    pub circle: u32,
    pub dir: Direction,
    pub k: [u32; 2],
    pub m: [u32; 2],
    /// Absorb only: insert the circle's list in reverse order.
    pub reversed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Bb(BbData),
    Bc(BcData),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub kind: TransitionKind,
    pub parity: Parity,
}

impl Transition {
    /// Vertices that are corners of this saddle's tile.
    pub fn corners(&self) -> Vec<u32> {
        match &self.kind {
            TransitionKind::Bb(d) => {
                vec![d.chords[0].0, d.chords[0].1, d.chords[1].0, d.chords[1].1]
            }
            TransitionKind::Bc(d) => vec![d.chord.0, d.chord.1],
        }
    }

    pub fn is_bc(&self) -> bool {
        matches!(self.kind, TransitionKind::Bc(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoliationMovie {
    pub vertices: Vec<Vertex>,
    pub frames: Vec<FiberState>,
    pub transitions: Vec<Transition>,
    pub n1: u32,
    pub n3: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MovieError {
    #[error("malformed movie JSON: {0}")]
    Json(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(u32),
}

impl FoliationMovie {
    /// Position of each vertex id along the axis.
    pub fn positions(&self) -> HashMap<u32, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect()
    }

    pub fn parity_of(&self, id: u32) -> Option<Parity> {
        self.vertices.iter().find(|v| v.id == id).map(|v| v.parity)
    }

    pub fn n2(&self) -> usize {
        self.vertices.len()
    }

    pub fn saddle_count(&self) -> usize {
        self.transitions.len()
    }

    /// Index of the frame after transition `t`.
    pub fn next_frame(&self, t: usize) -> usize {
        (t + 1) % self.frames.len()
    }

    /// Valence of each vertex: the number of saddles whose tile has it as a
    /// corner.
    pub fn valences(&self) -> BTreeMap<u32, usize> {
        let mut out: BTreeMap<u32, usize> = self.vertices.iter().map(|v| (v.id, 0)).collect();
        for t in &self.transitions {
            for c in t.corners() {
                *out.entry(c).or_default() += 1;
            }
        }
        out
    }

    /// Saddles at `v` in θ order.
    pub fn saddles_at(&self, v: u32) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.transitions[t].corners().contains(&v))
            .collect()
    }

    pub fn total_valence(&self) -> usize {
        self.valences().values().sum()
    }

    /// The chord at `v` in frame `f`.
    pub fn chord_at(&self, f: usize, v: u32) -> Option<Chord> {
        self.frames[f]
            .chords
            .iter()
            .copied()
            .find(|&(a, b)| a == v || b == v)
    }

    pub fn has_chords(&self) -> bool {
        self.frames.iter().any(|f| !f.chords.is_empty())
    }

    pub fn has_circles(&self) -> bool {
        self.frames.iter().any(|f| !f.circles.is_empty())
    }

    pub fn from_json(text: &str) -> Result<FoliationMovie, MovieError> {
        json::from_json(text)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json::to_value(self)
    }

    /// Order the chord endpoints by axis position and sort the chord list.
    pub fn canonicalize(&mut self) {
        let pos = self.positions();
        for f in &mut self.frames {
            canonicalize_frame(f, &pos);
        }
    }
}

pub(crate) fn canonical_chord(pos: &HashMap<u32, usize>, a: u32, b: u32) -> Chord {
    match (pos.get(&a), pos.get(&b)) {
        (Some(pa), Some(pb)) if pb < pa => (b, a),
        _ => (a, b),
    }
}

pub(crate) fn canonicalize_frame(f: &mut FiberState, pos: &HashMap<u32, usize>) {
    let mut remapped = BTreeMap::new();
    for (leaf, counts) in std::mem::take(&mut f.punctures) {
        let leaf = match leaf {
            Leaf::Chord(a, b) => {
                let (a, b) = canonical_chord(pos, a, b);
                Leaf::Chord(a, b)
            }
            other => other,
        };
        if counts != (0, 0) {
            remapped.insert(leaf, counts);
        }
    }
    f.punctures = remapped;
    for c in &mut f.chords {
        *c = canonical_chord(pos, c.0, c.1);
    }
    f.chords
        .sort_by_key(|&(a, _)| pos.get(&a).copied().unwrap_or(usize::MAX));
    f.circles.sort_by_key(|c| c.id);
}
