use crate::foliation::{
    b_support, intersection_sequence, is_standard_tiling, BoundaryState, Curve, FoliationMovie, Node,
    SupportSurface, TilingError, TopologyClass,
};

use super::RewriteError;

/// State of a vertex on the boundary of a support surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexState {
    InsideCorner,
    OutsideCorner,
    Tee,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportKind {
    I,
    II,
}

/// The vertices met along one boundary component, cyclically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryWalk {
    pub vertices: Vec<u32>,
    pub states: Vec<VertexState>,
}

impl BoundaryWalk {
    pub fn count(&self, s: VertexState) -> usize {
        self.states.iter().filter(|&&x| x == s).count()
    }
}

fn state_of(b: BoundaryState) -> VertexState {
    match b {
        BoundaryState::OutsideCorner => VertexState::OutsideCorner,
        BoundaryState::InsideCorner => VertexState::InsideCorner,
        BoundaryState::Pinch => VertexState::Tee,
        BoundaryState::Null => VertexState::Null,
    }
}

pub fn boundary_walks(support: &SupportSurface) -> Vec<BoundaryWalk> {
    support
        .boundary
        .iter()
        .map(|comp| {
            let vertices: Vec<u32> = comp
                .iter()
                .filter_map(|n| match n {
                    Node::Vertex(v) => Some(*v),
                    Node::Saddle(_) => None,
                })
                .collect();
            let states = vertices
                .iter()
                .map(|v| support.states.get(v).copied().map(state_of).unwrap_or(VertexState::Null))
                .collect();
            BoundaryWalk { vertices, states }
        })
        .collect()
}

/// State change of an exchange with type-I support at an outside corner,
/// or with type-II support at a tee, at position `at` of the walk. The
/// corner or tee moves on to its neighbours.
pub fn support_exchange(walk: &BoundaryWalk, at: usize, kind: SupportKind) -> Result<BoundaryWalk, RewriteError> {
    let n = walk.states.len();
    if at >= n || n < 2 {
        return Err(RewriteError::Precondition("position is not on a boundary walk of two or more vertices".into()));
    }
    let mut nb = vec![(at + n - 1) % n, (at + 1) % n];
    nb.dedup();
    let mut out = walk.clone();
    let incoherent = || RewriteError::Precondition("neighbour state contradicts coherence".into());
    match kind {
        SupportKind::I => {
            if walk.states[at] != VertexState::OutsideCorner {
                return Err(RewriteError::Precondition("type-I support needs an outside corner".into()));
            }
            for &i in &nb {
                out.states[i] = match walk.states[i] {
                    VertexState::Null => VertexState::OutsideCorner,
                    VertexState::InsideCorner | VertexState::Tee => VertexState::Null,
                    VertexState::OutsideCorner => return Err(incoherent()),
                };
            }
        }
        SupportKind::II => {
            if walk.states[at] != VertexState::Tee {
                return Err(RewriteError::Precondition("type-II support needs a tee vertex".into()));
            }
            let mut null_seen = false;
            for &i in &nb {
                out.states[i] = match walk.states[i] {
                    VertexState::Null if !null_seen => {
                        null_seen = true;
                        VertexState::Tee
                    }
                    VertexState::Null => VertexState::InsideCorner,
                    VertexState::OutsideCorner => VertexState::Null,
                    VertexState::InsideCorner | VertexState::Tee => return Err(incoherent()),
                };
            }
        }
    }
    out.states[at] = VertexState::Null;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub curve: Curve,
    pub class: TopologyClass,
    pub coherent: bool,
    pub walks: Vec<BoundaryWalk>,
    /// Annulus, or torus minus a disc with no corners on its boundary; for
    /// m also at most one inside and one outside corner per component.
    pub normal: bool,
}

/// Classify a curve's b-support and decide whether it is already
/// in normal form. The movie itself is not changed.
pub fn normalize_support(movie: &FoliationMovie, curve: Curve) -> Result<SupportReport, TilingError> {
    is_standard_tiling(movie)?;
    let coherent = intersection_sequence(movie, curve)?.coherent();
    let support = b_support(movie, curve)?;
    let walks = boundary_walks(&support);
    let corners = |w: &BoundaryWalk| w.count(VertexState::InsideCorner) + w.count(VertexState::OutsideCorner);
    let mut normal = coherent && match support.class {
        TopologyClass::Annulus => true,
        TopologyClass::TorusMinusDisc => walks.iter().all(|w| corners(w) == 0),
        _ => false,
    };
    if curve == Curve::M {
        normal &= walks.iter().all(|w| w.count(VertexState::InsideCorner) <= 1 && w.count(VertexState::OutsideCorner) <= 1);
    }
    Ok(SupportReport { curve, class: support.class, coherent, walks, normal })
}
