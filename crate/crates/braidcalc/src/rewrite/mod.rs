//! Guarded rewrites of foliation movies and the reduction pipelines built
//! from them.

mod cof;
mod destab;
mod exchange;
mod excise;
mod patterns;
mod pipeline;
mod support;
mod trace;
mod valence;

use thiserror::Error;

use crate::foliation::{validate, FoliationMovie};

pub use cof::{apply_variant, change_of_foliation, foliation_sites, variants, FoliationSite, Variant};
pub use destab::{destab_sites, destabilize, DestabSite};
pub use exchange::{clear_short, double_exchange, pair_destabilize, PairDestab, exchange_and_excise, pair_sites, PairSite};
pub use valence::{eliminate_valence_two, valence_two_vertices, Elimination};
pub use pipeline::{mixed_to_circular, n4, run_pipeline, run_pipeline_with, tiled_to_mixed, PipelineError, PipelineOptions, PipelineRun};
pub use patterns::{graph_pattern_moves, PatternReport, PatternSite};
pub use support::{boundary_walks, normalize_support, support_exchange, BoundaryWalk, SupportKind, SupportReport, VertexState};
pub use trace::{digest, AbstractMove, Emitted, Lambda, RewriteTrace, Secondary, TraceStep};
pub use excise::{arcs_to_circles, collapse_arc, excise, inessential_families, Excision};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("input movie is invalid: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("strand routing cannot be carried through the rewrite")]
    NoRouting,
    #[error("rewrite produced an invalid movie: {0}")]
    Produced(String),
}

pub(crate) fn checked(movie: FoliationMovie) -> Result<FoliationMovie, RewriteError> {
    let report = validate(&movie);
    if report.is_valid() {
        Ok(movie)
    } else {
        Err(RewriteError::Produced(report.to_string()))
    }
}

pub(crate) fn require_valid(movie: &FoliationMovie) -> Result<(), RewriteError> {
    let report = validate(movie);
    if report.is_valid() {
        Ok(())
    } else {
        Err(RewriteError::Invalid(report.to_string()))
    }
}
