//! Braid calculus for closed braids and the combinatorial foliation
//! machinery used to reduce iterated torus knots to minimal braid index.

pub mod braid;
pub mod corpus;
pub mod engine;
pub mod foliation;
pub mod normal;
pub mod random;
pub mod rewrite;

pub use braid::{
    cable, iterated_torus_braid, schubert_min_index, torus_braid, BraidError, BraidWord,
    CablingSchedule, ExchangeSite, MoveKind,
};
pub use engine::{
    enumerate_moves, search_reduction, search_reduction_parallel, verify_certificate,
    Certificate, ReplayError, SearchBudget, SearchError, SearchStats,
};
pub use normal::{conjugacy_key, left_normal_form, words_equal, NormalForm};
