use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{validate, FoliationMovie, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Circular,
    Mixed,
    Tiled,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Circular => "Circular",
            Classification::Mixed => "Mixed",
            Classification::Tiled => "Tiled",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("movie is invalid: {0}")]
    Invalid(String),
    #[error("expected a {expected} movie, got {got}")]
    WrongClass { expected: Classification, got: Classification },
    #[error("mixed movie without any bc saddle")]
    NoBcSaddle,
}

pub fn classify(movie: &FoliationMovie) -> Result<Classification, StatsError> {
    let report = validate(movie);
    if !report.is_valid() {
        return Err(StatsError::Invalid(report.to_string()));
    }
    classify_unchecked(movie)
}

pub(crate) fn classify_unchecked(movie: &FoliationMovie) -> Result<Classification, StatsError> {
    if !movie.has_chords() && movie.transitions.is_empty() {
        Ok(Classification::Circular)
    } else if !movie.has_circles() {
        Ok(Classification::Tiled)
    } else if movie.transitions.iter().any(|t| t.is_bc()) {
        Ok(Classification::Mixed)
    } else {
        Err(StatsError::NoBcSaddle)
    }
}

fn require(movie: &FoliationMovie, expected: Classification) -> Result<(), StatsError> {
    let got = classify(movie)?;
    if got != expected {
        return Err(StatsError::WrongClass { expected, got });
    }
    Ok(())
}

/// Both sides of a vertex-count identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquationCheck {
    pub lhs: i64,
    pub rhs: i64,
    /// Vertices of degree below four that the identity's left side omits.
    pub unlisted: i64,
}

impl EquationCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs && self.unlisted == 0
    }
}

pub fn vertex_valences(movie: &FoliationMovie) -> BTreeMap<u32, usize> {
    movie.valences()
}

/// Number of vertices of each valence.
pub fn valence_histogram(movie: &FoliationMovie) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for (_, v) in movie.valences() {
        *h.entry(v).or_default() += 1;
    }
    h
}

/// `2 V(2) + V(3) = V(5) + 2 V(6) + 3 V(7) + …` on a valence histogram.
pub fn valence_balance(hist: &BTreeMap<usize, usize>) -> EquationCheck {
    let v = |i: usize| hist.get(&i).copied().unwrap_or(0) as i64;
    let lhs = 2 * v(2) + v(3);
    let rhs = hist
        .iter()
        .filter(|(&i, _)| i >= 5)
        .map(|(&i, &n)| (i as i64 - 4) * n as i64)
        .sum();
    EquationCheck { lhs, rhs, unlisted: v(0) + v(1) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statistics {
    pub valences: BTreeMap<usize, usize>,
    pub positive_saddles: usize,
    pub negative_saddles: usize,
    pub valence_balance: EquationCheck,
}

pub fn statistics(movie: &FoliationMovie) -> Result<Statistics, StatsError> {
    require(movie, Classification::Tiled)?;
    let valences = valence_histogram(movie);
    let positive = movie.transitions.iter().filter(|t| t.parity == Parity::Pos).count();
    Ok(Statistics {
        valence_balance: valence_balance(&valences),
        valences,
        positive_saddles: positive,
        negative_saddles: movie.transitions.len() - positive,
    })
}

/// Vertex counts `V(β, ε)` of the be-tiling: β counts the b-edges at a
/// vertex (one per incident singularity) and ε the e-edges (one per
/// incident bc singularity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeStatistics {
    pub histogram: BTreeMap<(usize, usize), usize>,
    pub be_balance: EquationCheck,
    /// `V(1,1) = V(2,1) = 0`.
    pub realizable: bool,
}

pub fn be_histogram(movie: &FoliationMovie) -> BTreeMap<(usize, usize), usize> {
    let mut per: BTreeMap<u32, (usize, usize)> = movie.vertices.iter().map(|v| (v.id, (0, 0))).collect();
    for t in &movie.transitions {
        for c in t.corners() {
            let e = per.entry(c).or_default();
            e.0 += 1;
            if t.is_bc() {
                e.1 += 1;
            }
        }
    }
    let mut h = BTreeMap::new();
    for (_, k) in per {
        *h.entry(k).or_default() += 1;
    }
    h
}

/// `2 V(2,0) + 2 V(1,1) + V(2,1) + V(3,0) = Σ_{i≥5} Σ_{β≥⌊i/2⌋} (i−4) V(β, i−β)`.
pub fn be_balance(hist: &BTreeMap<(usize, usize), usize>) -> EquationCheck {
    let v = |b: usize, e: usize| hist.get(&(b, e)).copied().unwrap_or(0) as i64;
    let lhs = 2 * v(2, 0) + 2 * v(1, 1) + v(2, 1) + v(3, 0);
    let mut rhs = 0;
    let mut unlisted = 0;
    for (&(b, e), &n) in hist {
        let i = b + e;
        if i >= 5 && b >= i / 2 {
            rhs += (i as i64 - 4) * n as i64;
        } else if i >= 5 || (i < 4 && !matches!((b, e), (2, 0) | (1, 1) | (2, 1) | (3, 0))) {
            unlisted += n as i64;
        }
    }
    EquationCheck { lhs, rhs, unlisted }
}

pub fn be_statistics(movie: &FoliationMovie) -> Result<BeStatistics, StatsError> {
    require(movie, Classification::Mixed)?;
    let histogram = be_histogram(movie);
    let v = |b: usize, e: usize| histogram.get(&(b, e)).copied().unwrap_or(0);
    Ok(BeStatistics {
        be_balance: be_balance(&histogram),
        realizable: v(1, 1) == 0 && v(2, 1) == 0,
        histogram,
    })
}
