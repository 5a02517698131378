use std::collections::HashMap;

use crate::foliation::{
    build_graphs, intersection_sequence, simulate, Curve, FoliationMovie, Parity, TilingError,
};

/// A run of consecutive graph crossings along one component of a curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSite {
    pub component: usize,
    /// Position of the first crossing in the component's cyclic sequence.
    pub start: usize,
    pub saddles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternReport {
    pub coherent: bool,
    /// `G(δ,ε) → G(−δ,−ε) → G(δ,−ε) → G(−δ,−ε) → G(δ,ε)`: a destabilization.
    pub destabilizations: Vec<PatternSite>,
    /// `G(δ,ε) → G(−δ,−ε) → G(δ,−ε) → G(−δ,ε)`: an exchange.
    pub exchanges: Vec<PatternSite>,
}

type Kind = (Parity, Parity);

fn neg((d, e): Kind) -> Kind {
    (d.flip(), e.flip())
}

fn matches(seq: &[Kind], at: usize, want: &[Kind]) -> bool {
    let n = seq.len();
    n >= want.len() && want.iter().enumerate().all(|(i, w)| seq[(at + i) % n] == *w)
}

/// Scan the curve's graph crossings, component by component in knot order,
/// for the destabilization and exchange patterns.
pub fn graph_pattern_moves(movie: &FoliationMovie, curve: Curve) -> Result<PatternReport, TilingError> {
    let graphs = build_graphs(movie)?;
    let seq = intersection_sequence(movie, curve)?;
    let sim = simulate(movie).map_err(|e| TilingError::Routing(e.to_string()))?;
    let mut by_label: HashMap<u32, Vec<(Kind, usize)>> = HashMap::new();
    for c in &seq.crossings {
        let g = &graphs[c.graph];
        by_label.entry(c.label).or_default().push(((g.vertex_parity, g.saddle_parity), c.saddle));
    }
    let mut report = PatternReport { coherent: seq.coherent(), ..Default::default() };
    for (ci, comp) in sim.components(curve).iter().enumerate() {
        let walk: Vec<(Kind, usize)> = comp.iter().flat_map(|l| by_label.get(l).cloned().unwrap_or_default()).collect();
        let kinds: Vec<Kind> = walk.iter().map(|w| w.0).collect();
        let n = kinds.len();
        for at in 0..n {
            let g = kinds[at];
            let (d, e) = g;
            let site = |len: usize| PatternSite {
                component: ci,
                start: at,
                saddles: (0..len).map(|i| walk[(at + i) % n].1).collect(),
            };
            if matches(&kinds, at, &[g, neg(g), (d, e.flip()), neg(g), g]) {
                report.destabilizations.push(site(5));
            }
            if matches(&kinds, at, &[g, neg(g), (d, e.flip()), (d.flip(), e)]) {
                report.exchanges.push(site(4));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{torus35_fixture, grid_fixture};
    use Parity::{Neg, Pos};

    #[test]
    fn matches_wraps_cyclically() {
        let g = (Pos, Neg);
        let seq = [(Pos, Pos), (Neg, Pos), g, neg(g)];
        assert!(matches(&seq, 2, &[g, neg(g), (Pos, Pos), (Neg, Pos)]));
        assert!(!matches(&seq, 1, &[g]));
        assert!(!matches(&seq[..2], 0, &[g, g, g]));
    }

    #[test]
    fn coherent_fixtures_have_no_patterns() {
        for m in [torus35_fixture(), grid_fixture(6).unwrap()] {
            let r = graph_pattern_moves(&m, Curve::K).unwrap();
            assert!(r.coherent);
            assert!(r.destabilizations.is_empty() && r.exchanges.is_empty());
        }
    }
}
