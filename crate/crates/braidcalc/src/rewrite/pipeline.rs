use serde_json::json;
use thiserror::Error;

use super::trace::{AbstractMove, Emitted, Lambda, RewriteTrace, Secondary, TraceStep};
use super::{
    arcs_to_circles, change_of_foliation, collapse_arc, destab_sites, destabilize, eliminate_valence_two, excise, foliation_sites,
    inessential_families, pair_destabilize, pair_sites, valence_two_vertices, RewriteError,
};
use crate::foliation::{
    b_support, be_histogram, classify, export_dot, intersection_sequence, is_standard_tiling, validate, Classification,
    Curve, FoliationMovie,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("input movie is invalid: {0}")]
    Invalid(String),
    #[error("expected a {expected:?} foliation, found {found}")]
    WrongClass { expected: Classification, found: String },
    #[error("{stage}: no rule applies ({reason})")]
    Exhausted { stage: &'static str, reason: String },
    #[error("step bound {0} reached")]
    StepBound(usize),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PipelineOptions {
    /// Record a DOT snapshot of the input and after every step.
    pub snapshots: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub movie: FoliationMovie,
    pub trace: RewriteTrace,
    pub snapshots: Vec<String>,
}

/// Saddles on the first boundary component of the m-support, plus one.
pub fn n4(movie: &FoliationMovie) -> Option<u32> {
    if movie.n3 == 0 {
        return None;
    }
    let s = b_support(movie, Curve::M).ok()?;
    (!s.boundary.is_empty()).then(|| s.boundary_saddles(0) as u32 + 1)
}

/// Sum of squared vertex valences. A change of foliation moves one unit of
/// valence off each region vertex onto two others.
fn square_valence(movie: &FoliationMovie) -> i64 {
    movie.valences().values().map(|&v| (v * v) as i64).sum()
}

struct Run {
    movie: FoliationMovie,
    trace: RewriteTrace,
    snapshots: Vec<String>,
    options: PipelineOptions,
    bound: usize,
}

fn moves(list: &[(AbstractMove, u32)]) -> Vec<Emitted> {
    list.iter().filter(|(_, n)| *n > 0).map(|&(kind, count)| Emitted { kind, count }).collect()
}

impl Run {
    fn new(movie: FoliationMovie, options: PipelineOptions) -> Run {
        let l = Lambda::of(&movie);
        // Every checkpoint lowers Λ and every other step lowers a bounded
        // secondary quantity, so this bound is never reached on valid input.
        let bound = 4 * (l.n1 + l.n2 + l.n3 + l.n4 + l.total_valence) as usize + 8;
        let snapshots = if options.snapshots { vec![export_dot(&movie)] } else { vec![] };
        Run { trace: RewriteTrace::new(&movie), movie, snapshots, options, bound }
    }

    fn class(&self) -> Classification {
        classify(&self.movie).expect("pipeline movies stay valid")
    }

    fn push(
        &mut self,
        rule: &str,
        params: serde_json::Value,
        out: FoliationMovie,
        emitted: &[(AbstractMove, u32)],
        secondary: Option<Secondary>,
    ) -> Result<(), PipelineError> {
        if self.trace.steps.len() >= self.bound {
            return Err(PipelineError::StepBound(self.bound));
        }
        let before = Lambda::of(&self.movie);
        let after = Lambda::of(&out);
        self.trace.steps.push(TraceStep {
            rule: rule.into(),
            params,
            before,
            after,
            moves: moves(emitted),
            checkpoint: secondary.is_none(),
            secondary,
        });
        self.movie = out;
        self.trace.last = super::trace::digest(&self.movie);
        if self.options.snapshots {
            self.snapshots.push(export_dot(&self.movie));
        }
        Ok(())
    }

    /// Destabilization discs, lowest site first.
    fn try_destab(&mut self) -> Result<bool, PipelineError> {
        for site in destab_sites(&self.movie) {
            if let Ok(out) = destabilize(&self.movie, site) {
                let cleaned = (self.movie.n2() - out.n2()) as u32 / 2;
                let params = json!({"saddle": site.saddle, "vertex": site.vertex});
                self.push("destabilization_disc", params, out, &[(AbstractMove::Destabilize, 1), (AbstractMove::Isotopy, cleaned)], None)?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Reroute a saddle pair through its long arc, destabilize the strands
    /// that close up and excise the emptied arcs.
    fn try_pair(&mut self, rule: &str) -> Result<bool, PipelineError> {
        for site in pair_sites(&self.movie) {
            if let Ok(r) = pair_destabilize(&self.movie, &site) {
                let params = json!({"saddle": site.saddle, "short": [site.short.0, site.short.1], "long": [site.long.0, site.long.1]});
                let emitted = [
                    (AbstractMove::Exchange, 1),
                    (AbstractMove::Destabilize, r.destabilizations),
                    (AbstractMove::Isotopy, r.excisions as u32),
                ];
                self.push(rule, params, r.movie, &emitted, None)?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn try_valence_two(&mut self) -> Result<bool, PipelineError> {
        for v in valence_two_vertices(&self.movie) {
            if let Ok(e) = eliminate_valence_two(&self.movie, v) {
                let params = json!({"vertex": v, "partner": e.partner});
                let emitted = [(AbstractMove::Exchange, e.exchanges), (AbstractMove::Destabilize, e.destabilizations)];
                self.push("eliminate_valence_two", params, e.movie, &emitted, None)?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn try_change_of_foliation(&mut self) -> Result<bool, PipelineError> {
        for site in foliation_sites(&self.movie) {
            if let Ok(out) = change_of_foliation(&self.movie, &site) {
                let (before, after) = (square_valence(&self.movie), square_valence(&out));
                if after >= before {
                    continue;
                }
                let secondary = Secondary { name: "sum of squared valences".into(), before, after };
                let params = json!({"saddle": site.saddle, "region": [site.region.0, site.region.1]});
                self.push("change_of_foliation", params, out, &[(AbstractMove::Isotopy, 1)], Some(secondary))?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn try_collapse(&mut self) -> Result<bool, PipelineError> {
        let chords: Vec<_> = self.movie.frames.iter().flat_map(|f| f.chords.iter().copied()).collect();
        let mut seen = Vec::new();
        for c in chords {
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            if let Ok(out) = collapse_arc(&self.movie, c) {
                self.push("remove_inessential_arc", json!({"chord": [c.0, c.1]}), out, &[(AbstractMove::Isotopy, 1)], None)?;
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn try_arcs_to_circles(&mut self) -> Result<bool, PipelineError> {
        if !self.movie.transitions.is_empty() {
            return Ok(false);
        }
        let arcs = self.movie.frames[0].chords.len() as u32;
        let out = arcs_to_circles(&self.movie)?;
        self.push("saddle_free_arcs_to_circles", json!({"arcs": arcs}), out, &[(AbstractMove::Isotopy, arcs)], None)?;
        Ok(true)
    }

    /// Standardization and coherence. Identity on coherent standard tilings.
    fn prepare(&mut self) -> Result<(), PipelineError> {
        // Standardize as far as the guarded rules allow; what is left goes
        // to the reducing rules directly.
        while is_standard_tiling(&self.movie).is_err() && self.class() == Classification::Tiled {
            if !(self.try_valence_two()? || self.try_change_of_foliation()?) {
                break;
            }
        }
        if self.class() != Classification::Tiled || is_standard_tiling(&self.movie).is_err() {
            return Ok(());
        }
        let curves: &[Curve] = if self.movie.n3 > 0 { &[Curve::K, Curve::M] } else { &[Curve::K] };
        for &curve in curves {
            let seq = intersection_sequence(&self.movie, curve).map_err(|e| PipelineError::Exhausted { stage: "coherence", reason: e.to_string() })?;
            if !seq.coherent() {
                self.try_destab()?;
            }
            if self.class() != Classification::Tiled {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn require(movie: &FoliationMovie, expected: Classification) -> Result<(), PipelineError> {
    let report = validate(movie);
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report.to_string()));
    }
    match classify(movie) {
        Ok(c) if c == expected => Ok(()),
        Ok(c) => Err(PipelineError::WrongClass { expected, found: format!("{c:?}") }),
        Err(e) => Err(PipelineError::WrongClass { expected, found: e.to_string() }),
    }
}

fn tiled_stage(run: &mut Run) -> Result<(), PipelineError> {
    while run.class() == Classification::Tiled {
        run.prepare()?;
        if run.class() != Classification::Tiled {
            break;
        }
        if n4(&run.movie) == Some(3) {
            if let Some(site) = inessential_families(&run.movie).into_iter().next() {
                let out = excise(&run.movie, &site)?;
                let params = json!({"chord": [site.chord.0, site.chord.1], "frames": site.frames, "n4": 3});
                run.push("type_k_torus_inessential_arc", params, out, &[(AbstractMove::Isotopy, 1)], None)?;
                continue;
            }
        }
        if run.try_arcs_to_circles()? || run.try_pair("pair_reduction")? || run.try_valence_two()? || run.try_destab()? {
            continue;
        }
        return Err(PipelineError::Exhausted { stage: "tiled_to_mixed", reason: "no reducing site".into() });
    }
    Ok(())
}

fn mixed_stage(run: &mut Run) -> Result<(), PipelineError> {
    while run.class() == Classification::Mixed {
        let h = be_histogram(&run.movie);
        let v = |b: usize, e: usize| h.get(&(b, e)).copied().unwrap_or(0);
        if v(3, 0) > 0 && run.try_change_of_foliation()? {
            continue;
        }
        if v(2, 0) > 0 && run.try_valence_two()? {
            continue;
        }
        if run.try_destab()? || run.try_collapse()? || run.try_pair("pair_reduction")? {
            continue;
        }
        return Err(PipelineError::Exhausted { stage: "mixed_to_circular", reason: format!("be-histogram {h:?}") });
    }
    Ok(())
}

pub fn tiled_to_mixed(movie: &FoliationMovie) -> Result<(FoliationMovie, RewriteTrace), PipelineError> {
    require(movie, Classification::Tiled)?;
    let mut run = Run::new(movie.clone(), PipelineOptions::default());
    tiled_stage(&mut run)?;
    Ok((run.movie, run.trace))
}

pub fn mixed_to_circular(movie: &FoliationMovie) -> Result<(FoliationMovie, RewriteTrace), PipelineError> {
    require(movie, Classification::Mixed)?;
    let mut run = Run::new(movie.clone(), PipelineOptions::default());
    mixed_stage(&mut run)?;
    Ok((run.movie, run.trace))
}

pub fn run_pipeline(movie: &FoliationMovie) -> Result<(FoliationMovie, RewriteTrace), PipelineError> {
    let r = run_pipeline_with(movie, PipelineOptions::default())?;
    Ok((r.movie, r.trace))
}

pub fn run_pipeline_with(movie: &FoliationMovie, options: PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let report = validate(movie);
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report.to_string()));
    }
    let mut run = Run::new(movie.clone(), options);
    loop {
        match run.class() {
            Classification::Tiled => tiled_stage(&mut run)?,
            Classification::Mixed => mixed_stage(&mut run)?,
            Classification::Circular => break,
        }
    }
    Ok(PipelineRun { movie: run.movie, trace: run.trace, snapshots: run.snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use crate::foliation::{circular_fixture, torus35_fixture};

    #[test]
    fn torus35_takes_the_type_k_branch() {
        let (out, trace) = run_pipeline(&torus35_fixture()).unwrap();
        assert_eq!(classify(&out).unwrap(), Classification::Circular);
        trace.check().unwrap();
        let first = &trace.steps[0];
        assert_eq!(first.rule, "type_k_torus_inessential_arc");
        assert_eq!(first.before.n4, 3);
        assert!(first.after.n2 < first.before.n2);
    }

    #[test]
    fn stages_require_their_class() {
        let circ = circular_fixture(2);
        assert!(matches!(tiled_to_mixed(&circ), Err(PipelineError::WrongClass { .. })));
        assert!(matches!(mixed_to_circular(&torus35_fixture()), Err(PipelineError::WrongClass { .. })));
        let (out, trace) = run_pipeline(&circ).unwrap();
        assert_eq!(out, circ);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn mixed_fixture_reaches_circular_with_snapshots() {
        let m = fixture("mixed_grid6").unwrap();
        let run = run_pipeline_with(&m, PipelineOptions { snapshots: true }).unwrap();
        assert_eq!(classify(&run.movie).unwrap(), Classification::Circular);
        assert_eq!(run.snapshots.len(), run.trace.steps.len() + 1);
        assert_eq!(run.trace.count(AbstractMove::Destabilize), m.n1 - run.movie.n1);
    }

    #[test]
    fn n4_absent_without_m() {
        assert_eq!(n4(&fixture("grid4").unwrap()), None);
        assert_eq!(n4(&torus35_fixture()), Some(3));
    }
}
