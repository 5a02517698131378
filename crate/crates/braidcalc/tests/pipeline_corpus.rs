use std::time::Instant;

use braidcalc::corpus::{corpus, fixture};
use braidcalc::foliation::{classify, random_movie, Classification};
use braidcalc::rewrite::{run_pipeline, AbstractMove, PipelineError, RewriteTrace};
use proptest::prelude::*;

#[test]
fn corpus_reaches_circular() {
    for (name, m) in corpus() {
        let t = Instant::now();
        let (out, trace) = run_pipeline(&m).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(classify(&out).unwrap(), Classification::Circular, "{name}");
        trace.check().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(trace.count(AbstractMove::Destabilize), m.n1 - out.n1, "{name}");
        assert!(t.elapsed().as_secs_f64() < 10.0, "{name}");
    }
}

#[test]
fn torus35_passes_the_type_k_branch() {
    let (_, trace) = run_pipeline(&fixture("torus35").unwrap()).unwrap();
    let step = trace.steps.iter().find(|s| s.rule == "type_k_torus_inessential_arc").expect("type-k step");
    assert_eq!(step.before.n4, 3);
    assert!(step.after.n2 < step.before.n2);
    assert!(!trace.steps.is_empty());
}

#[test]
fn trace_round_trips() {
    let (_, trace) = run_pipeline(&fixture("grid6").unwrap()).unwrap();
    assert_eq!(RewriteTrace::from_json(&trace.to_json()).unwrap(), trace);
}

#[test]
fn pipeline_is_deterministic() {
    let m = fixture("mixed_torus35").unwrap();
    let (a, ta) = run_pipeline(&m).unwrap();
    let (b, tb) = run_pipeline(&m).unwrap();
    assert_eq!((a, ta.to_json()), (b, tb.to_json()));
}

fn circular_or_exhausted(seed: u64) -> Result<bool, String> {
    let mut rng = braidcalc::random::rng(seed);
    let m = random_movie(&mut rng, 6, 50).expect("six-vertex tiling");
    match run_pipeline(&m) {
        Ok((out, trace)) => {
            trace.check()?;
            match classify(&out) {
                Ok(Classification::Circular) => Ok(true),
                other => Err(format!("ended {other:?}")),
            }
        }
        Err(PipelineError::Exhausted { .. }) => Ok(false),
        Err(e) => Err(e.to_string()),
    }
}

#[test]
fn small_seed_tilings_reach_circular() {
    for seed in 0..64 {
        assert_eq!(circular_or_exhausted(seed), Ok(true), "seed {seed}");
    }
}

#[test]
fn uncovered_tiling_is_reported_exhausted() {
    assert_eq!(circular_or_exhausted(4051478159756609745), Ok(false));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_tilings_terminate_or_report(seed in any::<u64>()) {
        let r = circular_or_exhausted(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
