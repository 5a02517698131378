use serde::{Deserialize, Serialize};

use crate::foliation::FoliationMovie;

/// Reduction measure of a movie. Checkpoints compare
/// `(n2, n1, n3, n4)` lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lambda {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    /// Saddles on the first boundary component of the m-support plus one,
    /// `0` when m is absent or the foliation is not tiled.
    pub n4: u32,
    pub total_valence: u32,
}

impl Lambda {
    pub fn of(movie: &FoliationMovie) -> Lambda {
        Lambda {
            n1: movie.n1,
            n2: movie.n2() as u32,
            n3: movie.n3,
            n4: super::pipeline::n4(movie).unwrap_or(0),
            total_valence: movie.total_valence() as u32,
        }
    }

    pub fn key(&self) -> (u32, u32, u32, u32) {
        (self.n2, self.n1, self.n3, self.n4)
    }
}

/// Braid moves a rewrite stands for, as kinds with multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstractMove {
    Exchange,
    Destabilize,
    /// An isotopy of the torus that leaves the braid alone.
    Isotopy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emitted {
    pub kind: AbstractMove,
    pub count: u32,
}

/// Quantity that strictly drops on a step where Λ stays fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Secondary {
    pub name: String,
    pub before: i64,
    pub after: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub params: serde_json::Value,
    pub before: Lambda,
    pub after: Lambda,
    pub moves: Vec<Emitted>,
    /// Whether Λ has to strictly drop at this step.
    pub checkpoint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary: Option<Secondary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub initial: String,
    #[serde(rename = "final")]
    pub last: String,
    pub steps: Vec<TraceStep>,
}

/// FNV-1a of the canonical movie JSON.
pub fn digest(movie: &FoliationMovie) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in movie.to_json().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

impl RewriteTrace {
    pub fn new(movie: &FoliationMovie) -> RewriteTrace {
        let d = digest(movie);
        RewriteTrace { initial: d.clone(), last: d, steps: vec![] }
    }

    /// Total multiplicity per move kind.
    pub fn totals(&self) -> Vec<Emitted> {
        let mut out: Vec<Emitted> = Vec::new();
        for e in self.steps.iter().flat_map(|s| &s.moves) {
            match out.iter_mut().find(|x| x.kind == e.kind) {
                Some(x) => x.count += e.count,
                None => out.push(*e),
            }
        }
        out.sort_by_key(|e| e.kind);
        out
    }

    pub fn count(&self, kind: AbstractMove) -> u32 {
        self.totals().iter().filter(|e| e.kind == kind).map(|e| e.count).sum()
    }

    /// Check the measure contract of every step: checkpoints strictly lower
    /// Λ, other steps keep it and strictly lower their secondary quantity.
    /// Destabilize counts must match the drop in n1.
    pub fn check(&self) -> Result<(), String> {
        for (i, s) in self.steps.iter().enumerate() {
            if s.checkpoint {
                if s.after.key() >= s.before.key() {
                    return Err(format!("step {i} ({}): Λ {:?} does not drop to {:?}", s.rule, s.before.key(), s.after.key()));
                }
            } else {
                if s.after.key() != s.before.key() {
                    return Err(format!("step {i} ({}): Λ changes at a non-checkpoint step", s.rule));
                }
                match &s.secondary {
                    Some(q) if q.after < q.before && q.after >= 0 => {}
                    _ => return Err(format!("step {i} ({}): no strictly decreasing secondary quantity", s.rule)),
                }
            }
            let destabs: u32 = s.moves.iter().filter(|e| e.kind == AbstractMove::Destabilize).map(|e| e.count).sum();
            if s.before.n1 != s.after.n1 + destabs {
                return Err(format!("step {i} ({}): n1 {} -> {} with {destabs} destabilizations", s.rule, s.before.n1, s.after.n1));
            }
        }
        for w in self.steps.windows(2) {
            if w[0].after != w[1].before {
                return Err(format!("steps {} and {} do not chain", w[0].rule, w[1].rule));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<RewriteTrace, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::torus35_fixture;

    fn step(before: (u32, u32), after: (u32, u32), destabs: u32, checkpoint: bool) -> TraceStep {
        let lam = |(n2, n1): (u32, u32)| Lambda { n1, n2, n3: 0, n4: 0, total_valence: 0 };
        TraceStep {
            rule: "r".into(),
            params: serde_json::json!({}),
            before: lam(before),
            after: lam(after),
            moves: vec![Emitted { kind: AbstractMove::Destabilize, count: destabs }],
            checkpoint,
            secondary: None,
        }
    }

    #[test]
    fn check_catches_each_contract() {
        let mut t = RewriteTrace::new(&torus35_fixture());
        t.steps = vec![step((4, 3), (4, 2), 1, true), step((4, 2), (2, 2), 0, true)];
        assert!(t.check().is_ok());
        t.steps[1].after.n2 = 4;
        assert!(t.check().unwrap_err().contains("does not drop"));
        t.steps = vec![step((4, 3), (4, 2), 0, true)];
        assert!(t.check().unwrap_err().contains("destabilizations"));
        t.steps = vec![step((4, 3), (4, 3), 0, false)];
        assert!(t.check().unwrap_err().contains("secondary"));
        t.steps[0].secondary = Some(Secondary { name: "s".into(), before: 5, after: 3 });
        assert!(t.check().is_ok());
        t.steps = vec![step((4, 3), (4, 2), 1, true), step((4, 3), (2, 3), 0, true)];
        assert!(t.check().unwrap_err().contains("chain"));
    }

    #[test]
    fn json_round_trip_and_totals() {
        let mut t = RewriteTrace::new(&torus35_fixture());
        t.steps = vec![step((4, 3), (4, 2), 1, true), step((4, 2), (4, 1), 1, true)];
        let back = RewriteTrace::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_json().contains("\"final\""));
        assert_eq!(t.count(AbstractMove::Destabilize), 2);
        assert_eq!(t.count(AbstractMove::Exchange), 0);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&torus35_fixture()), digest(&torus35_fixture()));
        assert_eq!(digest(&torus35_fixture()).len(), 16);
    }
}
