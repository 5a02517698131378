//! Budgeted breadth-first reduction search with replayable certificates.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};

use dashmap::DashSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{BraidError, BraidWord, MoveKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: usize,
    pub max_stabilizations: usize,
    pub max_word_length: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 1_000_000,
            max_stabilizations: 0,
            max_word_length: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub initial: BraidWord,
    pub moves: Vec<MoveKind>,
    #[serde(rename = "final")]
    pub final_word: BraidWord,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub nodes_generated: usize,
    pub depth_reached: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("target strand count must be at least 1")]
    InvalidTarget,
    #[error(
        "search exhausted after expanding {} nodes ({} generated, depth {})",
        .0.nodes_expanded, .0.nodes_generated, .0.depth_reached
    )]
    Exhausted(SearchStats),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: {source}")]
    Move { step: usize, source: BraidError },
    #[error("replayed word {got} differs from recorded final word {expected}")]
    FinalMismatch { got: BraidWord, expected: BraidWord },
}

impl ReplayError {
    /// Index of the first failing move, or the move count for a final
    /// word mismatch.
    pub fn step(&self, moves: usize) -> usize {
        match self {
            ReplayError::Move { step, .. } => *step,
            ReplayError::FinalMismatch { .. } => moves,
        }
    }
}

/// One search step: apply the move, then cancel adjacent inverse pairs.
pub fn step(w: &BraidWord, mv: &MoveKind) -> Result<BraidWord, BraidError> {
    Ok(w.apply(mv)?.free_reduce())
}

/// All moves applicable to `w`, paired with their reduced results, in a
/// fixed order: conjugations, cyclic shifts, exchange, destabilization,
/// stabilizations.
pub fn enumerate_moves(w: &BraidWord, policy: &SearchBudget) -> Vec<(MoveKind, BraidWord)> {
    let mut out = Vec::new();
    for i in 1..w.strands() as i32 {
        for g in [i, -i] {
            let mv = MoveKind::Conjugate(g);
            out.push((mv, step(w, &mv).expect("generator in range")));
        }
    }
    for k in 1..w.len() {
        let mv = MoveKind::CyclicShift(k);
        out.push((mv, step(w, &mv).expect("offset in range")));
    }
    if let Some(site) = w.exchange_site() {
        let mv = MoveKind::Exchange(site);
        out.push((mv, step(w, &mv).expect("site is valid")));
    }
    if let Some(sign) = w.destabilization_sign() {
        let mv = MoveKind::Destabilize(sign);
        out.push((mv, step(w, &mv).expect("destabilizable")));
    }
    if policy.max_stabilizations > 0 {
        for sign in [1, -1] {
            let mv = MoveKind::Stabilize(sign);
            out.push((mv, step(w, &mv).expect("sign is valid")));
        }
    }
    out
}

/// Index of the lexicographically least rotation.
fn least_rotation(s: &[i32]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

type Key = (u32, u32, Box<[i32]>);

/// Visited-set key: strand count, stabilizations used, and the word up to
/// cyclic rotation. Rotations are conjugations, so equal keys are conjugate.
fn visit_key(w: &BraidWord, stabs: usize) -> Key {
    let s = w.letters();
    let r = least_rotation(s);
    let mut rot = Vec::with_capacity(s.len());
    rot.extend_from_slice(&s[r..]);
    rot.extend_from_slice(&s[..r]);
    (w.strands() as u32, stabs as u32, rot.into_boxed_slice())
}

struct Node {
    word: BraidWord,
    parent: Option<(usize, MoveKind)>,
    stabs: usize,
}

struct Child {
    parent: usize,
    mv: MoveKind,
    word: BraidWord,
    stabs: usize,
}

/// Successors worth keeping. Cyclic shifts that cannot cancel at the seam
/// only rotate the word and are skipped without materializing them.
fn successors(nodes: &[Node], idx: usize, budget: &SearchBudget) -> Vec<Child> {
    let node = &nodes[idx];
    let w = &node.word;
    let letters = w.letters();
    let seam_cancels =
        idx == 0 || (letters.len() > 1 && letters[0] == -letters[letters.len() - 1]);
    let mut out = Vec::new();
    let mut push = |mv: MoveKind, word: BraidWord, stabs: usize| {
        if word.len() <= budget.max_word_length {
            out.push(Child {
                parent: idx,
                mv,
                word,
                stabs,
            });
        }
    };
    for i in 1..w.strands() as i32 {
        for g in [i, -i] {
            let mv = MoveKind::Conjugate(g);
            push(mv, step(w, &mv).expect("generator in range"), node.stabs);
        }
    }
    if seam_cancels {
        for k in 1..w.len() {
            let mv = MoveKind::CyclicShift(k);
            push(mv, step(w, &mv).expect("offset in range"), node.stabs);
        }
    }
    if let Some(site) = w.exchange_site() {
        let mv = MoveKind::Exchange(site);
        push(mv, step(w, &mv).expect("site is valid"), node.stabs);
    }
    if let Some(sign) = w.destabilization_sign() {
        let mv = MoveKind::Destabilize(sign);
        push(mv, step(w, &mv).expect("destabilizable"), node.stabs);
    }
    if node.stabs < budget.max_stabilizations {
        for sign in [1, -1] {
            let mv = MoveKind::Stabilize(sign);
            push(mv, step(w, &mv).expect("sign is valid"), node.stabs + 1);
        }
    }
    out
}

fn certificate(nodes: &[Node], mut idx: usize, last: Option<(MoveKind, BraidWord)>) -> Certificate {
    let mut moves = Vec::new();
    let final_word = match &last {
        Some((_, w)) => w.clone(),
        None => nodes[idx].word.clone(),
    };
    if let Some((mv, _)) = last {
        moves.push(mv);
    }
    while let Some((parent, mv)) = nodes[idx].parent {
        moves.push(mv);
        idx = parent;
    }
    moves.reverse();
    Certificate {
        initial: nodes[idx].word.clone(),
        moves,
        final_word,
    }
}

/// Breadth-first search for a word with at most `target` strands. The
/// returned certificate has minimal length among reachable reductions
/// within the budget.
pub fn search_reduction(
    w: &BraidWord,
    target: usize,
    budget: &SearchBudget,
) -> Result<Certificate, SearchError> {
    if target == 0 {
        return Err(SearchError::InvalidTarget);
    }
    let mut nodes = vec![Node {
        word: w.clone(),
        parent: None,
        stabs: 0,
    }];
    if w.strands() <= target {
        return Ok(certificate(&nodes, 0, None));
    }
    let mut stats = SearchStats::default();
    let mut visited: HashSet<Key> = HashSet::new();
    visited.insert(visit_key(&w.free_reduce(), 0));
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &idx in &frontier {
            if stats.nodes_expanded >= budget.max_nodes {
                return Err(SearchError::Exhausted(stats));
            }
            stats.nodes_expanded += 1;
            for child in successors(&nodes, idx, budget) {
                stats.nodes_generated += 1;
                if child.word.strands() <= target {
                    return Ok(certificate(&nodes, idx, Some((child.mv, child.word))));
                }
                if visited.insert(visit_key(&child.word, child.stabs)) {
                    next.push(nodes.len());
                    nodes.push(Node {
                        word: child.word,
                        parent: Some((child.parent, child.mv)),
                        stabs: child.stabs,
                    });
                }
            }
        }
        stats.depth_reached += 1;
        frontier = next;
    }
    Err(SearchError::Exhausted(stats))
}

/// Level-synchronous parallel search. Finds a certificate at the same
/// depth as `search_reduction`, possibly a different one.
pub fn search_reduction_parallel(
    w: &BraidWord,
    target: usize,
    budget: &SearchBudget,
    threads: usize,
) -> Result<Certificate, SearchError> {
    if target == 0 {
        return Err(SearchError::InvalidTarget);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
    pool.install(|| parallel_bfs(w, target, budget))
}

fn parallel_bfs(w: &BraidWord, target: usize, budget: &SearchBudget) -> Result<Certificate, SearchError> {
    let mut nodes = vec![Node {
        word: w.clone(),
        parent: None,
        stabs: 0,
    }];
    if w.strands() <= target {
        return Ok(certificate(&nodes, 0, None));
    }
    let mut stats = SearchStats::default();
    let visited: DashSet<Key> = DashSet::new();
    visited.insert(visit_key(&w.free_reduce(), 0));
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let room = budget.max_nodes - stats.nodes_expanded;
        let truncated = frontier.len() > room;
        let layer = &frontier[..frontier.len().min(room)];
        stats.nodes_expanded += layer.len();
        let found = AtomicBool::new(false);
        let expanded: Vec<Vec<Child>> = layer
            .par_iter()
            .map(|&idx| {
                let mut keep = Vec::new();
                for child in successors(&nodes, idx, budget) {
                    if child.word.strands() <= target {
                        found.store(true, Ordering::Relaxed);
                        keep.push(child);
                    } else if !found.load(Ordering::Relaxed)
                        && visited.insert(visit_key(&child.word, child.stabs))
                    {
                        keep.push(child);
                    }
                }
                keep
            })
            .collect();
        stats.nodes_generated += expanded.iter().map(Vec::len).sum::<usize>();
        if found.load(Ordering::Relaxed) {
            let hit = expanded
                .into_iter()
                .flatten()
                .find(|c| c.word.strands() <= target)
                .expect("a hit was recorded");
            return Ok(certificate(&nodes, hit.parent, Some((hit.mv, hit.word))));
        }
        if truncated {
            return Err(SearchError::Exhausted(stats));
        }
        let mut next = Vec::new();
        for child in expanded.into_iter().flatten() {
            next.push(nodes.len());
            nodes.push(Node {
                word: child.word,
                parent: Some((child.parent, child.mv)),
                stabs: child.stabs,
            });
        }
        stats.depth_reached += 1;
        frontier = next;
    }
    Err(SearchError::Exhausted(stats))
}

/// Replays the certificate, checking every precondition and the final word.
pub fn verify_certificate(c: &Certificate) -> Result<(), ReplayError> {
    let mut w = c.initial.clone();
    for (i, mv) in c.moves.iter().enumerate() {
        w = step(&w, mv).map_err(|source| ReplayError::Move { step: i, source })?;
    }
    if w != c.final_word {
        return Err(ReplayError::FinalMismatch {
            got: w,
            expected: c.final_word.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{torus_braid, ExchangeSite};

    fn w(n: usize, letters: &[i32]) -> BraidWord {
        BraidWord::new(n, letters.to_vec()).unwrap()
    }

    fn no_stab() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn enumerate_examples() {
        let moves = enumerate_moves(&w(2, &[1, 1, 1]), &no_stab());
        assert!(!moves.iter().any(|(m, _)| matches!(m, MoveKind::Destabilize(_))));
        let moves = enumerate_moves(&w(3, &[1, 1, 1, 2]), &no_stab());
        let destab: Vec<_> = moves
            .iter()
            .filter(|(m, _)| matches!(m, MoveKind::Destabilize(_)))
            .collect();
        assert_eq!(destab.len(), 1);
        assert_eq!(destab[0].1, w(2, &[1, 1, 1]));
        for n in 1..6 {
            let word = BraidWord::identity(n).unwrap();
            let conj = enumerate_moves(&word, &no_stab())
                .iter()
                .filter(|(m, _)| matches!(m, MoveKind::Conjugate(_)))
                .count();
            assert_eq!(conj, 2 * (n - 1));
        }
    }

    #[test]
    fn least_rotation_matches_naive() {
        let cases: &[&[i32]] = &[&[], &[1], &[2, 1, 2, 1], &[3, -1, 2, -1, 2], &[1, 1, 1]];
        for s in cases {
            let naive = (0..s.len().max(1))
                .min_by_key(|&r| {
                    let mut v = s[r.min(s.len())..].to_vec();
                    v.extend_from_slice(&s[..r.min(s.len())]);
                    v
                })
                .unwrap();
            let r = least_rotation(s);
            let rot = |r: usize| {
                let mut v = s[r..].to_vec();
                v.extend_from_slice(&s[..r]);
                v
            };
            assert_eq!(rot(r), rot(naive.min(s.len())));
        }
    }

    #[test]
    fn already_at_target() {
        let t = torus_braid(3, 5).unwrap();
        let c = search_reduction(&t, 3, &no_stab()).unwrap();
        assert!(c.moves.is_empty());
        assert_eq!(c.final_word, t);
        assert!(verify_certificate(&c).is_ok());
    }

    #[test]
    fn zero_budget_exhausts() {
        let word = w(3, &[1, 1, 1, 2]);
        let budget = SearchBudget {
            max_nodes: 0,
            ..no_stab()
        };
        assert!(matches!(
            search_reduction(&word, 2, &budget),
            Err(SearchError::Exhausted(_))
        ));
        assert!(matches!(
            search_reduction(&word, 0, &budget),
            Err(SearchError::InvalidTarget)
        ));
    }

    #[test]
    fn stabilized_trefoil_with_conjugations() {
        let mut word = torus_braid(2, 3).unwrap().stabilize(1).unwrap();
        for g in [2, -1, 2] {
            word = word.conjugate(g).unwrap().free_reduce();
        }
        let c = search_reduction(&word, 2, &no_stab()).unwrap();
        assert_eq!(c.final_word.strands(), 2);
        assert!(verify_certificate(&c).is_ok());
        let p = search_reduction_parallel(&word, 2, &no_stab(), 3).unwrap();
        assert_eq!(p.moves.len(), c.moves.len());
        assert!(verify_certificate(&p).is_ok());
    }

    #[test]
    fn perturbed_certificates_fail() {
        let mut word = w(3, &[2, 1, -2, 1, 1]);
        word = word.stabilize(-1).unwrap();
        let c = Certificate {
            initial: word.clone(),
            moves: vec![
                MoveKind::Destabilize(-1),
                MoveKind::Exchange(ExchangeSite { first: 0, second: 2 }),
            ],
            final_word: w(3, &[-2, 1, 2, 1, 1]),
        };
        assert!(verify_certificate(&c).is_ok());
        let mut bad = c.clone();
        bad.moves[1] = MoveKind::Exchange(ExchangeSite { first: 1, second: 2 });
        let err = verify_certificate(&bad).unwrap_err();
        assert_eq!(err.step(bad.moves.len()), 1);
        let mut bad = c.clone();
        bad.final_word = w(3, &[1, -2, 1, 2, 1]);
        let err = verify_certificate(&bad).unwrap_err();
        assert!(matches!(err, ReplayError::FinalMismatch { .. }));
    }

    #[test]
    fn certificate_json() {
        let c = search_reduction(&w(3, &[1, 1, 1, 2]), 2, &no_stab()).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"final\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
