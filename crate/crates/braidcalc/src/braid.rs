//! Braid words, the moves of the closed-braid calculus, and cabling.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("strand count must be at least 1")]
    NoStrands,
    #[error("letter {letter} at position {position} is out of range for {strands} strands")]
    LetterOutOfRange {
        letter: i32,
        position: usize,
        strands: usize,
    },
    #[error("generator {generator} is out of range for {strands} strands")]
    GeneratorOutOfRange { generator: i32, strands: usize },
    #[error("word is not destabilizable")]
    NotDestabilizable,
    #[error("no exchange factorization at site ({first}, {second})")]
    InvalidSite { first: usize, second: usize },
    #[error("cyclic shift offset {offset} exceeds word length {len}")]
    InvalidShift { offset: usize, len: usize },
    #[error("({p}, {q}) is not a coprime pair with p >= 1")]
    NotCoprime { p: i64, q: i64 },
    #[error("first pair ({p}, {q}) must satisfy p < q")]
    FirstPairOrder { p: i64, q: i64 },
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i32),
    #[error("strand count overflow")]
    Overflow,
}

/// A braid word on `strands` strands. Letter `g` is the generator
/// `σ_|g|` with crossing sign `sign(g)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawWord", into = "RawWord")]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

#[derive(Serialize, Deserialize)]
struct RawWord {
    n: usize,
    word: Vec<i32>,
}

impl TryFrom<RawWord> for BraidWord {
    type Error = BraidError;
    fn try_from(raw: RawWord) -> Result<Self, Self::Error> {
        BraidWord::new(raw.n, raw.word)
    }
}

impl From<BraidWord> for RawWord {
    fn from(w: BraidWord) -> Self {
        RawWord {
            n: w.strands,
            word: w.letters,
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}[", self.strands)?;
        for (i, g) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")
    }
}

fn check_sign(sign: i32) -> Result<i32, BraidError> {
    match sign {
        1 | -1 => Ok(sign),
        s => Err(BraidError::BadSign(s)),
    }
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for (position, &letter) in letters.iter().enumerate() {
            if letter == 0 || letter.unsigned_abs() as usize >= strands {
                return Err(BraidError::LetterOutOfRange {
                    letter,
                    position,
                    strands,
                });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// The trivial braid on `strands` strands.
    pub fn identity(strands: usize) -> Result<Self, BraidError> {
        BraidWord::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|&g| g.signum() as i64).sum()
    }

    pub fn bennequin(&self) -> i64 {
        self.writhe() - self.strands as i64
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&g| -g).collect(),
        }
    }

    /// Cancels adjacent `g, -g` pairs until none remain. Not cyclic.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &g in &self.letters {
            if out.last() == Some(&-g) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        BraidWord {
            strands: self.strands,
            letters: out,
        }
    }

    pub fn stabilize(&self, sign: i32) -> Result<BraidWord, BraidError> {
        let sign = check_sign(sign)?;
        let top = i32::try_from(self.strands).map_err(|_| BraidError::Overflow)?;
        let mut letters = self.letters.clone();
        letters.push(sign * top);
        Ok(BraidWord {
            strands: self.strands + 1,
            letters,
        })
    }

    /// Sign of the destabilization `destabilize` would perform, if any.
    pub fn destabilization_sign(&self) -> Option<i32> {
        let top = self.strands as i32 - 1;
        if top < 1 {
            return None;
        }
        let mut found = None;
        for &g in &self.letters {
            if g.abs() == top {
                if found.is_some() {
                    return None;
                }
                found = Some(g.signum());
            }
        }
        found
    }

    /// Removes the unique top-generator letter after rotating it to the end.
    pub fn destabilize(&self) -> Result<BraidWord, BraidError> {
        if self.destabilization_sign().is_none() {
            return Err(BraidError::NotDestabilizable);
        }
        let top = self.strands as i32 - 1;
        let at = self
            .letters
            .iter()
            .position(|g| g.abs() == top)
            .ok_or(BraidError::NotDestabilizable)?;
        let mut letters = Vec::with_capacity(self.letters.len() - 1);
        letters.extend_from_slice(&self.letters[at + 1..]);
        letters.extend_from_slice(&self.letters[..at]);
        Ok(BraidWord {
            strands: self.strands - 1,
            letters,
        })
    }

    /// The unique exchange site of this word, if the word has one.
    pub fn exchange_site(&self) -> Option<ExchangeSite> {
        let top = self.strands as i32 - 1;
        if top < 1 {
            return None;
        }
        let tops: Vec<usize> = (0..self.letters.len())
            .filter(|&i| self.letters[i].abs() == top)
            .collect();
        match tops.as_slice() {
            &[a, b] if self.letters[a] == -self.letters[b] => {
                Some(ExchangeSite { first: a, second: b })
            }
            _ => None,
        }
    }

    /// Flips the signs of the two top-generator letters at `site`.
    pub fn exchange_move(&self, site: ExchangeSite) -> Result<BraidWord, BraidError> {
        let invalid = BraidError::InvalidSite {
            first: site.first,
            second: site.second,
        };
        match self.exchange_site() {
            Some(s) if s == site => {
                let mut letters = self.letters.clone();
                letters[site.first] = -letters[site.first];
                letters[site.second] = -letters[site.second];
                Ok(BraidWord {
                    strands: self.strands,
                    letters,
                })
            }
            _ => Err(invalid),
        }
    }

    /// `g^-1 · w · g`, without reduction.
    pub fn conjugate(&self, g: i32) -> Result<BraidWord, BraidError> {
        if g == 0 || g.unsigned_abs() as usize >= self.strands {
            return Err(BraidError::GeneratorOutOfRange {
                generator: g,
                strands: self.strands,
            });
        }
        let mut letters = Vec::with_capacity(self.letters.len() + 2);
        letters.push(-g);
        letters.extend_from_slice(&self.letters);
        letters.push(g);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// Rotates left: the first `offset` letters move to the end.
    pub fn cyclic_shift(&self, offset: usize) -> Result<BraidWord, BraidError> {
        let len = self.letters.len();
        if offset > len {
            return Err(BraidError::InvalidShift { offset, len });
        }
        let mut letters = self.letters[offset..].to_vec();
        letters.extend_from_slice(&self.letters[..offset]);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    pub fn apply(&self, mv: &MoveKind) -> Result<BraidWord, BraidError> {
        match *mv {
            MoveKind::Conjugate(g) => self.conjugate(g),
            MoveKind::Exchange(site) => self.exchange_move(site),
            MoveKind::Destabilize(sign) => {
                let sign = check_sign(sign)?;
                if self.destabilization_sign() != Some(sign) {
                    return Err(BraidError::NotDestabilizable);
                }
                self.destabilize()
            }
            MoveKind::Stabilize(sign) => self.stabilize(sign),
            MoveKind::CyclicShift(offset) => self.cyclic_shift(offset),
        }
    }

    /// Permutation induced on strand positions, as an array `p` where the
    /// strand starting at position `i` ends at position `p[i]`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &g in &self.letters {
            let i = g.unsigned_abs() as usize;
            at.swap(i - 1, i);
        }
        let mut p = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            p[strand] = pos;
        }
        p
    }

    /// Number of components of the closure.
    pub fn closure_components(&self) -> usize {
        let p = self.permutation();
        let mut seen = vec![false; p.len()];
        let mut cycles = 0;
        for start in 0..p.len() {
            if !seen[start] {
                cycles += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = p[i];
                }
            }
        }
        cycles
    }

    pub fn concat(&self, other: &BraidWord) -> Option<BraidWord> {
        if self.strands != other.strands {
            return None;
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Some(BraidWord {
            strands: self.strands,
            letters,
        })
    }
}

/// Positions of the `σ_{n-1}` and `σ_{n-1}^-1` letters an exchange flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeSite {
    pub first: usize,
    pub second: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Conjugate(i32),
    Exchange(ExchangeSite),
    Destabilize(i32),
    Stabilize(i32),
    CyclicShift(usize),
}

impl MoveKind {
    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::Conjugate(_) => "conjugate",
            MoveKind::Exchange(_) => "exchange",
            MoveKind::Destabilize(_) => "destabilize",
            MoveKind::Stabilize(_) => "stabilize",
            MoveKind::CyclicShift(_) => "cyclic_shift",
        }
    }

    fn args(&self) -> Vec<i64> {
        match *self {
            MoveKind::Conjugate(g) => vec![g as i64],
            MoveKind::Exchange(s) => vec![s.first as i64, s.second as i64],
            MoveKind::Destabilize(s) | MoveKind::Stabilize(s) => vec![s as i64],
            MoveKind::CyclicShift(k) => vec![k as i64],
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawMove {
    kind: String,
    args: Vec<i64>,
}

impl Serialize for MoveKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawMove {
            kind: self.name().to_string(),
            args: self.args(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoveKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawMove::deserialize(d)?;
        let int = |x: i64| i32::try_from(x).map_err(D::Error::custom);
        let idx = |x: i64| usize::try_from(x).map_err(D::Error::custom);
        match (raw.kind.as_str(), raw.args.as_slice()) {
            ("conjugate", &[g]) => Ok(MoveKind::Conjugate(int(g)?)),
            ("exchange", &[a, b]) => Ok(MoveKind::Exchange(ExchangeSite {
                first: idx(a)?,
                second: idx(b)?,
            })),
            ("destabilize", &[s]) => Ok(MoveKind::Destabilize(int(s)?)),
            ("stabilize", &[s]) => Ok(MoveKind::Stabilize(int(s)?)),
            ("cyclic_shift", &[k]) => Ok(MoveKind::CyclicShift(idx(k)?)),
            (kind, args) => Err(D::Error::custom(format!(
                "unknown move {kind} with {} args",
                args.len()
            ))),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_pair(p: i64, q: i64) -> Result<(), BraidError> {
    if p < 1 || gcd(p, q) != 1 {
        return Err(BraidError::NotCoprime { p, q });
    }
    Ok(())
}

/// `(σ_1 … σ_{p-1})^k`, inverted when `k < 0`.
fn twist(p: usize, k: i64) -> Vec<i32> {
    let mut out = Vec::new();
    if p < 2 {
        return out;
    }
    for _ in 0..k.unsigned_abs() {
        if k > 0 {
            out.extend(1..p as i32);
        } else {
            out.extend((1..p as i32).rev().map(|g| -g));
        }
    }
    out
}

pub fn torus_braid(p: i64, q: i64) -> Result<BraidWord, BraidError> {
    check_pair(p, q)?;
    let strands = usize::try_from(p).map_err(|_| BraidError::Overflow)?;
    BraidWord::new(strands, twist(strands, q))
}

/// The `(p, q)` cable: the `p`-parallel of `w` followed by a twist block on
/// the first bundle correcting the blackboard framing.
pub fn cable(w: &BraidWord, p: i64, q: i64) -> Result<BraidWord, BraidError> {
    check_pair(p, q)?;
    let pu = usize::try_from(p).map_err(|_| BraidError::Overflow)?;
    let strands = w.strands.checked_mul(pu).ok_or(BraidError::Overflow)?;
    let mut letters = Vec::with_capacity(w.len() * pu * pu);
    let pi = p as i32;
    for &g in &w.letters {
        let i = g.abs();
        let mut block = Vec::with_capacity(pu * pu);
        for s in 0..pi {
            let lo = pi * i - s;
            block.extend(lo..lo + pi);
        }
        if g > 0 {
            letters.extend(block);
        } else {
            letters.extend(block.into_iter().rev().map(|x| -x));
        }
    }
    letters.extend(twist(pu, q - p * w.writhe()));
    BraidWord::new(strands, letters)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct CablingSchedule {
    pairs: Vec<(i64, i64)>,
}

#[derive(Serialize, Deserialize)]
struct RawSchedule {
    pairs: Vec<[i64; 2]>,
}

impl TryFrom<RawSchedule> for CablingSchedule {
    type Error = BraidError;
    fn try_from(raw: RawSchedule) -> Result<Self, Self::Error> {
        CablingSchedule::new(raw.pairs.into_iter().map(|[p, q]| (p, q)).collect())
    }
}

impl From<CablingSchedule> for RawSchedule {
    fn from(s: CablingSchedule) -> Self {
        RawSchedule {
            pairs: s.pairs.into_iter().map(|(p, q)| [p, q]).collect(),
        }
    }
}

impl CablingSchedule {
    pub fn new(pairs: Vec<(i64, i64)>) -> Result<Self, BraidError> {
        for &(p, q) in &pairs {
            check_pair(p, q)?;
        }
        if let Some(&(p, q)) = pairs.first() {
            if p >= q {
                return Err(BraidError::FirstPairOrder { p, q });
            }
        }
        Ok(CablingSchedule { pairs })
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    /// Parses `"p,q;p,q;..."`.
    pub fn parse(text: &str) -> Result<Self, ScheduleParseError> {
        let mut pairs = Vec::new();
        for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (p, q) = chunk
                .split_once(',')
                .ok_or_else(|| ScheduleParseError::Syntax(chunk.to_string()))?;
            let p = p
                .trim()
                .parse()
                .map_err(|_| ScheduleParseError::Syntax(chunk.to_string()))?;
            let q = q
                .trim()
                .parse()
                .map_err(|_| ScheduleParseError::Syntax(chunk.to_string()))?;
            pairs.push((p, q));
        }
        Ok(CablingSchedule::new(pairs)?)
    }
}

#[derive(Debug, Error)]
pub enum ScheduleParseError {
    #[error("expected \"p,q\", got {0:?}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] BraidError),
}

pub fn iterated_torus_braid(s: &CablingSchedule) -> Result<BraidWord, BraidError> {
    let mut w = BraidWord::identity(1)?;
    for &(p, q) in &s.pairs {
        w = cable(&w, p, q)?;
    }
    Ok(w)
}

pub fn schubert_min_index(s: &CablingSchedule) -> i64 {
    s.pairs.iter().map(|&(p, _)| p).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize, letters: &[i32]) -> BraidWord {
        BraidWord::new(n, letters.to_vec()).unwrap()
    }

    #[test]
    fn writhe_examples() {
        assert_eq!(w(2, &[1, 1, 1]).writhe(), 3);
        assert_eq!(torus_braid(3, 5).unwrap().writhe(), 10);
        assert_eq!(w(1, &[]).writhe(), 0);
    }

    #[test]
    fn rejects_out_of_range_letters() {
        assert!(BraidWord::new(2, vec![2]).is_err());
        assert!(BraidWord::new(2, vec![0]).is_err());
        assert!(BraidWord::new(0, vec![]).is_err());
    }

    #[test]
    fn stabilize_examples() {
        assert_eq!(w(1, &[]).stabilize(1).unwrap(), w(2, &[1]));
        assert_eq!(w(2, &[1, 1, 1]).stabilize(-1).unwrap(), w(3, &[1, 1, 1, -2]));
    }

    #[test]
    fn destabilize_examples() {
        assert_eq!(w(3, &[1, 1, 1, 2]).destabilize().unwrap(), w(2, &[1, 1, 1]));
        assert_eq!(w(3, &[2, 1, 1, 1]).destabilize().unwrap(), w(2, &[1, 1, 1]));
        assert_eq!(
            w(2, &[1, -1]).destabilize(),
            Err(BraidError::NotDestabilizable)
        );
        assert_eq!(w(1, &[]).destabilize(), Err(BraidError::NotDestabilizable));
    }

    #[test]
    fn destabilize_matches_rotation_scan() {
        let word = w(4, &[1, 3, -2, 1, 2]);
        let n = word.len();
        let mut expected = None;
        for r in 0..n {
            let rot = word.cyclic_shift(r).unwrap();
            let (last, u) = rot.letters.split_last().unwrap();
            if last.abs() == 3 && u.iter().all(|g| g.abs() < 3) {
                expected = Some(w(3, u));
                break;
            }
        }
        assert_eq!(word.destabilize().ok(), expected);
    }

    #[test]
    fn exchange_examples() {
        let word = w(3, &[2, 1, -2, 1]);
        let site = word.exchange_site().unwrap();
        let moved = word.exchange_move(site).unwrap();
        assert_eq!(moved, w(3, &[-2, 1, 2, 1]));
        assert_eq!(moved.exchange_move(site).unwrap(), word);
        let bad = w(3, &[2, 2, 1]);
        assert!(bad.exchange_site().is_none());
        assert!(matches!(
            bad.exchange_move(ExchangeSite { first: 0, second: 1 }),
            Err(BraidError::InvalidSite { .. })
        ));
    }

    #[test]
    fn conjugate_example() {
        let c = w(2, &[1]).conjugate(1).unwrap();
        assert_eq!(c, w(2, &[-1, 1, 1]));
        assert_eq!(c.free_reduce(), w(2, &[1]));
        assert!(w(2, &[1]).conjugate(2).is_err());
    }

    #[test]
    fn torus_examples() {
        assert_eq!(torus_braid(2, 3).unwrap(), w(2, &[1, 1, 1]));
        let t = torus_braid(3, 5).unwrap();
        assert_eq!((t.strands(), t.len(), t.writhe()), (3, 10, 10));
        assert_eq!(torus_braid(1, 7).unwrap(), w(1, &[]));
        assert!(torus_braid(2, 4).is_err());
        assert_eq!(torus_braid(2, -3).unwrap(), w(2, &[-1, -1, -1]));
    }

    #[test]
    fn cable_examples() {
        for (p, q) in [(2, 3), (3, 5), (3, -4), (1, 9)] {
            assert_eq!(
                cable(&w(1, &[]), p, q).unwrap(),
                torus_braid(p, q).unwrap()
            );
        }
        let c = cable(&torus_braid(2, 3).unwrap(), 2, 13).unwrap();
        assert_eq!(c.strands(), 4);
        assert_eq!(c.writhe(), 19);
        let positives = c.letters().iter().filter(|&&g| g > 0).count() as i64;
        let negatives = c.letters().iter().filter(|&&g| g < 0).count() as i64;
        assert_eq!(positives - negatives, 19);
        assert_eq!(c.closure_components(), 1);
    }

    #[test]
    fn cable_block_for_negative_letter_is_inverse() {
        let pos = cable(&w(2, &[1]), 2, 1).unwrap();
        let neg = cable(&w(2, &[-1]), 2, 1).unwrap();
        assert_eq!(&pos.letters()[..4], &[2, 3, 1, 2]);
        assert_eq!(&neg.letters()[..4], &[-2, -1, -3, -2]);
    }

    #[test]
    fn schedule_examples() {
        let s = CablingSchedule::parse("2,3").unwrap();
        assert_eq!(iterated_torus_braid(&s).unwrap(), w(2, &[1, 1, 1]));
        assert_eq!(schubert_min_index(&s), 2);
        let s = CablingSchedule::parse("2,3;2,13").unwrap();
        assert_eq!(schubert_min_index(&s), 4);
        assert_eq!(
            iterated_torus_braid(&s).unwrap(),
            cable(&torus_braid(2, 3).unwrap(), 2, 13).unwrap()
        );
        let s = CablingSchedule::parse("3,5").unwrap();
        assert_eq!(iterated_torus_braid(&s).unwrap(), torus_braid(3, 5).unwrap());
        assert_eq!(schubert_min_index(&CablingSchedule::new(vec![]).unwrap()), 1);
        assert!(CablingSchedule::parse("3,2").is_err());
        assert!(CablingSchedule::parse("2,4").is_err());
        assert!(CablingSchedule::parse("2;3").is_err());
    }

    #[test]
    fn bennequin_examples() {
        assert_eq!(w(2, &[1, 1, 1]).bennequin(), 1);
        assert_eq!(torus_braid(3, 5).unwrap().bennequin(), 7);
        assert_eq!(w(1, &[]).bennequin(), -1);
    }

    #[test]
    fn json_round_trip() {
        let word: BraidWord = serde_json::from_str(r#"{"n":2,"word":[1,1,1]}"#).unwrap();
        assert_eq!(word, w(2, &[1, 1, 1]));
        assert_eq!(serde_json::to_string(&word).unwrap(), r#"{"n":2,"word":[1,1,1]}"#);
        assert!(serde_json::from_str::<BraidWord>(r#"{"n":2,"word":[2]}"#).is_err());
        let mv = MoveKind::Exchange(ExchangeSite { first: 1, second: 4 });
        let text = serde_json::to_string(&mv).unwrap();
        assert_eq!(text, r#"{"kind":"exchange","args":[1,4]}"#);
        assert_eq!(serde_json::from_str::<MoveKind>(&text).unwrap(), mv);
        let s: CablingSchedule = serde_json::from_str(r#"{"pairs":[[2,3],[2,13]]}"#).unwrap();
        assert_eq!(s.pairs(), &[(2, 3), (2, 13)]);
    }
}
