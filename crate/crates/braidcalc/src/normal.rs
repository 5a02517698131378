//! Garside left normal form, word equality and a conjugacy dedup key.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::BraidWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("strand mismatch: {0} vs {1}")]
pub struct StrandMismatch(pub usize, pub usize);

/// A permutation braid, stored as the image array of its permutation.
/// Composition is `(a·b)[k] = a[b[k]]`, so appending `σ_i` swaps the
/// entries at positions `i-1` and `i`.
pub type Perm = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub strands: usize,
    pub delta_power: i64,
    pub factors: Vec<Perm>,
}

fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

fn delta(n: usize) -> Perm {
    (0..n as u8).rev().collect()
}

fn compose(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&k| a[k as usize]).collect()
}

fn inverse(a: &[u8]) -> Perm {
    let mut inv = vec![0u8; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

fn transposition(n: usize, i: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i - 1, i);
    p
}

/// Conjugation by Δ, which sends `σ_i` to `σ_{n-i}`.
fn flip(a: &[u8]) -> Perm {
    let n = a.len() as u8;
    a.iter().rev().map(|&x| n - 1 - x).collect()
}

/// `a·σ_i` is longer than `a`.
fn can_append(a: &[u8], i: usize) -> bool {
    a[i - 1] < a[i]
}

/// `σ_i` left-divides `b`.
fn left_descent(b_inv: &[u8], i: usize) -> bool {
    b_inv[i - 1] > b_inv[i]
}

/// Rewrites the pair so that `a` absorbs the largest possible head of `b`.
/// Returns true when anything moved.
fn left_weight(a: &mut Perm, b: &mut Perm) -> bool {
    let n = a.len();
    let mut changed = false;
    loop {
        let b_inv = inverse(b);
        let step = (1..n).find(|&i| left_descent(&b_inv, i) && can_append(a, i));
        match step {
            Some(i) => {
                a.swap(i - 1, i);
                let t = transposition(n, i);
                *b = compose(&t, b);
                changed = true;
            }
            None => return changed,
        }
    }
}

pub fn left_normal_form(w: &BraidWord) -> NormalForm {
    let n = w.strands();
    let mut delta_power = 0i64;
    let mut factors: Vec<Perm> = Vec::new();
    let full = delta(n);
    for &g in w.letters() {
        let i = g.unsigned_abs() as usize;
        if g > 0 {
            factors.push(transposition(n, i));
        } else {
            // σ_i^-1 = Δ^-1 · (Δ σ_i^-1); push Δ^-1 to the front.
            delta_power -= 1;
            for f in factors.iter_mut() {
                *f = flip(f);
            }
            factors.push(compose(&full, &transposition(n, i)));
        }
    }
    normalize(n, delta_power, factors)
}

fn normalize(n: usize, mut delta_power: i64, mut factors: Vec<Perm>) -> NormalForm {
    let id = identity(n);
    let full = delta(n);
    loop {
        let mut changed = false;
        for k in (0..factors.len().saturating_sub(1)).rev() {
            let (left, right) = factors.split_at_mut(k + 1);
            if left_weight(&mut left[k], &mut right[0]) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let lead = factors.iter().take_while(|f| **f == full).count();
    delta_power += lead as i64;
    factors.drain(..lead);
    while factors.last() == Some(&id) {
        factors.pop();
    }
    NormalForm {
        strands: n,
        delta_power,
        factors,
    }
}

pub fn words_equal(w1: &BraidWord, w2: &BraidWord) -> Result<bool, StrandMismatch> {
    if w1.strands() != w2.strands() {
        return Err(StrandMismatch(w1.strands(), w2.strands()));
    }
    Ok(left_normal_form(w1) == left_normal_form(w2))
}

fn serialize(writhe: i64, nf: &NormalForm) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + nf.factors.len() * nf.strands);
    out.extend_from_slice(&(nf.strands as u32).to_be_bytes());
    out.extend_from_slice(&((writhe as u64) ^ (1 << 63)).to_be_bytes());
    out.extend_from_slice(&((nf.delta_power as u64) ^ (1 << 63)).to_be_bytes());
    for f in &nf.factors {
        out.extend_from_slice(f);
    }
    out
}

/// Minimum over cyclic rotations of the serialized normal form. Equal keys
/// imply conjugate braids; conjugate braids may have different keys.
pub fn conjugacy_key(w: &BraidWord) -> Vec<u8> {
    let writhe = w.writhe();
    if w.is_empty() {
        return serialize(writhe, &left_normal_form(w));
    }
    (0..w.len())
        .map(|r| {
            let rot = w.cyclic_shift(r).expect("offset within length");
            serialize(writhe, &left_normal_form(&rot))
        })
        .min()
        .expect("nonempty word has a rotation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize, letters: &[i32]) -> BraidWord {
        BraidWord::new(n, letters.to_vec()).unwrap()
    }

    #[test]
    fn braid_relation() {
        assert_eq!(
            left_normal_form(&w(3, &[1, 2, 1])),
            left_normal_form(&w(3, &[2, 1, 2]))
        );
        let nf = left_normal_form(&w(3, &[1, 2, 1]));
        assert_eq!((nf.delta_power, nf.factors.len()), (1, 0));
    }

    #[test]
    fn b2_delta_is_sigma1() {
        let nf = left_normal_form(&w(2, &[1, 1]));
        assert_eq!(nf.delta_power, 2);
        assert!(nf.factors.is_empty());
        let nf = left_normal_form(&w(2, &[-1, -1, -1]));
        assert_eq!(nf.delta_power, -3);
    }

    #[test]
    fn identity_form() {
        let nf = left_normal_form(&w(3, &[]));
        assert_eq!(nf.delta_power, 0);
        assert!(nf.factors.is_empty());
        assert!(words_equal(&w(2, &[1, -1]), &w(2, &[])).unwrap());
        assert!(!words_equal(&w(2, &[1]), &w(2, &[-1])).unwrap());
        assert!(words_equal(&w(2, &[1]), &w(3, &[1])).is_err());
    }

    #[test]
    fn far_commutation_and_inverses() {
        assert!(words_equal(&w(4, &[1, 3]), &w(4, &[3, 1])).unwrap());
        assert!(words_equal(&w(4, &[1, 3, -1, -3]), &w(4, &[])).unwrap());
        assert!(words_equal(&w(3, &[-1, -2, -1]), &w(3, &[-2, -1, -2])).unwrap());
        assert!(!words_equal(&w(3, &[1, 2]), &w(3, &[2, 1])).unwrap());
    }

    #[test]
    fn factors_are_left_weighted() {
        let nf = left_normal_form(&w(4, &[1, 2, -3, 2, 1, 3, -1, 2, 2]));
        let full = delta(4);
        let id = identity(4);
        for f in &nf.factors {
            assert_ne!(*f, full);
            assert_ne!(*f, id);
        }
        for pair in nf.factors.windows(2) {
            let mut a = pair[0].clone();
            let mut b = pair[1].clone();
            assert!(!left_weight(&mut a, &mut b));
        }
    }

    #[test]
    fn key_examples() {
        let word = w(4, &[1, -3, 2, 2, -1]);
        let key = conjugacy_key(&word);
        for r in 0..word.len() {
            assert_eq!(conjugacy_key(&word.cyclic_shift(r).unwrap()), key);
        }
        assert_eq!(conjugacy_key(&word), key);
        assert_ne!(conjugacy_key(&w(3, &[1])), conjugacy_key(&w(3, &[2])));
        assert_ne!(conjugacy_key(&w(3, &[1])), conjugacy_key(&w(4, &[1])));
    }
}
