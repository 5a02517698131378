//! Seeded generators for scrambled braids and random words.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braid::BraidWord;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from `BRAIDCALC_SEED`, falling back to `default`.
pub fn env_seed(default: u64) -> u64 {
    std::env::var("BRAIDCALC_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

pub fn random_generator<R: Rng>(rng: &mut R, strands: usize) -> i32 {
    let i = rng.gen_range(1..strands as i32);
    if rng.gen_bool(0.5) {
        i
    } else {
        -i
    }
}

/// A uniformly random word of the given length; `strands` must be ≥ 2
/// unless `len` is 0.
pub fn random_word<R: Rng>(rng: &mut R, strands: usize, len: usize) -> BraidWord {
    let letters = (0..len).map(|_| random_generator(rng, strands)).collect();
    BraidWord::new(strands, letters).expect("letters drawn in range")
}

/// Applies `stabilizations` random-sign stabilizations, then `conjugations`
/// conjugations by random generators, free-reducing after each.
pub fn scramble<R: Rng>(
    rng: &mut R,
    w: &BraidWord,
    stabilizations: usize,
    conjugations: usize,
) -> BraidWord {
    let mut out = w.clone();
    for _ in 0..stabilizations {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        out = out.stabilize(sign).expect("sign is valid").free_reduce();
    }
    for _ in 0..conjugations {
        if out.strands() < 2 {
            break;
        }
        let g = random_generator(rng, out.strands());
        out = out.conjugate(g).expect("generator in range").free_reduce();
    }
    out
}
