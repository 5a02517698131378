#![allow(dead_code)]

use std::collections::HashMap;

use braidcalc::foliation::{random_movie, validate, FoliationMovie};
use braidcalc::rewrite::{
    change_of_foliation, destab_sites, destabilize, eliminate_valence_two, foliation_sites,
    valence_two_vertices,
};
use braidcalc::BraidWord;
use rand::Rng;

/// Reduced word in the free group on `x_1..x_n`; `-i` is `x_i^{-1}`.
pub type FreeWord = Vec<i32>;

fn push_reduced(out: &mut FreeWord, x: i32) {
    if out.last() == Some(&-x) {
        out.pop();
    } else {
        out.push(x);
    }
}

fn substitute(w: &[i32], images: &[FreeWord]) -> FreeWord {
    let mut out = Vec::new();
    for &x in w {
        let img = &images[x.unsigned_abs() as usize - 1];
        if x > 0 {
            img.iter().for_each(|&y| push_reduced(&mut out, y));
        } else {
            img.iter().rev().for_each(|&y| push_reduced(&mut out, -y));
        }
    }
    out
}

/// Images of the free generators under the Artin action of `w`. The action
/// is faithful, so two braids are equal exactly when these agree.
pub fn artin_images(w: &BraidWord) -> Vec<FreeWord> {
    let n = w.strands();
    let mut images: Vec<FreeWord> = (1..=n as i32).map(|i| vec![i]).collect();
    for &g in w.letters() {
        let i = g.abs();
        let sigma: Vec<FreeWord> = (1..=n as i32)
            .map(|j| match (j == i, j == i + 1, g > 0) {
                (true, _, true) => vec![i, i + 1, -i],
                (_, true, true) => vec![i],
                (true, _, false) => vec![i + 1],
                (_, true, false) => vec![-(i + 1), i, i + 1],
                _ => vec![j],
            })
            .collect();
        images = sigma.iter().map(|s| substitute(s, &images)).collect();
    }
    images
}

pub fn artin_equal(a: &BraidWord, b: &BraidWord) -> bool {
    a.strands() == b.strands() && artin_images(a) == artin_images(b)
}

/// Ball of radius `r` in the Cayley graph of `B_n`, nodes identified through
/// the Artin action.
pub struct CayleyBall {
    pub strands: usize,
    pub edges: Vec<HashMap<i32, usize>>,
}

impl CayleyBall {
    pub fn new(strands: usize, radius: usize) -> CayleyBall {
        let gens: Vec<i32> = (1..strands as i32).flat_map(|i| [i, -i]).collect();
        let mut index: HashMap<Vec<FreeWord>, usize> = HashMap::new();
        let id = BraidWord::identity(strands).unwrap();
        index.insert(artin_images(&id), 0);
        let mut words = vec![id];
        let mut edges = vec![HashMap::new()];
        let mut frontier = vec![0];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for &g in &gens {
                    let w = words[u].concat(&BraidWord::new(strands, vec![g]).unwrap()).unwrap();
                    let key = artin_images(&w);
                    let v = *index.entry(key).or_insert_with(|| {
                        words.push(w.clone());
                        edges.push(HashMap::new());
                        next.push(words.len() - 1);
                        words.len() - 1
                    });
                    edges[u].insert(g, v);
                }
            }
            frontier = next;
        }
        CayleyBall { strands, edges }
    }

    /// Node reached by walking the word from the identity.
    pub fn locate(&self, w: &BraidWord) -> Option<usize> {
        w.letters().iter().try_fold(0, |u, g| self.edges.get(u)?.get(g).copied())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }
}

/// A word equal to `w` by a short random walk of length-preserving braid
/// relations, plus occasional `g g^-1` insertion when `max_len` allows.
pub fn relation_walk<R: Rng>(rng: &mut R, w: &BraidWord, steps: usize, max_len: usize) -> BraidWord {
    let n = w.strands() as i32;
    let mut l = w.letters().to_vec();
    for _ in 0..steps {
        let choice = rng.gen_range(0..4);
        if choice == 0 && l.len() + 2 <= max_len && n > 1 {
            let g = rng.gen_range(1..n) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let at = rng.gen_range(0..=l.len());
            l.splice(at..at, [g, -g]);
        } else if choice == 1 {
            if let Some(at) = (0..l.len().saturating_sub(1)).find(|&i| l[i] == -l[i + 1]) {
                l.drain(at..at + 2);
            }
        } else if choice == 2 && l.len() >= 2 {
            let at = rng.gen_range(0..l.len() - 1);
            if (l[at].abs() - l[at + 1].abs()).abs() >= 2 {
                l.swap(at, at + 1);
            }
        } else if l.len() >= 3 {
            let at = rng.gen_range(0..l.len() - 2);
            let (a, b, c) = (l[at], l[at + 1], l[at + 2]);
            let same_sign = a.signum() == b.signum() && b.signum() == c.signum();
            if same_sign && a == c && (a.abs() - b.abs()).abs() == 1 {
                l[at] = b;
                l[at + 1] = a;
                l[at + 2] = b;
            }
        }
    }
    BraidWord::new(w.strands(), l).unwrap()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct RuleTally {
    pub change_of_foliation: usize,
    pub eliminate_valence_two: usize,
    pub destabilization_disc: usize,
    pub violations: usize,
}

impl RuleTally {
    pub fn total(&self) -> usize {
        self.change_of_foliation + self.eliminate_valence_two + self.destabilization_disc
    }
}

/// Apply every admissible change of foliation, valence-two elimination and
/// destabilization at `movie`'s sites, counting contract violations.
pub fn apply_rules(movie: &FoliationMovie, tally: &mut RuleTally, violations: &mut Vec<String>) {
    let mut fail = |tally: &mut RuleTally, msg: String| {
        tally.violations += 1;
        violations.push(msg);
    };
    for site in foliation_sites(movie) {
        let Ok(out) = change_of_foliation(movie, &site) else { continue };
        tally.change_of_foliation += 1;
        let (before, after) = (movie.valences(), out.valences());
        let region_drop = before[&site.region.0] + before[&site.region.1] - after[&site.region.0] - after[&site.region.1];
        if !validate(&out).is_valid() || (out.n1, out.n2()) != (movie.n1, movie.n2()) || region_drop != 2 {
            fail(tally, format!("change_of_foliation at {site:?}"));
        }
    }
    for v in valence_two_vertices(movie) {
        let Ok(e) = eliminate_valence_two(movie, v) else { continue };
        tally.eliminate_valence_two += 1;
        if !validate(&e.movie).is_valid() || e.movie.n2() + 2 != movie.n2() {
            fail(tally, format!("eliminate_valence_two at {v}"));
        }
    }
    for site in destab_sites(movie) {
        let Ok(out) = destabilize(movie, site) else { continue };
        tally.destabilization_disc += 1;
        if !validate(&out).is_valid() || out.n1 + 1 != movie.n1 {
            fail(tally, format!("destabilization_disc at {site:?}"));
        }
    }
}

/// Random tilings with six or eight vertices.
pub fn random_movies(seed: u64, count: usize) -> Vec<FoliationMovie> {
    let mut rng = braidcalc::random::rng(seed);
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let n = if i % 4 == 3 { 8 } else { 6 };
        i += 1;
        if let Some(m) = random_movie(&mut rng, n, 50) {
            out.push(m);
        }
    }
    out
}

/// Run the rules at every site of the corpus and `movies` random tilings,
/// and along walks that follow the first admissible change of foliation or
/// destabilization.
pub fn sweep(seed: u64, movies: usize) -> (RuleTally, Vec<String>) {
    let mut tally = RuleTally::default();
    let mut violations = Vec::new();
    let mut starts: Vec<_> = braidcalc::corpus::corpus().into_iter().map(|(_, m)| m).collect();
    starts.extend(random_movies(seed, movies));
    for mut m in starts {
        for _ in 0..6 {
            apply_rules(&m, &mut tally, &mut violations);
            let next = foliation_sites(&m)
                .iter()
                .find_map(|s| change_of_foliation(&m, s).ok())
                .or_else(|| destab_sites(&m).into_iter().find_map(|s| destabilize(&m, s).ok()));
            match next {
                Some(n) if validate(&n).is_valid() => m = n,
                _ => break,
            }
        }
    }
    (tally, violations)
}
