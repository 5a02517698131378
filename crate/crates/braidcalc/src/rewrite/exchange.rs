use super::excise::{adjacent, cleanup, excise_unchecked, Excision};
use super::{checked, require_valid, RewriteError};
use crate::foliation::{
    reconnect, simulate, Chord, Curve, FoliationMovie, Leaf, TransitionKind,
};

/// Two consecutive bb saddles on the same four corners. The first creates
/// `short`, a b-arc between adjacent vertices, together with `long`; the
/// second joins them back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSite {
    pub saddle: usize,
    pub short: Chord,
    pub long: Chord,
}

pub fn pair_sites(movie: &FoliationMovie) -> Vec<PairSite> {
    let f = movie.transitions.len();
    if f < 2 {
        return vec![];
    }
    let pos = movie.positions();
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let mut out = Vec::new();
    for s in 0..f {
        let (TransitionKind::Bb(d1), TransitionKind::Bb(d2)) =
            (&movie.transitions[s].kind, &movie.transitions[(s + 1) % f].kind)
        else {
            continue;
        };
        let Some(made) = reconnect(&pos, d1.chords[0], d1.chords[1]) else { continue };
        let same = made.contains(&d2.chords[0]) && made.contains(&d2.chords[1]);
        if !same {
            continue;
        }
        for i in 0..2 {
            if adjacent(&order, made[i]).is_some() {
                out.push(PairSite { saddle: s, short: made[i], long: made[1 - i] });
            }
        }
    }
    out
}

/// Reroute every strand of a pair site through its long b-arc, keeping the
/// puncture counts outside the middle fiber. The short b-arc is left
/// unpunctured. Fails when K or m would no longer close into one component.
pub fn clear_short(movie: &FoliationMovie, site: &PairSite) -> Result<FoliationMovie, RewriteError> {
    let out = reroute(movie, site)?;
    connected(&out)?;
    Ok(out)
}

fn connected(out: &FoliationMovie) -> Result<(), RewriteError> {
    let sim = simulate(out).map_err(|_| RewriteError::NoRouting)?;
    for (curve, n) in [(Curve::K, out.n1), (Curve::M, out.n3)] {
        if n > 0 && sim.components(curve).len() != 1 {
            return Err(RewriteError::Precondition(format!("{curve:?} would split into several components")));
        }
    }
    Ok(())
}

pub(crate) fn reroute(movie: &FoliationMovie, site: &PairSite) -> Result<FoliationMovie, RewriteError> {
    let f = movie.transitions.len();
    let (s, t) = (site.saddle, (site.saddle + 1) % f);
    let mid = t;
    let after = (t + 1) % f;
    let mut out = movie.clone();
    let count = |fr: usize, c: Chord, curve: Curve| movie.frames[fr].count(Leaf::Chord(c.0, c.1), curve);
    let pos = movie.positions();
    let TransitionKind::Bb(d2) = movie.transitions[t].kind else {
        return Err(RewriteError::Precondition("not a pair site".into()));
    };
    let made = reconnect(&pos, d2.chords[0], d2.chords[1]).ok_or(RewriteError::NoRouting)?;
    let TransitionKind::Bb(d1) = &mut out.transitions[s].kind else {
        return Err(RewriteError::Precondition("not a pair site".into()));
    };
    for curve in [Curve::K, Curve::M] {
        let mut split = [0u32; 2];
        for (i, c) in d1.chords.iter().enumerate() {
            let follows_first = c.0 == site.long.0 || c.0 == site.long.1;
            split[i] = if follows_first { count(s, *c, curve) } else { 0 };
        }
        match curve {
            Curve::K => d1.k = split,
            Curve::M => d1.m = split,
        }
    }
    let TransitionKind::Bb(d2m) = &mut out.transitions[t].kind else { unreachable!() };
    for curve in [Curve::K, Curve::M] {
        let mut split = [0u32; 2];
        for (i, c) in d2m.chords.iter().enumerate() {
            if *c == site.long {
                let target = made.iter().find(|n| n.0 == c.0 || n.1 == c.0).expect("endpoint");
                split[i] = count(after, *target, curve);
            }
        }
        match curve {
            Curve::K => d2m.k = split,
            Curve::M => d2m.m = split,
        }
    }
    for curve in [Curve::K, Curve::M] {
        let total: u32 = d1_counts(movie, s, curve);
        let p = &mut out.frames[mid].punctures;
        let set = |p: &mut std::collections::BTreeMap<Leaf, (u32, u32)>, leaf: Leaf, n: u32| {
            let e = p.entry(leaf).or_insert((0, 0));
            match curve {
                Curve::K => e.0 = n,
                Curve::M => e.1 = n,
            }
        };
        set(p, Leaf::Chord(site.short.0, site.short.1), 0);
        set(p, Leaf::Chord(site.long.0, site.long.1), total);
        p.retain(|_, c| *c != (0, 0));
    }
    simulate(&out).map_err(|_| RewriteError::NoRouting)?;
    Ok(out)
}

fn d1_counts(movie: &FoliationMovie, s: usize, curve: Curve) -> u32 {
    let TransitionKind::Bb(d) = &movie.transitions[s].kind else { return 0 };
    d.chords.iter().map(|c| movie.frames[s].count(Leaf::Chord(c.0, c.1), curve)).sum()
}

/// Support exchange at a pair site followed by the cleanup excision of the
/// emptied short b-arc.
pub fn exchange_and_excise(movie: &FoliationMovie, site: &PairSite) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    let cleared = clear_short(movie, site)?;
    let mid = (site.saddle + 1) % movie.transitions.len();
    excise_unchecked(&cleared, &Excision { chord: site.short, frames: vec![mid] })
}

/// Two support exchanges whose rerouted strands only close up into one
/// knot together, each followed by its cleanup excision.
pub fn double_exchange(movie: &FoliationMovie, first: &PairSite, second: &PairSite) -> Result<FoliationMovie, RewriteError> {
    require_valid(movie)?;
    let once = reroute(movie, first)?;
    let twice = reroute(&once, second)?;
    connected(&twice)?;
    let f = movie.transitions.len();
    let (m1, m2) = ((first.saddle + 1) % f, (second.saddle + 1) % f);
    let cut = excise_unchecked(&twice, &Excision { chord: first.short, frames: vec![m1] })?;
    let fam = crate::foliation::families(&cut)
        .into_iter()
        .find(|fam| fam.chord == second.short && fam.frames.len() == 1 && {
            let fr = fam.frames[0];
            cut.frames[fr].count(Leaf::Chord(second.short.0, second.short.1), Curve::K) == 0
        })
        .ok_or(RewriteError::NoRouting)?;
    let _ = m2;
    checked(excise_unchecked(&cut, &Excision { chord: second.short, frames: fam.frames })?)
}

/// Outcome of a pair destabilization.
#[derive(Debug, Clone)]
pub struct PairDestab {
    pub movie: FoliationMovie,
    /// K-subarcs pushed across a vertex, one Destabilize each.
    pub destabilizations: u32,
    pub excisions: usize,
}

/// Reroute a pair site through its long b-arc. Strands that then close up
/// after a single turn are K-subarcs bounding destabilization discs at the
/// short arc's vertices; they are pushed off, and the emptied short arc is
/// excised.
pub fn pair_destabilize(movie: &FoliationMovie, site: &PairSite) -> Result<PairDestab, RewriteError> {
    require_valid(movie)?;
    let (mut out, destabilizations) = push_loops(movie, site)?;
    let removed = 1 + cleanup(&mut out)?;
    Ok(PairDestab { movie: checked(out)?, destabilizations, excisions: removed })
}

/// The reroute, loop removal and short-arc excision of a pair
/// destabilization, without the cleanup or the final check.
pub(crate) fn push_loops(movie: &FoliationMovie, site: &PairSite) -> Result<(FoliationMovie, u32), RewriteError> {
    let rerouted = reroute(movie, site)?;
    let sim = simulate(&rerouted).map_err(|_| RewriteError::NoRouting)?;
    if rerouted.n3 > 0 && sim.components(Curve::M).len() != 1 {
        return Err(RewriteError::Precondition("m would split".into()));
    }
    let comps = sim.components(Curve::K);
    let (loops, rest): (Vec<_>, Vec<_>) = comps.into_iter().partition(|c| c.len() == 1);
    if rest.len() != 1 {
        return Err(RewriteError::Precondition("rerouting splits K into several knots".into()));
    }
    let gone: std::collections::HashSet<u32> = loops.iter().map(|c| c[0]).collect();
    let mut lists = sim.lists.clone();
    for l in &mut lists {
        for list in l.k.values_mut() {
            list.retain(|x| !gone.contains(x));
        }
        l.k.retain(|_, x| !x.is_empty());
    }
    let pushed = crate::foliation::assemble(rerouted, &lists).ok_or(RewriteError::NoRouting)?;
    let mid = (site.saddle + 1) % movie.transitions.len();
    let out = excise_unchecked(&pushed, &Excision { chord: site.short, frames: vec![mid] })?;
    Ok((out, gone.len() as u32))
}
