use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::sim::{simulate, SimError};
use super::{Chord, Curve, Direction, FaceMap, FiberState, FoliationMovie, Leaf, Parity, TransitionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    VertexCount,
    ParityBalance,
    Shape,
    Matching,
    ChordParity,
    CircleFace,
    CircleParent,
    PunctureLeaf,
    Totals,
    UnpuncturedCircle,
    InessentialChord,
    Adjacency,
    CircleMotion,
    Routing,
    Disconnected,
    StarParity,
    BcBalance,
    Euler,
    PersistentCircle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub frame: Option<usize>,
    pub transition: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(i) = self.frame {
            write!(f, " [frame {i}]")?;
        }
        if let Some(t) = self.transition {
            write!(f, " [transition {t}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, frame: Option<usize>, transition: Option<usize>, message: String) {
        self.violations.push(Violation { kind, frame, transition, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn punctured(frame: &FiberState, leaf: Leaf) -> bool {
    frame.count(leaf, Curve::K) + frame.count(leaf, Curve::M) > 0
}

fn check_frame(movie: &FoliationMovie, i: usize, order: &[u32], r: &mut ValidationReport) -> Option<FaceMap> {
    let frame = &movie.frames[i];
    let f = Some(i);
    let Some(faces) = FaceMap::new(order, &frame.chords) else {
        r.push(ViolationKind::Matching, f, None, "chords are not a non-crossing perfect matching".into());
        return None;
    };
    for &(a, b) in &frame.chords {
        if movie.parity_of(a) == movie.parity_of(b) {
            r.push(ViolationKind::ChordParity, f, None, format!("chord {a}-{b} joins vertices of equal parity"));
        }
    }
    let mut ids = HashSet::new();
    for c in &frame.circles {
        if !ids.insert(c.id) {
            r.push(ViolationKind::CircleFace, f, None, format!("circle {} listed twice", c.id));
        }
        let face_ok = if frame.chords.is_empty() {
            c.face.is_none()
        } else {
            c.face.is_some() && faces.face_named(c.face).is_some()
        };
        if !face_ok {
            r.push(ViolationKind::CircleFace, f, None, format!("circle {} names face {:?}, not a face of this frame", c.id, c.face));
        }
        if let Some(p) = c.parent {
            match frame.circle(p) {
                None => r.push(ViolationKind::CircleParent, f, None, format!("circle {} has missing parent {p}", c.id)),
                Some(pc) if pc.face != c.face => {
                    r.push(ViolationKind::CircleParent, f, None, format!("circle {} lies in a different face from its parent {p}", c.id))
                }
                _ => {}
            }
        }
        let mut seen = HashSet::from([c.id]);
        let mut cur = c.parent;
        while let Some(p) = cur {
            if !seen.insert(p) {
                r.push(ViolationKind::CircleParent, f, None, format!("circle {} has a cyclic parent chain", c.id));
                break;
            }
            cur = frame.circle(p).and_then(|x| x.parent);
        }
    }
    let leaves: HashSet<Leaf> = frame.leaves().into_iter().collect();
    for (leaf, &(k, m)) in &frame.punctures {
        if (k, m) != (0, 0) && !leaves.contains(leaf) {
            r.push(ViolationKind::PunctureLeaf, f, None, format!("punctures recorded on absent leaf {leaf:?}"));
        }
    }
    let total = |c: Curve| -> u32 { frame.leaves().iter().map(|&l| frame.count(l, c)).sum() };
    if total(Curve::K) != movie.n1 || total(Curve::M) != movie.n3 {
        r.push(
            ViolationKind::Totals,
            f,
            None,
            format!("puncture totals ({}, {}) differ from (n1, n3) = ({}, {})", total(Curve::K), total(Curve::M), movie.n1, movie.n3),
        );
    }
    for c in &frame.circles {
        if frame.count(Leaf::Circle(c.id), Curve::K) == 0 {
            r.push(ViolationKind::UnpuncturedCircle, f, None, format!("circle {} is not punctured by K", c.id));
        }
    }
    for &chord in &frame.chords {
        if !essential(frame, &faces, chord) {
            r.push(ViolationKind::InessentialChord, f, None, format!("chord {}-{} is unpunctured and does not separate punctured leaves", chord.0, chord.1));
        }
    }
    Some(faces)
}

/// A b-arc is essential when it is punctured or has punctured leaves on
/// both sides.
pub(crate) fn essential(frame: &FiberState, faces: &FaceMap, chord: Chord) -> bool {
    if punctured(frame, Leaf::Chord(chord.0, chord.1)) {
        return true;
    }
    let mut sides = [false, false];
    for &other in &frame.chords {
        if other != chord && punctured(frame, Leaf::Chord(other.0, other.1)) {
            sides[faces.chord_inside(chord, other) as usize] = true;
        }
    }
    for c in &frame.circles {
        if punctured(frame, Leaf::Circle(c.id)) {
            if let Some(face) = faces.face_named(c.face) {
                sides[faces.inside(chord, face) as usize] = true;
            }
        }
    }
    sides[0] && sides[1]
}

fn check_transition(movie: &FoliationMovie, t: usize, faces: &[Option<FaceMap>], r: &mut ValidationReport) {
    let n = movie.frames.len();
    let (src, dst) = (&movie.frames[t], &movie.frames[(t + 1) % n]);
    let (Some(fs), Some(fd)) = (&faces[t], &faces[(t + 1) % n]) else {
        return;
    };
    let tr = Some(t);
    match &movie.transitions[t].kind {
        TransitionKind::Bb(d) => {
            let [x, y] = d.chords;
            if src.chords.contains(&x) && src.chords.contains(&y) {
                let (a, b) = (fs.chord_faces(x).expect("chord"), fs.chord_faces(y).expect("chord"));
                let share = [a.0, a.1].iter().any(|f| *f == b.0 || *f == b.1);
                if !share {
                    r.push(ViolationKind::Adjacency, None, tr, format!("chords {x:?} and {y:?} do not cobound a face"));
                }
            }
            for c in &src.circles {
                let Some(nc) = dst.circle(c.id) else { continue };
                if nc.parent != c.parent {
                    r.push(ViolationKind::CircleMotion, None, tr, format!("circle {} changes parent at a bb saddle", c.id));
                }
                let (Some(of), Some(nf)) = (fs.face_named(c.face), fd.face_named(nc.face)) else { continue };
                let old: HashSet<u32> = fs.gaps(of).into_iter().collect();
                if !fd.gaps(nf).iter().any(|g| old.contains(g)) {
                    r.push(ViolationKind::CircleMotion, None, tr, format!("circle {} jumps to an unrelated face", c.id));
                }
            }
        }
        TransitionKind::Bc(d) => {
            if !src.chords.contains(&d.chord) {
                return;
            }
            let (inner, outer) = fs.chord_faces(d.chord).expect("chord");
            let across = |face: usize| if face == inner { outer } else { inner };
            let (mover, holder, frame_with) = match d.dir {
                Direction::Absorb => (d.circle, src, fs),
                Direction::Emit => (d.circle, dst, fd),
            };
            let Some(c) = holder.circle(mover) else { return };
            let face = frame_with.face_named(c.face);
            if c.parent.is_some() || face.is_none_or(|f| !frame_with.borders(d.chord, f)) {
                r.push(ViolationKind::Adjacency, None, tr, format!("circle {mover} is nested or not beside chord {:?}", d.chord));
                return;
            }
            let face = face.expect("checked");
            for c in &src.circles {
                if c.id == mover {
                    continue;
                }
                let Some(nc) = dst.circle(c.id) else { continue };
                let (expect_face, expect_parent) = match d.dir {
                    Direction::Absorb if c.parent == Some(mover) => (fs.face_id(across(face)), None),
                    Direction::Emit if nc.parent == Some(mover) => {
                        if c.parent.is_some() || fs.face_named(c.face) != Some(across(face)) {
                            r.push(ViolationKind::CircleMotion, None, tr, format!("circle {} cannot be enclosed by the emitted circle", c.id));
                        }
                        (fd.face_id(face), Some(mover))
                    }
                    _ => (c.face, c.parent),
                };
                if nc.face != expect_face || nc.parent != expect_parent {
                    r.push(ViolationKind::CircleMotion, None, tr, format!("circle {} moves inconsistently at a bc saddle", c.id));
                }
            }
        }
    }
}

fn check_star_parity(movie: &FoliationMovie, r: &mut ValidationReport) {
    let mut seen: BTreeMap<u32, HashSet<Parity>> = BTreeMap::new();
    for t in &movie.transitions {
        for v in t.corners() {
            seen.entry(v).or_default().insert(t.parity);
        }
    }
    for (v, val) in movie.valences() {
        if val >= 2 && seen.get(&v).map_or(0, |s| s.len()) < 2 {
            r.push(ViolationKind::StarParity, None, None, format!("vertex {v} has valence {val} but singularities of one parity only"));
        }
    }
}

pub fn validate(movie: &FoliationMovie) -> ValidationReport {
    let mut r = ValidationReport::default();
    let nv = movie.vertices.len();
    if !nv.is_multiple_of(2) {
        r.push(ViolationKind::VertexCount, None, None, format!("{nv} vertices, expected an even number"));
    }
    let pos = movie.vertices.iter().filter(|v| v.parity == Parity::Pos).count();
    if 2 * pos != nv {
        r.push(ViolationKind::ParityBalance, None, None, format!("{pos} positive of {nv} vertices"));
    }
    let nf = movie.frames.len();
    let nt = movie.transitions.len();
    let shape_ok = nf > 0 && (nt == nf || (nt == 0 && nf == 1));
    if !shape_ok {
        r.push(ViolationKind::Shape, None, None, format!("{nf} frames and {nt} transitions do not close up"));
    }
    let order: Vec<u32> = movie.vertices.iter().map(|v| v.id).collect();
    let faces: Vec<Option<FaceMap>> = (0..nf).map(|i| check_frame(movie, i, &order, &mut r)).collect();
    if !shape_ok {
        return r;
    }
    for t in 0..nt {
        check_transition(movie, t, &faces, &mut r);
    }
    match simulate(movie) {
        Ok(sim) => {
            if nt > 0 {
                for (curve, n) in [(Curve::K, movie.n1), (Curve::M, movie.n3)] {
                    let comps = sim.components(curve).len();
                    if n > 0 && comps != 1 {
                        r.push(ViolationKind::Disconnected, None, None, format!("{curve:?} closes into {comps} components"));
                    }
                }
            }
        }
        Err(e) => {
            let (frame, transition) = match &e {
                SimError::MissingChord { t, .. }
                | SimError::MissingCircle { t, .. }
                | SimError::CircleExists { t, .. }
                | SimError::BadPair { t }
                | SimError::RoutingRange { t, .. }
                | SimError::Structure { t } => (None, Some(*t)),
                SimError::Count { frame, .. } => (Some(*frame), None),
                SimError::Shape => (None, None),
            };
            r.push(ViolationKind::Routing, frame, transition, e.to_string());
        }
    }
    check_star_parity(movie, &mut r);
    let (mut emit, mut absorb) = (0, 0);
    for t in &movie.transitions {
        if let TransitionKind::Bc(d) = &t.kind {
            match d.dir {
                Direction::Emit => emit += 1,
                Direction::Absorb => absorb += 1,
            }
        }
    }
    if emit != absorb {
        r.push(ViolationKind::BcBalance, None, None, format!("{emit} emits against {absorb} absorbs"));
    }
    if nt > 0 && nv != nt {
        r.push(ViolationKind::Euler, None, None, format!("{nv} vertices but {nt} singularities"));
    }
    if movie.has_chords() {
        for c in &movie.frames[0].circles {
            if movie.frames.iter().all(|f| f.circle(c.id).is_some()) {
                r.push(ViolationKind::PersistentCircle, None, None, format!("circle {} survives every fiber of a movie with chords", c.id));
            }
        }
    }
    r
}
