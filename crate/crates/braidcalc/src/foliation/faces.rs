use std::collections::HashMap;

use super::Chord;

/// Faces of a non-crossing perfect matching drawn in a disc whose boundary
/// carries the vertices in axis order. Gap `i` is the boundary arc after the
/// vertex at position `i`.
#[derive(Debug, Clone)]
pub struct FaceMap {
    order: Vec<u32>,
    pos: HashMap<u32, usize>,
    gap_face: Vec<usize>,
    face_ids: Vec<Option<u32>>,
}

impl FaceMap {
    /// `None` when the chords are not a non-crossing perfect matching of
    /// `order`.
    pub fn new(order: &[u32], chords: &[Chord]) -> Option<FaceMap> {
        let n = order.len();
        let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if n == 0 {
            return if chords.is_empty() {
                Some(FaceMap { order: vec![], pos, gap_face: vec![], face_ids: vec![None] })
            } else {
                None
            };
        }
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in chords {
            let (pa, pb) = (*pos.get(&a)?, *pos.get(&b)?);
            if pa == pb || partner[pa] != usize::MAX || partner[pb] != usize::MAX {
                return None;
            }
            partner[pa] = pb;
            partner[pb] = pa;
        }
        if partner.contains(&usize::MAX) || crosses(chords, &pos) {
            return None;
        }
        let mut gap_face = vec![usize::MAX; n];
        let mut face_ids = Vec::new();
        for start in 0..n {
            if gap_face[start] != usize::MAX {
                continue;
            }
            let face = face_ids.len();
            let mut id = u32::MAX;
            let mut g = start;
            loop {
                gap_face[g] = face;
                id = id.min(order[g]);
                g = partner[(g + 1) % n];
                if g == start {
                    break;
                }
            }
            face_ids.push(Some(id));
        }
        Some(FaceMap { order: order.to_vec(), pos, gap_face, face_ids })
    }

    pub fn face_count(&self) -> usize {
        self.face_ids.len()
    }

    pub fn face_id(&self, face: usize) -> Option<u32> {
        self.face_ids[face]
    }

    /// Face index named by `id`.
    pub fn face_named(&self, id: Option<u32>) -> Option<usize> {
        self.face_ids.iter().position(|&f| f == id)
    }

    /// Face holding the gap after vertex `v`.
    pub fn face_after(&self, v: u32) -> Option<usize> {
        self.pos.get(&v).map(|&p| self.gap_face[p])
    }

    /// The two faces bordering a chord: the inner one (between its
    /// endpoints in axis order) and the outer one.
    pub fn chord_faces(&self, c: Chord) -> Option<(usize, usize)> {
        let (pa, pb) = (*self.pos.get(&c.0)?, *self.pos.get(&c.1)?);
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        Some((self.gap_face[lo], self.gap_face[hi]))
    }

    pub fn borders(&self, c: Chord, face: usize) -> bool {
        self.chord_faces(c).is_some_and(|(i, o)| i == face || o == face)
    }

    /// Whether a face lies between the endpoints of the chord.
    pub fn inside(&self, c: Chord, face: usize) -> bool {
        let (pa, pb) = (self.pos[&c.0], self.pos[&c.1]);
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        let g = self
            .gap_face
            .iter()
            .position(|&f| f == face)
            .expect("face has a gap");
        lo <= g && g < hi
    }

    /// Whether chord `other` lies between the endpoints of `c`.
    pub fn chord_inside(&self, c: Chord, other: Chord) -> bool {
        let (pa, pb) = (self.pos[&c.0], self.pos[&c.1]);
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        let px = self.pos[&other.0];
        lo < px && px < hi
    }

    /// Gaps of a face, as the vertices they follow.
    pub fn gaps(&self, face: usize) -> Vec<u32> {
        (0..self.order.len())
            .filter(|&g| self.gap_face[g] == face)
            .map(|g| self.order[g])
            .collect()
    }
}

fn crosses(chords: &[Chord], pos: &HashMap<u32, usize>) -> bool {
    let spans: Vec<(usize, usize)> = chords
        .iter()
        .map(|&(a, b)| {
            let (pa, pb) = (pos[&a], pos[&b]);
            (pa.min(pb), pa.max(pb))
        })
        .collect();
    for (i, &(a, b)) in spans.iter().enumerate() {
        for &(c, d) in &spans[i + 1..] {
            let c_in = a < c && c < b;
            let d_in = a < d && d < b;
            if c_in != d_in {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_and_disjoint_faces() {
        let order = [0, 1, 2, 3, 4, 5];
        let fm = FaceMap::new(&order, &[(0, 5), (1, 2), (3, 4)]).unwrap();
        assert_eq!(fm.face_count(), 4);
        let (inner, outer) = fm.chord_faces((0, 5)).unwrap();
        assert_eq!(fm.face_id(outer), Some(5));
        assert_eq!(fm.face_id(inner), Some(0));
        assert_eq!(fm.gaps(inner), vec![0, 2, 4]);
        assert!(fm.inside((0, 5), fm.face_after(2).unwrap()));
        assert!(!fm.inside((1, 2), fm.face_after(2).unwrap()));
        assert_eq!(fm.face_id(fm.face_after(1).unwrap()), Some(1));
    }

    #[test]
    fn rejects_crossing_and_partial() {
        assert!(FaceMap::new(&[0, 1, 2, 3], &[(0, 2), (1, 3)]).is_none());
        assert!(FaceMap::new(&[0, 1, 2, 3], &[(0, 1)]).is_none());
        assert!(FaceMap::new(&[], &[]).is_some());
    }
}
