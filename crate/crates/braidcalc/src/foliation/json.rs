use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    BbData, BcData, Circle, Direction, FiberState, FoliationMovie, Leaf, MovieError, Parity,
    Transition, TransitionKind, Vertex,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMovie {
    vertices: Vec<RawVertex>,
    frames: Vec<RawFrame>,
    transitions: Vec<RawTransition>,
    n1: u32,
    #[serde(default)]
    n3: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: u32,
    parity: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    chords: Vec<[u32; 2]>,
    #[serde(default)]
    circles: Vec<RawCircle>,
    #[serde(default)]
    punctures: BTreeMap<String, [u32; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    id: u32,
    face: Option<u32>,
    parent: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    kind: String,
    parity: String,
    data: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBb {
    chords: [[u32; 2]; 2],
    k: [u32; 2],
    #[serde(default)]
    m: [u32; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBc {
    chord: [u32; 2],
    circle: u32,
    dir: String,
    k: [u32; 2],
    #[serde(default)]
    m: [u32; 2],
    #[serde(default)]
    reversed: bool,
}

fn parity(s: &str) -> Result<Parity, MovieError> {
    match s {
        "+" => Ok(Parity::Pos),
        "-" => Ok(Parity::Neg),
        other => Err(MovieError::Json(format!("parity must be \"+\" or \"-\", got {other:?}"))),
    }
}

pub(crate) fn leaf_key(leaf: &Leaf) -> String {
    match leaf {
        Leaf::Chord(a, b) => format!("{a}-{b}"),
        Leaf::Circle(c) => format!("c{c}"),
    }
}

fn parse_leaf(key: &str) -> Result<Leaf, MovieError> {
    let bad = || MovieError::Json(format!("puncture key {key:?} is neither \"v-w\" nor \"c<id>\""));
    if let Some(id) = key.strip_prefix('c') {
        return id.parse().map(Leaf::Circle).map_err(|_| bad());
    }
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok(Leaf::Chord(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn json_err(e: serde_json::Error) -> MovieError {
    MovieError::Json(e.to_string())
}

pub(crate) fn from_json(text: &str) -> Result<FoliationMovie, MovieError> {
    let raw: RawMovie = serde_json::from_str(text).map_err(json_err)?;
    let mut vertices = Vec::with_capacity(raw.vertices.len());
    for v in raw.vertices {
        if vertices.iter().any(|u: &Vertex| u.id == v.id) {
            return Err(MovieError::DuplicateVertex(v.id));
        }
        vertices.push(Vertex { id: v.id, parity: parity(&v.parity)? });
    }
    let mut frames = Vec::with_capacity(raw.frames.len());
    for f in raw.frames {
        let mut punctures = BTreeMap::new();
        for (key, [k, m]) in f.punctures {
            punctures.insert(parse_leaf(&key)?, (k, m));
        }
        frames.push(FiberState {
            chords: f.chords.iter().map(|c| (c[0], c[1])).collect(),
            circles: f
                .circles
                .iter()
                .map(|c| Circle { id: c.id, face: c.face, parent: c.parent })
                .collect(),
            punctures,
        });
    }
    let mut transitions = Vec::with_capacity(raw.transitions.len());
    for t in raw.transitions {
        let kind = match t.kind.as_str() {
            "bb" => {
                let d: RawBb = serde_json::from_value(t.data).map_err(json_err)?;
                TransitionKind::Bb(BbData {
                    chords: [(d.chords[0][0], d.chords[0][1]), (d.chords[1][0], d.chords[1][1])],
                    k: d.k,
                    m: d.m,
                })
            }
            "bc" => {
                let d: RawBc = serde_json::from_value(t.data).map_err(json_err)?;
                let dir = match d.dir.as_str() {
                    "absorb" => Direction::Absorb,
                    "emit" => Direction::Emit,
                    other => {
                        return Err(MovieError::Json(format!(
                            "bc direction must be \"absorb\" or \"emit\", got {other:?}"
                        )))
                    }
                };
                TransitionKind::Bc(BcData {
                    chord: (d.chord[0], d.chord[1]),
                    circle: d.circle,
                    dir,
                    k: d.k,
                    m: d.m,
                    reversed: d.reversed,
                })
            }
            other => {
                return Err(MovieError::Json(format!(
                    "transition kind must be \"bb\" or \"bc\", got {other:?}"
                )))
            }
        };
        transitions.push(Transition { kind, parity: parity(&t.parity)? });
    }
    let mut movie = FoliationMovie { vertices, frames, transitions, n1: raw.n1, n3: raw.n3 };
    let pos = movie.positions();
    for f in &movie.frames {
        for &(a, b) in &f.chords {
            for v in [a, b] {
                if !pos.contains_key(&v) {
                    return Err(MovieError::UnknownVertex(v));
                }
            }
        }
    }
    movie.canonicalize();
    Ok(movie)
}

pub(crate) fn to_value(m: &FoliationMovie) -> serde_json::Value {
    let raw = RawMovie {
        vertices: m
            .vertices
            .iter()
            .map(|v| RawVertex { id: v.id, parity: v.parity.symbol().to_string() })
            .collect(),
        frames: m
            .frames
            .iter()
            .map(|f| RawFrame {
                chords: f.chords.iter().map(|&(a, b)| [a, b]).collect(),
                circles: f
                    .circles
                    .iter()
                    .map(|c| RawCircle { id: c.id, face: c.face, parent: c.parent })
                    .collect(),
                punctures: f
                    .punctures
                    .iter()
                    .filter(|(_, &c)| c != (0, 0))
                    .map(|(leaf, &(k, mm))| (leaf_key(leaf), [k, mm]))
                    .collect(),
            })
            .collect(),
        transitions: m
            .transitions
            .iter()
            .map(|t| {
                let (kind, data) = match &t.kind {
                    TransitionKind::Bb(d) => (
                        "bb",
                        serde_json::to_value(RawBb {
                            chords: [[d.chords[0].0, d.chords[0].1], [d.chords[1].0, d.chords[1].1]],
                            k: d.k,
                            m: d.m,
                        }),
                    ),
                    TransitionKind::Bc(d) => (
                        "bc",
                        serde_json::to_value(RawBc {
                            chord: [d.chord.0, d.chord.1],
                            circle: d.circle,
                            dir: match d.dir {
                                Direction::Absorb => "absorb".into(),
                                Direction::Emit => "emit".into(),
                            },
                            k: d.k,
                            m: d.m,
                            reversed: d.reversed,
                        }),
                    ),
                };
                RawTransition {
                    kind: kind.into(),
                    parity: t.parity.symbol().into(),
                    data: data.expect("plain struct serializes"),
                }
            })
            .collect(),
        n1: m.n1,
        n3: m.n3,
    };
    serde_json::to_value(raw).expect("plain struct serializes")
}

pub(crate) fn to_json(m: &FoliationMovie) -> String {
    serde_json::to_string_pretty(&to_value(m)).expect("value serializes")
}
