//! JSON snapshots of a [`Memory`].
//!
//! The document carries `format_version`, the iteration counter, the next
//! object id, the threshold, the supervision pairs, every object with its
//! visual objects, and the same-genus edges. Keys are emitted in a fixed order
//! and collections in id order, so equal memories serialize to equal bytes.
//! Centroids are written with shortest round-trip formatting of their 32-bit
//! values and read back exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{Memory, MemoryObject, ObjectId, SameGenusEdge};
use crate::threshold::{SupervisionPair, SupervisionStore};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotDocument {
    format_version: u32,
    iteration: u64,
    next_object_id: u64,
    theta: f64,
    supervision: Vec<SupervisionPair>,
    objects: Vec<MemoryObject>,
    sg_edges: Vec<[ObjectId; 2]>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

pub fn to_json(memory: &Memory) -> String {
    let doc = SnapshotDocument {
        format_version: FORMAT_VERSION,
        iteration: memory.iteration(),
        next_object_id: memory.next_object_id(),
        theta: memory.theta(),
        supervision: memory.supervision().pairs().to_vec(),
        objects: memory.objects().cloned().collect(),
        sg_edges: memory
            .edges()
            .map(|e| {
                let (a, b) = e.endpoints();
                [a, b]
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("snapshot serializes");
    json.push('\n');
    json
}

pub fn from_json(text: &str) -> Result<Memory> {
    let probe: VersionProbe = serde_json::from_str(text).map_err(|e| Error::CorruptedSnapshot(e.to_string()))?;
    if probe.format_version != FORMAT_VERSION {
        return Err(Error::SnapshotVersion {
            expected: FORMAT_VERSION,
            found: probe.format_version,
        });
    }
    let doc: SnapshotDocument = serde_json::from_str(text).map_err(|e| Error::CorruptedSnapshot(e.to_string()))?;
    let corrupted = |e: Error| Error::CorruptedSnapshot(e.to_string());
    let supervision = SupervisionStore::from_parts(doc.supervision, doc.theta).map_err(corrupted)?;
    let edges = doc
        .sg_edges
        .into_iter()
        .map(|[a, b]| SameGenusEdge::new(a, b))
        .collect::<Result<Vec<_>>>()
        .map_err(corrupted)?;
    Memory::from_parts(doc.objects, edges, supervision, doc.iteration, doc.next_object_id).map_err(corrupted)
}

pub fn save(memory: &Memory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(memory)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Memory> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::CorruptedSnapshot(e.to_string()))?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::{Encounter, SourceSpan, VisualObject};

    fn sample() -> Memory {
        let enc = |seq: &str, xs: &[f32]| {
            Encounter::new(
                seq,
                xs.iter()
                    .enumerate()
                    .map(|(i, x)| VisualObject {
                        centroid: vec![*x, x * 0.1, -x],
                        source: SourceSpan {
                            sequence_id: seq.into(),
                            start: i * 15,
                            end: i * 15 + 49,
                        },
                    })
                    .collect(),
            )
            .unwrap()
        };
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", &[0.1, 0.7]));
        m.advance_iteration();
        let b = m.add_object(&enc("b", &[1.0 / 3.0]));
        m.record_same_genus_edge(b, a).unwrap();
        m.supervision_mut().record(0.3, true).unwrap();
        m.supervision_mut().record(2.0 / 3.0, false).unwrap();
        m.supervision_mut().update_theta();
        m.advance_iteration();
        m
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let json = to_json(&m);
        let back = from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(to_json(&back), json);
        assert_eq!(from_json(&to_json(&Memory::new())).unwrap(), Memory::new());
    }

    #[test]
    fn truncated_and_garbage() {
        let json = to_json(&sample());
        for cut in [0, 1, json.len() / 2, json.len() - 3] {
            assert!(
                matches!(from_json(&json[..cut]), Err(Error::CorruptedSnapshot(_))),
                "cut {cut}"
            );
        }
        assert!(matches!(from_json("[1,2]"), Err(Error::CorruptedSnapshot(_))));
    }

    #[test]
    fn version_mismatch() {
        let json = to_json(&sample()).replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(from_json(&json), Err(Error::SnapshotVersion { found: 2, .. })));
    }

    #[test]
    fn structural_violations_are_corruption() {
        let json = to_json(&sample());
        let dangling = json.replace("\"next_object_id\": 2", "\"next_object_id\": 1");
        assert!(matches!(from_json(&dangling), Err(Error::CorruptedSnapshot(_))));
        let negative = json.replace("\"delta\": 0.3", "\"delta\": -0.3");
        assert!(matches!(from_json(&negative), Err(Error::CorruptedSnapshot(_))));
        let ragged = json.replacen("-0.1\n", "-0.1,\n          4.0\n", 1);
        assert_ne!(ragged, json);
        assert!(matches!(from_json(&ragged), Err(Error::CorruptedSnapshot(_))));
    }

    #[test]
    fn save_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save(&sample(), &path).unwrap();
        assert_eq!(load(&path).unwrap(), sample());
        assert!(matches!(load(dir.path().join("missing.json")), Err(Error::Io { .. })));
    }
}
