//! Labeled embedding sequences: the on-disk manifest plus VSEM1 payloads,
//! and a synthetic generator with controlled Genus/Differentia structure.

pub mod payload;
mod synthetic;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use synthetic::{generate_synthetic, SyntheticConfig};

/// One embedded video frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameEmbedding(Vec<f32>);

impl FrameEmbedding {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("frame embedding"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("frame embedding has non-finite entries".into()));
        }
        Ok(FrameEmbedding(values))
    }

    pub(crate) fn from_finite(values: Vec<f32>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        FrameEmbedding(values)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f32> {
        self.0
    }
}

/// Ground-truth labels attached to a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceLabel {
    pub genus_label: String,
    pub instance_id: String,
    pub has_differentia: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSequence {
    pub sequence_id: String,
    pub frames: Vec<FrameEmbedding>,
    pub label: SequenceLabel,
}

/// Manifest row: label metadata plus the payload location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub sequence_id: String,
    pub genus_label: String,
    pub instance_id: String,
    pub has_differentia: bool,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
}

impl SequenceEntry {
    pub fn label(&self) -> SequenceLabel {
        SequenceLabel {
            genus_label: self.genus_label.clone(),
            instance_id: self.instance_id.clone(),
            has_differentia: self.has_differentia,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dimension: usize,
    pub sequences: Vec<SequenceEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn resolve(&self, entry: &SequenceEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    pub fn load_sequence(&self, entry: &SequenceEntry) -> Result<LabeledSequence> {
        let path = self.resolve(entry);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let (header, frames) =
            payload::read_payload(&mut BufReader::new(file)).map_err(|e| Error::MalformedPayload {
                path: path.clone(),
                reason: e.to_string(),
            })?;
        check_dimension(self.dimension, header.dimension as usize)?;
        if frames.is_empty() {
            return Err(Error::MalformedPayload {
                path,
                reason: "sequence has no frames".into(),
            });
        }
        Ok(LabeledSequence {
            sequence_id: entry.sequence_id.clone(),
            frames,
            label: entry.label(),
        })
    }

    /// Reads every payload referenced by the manifest.
    pub fn load_all(&self) -> Result<Dataset> {
        let sequences = self
            .sequences
            .iter()
            .map(|e| self.load_sequence(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            dimension: self.dimension,
            sequences,
        })
    }
}

fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Parses a manifest and validates every payload header against the declared
/// dimension. Frame data is read later by [`DatasetManifest::load_all`].
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let malformed = |reason: String| Error::MalformedManifest {
        path: path.to_path_buf(),
        reason,
    };
    let mut manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();

    if manifest.dimension == 0 {
        return Err(malformed("dimension must be positive".into()));
    }
    let mut ids = HashSet::new();
    let mut genus_of_instance: HashMap<&str, &str> = HashMap::new();
    for entry in &manifest.sequences {
        if !ids.insert(entry.sequence_id.as_str()) {
            return Err(malformed(format!("duplicate sequence id {}", entry.sequence_id)));
        }
        let genus = genus_of_instance
            .entry(entry.instance_id.as_str())
            .or_insert(entry.genus_label.as_str());
        if *genus != entry.genus_label {
            return Err(malformed(format!(
                "instance {} labeled with genera {} and {}",
                entry.instance_id, genus, entry.genus_label
            )));
        }
    }

    for entry in &manifest.sequences {
        let payload_path = manifest.resolve(entry);
        let file = File::open(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
        let header = payload::read_header(&mut BufReader::new(file)).map_err(|e| Error::MalformedPayload {
            path: payload_path.clone(),
            reason: e.to_string(),
        })?;
        check_dimension(manifest.dimension, header.dimension as usize)?;
    }
    Ok(manifest)
}

/// A fully loaded dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dimension: usize,
    pub sequences: Vec<LabeledSequence>,
}

impl Dataset {
    pub fn load(manifest_path: impl AsRef<Path>) -> Result<Self> {
        load_manifest(manifest_path)?.load_all()
    }

    pub fn labels(&self) -> BTreeMap<String, SequenceLabel> {
        self.sequences
            .iter()
            .map(|s| (s.sequence_id.clone(), s.label.clone()))
            .collect()
    }

    /// The manifest describing this dataset, with one `<sequence_id>.vsem`
    /// payload per sequence.
    pub fn manifest(&self) -> DatasetManifest {
        DatasetManifest {
            dimension: self.dimension,
            sequences: self
                .sequences
                .iter()
                .map(|s| SequenceEntry {
                    sequence_id: s.sequence_id.clone(),
                    genus_label: s.label.genus_label.clone(),
                    instance_id: s.label.instance_id.clone(),
                    has_differentia: s.label.has_differentia,
                    path: PathBuf::from(payload_file_name(&s.sequence_id)),
                })
                .collect(),
            base_dir: PathBuf::new(),
        }
    }

    /// Writes `manifest.json` and the payloads into `dir`, returning the path
    /// of the manifest.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = self.manifest();
        for (seq, entry) in self.sequences.iter().zip(&manifest.sequences) {
            if let Some(frame) = seq.frames.iter().find(|f| f.dim() != self.dimension) {
                return Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    found: frame.dim(),
                });
            }
            let path = dir.join(&entry.path);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            payload::write_payload(&mut w, &seq.frames)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))?;
        }
        let manifest_path = dir.join("manifest.json");
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        std::fs::write(&manifest_path, json).map_err(|e| Error::io(&manifest_path, e))?;
        manifest.base_dir = dir.to_path_buf();
        Ok(manifest_path)
    }
}

fn payload_file_name(sequence_id: &str) -> String {
    let safe: String = sequence_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.vsem")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dim: usize, n: usize) -> Dataset {
        let seq = |id: &str, genus: &str, inst: &str, diff: bool, base: f32| LabeledSequence {
            sequence_id: id.into(),
            frames: (0..n)
                .map(|k| FrameEmbedding::new(vec![base + k as f32 * 0.25; dim]).unwrap())
                .collect(),
            label: SequenceLabel {
                genus_label: genus.into(),
                instance_id: inst.into(),
                has_differentia: diff,
            },
        };
        Dataset {
            dimension: dim,
            sequences: vec![
                seq("a", "wallet", "wallet-1", true, 0.0),
                seq("b", "wallet", "wallet-2", false, 1.0),
                seq("c", "pod", "pod-1", false, -3.5),
            ],
        }
    }

    #[test]
    fn write_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let ds = tiny(3, 4);
        let path = ds.write(dir.path()).unwrap();
        let manifest = load_manifest(&path).unwrap();
        assert_eq!(manifest.sequences.len(), 3);
        assert_eq!(manifest.dimension, 3);
        assert_eq!(manifest.load_all().unwrap(), ds);
    }

    #[test]
    fn empty_manifest_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, r#"{"dimension": 4096, "sequences": []}"#).unwrap();
        let manifest = load_manifest(&path).unwrap();
        assert!(manifest.sequences.is_empty());
        assert_eq!(manifest.dimension, 4096);
    }

    #[test]
    fn dimension_mismatch_with_payload_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = tiny(256, 2).write(dir.path()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap().replace("256", "512");
        std::fs::write(&path, text).unwrap();
        match load_manifest(&path) {
            Err(Error::DimensionMismatch {
                expected: 512,
                found: 256,
            }) => {}
            other => panic!("expected dimension mismatch, got {other:?}"),
        }
    }

    #[test]
    fn missing_payload_and_malformed_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = tiny(2, 2).write(dir.path()).unwrap();
        std::fs::write(dir.path().join("b.vsem"), b"VSEM").unwrap();
        assert!(matches!(load_manifest(&path), Err(Error::MalformedPayload { .. })));
        std::fs::remove_file(dir.path().join("b.vsem")).unwrap();
        let err = load_manifest(&path).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.is_usage());
        assert!(load_manifest(dir.path().join("nope.json")).is_err());
    }

    #[test]
    fn instance_must_determine_genus() {
        let dir = tempfile::tempdir().unwrap();
        let mut ds = tiny(2, 2);
        ds.sequences[1].label.instance_id = "wallet-1".into();
        ds.sequences[2].label.instance_id = "wallet-1".into();
        let path = ds.write(dir.path()).unwrap();
        assert!(matches!(load_manifest(&path), Err(Error::MalformedManifest { .. })));
    }

    #[test]
    fn frame_embedding_rejects_non_finite() {
        assert!(FrameEmbedding::new(vec![]).is_err());
        assert!(FrameEmbedding::new(vec![1.0, f32::INFINITY]).is_err());
    }
}
