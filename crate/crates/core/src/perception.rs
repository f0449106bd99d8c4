//! Sliding-window segmentation of a frame sequence into visual objects.

use serde::{Deserialize, Serialize};

use crate::dataset::FrameEmbedding;
use crate::error::{Error, Result};

/// Provenance of a visual object: an inclusive frame span of one sequence.
///
/// Two visual objects are the same element of an object's set exactly when
/// their sources are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub sequence_id: String,
    pub start: usize,
    pub end: usize,
}

/// Mean embedding of a contiguous run of frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualObject {
    pub centroid: Vec<f32>,
    pub source: SourceSpan,
}

impl VisualObject {
    pub fn dim(&self) -> usize {
        self.centroid.len()
    }
}

/// The visual objects extracted from one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encounter {
    sequence_id: String,
    visual_objects: Vec<VisualObject>,
}

impl Encounter {
    pub fn new(sequence_id: impl Into<String>, visual_objects: Vec<VisualObject>) -> Result<Self> {
        let sequence_id = sequence_id.into();
        if visual_objects.is_empty() {
            return Err(Error::Empty("encounter"));
        }
        if let Some(vo) = visual_objects.iter().find(|v| v.source.sequence_id != sequence_id) {
            return Err(Error::InvalidArgument(format!(
                "visual object from {} in encounter {}",
                vo.source.sequence_id, sequence_id
            )));
        }
        let dim = visual_objects[0].dim();
        if let Some(vo) = visual_objects.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vo.dim(),
            });
        }
        Ok(Encounter {
            sequence_id,
            visual_objects,
        })
    }

    pub fn sequence_id(&self) -> &str {
        &self.sequence_id
    }

    pub fn visual_objects(&self) -> &[VisualObject] {
        &self.visual_objects
    }

    pub fn dim(&self) -> usize {
        self.visual_objects[0].dim()
    }

    pub fn into_visual_objects(self) -> Vec<VisualObject> {
        self.visual_objects
    }
}

/// Window and stride of the moving average, in frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerceptionConfig {
    pub window: usize,
    pub stride: usize,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        PerceptionConfig { window: 50, stride: 15 }
    }
}

impl PerceptionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument("window and stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn perceive(&self, sequence_id: &str, frames: &[FrameEmbedding]) -> Result<Encounter> {
        perceive(sequence_id, frames, self.window, self.stride)
    }
}

/// Number of visual objects produced for `n` frames.
pub fn window_count(n: usize, window: usize, stride: usize) -> usize {
    if n >= window {
        (n - window) / stride + 1
    } else {
        1
    }
}

/// Averages frames over windows of `window` frames taken every `stride`
/// frames. A sequence shorter than the window yields a single visual object
/// covering all of it.
pub fn perceive(sequence_id: &str, frames: &[FrameEmbedding], window: usize, stride: usize) -> Result<Encounter> {
    if frames.is_empty() {
        return Err(Error::Empty("frame sequence"));
    }
    PerceptionConfig { window, stride }.validate()?;
    let n = frames.len();
    let dim = frames[0].dim();
    if let Some(f) = frames.iter().find(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: f.dim(),
        });
    }

    let visual_objects = (0..window_count(n, window, stride))
        .map(|k| {
            let start = k * stride;
            let end = (start + window - 1).min(n - 1);
            let mut sum = vec![0.0f64; dim];
            for frame in &frames[start..=end] {
                for (acc, v) in sum.iter_mut().zip(frame.as_slice()) {
                    *acc += f64::from(*v);
                }
            }
            let len = (end - start + 1) as f64;
            VisualObject {
                centroid: sum.into_iter().map(|s| (s / len) as f32).collect(),
                source: SourceSpan {
                    sequence_id: sequence_id.to_string(),
                    start,
                    end,
                },
            }
        })
        .collect();
    Encounter::new(sequence_id, visual_objects)
}
