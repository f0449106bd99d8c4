//! One interactive teaching session, independent of HTTP.
//!
//! A submitted encounter is perceived and prepared against the memory. If
//! the memory is empty it is stored at once; otherwise the session parks a
//! same-genus question about the retrieved object. A "yes" parks the
//! follow-up different-individual question; a "no" or the second answer
//! completes the iteration.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use vsem::{
    commit, export_hierarchy, snapshot, Dataset, Decision, Encounter, Feedback, FrameEmbedding, HierarchyView, Memory,
    ObjectId, PendingEncounter, PerceptionConfig, SourceSpan, VisualObject,
};

use crate::error::ApiError;

/// Visual objects shown per side of a question.
pub const PREVIEW_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    SameGenus,
    Different,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preview {
    pub centroid: Vec<f32>,
    pub source: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub kind: QueryKind,
    pub object_id: ObjectId,
    pub encounter_id: String,
    /// Object distance between the stored object and the encounter.
    pub distance: f64,
    pub predicted_same_genus: bool,
    pub predicted_different: bool,
    pub object_preview: Vec<Preview>,
    pub encounter_preview: Vec<Preview>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessingState {
    /// The iteration finished; `decision` is set.
    Added,
    /// A question is waiting; `query` is set.
    QueryPending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResponse {
    pub state: ProcessingState,
    pub decision: Option<Decision>,
    pub query: Option<Query>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub window: usize,
    pub stride: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        let p = PerceptionConfig::default();
        SessionConfig {
            window: p.window,
            stride: p.stride,
        }
    }
}

impl SessionConfig {
    pub fn perception(&self) -> PerceptionConfig {
        PerceptionConfig {
            window: self.window,
            stride: self.stride,
        }
    }
}

/// Where an encounter's frames come from.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EncounterSource {
    /// A sequence of the session's dataset, by id.
    Reference { sequence_ref: String },
    /// Frames as nested arrays.
    Frames { sequence_id: String, frames: Vec<Vec<f32>> },
    /// A binary frame payload, base64-encoded.
    Payload {
        sequence_id: String,
        payload_base64: String,
    },
}

#[derive(Debug)]
struct Parked {
    pending: PendingEncounter,
    kind: QueryKind,
}

#[derive(Debug)]
pub struct Session {
    config: SessionConfig,
    memory: Memory,
    dataset: Option<Arc<Dataset>>,
    parked: Option<Parked>,
}

impl Session {
    pub fn new(config: SessionConfig, dataset: Option<Arc<Dataset>>) -> Result<Self, ApiError> {
        Self::with_memory(config, dataset, Memory::new())
    }

    pub fn with_memory(config: SessionConfig, dataset: Option<Arc<Dataset>>, memory: Memory) -> Result<Self, ApiError> {
        config.perception().validate()?;
        Ok(Session {
            config,
            memory,
            dataset,
            parked: None,
        })
    }

    pub fn config(&self) -> SessionConfig {
        self.config
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        self.dataset.as_deref()
    }

    pub fn submit(&mut self, source: EncounterSource) -> Result<StepResponse, ApiError> {
        if self.parked.is_some() {
            return Err(ApiError::conflict("a query is pending; answer it before submitting"));
        }
        let encounter = self.perceive(source)?;
        let pending = PendingEncounter::prepare(&self.memory, encounter)?;
        if pending.retrieved().is_none() {
            let decision = commit(&mut self.memory, &pending, Feedback::Unavailable)?;
            return Ok(StepResponse {
                state: ProcessingState::Added,
                decision: Some(decision),
                query: None,
            });
        }
        self.parked = Some(Parked {
            pending,
            kind: QueryKind::SameGenus,
        });
        Ok(self.pending_response())
    }

    pub fn query(&self) -> Option<Query> {
        let parked = self.parked.as_ref()?;
        let retrieval = parked.pending.retrieved().expect("parked encounters have a retrieval");
        let encounter = parked.pending.encounter();
        let object = &self
            .memory
            .object(retrieval.object)
            .expect("retrieved object exists")
            .visual_objects;
        Some(Query {
            kind: parked.kind,
            object_id: retrieval.object,
            encounter_id: encounter.sequence_id().to_string(),
            distance: retrieval.distance,
            predicted_same_genus: parked.pending.predicted_same_genus(),
            predicted_different: parked.pending.predicted_different(),
            object_preview: closest(object, encounter.visual_objects()),
            encounter_preview: closest(encounter.visual_objects(), object),
        })
    }

    pub fn answer(&mut self, answer: bool, kind: Option<QueryKind>) -> Result<StepResponse, ApiError> {
        let parked = self
            .parked
            .as_mut()
            .ok_or_else(|| ApiError::conflict("no query is pending"))?;
        if let Some(kind) = kind {
            if kind != parked.kind {
                return Err(ApiError::conflict(format!(
                    "the pending query is {:?}, not {kind:?}",
                    parked.kind
                )));
            }
        }
        let feedback = match (parked.kind, answer) {
            (QueryKind::SameGenus, true) => {
                parked.kind = QueryKind::Different;
                return Ok(self.pending_response());
            }
            (QueryKind::SameGenus, false) => Feedback::Answered {
                same_genus: false,
                different: None,
            },
            (QueryKind::Different, different) => Feedback::Answered {
                same_genus: true,
                different: Some(different),
            },
        };
        let decision = commit(&mut self.memory, &parked.pending, feedback)?;
        self.parked = None;
        Ok(StepResponse {
            state: ProcessingState::Added,
            decision: Some(decision),
            query: None,
        })
    }

    pub fn hierarchy(&self) -> Result<HierarchyView, ApiError> {
        Ok(export_hierarchy(&self.memory, self.memory.theta())?)
    }

    pub fn snapshot(&self) -> String {
        snapshot::to_json(&self.memory)
    }

    fn pending_response(&self) -> StepResponse {
        StepResponse {
            state: ProcessingState::QueryPending,
            decision: None,
            query: self.query(),
        }
    }

    fn perceive(&self, source: EncounterSource) -> Result<Encounter, ApiError> {
        let perception = self.config.perception();
        match source {
            EncounterSource::Reference { sequence_ref } => {
                let dataset = self
                    .dataset
                    .as_ref()
                    .ok_or_else(|| ApiError::bad_request("this session has no dataset"))?;
                let seq = dataset
                    .sequences
                    .iter()
                    .find(|s| s.sequence_id == sequence_ref)
                    .ok_or_else(|| ApiError::not_found(format!("no sequence {sequence_ref} in the dataset")))?;
                Ok(perception.perceive(&seq.sequence_id, &seq.frames)?)
            }
            EncounterSource::Frames { sequence_id, frames } => {
                let frames = frames
                    .into_iter()
                    .map(FrameEmbedding::new)
                    .collect::<vsem::Result<Vec<_>>>()?;
                Ok(perception.perceive(&sequence_id, &frames)?)
            }
            EncounterSource::Payload {
                sequence_id,
                payload_base64,
            } => {
                use base64::Engine as _;
                let bytes = base64::engine::general_purpose::STANDARD
                    .decode(payload_base64.as_bytes())
                    .map_err(|e| ApiError::bad_request(format!("payload is not base64: {e}")))?;
                let frames = vsem::dataset::payload::decode(&bytes)
                    .map_err(|e| ApiError::bad_request(format!("malformed payload: {e}")))?;
                Ok(perception.perceive(&sequence_id, &frames)?)
            }
        }
    }
}

/// Up to [`PREVIEW_LEN`] visual objects of `side`, nearest to `other` first.
fn closest(side: &[VisualObject], other: &[VisualObject]) -> Vec<Preview> {
    let mut ranked: Vec<(f64, &VisualObject)> = side
        .iter()
        .map(|v| {
            let d = other
                .iter()
                .filter_map(|w| vsem::visual_object_distance(v, w).ok())
                .fold(f64::INFINITY, f64::min);
            (d, v)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked
        .into_iter()
        .take(PREVIEW_LEN)
        .map(|(_, v)| Preview {
            centroid: v.centroid.clone(),
            source: v.source.clone(),
        })
        .collect()
}
