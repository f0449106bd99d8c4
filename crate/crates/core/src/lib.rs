//! Incremental learning of object categories from short video encounters.
//!
//! An encounter (a sequence of frame embeddings) is summarized into visual
//! objects by sliding-window averaging. The learner retrieves the most similar
//! stored object, predicts whether the encounter shares its genus and whether
//! it is a different individual, and then, when a user is available, records
//! the answers as supervision for a single similarity threshold.
//!
//! ```
//! use std::sync::Arc;
//! use vsem::{generate_synthetic, process_encounter, Memory, PerceptionConfig, SupervisionSource, SyntheticConfig};
//!
//! let data = generate_synthetic(&SyntheticConfig { num_genera: 2, ..Default::default() }).unwrap();
//! let labels = Arc::new(data.labels().into_iter().collect());
//! let mut user = SupervisionSource::new(1.0, 7, labels).unwrap();
//! let mut memory = Memory::new();
//! for seq in &data.sequences {
//!     let encounter = PerceptionConfig::default().perceive(&seq.sequence_id, &seq.frames).unwrap();
//!     process_encounter(&mut memory, encounter, &mut user).unwrap();
//! }
//! assert!(memory.theta() > 0.0);
//! ```

pub mod dataset;
pub mod error;
pub mod harness;
pub mod hierarchy;
pub mod learner;
pub mod memory;
pub mod oracle;
pub mod perception;
pub mod similarity;
pub mod snapshot;
pub mod threshold;

pub use dataset::{
    generate_synthetic, load_manifest, Dataset, DatasetManifest, FrameEmbedding, LabeledSequence, SequenceEntry,
    SequenceLabel, SyntheticConfig,
};
pub use error::{Error, Result};
pub use harness::{run_experiment, AccuracyCurves, AccuracySummary, Experiment, RunConfig};
pub use hierarchy::{export_hierarchy, HierarchyNode, HierarchyView};
pub use learner::{
    commit, get_most_similar_object, process_encounter, Decision, DecisionKind, Feedback, PendingEncounter, Retrieval,
    RetrievalKind,
};
pub use memory::{Memory, MemoryObject, ObjectId, SameGenusEdge};
pub use oracle::{SupervisionSource, Supervisor};
pub use perception::{perceive, Encounter, PerceptionConfig, SourceSpan, VisualObject};
pub use similarity::{object_distance, object_similar, visual_object_distance, visual_object_similar};
pub use threshold::{optimal_threshold, SupervisionPair, SupervisionStore};
