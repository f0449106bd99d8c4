//! Simulated supervision from ground-truth labels.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::SequenceLabel;
use crate::error::{Error, Result};
use crate::memory::ObjectId;
use crate::perception::Encounter;

/// Number of leading iterations that are always supervised.
pub const DEFAULT_BOOTSTRAP: u64 = 5;

/// Anything that can answer the learner's two questions about a stored
/// object and a new encounter.
pub trait Supervisor {
    /// Whether answers are available at this iteration. Called exactly once
    /// per processed encounter.
    fn available(&mut self, iteration: u64) -> bool;

    fn same_genus(&self, object: ObjectId, encounter: &Encounter) -> Result<bool>;

    fn different(&self, object: ObjectId, encounter: &Encounter) -> Result<bool>;

    /// Notification that `encounter` founded a new object.
    fn object_created(&mut self, _object: ObjectId, _encounter: &Encounter) -> Result<()> {
        Ok(())
    }
}

/// A noiseless user who is present with probability `alpha` after the
/// bootstrap iterations. Objects are tagged with the labels of the encounter
/// that created them and are never retagged.
#[derive(Debug, Clone)]
pub struct SupervisionSource {
    alpha: f64,
    bootstrap: u64,
    rng: ChaCha8Rng,
    labels: Arc<HashMap<String, SequenceLabel>>,
    tags: HashMap<ObjectId, SequenceLabel>,
}

impl SupervisionSource {
    pub fn new(alpha: f64, seed: u64, labels: Arc<HashMap<String, SequenceLabel>>) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(SupervisionSource {
            alpha,
            bootstrap: DEFAULT_BOOTSTRAP,
            rng: ChaCha8Rng::seed_from_u64(seed),
            labels,
            tags: HashMap::new(),
        })
    }

    pub fn with_bootstrap(mut self, bootstrap: u64) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn label(&self, sequence_id: &str) -> Result<&SequenceLabel> {
        self.labels
            .get(sequence_id)
            .ok_or_else(|| Error::Unlabeled(format!("sequence {sequence_id}")))
    }

    pub fn tag(&self, object: ObjectId) -> Result<&SequenceLabel> {
        self.tags
            .get(&object)
            .ok_or_else(|| Error::Unlabeled(format!("object {object}")))
    }

    pub fn tags(&self) -> &HashMap<ObjectId, SequenceLabel> {
        &self.tags
    }

    pub fn answer_same_genus(&self, object: ObjectId, encounter: &Encounter) -> Result<bool> {
        Ok(self.tag(object)?.genus_label == self.label(encounter.sequence_id())?.genus_label)
    }

    pub fn answer_different(&self, object: ObjectId, encounter: &Encounter) -> Result<bool> {
        Ok(self.tag(object)?.instance_id != self.label(encounter.sequence_id())?.instance_id)
    }

    pub fn tag_object(&mut self, object: ObjectId, sequence_id: &str) -> Result<()> {
        let label = self.label(sequence_id)?.clone();
        if self.tags.contains_key(&object) {
            return Err(Error::Contract(format!("object {object} is already tagged")));
        }
        self.tags.insert(object, label);
        Ok(())
    }
}

impl Supervisor for SupervisionSource {
    fn available(&mut self, iteration: u64) -> bool {
        iteration < self.bootstrap || self.rng.random_bool(self.alpha)
    }

    fn same_genus(&self, object: ObjectId, encounter: &Encounter) -> Result<bool> {
        self.answer_same_genus(object, encounter)
    }

    fn different(&self, object: ObjectId, encounter: &Encounter) -> Result<bool> {
        self.answer_different(object, encounter)
    }

    fn object_created(&mut self, object: ObjectId, encounter: &Encounter) -> Result<()> {
        self.tag_object(object, encounter.sequence_id())
    }
}
