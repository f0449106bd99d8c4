//! One iteration of hierarchy construction: retrieve the most similar stored
//! object, ask whether it shares the encounter's genus and whether it is a
//! different individual, then create, link or merge accordingly and refresh
//! the threshold.
//!
//! The iteration is split in two so that an interactive front end can wait
//! for a human between the phases: [`PendingEncounter::prepare`] computes the
//! retrieval and the model's own predictions from the current memory, and
//! [`commit`] applies the answers (or the predictions, when nobody answered).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{Memory, ObjectId};
use crate::oracle::Supervisor;
use crate::perception::Encounter;
use crate::similarity::set_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalKind {
    /// Nearest object under the threshold.
    WithinThreshold,
    /// No object under the threshold; the object whose genus set is nearest.
    NearestGenus,
    /// No object under the threshold and no genus sets yet.
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Retrieval {
    pub object: ObjectId,
    /// Object distance between the retrieved object and the encounter.
    pub distance: f64,
    pub kind: RetrievalKind,
}

/// Picks the object to ask about: the nearest object within `theta` if any,
/// otherwise the owner of the nearest non-empty genus set, otherwise the
/// nearest object overall. Ties go to the smaller id.
pub fn get_most_similar_object(memory: &Memory, encounter: &Encounter, theta: f64) -> Result<Option<Retrieval>> {
    let mut distances = Vec::with_capacity(memory.len());
    for object in memory.objects() {
        distances.push((
            object.id,
            set_distance(&object.visual_objects, encounter.visual_objects())?,
        ));
    }
    let nearest = |candidates: &mut dyn Iterator<Item = (ObjectId, f64)>| {
        candidates.fold(None, |best: Option<(ObjectId, f64)>, (id, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((id, d)),
        })
    };

    if let Some((object, distance)) = nearest(&mut distances.iter().copied().filter(|(_, d)| *d < theta)) {
        return Ok(Some(Retrieval {
            object,
            distance,
            kind: RetrievalKind::WithinThreshold,
        }));
    }

    let mut genus_distances = Vec::new();
    for (id, _) in &distances {
        let genus = memory.genus_of(*id, theta)?;
        if !genus.is_empty() {
            genus_distances.push((*id, set_distance(genus, encounter.visual_objects())?));
        }
    }
    let object_distance = |id: ObjectId| distances.iter().find(|(o, _)| *o == id).map(|(_, d)| *d).unwrap();
    if let Some((object, _)) = nearest(&mut genus_distances.into_iter()) {
        return Ok(Some(Retrieval {
            object,
            distance: object_distance(object),
            kind: RetrievalKind::NearestGenus,
        }));
    }
    Ok(
        nearest(&mut distances.iter().copied()).map(|(object, distance)| Retrieval {
            object,
            distance,
            kind: RetrievalKind::Nearest,
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    NewObject,
    NewObjectSameGenus,
    MergedIntoExisting,
}

/// Outcome of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub kind: DecisionKind,
    /// The retrieved object, whenever memory was non-empty. Always present
    /// for `NewObjectSameGenus` and `MergedIntoExisting`.
    pub matched_object: Option<ObjectId>,
    /// Object now holding the encounter's visual objects.
    pub object_id: ObjectId,
    /// Model predictions made before any answer was applied.
    pub predicted_same_genus: bool,
    pub predicted_different: bool,
    /// Whether a supervisor answered this iteration's questions.
    pub supervised: bool,
    /// Threshold after this iteration's update.
    pub theta: f64,
}

/// Answers for one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feedback {
    /// Nobody answered; the model's predictions drive the update.
    Unavailable,
    /// `different` is required when `same_genus` is true and ignored
    /// otherwise.
    Answered { same_genus: bool, different: Option<bool> },
}

/// An encounter whose retrieval and predictions are computed, waiting for
/// feedback.
#[derive(Debug, Clone)]
pub struct PendingEncounter {
    encounter: Encounter,
    retrieved: Option<Retrieval>,
    predicted_same_genus: bool,
    predicted_different: bool,
    iteration: u64,
}

impl PendingEncounter {
    pub fn prepare(memory: &Memory, encounter: Encounter) -> Result<Self> {
        if let Some(first) = memory.objects().next() {
            let dim = first.visual_objects[0].dim();
            if encounter.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: encounter.dim(),
                });
            }
        }
        let theta = memory.theta();
        let retrieved = get_most_similar_object(memory, &encounter, theta)?;
        let (predicted_same_genus, predicted_different) = match &retrieved {
            Some(r) if r.distance < theta => (true, memory.different(r.object, &encounter, theta)?),
            _ => (false, false),
        };
        Ok(PendingEncounter {
            encounter,
            retrieved,
            predicted_same_genus,
            predicted_different,
            iteration: memory.iteration(),
        })
    }

    pub fn encounter(&self) -> &Encounter {
        &self.encounter
    }

    pub fn retrieved(&self) -> Option<&Retrieval> {
        self.retrieved.as_ref()
    }

    pub fn predicted_same_genus(&self) -> bool {
        self.predicted_same_genus
    }

    pub fn predicted_different(&self) -> bool {
        self.predicted_different
    }
}

/// Applies feedback to memory and advances the iteration counter.
///
/// Every answered same-genus question adds its object distance and answer to
/// the supervision store; the threshold is then recomputed once.
pub fn commit(memory: &mut Memory, pending: &PendingEncounter, feedback: Feedback) -> Result<Decision> {
    if pending.iteration != memory.iteration() {
        return Err(Error::Contract(format!(
            "encounter prepared at iteration {} committed at {}",
            pending.iteration,
            memory.iteration()
        )));
    }
    let encounter = &pending.encounter;
    let (kind, object_id, supervised) = match pending.retrieved {
        None => (DecisionKind::NewObject, memory.add_object(encounter), false),
        Some(r) => {
            let (same_genus, different, supervised) = match feedback {
                Feedback::Unavailable => (pending.predicted_same_genus, Some(pending.predicted_different), false),
                Feedback::Answered { same_genus, different } => (same_genus, different, true),
            };
            if same_genus {
                // Validate before touching memory so a bad answer leaves no trace.
                different
                    .ok_or_else(|| Error::InvalidArgument("a same-genus answer needs a different answer".into()))?;
            }
            if supervised {
                memory.supervision_mut().record(r.distance, same_genus)?;
            }
            match (same_genus, different) {
                (false, _) => (DecisionKind::NewObject, memory.add_object(encounter), supervised),
                (true, Some(true)) => {
                    let id = memory.add_object(encounter);
                    memory.record_same_genus_edge(id, r.object)?;
                    (DecisionKind::NewObjectSameGenus, id, supervised)
                }
                (true, _) => {
                    memory.update_object(r.object, encounter)?;
                    (DecisionKind::MergedIntoExisting, r.object, supervised)
                }
            }
        }
    };
    let theta = memory.supervision_mut().update_theta();
    memory.advance_iteration();
    Ok(Decision {
        kind,
        matched_object: pending.retrieved.map(|r| r.object),
        object_id,
        predicted_same_genus: pending.predicted_same_genus,
        predicted_different: pending.predicted_different,
        supervised,
        theta,
    })
}

/// Runs one full iteration against a supervisor.
pub fn process_encounter<S: Supervisor + ?Sized>(
    memory: &mut Memory,
    encounter: Encounter,
    supervisor: &mut S,
) -> Result<Decision> {
    let pending = PendingEncounter::prepare(memory, encounter)?;
    let available = supervisor.available(memory.iteration());
    let feedback = match pending.retrieved {
        Some(r) if available => {
            let same_genus = supervisor.same_genus(r.object, &pending.encounter)?;
            let different = if same_genus {
                Some(supervisor.different(r.object, &pending.encounter)?)
            } else {
                None
            };
            Feedback::Answered { same_genus, different }
        }
        _ => Feedback::Unavailable,
    };
    let decision = commit(memory, &pending, feedback)?;
    if decision.kind != DecisionKind::MergedIntoExisting {
        supervisor.object_created(decision.object_id, &pending.encounter)?;
    }
    Ok(decision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::{SourceSpan, VisualObject};

    fn enc(seq: &str, points: &[f32]) -> Encounter {
        Encounter::new(
            seq,
            points
                .iter()
                .enumerate()
                .map(|(i, x)| VisualObject {
                    centroid: vec![*x, 0.0],
                    source: SourceSpan {
                        sequence_id: seq.into(),
                        start: i,
                        end: i,
                    },
                })
                .collect(),
        )
        .unwrap()
    }

    /// Answers from a fixed script; always available.
    struct Script {
        same_genus: bool,
        different: bool,
        asked: usize,
    }

    impl Supervisor for Script {
        fn available(&mut self, _iteration: u64) -> bool {
            true
        }
        fn same_genus(&self, _: ObjectId, _: &Encounter) -> Result<bool> {
            Ok(self.same_genus)
        }
        fn different(&self, _: ObjectId, _: &Encounter) -> Result<bool> {
            Ok(self.different)
        }
        fn object_created(&mut self, _: ObjectId, _: &Encounter) -> Result<()> {
            self.asked += 1;
            Ok(())
        }
    }

    #[test]
    fn empty_memory_creates() {
        let mut m = Memory::new();
        assert!(get_most_similar_object(&m, &enc("a", &[0.0]), 1.0).unwrap().is_none());
        let mut s = Script {
            same_genus: true,
            different: false,
            asked: 0,
        };
        let d = process_encounter(&mut m, enc("a", &[0.0]), &mut s).unwrap();
        assert_eq!(d.kind, DecisionKind::NewObject);
        assert!(!d.supervised);
        assert_eq!(d.matched_object, None);
        assert_eq!(m.len(), 1);
        assert_eq!(m.iteration(), 1);
        assert!(m.supervision().is_empty());
        assert_eq!(s.asked, 1);
    }

    #[test]
    fn merge_and_new_same_genus() {
        let mut m = Memory::new();
        let mut s = Script {
            same_genus: true,
            different: false,
            asked: 0,
        };
        process_encounter(&mut m, enc("a", &[0.0, 1.0]), &mut s).unwrap();
        let d = process_encounter(&mut m, enc("b", &[0.0, 1.0]), &mut s).unwrap();
        assert_eq!(d.kind, DecisionKind::MergedIntoExisting);
        assert_eq!(d.object_id, ObjectId(0));
        assert!(d.supervised);
        assert_eq!(m.object(ObjectId(0)).unwrap().len(), 4);
        assert_eq!(m.supervision().len(), 1);
        // one positive pair at distance 0: theta sits past it
        assert_eq!(m.theta(), 1.0);

        s.different = true;
        let d = process_encounter(&mut m, enc("c", &[0.0, 5.0]), &mut s).unwrap();
        assert_eq!(d.kind, DecisionKind::NewObjectSameGenus);
        assert_eq!(m.neighbors(ObjectId(0)), vec![d.object_id]);
        assert_eq!(m.supervision().len(), 2);
    }

    #[test]
    fn under_threshold_beats_nearer_genus() {
        // A is within theta; B is out of range but owns a genus set that
        // would otherwise be the closest match.
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", &[2.0]));
        let b = m.add_object(&enc("b", &[10.0, 3.5]));
        let c = m.add_object(&enc("c", &[10.2]));
        m.record_same_genus_edge(b, c).unwrap();
        let e = enc("e", &[0.0]);
        // distances: a = 2.0, b = 3.5, c = 10.2
        let r = get_most_similar_object(&m, &e, 2.5).unwrap().unwrap();
        assert_eq!((r.object, r.kind), (a, RetrievalKind::WithinThreshold));
        assert_eq!(r.distance, 2.0);

        // With theta 1.0 nothing qualifies; genus(b) = {10.0}, genus(c) =
        // {10.2}, so b's genus is nearer even though a is the nearest object.
        let r = get_most_similar_object(&m, &e, 1.0).unwrap().unwrap();
        assert_eq!((r.object, r.kind), (b, RetrievalKind::NearestGenus));
        assert_eq!(r.distance, 3.5);

        // Without any genus sets the globally nearest object is returned.
        let r = get_most_similar_object(&m, &e, 0.1).unwrap().unwrap();
        assert_eq!((r.object, r.kind), (a, RetrievalKind::Nearest));
    }

    #[test]
    fn predictions_precede_feedback() {
        let mut m = Memory::new();
        m.add_object(&enc("a", &[0.0]));
        m.supervision_mut().record(0.0, true).unwrap();
        m.supervision_mut().update_theta();
        let pending = PendingEncounter::prepare(&m, enc("b", &[0.5])).unwrap();
        assert!(pending.predicted_same_genus());
        assert!(!pending.predicted_different());
        let d = commit(
            &mut m,
            &pending,
            Feedback::Answered {
                same_genus: false,
                different: None,
            },
        )
        .unwrap();
        assert_eq!(d.kind, DecisionKind::NewObject);
        assert!(d.predicted_same_genus);
        assert_eq!(m.supervision().len(), 2);
    }

    #[test]
    fn bad_feedback_leaves_memory_untouched() {
        let mut m = Memory::new();
        m.add_object(&enc("a", &[0.0]));
        let before = m.clone();
        let pending = PendingEncounter::prepare(&m, enc("b", &[0.5])).unwrap();
        let err = commit(
            &mut m,
            &pending,
            Feedback::Answered {
                same_genus: true,
                different: None,
            },
        );
        assert!(err.is_err());
        assert_eq!(m, before);

        m.advance_iteration();
        assert!(matches!(
            commit(&mut m, &pending, Feedback::Unavailable),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn unsupervised_uses_predictions() {
        struct Absent;
        impl Supervisor for Absent {
            fn available(&mut self, _: u64) -> bool {
                false
            }
            fn same_genus(&self, _: ObjectId, _: &Encounter) -> Result<bool> {
                unreachable!()
            }
            fn different(&self, _: ObjectId, _: &Encounter) -> Result<bool> {
                unreachable!()
            }
        }
        let mut m = Memory::new();
        m.add_object(&enc("a", &[0.0]));
        m.supervision_mut().record(0.0, true).unwrap();
        m.supervision_mut().update_theta();
        let d = process_encounter(&mut m, enc("b", &[0.5]), &mut Absent).unwrap();
        assert_eq!(d.kind, DecisionKind::MergedIntoExisting);
        assert!(!d.supervised);
        assert_eq!(m.supervision().len(), 1);
        let d = process_encounter(&mut m, enc("c", &[50.0]), &mut Absent).unwrap();
        assert_eq!(d.kind, DecisionKind::NewObject);
        assert_eq!(d.matched_object, Some(ObjectId(0)));
    }
}
