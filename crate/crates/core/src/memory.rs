//! The cumulative memory of objects perceived so far.
//!
//! An object is the growing set of visual objects from every encounter merged
//! into it. Same-genus edges record supervision saying that two objects share
//! a genus while being different individuals; an object's genus set is the
//! part of it that resembles its linked peers.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::{Encounter, SourceSpan, VisualObject};
use crate::similarity::{check_theta, distance_unchecked, set_distance};
use crate::threshold::SupervisionStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryObject {
    pub id: ObjectId,
    pub visual_objects: Vec<VisualObject>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl MemoryObject {
    pub fn len(&self) -> usize {
        self.visual_objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visual_objects.is_empty()
    }
}

/// Unordered pair of distinct objects, stored smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SameGenusEdge(ObjectId, ObjectId);

impl SameGenusEdge {
    pub fn new(a: ObjectId, b: ObjectId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(SameGenusEdge(a, b)),
            std::cmp::Ordering::Greater => Ok(SameGenusEdge(b, a)),
            std::cmp::Ordering::Equal => Err(Error::SelfEdge(a)),
        }
    }

    pub fn endpoints(&self) -> (ObjectId, ObjectId) {
        (self.0, self.1)
    }

    pub fn other(&self, id: ObjectId) -> Option<ObjectId> {
        if self.0 == id {
            Some(self.1)
        } else if self.1 == id {
            Some(self.0)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Memory {
    objects: BTreeMap<ObjectId, MemoryObject>,
    edges: BTreeSet<SameGenusEdge>,
    supervision: SupervisionStore,
    iteration: u64,
    next_id: u64,
}

impl Memory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reassembles a memory from its serialized parts, checking every
    /// structural invariant.
    pub fn from_parts(
        objects: Vec<MemoryObject>,
        edges: Vec<SameGenusEdge>,
        supervision: SupervisionStore,
        iteration: u64,
        next_id: u64,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut dim = None;
        for object in objects {
            if object.visual_objects.is_empty() {
                return Err(Error::Contract(format!("object {} has no visual objects", object.id)));
            }
            let mut sources = HashSet::new();
            for vo in &object.visual_objects {
                let expected = *dim.get_or_insert(vo.dim());
                if vo.dim() != expected || expected == 0 {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: vo.dim(),
                    });
                }
                if !sources.insert(&vo.source) {
                    return Err(Error::Contract(format!("object {} repeats a visual object", object.id)));
                }
            }
            if object.id.0 >= next_id {
                return Err(Error::Contract(format!(
                    "object {} not below next id {next_id}",
                    object.id
                )));
            }
            let id = object.id;
            if map.insert(id, object).is_some() {
                return Err(Error::Contract(format!("duplicate object {id}")));
            }
        }
        let mut edge_set = BTreeSet::new();
        for edge in edges {
            let (a, b) = edge.endpoints();
            SameGenusEdge::new(a, b)?;
            for id in [a, b] {
                if !map.contains_key(&id) {
                    return Err(Error::UnknownObject(id));
                }
            }
            edge_set.insert(edge);
        }
        Ok(Memory {
            objects: map,
            edges: edge_set,
            supervision,
            iteration,
            next_id,
        })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Objects in increasing id order.
    pub fn objects(&self) -> impl Iterator<Item = &MemoryObject> {
        self.objects.values()
    }

    pub fn object(&self, id: ObjectId) -> Result<&MemoryObject> {
        self.objects.get(&id).ok_or(Error::UnknownObject(id))
    }

    pub fn edges(&self) -> impl Iterator<Item = &SameGenusEdge> {
        self.edges.iter()
    }

    pub fn supervision(&self) -> &SupervisionStore {
        &self.supervision
    }

    pub fn supervision_mut(&mut self) -> &mut SupervisionStore {
        &mut self.supervision
    }

    /// Current diversity threshold.
    pub fn theta(&self) -> f64 {
        self.supervision.theta()
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn advance_iteration(&mut self) {
        self.iteration += 1;
    }

    pub fn next_object_id(&self) -> u64 {
        self.next_id
    }

    /// Creates a new object from the encounter's visual objects.
    pub fn add_object(&mut self, encounter: &Encounter) -> ObjectId {
        let id = ObjectId(self.next_id);
        self.next_id += 1;
        let mut visual_objects = Vec::with_capacity(encounter.visual_objects().len());
        let mut seen = HashSet::new();
        for vo in encounter.visual_objects() {
            if seen.insert(&vo.source) {
                visual_objects.push(vo.clone());
            }
        }
        self.objects.insert(
            id,
            MemoryObject {
                id,
                visual_objects,
                created_at: self.iteration,
                updated_at: self.iteration,
            },
        );
        id
    }

    /// Merges the encounter into an existing object. Visual objects already
    /// present (same source span) are not duplicated.
    pub fn update_object(&mut self, id: ObjectId, encounter: &Encounter) -> Result<()> {
        let iteration = self.iteration;
        let object = self.objects.get_mut(&id).ok_or(Error::UnknownObject(id))?;
        let mut seen: HashSet<SourceSpan> = object.visual_objects.iter().map(|v| v.source.clone()).collect();
        for vo in encounter.visual_objects() {
            if seen.insert(vo.source.clone()) {
                object.visual_objects.push(vo.clone());
            }
        }
        object.updated_at = iteration;
        Ok(())
    }

    pub fn record_same_genus_edge(&mut self, a: ObjectId, b: ObjectId) -> Result<()> {
        let edge = SameGenusEdge::new(a, b)?;
        for id in [a, b] {
            if !self.objects.contains_key(&id) {
                return Err(Error::UnknownObject(id));
            }
        }
        self.edges.insert(edge);
        Ok(())
    }

    /// Objects linked to `id` by a same-genus edge, in increasing id order.
    pub fn neighbors(&self, id: ObjectId) -> Vec<ObjectId> {
        self.edges.iter().filter_map(|e| e.other(id)).collect()
    }

    /// The visual objects of `id` that are similar to some visual object of
    /// an object linked to it by a same-genus edge.
    pub fn genus_of(&self, id: ObjectId, theta: f64) -> Result<Vec<&VisualObject>> {
        check_theta(theta)?;
        let object = self.object(id)?;
        let peers: Vec<&VisualObject> = self
            .neighbors(id)
            .into_iter()
            .flat_map(|n| self.objects[&n].visual_objects.iter())
            .collect();
        if peers.is_empty() {
            return Ok(Vec::new());
        }
        Ok(object
            .visual_objects
            .iter()
            .filter(|v| {
                peers
                    .iter()
                    .any(|w| distance_unchecked(&v.centroid, &w.centroid) < theta)
            })
            .collect())
    }

    pub fn same_genus(&self, id: ObjectId, encounter: &Encounter, theta: f64) -> Result<bool> {
        check_theta(theta)?;
        let object = self.object(id)?;
        Ok(set_distance(&object.visual_objects, encounter.visual_objects())? < theta)
    }

    /// True when no visual object of `id` outside its genus set is similar to
    /// any visual object of the encounter. An encounter has no supervision
    /// history, so its genus set is empty.
    ///
    /// Only defined for pairs that share a genus; calling it otherwise is a
    /// contract error.
    pub fn different(&self, id: ObjectId, encounter: &Encounter, theta: f64) -> Result<bool> {
        if !self.same_genus(id, encounter, theta)? {
            return Err(Error::Contract(format!(
                "different({id}, {}) requires a shared genus",
                encounter.sequence_id()
            )));
        }
        let genus = self.genus_spans(id, theta)?;
        Ok(!self.non_genus_similar(id, &genus, encounter.visual_objects().iter(), theta))
    }

    /// `different` between two stored objects, excluding the genus sets of
    /// both sides.
    pub fn objects_different(&self, a: ObjectId, b: ObjectId, theta: f64) -> Result<bool> {
        check_theta(theta)?;
        let oa = self.object(a)?;
        let ob = self.object(b)?;
        if set_distance(&oa.visual_objects, &ob.visual_objects)? >= theta {
            return Err(Error::Contract(format!("different({a}, {b}) requires a shared genus")));
        }
        let genus_a = self.genus_spans(a, theta)?;
        let genus_b = self.genus_spans(b, theta)?;
        let rest_b = ob.visual_objects.iter().filter(|v| !genus_b.contains(&v.source));
        Ok(!self.non_genus_similar(a, &genus_a, rest_b, theta))
    }

    fn genus_spans(&self, id: ObjectId, theta: f64) -> Result<HashSet<&SourceSpan>> {
        Ok(self.genus_of(id, theta)?.into_iter().map(|v| &v.source).collect())
    }

    fn non_genus_similar<'a>(
        &self,
        id: ObjectId,
        genus: &HashSet<&SourceSpan>,
        others: impl Iterator<Item = &'a VisualObject>,
        theta: f64,
    ) -> bool {
        let own: Vec<&VisualObject> = self.objects[&id]
            .visual_objects
            .iter()
            .filter(|v| !genus.contains(&v.source))
            .collect();
        others.into_iter().any(|w| {
            own.iter()
                .any(|v| v.dim() == w.dim() && distance_unchecked(&v.centroid, &w.centroid) < theta)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vo(seq: &str, start: usize, values: &[f32]) -> VisualObject {
        VisualObject {
            centroid: values.to_vec(),
            source: SourceSpan {
                sequence_id: seq.into(),
                start,
                end: start + 1,
            },
        }
    }

    fn enc(seq: &str, points: &[&[f32]]) -> Encounter {
        Encounter::new(
            seq,
            points.iter().enumerate().map(|(i, p)| vo(seq, i * 10, p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn add_and_update() {
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", &[&[0.0], &[1.0], &[2.0]]));
        let b = m.add_object(&enc("b", &[&[5.0]]));
        assert_ne!(a, b);
        assert_eq!(m.object(a).unwrap().len(), 3);

        m.advance_iteration();
        let e = enc("c", &[&[7.0], &[8.0]]);
        m.update_object(a, &e).unwrap();
        assert_eq!(m.object(a).unwrap().len(), 5);
        assert_eq!(m.object(a).unwrap().updated_at, 1);
        assert_eq!(m.object(a).unwrap().created_at, 0);
        m.update_object(a, &e).unwrap();
        assert_eq!(m.object(a).unwrap().len(), 5);

        // Same span with a different centroid still counts as present.
        let dup = Encounter::new("a", vec![vo("a", 0, &[99.0])]).unwrap();
        m.update_object(a, &dup).unwrap();
        assert_eq!(m.object(a).unwrap().len(), 5);

        assert!(matches!(
            m.update_object(ObjectId(42), &e),
            Err(Error::UnknownObject(_))
        ));
    }

    #[test]
    fn edges() {
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", &[&[0.0]]));
        let b = m.add_object(&enc("b", &[&[1.0]]));
        m.record_same_genus_edge(b, a).unwrap();
        m.record_same_genus_edge(a, b).unwrap();
        assert_eq!(m.edges().count(), 1);
        assert!(matches!(m.record_same_genus_edge(a, a), Err(Error::SelfEdge(_))));
        assert!(matches!(
            m.record_same_genus_edge(a, ObjectId(9)),
            Err(Error::UnknownObject(_))
        ));
        assert_eq!(m.neighbors(a), vec![b]);
    }

    #[test]
    fn genus_of_requires_edges_and_positive_theta() {
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", &[&[0.0], &[10.0]]));
        let b = m.add_object(&enc("b", &[&[0.5], &[20.0]]));
        assert!(m.genus_of(a, 1.0).unwrap().is_empty());
        m.record_same_genus_edge(a, b).unwrap();
        let genus: Vec<_> = m.genus_of(a, 1.0).unwrap().into_iter().map(|v| v.centroid[0]).collect();
        assert_eq!(genus, vec![0.0]);
        assert!(m.genus_of(a, 0.0).unwrap().is_empty());
        assert!(m.genus_of(ObjectId(7), 1.0).is_err());
    }

    #[test]
    fn different_excludes_the_genus_side() {
        let mut m = Memory::new();
        // a = {genus view at 0, own view at 10}; b shares only the genus view.
        let a = m.add_object(&enc("a", &[&[0.0], &[10.0]]));
        let b = m.add_object(&enc("b", &[&[0.2], &[-10.0]]));
        let theta = 1.0;

        // An encounter matching only at the genus view.
        let e = enc("e", &[&[0.1], &[30.0]]);
        assert!(m.same_genus(a, &e, theta).unwrap());
        // Without an edge the genus view still counts, so not different.
        assert!(!m.different(a, &e, theta).unwrap());
        m.record_same_genus_edge(a, b).unwrap();
        assert!(m.different(a, &e, theta).unwrap());

        // Matching the own view makes it the same individual again.
        let e2 = enc("e2", &[&[0.1], &[10.3]]);
        assert!(!m.different(a, &e2, theta).unwrap());

        let far = enc("far", &[&[100.0]]);
        assert!(matches!(m.different(a, &far, theta), Err(Error::Contract(_))));
        assert!(m.objects_different(a, b, theta).unwrap());
    }
}
