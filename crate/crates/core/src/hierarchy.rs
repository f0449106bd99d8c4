//! Depth-2 view of a memory: `thing` at the root, one group per connected
//! component of same-genus edges, objects as leaves.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::memory::{Memory, ObjectId};
use crate::perception::SourceSpan;

pub const ROOT: &str = "thing";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyView {
    pub root: String,
    pub theta: f64,
    pub children: Vec<HierarchyNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HierarchyNode {
    /// Objects sharing a genus. `genus` is the union of the members' genus
    /// sets.
    Group {
        members: Vec<ObjectSummary>,
        genus: Vec<GenusElement>,
    },
    Object(ObjectSummary),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSummary {
    pub object_id: ObjectId,
    pub visual_objects: usize,
    pub genus_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusElement {
    pub object_id: ObjectId,
    pub source: SourceSpan,
}

impl HierarchyNode {
    pub fn object_ids(&self) -> Vec<ObjectId> {
        match self {
            HierarchyNode::Group { members, .. } => members.iter().map(|m| m.object_id).collect(),
            HierarchyNode::Object(s) => vec![s.object_id],
        }
    }
}

pub fn export_hierarchy(memory: &Memory, theta: f64) -> Result<HierarchyView> {
    let ids: Vec<ObjectId> = memory.objects().map(|o| o.id).collect();
    let index: BTreeMap<ObjectId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut components = UnionFind::<usize>::new(ids.len());
    for edge in memory.edges() {
        let (a, b) = edge.endpoints();
        components.union(index[&a], index[&b]);
    }

    // Keyed by the smallest member id, which is also the child order.
    let mut groups: BTreeMap<ObjectId, Vec<ObjectId>> = BTreeMap::new();
    let mut leader: BTreeMap<usize, ObjectId> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let root = components.find(i);
        let first = *leader.entry(root).or_insert(*id);
        groups.entry(first).or_default().push(*id);
    }

    let mut children = Vec::with_capacity(groups.len());
    for members in groups.into_values() {
        let mut summaries = Vec::with_capacity(members.len());
        let mut genus = Vec::new();
        for id in members.iter().copied() {
            let object = memory.object(id)?;
            let genus_set = memory.genus_of(id, theta)?;
            summaries.push(ObjectSummary {
                object_id: id,
                visual_objects: object.len(),
                genus_size: genus_set.len(),
            });
            genus.extend(genus_set.into_iter().map(|v| GenusElement {
                object_id: id,
                source: v.source.clone(),
            }));
        }
        children.push(if summaries.len() == 1 {
            HierarchyNode::Object(summaries.pop().unwrap())
        } else {
            HierarchyNode::Group {
                members: summaries,
                genus,
            }
        });
    }
    Ok(HierarchyView {
        root: ROOT.to_string(),
        theta,
        children,
    })
}

impl HierarchyView {
    /// Indented text rendering used by the command-line inspector.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} (theta = {})", self.root, self.theta).unwrap();
        for child in &self.children {
            match child {
                HierarchyNode::Group { members, genus } => {
                    let ids: Vec<String> = members.iter().map(|m| m.object_id.to_string()).collect();
                    writeln!(
                        out,
                        "  genus group [{}] (genus set: {} visual objects)",
                        ids.join(", "),
                        genus.len()
                    )
                    .unwrap();
                    for m in members {
                        writeln!(out, "    {}", leaf_line(m)).unwrap();
                    }
                }
                HierarchyNode::Object(m) => writeln!(out, "  {}", leaf_line(m)).unwrap(),
            }
        }
        out
    }
}

fn leaf_line(s: &ObjectSummary) -> String {
    format!(
        "object {} ({} visual objects, genus {})",
        s.object_id, s.visual_objects, s.genus_size
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::{Encounter, VisualObject};

    fn enc(seq: &str, x: f32) -> Encounter {
        Encounter::new(
            seq,
            vec![VisualObject {
                centroid: vec![x],
                source: SourceSpan {
                    sequence_id: seq.into(),
                    start: 0,
                    end: 0,
                },
            }],
        )
        .unwrap()
    }

    #[test]
    fn empty_memory_is_just_the_root() {
        let view = export_hierarchy(&Memory::new(), 0.0).unwrap();
        assert_eq!(view.root, "thing");
        assert!(view.children.is_empty());
        assert_eq!(view.render_tree().lines().count(), 1);
    }

    #[test]
    fn isolated_objects_are_leaves() {
        let mut m = Memory::new();
        for (i, x) in [0.0, 5.0, 9.0].into_iter().enumerate() {
            m.add_object(&enc(&format!("s{i}"), x));
        }
        let view = export_hierarchy(&m, 1.0).unwrap();
        assert_eq!(view.children.len(), 3);
        assert!(view.children.iter().all(|c| matches!(c, HierarchyNode::Object(_))));
    }

    #[test]
    fn one_edge_one_group() {
        let mut m = Memory::new();
        let a = m.add_object(&enc("a", 0.0));
        let b = m.add_object(&enc("b", 0.5));
        m.record_same_genus_edge(a, b).unwrap();
        let view = export_hierarchy(&m, 1.0).unwrap();
        assert_eq!(view.children.len(), 1);
        match &view.children[0] {
            HierarchyNode::Group { members, genus } => {
                assert_eq!(members.len(), 2);
                assert_eq!(genus.len(), 2);
            }
            other => panic!("expected group, got {other:?}"),
        }
        let json = serde_json::to_string(&view).unwrap();
        let back: HierarchyView = serde_json::from_str(&json).unwrap();
        assert_eq!(back, view);
        assert!(view.render_tree().contains("genus group [#0, #1]"));
    }
}
