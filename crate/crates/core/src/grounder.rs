//! Grounding of referring expressions against the knowledge graph.
//!
//! Constraint degrees combine with Gödel semantics: conjunction is `min`,
//! the choice of landmark object is `max`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::graph::KnowledgeGraph;
use crate::lexicon::normalize_category;
use crate::refexp::{render_np, RefExp};

pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchScore {
    pub percept_id: String,
    pub score: f64,
    /// Degree per constraint, keyed by a readable label.
    pub breakdown: BTreeMap<String, f64>,
}

/// Scores every node against `r`, best first (ties by id). Nodes scoring
/// zero are included.
pub fn score_candidates(r: &RefExp, g: &KnowledgeGraph) -> Vec<MatchScore> {
    let category = normalize_category(&r.target_category);
    let landmark_scores: Vec<Vec<f64>> = r
        .relations
        .iter()
        .map(|rel| node_scores(&rel.landmark, g))
        .collect();

    let mut out: Vec<MatchScore> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(n, node)| {
            let mut breakdown = BTreeMap::new();
            let mut put = |key: String, deg: f64| {
                let slot = breakdown.entry(key).or_insert(deg);
                *slot = slot.min(deg);
            };
            put(
                "category".into(),
                category_degree(&category, &node.percept.category),
            );
            for attr in r.attributes.iter() {
                let key = format!("{}:{}", attr_dimension(attr), attr.word());
                put(key, attribute_degree(attr, g, n));
            }
            for (rel, scores) in r.relations.iter().zip(&landmark_scores) {
                let key = format!("{}:{}", rel.relation, render_np(&rel.landmark));
                put(key, relation_degree(g, n, rel.relation, scores));
            }
            let score = breakdown.values().copied().fold(1.0, f64::min);
            MatchScore {
                percept_id: node.id().to_string(),
                score,
                breakdown,
            }
        })
        .collect();

    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.percept_id.cmp(&b.percept_id))
    });
    out
}

/// Score of every node (in graph order) against `r`.
pub fn node_scores(r: &RefExp, g: &KnowledgeGraph) -> Vec<f64> {
    let category = normalize_category(&r.target_category);
    let landmark_scores: Vec<Vec<f64>> = r
        .relations
        .iter()
        .map(|rel| node_scores(&rel.landmark, g))
        .collect();

    (0..g.len())
        .map(|n| {
            let mut score = category_degree(&category, &g.nodes()[n].percept.category);
            for attr in r.attributes.iter() {
                score = score.min(attribute_degree(attr, g, n));
            }
            for (rel, scores) in r.relations.iter().zip(&landmark_scores) {
                score = score.min(relation_degree(g, n, rel.relation, scores));
            }
            score
        })
        .collect()
}

fn category_degree(wanted: &str, category: &str) -> f64 {
    if normalize_category(category) == wanted {
        1.0
    } else {
        0.0
    }
}

fn attr_dimension(attr: crate::refexp::AttrConstraint) -> &'static str {
    use crate::refexp::AttrConstraint::*;
    match attr {
        Color(_) => "color",
        Size(_) => "size",
        Shape(_) => "shape",
    }
}

fn attribute_degree(attr: crate::refexp::AttrConstraint, g: &KnowledgeGraph, n: usize) -> f64 {
    use crate::refexp::AttrConstraint::*;
    let node = &g.nodes()[n];
    match attr {
        Color(c) => f64::from(u8::from(node.percept.color == c)),
        Size(s) => f64::from(u8::from(node.size == s)),
        Shape(s) => node.shape.membership(s),
    }
}

/// `max` over landmarks `m != n` of `min(landmark score, r(n, m))`.
fn relation_degree(
    g: &KnowledgeGraph,
    n: usize,
    relation: crate::fuzzy::RelationName,
    landmark_scores: &[f64],
) -> f64 {
    landmark_scores
        .iter()
        .enumerate()
        .filter(|(m, _)| *m != n)
        .map(|(m, &s)| s.min(g.degree(n, m, relation)))
        .fold(0.0, f64::max)
}

/// Outcome of conflict detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConflictType {
    /// Nothing matches (T-1).
    NoMatch,
    /// Two or more objects match (T-2); ids in ascending order.
    Ambiguous { candidates: Vec<String> },
    /// Exactly one object matches (T-3).
    Unique { percept_id: String },
}

impl ConflictType {
    pub fn label(&self) -> &'static str {
        match self {
            ConflictType::NoMatch => "T-1",
            ConflictType::Ambiguous { .. } => "T-2",
            ConflictType::Unique { .. } => "T-3",
        }
    }

    /// Ids scoring at or above the threshold.
    pub fn candidates(&self) -> Vec<String> {
        match self {
            ConflictType::NoMatch => Vec::new(),
            ConflictType::Ambiguous { candidates } => candidates.clone(),
            ConflictType::Unique { percept_id } => vec![percept_id.clone()],
        }
    }
}

impl fmt::Display for ConflictType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Partitions scores at `threshold` into no match, unique or ambiguous.
pub fn classify(scores: &[MatchScore], threshold: f64) -> ConflictType {
    let mut candidates: Vec<String> = scores
        .iter()
        .filter(|s| s.score >= threshold)
        .map(|s| s.percept_id.clone())
        .collect();
    candidates.sort();
    match candidates.len() {
        0 => ConflictType::NoMatch,
        1 => ConflictType::Unique {
            percept_id: candidates.remove(0),
        },
        _ => ConflictType::Ambiguous { candidates },
    }
}
