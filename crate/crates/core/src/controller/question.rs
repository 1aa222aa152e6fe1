//! Clarification questions for ambiguous matches.

use serde::Serialize;

use crate::fuzzy::RelationName;
use crate::graph::KnowledgeGraph;
use crate::lexicon::normalize_category;
use crate::refexp::{AttrConstraint, RefExp, RelationConstraint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    /// Distinguishes candidates by color, size or shape (C-1).
    Attribute,
    /// Distinguishes candidates by a relation to a unique landmark (C-2).
    Spatial,
}

impl QuestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::Attribute => "attribute",
            QuestionKind::Spatial => "spatial",
        }
    }

    pub fn case(self) -> &'static str {
        match self {
            QuestionKind::Attribute => "C-1",
            QuestionKind::Spatial => "C-2",
        }
    }
}

/// The constraint an option adds when the user picks it.
#[derive(Debug, Clone, PartialEq)]
pub enum Choice {
    Attribute(AttrConstraint),
    Relation(RelationConstraint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub kind: QuestionKind,
    pub text: String,
    /// Option texts, each a valid answer on its own.
    pub options: Vec<String>,
    pub choices: Vec<Choice>,
}

/// Builds a question that separates `candidates` (ids in ascending order).
///
/// Attribute dimensions are tried in the order color, size, shape, skipping
/// those `refexp` already constrains; the first whose values differ yields
/// the question. Otherwise each candidate is described by its strongest
/// relation to a landmark whose category occurs once in the graph. Returns
/// `None` when neither works.
pub fn clarification_question(
    refexp: &RefExp,
    graph: &KnowledgeGraph,
    candidates: &[String],
    threshold: f64,
) -> Option<Question> {
    let nodes: Vec<usize> = candidates
        .iter()
        .filter_map(|id| graph.index_of(id))
        .collect();
    if nodes.len() < 2 {
        return None;
    }
    attribute_question(refexp, graph, &nodes)
        .or_else(|| spatial_question(refexp, graph, &nodes, threshold))
}

fn attribute_question(
    refexp: &RefExp,
    graph: &KnowledgeGraph,
    nodes: &[usize],
) -> Option<Question> {
    type ValueOf = fn(&KnowledgeGraph, usize) -> AttrConstraint;
    let dimensions: [(bool, ValueOf); 3] = [
        (refexp.attributes.color.is_none(), |g, n| {
            AttrConstraint::Color(g.nodes()[n].percept.color)
        }),
        (refexp.attributes.size.is_none(), |g, n| {
            AttrConstraint::Size(g.nodes()[n].size)
        }),
        (refexp.attributes.shape.is_none(), |g, n| {
            AttrConstraint::Shape(g.nodes()[n].shape.class)
        }),
    ];

    for (open, value_of) in dimensions {
        if !open {
            continue;
        }
        let mut distinct: Vec<AttrConstraint> = Vec::new();
        for &n in nodes {
            let v = value_of(graph, n);
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        if distinct.len() < 2 {
            continue;
        }
        let words: Vec<String> = distinct.iter().map(|v| v.word().to_string()).collect();
        let listed: Vec<String> = words.iter().map(|w| format!("the {w}")).collect();
        let text = format!(
            "do you mean {} {}?",
            join_alternatives(&listed),
            refexp.target_category
        );
        return Some(Question {
            kind: QuestionKind::Attribute,
            text,
            options: words,
            choices: distinct.into_iter().map(Choice::Attribute).collect(),
        });
    }
    None
}

/// The strongest `(relation, landmark)` pair for node `n`, scored as
/// `min(edge degree, landmark uniqueness)`. Landmarks are never candidates.
fn best_descriptor(
    graph: &KnowledgeGraph,
    n: usize,
    candidates: &[usize],
) -> Option<(RelationName, usize, f64)> {
    let mut best: Option<(RelationName, usize, f64)> = None;
    for rel in RelationName::ALL {
        for m in 0..graph.len() {
            if m == n || candidates.contains(&m) || !unique_category(graph, m) {
                continue;
            }
            let value = graph.degree(n, m, rel);
            if best.is_none_or(|(_, _, b)| value > b) {
                best = Some((rel, m, value));
            }
        }
    }
    best
}

fn unique_category(graph: &KnowledgeGraph, m: usize) -> bool {
    let category = normalize_category(&graph.nodes()[m].percept.category);
    graph
        .nodes()
        .iter()
        .filter(|node| normalize_category(&node.percept.category) == category)
        .count()
        == 1
}

fn spatial_question(
    refexp: &RefExp,
    graph: &KnowledgeGraph,
    nodes: &[usize],
    threshold: f64,
) -> Option<Question> {
    let mut descriptors: Vec<(RelationName, usize)> = Vec::with_capacity(nodes.len());
    for &n in nodes {
        let (rel, m, value) = best_descriptor(graph, n, nodes)?;
        // A descriptor below the match threshold would reject its own object.
        if value < threshold || value <= 0.0 || descriptors.contains(&(rel, m)) {
            return None;
        }
        descriptors.push((rel, m));
    }

    let landmark_noun = |m: usize| normalize_category(&graph.nodes()[m].percept.category);
    let mut phrases = Vec::with_capacity(descriptors.len());
    let mut options = Vec::with_capacity(descriptors.len());
    let mut choices = Vec::with_capacity(descriptors.len());
    for (i, &(rel, m)) in descriptors.iter().enumerate() {
        let tail = format!("{} the {}", rel.phrase(), landmark_noun(m));
        let head = if i == 0 {
            format!("the {}", refexp.target_category)
        } else {
            "the one".to_string()
        };
        phrases.push(format!("{head} {tail}"));
        options.push(format!("the one {tail}"));
        choices.push(Choice::Relation(RelationConstraint {
            relation: rel,
            landmark: RefExp::new(landmark_noun(m)),
        }));
    }

    let mut text = join_alternatives(&phrases);
    if let Some(first) = text.get(..1) {
        text = first.to_uppercase() + &text[1..];
    }
    text.push('?');
    Some(Question {
        kind: QuestionKind::Spatial,
        text,
        options,
        choices,
    })
}

/// "a or b"; "a, b or c".
fn join_alternatives(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [only] => only.clone(),
        [init @ .., last] => format!("{} or {}", init.join(", "), last),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternatives_join() {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(
            join_alternatives(&v(&["the blue", "the red"])),
            "the blue or the red"
        );
        assert_eq!(
            join_alternatives(&v(&["the blue", "the red", "the green"])),
            "the blue, the red or the green"
        );
    }
}
