//! Knowledge graph of the perceived scene.
//!
//! Nodes are percepts annotated with size and shape; edges are dense: every
//! ordered pair of distinct nodes carries a degree for every relation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::fuzzy::{relation_membership, shape_class, RelationName, ShapeClass, ShapeName};
use crate::perception::{Percept, Viewpoint};
use crate::scene::{ColorName, Rect, SizeClass};

const RELATIONS: usize = RelationName::ALL.len();

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub percept: Percept,
    pub size: SizeClass,
    pub shape: ShapeClass,
}

impl GraphNode {
    pub fn id(&self) -> &str {
        &self.percept.object_id
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    nodes: Vec<GraphNode>,
    // degrees[(a * n + b) * RELATIONS + r]; the diagonal is unused.
    degrees: Vec<f64>,
    viewpoint: Viewpoint,
    bounds: Rect,
}

/// Builds the dense relation graph seen from `vp`. Nodes are ordered by id.
pub fn build_graph(percepts: &[Percept], vp: &Viewpoint, bounds: &Rect) -> KnowledgeGraph {
    let mut sorted = percepts.to_vec();
    sorted.sort_by(|a, b| a.object_id.cmp(&b.object_id));
    debug_assert!(
        sorted.windows(2).all(|w| w[0].object_id != w[1].object_id),
        "percept ids must be unique"
    );

    let nodes: Vec<GraphNode> = sorted
        .into_iter()
        .map(|percept| GraphNode {
            size: percept.size,
            shape: shape_class(&percept),
            percept,
        })
        .collect();

    let n = nodes.len();
    let mut degrees = vec![0.0; n * n * RELATIONS];
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            for r in RelationName::ALL {
                degrees[(i * n + j) * RELATIONS + r.index()] =
                    relation_membership(&a.percept, &b.percept, r, vp, bounds).degree;
            }
        }
    }

    KnowledgeGraph {
        nodes,
        degrees,
        viewpoint: *vp,
        bounds: *bounds,
    }
}

impl KnowledgeGraph {
    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn viewpoint(&self) -> &Viewpoint {
        &self.viewpoint
    }

    pub fn bounds(&self) -> &Rect {
        &self.bounds
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id().cmp(id)).ok()
    }

    /// Degree of `r(a, b)`. Self-pairs have degree 0.
    pub fn degree(&self, a: usize, b: usize, r: RelationName) -> f64 {
        if a == b {
            return 0.0;
        }
        let n = self.nodes.len();
        self.degrees[(a * n + b) * RELATIONS + r.index()]
    }

    pub fn edge_count(&self) -> usize {
        let n = self.nodes.len();
        n * n.saturating_sub(1) * RELATIONS
    }

    /// Every directed edge as `(a, b, relation, degree)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, RelationName, f64)> + '_ {
        let n = self.nodes.len();
        (0..n)
            .flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .flat_map(move |(a, b)| {
                RelationName::ALL
                    .into_iter()
                    .map(move |r| (a, b, r, self.degree(a, b, r)))
            })
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDump {
                    id: n.id().to_string(),
                    category: n.percept.category.clone(),
                    color: n.percept.color,
                    size: n.size,
                    shape: n.shape.class,
                    shape_memberships: n
                        .shape
                        .memberships()
                        .into_iter()
                        .map(|(s, m)| (s, round6(m)))
                        .collect(),
                    position: n.percept.position,
                    extent: n.percept.extent,
                    confidence: n.percept.confidence,
                })
                .collect(),
            edges: self
                .edges()
                .map(|(a, b, rel, deg)| EdgeDump {
                    a: self.nodes[a].id().to_string(),
                    b: self.nodes[b].id().to_string(),
                    rel,
                    deg: round6(deg),
                })
                .collect(),
        }
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// JSON form of the graph used by debug endpoints and golden files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphDump {
    pub nodes: Vec<NodeDump>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDump {
    pub id: String,
    pub category: String,
    pub color: ColorName,
    pub size: SizeClass,
    pub shape: ShapeName,
    pub shape_memberships: BTreeMap<ShapeName, f64>,
    pub position: [f64; 3],
    pub extent: [f64; 3],
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeDump {
    pub a: String,
    pub b: String,
    pub rel: RelationName,
    pub deg: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn percept(id: &str, x: f64, y: f64) -> Percept {
        Percept {
            object_id: id.into(),
            category: "cup".into(),
            color: ColorName::Blue,
            position: [x, y, 0.05],
            extent: [0.08, 0.08, 0.1],
            size: SizeClass::Medium,
            confidence: 0.9,
        }
    }

    fn bounds() -> Rect {
        Rect {
            min: [-0.5, 0.0],
            max: [0.5, 1.0],
        }
    }

    #[test]
    fn empty_graph() {
        let g = build_graph(&[], &Viewpoint::default(), &bounds());
        assert!(g.is_empty());
        assert_eq!(g.edges().count(), 0);
    }

    #[test]
    fn two_nodes_have_fourteen_entries() {
        let g = build_graph(
            &[percept("b", 0.2, 0.5), percept("a", -0.2, 0.5)],
            &Viewpoint::default(),
            &bounds(),
        );
        assert_eq!(g.len(), 2);
        assert_eq!(g.nodes()[0].id(), "a");
        assert_eq!(g.edges().count(), 14);
        assert_eq!(g.edge_count(), 14);
        assert_eq!(g.degree(0, 1, RelationName::LeftOf), 1.0);
        assert_eq!(g.index_of("b"), Some(1));
        assert_eq!(g.index_of("zzz"), None);
    }

    #[test]
    fn dump_rounds_to_six_decimals() {
        let g = build_graph(
            &[percept("a", 0.0, 0.5), percept("b", 0.1, 0.6)],
            &Viewpoint::default(),
            &bounds(),
        );
        let json = serde_json::to_value(g.dump()).unwrap();
        let edges = json["edges"].as_array().unwrap();
        assert_eq!(edges.len(), 14);
        for e in edges {
            let deg = e["deg"].as_f64().unwrap();
            assert_eq!(deg, (deg * 1e6).round() / 1e6);
        }
        assert_eq!(edges[0]["rel"], "left_of");
    }
}
