//! Seeded generators and brute-force oracles for the test suites.
//!
//! The oracles here deliberately avoid the production code paths they are
//! compared against.

pub mod checks;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fuzzy::{RelationName, ShapeName};
use crate::graph::KnowledgeGraph;
use crate::lexicon::normalize_category;
use crate::perception::Percept;
use crate::refexp::{RefExp, RelationConstraint};
use crate::scene::{size_class, ColorName, Rect, Scene, SceneObject, SizeClass};

pub const CATEGORIES: &[&str] = &["cup", "book", "banana", "plate", "phone", "teapot"];
/// Nouns for parser round trips; includes one that is also a color word.
pub const NOUNS: &[&str] = &[
    "cup", "book", "banana", "plate", "phone", "teapot", "laptop", "orange", "bottle", "apple",
];

pub fn table() -> Rect {
    Rect {
        min: [-0.5, 0.2],
        max: [0.5, 1.0],
    }
}

/// A valid scene with up to `max_objects` objects (at most 12), one per
/// cell of a 4 x 3 grid so footprints never overlap.
pub fn random_scene<R: Rng>(rng: &mut R, max_objects: usize) -> Scene {
    let bounds = table();
    let (cols, rows) = (4usize, 3usize);
    let cell_w = bounds.width() / cols as f64;
    let cell_d = bounds.depth() / rows as f64;

    let count = rng.gen_range(1..=max_objects.clamp(1, cols * rows));
    let mut cells: Vec<usize> = (0..cols * rows).collect();
    cells.shuffle(rng);

    let objects = cells[..count]
        .iter()
        .enumerate()
        .map(|(i, &cell)| {
            let (cx, cy) = (cell % cols, cell / cols);
            let extent = [
                rng.gen_range(0.03..0.2),
                rng.gen_range(0.03..0.2),
                rng.gen_range(0.01..0.25),
            ];
            let x0 = bounds.min[0] + cx as f64 * cell_w;
            let y0 = bounds.min[1] + cy as f64 * cell_d;
            let x = x0 + extent[0] / 2.0 + rng.gen_range(0.0..(cell_w - extent[0]).max(1e-6));
            let y = y0 + extent[1] / 2.0 + rng.gen_range(0.0..(cell_d - extent[1]).max(1e-6));
            SceneObject {
                id: format!("obj{i:02}"),
                category: CATEGORIES.choose(rng).unwrap().to_string(),
                color: *ColorName::ALL.choose(rng).unwrap(),
                position: [x, y, extent[2] / 2.0],
                extent,
                base_detectability: rng.gen_range(0.0..=1.0),
            }
        })
        .collect();
    Scene::new("random", bounds, objects).expect("generated scene is valid")
}

/// Every object of `scene` as a percept, bypassing detection.
pub fn all_percepts(scene: &Scene) -> Vec<Percept> {
    scene
        .objects
        .iter()
        .map(|o| Percept {
            object_id: o.id.clone(),
            category: o.category.clone(),
            color: o.color,
            position: o.position,
            extent: o.extent,
            size: size_class(o, scene),
            confidence: o.base_detectability,
        })
        .collect()
}

fn random_attributes<R: Rng>(rng: &mut R, r: &mut RefExp) {
    if rng.gen_bool(0.35) {
        r.attributes.color = Some(*ColorName::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.25) {
        r.attributes.size = Some(*SizeClass::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.25) {
        r.attributes.shape = Some(*ShapeName::ALL.choose(rng).unwrap());
    }
}

/// A referring expression of the shape the parser produces: up to two
/// top-level relations, at most one per landmark, nesting depth at most
/// `max_depth`.
pub fn random_refexp<R: Rng>(rng: &mut R, nouns: &[&str], max_depth: usize) -> RefExp {
    fn go<R: Rng>(rng: &mut R, nouns: &[&str], depth_left: usize, max_relations: usize) -> RefExp {
        let mut r = RefExp::new(*nouns.choose(rng).unwrap());
        random_attributes(rng, &mut r);
        if depth_left > 0 {
            let count = rng.gen_range(0..=max_relations);
            for _ in 0..count {
                let relation = *RelationName::ALL.choose(rng).unwrap();
                let landmark = go(rng, nouns, depth_left - 1, 1);
                r.relations.push(RelationConstraint { relation, landmark });
            }
        }
        r
    }
    go(rng, nouns, max_depth, 2)
}

/// Brute-force score of node `n`: enumerates every assignment of graph
/// nodes to the relation slots of `r` and takes the best conjunction.
pub fn brute_force_score(r: &RefExp, g: &KnowledgeGraph, n: usize) -> f64 {
    // Flatten the tree: slot i has a parent slot (None = the root node), a
    // relation and the landmark expression.
    struct Slot<'a> {
        parent: Option<usize>,
        relation: RelationName,
        landmark: &'a RefExp,
    }
    fn collect<'a>(r: &'a RefExp, parent: Option<usize>, out: &mut Vec<Slot<'a>>) {
        for rel in &r.relations {
            out.push(Slot {
                parent,
                relation: rel.relation,
                landmark: &rel.landmark,
            });
            let me = out.len() - 1;
            collect(&rel.landmark, Some(me), out);
        }
    }
    let mut slots = Vec::new();
    collect(r, None, &mut slots);

    let local = |e: &RefExp, m: usize| -> f64 {
        let node = &g.nodes()[m];
        let mut d: f64 = if normalize_category(&node.percept.category)
            == normalize_category(&e.target_category)
        {
            1.0
        } else {
            0.0
        };
        if let Some(c) = e.attributes.color {
            d = d.min(if node.percept.color == c { 1.0 } else { 0.0 });
        }
        if let Some(s) = e.attributes.size {
            d = d.min(if node.size == s { 1.0 } else { 0.0 });
        }
        if let Some(s) = e.attributes.shape {
            d = d.min(node.shape.membership(s));
        }
        d
    };

    let root = local(r, n);
    if slots.is_empty() {
        return root;
    }

    let size = g.len();
    let k = slots.len();
    let mut assignment = vec![0usize; k];
    let mut best = 0.0f64;
    loop {
        let mut value = root;
        let mut valid = true;
        for (i, slot) in slots.iter().enumerate() {
            let parent_node = slot.parent.map_or(n, |p| assignment[p]);
            let m = assignment[i];
            if m == parent_node {
                valid = false;
                break;
            }
            value = value
                .min(g.degree(parent_node, m, slot.relation))
                .min(local(slot.landmark, m));
        }
        if valid {
            best = best.max(value);
        }

        // Odometer increment.
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            assignment[i] += 1;
            if assignment[i] < size {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Answers that never narrow anything down.
pub const UNINFORMATIVE_ANSWERS: &[&str] = &[
    "i do not know",
    "the cup",
    "hmm",
    "whatever",
    "the one",
    "",
    "the thing",
    "yes",
    "what",
];
