use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tabletop_core::graph::build_graph;
use tabletop_core::grounder::{classify, node_scores, score_candidates, ConflictType, MatchScore};
use tabletop_core::perception::Viewpoint;
use tabletop_core::testkit::{all_percepts, checks, random_refexp, random_scene, CATEGORIES};

#[test]
fn scores_equal_brute_force() {
    checks::grounding_oracle(21, 1000).unwrap();
}

#[test]
fn scores_grow_with_perception() {
    checks::threshold_monotonicity(22, 100).unwrap();
}

#[test]
fn node_order_does_not_change_scores() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let scene = random_scene(&mut rng, 10);
        let vp = Viewpoint::new(30.0, 1.0, 1.2).unwrap();
        let percepts = all_percepts(&scene);
        let mut reversed = percepts.clone();
        reversed.reverse();
        let g1 = build_graph(&percepts, &vp, &scene.table_bounds);
        let g2 = build_graph(&reversed, &vp, &scene.table_bounds);
        let r = random_refexp(&mut rng, CATEGORIES, 2);
        assert_eq!(score_candidates(&r, &g1), score_candidates(&r, &g2));
        assert_eq!(node_scores(&r, &g1), node_scores(&r, &g2));
    }
}

fn scored(pairs: &[(&str, f64)]) -> Vec<MatchScore> {
    pairs
        .iter()
        .map(|(id, score)| MatchScore {
            percept_id: id.to_string(),
            score: *score,
            breakdown: Default::default(),
        })
        .collect()
}

#[test]
fn classification_by_count_above_threshold() {
    assert_eq!(classify(&[], 0.5), ConflictType::NoMatch);
    assert_eq!(
        classify(&scored(&[("a", 0.49)]), 0.5),
        ConflictType::NoMatch
    );
    assert_eq!(
        classify(&scored(&[("a", 0.5), ("b", 0.2)]), 0.5),
        ConflictType::Unique {
            percept_id: "a".into()
        }
    );
    let ambiguous = classify(&scored(&[("b", 0.9), ("a", 0.6), ("c", 0.1)]), 0.5);
    assert_eq!(ambiguous.label(), "T-2");
    assert_eq!(
        ambiguous.candidates(),
        vec!["a".to_string(), "b".to_string()]
    );
}
