use tabletop_core::fuzzy::{relation_membership, shape_of_extent, RelationName, ShapeName};
use tabletop_core::perception::{Percept, Viewpoint};
use tabletop_core::scene::{ColorName, SizeClass};
use tabletop_core::testkit::{checks, table};

fn percept(position: [f64; 3], extent: [f64; 3]) -> Percept {
    Percept {
        object_id: "p".into(),
        category: "cup".into(),
        color: ColorName::Red,
        position,
        extent,
        size: SizeClass::Medium,
        confidence: 1.0,
    }
}

#[test]
fn relation_invariants_hold_on_random_pairs() {
    let summary = checks::fuzzy_relation_invariants(11, 5000).unwrap();
    assert!(summary.contains("5000"));
}

#[test]
fn shape_memberships_are_continuous() {
    checks::shape_continuity(12, 100).unwrap();
}

#[test]
fn turning_around_swaps_left_and_right() {
    let a = percept([-0.2, 0.6, 0.05], [0.05; 3]);
    let b = percept([0.1, 0.5, 0.05], [0.05; 3]);
    let front = Viewpoint::default();
    let back = Viewpoint::new(180.0, 1.0, 1.2).unwrap();
    let left = relation_membership(&a, &b, RelationName::LeftOf, &front, &table()).degree;
    let right = relation_membership(&a, &b, RelationName::RightOf, &back, &table()).degree;
    assert!(left > 0.8);
    assert!((left - right).abs() < 1e-12);
}

#[test]
fn coincident_centres_are_degenerate_not_directional() {
    let a = percept([0.0, 0.6, 0.05], [0.05; 3]);
    let b = percept([0.0005, 0.6, 0.15], [0.05; 3]);
    for r in RelationName::ALL.into_iter().filter(|r| r.is_directional()) {
        let m = relation_membership(&a, &b, r, &Viewpoint::default(), &table());
        assert!(m.degenerate);
        assert_eq!(m.degree, 0.0);
    }
}

#[test]
fn next_to_excludes_stacking() {
    let plate = percept([0.0, 0.6, 0.01], [0.2, 0.2, 0.02]);
    let cup = percept([0.0, 0.6, 0.07], [0.08, 0.08, 0.1]);
    let vp = Viewpoint::default();
    assert_eq!(
        relation_membership(&cup, &plate, RelationName::On, &vp, &table()).degree,
        1.0
    );
    assert_eq!(
        relation_membership(&cup, &plate, RelationName::Near, &vp, &table()).degree,
        1.0
    );
    assert_eq!(
        relation_membership(&cup, &plate, RelationName::NextTo, &vp, &table()).degree,
        0.0
    );
}

#[test]
fn shape_ramps_hit_their_breakpoints() {
    // e = 2: round and elongated both vanish.
    let s = shape_of_extent([0.2, 0.1, 0.1]);
    assert_eq!(s.membership(ShapeName::Round), 0.0);
    assert_eq!(s.membership(ShapeName::Elongated), 0.0);
    assert_eq!(s.membership(ShapeName::Boxy), 1.0);
    // e = 3 halfway up the elongation ramp.
    let s = shape_of_extent([0.3, 0.1, 0.1]);
    assert!((s.membership(ShapeName::Elongated) - 0.5).abs() < 1e-12);
}
