//! Property checks shared by the unit-level suites and the acceptance run.
//!
//! Each check is seeded and returns a one-line summary, or the first
//! counterexample found.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    all_percepts, brute_force_score, random_refexp, random_scene, table, CATEGORIES, NOUNS,
};
use crate::controller::{run_script, DialogueSession, Event, SessionConfig, SessionState};
use crate::fuzzy::{relation_membership, shape_of_extent, RelationName, ShapeName};
use crate::graph::build_graph;
use crate::grounder::{node_scores, score_candidates};
use crate::parser::{parse, parse_answer, tokenize};
use crate::perception::{detect, DetectorConfig, Percept, Viewpoint};
use crate::refexp::render;
use crate::scene::{ColorName, Rect, SizeClass};

pub type CheckResult = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_viewpoint<R: Rng>(rng: &mut R) -> Viewpoint {
    Viewpoint::new(rng.gen_range(0.0..360.0), 1.0, 1.2).expect("valid viewpoint")
}

fn random_percept<R: Rng>(rng: &mut R, id: &str) -> Percept {
    let extent = [
        rng.gen_range(0.02..0.3),
        rng.gen_range(0.02..0.3),
        rng.gen_range(0.005..0.3),
    ];
    Percept {
        object_id: id.into(),
        category: "cup".into(),
        color: ColorName::Red,
        position: [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(0.2..1.0),
            extent[2] / 2.0
                + if rng.gen_bool(0.2) {
                    rng.gen_range(0.0..0.3)
                } else {
                    0.0
                },
        ],
        extent,
        size: SizeClass::Medium,
        confidence: 1.0,
    }
}

/// Places `a` on top of `b` with a random horizontal offset.
fn stack<R: Rng>(rng: &mut R, a: &mut Percept, b: &Percept) {
    a.position[0] = b.position[0] + rng.gen_range(-0.5..0.5) * b.extent[0];
    a.position[1] = b.position[1] + rng.gen_range(-0.5..0.5) * b.extent[1];
    a.position[2] = b.top() + a.extent[2] / 2.0 + rng.gen_range(0.0..0.012);
}

fn translated(p: &Percept, t: [f64; 2]) -> Percept {
    let mut q = p.clone();
    q.position[0] += t[0];
    q.position[1] += t[1];
    q
}

/// Membership range, exact antisymmetry of the directional pairs, exact
/// symmetry of `near`, `on` exclusivity, the 180 degree swap of opposite
/// relations and translation invariance, over `pairs` random object pairs.
pub fn fuzzy_relation_invariants(seed: u64, pairs: usize) -> CheckResult {
    let mut rng = rng(seed);
    let bounds = table();
    let opposites = [
        (RelationName::LeftOf, RelationName::RightOf),
        (RelationName::InFrontOf, RelationName::Behind),
    ];

    for trial in 0..pairs {
        let mut a = random_percept(&mut rng, "a");
        let b = random_percept(&mut rng, "b");
        if rng.gen_bool(0.25) {
            stack(&mut rng, &mut a, &b);
        }
        let vp = random_viewpoint(&mut rng);
        let deg = |x: &Percept, y: &Percept, r: RelationName, v: &Viewpoint, t: &Rect| {
            relation_membership(x, y, r, v, t).degree
        };
        let fail = |what: String| Err(format!("trial {trial}: {what}"));

        for r in RelationName::ALL {
            for (x, y) in [(&a, &b), (&b, &a)] {
                let d = deg(x, y, r, &vp, &bounds);
                if !(0.0..=1.0).contains(&d) {
                    return fail(format!("{} = {d} out of range", r.as_str()));
                }
            }
        }

        for (r, s) in opposites {
            let ab = deg(&a, &b, r, &vp, &bounds);
            let ba = deg(&b, &a, s, &vp, &bounds);
            if ab != ba {
                return fail(format!(
                    "{}(a,b) = {ab} but {}(b,a) = {ba}",
                    r.as_str(),
                    s.as_str()
                ));
            }
        }

        let (n_ab, n_ba) = (
            deg(&a, &b, RelationName::Near, &vp, &bounds),
            deg(&b, &a, RelationName::Near, &vp, &bounds),
        );
        if n_ab != n_ba {
            return fail(format!("near(a,b) = {n_ab} but near(b,a) = {n_ba}"));
        }

        let (on_ab, on_ba) = (
            deg(&a, &b, RelationName::On, &vp, &bounds),
            deg(&b, &a, RelationName::On, &vp, &bounds),
        );
        if on_ab > 0.0 && on_ba > 0.0 {
            return fail(format!("on(a,b) = {on_ab} and on(b,a) = {on_ba}"));
        }

        let turned = Viewpoint::new(vp.azimuth_deg + 180.0, vp.distance_m, vp.height_m).unwrap();
        for (r, s) in opposites {
            for (x, y) in [(&a, &b), (&b, &a)] {
                let here = deg(x, y, r, &vp, &bounds);
                let there = deg(x, y, s, &turned, &bounds);
                if (here - there).abs() > 1e-9 {
                    return fail(format!(
                        "{} = {here} at {} deg but {} = {there} after turning",
                        r.as_str(),
                        vp.azimuth_deg,
                        s.as_str()
                    ));
                }
            }
        }

        let t = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let moved_bounds = Rect {
            min: [bounds.min[0] + t[0], bounds.min[1] + t[1]],
            max: [bounds.max[0] + t[0], bounds.max[1] + t[1]],
        };
        let (ma, mb) = (translated(&a, t), translated(&b, t));
        for r in RelationName::ALL {
            let before = deg(&a, &b, r, &vp, &bounds);
            let after = deg(&ma, &mb, r, &vp, &moved_bounds);
            if (before - after).abs() > 1e-9 {
                return fail(format!(
                    "{} changed from {before} to {after} under translation",
                    r.as_str()
                ));
            }
        }
    }
    Ok(format!("{pairs} random pairs"))
}

/// Shape memberships lie in [0,1] and move by less than `1e-4` when any
/// extent component moves by `1e-7`, at `points` random extents.
pub fn shape_continuity(seed: u64, points: usize) -> CheckResult {
    const STEP: f64 = 1e-7;
    const TOLERANCE: f64 = 1e-4;
    let mut rng = rng(seed);
    for trial in 0..points {
        let extent = [
            rng.gen_range(0.01..0.4),
            rng.gen_range(0.01..0.4),
            rng.gen_range(0.005..0.4),
        ];
        let base = shape_of_extent(extent);
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut e = extent;
                e[axis] += sign * STEP;
                let moved = shape_of_extent(e);
                for s in ShapeName::ALL {
                    let (m0, m1) = (base.membership(s), moved.membership(s));
                    if !(0.0..=1.0).contains(&m0) {
                        return Err(format!(
                            "trial {trial}: {} = {m0} at {extent:?}",
                            s.as_str()
                        ));
                    }
                    if (m1 - m0).abs() > TOLERANCE {
                        return Err(format!(
                            "trial {trial}: {} jumps from {m0} to {m1} near {extent:?}",
                            s.as_str()
                        ));
                    }
                }
            }
        }
    }
    Ok(format!("{points} random extents"))
}

/// Production scores equal the brute-force evaluator exactly, on random
/// scenes of at most 10 objects and expressions of depth at most 2.
pub fn grounding_oracle(seed: u64, trials: usize) -> CheckResult {
    let mut rng = rng(seed);
    for trial in 0..trials {
        let scene = random_scene(&mut rng, 10);
        let vp = random_viewpoint(&mut rng);
        let graph = build_graph(&all_percepts(&scene), &vp, &scene.table_bounds);
        let refexp = random_refexp(&mut rng, CATEGORIES, 2);

        let fast = node_scores(&refexp, &graph);
        for (n, &score) in fast.iter().enumerate() {
            let slow = brute_force_score(&refexp, &graph, n);
            if score != slow {
                return Err(format!(
                    "trial {trial}: \"{}\" on {}: {score} vs brute force {slow}",
                    render(&refexp),
                    graph.nodes()[n].id()
                ));
            }
        }
        for m in score_candidates(&refexp, &graph) {
            let n = graph
                .index_of(&m.percept_id)
                .expect("scored node is in the graph");
            if m.score != fast[n] {
                return Err(format!(
                    "trial {trial}: ranked score differs for {}",
                    m.percept_id
                ));
            }
        }
    }
    Ok(format!("{trials} seeded trials, exact equality"))
}

/// Lowering any category's threshold never removes a detection nor lowers a
/// candidate score, over `scenes` random scenes.
pub fn threshold_monotonicity(seed: u64, scenes: usize) -> CheckResult {
    let mut rng = rng(seed);
    for trial in 0..scenes {
        let scene = random_scene(&mut rng, 12);
        let vp = random_viewpoint(&mut rng);
        let cfg = DetectorConfig {
            default_threshold: rng.gen_range(0.3..1.0),
            ..DetectorConfig::default()
        };
        let category = *CATEGORIES.choose(&mut rng).unwrap();
        let lowered = cfg.lower_threshold(category);

        let before = detect(&scene, &vp, &cfg);
        let after = detect(&scene, &vp, &lowered);
        let ids = |ps: &[Percept]| {
            ps.iter()
                .map(|p| p.object_id.clone())
                .collect::<BTreeSet<_>>()
        };
        let (b, a) = (ids(&before), ids(&after));
        if !b.is_subset(&a) {
            return Err(format!(
                "trial {trial}: lowering {category} lost {:?}",
                b.difference(&a)
            ));
        }

        let g0 = build_graph(&before, &vp, &scene.table_bounds);
        let g1 = build_graph(&after, &vp, &scene.table_bounds);
        for _ in 0..10 {
            let refexp = random_refexp(&mut rng, CATEGORIES, 2);
            let s1 = node_scores(&refexp, &g1);
            for (n, s0) in node_scores(&refexp, &g0).into_iter().enumerate() {
                let id = g0.nodes()[n].id();
                let m = g1.index_of(id).expect("detection kept");
                if s1[m] < s0 {
                    return Err(format!(
                        "trial {trial}: score of {id} for \"{}\" fell from {s0} to {}",
                        render(&refexp),
                        s1[m]
                    ));
                }
            }
        }
    }
    Ok(format!("{scenes} random scenes"))
}

/// `parse(render(r))` has the structure of `r` for `count` generated
/// expressions.
pub fn parser_round_trip(seed: u64, count: usize) -> CheckResult {
    let mut rng = rng(seed);
    for i in 0..count {
        let r = random_refexp(&mut rng, NOUNS, 2);
        let text = render(&r);
        match parse(&text) {
            Ok(back) if back.same_structure(&r) => {}
            Ok(back) => return Err(format!("#{i}: \"{text}\" parsed as \"{}\"", render(&back))),
            Err(e) => return Err(format!("#{i}: \"{text}\" failed: {e}")),
        }
    }
    Ok(format!("{count} generated expressions"))
}

const FUZZ_WORDS: &[&str] = &[
    "give", "me", "pick", "up", "the", "a", "an", "is", "that", "one", "left", "right", "of", "to",
    "in", "front", "behind", "near", "next", "on", "red", "blue", "orange", "big", "small",
    "round", "flat", "cup", "mug", "book", "teapot", "first", "ninth", "i", "mean", "yes", "um",
    ",", "?", "-", "", "x", "ü", "12", "cup-", "'s",
];

/// Neither parser panics on `count` random token strings, and every error
/// position lies within the input.
pub fn parser_totality(seed: u64, count: usize) -> CheckResult {
    let mut rng = rng(seed);
    for i in 0..count {
        let len = rng.gen_range(0..14);
        let words: Vec<&str> = (0..len)
            .map(|_| *FUZZ_WORDS.choose(&mut rng).unwrap())
            .collect();
        let sep = if rng.gen_bool(0.9) { " " } else { "" };
        let text = words.join(sep);
        let tokens = tokenize(&text).len();
        let result = catch_unwind(AssertUnwindSafe(|| (parse(&text), parse_answer(&text))));
        let Ok((full, answer)) = result else {
            return Err(format!("#{i}: panic on {text:?}"));
        };
        for e in [full.err(), answer.err()].into_iter().flatten() {
            if e.position > tokens {
                return Err(format!(
                    "#{i}: error position {} past {tokens} tokens in {text:?}",
                    e.position
                ));
            }
        }
    }
    Ok(format!("{count} random token strings"))
}

/// Candidate sets seen in a transcript, in order: the set under question,
/// then one set per narrowing.
pub fn candidate_history(session: &DialogueSession) -> Vec<BTreeSet<String>> {
    let mut sets = Vec::new();
    for entry in &session.transcript().events {
        match &entry.event {
            Event::ConflictDetected {
                conflict,
                candidates,
            } if conflict == "T-2" => sets.push(candidates.iter().cloned().collect()),
            Event::CandidatesNarrowed { candidates } => {
                sets.push(candidates.iter().cloned().collect())
            }
            _ => {}
        }
    }
    sets
}

/// Checks the caps and strict narrowing on a finished scripted session.
pub fn check_session(session: &DialogueSession) -> Result<(), String> {
    let cfg = session.config();
    if !matches!(
        session.state(),
        SessionState::Resolved | SessionState::Failed
    ) {
        return Err(format!("ended in state {}", session.state()));
    }
    if session.viewpoint_changes() > cfg.max_viewpoint_changes {
        return Err(format!("{} viewpoint changes", session.viewpoint_changes()));
    }
    if session.clarification_turns() > cfg.max_clarification_turns {
        return Err(format!(
            "{} clarification turns",
            session.clarification_turns()
        ));
    }
    let events = &session.transcript().events;
    let lowered = events
        .iter()
        .filter(|e| matches!(e.event, Event::ThresholdLowered { .. }))
        .count();
    if lowered > 1 {
        return Err(format!("threshold lowered {lowered} times"));
    }
    let history = candidate_history(session);
    for pair in history.windows(2) {
        if !(pair[1].is_subset(&pair[0]) && pair[1].len() < pair[0].len()) {
            return Err(format!(
                "candidates went from {:?} to {:?}",
                pair[0], pair[1]
            ));
        }
    }
    Ok(())
}

/// Random scenes where several objects of the target category compete, each
/// played against a user who answers at random from `answers`. Every session
/// must terminate within the caps with strictly shrinking candidate sets.
pub fn adversarial_termination(seed: u64, sessions: usize, answers: &[&str]) -> CheckResult {
    let mut rng = rng(seed);
    let cap = SessionConfig::default().max_clarification_turns as usize;
    let mut turns_seen = 0;
    for trial in 0..sessions {
        let mut scene = random_scene(&mut rng, 12);
        for obj in scene.objects.iter_mut() {
            if rng.gen_bool(0.6) {
                obj.category = "cup".into();
            }
        }
        let utterance = *[
            "give me the cup",
            "the cup",
            "pick up the red cup",
            "give me the book",
        ]
        .choose(&mut rng)
        .unwrap();
        // More answers than the caps allow, so only the session can stop.
        let script: Vec<String> = (0..cap * 4)
            .map(|_| answers.choose(&mut rng).unwrap().to_string())
            .collect();
        let session = run_script(&scene, utterance, &script, SessionConfig::default());
        check_session(&session).map_err(|e| format!("trial {trial} ({utterance}): {e}"))?;
        turns_seen += session.clarification_turns() as usize;
    }
    Ok(format!("{sessions} sessions, {turns_seen} answered turns"))
}
