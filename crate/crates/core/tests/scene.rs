use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tabletop_core::scene::{load_scene, size_class, ColorName, SceneError};
use tabletop_core::testkit::random_scene;

proptest! {
    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let scene = random_scene(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let back = load_scene(scene.to_json().as_bytes()).unwrap();
        prop_assert_eq!(back, scene);
    }

    #[test]
    fn size_class_ignores_object_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = random_scene(&mut rng, 12);
        let mut shuffled = scene.clone();
        shuffled.objects.shuffle(&mut rng);
        for obj in &scene.objects {
            let moved = shuffled.object(&obj.id).unwrap();
            prop_assert_eq!(size_class(obj, &scene), size_class(moved, &shuffled));
        }
    }
}

#[test]
fn every_color_name_round_trips() {
    for c in ColorName::ALL {
        assert_eq!(c.as_str().parse::<ColorName>().unwrap(), c);
    }
    assert!("Red".parse::<ColorName>().is_err());
    assert!("magenta".parse::<ColorName>().is_err());
}

#[test]
fn scenario_scenes_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/scenes");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let scene = load_scene(&std::fs::read(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            Some(scene.id.as_str()),
            path.file_stem().and_then(|s| s.to_str())
        );
        count += 1;
    }
    assert!(count >= 9);
}

#[test]
fn errors_name_the_offending_field() {
    let text = r#"{"id":"s","table_bounds":{"min":[0,0],"max":[1,1]},
        "objects":[{"id":"cup1","category":"cup","color":"mauve","position":[0.5,0.5,0.05],
        "extent":[0.1,0.1,0.1],"base_detectability":0.9}]}"#;
    match load_scene(text.as_bytes()) {
        Err(e @ SceneError::Invariant { .. }) => assert_eq!(e.location(), "cup1.color"),
        other => panic!("unexpected {other:?}"),
    }
}
