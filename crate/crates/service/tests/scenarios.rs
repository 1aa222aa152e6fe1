mod common;

use common::{library, scenarios_dir};
use tabletop_service::scenarios::{load_scenarios, parse_scenarios, run_scenarios, GoldenMode};

#[test]
fn corpus_passes_against_goldens() {
    let golden = scenarios_dir().join("golden");
    for file in ["controller_paths.json", "extras.json"] {
        let entries = load_scenarios(&scenarios_dir().join(file)).unwrap();
        let report = run_scenarios(&entries, &library(), Some(&golden), GoldenMode::Compare);
        assert!(report.passed(), "{report}");
        assert_eq!(report.results.len(), 6);
    }
}

#[test]
fn wrong_expectation_is_reported() {
    let entries = parse_scenarios(
        r#"[{"scene": "single_cup", "utterance": "give me the cup", "answers": [],
             "expected_outcome": "resolved:book_1"}]"#,
    )
    .unwrap();
    let report = run_scenarios(&entries, &library(), None, GoldenMode::Ignore);
    assert!(!report.passed());
    let text = report.to_string();
    assert!(text.contains("FAIL 00_single_cup"), "{text}");
    assert!(
        text.contains("expected outcome resolved:book_1, got resolved:cup_red"),
        "{text}"
    );
}

#[test]
fn golden_mismatch_shows_a_diff() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("x.json"),
        "{\n  \"scene_id\": \"single_cup\"\n}\n",
    )
    .unwrap();
    let entries = parse_scenarios(
        r#"[{"name": "x", "scene": "single_cup", "utterance": "give me the cup",
             "expected_outcome": "resolved:cup_red"}]"#,
    )
    .unwrap();
    let report = run_scenarios(&entries, &library(), Some(dir.path()), GoldenMode::Compare);
    let text = report.to_string();
    assert!(!report.passed());
    assert!(text.contains("+  \"events\": ["), "{text}");

    let blessed = run_scenarios(&entries, &library(), Some(dir.path()), GoldenMode::Bless);
    assert!(blessed.passed());
    assert!(run_scenarios(&entries, &library(), Some(dir.path()), GoldenMode::Compare).passed());
}

#[test]
fn bad_entries_do_not_stop_the_rest() {
    let entries = parse_scenarios(
        r#"[{"scene": "single_cup"},
            {"scene": "nowhere", "utterance": "give me the cup", "expected_outcome": "question"},
            {"scene": "single_cup", "utterance": "give me the cup", "expected_outcome": "resolved:cup_red"}]"#,
    )
    .unwrap();
    let report = run_scenarios(&entries, &library(), None, GoldenMode::Ignore);
    let verdicts: Vec<bool> = report.results.iter().map(|r| r.passed()).collect();
    assert_eq!(verdicts, [false, false, true]);
    assert!(report.results[0].problems[0].starts_with("schema error"));
    assert_eq!(report.results[1].problems[0], "unknown scene nowhere");
}

#[test]
fn empty_list_is_an_empty_pass() {
    let report = run_scenarios(
        &parse_scenarios("[]").unwrap(),
        &library(),
        None,
        GoldenMode::Ignore,
    );
    assert!(report.passed());
    assert_eq!(report.to_string(), "0 scenarios, 0 passed, 0 failed\n");
}

#[test]
fn cli_exit_status_follows_the_report() {
    let bin = env!("CARGO_BIN_EXE_tabletop");
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let status = std::process::Command::new(bin)
        .args(["run", "--scenarios"])
        .arg(&empty)
        .output()
        .unwrap();
    assert!(status.status.success());

    let wrong = dir.path().join("wrong.json");
    std::fs::write(
        &wrong,
        r#"[{"scene": "single_cup", "utterance": "give me the cup", "expected_outcome": "failed:not_found"}]"#,
    )
    .unwrap();
    let out = std::process::Command::new(bin)
        .args(["run", "--scenarios"])
        .arg(&wrong)
        .arg("--scenes")
        .arg(scenarios_dir().join("scenes"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    let out = std::process::Command::new(bin)
        .args(["run", "--scenarios"])
        .arg(scenarios_dir().join("controller_paths.json"))
        .arg("--golden")
        .arg(scenarios_dir().join("golden"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn invalid_scene_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"id\": 3}").unwrap();
    let err = tabletop_service::SceneLibrary::load_dir(dir.path()).unwrap_err();
    assert!(err.to_string().contains("broken.json"), "{err}");
}
