//! Batch execution of scripted dialogues.
//!
//! A scenario file is a JSON array of
//! `{"scene", "utterance", "answers", "expected_outcome"}` objects with an
//! optional `"name"`. Expected outcomes use the compact form
//! `resolved:<id>`, `failed:<reason>` or `question`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use similar::TextDiff;
use tabletop_core::controller::{run_script, DialogueSession, SessionConfig};
use thiserror::Error;

use crate::store::SceneLibrary;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub scene: String,
    pub utterance: String,
    #[serde(default)]
    pub answers: Vec<String>,
    pub expected_outcome: String,
}

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: not a JSON array of scenarios: {message}")]
    NotAList { path: PathBuf, message: String },
}

/// One entry of the scenario file: either a scenario or the reason it is
/// malformed. A bad entry does not stop the others.
pub type Entry = Result<Scenario, String>;

pub fn load_scenarios(path: &Path) -> Result<Vec<Entry>, ScenarioFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenarios(&text).map_err(|message| ScenarioFileError::NotAList {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_scenarios(text: &str) -> Result<Vec<Entry>, String> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    Ok(values
        .into_iter()
        .map(|v| serde_json::from_value::<Scenario>(v).map_err(|e| format!("schema error: {e}")))
        .collect())
}

/// Scenario name used in reports and as the golden file stem.
pub fn scenario_name(index: usize, entry: &Entry) -> String {
    match entry {
        Ok(Scenario { name: Some(n), .. }) => n.clone(),
        Ok(s) => format!("{index:02}_{}", s.scene),
        Err(_) => format!("{index:02}"),
    }
}

/// Runs one scenario through the controller.
pub fn execute(scenario: &Scenario, scenes: &SceneLibrary) -> Result<DialogueSession, String> {
    let scene = scenes
        .get(&scenario.scene)
        .ok_or_else(|| format!("unknown scene {}", scenario.scene))?;
    Ok(run_script(
        &scene,
        &scenario.utterance,
        &scenario.answers,
        SessionConfig::default(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldenMode {
    /// Do not look at golden transcripts.
    Ignore,
    /// Compare byte for byte; a missing file fails.
    Compare,
    /// Write the produced transcripts.
    Bless,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub outcome: Option<String>,
    pub transcript: Option<String>,
    /// Empty on success.
    pub problems: Vec<String>,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub results: Vec<ScenarioResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(ScenarioResult::passed)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed()).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict} {} ({})",
                r.name,
                r.outcome.as_deref().unwrap_or("not run")
            )?;
            for p in &r.problems {
                for line in p.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        writeln!(
            f,
            "{} scenarios, {} passed, {} failed",
            self.results.len(),
            self.results.len() - self.failures(),
            self.failures()
        )
    }
}

fn unified_diff(expected: &str, actual: &str, name: &str) -> String {
    TextDiff::from_lines(expected, actual)
        .unified_diff()
        .context_radius(3)
        .header(&format!("golden/{name}.json"), "actual")
        .to_string()
}

/// Runs every entry, checking outcomes and optionally golden transcripts in
/// `golden_dir`.
pub fn run_scenarios(
    entries: &[Entry],
    scenes: &SceneLibrary,
    golden_dir: Option<&Path>,
    mode: GoldenMode,
) -> Report {
    let mut report = Report::default();
    for (i, entry) in entries.iter().enumerate() {
        let name = scenario_name(i, entry);
        let mut result = ScenarioResult {
            name: name.clone(),
            outcome: None,
            transcript: None,
            problems: Vec::new(),
        };
        let scenario = match entry {
            Ok(s) => s,
            Err(e) => {
                result.problems.push(e.clone());
                report.results.push(result);
                continue;
            }
        };
        let session = match execute(scenario, scenes) {
            Ok(s) => s,
            Err(e) => {
                result.problems.push(e);
                report.results.push(result);
                continue;
            }
        };

        let outcome = session.outcome().map(|o| o.summary()).unwrap_or_default();
        if scenario.expected_outcome != outcome {
            result.problems.push(format!(
                "expected outcome {}, got {outcome}",
                scenario.expected_outcome
            ));
        }
        let transcript = session.transcript().to_json();

        if let Some(dir) = golden_dir {
            let path = dir.join(format!("{name}.json"));
            match mode {
                GoldenMode::Ignore => {}
                GoldenMode::Bless => {
                    if let Err(e) = std::fs::write(&path, &transcript) {
                        result
                            .problems
                            .push(format!("cannot write {}: {e}", path.display()));
                    }
                }
                GoldenMode::Compare => match std::fs::read_to_string(&path) {
                    Ok(golden) if golden == transcript => {}
                    Ok(golden) => result.problems.push(format!(
                        "transcript differs from golden:\n{}",
                        unified_diff(&golden, &transcript, &name)
                    )),
                    Err(e) => result
                        .problems
                        .push(format!("cannot read golden {}: {e}", path.display())),
                },
            }
        }

        result.outcome = Some(outcome);
        result.transcript = Some(transcript);
        report.results.push(result);
    }
    report
}
