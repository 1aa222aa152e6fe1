use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::question::{clarification_question, Choice, Question};
use super::transcript::{ClockMode, Event, PerceptionAction, Transcript};
use crate::graph::{build_graph, KnowledgeGraph};
use crate::grounder::{classify, score_candidates, ConflictType, DEFAULT_MATCH_THRESHOLD};
use crate::lexicon::normalize_category;
use crate::parser::{parse, parse_answer, Answer, ParseError};
use crate::perception::{detect, next_viewpoint, DetectorConfig, Percept, Viewpoint};
use crate::refexp::{render, RefExp};
use crate::scene::Scene;

pub const MAX_VIEWPOINT_CHANGES: u32 = 7;
pub const MAX_CLARIFICATION_TURNS: u32 = 8;
pub const MAX_REASKS: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub match_threshold: f64,
    pub max_viewpoint_changes: u32,
    pub max_clarification_turns: u32,
    pub max_reasks: u32,
    pub initial_viewpoint: Viewpoint,
    pub detector: DetectorConfig,
    pub clock: ClockMode,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            match_threshold: DEFAULT_MATCH_THRESHOLD,
            max_viewpoint_changes: MAX_VIEWPOINT_CHANGES,
            max_clarification_turns: MAX_CLARIFICATION_TURNS,
            max_reasks: MAX_REASKS,
            initial_viewpoint: Viewpoint::default(),
            detector: DetectorConfig::default(),
            clock: ClockMode::Logical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    AwaitingInstruction,
    AwaitingClarification,
    Resolved,
    Failed,
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionState::AwaitingInstruction => "awaiting_instruction",
            SessionState::AwaitingClarification => "awaiting_clarification",
            SessionState::Resolved => "resolved",
            SessionState::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    /// The instruction did not parse; never treated as a conflict.
    Parse(ParseError),
    NotFound,
    Indistinguishable,
    TurnLimit,
    ContradictoryAnswer,
    UnparseableAnswer,
    UninformativeAnswer,
}

impl FailureReason {
    pub fn code(&self) -> &'static str {
        match self {
            FailureReason::Parse(_) => "parse_error",
            FailureReason::NotFound => "not_found",
            FailureReason::Indistinguishable => "indistinguishable",
            FailureReason::TurnLimit => "turn_limit",
            FailureReason::ContradictoryAnswer => "contradictory_answer",
            FailureReason::UnparseableAnswer => "unparseable_answer",
            FailureReason::UninformativeAnswer => "uninformative_answer",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::Parse(e) => write!(f, "parse_error: {e}"),
            other => f.write_str(other.code()),
        }
    }
}

/// Result of one controller turn.
#[derive(Debug, Clone, PartialEq)]
pub enum ResolutionOutcome {
    Resolved {
        target: String,
    },
    /// The robot asks the human; `question.kind` tells C-1 from C-2.
    Question(Question),
    Failed(FailureReason),
}

impl ResolutionOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            ResolutionOutcome::Resolved { .. } => "resolved",
            ResolutionOutcome::Question(_) => "question",
            ResolutionOutcome::Failed(_) => "failed",
        }
    }

    /// Compact form used by scenario scripts: `resolved:<id>`, `question`
    /// or `failed:<reason code>`.
    pub fn summary(&self) -> String {
        match self {
            ResolutionOutcome::Resolved { target } => format!("resolved:{target}"),
            ResolutionOutcome::Question(_) => "question".into(),
            ResolutionOutcome::Failed(r) => format!("failed:{}", r.code()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("session is {actual}, expected {expected}")]
    WrongState {
        expected: SessionState,
        actual: SessionState,
    },
    #[error("session is bound to scene {expected}, got {actual}")]
    SceneMismatch { expected: String, actual: String },
}

/// Multi-turn dialogue state for one instruction.
///
/// A session is a single-writer state machine: callers serialize operations
/// on it. All fields are owned, so sessions move freely between threads.
#[derive(Debug, Clone)]
pub struct DialogueSession {
    session_id: String,
    scene_id: String,
    config: SessionConfig,
    viewpoint: Viewpoint,
    detector: DetectorConfig,
    state: SessionState,
    active_refexp: Option<RefExp>,
    candidates: BTreeSet<String>,
    pending_question: Option<Question>,
    graph: Option<KnowledgeGraph>,
    percepts: Vec<Percept>,
    transcript: Transcript,
    viewpoint_changes: u32,
    clarification_turns: u32,
    reasks_used: u32,
    outcome: Option<ResolutionOutcome>,
}

impl DialogueSession {
    pub fn new(
        session_id: impl Into<String>,
        scene_id: impl Into<String>,
        config: SessionConfig,
    ) -> Self {
        let scene_id = scene_id.into();
        DialogueSession {
            session_id: session_id.into(),
            transcript: Transcript::new(scene_id.clone(), config.clock),
            scene_id,
            viewpoint: config.initial_viewpoint,
            detector: config.detector.clone(),
            config,
            state: SessionState::AwaitingInstruction,
            active_refexp: None,
            candidates: BTreeSet::new(),
            pending_question: None,
            graph: None,
            percepts: Vec::new(),
            viewpoint_changes: 0,
            clarification_turns: 0,
            reasks_used: 0,
            outcome: None,
        }
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn viewpoint(&self) -> &Viewpoint {
        &self.viewpoint
    }

    pub fn detector(&self) -> &DetectorConfig {
        &self.detector
    }

    pub fn active_refexp(&self) -> Option<&RefExp> {
        self.active_refexp.as_ref()
    }

    pub fn candidates(&self) -> &BTreeSet<String> {
        &self.candidates
    }

    pub fn pending_question(&self) -> Option<&Question> {
        self.pending_question.as_ref()
    }

    /// Graph from the most recent scan, if any.
    pub fn graph(&self) -> Option<&KnowledgeGraph> {
        self.graph.as_ref()
    }

    pub fn percepts(&self) -> &[Percept] {
        &self.percepts
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn viewpoint_changes(&self) -> u32 {
        self.viewpoint_changes
    }

    pub fn clarification_turns(&self) -> u32 {
        self.clarification_turns
    }

    /// Latest outcome returned by the session.
    pub fn outcome(&self) -> Option<&ResolutionOutcome> {
        self.outcome.as_ref()
    }

    /// Parses the instruction, runs conflict detection and, on a conflict,
    /// the matching resolution strategy.
    pub fn handle_utterance(
        &mut self,
        text: &str,
        scene: &Scene,
    ) -> Result<ResolutionOutcome, SessionError> {
        self.expect_state(SessionState::AwaitingInstruction)?;
        if scene.id != self.scene_id {
            return Err(SessionError::SceneMismatch {
                expected: self.scene_id.clone(),
                actual: scene.id.clone(),
            });
        }

        self.log(Event::Utterance { text: text.into() });
        let refexp = match parse(text) {
            Ok(r) => r,
            Err(error) => {
                self.log(Event::ParseFailed {
                    error: error.clone(),
                });
                return Ok(self.fail(FailureReason::Parse(error)));
            }
        };
        self.log(Event::Parsed {
            refexp: render(&refexp),
        });
        self.active_refexp = Some(refexp);

        match self.scan_and_classify(scene, PerceptionAction::InitialScan) {
            ConflictType::Unique { percept_id } => Ok(self.resolve(percept_id)),
            ConflictType::NoMatch => Ok(self.resolve_t1(scene)),
            ConflictType::Ambiguous { candidates } => Ok(self.resolve_t2(candidates)),
        }
    }

    /// Threshold lowering, then viewpoint changes at the lowered threshold.
    fn resolve_t1(&mut self, scene: &Scene) -> ResolutionOutcome {
        let category = self.target().target_category.clone();
        self.detector = self.detector.lower_threshold(&category);
        self.log(Event::ThresholdLowered {
            threshold: self.detector.threshold(&category),
            category: normalize_category(&category),
        });

        match self.scan_and_classify(scene, PerceptionAction::LoweredThresholdRescan) {
            ConflictType::Unique { percept_id } => {
                self.log_case("CR-1", "C-2", "unique match after lowering the threshold");
                return self.resolve(percept_id);
            }
            ConflictType::Ambiguous { candidates } => {
                self.log_case(
                    "CR-1",
                    "C-3",
                    "multiple matches after lowering the threshold",
                );
                return self.resolve_t2(candidates);
            }
            ConflictType::NoMatch => {}
        }

        while self.viewpoint_changes < self.config.max_viewpoint_changes {
            self.viewpoint = next_viewpoint(&self.viewpoint);
            self.viewpoint_changes += 1;
            self.log(Event::ViewpointChanged {
                azimuth_deg: self.viewpoint.azimuth_deg,
                changes_used: self.viewpoint_changes,
            });
            match self.scan_and_classify(scene, PerceptionAction::ViewpointRescan) {
                ConflictType::Unique { percept_id } => return self.resolve(percept_id),
                ConflictType::Ambiguous { candidates } => return self.resolve_t2(candidates),
                ConflictType::NoMatch => {}
            }
        }
        self.fail(FailureReason::NotFound)
    }

    /// Asks an attribute question, else a spatial one, else fails.
    fn resolve_t2(&mut self, candidates: Vec<String>) -> ResolutionOutcome {
        self.candidates = candidates.into_iter().collect();
        self.ask_next_question()
    }

    fn ask_next_question(&mut self) -> ResolutionOutcome {
        if self.clarification_turns >= self.config.max_clarification_turns {
            return self.fail(FailureReason::TurnLimit);
        }
        let candidates: Vec<String> = self.candidates.iter().cloned().collect();
        let question = {
            let graph = self.graph.as_ref().expect("graph exists after a scan");
            clarification_question(
                self.target(),
                graph,
                &candidates,
                self.config.match_threshold,
            )
        };
        match question {
            Some(q) => {
                self.reasks_used = 0;
                self.pose(q, false)
            }
            None => self.fail(FailureReason::Indistinguishable),
        }
    }

    fn pose(&mut self, question: Question, reask: bool) -> ResolutionOutcome {
        self.log(Event::Question {
            kind: question.kind.as_str().into(),
            case: question.kind.case().into(),
            text: question.text.clone(),
            options: question.options.clone(),
            reask,
        });
        self.state = SessionState::AwaitingClarification;
        self.pending_question = Some(question.clone());
        let outcome = ResolutionOutcome::Question(question);
        self.outcome = Some(outcome.clone());
        outcome
    }

    /// Applies the human's answer to the pending question.
    pub fn handle_answer(&mut self, text: &str) -> Result<ResolutionOutcome, SessionError> {
        self.expect_state(SessionState::AwaitingClarification)?;
        self.log(Event::Answer { text: text.into() });
        self.clarification_turns += 1;

        let answer = match parse_answer(text) {
            Ok(a) => a,
            Err(_) => return Ok(self.reject(FailureReason::UnparseableAnswer)),
        };
        let Some(augmented) = self.augment(&answer) else {
            return Ok(self.reject(FailureReason::ContradictoryAnswer));
        };

        let graph = self.graph.as_ref().expect("graph exists while clarifying");
        let remaining: BTreeSet<String> = score_candidates(&augmented, graph)
            .into_iter()
            .filter(|s| {
                s.score >= self.config.match_threshold && self.candidates.contains(&s.percept_id)
            })
            .map(|s| s.percept_id)
            .collect();

        if remaining.is_empty() {
            return Ok(self.reject(FailureReason::ContradictoryAnswer));
        }
        if remaining.len() == self.candidates.len() {
            return Ok(self.reject(FailureReason::UninformativeAnswer));
        }

        self.active_refexp = Some(augmented);
        self.candidates = remaining;
        self.pending_question = None;
        self.log(Event::CandidatesNarrowed {
            candidates: self.candidates.iter().cloned().collect(),
        });
        if self.candidates.len() == 1 {
            let target = self
                .candidates
                .iter()
                .next()
                .cloned()
                .expect("one candidate");
            return Ok(self.resolve(target));
        }
        Ok(self.ask_next_question())
    }

    /// Merges the answer into the active expression; `None` on a clash.
    fn augment(&self, answer: &Answer) -> Option<RefExp> {
        let mut refexp = self.target().clone();
        let question = self.pending_question.as_ref()?;
        match answer {
            Answer::Ordinal(i) => match question.choices.get(*i)? {
                Choice::Attribute(attr) => refexp.attributes.insert(*attr).ok()?,
                Choice::Relation(rel) => refexp.relations.push(rel.clone()),
            },
            Answer::Fragment(fragment) => {
                if let Some(category) = &fragment.category {
                    if normalize_category(category) != normalize_category(&refexp.target_category) {
                        return None;
                    }
                }
                for attr in fragment.attributes.iter() {
                    refexp.attributes.insert(attr).ok()?;
                }
                refexp.relations.extend(fragment.relations.iter().cloned());
            }
        }
        Some(refexp)
    }

    /// Re-asks the pending question once, then fails with `reason`.
    fn reject(&mut self, reason: FailureReason) -> ResolutionOutcome {
        self.log(Event::AnswerRejected {
            reason: reason.code().into(),
        });
        if self.reasks_used >= self.config.max_reasks {
            return self.fail(reason);
        }
        if self.clarification_turns >= self.config.max_clarification_turns {
            return self.fail(FailureReason::TurnLimit);
        }
        self.reasks_used += 1;
        let question = self
            .pending_question
            .clone()
            .expect("pending question while clarifying");
        self.pose(question, true)
    }

    fn scan_and_classify(&mut self, scene: &Scene, action: PerceptionAction) -> ConflictType {
        let percepts = detect(scene, &self.viewpoint, &self.detector);
        let graph = build_graph(&percepts, &self.viewpoint, &scene.table_bounds);
        let category = self.target().target_category.clone();
        self.log(Event::Perception {
            action,
            azimuth_deg: self.viewpoint.azimuth_deg,
            threshold: self.detector.threshold(&category),
            detected: percepts.iter().map(|p| p.object_id.clone()).collect(),
        });

        let scores = score_candidates(self.target(), &graph);
        let conflict = classify(&scores, self.config.match_threshold);
        self.log(Event::ConflictDetected {
            conflict: conflict.label().into(),
            candidates: conflict.candidates(),
        });
        self.percepts = percepts;
        self.graph = Some(graph);
        conflict
    }

    fn resolve(&mut self, target: String) -> ResolutionOutcome {
        self.log(Event::Outcome {
            status: "resolved".into(),
            target: Some(target.clone()),
            reason: None,
        });
        self.state = SessionState::Resolved;
        self.pending_question = None;
        self.candidates = BTreeSet::from([target.clone()]);
        let outcome = ResolutionOutcome::Resolved { target };
        self.outcome = Some(outcome.clone());
        outcome
    }

    fn fail(&mut self, reason: FailureReason) -> ResolutionOutcome {
        self.log(Event::Outcome {
            status: "failed".into(),
            target: None,
            reason: Some(reason.to_string()),
        });
        self.state = SessionState::Failed;
        self.pending_question = None;
        let outcome = ResolutionOutcome::Failed(reason);
        self.outcome = Some(outcome.clone());
        outcome
    }

    fn log(&mut self, event: Event) {
        self.transcript.push(event);
    }

    fn log_case(&mut self, strategy: &str, case: &str, note: &str) {
        self.log(Event::Case {
            strategy: strategy.into(),
            case: case.into(),
            note: note.into(),
        });
    }

    fn target(&self) -> &RefExp {
        self.active_refexp
            .as_ref()
            .expect("active referring expression")
    }

    fn expect_state(&self, expected: SessionState) -> Result<(), SessionError> {
        if self.state == expected {
            Ok(())
        } else {
            Err(SessionError::WrongState {
                expected,
                actual: self.state,
            })
        }
    }
}

/// Runs a scripted dialogue: the utterance, then answers while the session
/// awaits clarification. Unused answers are ignored.
pub fn run_script(
    scene: &Scene,
    utterance: &str,
    answers: &[String],
    config: SessionConfig,
) -> DialogueSession {
    let mut session = DialogueSession::new("script", scene.id.clone(), config);
    session
        .handle_utterance(utterance, scene)
        .expect("fresh session awaits an instruction");
    for answer in answers {
        if session.state() != SessionState::AwaitingClarification {
            break;
        }
        session
            .handle_answer(answer)
            .expect("session awaits clarification");
    }
    session
}
