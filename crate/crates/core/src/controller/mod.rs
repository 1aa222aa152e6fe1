//! Conflict detection and resolution controller.
//!
//! Conflict detection classifies a grounding as no match (T-1), ambiguous
//! (T-2) or unique (T-3). No match triggers CR-1: the target category's
//! detection threshold is lowered and the scene rescanned, which either
//! resolves it (C-2) or yields several matches (C-3); if nothing is found the
//! camera moves around the table and detection restarts. Ambiguity triggers
//! CR-2: a clarification question over attributes (C-1) or, failing that,
//! spatial relations to unique landmarks (C-2).

mod question;
mod session;
mod transcript;

pub use question::{clarification_question, Choice, Question, QuestionKind};
pub use session::{
    run_script, DialogueSession, FailureReason, ResolutionOutcome, SessionConfig, SessionError,
    SessionState, MAX_CLARIFICATION_TURNS, MAX_REASKS, MAX_VIEWPOINT_CHANGES,
};
pub use transcript::{ClockMode, Entry, Event, PerceptionAction, Transcript};
