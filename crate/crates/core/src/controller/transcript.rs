use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::parser::ParseError;

/// Source of event timestamps.
///
/// `Logical` stamps events with a counter so transcripts are reproducible;
/// `Wall` uses milliseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockMode {
    #[default]
    Logical,
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerceptionAction {
    InitialScan,
    LoweredThresholdRescan,
    ViewpointRescan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Utterance {
        text: String,
    },
    Parsed {
        refexp: String,
    },
    ParseFailed {
        error: ParseError,
    },
    Perception {
        action: PerceptionAction,
        azimuth_deg: f64,
        threshold: f64,
        detected: Vec<String>,
    },
    /// Outcome of conflict detection: T-1, T-2 or T-3.
    ConflictDetected {
        conflict: String,
        candidates: Vec<String>,
    },
    ThresholdLowered {
        category: String,
        threshold: f64,
    },
    ViewpointChanged {
        azimuth_deg: f64,
        changes_used: u32,
    },
    /// A resolution case reached by a strategy, e.g. CR-1 / C-2.
    Case {
        strategy: String,
        case: String,
        note: String,
    },
    Question {
        kind: String,
        case: String,
        text: String,
        options: Vec<String>,
        reask: bool,
    },
    Answer {
        text: String,
    },
    AnswerRejected {
        reason: String,
    },
    CandidatesNarrowed {
        candidates: Vec<String>,
    },
    Outcome {
        status: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        target: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub step: u64,
    pub at_ms: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// Ordered event log of a session. Steps are strictly increasing from 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub scene_id: String,
    pub events: Vec<Entry>,
    #[serde(skip)]
    clock: ClockMode,
}

impl Transcript {
    pub fn new(scene_id: impl Into<String>, clock: ClockMode) -> Self {
        Transcript {
            scene_id: scene_id.into(),
            events: Vec::new(),
            clock,
        }
    }

    pub fn push(&mut self, event: Event) {
        let step = self.events.len() as u64 + 1;
        let at_ms = match self.clock {
            ClockMode::Logical => step,
            ClockMode::Wall => {
                let now = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_millis() as u64)
                    .unwrap_or(0);
                // Keep timestamps monotone even if the wall clock steps back.
                now.max(self.events.last().map_or(0, |e| e.at_ms))
            }
        };
        self.events.push(Entry { step, at_ms, event });
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Pretty JSON with a trailing newline, the golden-file format.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }
}
