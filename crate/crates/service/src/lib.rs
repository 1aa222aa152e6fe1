//! Service shell around the grounding controller: an HTTP API, a batch
//! scenario runner and an interactive terminal loop, all driving the same
//! [`tabletop_core::controller::DialogueSession`].

pub mod api;
pub mod repl;
pub mod scenarios;
pub mod store;

pub use api::{router, serve, TurnResponse};
pub use scenarios::{load_scenarios, run_scenarios, GoldenMode, Report};
pub use store::{SceneLibrary, SessionStore};
