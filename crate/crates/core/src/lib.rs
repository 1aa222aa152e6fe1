//! Grounding of referring expressions in simulated table-top scenes, with
//! detection and resolution of grounding conflicts.
//!
//! The pipeline runs scene → [`perception::detect`] → [`graph::build_graph`]
//! → [`grounder::score_candidates`] → [`grounder::classify`]; the
//! [`controller`] drives it and falls back to threshold lowering, viewpoint
//! changes and clarification questions when the result is not unique.

pub mod controller;
pub mod fuzzy;
pub mod graph;
pub mod grounder;
pub mod lexicon;
pub mod parser;
pub mod perception;
pub mod refexp;
pub mod scene;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use fuzzy::{RelationName, ShapeClass, ShapeName};
pub use graph::KnowledgeGraph;
pub use grounder::{ConflictType, MatchScore};
pub use parser::{parse, ParseError};
pub use perception::{DetectorConfig, Percept, Viewpoint};
pub use refexp::RefExp;
pub use scene::{load_scene, ColorName, Scene, SceneObject, SizeClass};
