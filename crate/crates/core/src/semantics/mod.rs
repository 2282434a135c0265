//! Executable semantics: symbol tables, grounding, temporal projection, and
//! model extraction.

pub mod ground;
pub mod model;
pub mod project;
pub mod symbols;

pub use ground::{ground, ground_with_cap, GroundProgram, Lit};
pub use model::{extract_model, holds_at, query, render_model, AtomPattern, Model, ModelAtom};
pub use project::{closure, project, ProjectionError, ProjectionErrorKind, State, Trajectory};
pub use symbols::{InstanceId, SymbolTable};
