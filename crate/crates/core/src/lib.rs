//! Core of the narrate pipeline.
//!
//! Stories written in controlled English are read into a discourse
//! representation, translated into an action-language program against a small
//! commonsense knowledge library, projected into a trajectory of states, and
//! queried to answer questions about where things are, who has what, and who
//! gave what to whom.

pub mod alm;
pub mod babi;
pub mod diag;
pub mod drs;
pub mod gen;
pub mod library;
pub mod pipeline;
pub mod qa;
pub mod semantics;

pub use diag::{Diagnostic, Location, Severity};
