//! Action-language syntax: AST, lexer, parser, renderer, and validator.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod render;
pub mod sorts;
pub mod validate;

pub use ast::*;
pub use parser::{parse_program, parse_theory};
pub use render::render_program;
pub use sorts::SortTable;
pub use validate::validate;
