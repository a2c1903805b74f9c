//! Lexing and parsing of model and stimulus files into position-annotated
//! ASTs, plus the pretty-printer used by round-trip testing.

pub mod ast;
pub mod parser;
pub mod pretty;
pub mod stimulus;
pub mod token;

pub use ast::ModelUnit;
pub use parser::parse_model;
pub use stimulus::{parse_stimulus, Stimulus};
