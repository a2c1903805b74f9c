//! Compiler front-end and deterministic runtime for a hierarchical
//! component-and-connector language.
//!
//! Source models declare components with typed, directed ports. Structural
//! components contain subcomponent instances and connectors; behavioral
//! components carry state variables and message handlers written in a small
//! statement language. The crate lexes and parses model files, checks them,
//! elaborates an instance tree with explicit/inline/automatic connectors,
//! flattens the connector graph into a routing table, and runs models under a
//! deterministic FIFO message scheduler.

pub mod arch;
pub mod behavior;
pub mod diag;
pub mod sema;
pub mod sim;
pub mod syntax;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use diag::{Diagnostic, Severity, SourcePos};
