//! Semantic analysis: symbol construction, default-name resolution,
//! structural/behavioral classification, the message type system, handler
//! binding, behavior type checking, and communication integrity.

pub mod handlers;
pub mod resolve;
pub mod symbols;
pub mod typecheck;

use std::fmt;

use indexmap::IndexMap;

use crate::diag::{has_errors, sort_diagnostics, Diagnostic};
use crate::syntax::ast::ModelUnit;

pub use resolve::{BoundHandler, CompKind, PortInfo, ResolvedComponent, StateVarInfo, SubInfo};
pub use symbols::{build_symbols, SymbolTable};

/// The closed message type universe: three scalars, the `Object` top type,
/// and declared enums.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MsgType {
    Boolean,
    Integer,
    Str,
    Object,
    Enum(String),
}

impl fmt::Display for MsgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsgType::Boolean => f.write_str("Boolean"),
            MsgType::Integer => f.write_str("Integer"),
            MsgType::Str => f.write_str("String"),
            MsgType::Object => f.write_str("Object"),
            MsgType::Enum(name) => f.write_str(name),
        }
    }
}

/// `a` may flow where `b` is expected: types are equal, or `b` is `Object`.
pub fn is_subtype(a: &MsgType, b: &MsgType) -> bool {
    a == b || *b == MsgType::Object
}

/// Resolves a surface type name against the built-ins and declared enums.
pub fn name_to_type(name: &str, symbols: &SymbolTable) -> Option<MsgType> {
    match name {
        "Boolean" => Some(MsgType::Boolean),
        "Integer" => Some(MsgType::Integer),
        "String" => Some(MsgType::Str),
        "Object" => Some(MsgType::Object),
        other => symbols
            .enums
            .contains_key(other)
            .then(|| MsgType::Enum(other.to_string())),
    }
}

/// Output of a clean analysis run: the symbol table plus every component in
/// resolved form, keyed by name in declaration order.
#[derive(Debug, Clone)]
pub struct CheckedModel {
    pub symbols: SymbolTable,
    pub components: IndexMap<String, ResolvedComponent>,
}

impl CheckedModel {
    pub fn component(&self, name: &str) -> Option<&ResolvedComponent> {
        self.components.get(name)
    }
}

/// Run every semantic check over the parsed units. All diagnostics are
/// collected (analysis continues past errors for better reporting) and
/// returned sorted; any error fails the phase.
pub fn analyze(units: &[ModelUnit]) -> Result<CheckedModel, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let symbols = build_symbols(units, &mut diags);
    let mut components = IndexMap::new();
    for decl in symbols.components.values() {
        let mut rc = resolve::resolve_defaults(decl, &symbols, &mut diags);
        handlers::check_handlers(&mut rc, &symbols, &mut diags);
        typecheck::typecheck_behavior(&rc, &symbols, &mut diags);
        components.insert(rc.name.clone(), rc);
    }
    sort_diagnostics(&mut diags);
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok(CheckedModel {
            symbols,
            components,
        })
    }
}
