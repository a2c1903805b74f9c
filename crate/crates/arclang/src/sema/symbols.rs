//! Symbol table construction over a set of parsed units.

use indexmap::IndexMap;

use crate::diag::{self, Diagnostic};
use crate::syntax::ast::{ComponentDecl, EnumDecl, ModelUnit};

const BUILTIN_TYPES: [&str; 4] = ["Boolean", "Integer", "String", "Object"];

/// The resolved universe of component types and enum types. Enums declared
/// inside any component are globally visible.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    pub components: IndexMap<String, ComponentDecl>,
    pub enums: IndexMap<String, EnumDecl>,
}

/// Collect every component and enum declaration. Duplicates are reported
/// (first declaration wins) and enum members are checked for distinctness;
/// type references are left for later phases.
pub fn build_symbols(units: &[ModelUnit], diags: &mut Vec<Diagnostic>) -> SymbolTable {
    let mut table = SymbolTable::default();
    for unit in units {
        for comp in &unit.components {
            if let Some(first) = table.components.get(&comp.name) {
                diags.push(Diagnostic::error(
                    diag::E0201,
                    comp.pos.clone(),
                    format!(
                        "duplicate component name `{}`; first declared at {}",
                        comp.name, first.pos
                    ),
                ));
                continue;
            }
            table.components.insert(comp.name.clone(), comp.clone());
        }
    }
    // Enums are collected from the registered components so a dropped
    // duplicate component cannot also register enums.
    let decls: Vec<EnumDecl> = table
        .components
        .values()
        .flat_map(|c| c.enums.iter().cloned())
        .collect();
    for e in decls {
        if BUILTIN_TYPES.contains(&e.name.as_str()) {
            diags.push(Diagnostic::error(
                diag::E0202,
                e.pos.clone(),
                format!("enum name `{}` conflicts with a built-in type", e.name),
            ));
            continue;
        }
        if let Some(first) = table.enums.get(&e.name) {
            diags.push(Diagnostic::error(
                diag::E0202,
                e.pos.clone(),
                format!(
                    "duplicate enum name `{}`; first declared at {}",
                    e.name, first.pos
                ),
            ));
            continue;
        }
        let mut seen = Vec::new();
        for (member, mpos) in &e.members {
            if seen.contains(&member) {
                diags.push(Diagnostic::error(
                    diag::E0217,
                    mpos.clone(),
                    format!("duplicate enum member `{}` in `{}`", member, e.name),
                ));
            } else {
                seen.push(member);
            }
        }
        table.enums.insert(e.name.clone(), e);
    }
    table
}
