//! Default-name resolution, per-component uniqueness checks, state-variable
//! checks, and structural/behavioral classification.

use crate::diag::{self, Diagnostic, SourcePos};
use crate::sema::typecheck::literal_type;
use crate::sema::{is_subtype, name_to_type, MsgType, SymbolTable};
use crate::syntax::ast::{ComponentDecl, ConnectDecl, Direction, Expr, HandlerDecl, InlineConnect};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompKind {
    Structural,
    Behavioral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortInfo {
    pub name: String,
    pub direction: Direction,
    pub ty: MsgType,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubInfo {
    pub instance_name: String,
    pub type_name: String,
    pub inline_connects: Vec<InlineConnect>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarInfo {
    pub name: String,
    pub ty: MsgType,
    pub init: Option<Expr>,
    pub pos: SourcePos,
}

/// A handler together with the in-port it is bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundHandler {
    pub port: String,
    pub decl: HandlerDecl,
}

/// A component with every port and instance named and unique, state
/// variables typed, and its structural/behavioral kind decided.
#[derive(Debug, Clone)]
pub struct ResolvedComponent {
    pub name: String,
    pub kind: CompKind,
    pub ports: Vec<PortInfo>,
    pub subcomponents: Vec<SubInfo>,
    pub state_vars: Vec<StateVarInfo>,
    /// Filled by handler checking; empty for structural components.
    pub handlers: Vec<BoundHandler>,
    /// Raw handler declarations (needed by handler checking).
    pub handler_decls: Vec<HandlerDecl>,
    pub connects: Vec<ConnectDecl>,
    pub autoconnect: Option<SourcePos>,
    pub pos: SourcePos,
}

impl ResolvedComponent {
    pub fn port(&self, name: &str) -> Option<&PortInfo> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn subcomponent(&self, instance: &str) -> Option<&SubInfo> {
        self.subcomponents
            .iter()
            .find(|s| s.instance_name == instance)
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVarInfo> {
        self.state_vars.iter().find(|v| v.name == name)
    }

    pub fn handler_for(&self, port: &str) -> Option<&BoundHandler> {
        self.handlers.iter().find(|h| h.port == port)
    }

    pub fn in_ports(&self) -> impl Iterator<Item = &PortInfo> {
        self.ports.iter().filter(|p| p.direction == Direction::In)
    }

    pub fn out_ports(&self) -> impl Iterator<Item = &PortInfo> {
        self.ports.iter().filter(|p| p.direction == Direction::Out)
    }
}

/// `Display` -> `display`; used for omitted instance names.
pub fn lower_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Resolve omitted names, enforce per-component uniqueness, type the ports
/// and state variables, and classify the component.
pub fn resolve_defaults(
    decl: &ComponentDecl,
    symbols: &SymbolTable,
    diags: &mut Vec<Diagnostic>,
) -> ResolvedComponent {
    let mut ports = Vec::new();
    let mut port_names: Vec<String> = Vec::new();
    for p in &decl.ports {
        let ty = match name_to_type(&p.type_name, symbols) {
            Some(t) => t,
            None => {
                diags.push(Diagnostic::error(
                    diag::E0213,
                    p.pos.clone(),
                    format!("unknown type name `{}`", p.type_name),
                ));
                continue;
            }
        };
        match &p.name {
            Some(name) => {
                if port_names.contains(name) {
                    diags.push(Diagnostic::error(
                        diag::E0214,
                        p.pos.clone(),
                        format!("duplicate port name `{name}` in component `{}`", decl.name),
                    ));
                    continue;
                }
                port_names.push(name.clone());
                ports.push(PortInfo {
                    name: name.clone(),
                    direction: p.direction,
                    ty,
                    pos: p.pos.clone(),
                });
            }
            None => {
                // Omitted name: defaults to the type name, verbatim, and only
                // if that name is still free in this component.
                let name = p.type_name.clone();
                if port_names.contains(&name) {
                    diags.push(Diagnostic::error(
                        diag::E0203,
                        p.pos.clone(),
                        format!(
                            "omitted port name defaults to `{name}`, which is already \
                             used by another port of component `{}`",
                            decl.name
                        ),
                    ));
                    continue;
                }
                port_names.push(name.clone());
                ports.push(PortInfo {
                    name,
                    direction: p.direction,
                    ty,
                    pos: p.pos.clone(),
                });
            }
        }
    }

    let mut subcomponents = Vec::new();
    let mut instance_names: Vec<String> = Vec::new();
    for s in &decl.subcomponents {
        match &s.instance_name {
            Some(name) => {
                if instance_names.contains(name) {
                    diags.push(Diagnostic::error(
                        diag::E0215,
                        s.pos.clone(),
                        format!(
                            "duplicate instance name `{name}` in component `{}`",
                            decl.name
                        ),
                    ));
                    continue;
                }
                instance_names.push(name.clone());
                subcomponents.push(SubInfo {
                    instance_name: name.clone(),
                    type_name: s.type_name.clone(),
                    inline_connects: s.inline_connects.clone(),
                    pos: s.pos.clone(),
                });
            }
            None => {
                let name = lower_first(&s.type_name);
                if instance_names.contains(&name) {
                    diags.push(Diagnostic::error(
                        diag::E0204,
                        s.pos.clone(),
                        format!(
                            "omitted instance name defaults to `{name}`, which is already \
                             used in component `{}`; name the instances explicitly",
                            decl.name
                        ),
                    ));
                    continue;
                }
                instance_names.push(name.clone());
                subcomponents.push(SubInfo {
                    instance_name: name,
                    type_name: s.type_name.clone(),
                    inline_connects: s.inline_connects.clone(),
                    pos: s.pos.clone(),
                });
            }
        }
    }

    let mut state_vars: Vec<StateVarInfo> = Vec::new();
    for v in &decl.state_vars {
        if state_vars.iter().any(|sv| sv.name == v.name) {
            diags.push(Diagnostic::error(
                diag::E0216,
                v.pos.clone(),
                format!(
                    "duplicate state variable `{}` in component `{}`",
                    v.name, decl.name
                ),
            ));
            continue;
        }
        let ty = match name_to_type(&v.type_name, symbols) {
            Some(t) => t,
            None => {
                diags.push(Diagnostic::error(
                    diag::E0213,
                    v.pos.clone(),
                    format!("unknown type name `{}`", v.type_name),
                ));
                continue;
            }
        };
        match &v.init {
            Some(init) => {
                if let Some(init_ty) = literal_type(init, symbols, diags) {
                    if !is_subtype(&init_ty, &ty) {
                        diags.push(Diagnostic::error(
                            diag::E0209,
                            init.pos.clone(),
                            format!(
                                "initializer of type `{init_ty}` does not fit state \
                                 variable `{}` of type `{ty}`",
                                v.name
                            ),
                        ));
                    }
                }
            }
            None => {
                if matches!(ty, MsgType::Enum(_) | MsgType::Object) {
                    diags.push(Diagnostic::error(
                        diag::E0212,
                        v.pos.clone(),
                        format!(
                            "state variable `{}` of type `{ty}` has no default value \
                             and needs an explicit initializer",
                            v.name
                        ),
                    ));
                }
            }
        }
        state_vars.push(StateVarInfo {
            name: v.name.clone(),
            ty,
            init: v.init.clone(),
            pos: v.pos.clone(),
        });
    }

    // Classification: subcomponents, connect statements, and the autoconnect
    // flag are structural evidence; handlers and state variables behavioral.
    let structural =
        !decl.subcomponents.is_empty() || !decl.connects.is_empty() || decl.autoconnect.is_some();
    let behavioral = !decl.handlers.is_empty() || !decl.state_vars.is_empty();
    let kind = if structural && behavioral {
        diags.push(Diagnostic::error(
            diag::E0205,
            decl.pos.clone(),
            format!(
                "component `{}` mixes structural elements (subcomponents, connectors, \
                 autoconnect) with behavioral elements (handlers, state variables)",
                decl.name
            ),
        ));
        CompKind::Structural
    } else if structural {
        CompKind::Structural
    } else {
        // No structural evidence: behavioral, possibly an empty stub.
        CompKind::Behavioral
    };

    ResolvedComponent {
        name: decl.name.clone(),
        kind,
        ports,
        subcomponents,
        state_vars,
        handlers: Vec::new(),
        handler_decls: decl.handlers.clone(),
        connects: decl.connects.clone(),
        autoconnect: decl.autoconnect.clone(),
        pos: decl.pos.clone(),
    }
}
