//! Handler-convention checking: `on<X>Received` binds to the in-port named
//! `x` (X with its first character lowercased), with the parameter type
//! equal to the port type.

use crate::diag::{self, Diagnostic};
use crate::sema::resolve::{lower_first, BoundHandler, ResolvedComponent};
use crate::sema::{name_to_type, SymbolTable};
use crate::syntax::ast::Direction;

/// The port name a handler method name binds to, if the name has the
/// `on<X>Received` shape.
pub fn bound_port_name(method_name: &str) -> Option<String> {
    let rest = method_name.strip_prefix("on")?.strip_suffix("Received")?;
    if rest.is_empty() {
        return None;
    }
    Some(lower_first(rest))
}

/// Bind each handler to its in-port, checking existence, direction,
/// parameter type equality, and at-most-one-handler-per-port.
pub fn check_handlers(
    rc: &mut ResolvedComponent,
    symbols: &SymbolTable,
    diags: &mut Vec<Diagnostic>,
) {
    let mut bound: Vec<BoundHandler> = Vec::new();
    for h in &rc.handler_decls {
        // The parser enforces the naming pattern; a defensive fallback keeps
        // hand-built ASTs from slipping through unbound.
        let Some(port_name) = bound_port_name(&h.method_name) else {
            diags.push(Diagnostic::error(
                diag::E0206,
                h.pos.clone(),
                format!(
                    "handler `{}` does not follow the `on<Port>Received` convention",
                    h.method_name
                ),
            ));
            continue;
        };
        let Some(port) = rc.ports.iter().find(|p| p.name == port_name) else {
            diags.push(Diagnostic::error(
                diag::E0206,
                h.pos.clone(),
                format!(
                    "handler `{}` expects an in-port named `{port_name}`, but component \
                     `{}` declares none",
                    h.method_name, rc.name
                ),
            ));
            continue;
        };
        if port.direction == Direction::Out {
            diags.push(Diagnostic::error(
                diag::E0206,
                h.pos.clone(),
                format!(
                    "handler `{}` binds `{port_name}`, which is an out-port; handlers \
                     receive on in-ports only",
                    h.method_name
                ),
            ));
            continue;
        }
        match name_to_type(&h.param_type, symbols) {
            None => {
                diags.push(Diagnostic::error(
                    diag::E0213,
                    h.pos.clone(),
                    format!("unknown type name `{}`", h.param_type),
                ));
                continue;
            }
            Some(param_ty) => {
                // Exact equality required; subtyping does not apply here.
                if param_ty != port.ty {
                    diags.push(Diagnostic::error(
                        diag::E0207,
                        h.pos.clone(),
                        format!(
                            "handler parameter type `{param_ty}` does not match port \
                             `{port_name}` of type `{}`",
                            port.ty
                        ),
                    ));
                    continue;
                }
            }
        }
        if bound.iter().any(|b| b.port == port_name) {
            diags.push(Diagnostic::error(
                diag::E0208,
                h.pos.clone(),
                format!("duplicate handler for port `{port_name}`"),
            ));
            continue;
        }
        bound.push(BoundHandler {
            port: port_name,
            decl: h.clone(),
        });
    }
    rc.handlers = bound;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sema::{analyze, build_symbols, resolve::resolve_defaults};
    use crate::syntax::parse_model;

    fn check_src(src: &str, name: &str) -> (ResolvedComponent, Vec<Diagnostic>) {
        let unit = parse_model(src, "t.arc").expect("parse");
        let mut diags = Vec::new();
        let symbols = build_symbols(std::slice::from_ref(&unit), &mut diags);
        let mut rc = resolve_defaults(&symbols.components[name], &symbols, &mut diags);
        check_handlers(&mut rc, &symbols, &mut diags);
        (rc, diags)
    }

    #[test]
    fn binding_convention() {
        assert_eq!(
            bound_port_name("onMilkEmptyReceived").as_deref(),
            Some("milkEmpty")
        );
        assert_eq!(bound_port_name("onXReceived").as_deref(), Some("x"));
        assert_eq!(bound_port_name("onReceived"), None);
        assert_eq!(bound_port_name("handle"), None);
    }

    #[test]
    fn milk_handler_binds() {
        let (rc, diags) = check_src(
            "component C { port in Boolean milkEmpty, out String message; \
             handler onMilkEmptyReceived(Boolean milkEmpty) { } }",
            "C",
        );
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(rc.handlers.len(), 1);
        assert_eq!(rc.handlers[0].port, "milkEmpty");
    }

    #[test]
    fn missing_port() {
        let (_, diags) = check_src("component C { handler onFooReceived(Boolean v) { } }", "C");
        assert!(diags.iter().any(|d| d.code == diag::E0206), "{diags:?}");
    }

    #[test]
    fn out_port_rejected() {
        let (_, diags) = check_src(
            "component C { port out Boolean x; handler onXReceived(Boolean x) { } }",
            "C",
        );
        assert!(diags.iter().any(|d| d.code == diag::E0206), "{diags:?}");
    }

    #[test]
    fn param_type_mismatch() {
        let (_, diags) = check_src(
            "component C { port in Boolean milkEmpty; \
             handler onMilkEmptyReceived(Integer x) { } }",
            "C",
        );
        assert!(diags.iter().any(|d| d.code == diag::E0207), "{diags:?}");
    }

    #[test]
    fn duplicate_handler() {
        let (_, diags) = check_src(
            "component C { port in Boolean x; \
             handler onXReceived(Boolean a) { } handler onXReceived(Boolean b) { } }",
            "C",
        );
        assert!(diags.iter().any(|d| d.code == diag::E0208), "{diags:?}");
    }

    #[test]
    fn unhandled_in_ports_are_legal() {
        let unit = parse_model(
            "component C { port in Boolean x, in Boolean y; \
             handler onXReceived(Boolean x) { } }",
            "t.arc",
        )
        .unwrap();
        assert!(analyze(&[unit]).is_ok());
    }
}
