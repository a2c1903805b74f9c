//! Static typing of handler bodies and communication-integrity checks:
//! bodies may reference only the handler parameter, the component's own
//! state variables, and its own out-ports in send statements.

use crate::diag::{self, Diagnostic};
use crate::sema::resolve::ResolvedComponent;
use crate::sema::{is_subtype, MsgType, SymbolTable};
use crate::syntax::ast::{BinOp, Direction, Expr, ExprKind, Stmt, StmtKind, UnaryOp};

/// Type of a literal expression (state initializers, stimulus values).
/// Unknown enum types or members are reported as undeclared-name errors.
pub fn literal_type(
    e: &Expr,
    symbols: &SymbolTable,
    diags: &mut Vec<Diagnostic>,
) -> Option<MsgType> {
    match &e.kind {
        ExprKind::Bool(_) => Some(MsgType::Boolean),
        ExprKind::Int(_) => Some(MsgType::Integer),
        ExprKind::Str(_) => Some(MsgType::Str),
        ExprKind::EnumRef { ty, member } => match symbols.enums.get(ty) {
            None => {
                diags.push(Diagnostic::error(
                    diag::E0210,
                    e.pos.clone(),
                    format!("`{ty}` is not a declared enum type"),
                ));
                None
            }
            Some(decl) => {
                if decl.members.iter().any(|(m, _)| m == member) {
                    Some(MsgType::Enum(ty.clone()))
                } else {
                    diags.push(Diagnostic::error(
                        diag::E0210,
                        e.pos.clone(),
                        format!("enum `{ty}` has no member `{member}`"),
                    ));
                    None
                }
            }
        },
        _ => {
            diags.push(Diagnostic::error(
                diag::E0209,
                e.pos.clone(),
                "expected a literal value",
            ));
            None
        }
    }
}

struct Ctx<'a> {
    rc: &'a ResolvedComponent,
    symbols: &'a SymbolTable,
    param_name: &'a str,
    param_ty: MsgType,
}

impl<'a> Ctx<'a> {
    /// Returns `None` after reporting, or when a subexpression already
    /// failed (poison — no cascading reports).
    fn type_of(&self, e: &Expr, diags: &mut Vec<Diagnostic>) -> Option<MsgType> {
        match &e.kind {
            ExprKind::Bool(_) => Some(MsgType::Boolean),
            ExprKind::Int(_) => Some(MsgType::Integer),
            ExprKind::Str(_) => Some(MsgType::Str),
            ExprKind::EnumRef { .. } => literal_type(e, self.symbols, diags),
            ExprKind::Var(name) => {
                if name == self.param_name {
                    Some(self.param_ty.clone())
                } else if let Some(v) = self.rc.state_var(name) {
                    Some(v.ty.clone())
                } else {
                    diags.push(Diagnostic::error(
                        diag::E0210,
                        e.pos.clone(),
                        format!(
                            "undeclared name `{name}`; handlers may read the parameter \
                             and the component's own state variables"
                        ),
                    ));
                    None
                }
            }
            ExprKind::Unary { op, operand } => {
                let t = self.type_of(operand, diags)?;
                match op {
                    UnaryOp::Not if t == MsgType::Boolean => Some(MsgType::Boolean),
                    UnaryOp::Neg if t == MsgType::Integer => Some(MsgType::Integer),
                    UnaryOp::Not => {
                        diags.push(Diagnostic::error(
                            diag::E0209,
                            e.pos.clone(),
                            format!("operator `!` needs a Boolean operand, found `{t}`"),
                        ));
                        None
                    }
                    UnaryOp::Neg => {
                        diags.push(Diagnostic::error(
                            diag::E0209,
                            e.pos.clone(),
                            format!("operator `-` needs an Integer operand, found `{t}`"),
                        ));
                        None
                    }
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.type_of(lhs, diags);
                let rt = self.type_of(rhs, diags);
                let (lt, rt) = (lt?, rt?);
                let bad = |diags: &mut Vec<Diagnostic>, msg: String| {
                    diags.push(Diagnostic::error(diag::E0209, e.pos.clone(), msg));
                    None
                };
                match op {
                    BinOp::And | BinOp::Or => {
                        if lt == MsgType::Boolean && rt == MsgType::Boolean {
                            Some(MsgType::Boolean)
                        } else {
                            bad(
                                diags,
                                format!(
                                    "logical operator needs Boolean operands, found \
                                     `{lt}` and `{rt}`"
                                ),
                            )
                        }
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if lt == rt {
                            Some(MsgType::Boolean)
                        } else {
                            bad(diags, format!("cannot compare `{lt}` with `{rt}`"))
                        }
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        if lt == MsgType::Integer && rt == MsgType::Integer {
                            Some(MsgType::Boolean)
                        } else {
                            bad(
                                diags,
                                format!(
                                    "relational operator needs Integer operands, found \
                                     `{lt}` and `{rt}`"
                                ),
                            )
                        }
                    }
                    BinOp::Add => {
                        if lt == MsgType::Integer && rt == MsgType::Integer {
                            Some(MsgType::Integer)
                        } else if lt == MsgType::Str && rt == MsgType::Str {
                            Some(MsgType::Str)
                        } else {
                            bad(
                                diags,
                                format!(
                                    "operator `+` needs two Integers or two Strings, \
                                     found `{lt}` and `{rt}`"
                                ),
                            )
                        }
                    }
                    BinOp::Sub | BinOp::Mul | BinOp::Div => {
                        if lt == MsgType::Integer && rt == MsgType::Integer {
                            Some(MsgType::Integer)
                        } else {
                            bad(
                                diags,
                                format!(
                                    "arithmetic operator needs Integer operands, found \
                                     `{lt}` and `{rt}`"
                                ),
                            )
                        }
                    }
                }
            }
        }
    }

    fn check_stmt(&self, s: &Stmt, diags: &mut Vec<Diagnostic>) {
        match &s.kind {
            StmtKind::Send { target, value } => {
                let vt = self.type_of(value, diags);
                if target.len() != 1 {
                    diags.push(Diagnostic::error(
                        diag::E0220,
                        s.pos.clone(),
                        format!(
                            "`{}` reaches outside the component; handlers may send only \
                             on the component's own out-ports",
                            target.join(".")
                        ),
                    ));
                    return;
                }
                let name = &target[0];
                match self.rc.port(name) {
                    None => {
                        diags.push(Diagnostic::error(
                            diag::E0211,
                            s.pos.clone(),
                            format!(
                                "cannot send on `{name}`: component `{}` has no such port",
                                self.rc.name
                            ),
                        ));
                    }
                    Some(p) if p.direction == Direction::In => {
                        diags.push(Diagnostic::error(
                            diag::E0211,
                            s.pos.clone(),
                            format!("cannot send on `{name}`: it is an in-port"),
                        ));
                    }
                    Some(p) => {
                        if let Some(vt) = vt {
                            if !is_subtype(&vt, &p.ty) {
                                diags.push(Diagnostic::error(
                                    diag::E0209,
                                    s.pos.clone(),
                                    format!(
                                        "cannot send a `{vt}` value on out-port `{name}` \
                                         of type `{}`",
                                        p.ty
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
            StmtKind::Assign { target, value } => {
                let vt = self.type_of(value, diags);
                if target.len() != 1 {
                    diags.push(Diagnostic::error(
                        diag::E0220,
                        s.pos.clone(),
                        format!(
                            "`{}` reaches outside the component; handlers may assign only \
                             the component's own state variables",
                            target.join(".")
                        ),
                    ));
                    return;
                }
                let name = &target[0];
                match self.rc.state_var(name) {
                    Some(v) => {
                        if let Some(vt) = vt {
                            if !is_subtype(&vt, &v.ty) {
                                diags.push(Diagnostic::error(
                                    diag::E0209,
                                    s.pos.clone(),
                                    format!(
                                        "cannot assign a `{vt}` value to state variable \
                                         `{name}` of type `{}`",
                                        v.ty
                                    ),
                                ));
                            }
                        }
                    }
                    None => {
                        let exists = name == self.param_name || self.rc.port(name).is_some();
                        if exists {
                            diags.push(Diagnostic::error(
                                diag::E0209,
                                s.pos.clone(),
                                format!("cannot assign to `{name}`: not a state variable"),
                            ));
                        } else {
                            diags.push(Diagnostic::error(
                                diag::E0210,
                                s.pos.clone(),
                                format!("undeclared name `{name}`"),
                            ));
                        }
                    }
                }
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                if let Some(ct) = self.type_of(cond, diags) {
                    if ct != MsgType::Boolean {
                        diags.push(Diagnostic::error(
                            diag::E0209,
                            cond.pos.clone(),
                            format!("if condition must be Boolean, found `{ct}`"),
                        ));
                    }
                }
                for st in then_body {
                    self.check_stmt(st, diags);
                }
                for st in else_body {
                    self.check_stmt(st, diags);
                }
            }
        }
    }
}

/// Typecheck every bound handler body of a behavioral component.
pub fn typecheck_behavior(
    rc: &ResolvedComponent,
    symbols: &SymbolTable,
    diags: &mut Vec<Diagnostic>,
) {
    for bh in &rc.handlers {
        let Some(param_ty) = crate::sema::name_to_type(&bh.decl.param_type, symbols) else {
            // Already reported during handler checking.
            continue;
        };
        let ctx = Ctx {
            rc,
            symbols,
            param_name: &bh.decl.param_name,
            param_ty,
        };
        for s in &bh.decl.body {
            ctx.check_stmt(s, diags);
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::diag;
    use crate::sema::analyze;
    use crate::syntax::parse_model;

    fn codes_of(src: &str) -> Vec<&'static str> {
        let unit = parse_model(src, "t.arc").expect("parse");
        match analyze(&[unit]) {
            Ok(_) => Vec::new(),
            Err(diags) => diags.iter().map(|d| d.code).collect(),
        }
    }

    #[test]
    fn representative_handler_body_is_clean() {
        let src = "component C { port in Boolean milkEmpty, out String message, \
                   out Integer milkAmount; state Boolean milkAvailable; \
                   handler onMilkEmptyReceived(Boolean milkEmpty) { \
                     if (milkEmpty) { this.message.send(\"Sorry, no milk today.\"); } \
                     else { this.message.send(\"Got milk!\"); } \
                     this.milkAvailable = !milkEmpty; } }";
        assert!(codes_of(src).is_empty());
    }

    #[test]
    fn send_type_error() {
        let src = "component C { port in Boolean go, out Integer amount; \
                   handler onGoReceived(Boolean go) { amount.send(true); } }";
        assert!(codes_of(src).contains(&diag::E0209));
    }

    #[test]
    fn undeclared_read() {
        let src = "component C { port in Boolean go, out Boolean y; \
                   handler onGoReceived(Boolean go) { y.send(missing); } }";
        assert!(codes_of(src).contains(&diag::E0210));
    }

    #[test]
    fn send_on_in_port_and_unknown_port() {
        let src = "component C { port in Boolean go, in Boolean other; \
                   handler onGoReceived(Boolean go) { other.send(true); } }";
        assert!(codes_of(src).contains(&diag::E0211));
        let src2 = "component C { port in Boolean go; \
                    handler onGoReceived(Boolean go) { nowhere.send(true); } }";
        assert!(codes_of(src2).contains(&diag::E0211));
    }

    #[test]
    fn foreign_references() {
        let src = "component C { port in Boolean go, out String message; \
                   handler onGoReceived(Boolean go) { other.message.send(\"x\"); } }";
        assert!(codes_of(src).contains(&diag::E0220));
        let src2 = "component C { port in Boolean go; state Boolean b; \
                    handler onGoReceived(Boolean go) { other.b = true; } }";
        assert!(codes_of(src2).contains(&diag::E0220));
    }

    #[test]
    fn operator_typing() {
        let ok = "component C { port in Integer x, out Integer y, out String s, \
                  out Boolean b; state Integer acc; \
                  handler onXReceived(Integer x) { \
                    y.send(1 + 2 * 3); s.send(\"a\" + \"b\"); \
                    b.send(x < 3 && !(x == 2) || x >= 10); acc = -x; } }";
        assert!(codes_of(ok).is_empty(), "{:?}", codes_of(ok));
        let bad = "component C { port in Integer x, out Integer y; \
                   handler onXReceived(Integer x) { y.send(1 + \"a\"); } }";
        assert!(codes_of(bad).contains(&diag::E0209));
        let bad2 = "component C { port in Boolean x, out Boolean y; \
                    handler onXReceived(Boolean x) { y.send(x < true); } }";
        assert!(codes_of(bad2).contains(&diag::E0209));
    }

    #[test]
    fn condition_must_be_boolean() {
        let src = "component C { port in Integer x, out Integer y; \
                   handler onXReceived(Integer x) { if (x) { y.send(x); } } }";
        assert!(codes_of(src).contains(&diag::E0209));
    }

    #[test]
    fn assign_to_non_state() {
        let src = "component C { port in Integer x, out Integer y; \
                   handler onXReceived(Integer x) { x = 3; } }";
        assert!(codes_of(src).contains(&diag::E0209));
        let src2 = "component C { port in Integer x; \
                    handler onXReceived(Integer x) { nope = 3; } }";
        assert!(codes_of(src2).contains(&diag::E0210));
    }

    #[test]
    fn enum_literals_in_bodies() {
        let ok = "component C { enum E { A, B } port in E sel, out Boolean hit; \
                  handler onSelReceived(E sel) { hit.send(sel == E.A); } }";
        assert!(codes_of(ok).is_empty(), "{:?}", codes_of(ok));
        let bad = "component C { enum E { A } port in E sel, out Boolean hit; \
                   handler onSelReceived(E sel) { hit.send(sel == E.Z); } }";
        assert!(codes_of(bad).contains(&diag::E0210));
        let bad2 = "component C { port in Boolean go, out Boolean hit; \
                    handler onGoReceived(Boolean go) { hit.send(Nope.X == Nope.X); } }";
        assert!(codes_of(bad2).contains(&diag::E0210));
    }

    #[test]
    fn subtype_send_to_object_port() {
        let src = "component C { port in Integer x, out Object any; \
                   handler onXReceived(Integer x) { any.send(x + 1); } }";
        assert!(codes_of(src).is_empty());
    }
}
