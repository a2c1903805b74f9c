//! Runtime values and handler execution. A handler runs to completion
//! against a snapshot of its component's state and produces the new state
//! plus the messages it sent, in program order; it never touches anything
//! outside its component.

use indexmap::IndexMap;

use crate::diag::SourcePos;
use crate::sema::{MsgType, ResolvedComponent};
use crate::syntax::ast::{BinOp, Expr, ExprKind, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuntimeValue {
    Bool(bool),
    Int(i64),
    Str(String),
    EnumVal { ty: String, member: String },
}

impl RuntimeValue {
    pub fn type_of(&self) -> MsgType {
        match self {
            RuntimeValue::Bool(_) => MsgType::Boolean,
            RuntimeValue::Int(_) => MsgType::Integer,
            RuntimeValue::Str(_) => MsgType::Str,
            RuntimeValue::EnumVal { ty, .. } => MsgType::Enum(ty.clone()),
        }
    }

    /// Trace rendering: scalars map to their JSON counterparts, enum values
    /// to an `{"enum": type, "member": name}` object.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RuntimeValue::Bool(b) => serde_json::Value::Bool(*b),
            RuntimeValue::Int(i) => serde_json::Value::from(*i),
            RuntimeValue::Str(s) => serde_json::Value::String(s.clone()),
            RuntimeValue::EnumVal { ty, member } => {
                serde_json::json!({"enum": ty, "member": member})
            }
        }
    }
}

/// The value a state variable takes when its declaration has no initializer.
/// Enum and Object variables have no natural default, which is why the
/// checker demands initializers for them.
pub fn default_value(ty: &MsgType) -> Option<RuntimeValue> {
    match ty {
        MsgType::Boolean => Some(RuntimeValue::Bool(false)),
        MsgType::Integer => Some(RuntimeValue::Int(0)),
        MsgType::Str => Some(RuntimeValue::Str(String::new())),
        MsgType::Object | MsgType::Enum(_) => None,
    }
}

/// Evaluate a literal expression (the only kind allowed in initializers and
/// stimulus files) to a value.
pub fn literal_value(e: &Expr) -> Option<RuntimeValue> {
    match &e.kind {
        ExprKind::Bool(b) => Some(RuntimeValue::Bool(*b)),
        ExprKind::Int(i) => Some(RuntimeValue::Int(*i)),
        ExprKind::Str(s) => Some(RuntimeValue::Str(s.clone())),
        ExprKind::EnumRef { ty, member } => Some(RuntimeValue::EnumVal {
            ty: ty.clone(),
            member: member.clone(),
        }),
        _ => None,
    }
}

/// The component's state map as of instantiation: initializers where
/// written, type defaults otherwise.
pub fn initial_state(rc: &ResolvedComponent) -> IndexMap<String, RuntimeValue> {
    let mut state = IndexMap::new();
    for v in &rc.state_vars {
        let value = v
            .init
            .as_ref()
            .and_then(literal_value)
            .or_else(|| default_value(&v.ty))
            .expect("checked state variables always have a value");
        state.insert(v.name.clone(), value);
    }
    state
}

/// An error surfaced while running a handler (today: division by zero; the
/// other arms guard against evaluator/checker disagreement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeFault {
    pub message: String,
    pub pos: SourcePos,
}

/// One `send` performed by a handler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    pub port: String,
    pub value: RuntimeValue,
}

/// Name lookup scope for expression evaluation: the handler parameter
/// shadows state variables.
pub struct Env<'a> {
    pub param_name: &'a str,
    pub param_value: &'a RuntimeValue,
    pub state: &'a IndexMap<String, RuntimeValue>,
}

fn fault(pos: &SourcePos, message: impl Into<String>) -> RuntimeFault {
    RuntimeFault {
        message: message.into(),
        pos: pos.clone(),
    }
}

fn as_bool(v: RuntimeValue, pos: &SourcePos) -> Result<bool, RuntimeFault> {
    match v {
        RuntimeValue::Bool(b) => Ok(b),
        other => Err(fault(
            pos,
            format!("expected a Boolean value, found {}", other.type_of()),
        )),
    }
}

fn as_int(v: RuntimeValue, pos: &SourcePos) -> Result<i64, RuntimeFault> {
    match v {
        RuntimeValue::Int(i) => Ok(i),
        other => Err(fault(
            pos,
            format!("expected an Integer value, found {}", other.type_of()),
        )),
    }
}

/// Evaluate an expression. Integer arithmetic wraps; `&&`/`||` short-circuit,
/// so a division in an untaken branch never runs.
pub fn eval_expr(e: &Expr, env: &Env) -> Result<RuntimeValue, RuntimeFault> {
    match &e.kind {
        ExprKind::Bool(b) => Ok(RuntimeValue::Bool(*b)),
        ExprKind::Int(i) => Ok(RuntimeValue::Int(*i)),
        ExprKind::Str(s) => Ok(RuntimeValue::Str(s.clone())),
        ExprKind::EnumRef { ty, member } => Ok(RuntimeValue::EnumVal {
            ty: ty.clone(),
            member: member.clone(),
        }),
        ExprKind::Var(name) => {
            if name == env.param_name {
                Ok(env.param_value.clone())
            } else {
                env.state
                    .get(name)
                    .cloned()
                    .ok_or_else(|| fault(&e.pos, format!("no variable named `{name}` in scope")))
            }
        }
        ExprKind::Unary { op, operand } => {
            let v = eval_expr(operand, env)?;
            match op {
                UnaryOp::Not => Ok(RuntimeValue::Bool(!as_bool(v, &operand.pos)?)),
                UnaryOp::Neg => Ok(RuntimeValue::Int(as_int(v, &operand.pos)?.wrapping_neg())),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => match op {
            BinOp::And => {
                if !as_bool(eval_expr(lhs, env)?, &lhs.pos)? {
                    return Ok(RuntimeValue::Bool(false));
                }
                Ok(RuntimeValue::Bool(as_bool(eval_expr(rhs, env)?, &rhs.pos)?))
            }
            BinOp::Or => {
                if as_bool(eval_expr(lhs, env)?, &lhs.pos)? {
                    return Ok(RuntimeValue::Bool(true));
                }
                Ok(RuntimeValue::Bool(as_bool(eval_expr(rhs, env)?, &rhs.pos)?))
            }
            BinOp::Eq | BinOp::Ne => {
                let l = eval_expr(lhs, env)?;
                let r = eval_expr(rhs, env)?;
                let eq = l == r;
                Ok(RuntimeValue::Bool(if *op == BinOp::Eq { eq } else { !eq }))
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let l = as_int(eval_expr(lhs, env)?, &lhs.pos)?;
                let r = as_int(eval_expr(rhs, env)?, &rhs.pos)?;
                Ok(RuntimeValue::Bool(match op {
                    BinOp::Lt => l < r,
                    BinOp::Le => l <= r,
                    BinOp::Gt => l > r,
                    _ => l >= r,
                }))
            }
            BinOp::Add => {
                let l = eval_expr(lhs, env)?;
                let r = eval_expr(rhs, env)?;
                match (l, r) {
                    (RuntimeValue::Int(a), RuntimeValue::Int(b)) => {
                        Ok(RuntimeValue::Int(a.wrapping_add(b)))
                    }
                    (RuntimeValue::Str(a), RuntimeValue::Str(b)) => {
                        Ok(RuntimeValue::Str(format!("{a}{b}")))
                    }
                    (l, r) => Err(fault(
                        &e.pos,
                        format!(
                            "`+` needs two Integers or two Strings, found {} and {}",
                            l.type_of(),
                            r.type_of()
                        ),
                    )),
                }
            }
            BinOp::Sub | BinOp::Mul | BinOp::Div => {
                let l = as_int(eval_expr(lhs, env)?, &lhs.pos)?;
                let r = as_int(eval_expr(rhs, env)?, &rhs.pos)?;
                match op {
                    BinOp::Sub => Ok(RuntimeValue::Int(l.wrapping_sub(r))),
                    BinOp::Mul => Ok(RuntimeValue::Int(l.wrapping_mul(r))),
                    _ => {
                        if r == 0 {
                            Err(fault(&e.pos, "division by zero"))
                        } else {
                            Ok(RuntimeValue::Int(l.wrapping_div(r)))
                        }
                    }
                }
            }
        },
    }
}

fn exec_block(
    stmts: &[Stmt],
    param_name: &str,
    param_value: &RuntimeValue,
    state: &mut IndexMap<String, RuntimeValue>,
    out: &mut Vec<Emission>,
) -> Result<(), RuntimeFault> {
    for s in stmts {
        let env = Env {
            param_name,
            param_value,
            state,
        };
        match &s.kind {
            StmtKind::Send { target, value } => {
                let v = eval_expr(value, &env)?;
                out.push(Emission {
                    port: target[0].clone(),
                    value: v,
                });
            }
            StmtKind::Assign { target, value } => {
                let v = eval_expr(value, &env)?;
                state.insert(target[0].clone(), v);
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => {
                let taken = as_bool(eval_expr(cond, &env)?, &cond.pos)?;
                let body = if taken { then_body } else { else_body };
                exec_block(body, param_name, param_value, state, out)?;
            }
        }
    }
    Ok(())
}

/// Run one handler to completion. The input state is untouched; the result
/// carries the successor state and the emissions in program order.
pub fn exec_handler(
    handler: &crate::syntax::ast::HandlerDecl,
    state: &IndexMap<String, RuntimeValue>,
    value: &RuntimeValue,
) -> Result<(IndexMap<String, RuntimeValue>, Vec<Emission>), RuntimeFault> {
    let mut next = state.clone();
    let mut out = Vec::new();
    exec_block(
        &handler.body,
        &handler.param_name,
        value,
        &mut next,
        &mut out,
    )?;
    Ok((next, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sema::analyze;
    use crate::syntax::parse_model;

    const CPU: &str = include_str!("../tests/fixtures/coffee/cpu.arc");
    const MACHINE: &str = include_str!("../tests/fixtures/coffee/machine.arc");
    const STUBS: &str = include_str!("../tests/fixtures/coffee/stubs.arc");

    /// Parse `expr` inside a throwaway handler and evaluate it with an empty
    /// scope (parameter `t`, Boolean true).
    fn eval_src(expr: &str) -> Result<RuntimeValue, RuntimeFault> {
        let src = format!(
            "component T {{\n  port in Boolean t;\n  port out Object r;\n\
             \n  handler onTReceived(Boolean t) {{ this.r.send({expr}); }}\n}}\n"
        );
        let unit = parse_model(&src, "t.arc").expect("expression parses");
        let handler = &unit.components[0].handlers[0];
        let StmtKind::Send { value, .. } = &handler.body[0].kind else {
            panic!("expected a send statement");
        };
        let state = IndexMap::new();
        let param = RuntimeValue::Bool(true);
        let env = Env {
            param_name: "t",
            param_value: &param,
            state: &state,
        };
        eval_expr(value, &env)
    }

    #[test]
    fn negation_and_precedence() {
        assert_eq!(eval_src("!true").unwrap(), RuntimeValue::Bool(false));
        assert_eq!(eval_src("1 + 2 * 3").unwrap(), RuntimeValue::Int(7));
        assert_eq!(eval_src("(1 + 2) * 3").unwrap(), RuntimeValue::Int(9));
        assert_eq!(eval_src("-4 / 2").unwrap(), RuntimeValue::Int(-2));
    }

    #[test]
    fn string_concatenation() {
        assert_eq!(
            eval_src("\"a\" + \"b\"").unwrap(),
            RuntimeValue::Str("ab".to_string())
        );
    }

    #[test]
    fn comparisons_and_equality() {
        assert_eq!(eval_src("1 < 2").unwrap(), RuntimeValue::Bool(true));
        assert_eq!(eval_src("2 <= 1").unwrap(), RuntimeValue::Bool(false));
        assert_eq!(
            eval_src("\"x\" == \"x\"").unwrap(),
            RuntimeValue::Bool(true)
        );
        assert_eq!(eval_src("3 != 3").unwrap(), RuntimeValue::Bool(false));
        assert_eq!(eval_src("t == true").unwrap(), RuntimeValue::Bool(true));
    }

    #[test]
    fn short_circuit_skips_division() {
        assert_eq!(
            eval_src("false && 1 / 0 == 0").unwrap(),
            RuntimeValue::Bool(false)
        );
        assert_eq!(
            eval_src("true || 1 / 0 == 0").unwrap(),
            RuntimeValue::Bool(true)
        );
    }

    #[test]
    fn division_by_zero_faults() {
        let err = eval_src("10 / (5 - 5)").unwrap_err();
        assert!(err.message.contains("division by zero"));
        assert_eq!(err.pos.line, 5, "fault points into the handler body");
    }

    #[test]
    fn integer_arithmetic_wraps() {
        assert_eq!(
            eval_src("9223372036854775807 + 1").unwrap(),
            RuntimeValue::Int(i64::MIN)
        );
        assert_eq!(
            eval_src("(0 - 9223372036854775807 - 1) / (0 - 1)").unwrap(),
            RuntimeValue::Int(i64::MIN)
        );
    }

    fn cpu_handler() -> (crate::sema::CheckedModel, String) {
        let units = vec![
            parse_model(MACHINE, "machine.arc").unwrap(),
            parse_model(CPU, "cpu.arc").unwrap(),
            parse_model(STUBS, "stubs.arc").unwrap(),
        ];
        let model = analyze(&units).expect("fixtures check");
        (model, "CoffeeProcessingUnit".to_string())
    }

    #[test]
    fn milk_handler_reports_empty_and_remembers() {
        let (model, cpu) = cpu_handler();
        let rc = model.component(&cpu).unwrap();
        let handler = &rc.handler_for("milkEmpty").unwrap().decl;
        let state = initial_state(rc);
        assert_eq!(state.get("milkAvailable"), Some(&RuntimeValue::Bool(false)));

        let (next, out) = exec_handler(handler, &state, &RuntimeValue::Bool(true)).unwrap();
        assert_eq!(
            out,
            vec![Emission {
                port: "message".to_string(),
                value: RuntimeValue::Str("Sorry, no milk today.".to_string()),
            }]
        );
        assert_eq!(next.get("milkAvailable"), Some(&RuntimeValue::Bool(false)));
        // Input state is a snapshot: the caller's map is untouched.
        assert_eq!(state.get("milkAvailable"), Some(&RuntimeValue::Bool(false)));
    }

    #[test]
    fn milk_handler_acknowledges_refill() {
        let (model, cpu) = cpu_handler();
        let rc = model.component(&cpu).unwrap();
        let handler = &rc.handler_for("milkEmpty").unwrap().decl;
        let state = initial_state(rc);
        let (next, out) = exec_handler(handler, &state, &RuntimeValue::Bool(false)).unwrap();
        assert_eq!(
            out,
            vec![Emission {
                port: "message".to_string(),
                value: RuntimeValue::Str("Got milk!".to_string()),
            }]
        );
        assert_eq!(next.get("milkAvailable"), Some(&RuntimeValue::Bool(true)));
    }

    #[test]
    fn empty_body_changes_nothing() {
        let src = "component T {\n  port in Boolean t;\n\
                   \n  state Integer n = 9;\n  handler onTReceived(Boolean t) { }\n}\n";
        let unit = parse_model(src, "t.arc").unwrap();
        let model = analyze(&[unit]).unwrap();
        let rc = model.component("T").unwrap();
        let state = initial_state(rc);
        let (next, out) = exec_handler(
            &rc.handler_for("t").unwrap().decl,
            &state,
            &RuntimeValue::Bool(true),
        )
        .unwrap();
        assert!(out.is_empty());
        assert_eq!(next, state);
    }

    #[test]
    fn emissions_keep_program_order() {
        let src = "component T {\n  port in Boolean t;\n  port out Integer a;\n\
                   \n  port out Integer b;\n  handler onTReceived(Boolean t) {\n\
                   \n    this.a.send(1);\n    this.b.send(2);\n    this.a.send(3);\n  }\n}\n";
        let unit = parse_model(src, "t.arc").unwrap();
        let model = analyze(&[unit]).unwrap();
        let rc = model.component("T").unwrap();
        let (_, out) = exec_handler(
            &rc.handler_for("t").unwrap().decl,
            &initial_state(rc),
            &RuntimeValue::Bool(true),
        )
        .unwrap();
        let got: Vec<_> = out
            .iter()
            .map(|e| (e.port.as_str(), e.value.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("a", RuntimeValue::Int(1)),
                ("b", RuntimeValue::Int(2)),
                ("a", RuntimeValue::Int(3)),
            ]
        );
    }

    #[test]
    fn state_updates_visible_to_later_statements() {
        let src = "component T {\n  port in Integer t;\n  port out Integer r;\n\
                   \n  state Integer acc = 10;\n  handler onTReceived(Integer t) {\n\
                   \n    this.acc = this.acc + t;\n    this.r.send(this.acc * 2);\n  }\n}\n";
        let unit = parse_model(src, "t.arc").unwrap();
        let model = analyze(&[unit]).unwrap();
        let rc = model.component("T").unwrap();
        let (next, out) = exec_handler(
            &rc.handler_for("t").unwrap().decl,
            &initial_state(rc),
            &RuntimeValue::Int(5),
        )
        .unwrap();
        assert_eq!(next.get("acc"), Some(&RuntimeValue::Int(15)));
        assert_eq!(out[0].value, RuntimeValue::Int(30));
    }

    #[test]
    fn defaults_and_literals() {
        assert_eq!(
            default_value(&MsgType::Boolean),
            Some(RuntimeValue::Bool(false))
        );
        assert_eq!(default_value(&MsgType::Integer), Some(RuntimeValue::Int(0)));
        assert_eq!(
            default_value(&MsgType::Str),
            Some(RuntimeValue::Str(String::new()))
        );
        assert_eq!(default_value(&MsgType::Object), None);
        assert_eq!(default_value(&MsgType::Enum("E".to_string())), None);

        let v = RuntimeValue::EnumVal {
            ty: "CoffeeType".to_string(),
            member: "Espresso".to_string(),
        };
        assert_eq!(v.type_of(), MsgType::Enum("CoffeeType".to_string()));
        assert_eq!(
            v.to_json(),
            serde_json::json!({"enum": "CoffeeType", "member": "Espresso"})
        );
        assert_eq!(RuntimeValue::Int(-3).to_json(), serde_json::json!(-3));
    }
}
