//! Pretty-printer for parsed model units. Re-parsing the output yields a
//! structurally identical AST (positions aside), which the round-trip
//! property test relies on.

use std::fmt::Write;

use crate::syntax::ast::*;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

fn ref_str(r: &PortRef) -> String {
    match &r.owner {
        Some(o) => format!("{o}.{}", r.port),
        None => r.port.clone(),
    }
}

/// Expressions print fully parenthesized so precedence survives re-parsing.
pub fn expr_str(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Bool(true) => "true".into(),
        ExprKind::Bool(false) => "false".into(),
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Str(s) => format!("\"{}\"", escape(s)),
        ExprKind::EnumRef { ty, member } => format!("{ty}.{member}"),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Unary { op, operand } => {
            let sym = match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            };
            format!("({sym}{})", expr_str(operand))
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let sym = match op {
                BinOp::Or => "||",
                BinOp::And => "&&",
                BinOp::Eq => "==",
                BinOp::Ne => "!=",
                BinOp::Lt => "<",
                BinOp::Le => "<=",
                BinOp::Gt => ">",
                BinOp::Ge => ">=",
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
            };
            format!("({} {sym} {})", expr_str(lhs), expr_str(rhs))
        }
    }
}

fn write_stmt(out: &mut String, s: &Stmt, indent: usize) {
    let pad = "  ".repeat(indent);
    match &s.kind {
        StmtKind::Send { target, value } => {
            let _ = writeln!(out, "{pad}{}.send({});", target.join("."), expr_str(value));
        }
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{pad}{} = {};", target.join("."), expr_str(value));
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
        } => {
            let _ = writeln!(out, "{pad}if ({}) {{", expr_str(cond));
            for st in then_body {
                write_stmt(out, st, indent + 1);
            }
            if else_body.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                for st in else_body {
                    write_stmt(out, st, indent + 1);
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
    }
}

pub fn print_component(c: &ComponentDecl) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "component {} {{", c.name);
    if c.autoconnect.is_some() {
        let _ = writeln!(out, "  autoconnect port;");
    }
    for p in &c.ports {
        let dir = match p.direction {
            Direction::In => "in",
            Direction::Out => "out",
        };
        match &p.name {
            Some(n) => {
                let _ = writeln!(out, "  port {dir} {} {n};", p.type_name);
            }
            None => {
                let _ = writeln!(out, "  port {dir} {};", p.type_name);
            }
        }
    }
    for e in &c.enums {
        let members: Vec<&str> = e.members.iter().map(|(m, _)| m.as_str()).collect();
        let _ = writeln!(out, "  enum {} {{ {} }}", e.name, members.join(", "));
    }
    for s in &c.subcomponents {
        let mut line = format!("  component {}", s.type_name);
        if let Some(n) = &s.instance_name {
            line.push(' ');
            line.push_str(n);
        }
        if !s.inline_connects.is_empty() {
            let inlines: Vec<String> = s
                .inline_connects
                .iter()
                .map(|ic| format!("{} -> {}", ic.source_port, ref_str(&ic.target)))
                .collect();
            line.push_str(&format!(" [{}]", inlines.join(", ")));
        }
        line.push(';');
        let _ = writeln!(out, "{line}");
    }
    for cn in &c.connects {
        let targets: Vec<String> = cn.targets.iter().map(ref_str).collect();
        let _ = writeln!(
            out,
            "  connect {} -> {};",
            ref_str(&cn.source),
            targets.join(", ")
        );
    }
    for v in &c.state_vars {
        match &v.init {
            Some(init) => {
                let _ = writeln!(
                    out,
                    "  state {} {} = {};",
                    v.type_name,
                    v.name,
                    expr_str(init)
                );
            }
            None => {
                let _ = writeln!(out, "  state {} {};", v.type_name, v.name);
            }
        }
    }
    for h in &c.handlers {
        let _ = writeln!(
            out,
            "  handler {}({} {}) {{",
            h.method_name, h.param_type, h.param_name
        );
        for st in &h.body {
            write_stmt(&mut out, st, 2);
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    out
}

pub fn print_model(unit: &ModelUnit) -> String {
    let mut out = String::new();
    for (i, c) in unit.components.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&print_component(c));
    }
    out
}
