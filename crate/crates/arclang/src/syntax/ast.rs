//! Position-annotated abstract syntax for `.arc` model files.

use crate::diag::SourcePos;

/// All component declarations parsed from one source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelUnit {
    pub file: String,
    pub components: Vec<ComponentDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: String,
    /// Position of the `autoconnect` keyword when the flag is present.
    pub autoconnect: Option<SourcePos>,
    pub ports: Vec<PortDecl>,
    pub enums: Vec<EnumDecl>,
    pub subcomponents: Vec<SubcomponentDecl>,
    pub connects: Vec<ConnectDecl>,
    pub state_vars: Vec<StateVarDecl>,
    pub handlers: Vec<HandlerDecl>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub direction: Direction,
    pub type_name: String,
    /// `None` when the port name was omitted; the resolver fills it in.
    pub name: Option<String>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDecl {
    pub name: String,
    /// Member names with their declaration positions; order matters.
    pub members: Vec<(String, SourcePos)>,
    pub pos: SourcePos,
}

/// One instance from a subcomponent declaration; a comma list like
/// `component BeanSensor a, b;` parses into one record per instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcomponentDecl {
    pub type_name: String,
    /// `None` when the instance name was omitted.
    pub instance_name: Option<String>,
    pub inline_connects: Vec<InlineConnect>,
    pub pos: SourcePos,
}

/// `[sourcePort -> target]` attached to a subcomponent instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InlineConnect {
    pub source_port: String,
    pub target: PortRef,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectDecl {
    pub source: PortRef,
    /// At least one target; fan-out lists several.
    pub targets: Vec<PortRef>,
    pub pos: SourcePos,
}

/// `instance.port` or bare `port` (the enclosing component's own port).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub owner: Option<String>,
    pub port: String,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub type_name: String,
    pub name: String,
    /// Restricted to literal expressions by the grammar.
    pub init: Option<Expr>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerDecl {
    /// Surface form `on<X>Received`; checked by the parser.
    pub method_name: String,
    pub param_type: String,
    pub param_name: String,
    pub body: Vec<Stmt>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    /// `target.send(value);` — target kept as a dotted path so the checker
    /// can reject references that reach outside the component.
    Send { target: Vec<String>, value: Expr },
    /// `target = value;`
    Assign { target: Vec<String>, value: Expr },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Str(String),
    /// `EnumType.Member`
    EnumRef {
        ty: String,
        member: String,
    },
    Var(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl Expr {
    /// True for the literal forms admissible as state initializers and
    /// stimulus values.
    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::EnumRef { .. }
        )
    }
}

/// Strips every `SourcePos` in the unit to the dummy position, for
/// structural comparisons that ignore layout (round-trip tests).
pub fn strip_positions(unit: &ModelUnit) -> ModelUnit {
    let d = SourcePos::dummy;
    let strip_ref = |r: &PortRef| PortRef {
        owner: r.owner.clone(),
        port: r.port.clone(),
        pos: d(),
    };
    fn strip_expr(e: &Expr) -> Expr {
        let kind = match &e.kind {
            ExprKind::Unary { op, operand } => ExprKind::Unary {
                op: *op,
                operand: Box::new(strip_expr(operand)),
            },
            ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
                op: *op,
                lhs: Box::new(strip_expr(lhs)),
                rhs: Box::new(strip_expr(rhs)),
            },
            other => other.clone(),
        };
        Expr {
            kind,
            pos: SourcePos::dummy(),
        }
    }
    fn strip_stmt(s: &Stmt) -> Stmt {
        let kind = match &s.kind {
            StmtKind::Send { target, value } => StmtKind::Send {
                target: target.clone(),
                value: strip_expr(value),
            },
            StmtKind::Assign { target, value } => StmtKind::Assign {
                target: target.clone(),
                value: strip_expr(value),
            },
            StmtKind::If {
                cond,
                then_body,
                else_body,
            } => StmtKind::If {
                cond: strip_expr(cond),
                then_body: then_body.iter().map(strip_stmt).collect(),
                else_body: else_body.iter().map(strip_stmt).collect(),
            },
        };
        Stmt {
            kind,
            pos: SourcePos::dummy(),
        }
    }
    ModelUnit {
        file: String::new(),
        components: unit
            .components
            .iter()
            .map(|c| ComponentDecl {
                name: c.name.clone(),
                autoconnect: c.autoconnect.as_ref().map(|_| d()),
                ports: c
                    .ports
                    .iter()
                    .map(|p| PortDecl {
                        direction: p.direction,
                        type_name: p.type_name.clone(),
                        name: p.name.clone(),
                        pos: d(),
                    })
                    .collect(),
                enums: c
                    .enums
                    .iter()
                    .map(|e| EnumDecl {
                        name: e.name.clone(),
                        members: e.members.iter().map(|(m, _)| (m.clone(), d())).collect(),
                        pos: d(),
                    })
                    .collect(),
                subcomponents: c
                    .subcomponents
                    .iter()
                    .map(|s| SubcomponentDecl {
                        type_name: s.type_name.clone(),
                        instance_name: s.instance_name.clone(),
                        inline_connects: s
                            .inline_connects
                            .iter()
                            .map(|ic| InlineConnect {
                                source_port: ic.source_port.clone(),
                                target: strip_ref(&ic.target),
                                pos: d(),
                            })
                            .collect(),
                        pos: d(),
                    })
                    .collect(),
                connects: c
                    .connects
                    .iter()
                    .map(|cn| ConnectDecl {
                        source: strip_ref(&cn.source),
                        targets: cn.targets.iter().map(strip_ref).collect(),
                        pos: d(),
                    })
                    .collect(),
                state_vars: c
                    .state_vars
                    .iter()
                    .map(|v| StateVarDecl {
                        type_name: v.type_name.clone(),
                        name: v.name.clone(),
                        init: v.init.as_ref().map(strip_expr),
                        pos: d(),
                    })
                    .collect(),
                handlers: c
                    .handlers
                    .iter()
                    .map(|h| HandlerDecl {
                        method_name: h.method_name.clone(),
                        param_type: h.param_type.clone(),
                        param_name: h.param_name.clone(),
                        body: h.body.iter().map(strip_stmt).collect(),
                        pos: d(),
                    })
                    .collect(),
                pos: d(),
            })
            .collect(),
    }
}
