//! Recursive-descent parser for `.arc` model files.
//!
//! The parser recovers at `;` and `}` so several problems can be reported in
//! one pass, and it never panics on malformed input.

use crate::diag::{self, has_errors, sort_diagnostics, Diagnostic, SourcePos};
use crate::syntax::ast::*;
use crate::syntax::token::{tokenize, Token, TokenKind};

pub struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn new(tokens: Vec<Token>, lex_diags: Vec<Diagnostic>) -> Self {
        Parser {
            tokens,
            idx: 0,
            diags: lex_diags,
        }
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.idx].kind
    }

    fn peek_n(&self, n: usize) -> &TokenKind {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn pos(&self) -> SourcePos {
        self.tokens[self.idx].pos.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), TokenKind::Eof)
    }

    fn error_here(&mut self, message: String) {
        let pos = self.pos();
        self.diags
            .push(Diagnostic::error(diag::E0103, pos, message));
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> bool {
        if *self.peek() == kind {
            self.bump();
            true
        } else {
            self.error_here(format!("expected {what}, found {}", self.peek()));
            false
        }
    }

    fn expect_ident(&mut self, what: &str) -> Option<(String, SourcePos)> {
        if let TokenKind::Ident(name) = self.peek() {
            let name = name.clone();
            let tok = self.bump();
            Some((name, tok.pos))
        } else {
            self.error_here(format!("expected {what}, found {}", self.peek()));
            None
        }
    }

    /// Skip ahead to just past the next `;`, or to a `}` / end of input
    /// (left unconsumed), so parsing can resume at a clean boundary.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace | TokenKind::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn parse_model_unit(&mut self, file: &str) -> ModelUnit {
        let mut components = Vec::new();
        while !self.at_eof() {
            if matches!(self.peek(), TokenKind::KwComponent) {
                components.push(self.parse_component());
            } else {
                self.error_here(format!(
                    "expected `component` declaration, found {}",
                    self.peek()
                ));
                // Skip to the next plausible declaration start.
                while !self.at_eof() && !matches!(self.peek(), TokenKind::KwComponent) {
                    self.bump();
                }
            }
        }
        ModelUnit {
            file: file.to_string(),
            components,
        }
    }

    fn parse_component(&mut self) -> ComponentDecl {
        let pos = self.pos();
        self.expect(TokenKind::KwComponent, "`component`");
        let name = match self.expect_ident("component name") {
            Some((n, _)) => n,
            None => {
                self.recover();
                String::from("<error>")
            }
        };
        let mut decl = ComponentDecl {
            name,
            autoconnect: None,
            ports: Vec::new(),
            enums: Vec::new(),
            subcomponents: Vec::new(),
            connects: Vec::new(),
            state_vars: Vec::new(),
            handlers: Vec::new(),
            pos,
        };
        if !self.expect(TokenKind::LBrace, "`{`") {
            self.recover();
            return decl;
        }
        loop {
            match self.peek() {
                TokenKind::RBrace => {
                    self.bump();
                    break;
                }
                TokenKind::Eof => {
                    self.error_here("expected `}` to close component body".into());
                    break;
                }
                TokenKind::KwAutoconnect => {
                    let ac_pos = self.pos();
                    self.bump();
                    let ok = self.expect(TokenKind::KwPort, "`port` after `autoconnect`")
                        && self.expect(TokenKind::Semi, "`;`");
                    if ok {
                        if decl.autoconnect.is_none() {
                            decl.autoconnect = Some(ac_pos);
                        }
                    } else {
                        self.recover();
                    }
                }
                TokenKind::KwPort => self.parse_port_section(&mut decl),
                TokenKind::KwEnum => {
                    if let Some(e) = self.parse_enum() {
                        decl.enums.push(e);
                    }
                }
                TokenKind::KwComponent => self.parse_subcomponents(&mut decl),
                TokenKind::KwConnect => {
                    if let Some(c) = self.parse_connect() {
                        decl.connects.push(c);
                    }
                }
                TokenKind::KwState => {
                    if let Some(v) = self.parse_state_var() {
                        decl.state_vars.push(v);
                    }
                }
                TokenKind::KwHandler => {
                    if let Some(h) = self.parse_handler() {
                        decl.handlers.push(h);
                    }
                }
                other => {
                    let msg = format!(
                        "expected component element (`port`, `enum`, `component`, `connect`, \
                         `state`, `handler`, or `autoconnect`), found {other}"
                    );
                    self.error_here(msg);
                    self.recover();
                }
            }
        }
        decl
    }

    fn parse_port_section(&mut self, decl: &mut ComponentDecl) {
        self.expect(TokenKind::KwPort, "`port`");
        loop {
            let pos = self.pos();
            let direction = match self.peek() {
                TokenKind::KwIn => Direction::In,
                TokenKind::KwOut => Direction::Out,
                other => {
                    self.error_here(format!("expected `in` or `out`, found {other}"));
                    self.recover();
                    return;
                }
            };
            self.bump();
            let type_name = match self.expect_ident("port type name") {
                Some((n, _)) => n,
                None => {
                    self.recover();
                    return;
                }
            };
            let name = if let TokenKind::Ident(n) = self.peek() {
                let n = n.clone();
                self.bump();
                Some(n)
            } else {
                None
            };
            decl.ports.push(PortDecl {
                direction,
                type_name,
                name,
                pos,
            });
            match self.peek() {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                other => {
                    self.error_here(format!(
                        "expected `,` or `;` in port section, found {other}"
                    ));
                    self.recover();
                    return;
                }
            }
        }
    }

    fn parse_enum(&mut self) -> Option<EnumDecl> {
        let pos = self.pos();
        self.expect(TokenKind::KwEnum, "`enum`");
        let (name, _) = match self.expect_ident("enum name") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        if !self.expect(TokenKind::LBrace, "`{`") {
            self.recover();
            return None;
        }
        let mut members = Vec::new();
        loop {
            match self.expect_ident("enum member name") {
                Some((m, mpos)) => members.push((m, mpos)),
                None => {
                    self.recover();
                    return None;
                }
            }
            match self.peek() {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RBrace => {
                    self.bump();
                    break;
                }
                other => {
                    self.error_here(format!("expected `,` or `}}` in enum, found {other}"));
                    self.recover();
                    return None;
                }
            }
        }
        Some(EnumDecl { name, members, pos })
    }

    fn parse_subcomponents(&mut self, decl: &mut ComponentDecl) {
        self.expect(TokenKind::KwComponent, "`component`");
        let type_name = match self.expect_ident("subcomponent type name") {
            Some((n, _)) => n,
            None => {
                self.recover();
                return;
            }
        };
        loop {
            let mut pos = self.pos();
            let instance_name = if let TokenKind::Ident(n) = self.peek() {
                let n = n.clone();
                pos = self.pos();
                self.bump();
                Some(n)
            } else {
                None
            };
            let mut inline_connects = Vec::new();
            if matches!(self.peek(), TokenKind::LBracket) {
                if instance_name.is_none() {
                    pos = self.pos();
                }
                self.bump();
                loop {
                    let ic_pos = self.pos();
                    let source_port = match self.expect_ident("inline connector source port") {
                        Some((n, _)) => n,
                        None => {
                            self.recover();
                            return;
                        }
                    };
                    if !self.expect(TokenKind::Arrow, "`->`") {
                        self.recover();
                        return;
                    }
                    let target = match self.parse_port_ref() {
                        Some(r) => r,
                        None => {
                            self.recover();
                            return;
                        }
                    };
                    inline_connects.push(InlineConnect {
                        source_port,
                        target,
                        pos: ic_pos,
                    });
                    match self.peek() {
                        TokenKind::Comma => {
                            self.bump();
                        }
                        TokenKind::RBracket => {
                            self.bump();
                            break;
                        }
                        other => {
                            self.error_here(format!(
                                "expected `,` or `]` in inline connector list, found {other}"
                            ));
                            self.recover();
                            return;
                        }
                    }
                }
            }
            decl.subcomponents.push(SubcomponentDecl {
                type_name: type_name.clone(),
                instance_name,
                inline_connects,
                pos,
            });
            match self.peek() {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                other => {
                    self.error_here(format!(
                        "expected `,` or `;` after subcomponent instance, found {other}"
                    ));
                    self.recover();
                    return;
                }
            }
        }
    }

    /// `portRef := ID ("." ID)?` — deeper dotting is rejected with E0221 and
    /// the extra segments are consumed for recovery.
    fn parse_port_ref(&mut self) -> Option<PortRef> {
        let (first, pos) = self.expect_ident("port reference")?;
        let mut r = PortRef {
            owner: None,
            port: first,
            pos,
        };
        if matches!(self.peek(), TokenKind::Dot) {
            self.bump();
            let (second, _) = self.expect_ident("port name after `.`")?;
            r.owner = Some(std::mem::replace(&mut r.port, second));
        }
        if matches!(self.peek(), TokenKind::Dot) {
            let deep_pos = self.pos();
            let mut full = match &r.owner {
                Some(o) => format!("{o}.{}", r.port),
                None => r.port.clone(),
            };
            while matches!(self.peek(), TokenKind::Dot) {
                self.bump();
                match self.expect_ident("port name after `.`") {
                    Some((seg, _)) => {
                        full.push('.');
                        full.push_str(&seg);
                    }
                    None => break,
                }
            }
            self.diags.push(Diagnostic::error(
                diag::E0221,
                deep_pos,
                format!(
                    "port reference `{full}` is nested too deeply; only own ports and \
                     direct subcomponent ports are addressable"
                ),
            ));
        }
        Some(r)
    }

    fn parse_connect(&mut self) -> Option<ConnectDecl> {
        let pos = self.pos();
        self.expect(TokenKind::KwConnect, "`connect`");
        let source = match self.parse_port_ref() {
            Some(r) => r,
            None => {
                self.recover();
                return None;
            }
        };
        if !self.expect(TokenKind::Arrow, "`->`") {
            self.recover();
            return None;
        }
        let mut targets = Vec::new();
        loop {
            match self.parse_port_ref() {
                Some(r) => targets.push(r),
                None => {
                    self.recover();
                    return None;
                }
            }
            match self.peek() {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::Semi => {
                    self.bump();
                    break;
                }
                other => {
                    self.error_here(format!(
                        "expected `,` or `;` in connect statement, found {other}"
                    ));
                    self.recover();
                    return None;
                }
            }
        }
        Some(ConnectDecl {
            source,
            targets,
            pos,
        })
    }

    fn parse_state_var(&mut self) -> Option<StateVarDecl> {
        let pos = self.pos();
        self.expect(TokenKind::KwState, "`state`");
        let (type_name, _) = match self.expect_ident("state variable type") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        let (name, _) = match self.expect_ident("state variable name") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        let init = if matches!(self.peek(), TokenKind::Assign) {
            self.bump();
            match self.parse_literal() {
                Some(e) => Some(e),
                None => {
                    self.recover();
                    return None;
                }
            }
        } else {
            None
        };
        if !self.expect(TokenKind::Semi, "`;`") {
            self.recover();
            return None;
        }
        Some(StateVarDecl {
            type_name,
            name,
            init,
            pos,
        })
    }

    /// Literal forms allowed in state initializers and stimulus files:
    /// booleans, (signed) integers, strings, `EnumType.Member`.
    fn parse_literal(&mut self) -> Option<Expr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            TokenKind::KwTrue => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::KwFalse => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::Int(v) => {
                self.bump();
                ExprKind::Int(v)
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            TokenKind::Minus => {
                self.bump();
                if let TokenKind::Int(v) = self.peek().clone() {
                    self.bump();
                    ExprKind::Int(v.wrapping_neg())
                } else {
                    self.error_here(format!("expected integer after `-`, found {}", self.peek()));
                    return None;
                }
            }
            TokenKind::Ident(ty) => {
                self.bump();
                if !self.expect(TokenKind::Dot, "`.` in enum literal") {
                    return None;
                }
                let (member, _) = self.expect_ident("enum member")?;
                ExprKind::EnumRef { ty, member }
            }
            other => {
                self.error_here(format!("expected literal, found {other}"));
                return None;
            }
        };
        Some(Expr { kind, pos })
    }

    fn parse_handler(&mut self) -> Option<HandlerDecl> {
        let pos = self.pos();
        self.expect(TokenKind::KwHandler, "`handler`");
        let (method_name, name_pos) = match self.expect_ident("handler name") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        let suffix_ok = method_name.len() > "onReceived".len()
            && method_name.starts_with("on")
            && method_name.ends_with("Received");
        if !suffix_ok {
            self.diags.push(Diagnostic::error(
                diag::E0103,
                name_pos,
                format!("handler name `{method_name}` must have the form `on<Port>Received`"),
            ));
        }
        if !self.expect(TokenKind::LParen, "`(`") {
            self.recover();
            return None;
        }
        let (param_type, _) = match self.expect_ident("parameter type") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        let (param_name, _) = match self.expect_ident("parameter name") {
            Some(v) => v,
            None => {
                self.recover();
                return None;
            }
        };
        if !self.expect(TokenKind::RParen, "`)`") {
            self.recover();
            return None;
        }
        let body = self.parse_block()?;
        Some(HandlerDecl {
            method_name,
            param_type,
            param_name,
            body,
            pos,
        })
    }

    fn parse_block(&mut self) -> Option<Vec<Stmt>> {
        if !self.expect(TokenKind::LBrace, "`{`") {
            self.recover();
            return None;
        }
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                TokenKind::RBrace => {
                    self.bump();
                    return Some(stmts);
                }
                TokenKind::Eof => {
                    self.error_here("expected `}` to close block".into());
                    return Some(stmts);
                }
                _ => {
                    if let Some(s) = self.parse_stmt() {
                        stmts.push(s);
                    }
                }
            }
        }
    }

    fn parse_stmt(&mut self) -> Option<Stmt> {
        let pos = self.pos();
        match self.peek() {
            TokenKind::KwIf => {
                self.bump();
                if !self.expect(TokenKind::LParen, "`(`") {
                    self.recover();
                    return None;
                }
                let cond = self.parse_expr();
                if !self.expect(TokenKind::RParen, "`)`") {
                    self.recover();
                    return None;
                }
                let then_body = self.parse_block()?;
                let else_body = if matches!(self.peek(), TokenKind::KwElse) {
                    self.bump();
                    self.parse_block()?
                } else {
                    Vec::new()
                };
                Some(Stmt {
                    kind: StmtKind::If {
                        cond,
                        then_body,
                        else_body,
                    },
                    pos,
                })
            }
            TokenKind::KwThis | TokenKind::Ident(_) => self.parse_path_stmt(pos),
            other => {
                self.error_here(format!("expected statement, found {other}"));
                self.recover();
                None
            }
        }
    }

    /// Statements that begin with a (possibly `this.`-prefixed) dotted path:
    /// `path.send(expr);` or `path = expr;`.
    fn parse_path_stmt(&mut self, pos: SourcePos) -> Option<Stmt> {
        if matches!(self.peek(), TokenKind::KwThis) {
            self.bump();
            if !self.expect(TokenKind::Dot, "`.` after `this`") {
                self.recover();
                return None;
            }
        }
        let mut target = Vec::new();
        match self.expect_ident("name") {
            Some((n, _)) => target.push(n),
            None => {
                self.recover();
                return None;
            }
        }
        loop {
            match self.peek() {
                TokenKind::Dot => {
                    // `.send(` terminates the path; any other identifier
                    // extends it.
                    if matches!(self.peek_n(1), TokenKind::Ident(n) if n == "send")
                        && matches!(self.peek_n(2), TokenKind::LParen)
                    {
                        self.bump(); // .
                        self.bump(); // send
                        self.bump(); // (
                        let value = self.parse_expr();
                        if !self.expect(TokenKind::RParen, "`)`") {
                            self.recover();
                            return None;
                        }
                        if !self.expect(TokenKind::Semi, "`;`") {
                            self.recover();
                            return None;
                        }
                        return Some(Stmt {
                            kind: StmtKind::Send { target, value },
                            pos,
                        });
                    }
                    self.bump();
                    match self.expect_ident("name after `.`") {
                        Some((n, _)) => target.push(n),
                        None => {
                            self.recover();
                            return None;
                        }
                    }
                }
                TokenKind::Assign => {
                    self.bump();
                    let value = self.parse_expr();
                    if !self.expect(TokenKind::Semi, "`;`") {
                        self.recover();
                        return None;
                    }
                    return Some(Stmt {
                        kind: StmtKind::Assign { target, value },
                        pos,
                    });
                }
                other => {
                    self.error_here(format!(
                        "expected `.send(...)` or `=` after name, found {other}"
                    ));
                    self.recover();
                    return None;
                }
            }
        }
    }

    fn parse_expr(&mut self) -> Expr {
        self.parse_or()
    }

    fn parse_binary_level(
        &mut self,
        next: fn(&mut Self) -> Expr,
        ops: &[(TokenKind, BinOp)],
    ) -> Expr {
        let mut lhs = next(self);
        'outer: loop {
            for (tok, op) in ops {
                if self.peek() == tok {
                    let pos = self.pos();
                    self.bump();
                    let rhs = next(self);
                    lhs = Expr {
                        kind: ExprKind::Binary {
                            op: *op,
                            lhs: Box::new(lhs),
                            rhs: Box::new(rhs),
                        },
                        pos,
                    };
                    continue 'outer;
                }
            }
            return lhs;
        }
    }

    fn parse_or(&mut self) -> Expr {
        self.parse_binary_level(Self::parse_and, &[(TokenKind::OrOr, BinOp::Or)])
    }

    fn parse_and(&mut self) -> Expr {
        self.parse_binary_level(Self::parse_equality, &[(TokenKind::AndAnd, BinOp::And)])
    }

    fn parse_equality(&mut self) -> Expr {
        self.parse_binary_level(
            Self::parse_relational,
            &[(TokenKind::EqEq, BinOp::Eq), (TokenKind::NotEq, BinOp::Ne)],
        )
    }

    fn parse_relational(&mut self) -> Expr {
        self.parse_binary_level(
            Self::parse_additive,
            &[
                (TokenKind::Le, BinOp::Le),
                (TokenKind::Lt, BinOp::Lt),
                (TokenKind::Ge, BinOp::Ge),
                (TokenKind::Gt, BinOp::Gt),
            ],
        )
    }

    fn parse_additive(&mut self) -> Expr {
        self.parse_binary_level(
            Self::parse_multiplicative,
            &[
                (TokenKind::Plus, BinOp::Add),
                (TokenKind::Minus, BinOp::Sub),
            ],
        )
    }

    fn parse_multiplicative(&mut self) -> Expr {
        self.parse_binary_level(
            Self::parse_unary,
            &[
                (TokenKind::Star, BinOp::Mul),
                (TokenKind::Slash, BinOp::Div),
            ],
        )
    }

    fn parse_unary(&mut self) -> Expr {
        let pos = self.pos();
        let op = match self.peek() {
            TokenKind::Not => UnaryOp::Not,
            TokenKind::Minus => UnaryOp::Neg,
            _ => return self.parse_primary(),
        };
        self.bump();
        let operand = self.parse_unary();
        Expr {
            kind: ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
            pos,
        }
    }

    fn parse_primary(&mut self) -> Expr {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            TokenKind::KwTrue => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::KwFalse => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::Int(v) => {
                self.bump();
                ExprKind::Int(v)
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            TokenKind::LParen => {
                self.bump();
                let e = self.parse_expr();
                self.expect(TokenKind::RParen, "`)`");
                return e;
            }
            TokenKind::KwThis => {
                self.bump();
                if !self.expect(TokenKind::Dot, "`.` after `this`") {
                    ExprKind::Bool(false)
                } else {
                    match self.expect_ident("name after `this.`") {
                        Some((n, _)) => ExprKind::Var(n),
                        None => ExprKind::Bool(false),
                    }
                }
            }
            TokenKind::Ident(name) => {
                self.bump();
                if matches!(self.peek(), TokenKind::Dot) {
                    self.bump();
                    match self.expect_ident("enum member after `.`") {
                        Some((member, _)) => ExprKind::EnumRef { ty: name, member },
                        None => ExprKind::Var(name),
                    }
                } else {
                    ExprKind::Var(name)
                }
            }
            other => {
                self.error_here(format!("expected expression, found {other}"));
                // Poison value; the caller's recovery skips the bad token.
                ExprKind::Bool(false)
            }
        };
        Expr { kind, pos }
    }
}

/// Parse one source file into a [`ModelUnit`]. Returns every diagnostic
/// (lexical and syntactic) if any error was found.
pub fn parse_model(source: &str, file: &str) -> Result<ModelUnit, Vec<Diagnostic>> {
    let (tokens, lex_diags) = tokenize(source, file);
    let mut p = Parser::new(tokens, lex_diags);
    let unit = p.parse_model_unit(file);
    let mut diags = p.diags;
    sort_diagnostics(&mut diags);
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok(unit)
    }
}

/// Parse a single literal expression (used by stimulus parsing).
pub(crate) fn parse_literal_tokens(
    tokens: Vec<Token>,
    lex_diags: Vec<Diagnostic>,
) -> Result<Expr, Vec<Diagnostic>> {
    let mut p = Parser::new(tokens, lex_diags);
    let lit = p.parse_literal();
    let at_end = p.at_eof();
    let mut diags = p.diags;
    match lit {
        Some(e) if at_end && diags.is_empty() => Ok(e),
        Some(_) if diags.is_empty() => {
            let pos = p.tokens[p.idx].pos.clone();
            diags.push(Diagnostic::error(
                diag::E0103,
                pos,
                format!("unexpected {} after literal", p.tokens[p.idx].kind),
            ));
            Err(diags)
        }
        _ => Err(diags),
    }
}
