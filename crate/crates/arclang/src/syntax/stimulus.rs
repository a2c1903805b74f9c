//! Stimulus-file parsing: one `<portName> <literal>` pair per line,
//! `#` starts a comment line, blank lines are skipped.

use crate::diag::{self, Diagnostic, SourcePos};
use crate::syntax::ast::Expr;
use crate::syntax::parser::parse_literal_tokens;
use crate::syntax::token::{tokenize, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stimulus {
    pub port: String,
    pub value: Expr,
    pub pos: SourcePos,
}

/// Parse a stimulus file. Malformed lines are reported as E0104 with the
/// offending line number; parsing continues so every bad line is reported.
pub fn parse_stimulus(source: &str, file: &str) -> Result<Vec<Stimulus>, Vec<Diagnostic>> {
    let mut stimuli = Vec::new();
    let mut diags = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = (i + 1) as u32;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let line_pos = SourcePos::new(file, line_no, 1);
        // Lex the whole line so string literals may contain spaces.
        let (mut tokens, lex_diags) = tokenize(line, file);
        if !lex_diags.is_empty() {
            diags.push(Diagnostic::error(
                diag::E0104,
                SourcePos::new(file, line_no, lex_diags[0].pos.col),
                format!("malformed stimulus line: {}", lex_diags[0].message),
            ));
            continue;
        }
        // Rebase token positions from the lexer's line 1 onto the real line.
        for t in &mut tokens {
            t.pos = SourcePos::new(file, line_no, t.pos.col);
        }
        let port = match tokens.first().map(|t| t.kind.clone()) {
            Some(TokenKind::Ident(name)) => name,
            _ => {
                diags.push(Diagnostic::error(
                    diag::E0104,
                    line_pos,
                    "malformed stimulus line: expected `<port> <literal>`",
                ));
                continue;
            }
        };
        let rest: Vec<_> = tokens.into_iter().skip(1).collect();
        match parse_literal_tokens(rest, Vec::new()) {
            Ok(value) => stimuli.push(Stimulus {
                port,
                value,
                pos: line_pos,
            }),
            Err(errs) => {
                let detail = errs
                    .first()
                    .map(|d| d.message.clone())
                    .unwrap_or_else(|| "expected a literal value".into());
                diags.push(Diagnostic::error(
                    diag::E0104,
                    SourcePos::new(file, line_no, errs.first().map(|d| d.pos.col).unwrap_or(1)),
                    format!("malformed stimulus line: {detail}"),
                ));
            }
        }
    }
    if diags.is_empty() {
        Ok(stimuli)
    } else {
        Err(diags)
    }
}
