//! Diagnostics: source positions, severities, and the error/warning record
//! shared by every compiler phase.

use std::fmt;
use std::sync::Arc;

/// A 1-based line/column position inside a named source file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePos {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl SourcePos {
    pub fn new(file: &str, line: u32, col: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        SourcePos {
            file: Arc::from(file),
            line,
            col,
        }
    }

    /// Placeholder position used by tests and synthesized nodes.
    pub fn dummy() -> Self {
        SourcePos {
            file: Arc::from(""),
            line: 1,
            col: 1,
        }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// One reported problem. Rendered as `<severity> <code> <file>:<line>:<col> <message>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub pos: SourcePos,
}

impl Diagnostic {
    pub fn error(code: &'static str, pos: SourcePos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            pos,
        }
    }

    pub fn warning(code: &'static str, pos: SourcePos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            pos,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.severity, self.code, self.pos, self.message
        )
    }
}

/// True if the list contains at least one error.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// Stable output order: position first, then code, then message.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| (&a.pos, a.code, &a.message).cmp(&(&b.pos, b.code, &b.message)));
    diags.dedup();
}

// Lexical and syntactic errors.
pub const E0101: &str = "E0101"; // unterminated string literal
pub const E0102: &str = "E0102"; // illegal character
pub const E0103: &str = "E0103"; // syntax error
pub const E0104: &str = "E0104"; // malformed stimulus line
pub const E0105: &str = "E0105"; // integer literal out of range
pub const E0106: &str = "E0106"; // invalid escape sequence

// Symbol, naming, and behavior checks.
pub const E0201: &str = "E0201"; // duplicate component name
pub const E0202: &str = "E0202"; // duplicate enum name
pub const E0203: &str = "E0203"; // default port name not unique
pub const E0204: &str = "E0204"; // default instance name not unique
pub const E0205: &str = "E0205"; // structural and behavioral elements mixed
pub const E0206: &str = "E0206"; // handler has no matching in-port
pub const E0207: &str = "E0207"; // handler parameter type mismatch
pub const E0208: &str = "E0208"; // duplicate handler for a port
pub const E0209: &str = "E0209"; // behavior type error
pub const E0210: &str = "E0210"; // reading an undeclared name
pub const E0211: &str = "E0211"; // send on an in-port or nonexistent port
pub const E0212: &str = "E0212"; // state variable without a default needs an initializer
pub const E0213: &str = "E0213"; // unknown type name
pub const E0214: &str = "E0214"; // duplicate port name
pub const E0215: &str = "E0215"; // duplicate instance name
pub const E0216: &str = "E0216"; // duplicate state variable name
pub const E0217: &str = "E0217"; // duplicate enum member
pub const E0220: &str = "E0220"; // foreign reference in handler body
pub const E0221: &str = "E0221"; // port reference nested deeper than one instance

// Architecture elaboration.
pub const E0301: &str = "E0301"; // unknown subcomponent type
pub const E0302: &str = "E0302"; // recursive component containment
pub const E0303: &str = "E0303"; // unknown instance or port in a connector
pub const E0304: &str = "E0304"; // ambiguous autoconnect
pub const E0305: &str = "E0305"; // illegal connector direction pair
pub const E0306: &str = "E0306"; // connector type mismatch
pub const E0307: &str = "E0307"; // two connectors feed one target
pub const E0308: &str = "E0308"; // structural routing cycle
pub const W0301: &str = "W0301"; // port without any connector
