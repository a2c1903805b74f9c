//! Lexer for `.arc` sources.

use std::fmt;
use std::sync::Arc;

use crate::diag::{self, Diagnostic, SourcePos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    KwComponent,
    KwAutoconnect,
    KwPort,
    KwIn,
    KwOut,
    KwEnum,
    KwConnect,
    KwState,
    KwHandler,
    KwIf,
    KwElse,
    KwThis,
    KwTrue,
    KwFalse,
    Ident(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Arrow,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Not,
    AndAnd,
    OrOr,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::KwComponent => "`component`",
            TokenKind::KwAutoconnect => "`autoconnect`",
            TokenKind::KwPort => "`port`",
            TokenKind::KwIn => "`in`",
            TokenKind::KwOut => "`out`",
            TokenKind::KwEnum => "`enum`",
            TokenKind::KwConnect => "`connect`",
            TokenKind::KwState => "`state`",
            TokenKind::KwHandler => "`handler`",
            TokenKind::KwIf => "`if`",
            TokenKind::KwElse => "`else`",
            TokenKind::KwThis => "`this`",
            TokenKind::KwTrue => "`true`",
            TokenKind::KwFalse => "`false`",
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Int(v) => return write!(f, "integer `{v}`"),
            TokenKind::Str(_) => "string literal",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::Semi => "`;`",
            TokenKind::Comma => "`,`",
            TokenKind::Dot => "`.`",
            TokenKind::Arrow => "`->`",
            TokenKind::Assign => "`=`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::Lt => "`<`",
            TokenKind::Le => "`<=`",
            TokenKind::Gt => "`>`",
            TokenKind::Ge => "`>=`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Not => "`!`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: SourcePos,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "component" => TokenKind::KwComponent,
        "autoconnect" => TokenKind::KwAutoconnect,
        "port" => TokenKind::KwPort,
        "in" => TokenKind::KwIn,
        "out" => TokenKind::KwOut,
        "enum" => TokenKind::KwEnum,
        "connect" => TokenKind::KwConnect,
        "state" => TokenKind::KwState,
        "handler" => TokenKind::KwHandler,
        "if" => TokenKind::KwIf,
        "else" => TokenKind::KwElse,
        "this" => TokenKind::KwThis,
        "true" => TokenKind::KwTrue,
        "false" => TokenKind::KwFalse,
        _ => return None,
    })
}

/// True for words the lexer maps to keyword tokens (useful to generators).
pub fn is_keyword(word: &str) -> bool {
    keyword(word).is_some()
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: Arc<str>,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
    diags: Vec<Diagnostic>,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str, file: &str) -> Self {
        Lexer {
            chars: source.chars().peekable(),
            file: Arc::from(file),
            line: 1,
            col: 1,
            tokens: Vec::new(),
            diags: Vec::new(),
        }
    }

    fn pos(&self) -> SourcePos {
        SourcePos {
            file: self.file.clone(),
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn push(&mut self, kind: TokenKind, pos: SourcePos) {
        self.tokens.push(Token { kind, pos });
    }

    fn error(&mut self, code: &'static str, pos: SourcePos, msg: String) {
        self.diags.push(Diagnostic::error(code, pos, msg));
    }

    fn lex_string(&mut self, start: SourcePos) {
        // Opening quote already consumed.
        let mut text = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.error(
                        diag::E0101,
                        start.clone(),
                        "unterminated string literal".into(),
                    );
                    break;
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let esc_pos = self.pos();
                    self.bump();
                    match self.peek() {
                        Some('"') => {
                            text.push('"');
                            self.bump();
                        }
                        Some('\\') => {
                            text.push('\\');
                            self.bump();
                        }
                        Some('n') => {
                            text.push('\n');
                            self.bump();
                        }
                        Some('t') => {
                            text.push('\t');
                            self.bump();
                        }
                        Some(other) if other != '\n' => {
                            self.error(
                                diag::E0106,
                                esc_pos,
                                format!("invalid escape sequence `\\{other}` in string literal"),
                            );
                            text.push(other);
                            self.bump();
                        }
                        _ => {
                            // Backslash at end of line/input: fall through to the
                            // unterminated-string report on the next iteration.
                        }
                    }
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
            }
        }
        self.push(TokenKind::Str(text), start);
    }

    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        while let Some(c) = self.peek() {
            let pos = self.pos();
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '/' => {
                    self.bump();
                    if self.peek() == Some('/') {
                        while let Some(c) = self.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    } else {
                        self.push(TokenKind::Slash, pos);
                    }
                }
                '"' => {
                    self.bump();
                    self.lex_string(pos);
                }
                c if c.is_ascii_digit() => {
                    let mut text = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            text.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    match text.parse::<i64>() {
                        Ok(v) => self.push(TokenKind::Int(v), pos),
                        Err(_) => {
                            self.error(
                                diag::E0105,
                                pos.clone(),
                                format!("integer literal `{text}` does not fit in 64 bits"),
                            );
                            self.push(TokenKind::Int(0), pos);
                        }
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut word = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
                    self.push(kind, pos);
                }
                '{' => {
                    self.bump();
                    self.push(TokenKind::LBrace, pos);
                }
                '}' => {
                    self.bump();
                    self.push(TokenKind::RBrace, pos);
                }
                '(' => {
                    self.bump();
                    self.push(TokenKind::LParen, pos);
                }
                ')' => {
                    self.bump();
                    self.push(TokenKind::RParen, pos);
                }
                '[' => {
                    self.bump();
                    self.push(TokenKind::LBracket, pos);
                }
                ']' => {
                    self.bump();
                    self.push(TokenKind::RBracket, pos);
                }
                ';' => {
                    self.bump();
                    self.push(TokenKind::Semi, pos);
                }
                ',' => {
                    self.bump();
                    self.push(TokenKind::Comma, pos);
                }
                '.' => {
                    self.bump();
                    self.push(TokenKind::Dot, pos);
                }
                '-' => {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        self.push(TokenKind::Arrow, pos);
                    } else {
                        self.push(TokenKind::Minus, pos);
                    }
                }
                '=' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(TokenKind::EqEq, pos);
                    } else {
                        self.push(TokenKind::Assign, pos);
                    }
                }
                '!' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(TokenKind::NotEq, pos);
                    } else {
                        self.push(TokenKind::Not, pos);
                    }
                }
                '<' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(TokenKind::Le, pos);
                    } else {
                        self.push(TokenKind::Lt, pos);
                    }
                }
                '>' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(TokenKind::Ge, pos);
                    } else {
                        self.push(TokenKind::Gt, pos);
                    }
                }
                '+' => {
                    self.bump();
                    self.push(TokenKind::Plus, pos);
                }
                '*' => {
                    self.bump();
                    self.push(TokenKind::Star, pos);
                }
                '&' => {
                    self.bump();
                    if self.peek() == Some('&') {
                        self.bump();
                        self.push(TokenKind::AndAnd, pos);
                    } else {
                        self.error(
                            diag::E0102,
                            pos,
                            "illegal character `&` (did you mean `&&`?)".into(),
                        );
                    }
                }
                '|' => {
                    self.bump();
                    if self.peek() == Some('|') {
                        self.bump();
                        self.push(TokenKind::OrOr, pos);
                    } else {
                        self.error(
                            diag::E0102,
                            pos,
                            "illegal character `|` (did you mean `||`?)".into(),
                        );
                    }
                }
                other => {
                    self.bump();
                    self.error(
                        diag::E0102,
                        pos,
                        format!("illegal character `{}`", other.escape_default()),
                    );
                }
            }
        }
        let eof_pos = self.pos();
        self.push(TokenKind::Eof, eof_pos);
        (self.tokens, self.diags)
    }
}

/// Tokenize a source text. Always returns the token stream (ending in `Eof`)
/// together with any lexical diagnostics; recovery skips offending characters.
pub fn tokenize(source: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    Lexer::new(source, file).run()
}
