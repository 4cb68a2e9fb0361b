//! Token stream shared by the formula parser and the model-file parser.

use super::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `?Name` — an activity variable reference.
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Comma,
    DotDot,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(s) => format!("`?{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Bang => "`!`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

/// A token plus the line/column (both 1-based) where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// `true` when `s` is a well-formed identifier: `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Tokenize `text`. `#` starts a comment running to end of line.
pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Spanned { tok: $tok, line, column: col });
            i += $len;
            col += $len;
        }};
    }

    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '{' => push!(Tok::LBrace, 1),
            '}' => push!(Tok::RBrace, 1),
            ':' => push!(Tok::Colon, 1),
            ',' => push!(Tok::Comma, 1),
            '!' => push!(Tok::Bang, 1),
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::Le, 2)
                } else {
                    push!(Tok::Lt, 1)
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::Ge, 2)
                } else {
                    push!(Tok::Gt, 1)
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    push!(Tok::EqEq, 2)
                } else {
                    return Err(syntax(line, col, "`=` is not an operator; use `==` for equality"));
                }
            }
            '&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    push!(Tok::AndAnd, 2)
                } else {
                    return Err(syntax(line, col, "`&` is not an operator; use `&&`"));
                }
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    push!(Tok::OrOr, 2)
                } else {
                    return Err(syntax(line, col, "`|` is not an operator; use `||`"));
                }
            }
            '.' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    push!(Tok::DotDot, 2)
                } else {
                    return Err(syntax(line, col, "unexpected `.`"));
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    push!(Tok::Arrow, 2)
                } else if bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
                    let start = i;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text = &text[start..i];
                    let n: i64 = text.parse().map_err(|_| {
                        syntax(line, col, format!("integer literal `{text}` out of range"))
                    })?;
                    out.push(Spanned { tok: Tok::Int(n), line, column: col });
                    col += i - start;
                }
                else {
                    return Err(syntax(line, col, "`-` must start a negative integer or `->`"));
                }
            }
            '?' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let name = &text[start..j];
                if !is_identifier(name) {
                    return Err(syntax(line, col, "`?` must be followed by a variable name"));
                }
                out.push(Spanned { tok: Tok::Var(name.to_string()), line, column: col });
                col += j - i;
                i = j;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n: i64 = digits.parse().map_err(|_| {
                    syntax(line, col, format!("integer literal `{digits}` out of range"))
                })?;
                out.push(Spanned { tok: Tok::Int(n), line, column: col });
                col += i - start;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(text[start..i].to_string()),
                    line,
                    column: col,
                });
                col += i - start;
            }
            other => {
                return Err(syntax(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}
