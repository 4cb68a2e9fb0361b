//! A light syntax checker for emitted programs.
//!
//! This is a safety net over the emitters, not a full grounder front-end:
//! it tokenizes a program and checks every statement against the shapes
//! the emitters produce — facts, rules, integrity constraints, choice
//! heads, `not` literals, builtin comparisons, `lo..hi` ranges and `#show`
//! directives. One statement per period; `%` starts a line comment.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SyntaxIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    /// Lowercase-initial constant or predicate name.
    Name(String),
    /// Uppercase-initial or `_`-initial program variable.
    Var(String),
    Int(String),
    Str,
    Directive(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    If,
    Cmp(&'static str),
    Plus,
    Minus,
    Slash,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Var(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Str => write!(f, "string"),
            Tok::Directive(d) => write!(f, "`#{d}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::DotDot => write!(f, "`..`"),
            Tok::If => write!(f, "`:-`"),
            Tok::Cmp(c) => write!(f, "`{c}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Slash => write!(f, "`/`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxIssue> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut it = text.chars().peekable();
    let issue = |line: usize, message: String| SyntaxIssue { line, message };
    while let Some(c) = it.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '%' => while it.next_if(|&d| d != '\n').is_some() {},
            '(' => out.push((line, Tok::LParen)),
            ')' => out.push((line, Tok::RParen)),
            '{' => out.push((line, Tok::LBrace)),
            '}' => out.push((line, Tok::RBrace)),
            ',' => out.push((line, Tok::Comma)),
            ';' => out.push((line, Tok::Semi)),
            '/' => out.push((line, Tok::Slash)),
            '+' => out.push((line, Tok::Plus)),
            '-' => out.push((line, Tok::Minus)),
            ':' => {
                if it.next_if_eq(&'-').is_some() {
                    out.push((line, Tok::If));
                } else {
                    out.push((line, Tok::Colon));
                }
            }
            '.' => {
                if it.next_if_eq(&'.').is_some() {
                    out.push((line, Tok::DotDot));
                } else {
                    out.push((line, Tok::Dot));
                }
            }
            '=' => {
                if it.next_if_eq(&'=').is_some() {
                    out.push((line, Tok::Cmp("==")));
                } else {
                    out.push((line, Tok::Cmp("=")));
                }
            }
            '!' => {
                if it.next_if_eq(&'=').is_some() {
                    out.push((line, Tok::Cmp("!=")));
                } else {
                    return Err(issue(line, "`!` must be part of `!=`".into()));
                }
            }
            '<' => {
                if it.next_if_eq(&'=').is_some() {
                    out.push((line, Tok::Cmp("<=")));
                } else {
                    out.push((line, Tok::Cmp("<")));
                }
            }
            '>' => {
                if it.next_if_eq(&'=').is_some() {
                    out.push((line, Tok::Cmp(">=")));
                } else {
                    out.push((line, Tok::Cmp(">")));
                }
            }
            '"' => loop {
                match it.next() {
                    None => return Err(issue(line, "unterminated string".into())),
                    Some('\n') => return Err(issue(line, "newline inside string".into())),
                    Some('\\') => {
                        if it.next().is_none() {
                            return Err(issue(line, "unterminated string".into()));
                        }
                    }
                    Some('"') => {
                        out.push((line, Tok::Str));
                        break;
                    }
                    Some(_) => {}
                }
            },
            '#' => {
                let mut name = String::new();
                while let Some(d) = it.next_if(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    name.push(d);
                }
                if name.is_empty() {
                    return Err(issue(line, "`#` must start a directive name".into()));
                }
                out.push((line, Tok::Directive(name)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::from(c);
                while let Some(d) = it.next_if(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    name.push(d);
                }
                if c.is_ascii_lowercase() {
                    out.push((line, Tok::Name(name)));
                } else {
                    out.push((line, Tok::Var(name)));
                }
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::from(c);
                while let Some(d) = it.next_if(|d| d.is_ascii_digit()) {
                    digits.push(d);
                }
                out.push((line, Tok::Int(digits)));
            }
            other => return Err(issue(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|(l, _)| *l)
            .unwrap_or(0)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> SyntaxIssue {
        SyntaxIssue { line: self.line(), message: message.into() }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), SyntaxIssue> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want} before the period"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

#[derive(PartialEq)]
enum TermKind {
    /// A name, possibly applied to arguments — usable as an atom.
    Atom,
    /// Anything else: variable, number, string, arithmetic, range.
    Other,
}

fn parse_term(c: &mut Cursor) -> Result<TermKind, SyntaxIssue> {
    let mut kind = parse_prim(c)?;
    while matches!(c.peek(), Some(Tok::Plus | Tok::Minus | Tok::DotDot)) {
        c.next();
        parse_prim(c)?;
        kind = TermKind::Other;
    }
    Ok(kind)
}

fn parse_prim(c: &mut Cursor) -> Result<TermKind, SyntaxIssue> {
    match c.next() {
        Some(Tok::Int(_)) | Some(Tok::Var(_)) | Some(Tok::Str) => Ok(TermKind::Other),
        Some(Tok::Minus) => match c.next() {
            Some(Tok::Int(_)) => Ok(TermKind::Other),
            _ => Err(c.err("`-` must be followed by a number")),
        },
        Some(Tok::Name(_)) => {
            if c.eat(&Tok::LParen) {
                parse_term(c)?;
                while c.eat(&Tok::Comma) {
                    parse_term(c)?;
                }
                c.expect(&Tok::RParen)?;
            }
            Ok(TermKind::Atom)
        }
        Some(t) => Err(c.err(format!("expected a term, found {t}"))),
        None => Err(c.err("expected a term before the period")),
    }
}

fn parse_atom(c: &mut Cursor) -> Result<(), SyntaxIssue> {
    match c.peek() {
        Some(Tok::Name(_)) => {
            if parse_prim(c)? != TermKind::Atom {
                return Err(c.err("expected an atom"));
            }
            Ok(())
        }
        Some(t) => Err(c.err(format!("an atom must start with a lowercase name, found {t}"))),
        None => Err(c.err("expected an atom before the period")),
    }
}

/// `not atom`, a builtin comparison between terms, or a plain atom.
fn parse_literal(c: &mut Cursor) -> Result<(), SyntaxIssue> {
    if let Some(Tok::Name(n)) = c.peek() {
        if n == "not" {
            c.next();
            return parse_atom(c);
        }
    }
    let kind = parse_term(c)?;
    if let Some(Tok::Cmp(_)) = c.peek() {
        c.next();
        parse_term(c)?;
        return Ok(());
    }
    if kind != TermKind::Atom {
        return Err(c.err("expected an atom or a comparison"));
    }
    Ok(())
}

/// `[lower] { atom [: literals] ; ... } [upper]`.
fn parse_choice(c: &mut Cursor) -> Result<(), SyntaxIssue> {
    if let Some(Tok::Int(_)) = c.peek() {
        c.next();
    }
    c.expect(&Tok::LBrace)?;
    loop {
        parse_atom(c)?;
        if c.eat(&Tok::Colon) {
            parse_literal(c)?;
            while c.eat(&Tok::Comma) {
                parse_literal(c)?;
            }
        }
        if !c.eat(&Tok::Semi) {
            break;
        }
    }
    c.expect(&Tok::RBrace)?;
    if let Some(Tok::Int(_)) = c.peek() {
        c.next();
    }
    Ok(())
}

fn parse_statement(toks: &[(usize, Tok)]) -> Result<(), SyntaxIssue> {
    let mut c = Cursor { toks, pos: 0 };
    if let Some(Tok::Directive(d)) = c.peek() {
        if d != "show" {
            return Err(c.err(format!("unsupported directive `#{d}`")));
        }
        c.next();
        parse_atom(&mut c)?;
        c.expect(&Tok::Slash)?;
        match c.next() {
            Some(Tok::Int(_)) => {}
            _ => return Err(c.err("expected an arity after `/`")),
        }
    } else {
        let has_head = !matches!(c.peek(), Some(Tok::If));
        if has_head {
            if matches!(c.peek(), Some(Tok::LBrace)) || starts_choice(&c) {
                parse_choice(&mut c)?;
            } else {
                parse_atom(&mut c)?;
            }
        }
        if c.eat(&Tok::If) {
            parse_literal(&mut c)?;
            while c.eat(&Tok::Comma) {
                parse_literal(&mut c)?;
            }
        }
    }
    if !c.at_end() {
        let t = c.peek().expect("not at end");
        return Err(c.err(format!("unexpected {t} before the period")));
    }
    Ok(())
}

/// `1 {` starts a choice; a bare integer head does not occur.
fn starts_choice(c: &Cursor) -> bool {
    matches!(c.peek(), Some(Tok::Int(_)))
        && matches!(c.toks.get(c.pos + 1).map(|(_, t)| t), Some(Tok::LBrace))
}

/// Check that every statement of the program is well-formed. Returns the
/// first problem found, with its line number.
pub fn check_syntax(program: &str) -> Result<(), SyntaxIssue> {
    let toks = tokenize(program)?;
    let mut start = 0usize;
    for (i, (line, tok)) in toks.iter().enumerate() {
        if *tok == Tok::Dot {
            if i == start {
                return Err(SyntaxIssue { line: *line, message: "empty statement".into() });
            }
            parse_statement(&toks[start..i])?;
            start = i + 1;
        }
    }
    if start < toks.len() {
        return Err(SyntaxIssue {
            line: toks[toks.len() - 1].0,
            message: "statement does not end with a period".into(),
        });
    }
    Ok(())
}
