//! The model-file syntax: activity declarations plus constraints.
//!
//! ```text
//! activity a { n: int 0..9, status: enum { low, mid, high } }
//! activity b {}
//!
//! constraint G((a && n < 5) -> F b)
//! ```
//!
//! The attribute block may be omitted for activities without attributes,
//! and a trailing comma is allowed after the last attribute or
//! enumeration value. Items may appear in any order: every constraint is
//! resolved against the complete vocabulary, so it may mention
//! activities declared further down. `#` starts a comment.

use thiserror::Error;

use crate::formula::{
    is_identifier, lex, parse_formula_tokens, resolve, Formula, FormulaError, Tok, TokenCursor,
    RESERVED,
};
use crate::model::{ActivitySignature, AttributeType, ModelError};
use crate::ProcessModel;

/// Words with a fixed meaning in the model-file grammar; they cannot
/// name activities, attributes or enumeration values. The formula
/// grammar's reserved words are excluded as well.
const KEYWORDS: [&str; 4] = ["activity", "constraint", "int", "enum"];

/// A model file that could not be parsed.
#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// A declaration breaks a vocabulary rule (duplicate names, empty
    /// domains).
    #[error("line {line}: {source}")]
    BadDeclaration {
        line: usize,
        #[source]
        source: ModelError,
    },
    /// A constraint parsed but does not type-check against the
    /// declared vocabulary.
    #[error("line {line}: {source}")]
    BadConstraint {
        line: usize,
        #[source]
        source: FormulaError,
    },
}

impl From<FormulaError> for ModelFileError {
    /// Formula-level syntax errors carry their own position; anything
    /// else is reported where the caller anchors it.
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Syntax { line, column, message } => {
                ModelFileError::Syntax { line, column, message }
            }
            other => ModelFileError::BadConstraint { line: 0, source: other },
        }
    }
}

/// Parse a complete model file.
pub fn parse_model(text: &str) -> Result<ProcessModel, ModelFileError> {
    let toks = lex(text)?;
    let mut cur = TokenCursor::new(&toks);
    let mut signatures: Vec<ActivitySignature> = Vec::new();
    let mut pending: Vec<(usize, Formula)> = Vec::new();

    while let Some(s) = cur.peek() {
        match &s.tok {
            Tok::Ident(word) if word == "activity" => {
                let line = s.line;
                cur.bump();
                let sig = parse_activity(&mut cur, line)?;
                if signatures.iter().any(|s| s.name() == sig.name()) {
                    return Err(ModelFileError::BadDeclaration {
                        line,
                        source: ModelError::DuplicateActivity {
                            activity: sig.name().to_string(),
                        },
                    });
                }
                signatures.push(sig);
            }
            Tok::Ident(word) if word == "constraint" => {
                let line = s.line;
                cur.bump();
                pending.push((line, parse_formula_tokens(&mut cur)?));
            }
            other => {
                return Err(ModelFileError::Syntax {
                    line: s.line,
                    column: s.column,
                    message: format!("expected `activity` or `constraint`, found {}", other.describe()),
                });
            }
        }
    }

    let vocabulary = crate::model::ProcessVocabulary::new(signatures)
        .map_err(|source| ModelFileError::BadDeclaration { line: 1, source })?;

    let mut constraints = Vec::with_capacity(pending.len());
    for (line, raw) in pending {
        let f = resolve(raw, &vocabulary)
            .map_err(|source| ModelFileError::BadConstraint { line, source })?;
        constraints.push(f);
    }

    Ok(ProcessModel { vocabulary, constraints })
}

/// Render a model in the syntax [`parse_model`] accepts. Reparsing the
/// result reproduces the model exactly.
pub fn write_model(model: &ProcessModel) -> String {
    let mut out = String::new();
    for sig in model.vocabulary.activities() {
        if sig.arity() == 0 {
            out.push_str(&format!("activity {} {{}}\n", sig.name()));
        } else {
            let attrs: Vec<String> = sig
                .attributes()
                .iter()
                .map(|(name, ty)| format!("{name}: {}", render_type(ty)))
                .collect();
            out.push_str(&format!("activity {} {{ {} }}\n", sig.name(), attrs.join(", ")));
        }
    }
    if !model.constraints.is_empty() {
        out.push('\n');
        for f in &model.constraints {
            out.push_str(&format!("constraint {f}\n"));
        }
    }
    out
}

fn render_type(ty: &AttributeType) -> String {
    match ty {
        AttributeType::IntRange { lo, hi } => format!("int {lo}..{hi}"),
        AttributeType::Enumeration(values) => format!("enum {{ {} }}", values.join(", ")),
    }
}

/// After the `activity` keyword: a name and an optional attribute block.
fn parse_activity(cur: &mut TokenCursor, line: usize) -> Result<ActivitySignature, ModelFileError> {
    let name = expect_name(cur, "an activity name")?;
    let mut attrs: Vec<(String, AttributeType)> = Vec::new();
    if matches!(cur.peek(), Some(s) if s.tok == Tok::LBrace) {
        cur.bump();
        loop {
            match cur.peek() {
                Some(s) if s.tok == Tok::RBrace => {
                    cur.bump();
                    break;
                }
                Some(_) => {
                    attrs.push(parse_attribute(cur)?);
                    // `,` continues the list; `}` ends it (also right
                    // after a trailing comma).
                    match cur.peek() {
                        Some(s) if s.tok == Tok::Comma => {
                            cur.bump();
                        }
                        Some(s) if s.tok == Tok::RBrace => {}
                        _ => return Err(cur.error("expected `,` or `}` after an attribute").into()),
                    }
                }
                None => return Err(cur.error("expected `}` to close the attribute block").into()),
            }
        }
    }
    ActivitySignature::new(name, attrs)
        .map_err(|source| ModelFileError::BadDeclaration { line, source })
}

/// `name: int lo..hi` or `name: enum { v1, v2 }`.
fn parse_attribute(cur: &mut TokenCursor) -> Result<(String, AttributeType), ModelFileError> {
    let line = cur.peek().map(|s| s.line).unwrap_or(1);
    let name = expect_name(cur, "an attribute name")?;
    cur.expect(Tok::Colon)?;
    match cur.bump() {
        Some(s) if matches!(&s.tok, Tok::Ident(w) if w == "int") => {
            let lo = expect_int(cur)?;
            cur.expect(Tok::DotDot)?;
            let hi = expect_int(cur)?;
            let ty = AttributeType::int_range(lo, hi)
                .map_err(|source| ModelFileError::BadDeclaration { line, source })?;
            Ok((name, ty))
        }
        Some(s) if matches!(&s.tok, Tok::Ident(w) if w == "enum") => {
            cur.expect(Tok::LBrace)?;
            let mut values = Vec::new();
            loop {
                match cur.peek() {
                    Some(s) if s.tok == Tok::RBrace => {
                        cur.bump();
                        break;
                    }
                    Some(_) => {
                        values.push(expect_name(cur, "an enumeration value")?);
                        match cur.peek() {
                            Some(s) if s.tok == Tok::Comma => {
                                cur.bump();
                            }
                            Some(s) if s.tok == Tok::RBrace => {}
                            _ => {
                                return Err(cur
                                    .error("expected `,` or `}` after an enumeration value")
                                    .into())
                            }
                        }
                    }
                    None => {
                        return Err(cur.error("expected `}` to close the enumeration").into())
                    }
                }
            }
            let ty = AttributeType::enumeration(values)
                .map_err(|source| ModelFileError::BadDeclaration { line, source })?;
            Ok((name, ty))
        }
        Some(s) => Err(ModelFileError::Syntax {
            line: s.line,
            column: s.column,
            message: format!("expected `int` or `enum`, found {}", s.tok.describe()),
        }),
        None => Err(cur.error("expected `int` or `enum`, found end of input").into()),
    }
}

/// An identifier that is not reserved by either grammar.
fn expect_name(cur: &mut TokenCursor, what: &str) -> Result<String, ModelFileError> {
    match cur.peek() {
        Some(s) => match &s.tok {
            Tok::Ident(name) => {
                if RESERVED.contains(&name.as_str()) || KEYWORDS.contains(&name.as_str()) {
                    return Err(ModelFileError::Syntax {
                        line: s.line,
                        column: s.column,
                        message: format!("`{name}` is a reserved word and cannot be used as a name"),
                    });
                }
                debug_assert!(is_identifier(name));
                cur.bump();
                Ok(name.clone())
            }
            other => Err(ModelFileError::Syntax {
                line: s.line,
                column: s.column,
                message: format!("expected {what}, found {}", other.describe()),
            }),
        },
        None => Err(cur.error(format!("expected {what}, found end of input")).into()),
    }
}

fn expect_int(cur: &mut TokenCursor) -> Result<i64, ModelFileError> {
    match cur.bump() {
        Some(s) => match s.tok {
            Tok::Int(n) => Ok(n),
            ref other => Err(ModelFileError::Syntax {
                line: s.line,
                column: s.column,
                message: format!("expected an integer, found {}", other.describe()),
            }),
        },
        None => Err(cur.error("expected an integer, found end of input").into()),
    }
}
