//! Recursive-descent parser for the formula surface syntax.
//!
//! Binding strength, loosest first: `->`, `U`, `||`, `&&`, then the prefix
//! operators `!` `X` `F` `G`, then atoms. `->` and `U` associate to the
//! right, `||` and `&&` to the left. `X`, `U`, `F`, `G` and `true` are
//! reserved words and cannot name activities, attributes or constants.

use super::lex::{lex, Spanned, Tok};
use super::{validate_formula, CmpOp, Formula, FormulaError};
use crate::model::{ProcessVocabulary, Value};

pub(crate) const RESERVED: [&str; 5] = ["true", "X", "U", "F", "G"];

/// A cursor over a lexed token slice; shared with the model-file parser.
pub(crate) struct TokenCursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> TokenCursor<'a> {
    pub(crate) fn new(toks: &'a [Spanned]) -> Self {
        TokenCursor { toks, pos: 0 }
    }

    pub(crate) fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    pub(crate) fn bump(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Position to report when complaining about the upcoming token.
    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(s) => (s.line, s.column),
            None => (1, 1),
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> FormulaError {
        let (line, column) = self.here();
        FormulaError::Syntax { line, column, message: message.into() }
    }

    pub(crate) fn expect(&mut self, expected: Tok) -> Result<(), FormulaError> {
        match self.peek() {
            Some(s) if s.tok == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(s) => Err(self.error(format!(
                "expected {}, found {}",
                expected.describe(),
                s.tok.describe()
            ))),
            None => Err(self.error(format!("expected {}, found end of input", expected.describe()))),
        }
    }
}

/// Parse and validate a formula against a vocabulary.
pub fn parse(text: &str, v: &ProcessVocabulary) -> Result<Formula, FormulaError> {
    let f = parse_unvalidated(text)?;
    resolve(f, v)
}

/// Syntax-only parse of a complete formula string. Comparisons against a
/// bare identifier are provisionally read as attribute-to-attribute; use
/// [`resolve`] to settle them against a vocabulary.
pub(crate) fn parse_unvalidated(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut cur = TokenCursor::new(&toks);
    let f = parse_formula_tokens(&mut cur)?;
    if let Some(s) = cur.peek() {
        return Err(cur.error(format!("unexpected {} after formula", s.tok.describe())));
    }
    Ok(f)
}

/// Settle identifier comparisons (attribute vs. enumeration constant) and
/// validate the result. An identifier on the right-hand side of a
/// comparison names an attribute when any activity declares one; otherwise
/// it is read as an enumeration constant.
pub(crate) fn resolve(f: Formula, v: &ProcessVocabulary) -> Result<Formula, FormulaError> {
    let f = settle_idents(f, v);
    validate_formula(&f, v)?;
    Ok(f)
}

fn settle_idents(f: Formula, v: &ProcessVocabulary) -> Formula {
    match f {
        Formula::AttrCmpAttr(l, op, r) => {
            if v.declares_attribute(&r) {
                Formula::AttrCmpAttr(l, op, r)
            } else {
                Formula::AttrCmpConst(l, op, Value::Sym(r))
            }
        }
        Formula::Not(x) => Formula::not(settle_idents(*x, v)),
        Formula::Next(x) => Formula::next(settle_idents(*x, v)),
        Formula::Eventually(x) => Formula::eventually(settle_idents(*x, v)),
        Formula::Globally(x) => Formula::globally(settle_idents(*x, v)),
        Formula::And(l, r) => Formula::and(settle_idents(*l, v), settle_idents(*r, v)),
        Formula::Or(l, r) => Formula::or(settle_idents(*l, v), settle_idents(*r, v)),
        Formula::Implies(l, r) => Formula::implies(settle_idents(*l, v), settle_idents(*r, v)),
        Formula::Until(l, r) => Formula::until(settle_idents(*l, v), settle_idents(*r, v)),
        other => other,
    }
}

/// Parse one formula from the cursor, leaving trailing tokens untouched.
pub(crate) fn parse_formula_tokens(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    parse_implies(cur)
}

fn parse_implies(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    let left = parse_until(cur)?;
    if matches!(cur.peek(), Some(s) if s.tok == Tok::Arrow) {
        cur.bump();
        let right = parse_implies(cur)?;
        return Ok(Formula::implies(left, right));
    }
    Ok(left)
}

fn parse_until(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    let left = parse_or(cur)?;
    if matches!(cur.peek(), Some(s) if s.tok == Tok::Ident("U".into())) {
        cur.bump();
        let right = parse_until(cur)?;
        return Ok(Formula::until(left, right));
    }
    Ok(left)
}

fn parse_or(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    let mut acc = parse_and(cur)?;
    while matches!(cur.peek(), Some(s) if s.tok == Tok::OrOr) {
        cur.bump();
        let right = parse_and(cur)?;
        acc = Formula::or(acc, right);
    }
    Ok(acc)
}

fn parse_and(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    let mut acc = parse_unary(cur)?;
    while matches!(cur.peek(), Some(s) if s.tok == Tok::AndAnd) {
        cur.bump();
        let right = parse_unary(cur)?;
        acc = Formula::and(acc, right);
    }
    Ok(acc)
}

fn parse_unary(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    match cur.peek() {
        Some(s) if s.tok == Tok::Bang => {
            cur.bump();
            Ok(Formula::not(parse_unary(cur)?))
        }
        Some(s) => match &s.tok {
            Tok::Ident(name) if name == "X" => {
                cur.bump();
                Ok(Formula::next(parse_unary(cur)?))
            }
            Tok::Ident(name) if name == "F" => {
                cur.bump();
                Ok(Formula::eventually(parse_unary(cur)?))
            }
            Tok::Ident(name) if name == "G" => {
                cur.bump();
                Ok(Formula::globally(parse_unary(cur)?))
            }
            _ => parse_atom(cur),
        },
        None => Err(cur.error("expected a formula, found end of input")),
    }
}

fn parse_atom(cur: &mut TokenCursor) -> Result<Formula, FormulaError> {
    let spanned = match cur.peek() {
        Some(s) => s,
        None => return Err(cur.error("expected a formula, found end of input")),
    };
    match &spanned.tok {
        Tok::LParen => {
            cur.bump();
            let inner = parse_implies(cur)?;
            cur.expect(Tok::RParen)?;
            Ok(inner)
        }
        Tok::Var(name) => {
            let name = name.clone();
            cur.bump();
            if cmp_op(cur).is_some() {
                return Err(cur.error("activity variables cannot appear in comparisons"));
            }
            Ok(Formula::Variable(name))
        }
        Tok::Ident(name) if name == "true" => {
            cur.bump();
            Ok(Formula::True)
        }
        Tok::Ident(name) if name == "U" => {
            Err(cur.error("`U` is a reserved operator and cannot start a formula"))
        }
        Tok::Ident(name) => {
            let name = name.clone();
            cur.bump();
            match cmp_op(cur) {
                Some(op) => {
                    cur.bump();
                    parse_comparison_rhs(cur, name, op)
                }
                None => Ok(Formula::Activity(name)),
            }
        }
        other => Err(cur.error(format!("expected a formula, found {}", other.describe()))),
    }
}

fn cmp_op(cur: &TokenCursor) -> Option<CmpOp> {
    match cur.peek().map(|s| &s.tok) {
        Some(Tok::Lt) => Some(CmpOp::Lt),
        Some(Tok::Le) => Some(CmpOp::Le),
        Some(Tok::EqEq) => Some(CmpOp::Eq),
        Some(Tok::Ge) => Some(CmpOp::Ge),
        Some(Tok::Gt) => Some(CmpOp::Gt),
        _ => None,
    }
}

fn parse_comparison_rhs(
    cur: &mut TokenCursor,
    attr: String,
    op: CmpOp,
) -> Result<Formula, FormulaError> {
    match cur.peek().map(|s| &s.tok) {
        Some(Tok::Int(n)) => {
            let n = *n;
            cur.bump();
            Ok(Formula::AttrCmpConst(attr, op, Value::Int(n)))
        }
        Some(Tok::Ident(name)) => {
            if RESERVED.contains(&name.as_str()) {
                return Err(cur.error(format!("`{name}` is reserved and cannot be compared")));
            }
            let name = name.clone();
            cur.bump();
            // Attribute or enumeration constant — settled during resolve().
            Ok(Formula::AttrCmpAttr(attr, op, name))
        }
        _ => Err(cur.error("expected an integer, attribute or enumeration constant after the comparison operator")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActivitySignature, AttributeType};

    fn vocab() -> ProcessVocabulary {
        ProcessVocabulary::new(vec![
            ActivitySignature::new(
                "a",
                vec![
                    ("n".into(), AttributeType::int_range(0, 9).unwrap()),
                    ("m".into(), AttributeType::int_range(0, 9).unwrap()),
                ],
            )
            .unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
            ActivitySignature::new(
                "c",
                vec![(
                    "status".into(),
                    AttributeType::enumeration(["low", "mid", "high"]).unwrap(),
                )],
            )
            .unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn parses_the_response_shape() {
        let v = vocab();
        let f = parse("G((a && n < 5) -> F b)", &v).unwrap();
        assert_eq!(
            f,
            Formula::globally(Formula::implies(
                Formula::and(
                    Formula::Activity("a".into()),
                    Formula::AttrCmpConst("n".into(), CmpOp::Lt, Value::Int(5)),
                ),
                Formula::eventually(Formula::Activity("b".into())),
            ))
        );
    }

    #[test]
    fn precedence_follows_the_declared_order() {
        let v = vocab();
        // `&&` binds tighter than `||`, both tighter than `U`, then `->`.
        let f = parse("a -> b U a && b || c", &v).unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::Activity("a".into()),
                Formula::until(
                    Formula::Activity("b".into()),
                    Formula::or(
                        Formula::and(Formula::Activity("a".into()), Formula::Activity("b".into())),
                        Formula::Activity("c".into()),
                    ),
                ),
            )
        );
        // Prefix operators grab the smallest argument.
        let g = parse("F a && b", &v).unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::eventually(Formula::Activity("a".into())),
                Formula::Activity("b".into()),
            )
        );
    }

    #[test]
    fn right_associativity_of_until_and_implies() {
        let v = vocab();
        assert_eq!(
            parse("a U b U c", &v).unwrap(),
            Formula::until(
                Formula::Activity("a".into()),
                Formula::until(Formula::Activity("b".into()), Formula::Activity("c".into())),
            )
        );
        assert_eq!(
            parse("a -> b -> c", &v).unwrap(),
            Formula::implies(
                Formula::Activity("a".into()),
                Formula::implies(Formula::Activity("b".into()), Formula::Activity("c".into())),
            )
        );
    }

    #[test]
    fn settles_identifier_comparisons() {
        let v = vocab();
        assert_eq!(
            parse("n == m", &v).unwrap(),
            Formula::AttrCmpAttr("n".into(), CmpOp::Eq, "m".into())
        );
        assert_eq!(
            parse("status == high", &v).unwrap(),
            Formula::AttrCmpConst("status".into(), CmpOp::Eq, Value::Sym("high".into()))
        );
        // Negative constants lex fine; domain validation then rejects them
        // when no activity's range contains the value.
        assert_eq!(
            parse_unvalidated("n >= -3").unwrap(),
            Formula::AttrCmpConst("n".into(), CmpOp::Ge, Value::Int(-3))
        );
        assert!(matches!(
            parse("n >= -3", &v),
            Err(FormulaError::ConstantOutsideDomains { .. })
        ));
    }

    #[test]
    fn parses_variables() {
        let v = vocab();
        assert_eq!(
            parse("G(?A1 -> F ?A2)", &v).unwrap(),
            Formula::globally(Formula::implies(
                Formula::Variable("A1".into()),
                Formula::eventually(Formula::Variable("A2".into())),
            ))
        );
        assert!(parse("?A1 < 5", &v).is_err());
    }

    #[test]
    fn reports_semantic_errors() {
        let v = vocab();
        assert!(matches!(
            parse("F d", &v),
            Err(FormulaError::UnknownActivity { .. })
        ));
        assert!(matches!(
            parse("zz < 5", &v),
            Err(FormulaError::UnknownAttribute { .. })
        ));
        // 12 is outside every domain of `n`.
        assert!(matches!(
            parse("n < 12", &v),
            Err(FormulaError::ConstantOutsideDomains { .. })
        ));
        // `n` is an integer, `status` an enumeration: never comparable.
        assert!(matches!(
            parse("n == status", &v),
            Err(FormulaError::IncompatibleComparison { .. })
        ));
        // Enumeration order comparisons are fine within one domain.
        assert!(parse("status >= mid", &v).is_ok());
    }

    #[test]
    fn reports_syntax_errors_with_positions() {
        let v = vocab();
        let err = parse("G(a -> ", &v).unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { .. }));
        assert!(parse("a b", &v).is_err());
        assert!(parse("(a", &v).is_err());
        assert!(parse("U a", &v).is_err());
        assert!(parse("n < true", &v).is_err());
    }
}
