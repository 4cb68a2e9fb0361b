//! Temporal constraint formulas over events with data.
//!
//! The language is linear temporal logic over *finite* traces, where the
//! atomic propositions talk about the current event: which activity it is,
//! and how its attribute values compare to constants or to each other.
//! Formulas may also mention *activity variables* (written `?Name`), which
//! stand for an unknown activity and are resolved by query checking.
//!
//! Two points of the semantics deserve emphasis, because everything in this
//! crate leans on them:
//!
//! * `X` is a *strong* next: it is false at the last position of a trace.
//! * `U` is a *strong* until: `a U b` demands that `b` actually occur at or
//!   after the current position (with `a` holding in between).
//!
//! Comparison atoms are existential over the current event's signature: if
//! the event's activity does not carry the mentioned attribute, the atom is
//! simply false (and its negation true). That convention keeps evaluation
//! total over heterogeneous vocabularies.
//!
//! [`eval_at`] is the reference evaluator: a direct recursive rendering of
//! the satisfaction clauses, with no automaton involved. The automata
//! machinery in [`crate::automata`] is validated against it.

mod eval;
mod event;
mod lex;
mod parse;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{AttributeType, ProcessVocabulary, Value};

pub use eval::{eval_at, satisfies};
pub use event::{negate_event_formula, EventAtom, EventFormula, EventLiteral};
pub(crate) use event::{
    atom_holds, clean_disjuncts, cross, negate_atom_disjuncts, satisfiable_literals,
    simplify_conjunction, subsume_disjuncts,
};
pub use lex::is_identifier;
pub(crate) use lex::{lex, Tok};
pub use parse::parse;
pub(crate) use parse::{parse_formula_tokens, resolve, TokenCursor, RESERVED};
#[cfg(test)]
pub(crate) use parse::parse_unvalidated;

/// Comparison operator between attribute values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub const ALL: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    /// Apply the operator to two ordered values.
    pub fn evaluate<T: Ord>(self, left: T, right: T) -> bool {
        match self {
            CmpOp::Lt => left < right,
            CmpOp::Le => left <= right,
            CmpOp::Eq => left == right,
            CmpOp::Ge => left >= right,
            CmpOp::Gt => left > right,
        }
    }
}

/// A temporal formula.
///
/// `Or`, `Implies`, `Eventually` and `Globally` are convenience connectives:
/// their meaning is fixed by the usual expansions (`φ -> ψ` is `!φ || ψ`,
/// `F φ` is `true U φ`, `G φ` is `!F !φ`), and [`eval_at`] is coherent with
/// those expansions by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// Holds at every position.
    True,
    /// The current event is an occurrence of the named activity.
    Activity(String),
    /// The current event is an occurrence of whatever activity the variable
    /// is bound to. Variable names are stored without the `?` sigil.
    Variable(String),
    /// Compare two attributes of the current event.
    AttrCmpAttr(String, CmpOp, String),
    /// Compare an attribute of the current event against a constant.
    AttrCmpConst(String, CmpOp, Value),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Strong next: there is a next position and the operand holds there.
    Next(Box<Formula>),
    /// Strong until: the right operand holds at some position at or after
    /// the current one, and the left operand holds at every position
    /// strictly before that witness (from the current position on).
    Until(Box<Formula>, Box<Formula>),
    /// `F φ`, equivalent to `true U φ`.
    Eventually(Box<Formula>),
    /// `G φ`, equivalent to `!F !φ`.
    Globally(Box<Formula>),
}

impl Formula {
    // Part of the boxing-constructor family (`and`, `or`, ...); an `ops::Not`
    // impl would sit oddly next to them and invite `!f` on ASTs.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }
    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }
    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Box::new(l), Box::new(r))
    }
    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }
    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    /// Is this node one of the five atomic formulas?
    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::True
                | Formula::Activity(_)
                | Formula::Variable(_)
                | Formula::AttrCmpAttr(..)
                | Formula::AttrCmpConst(..)
        )
    }
}

/// Names of all activity variables occurring in the formula, without the
/// `?` sigil.
pub fn variables_of(f: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Variable(name) => {
                out.insert(name.clone());
            }
            Formula::True
            | Formula::Activity(_)
            | Formula::AttrCmpAttr(..)
            | Formula::AttrCmpConst(..) => {}
            Formula::Not(x) | Formula::Next(x) | Formula::Eventually(x) | Formula::Globally(x) => {
                walk(x, out)
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r) => {
                walk(l, out);
                walk(r, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut out);
    out
}

/// Replace every activity variable by the activity it is bound to.
///
/// The binding must cover every variable of the formula; the result is
/// variable-free.
pub fn substitute(f: &Formula, binding: &BTreeMap<String, String>) -> Result<Formula, FormulaError> {
    Ok(match f {
        Formula::Variable(name) => match binding.get(name) {
            Some(activity) => Formula::Activity(activity.clone()),
            None => return Err(FormulaError::UnboundVariable { name: name.clone() }),
        },
        Formula::True => Formula::True,
        Formula::Activity(a) => Formula::Activity(a.clone()),
        Formula::AttrCmpAttr(l, op, r) => Formula::AttrCmpAttr(l.clone(), *op, r.clone()),
        Formula::AttrCmpConst(a, op, v) => Formula::AttrCmpConst(a.clone(), *op, v.clone()),
        Formula::Not(x) => Formula::not(substitute(x, binding)?),
        Formula::Next(x) => Formula::next(substitute(x, binding)?),
        Formula::Eventually(x) => Formula::eventually(substitute(x, binding)?),
        Formula::Globally(x) => Formula::globally(substitute(x, binding)?),
        Formula::And(l, r) => Formula::and(substitute(l, binding)?, substitute(r, binding)?),
        Formula::Or(l, r) => Formula::or(substitute(l, binding)?, substitute(r, binding)?),
        Formula::Implies(l, r) => {
            Formula::implies(substitute(l, binding)?, substitute(r, binding)?)
        }
        Formula::Until(l, r) => Formula::until(substitute(l, binding)?, substitute(r, binding)?),
    })
}

/// Check a formula against a vocabulary: activities must be declared,
/// attributes must be declared somewhere, comparison constants must belong
/// to a matching attribute domain, and attribute-to-attribute comparisons
/// must be typeable in at least one signature.
pub fn validate_formula(f: &Formula, v: &ProcessVocabulary) -> Result<(), FormulaError> {
    match f {
        Formula::True | Formula::Variable(_) => Ok(()),
        Formula::Activity(name) => {
            if v.signature(name).is_some() {
                Ok(())
            } else {
                Err(FormulaError::UnknownActivity { name: name.clone() })
            }
        }
        Formula::AttrCmpConst(attr, op, value) => {
            if !v.declares_attribute(attr) {
                return Err(FormulaError::UnknownAttribute { name: attr.clone() });
            }
            let ok = v
                .attribute_declarations(attr)
                .any(|(_, ty)| ty.contains(value));
            if ok {
                Ok(())
            } else {
                Err(FormulaError::ConstantOutsideDomains {
                    attribute: attr.clone(),
                    op: *op,
                    value: value.clone(),
                })
            }
        }
        Formula::AttrCmpAttr(left, op, right) => {
            for name in [left, right] {
                if !v.declares_attribute(name) {
                    return Err(FormulaError::UnknownAttribute { name: name.clone() });
                }
            }
            let ok = v.activities().iter().any(|sig| {
                match (sig.attribute_type(left), sig.attribute_type(right)) {
                    (Some(tl), Some(tr)) => types_comparable(tl, tr, *op),
                    _ => false,
                }
            });
            if ok {
                Ok(())
            } else {
                Err(FormulaError::IncompatibleComparison {
                    left: left.clone(),
                    op: *op,
                    right: right.clone(),
                })
            }
        }
        Formula::Not(x) | Formula::Next(x) | Formula::Eventually(x) | Formula::Globally(x) => {
            validate_formula(x, v)
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Until(l, r) => {
            validate_formula(l, v)?;
            validate_formula(r, v)
        }
    }
}

/// Can attributes of these two types be compared with `op` in one event?
///
/// Integer ranges compare freely. Enumerations over the identical ordered
/// value list compare freely (by position); enumerations that merely share
/// a value only support equality. Integers never compare to enumerations.
pub(crate) fn types_comparable(left: &AttributeType, right: &AttributeType, op: CmpOp) -> bool {
    match (left, right) {
        (AttributeType::IntRange { .. }, AttributeType::IntRange { .. }) => true,
        (AttributeType::Enumeration(l), AttributeType::Enumeration(r)) => {
            if l == r {
                true
            } else {
                op == CmpOp::Eq && l.iter().any(|x| r.contains(x))
            }
        }
        _ => false,
    }
}

/// Errors from parsing, validating or manipulating formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown activity `{name}`")]
    UnknownActivity { name: String },
    #[error("attribute `{name}` is not declared by any activity")]
    UnknownAttribute { name: String },
    #[error("no attribute domain of `{attribute}` admits the comparison {attribute} {} {value}", op.symbol())]
    ConstantOutsideDomains { attribute: String, op: CmpOp, value: Value },
    #[error("no activity declares `{left}` and `{right}` with types comparable under `{}`", op.symbol())]
    IncompatibleComparison { left: String, op: CmpOp, right: String },
    #[error("activity variable `?{name}` is not bound")]
    UnboundVariable { name: String },
    #[error("formula contains activity variables (`?{name}`) where none are allowed")]
    VariablesNotAllowed { name: String },
    #[error("position {position} is outside the trace (length {length})")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("`{}` is a temporal operator; only event-level formulas are allowed here", operator)]
    TemporalOperator { operator: &'static str },
}

// Precedence levels for printing, loosest binds first:
//   0 implies, 1 until, 2 or, 3 and, 4 prefix operators, 5 atoms.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 0,
        Formula::Until(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) | Formula::Globally(_) => 4,
        _ => 5,
    }
}

fn fmt_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = precedence(f);
    let parens = level < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::Activity(a) => write!(out, "{a}")?,
        Formula::Variable(name) => write!(out, "?{name}")?,
        Formula::AttrCmpAttr(l, op, r) => write!(out, "{l} {} {r}", op.symbol())?,
        Formula::AttrCmpConst(a, op, value) => write!(out, "{a} {} {value}", op.symbol())?,
        Formula::Not(x) => {
            write!(out, "!")?;
            fmt_unary_operand(x, out)?;
        }
        Formula::Next(x) => {
            write!(out, "X ")?;
            fmt_unary_operand(x, out)?;
        }
        Formula::Eventually(x) => {
            write!(out, "F ")?;
            fmt_unary_operand(x, out)?;
        }
        Formula::Globally(x) => {
            write!(out, "G ")?;
            fmt_unary_operand(x, out)?;
        }
        // Left-associative: the right operand needs parens at equal level.
        Formula::And(l, r) => {
            fmt_prec(l, 3, out)?;
            write!(out, " && ")?;
            fmt_prec(r, 4, out)?;
        }
        Formula::Or(l, r) => {
            fmt_prec(l, 2, out)?;
            write!(out, " || ")?;
            fmt_prec(r, 3, out)?;
        }
        // Right-associative: the left operand needs parens at equal level.
        Formula::Implies(l, r) => {
            fmt_prec(l, 1, out)?;
            write!(out, " -> ")?;
            fmt_prec(r, 0, out)?;
        }
        Formula::Until(l, r) => {
            fmt_prec(l, 2, out)?;
            write!(out, " U ")?;
            fmt_prec(r, 1, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

// Parenthesize comparisons under a prefix operator: `!(n < 5)` reads better
// than `!n < 5` even though the grammar makes both unambiguous.
fn fmt_unary_operand(x: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(x, Formula::AttrCmpAttr(..) | Formula::AttrCmpConst(..)) {
        write!(out, "(")?;
        fmt_prec(x, 0, out)?;
        write!(out, ")")
    } else {
        fmt_prec(x, 4, out)
    }
}

impl fmt::Display for Formula {
    /// Prints in the concrete syntax accepted by [`parse`], with minimal
    /// parentheses; re-parsing yields a structurally identical formula.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}
