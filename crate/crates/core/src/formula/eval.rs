//! Direct recursive evaluation of formulas on traces.
//!
//! This is the reference semantics: no automata, no caching, just the
//! satisfaction clauses spelled out. The automaton pipeline is checked
//! against [`eval_at`] in tests, so this module stays deliberately simple.

use super::{CmpOp, Formula, FormulaError};
use crate::model::{AttributeType, Event, ProcessVocabulary, Trace, Value};

/// Does the trace satisfy the formula at position `i` (1-based)?
///
/// The formula must be variable-free and `1 <= i <= t.len()`.
pub fn eval_at(
    v: &ProcessVocabulary,
    t: &Trace,
    i: usize,
    f: &Formula,
) -> Result<bool, FormulaError> {
    if let Some(name) = super::variables_of(f).into_iter().next() {
        return Err(FormulaError::VariablesNotAllowed { name });
    }
    if i < 1 || i > t.len() {
        return Err(FormulaError::PositionOutOfRange { position: i, length: t.len() });
    }
    Ok(eval(v, t, i - 1, f))
}

/// Does the trace satisfy the formula (at its first position)?
pub fn satisfies(v: &ProcessVocabulary, t: &Trace, f: &Formula) -> Result<bool, FormulaError> {
    eval_at(v, t, 1, f)
}

// Inner recursion over 0-based positions; preconditions already checked.
fn eval(v: &ProcessVocabulary, t: &Trace, i: usize, f: &Formula) -> bool {
    let n = t.len();
    match f {
        Formula::True => true,
        Formula::Activity(name) => t.events[i].activity == *name,
        Formula::Variable(_) => unreachable!("variable-free checked by eval_at"),
        Formula::AttrCmpAttr(l, op, r) => cmp_attr_attr(v, &t.events[i], l, *op, r),
        Formula::AttrCmpConst(attr, op, value) => {
            cmp_attr_const(v, &t.events[i], attr, *op, value)
        }
        Formula::Not(x) => !eval(v, t, i, x),
        Formula::And(l, r) => eval(v, t, i, l) && eval(v, t, i, r),
        Formula::Or(l, r) => eval(v, t, i, l) || eval(v, t, i, r),
        Formula::Implies(l, r) => !eval(v, t, i, l) || eval(v, t, i, r),
        // Strong next: false at the last position.
        Formula::Next(x) => i + 1 < n && eval(v, t, i + 1, x),
        // Strong until: a witness for the right operand must exist.
        Formula::Until(l, r) => (i..n)
            .any(|j| eval(v, t, j, r) && (i..j).all(|k| eval(v, t, k, l))),
        Formula::Eventually(x) => (i..n).any(|j| eval(v, t, j, x)),
        Formula::Globally(x) => (i..n).all(|j| eval(v, t, j, x)),
    }
}

/// Compare two attributes of one event. False whenever the event's activity
/// does not carry both attributes; otherwise compares the two values
/// (integers numerically, enumeration constants by equality or — when both
/// attributes share the identical ordered domain — by position).
pub(super) fn cmp_attr_attr(
    v: &ProcessVocabulary,
    e: &Event,
    left: &str,
    op: CmpOp,
    right: &str,
) -> bool {
    let sig = match v.signature(&e.activity) {
        Some(sig) => sig,
        None => return false,
    };
    let (lv, rv) = match (e.attribute_value(v, left), e.attribute_value(v, right)) {
        (Some(lv), Some(rv)) => (lv, rv),
        _ => return false,
    };
    match (lv, rv) {
        (Value::Int(x), Value::Int(y)) => op.evaluate(x, y),
        (Value::Sym(x), Value::Sym(y)) => {
            if op == CmpOp::Eq {
                x == y
            } else {
                // Positional order is only meaningful within one shared
                // ordered domain.
                match (sig.attribute_type(left), sig.attribute_type(right)) {
                    (
                        Some(tl @ AttributeType::Enumeration(lvals)),
                        Some(AttributeType::Enumeration(rvals)),
                    ) if lvals == rvals => {
                        match (tl.position_of(x), tl.position_of(y)) {
                            (Some(px), Some(py)) => op.evaluate(px, py),
                            _ => false,
                        }
                    }
                    _ => false,
                }
            }
        }
        _ => false,
    }
}

/// Compare an attribute of one event against a constant. False whenever the
/// activity does not carry the attribute or the value kinds do not match.
pub(super) fn cmp_attr_const(
    v: &ProcessVocabulary,
    e: &Event,
    attr: &str,
    op: CmpOp,
    constant: &Value,
) -> bool {
    let sig = match v.signature(&e.activity) {
        Some(sig) => sig,
        None => return false,
    };
    let value = match e.attribute_value(v, attr) {
        Some(value) => value,
        None => return false,
    };
    match (value, constant) {
        (Value::Int(x), Value::Int(y)) => op.evaluate(x, y),
        (Value::Sym(x), Value::Sym(y)) => {
            if op == CmpOp::Eq {
                x == y
            } else {
                match sig.attribute_type(attr) {
                    Some(ty @ AttributeType::Enumeration(_)) => {
                        match (ty.position_of(x), ty.position_of(y)) {
                            (Some(px), Some(py)) => op.evaluate(px, py),
                            _ => false,
                        }
                    }
                    _ => false,
                }
            }
        }
        _ => false,
    }
}
