//! Event-level formulas: conjunctions of literals over a single event.
//!
//! Automaton transition guards are restricted to this shape, so anything
//! that manipulates guards funnels through here. The two workhorses are
//!
//! * [`negate_event_formula`] — rewrite the negation of a (boolean,
//!   non-temporal) event formula as a disjunction of literal conjunctions,
//!   and
//! * [`satisfiable_literals`] — decide whether any event of the vocabulary
//!   can satisfy a literal conjunction.
//!
//! Negation is vocabulary-sensitive. `!(n < 5)` holds on an event either
//! because `n` is present with a value `>= 5`, or because the event's
//! activity does not carry `n` at all (comparison atoms on absent
//! attributes are false, so their negations are true). The produced
//! disjunction therefore pairs the flipped comparison with one disjunct per
//! activity on which the atom is statically false, and redundant disjuncts
//! are pruned afterwards by a small implication check.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use super::eval::{cmp_attr_attr, cmp_attr_const};
use super::{CmpOp, Formula, FormulaError};
use crate::model::{ActivitySignature, AttributeType, Event, ProcessVocabulary, Value};

/// An atomic event formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventAtom {
    True,
    Activity(String),
    Variable(String),
    AttrCmpAttr(String, CmpOp, String),
    AttrCmpConst(String, CmpOp, Value),
}

impl EventAtom {
    pub fn to_formula(&self) -> Formula {
        match self {
            EventAtom::True => Formula::True,
            EventAtom::Activity(a) => Formula::Activity(a.clone()),
            EventAtom::Variable(x) => Formula::Variable(x.clone()),
            EventAtom::AttrCmpAttr(l, op, r) => Formula::AttrCmpAttr(l.clone(), *op, r.clone()),
            EventAtom::AttrCmpConst(a, op, v) => Formula::AttrCmpConst(a.clone(), *op, v.clone()),
        }
    }

    /// View an atomic [`Formula`] node as an event atom.
    pub fn from_formula(f: &Formula) -> Option<EventAtom> {
        match f {
            Formula::True => Some(EventAtom::True),
            Formula::Activity(a) => Some(EventAtom::Activity(a.clone())),
            Formula::Variable(x) => Some(EventAtom::Variable(x.clone())),
            Formula::AttrCmpAttr(l, op, r) => {
                Some(EventAtom::AttrCmpAttr(l.clone(), *op, r.clone()))
            }
            Formula::AttrCmpConst(a, op, v) => {
                Some(EventAtom::AttrCmpConst(a.clone(), *op, v.clone()))
            }
            _ => None,
        }
    }
}

/// A possibly negated event atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventLiteral {
    pub negated: bool,
    pub atom: EventAtom,
}

impl EventLiteral {
    pub fn positive(atom: EventAtom) -> Self {
        EventLiteral { negated: false, atom }
    }
    pub fn negative(atom: EventAtom) -> Self {
        EventLiteral { negated: true, atom }
    }
    pub fn complement(&self) -> Self {
        EventLiteral { negated: !self.negated, atom: self.atom.clone() }
    }
}

impl fmt::Display for EventLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = self.atom.to_formula();
        if self.negated {
            match self.atom {
                EventAtom::AttrCmpAttr(..) | EventAtom::AttrCmpConst(..) => {
                    write!(f, "!({rendered})")
                }
                _ => write!(f, "!{rendered}"),
            }
        } else {
            write!(f, "{rendered}")
        }
    }
}

/// A conjunction of event literals; the empty conjunction is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EventFormula {
    literals: Vec<EventLiteral>,
}

impl EventFormula {
    /// The always-true guard.
    pub fn top() -> Self {
        EventFormula { literals: Vec::new() }
    }

    /// Build a conjunction; literals are sorted and deduplicated.
    pub fn new(mut literals: Vec<EventLiteral>) -> Self {
        literals.sort();
        literals.dedup();
        EventFormula { literals }
    }

    pub fn literals(&self) -> &[EventLiteral] {
        &self.literals
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    /// Conjoin two guards.
    pub fn merge(&self, other: &EventFormula) -> EventFormula {
        let mut lits = self.literals.clone();
        lits.extend(other.literals.iter().cloned());
        EventFormula::new(lits)
    }

    /// Does the event satisfy every literal? Variables are looked up in
    /// `binding`; an unbound variable is an error.
    pub fn holds(
        &self,
        v: &ProcessVocabulary,
        e: &Event,
        binding: Option<&BTreeMap<String, String>>,
    ) -> Result<bool, FormulaError> {
        for lit in &self.literals {
            if !literal_holds(v, e, binding, lit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_formula(&self) -> Formula {
        let mut iter = self.literals.iter();
        let first = match iter.next() {
            None => return Formula::True,
            Some(l) => literal_formula(l),
        };
        iter.fold(first, |acc, l| Formula::and(acc, literal_formula(l)))
    }
}

fn literal_formula(l: &EventLiteral) -> Formula {
    let base = l.atom.to_formula();
    if l.negated {
        Formula::not(base)
    } else {
        base
    }
}

impl fmt::Display for EventFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "true");
        }
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

pub(crate) fn atom_holds(
    v: &ProcessVocabulary,
    e: &Event,
    binding: Option<&BTreeMap<String, String>>,
    atom: &EventAtom,
) -> Result<bool, FormulaError> {
    Ok(match atom {
        EventAtom::True => true,
        EventAtom::Activity(a) => e.activity == *a,
        EventAtom::Variable(name) => match binding.and_then(|b| b.get(name)) {
            Some(bound) => e.activity == *bound,
            None => return Err(FormulaError::UnboundVariable { name: name.clone() }),
        },
        EventAtom::AttrCmpAttr(l, op, r) => cmp_attr_attr(v, e, l, *op, r),
        EventAtom::AttrCmpConst(a, op, value) => cmp_attr_const(v, e, a, *op, value),
    })
}

pub(crate) fn literal_holds(
    v: &ProcessVocabulary,
    e: &Event,
    binding: Option<&BTreeMap<String, String>>,
    lit: &EventLiteral,
) -> Result<bool, FormulaError> {
    atom_holds(v, e, binding, &lit.atom).map(|b| b != lit.negated)
}

/// Rewrite the negation of a boolean (non-temporal) formula as a
/// disjunction of literal conjunctions equivalent to it over the given
/// vocabulary. Unsatisfiable disjuncts are dropped and disjuncts implied by
/// other disjuncts are pruned, so `!(a && n < 5)` over a vocabulary where
/// only `a` carries `n` comes out as `[!a]` and `[n >= 5]`.
pub fn negate_event_formula(
    f: &Formula,
    v: &ProcessVocabulary,
) -> Result<Vec<EventFormula>, FormulaError> {
    let raw = event_dnf(f, v, true)?;
    Ok(clean_disjuncts(raw, v))
}

/// DNF of `f` (or of its negation) over event literals.
pub(crate) fn event_dnf(
    f: &Formula,
    v: &ProcessVocabulary,
    negated: bool,
) -> Result<Vec<Vec<EventLiteral>>, FormulaError> {
    if let Some(atom) = EventAtom::from_formula(f) {
        return Ok(if negated {
            negate_atom_disjuncts(&atom, v)
        } else if atom == EventAtom::True {
            vec![vec![]]
        } else {
            vec![vec![EventLiteral::positive(atom)]]
        });
    }
    match f {
        Formula::Not(x) => event_dnf(x, v, !negated),
        Formula::And(l, r) => {
            if negated {
                Ok(union(event_dnf(l, v, true)?, event_dnf(r, v, true)?))
            } else {
                Ok(cross(event_dnf(l, v, false)?, event_dnf(r, v, false)?))
            }
        }
        Formula::Or(l, r) => {
            if negated {
                Ok(cross(event_dnf(l, v, true)?, event_dnf(r, v, true)?))
            } else {
                Ok(union(event_dnf(l, v, false)?, event_dnf(r, v, false)?))
            }
        }
        Formula::Implies(l, r) => {
            if negated {
                Ok(cross(event_dnf(l, v, false)?, event_dnf(r, v, true)?))
            } else {
                Ok(union(event_dnf(l, v, true)?, event_dnf(r, v, false)?))
            }
        }
        Formula::Next(_) => Err(FormulaError::TemporalOperator { operator: "X" }),
        Formula::Until(..) => Err(FormulaError::TemporalOperator { operator: "U" }),
        Formula::Eventually(_) => Err(FormulaError::TemporalOperator { operator: "F" }),
        Formula::Globally(_) => Err(FormulaError::TemporalOperator { operator: "G" }),
        _ => unreachable!("atomic formulas handled above"),
    }
}

fn union(mut a: Vec<Vec<EventLiteral>>, b: Vec<Vec<EventLiteral>>) -> Vec<Vec<EventLiteral>> {
    a.extend(b);
    a
}

pub(crate) fn cross(a: Vec<Vec<EventLiteral>>, b: Vec<Vec<EventLiteral>>) -> Vec<Vec<EventLiteral>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let mut lits = x.clone();
            lits.extend(y.iter().cloned());
            out.push(lits);
        }
    }
    out
}

/// Disjuncts equivalent to the negation of a single atom.
///
/// Comparison atoms are flipped into their complementary comparison(s),
/// plus one activity disjunct per activity on which the atom is statically
/// false (absent attribute or untypeable comparison). When flipping is not
/// faithful — equality across two different enumerations that merely share
/// values — the negated literal itself is returned.
pub(crate) fn negate_atom_disjuncts(
    atom: &EventAtom,
    v: &ProcessVocabulary,
) -> Vec<Vec<EventLiteral>> {
    match atom {
        EventAtom::True => vec![],
        EventAtom::Activity(_) | EventAtom::Variable(_) => {
            vec![vec![EventLiteral::negative(atom.clone())]]
        }
        EventAtom::AttrCmpConst(attr, op, value) => {
            let mut out: Vec<Vec<EventLiteral>> = flipped_ops(*op)
                .into_iter()
                .map(|fop| {
                    vec![EventLiteral::positive(EventAtom::AttrCmpConst(
                        attr.clone(),
                        fop,
                        value.clone(),
                    ))]
                })
                .collect();
            for sig in v.activities() {
                if const_atom_statically_false(sig, attr, *op, value) {
                    out.push(vec![EventLiteral::positive(EventAtom::Activity(
                        sig.name().to_string(),
                    ))]);
                }
            }
            out
        }
        EventAtom::AttrCmpAttr(left, op, right) => {
            let mut falsifying = Vec::new();
            for sig in v.activities() {
                match attr_atom_class(sig, left, *op, right) {
                    AttrAtomClass::StaticallyFalse => falsifying.push(sig.name().to_string()),
                    AttrAtomClass::Orderable => {}
                    AttrAtomClass::EqualityOnly => {
                        // No faithful flipped form exists; fall back to the
                        // negated literal, which is exact by definition.
                        return vec![vec![EventLiteral::negative(atom.clone())]];
                    }
                }
            }
            let mut out: Vec<Vec<EventLiteral>> = flipped_ops(*op)
                .into_iter()
                .map(|fop| {
                    vec![EventLiteral::positive(EventAtom::AttrCmpAttr(
                        left.clone(),
                        fop,
                        right.clone(),
                    ))]
                })
                .collect();
            for name in falsifying {
                out.push(vec![EventLiteral::positive(EventAtom::Activity(name))]);
            }
            out
        }
    }
}

fn flipped_ops(op: CmpOp) -> Vec<CmpOp> {
    match op {
        CmpOp::Lt => vec![CmpOp::Ge],
        CmpOp::Le => vec![CmpOp::Gt],
        CmpOp::Ge => vec![CmpOp::Lt],
        CmpOp::Gt => vec![CmpOp::Le],
        CmpOp::Eq => vec![CmpOp::Lt, CmpOp::Gt],
    }
}

/// Is `attr op value` false on every event of this activity?
fn const_atom_statically_false(
    sig: &ActivitySignature,
    attr: &str,
    _op: CmpOp,
    value: &Value,
) -> bool {
    match (sig.attribute_type(attr), value) {
        (None, _) => true,
        (Some(AttributeType::IntRange { .. }), Value::Int(_)) => false,
        (Some(ty @ AttributeType::Enumeration(_)), Value::Sym(s)) => ty.position_of(s).is_none(),
        _ => true, // kind mismatch between attribute and constant
    }
}

enum AttrAtomClass {
    /// Present, with a total order shared by both attributes.
    Orderable,
    /// Only `==` is meaningful (two different enumerations sharing values).
    EqualityOnly,
    StaticallyFalse,
}

fn attr_atom_class(
    sig: &ActivitySignature,
    left: &str,
    op: CmpOp,
    right: &str,
) -> AttrAtomClass {
    match (sig.attribute_type(left), sig.attribute_type(right)) {
        (Some(AttributeType::IntRange { .. }), Some(AttributeType::IntRange { .. })) => {
            AttrAtomClass::Orderable
        }
        (Some(AttributeType::Enumeration(l)), Some(AttributeType::Enumeration(r))) => {
            if l == r {
                AttrAtomClass::Orderable
            } else if op == CmpOp::Eq && l.iter().any(|x| r.contains(x)) {
                AttrAtomClass::EqualityOnly
            } else {
                AttrAtomClass::StaticallyFalse
            }
        }
        _ => AttrAtomClass::StaticallyFalse,
    }
}

/// Normalize, prune and subsume a raw disjunct list.
pub(crate) fn clean_disjuncts(
    raw: Vec<Vec<EventLiteral>>,
    v: &ProcessVocabulary,
) -> Vec<EventFormula> {
    let mut seen = BTreeSet::new();
    let disjuncts: Vec<EventFormula> = raw
        .into_iter()
        .map(EventFormula::new)
        .filter(|d| !has_complementary_pair(d) && satisfiable_literals(d.literals(), v))
        .filter(|d| seen.insert(d.clone()))
        .collect();
    subsume_disjuncts(disjuncts, v)
}

fn has_complementary_pair(d: &EventFormula) -> bool {
    d.literals()
        .iter()
        .any(|l| d.literals().contains(&l.complement()))
}

/// Drop disjuncts whose event set is contained in another disjunct's.
///
/// Among mutually equivalent disjuncts the earliest in the input wins, so
/// callers can bias ties (e.g. prefer `!a` over an equivalent `b` when the
/// vocabulary has exactly two activities) by construction order.
pub(crate) fn subsume_disjuncts(
    disjuncts: Vec<EventFormula>,
    v: &ProcessVocabulary,
) -> Vec<EventFormula> {
    // More general disjuncts (fewer literals) first; the sort is stable so
    // equal-length disjuncts keep their input order.
    let mut ordered = disjuncts;
    ordered.sort_by_key(|d| d.literals().len());
    let mut kept: Vec<EventFormula> = Vec::new();
    'outer: for d in ordered {
        for k in &kept {
            if implies_formula(&d, k, v) {
                continue 'outer;
            }
        }
        kept.push(d);
    }
    kept.sort();
    kept
}

/// `antecedent => consequent` over all events of the vocabulary?
pub(crate) fn implies_formula(
    antecedent: &EventFormula,
    consequent: &EventFormula,
    v: &ProcessVocabulary,
) -> bool {
    consequent
        .literals()
        .iter()
        .all(|lit| implies_literal(antecedent.literals(), lit, v))
}

fn implies_literal(antecedent: &[EventLiteral], lit: &EventLiteral, v: &ProcessVocabulary) -> bool {
    let mut with_negation = antecedent.to_vec();
    with_negation.push(lit.complement());
    !satisfiable_literals(&with_negation, v)
}

/// Remove literals implied by the remaining ones; the event set is
/// unchanged. Keeps merged product guards readable. Negated literals are
/// offered up first, so of `a && !b` the positive `a` survives.
pub(crate) fn simplify_conjunction(
    lits: Vec<EventLiteral>,
    v: &ProcessVocabulary,
) -> Vec<EventLiteral> {
    let mut current = EventFormula::new(lits).literals().to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        let mut order: Vec<usize> = (0..current.len()).collect();
        order.sort_by_key(|&i| (!current[i].negated, i));
        for idx in order {
            let mut rest = current.clone();
            let lit = rest.remove(idx);
            if implies_literal(&rest, &lit, v) {
                current = rest;
                changed = true;
                break;
            }
        }
    }
    current
}

/// Can any event over the vocabulary (together with some variable binding)
/// satisfy all literals at once?
///
/// Integer constraints are decided exactly with a difference-constraint
/// system; enumeration constraints by bounded enumeration. The check is
/// conservative in one direction only: if a pathological instance exceeds
/// the internal bounds it reports `true`, never a spurious `false`.
pub(crate) fn satisfiable_literals(lits: &[EventLiteral], v: &ProcessVocabulary) -> bool {
    // Variable literals constrain the binding, not the event: `?X` forces
    // the binding to the current activity, `!?X` forces it elsewhere, which
    // is possible whenever a second activity exists.
    let mut pos_vars = BTreeSet::new();
    let mut neg_vars = BTreeSet::new();
    for lit in lits {
        if let EventAtom::Variable(name) = &lit.atom {
            if lit.negated {
                neg_vars.insert(name);
            } else {
                pos_vars.insert(name);
            }
        }
    }
    if pos_vars.intersection(&neg_vars).next().is_some() {
        return false;
    }
    if !neg_vars.is_empty() && v.activities().len() < 2 {
        return false;
    }

    'next_activity: for sig in v.activities() {
        let mut int_constraints: Vec<IntConstraint> = Vec::new();
        let mut enum_constraints: Vec<EnumConstraint> = Vec::new();
        for lit in lits {
            match &lit.atom {
                EventAtom::True => {
                    if lit.negated {
                        return false;
                    }
                }
                EventAtom::Variable(_) => {}
                EventAtom::Activity(name) => {
                    if (sig.name() == name.as_str()) == lit.negated {
                        continue 'next_activity;
                    }
                }
                EventAtom::AttrCmpConst(attr, op, value) => {
                    match classify_const_atom(sig, attr, *op, value) {
                        AtomOnActivity::StaticallyFalse => {
                            if !lit.negated {
                                continue 'next_activity;
                            }
                        }
                        AtomOnActivity::Int(c) => {
                            int_constraints.push(c.with_negation(lit.negated))
                        }
                        AtomOnActivity::Enum(c) => {
                            enum_constraints.push(c.with_negation(lit.negated))
                        }
                    }
                }
                EventAtom::AttrCmpAttr(l, op, r) => {
                    match classify_attr_atom(sig, l, *op, r) {
                        AtomOnActivity::StaticallyFalse => {
                            if !lit.negated {
                                continue 'next_activity;
                            }
                        }
                        AtomOnActivity::Int(c) => {
                            int_constraints.push(c.with_negation(lit.negated))
                        }
                        AtomOnActivity::Enum(c) => {
                            enum_constraints.push(c.with_negation(lit.negated))
                        }
                    }
                }
            }
        }
        if int_system_satisfiable(sig, &int_constraints)
            && enum_system_satisfiable(sig, &enum_constraints)
        {
            return true;
        }
    }
    false
}

#[derive(Clone, Copy)]
enum IntTerm<'a> {
    Attr(&'a str),
    Const(i64),
}

struct IntConstraint<'a> {
    left: IntTerm<'a>,
    op: CmpOp,
    right: IntTerm<'a>,
    negated: bool,
}

impl<'a> IntConstraint<'a> {
    fn with_negation(mut self, negated: bool) -> Self {
        self.negated = self.negated != negated;
        self
    }
}

enum EnumTermRhs<'a> {
    Const(&'a str),
    Attr(&'a str),
}

struct EnumConstraint<'a> {
    left: &'a str,
    op: CmpOp,
    right: EnumTermRhs<'a>,
    /// Positional comparison within one shared domain (`false` means plain
    /// string equality across domains).
    positional: bool,
    negated: bool,
}

impl<'a> EnumConstraint<'a> {
    fn with_negation(mut self, negated: bool) -> Self {
        self.negated = self.negated != negated;
        self
    }
}

enum AtomOnActivity<'a> {
    StaticallyFalse,
    Int(IntConstraint<'a>),
    Enum(EnumConstraint<'a>),
}

fn classify_const_atom<'a>(
    sig: &'a ActivitySignature,
    attr: &'a str,
    op: CmpOp,
    value: &'a Value,
) -> AtomOnActivity<'a> {
    match (sig.attribute_type(attr), value) {
        (Some(AttributeType::IntRange { .. }), Value::Int(n)) => AtomOnActivity::Int(IntConstraint {
            left: IntTerm::Attr(attr),
            op,
            right: IntTerm::Const(*n),
            negated: false,
        }),
        (Some(ty @ AttributeType::Enumeration(_)), Value::Sym(s)) => {
            if ty.position_of(s).is_none() {
                AtomOnActivity::StaticallyFalse
            } else {
                AtomOnActivity::Enum(EnumConstraint {
                    left: attr,
                    op,
                    right: EnumTermRhs::Const(s),
                    positional: true,
                    negated: false,
                })
            }
        }
        _ => AtomOnActivity::StaticallyFalse,
    }
}

fn classify_attr_atom<'a>(
    sig: &'a ActivitySignature,
    left: &'a str,
    op: CmpOp,
    right: &'a str,
) -> AtomOnActivity<'a> {
    match (sig.attribute_type(left), sig.attribute_type(right)) {
        (Some(AttributeType::IntRange { .. }), Some(AttributeType::IntRange { .. })) => {
            AtomOnActivity::Int(IntConstraint {
                left: IntTerm::Attr(left),
                op,
                right: IntTerm::Attr(right),
                negated: false,
            })
        }
        (Some(AttributeType::Enumeration(l)), Some(AttributeType::Enumeration(r))) => {
            if l == r {
                AtomOnActivity::Enum(EnumConstraint {
                    left,
                    op,
                    right: EnumTermRhs::Attr(right),
                    positional: true,
                    negated: false,
                })
            } else if op == CmpOp::Eq && l.iter().any(|x| r.contains(x)) {
                AtomOnActivity::Enum(EnumConstraint {
                    left,
                    op,
                    right: EnumTermRhs::Attr(right),
                    positional: false,
                    negated: false,
                })
            } else {
                AtomOnActivity::StaticallyFalse
            }
        }
        _ => AtomOnActivity::StaticallyFalse,
    }
}

// --- integer side: difference constraints --------------------------------

/// Feasibility of a conjunction of `x - y <= c` constraints (with domain
/// bounds) over the integers, by negative-cycle detection. Negated
/// equalities branch into `<` and `>`; the number of such branches is tiny
/// in practice, and past a safety cap we answer `true` conservatively.
fn int_system_satisfiable(sig: &ActivitySignature, constraints: &[IntConstraint]) -> bool {
    if constraints.is_empty() {
        return true;
    }

    let mut attrs: Vec<&str> = Vec::new();
    for c in constraints {
        for term in [&c.left, &c.right] {
            if let IntTerm::Attr(a) = term {
                if !attrs.contains(a) {
                    attrs.push(a);
                }
            }
        }
    }

    let mut hard: Vec<(usize, usize, i64)> = Vec::new(); // x_i - x_j <= w
    let mut branches: Vec<(IntTerm, IntTerm)> = Vec::new();
    let node = |attrs: &Vec<&str>, t: &IntTerm| -> (usize, i64) {
        match t {
            IntTerm::Attr(a) => (1 + attrs.iter().position(|x| x == a).unwrap(), 0),
            IntTerm::Const(c) => (0, *c), // node 0 is the zero reference
        }
    };
    // t1 + k <= t2 becomes x_{n1} - x_{n2} <= c2 - c1 - k.
    let add_le = |hard: &mut Vec<(usize, usize, i64)>, t1: &IntTerm, t2: &IntTerm, k: i64| {
        let (n1, c1) = node(&attrs, t1);
        let (n2, c2) = node(&attrs, t2);
        hard.push((n1, n2, c2 - c1 - k));
    };

    for (i, (attr, ty)) in sig.attributes().iter().enumerate() {
        let _ = i;
        if let AttributeType::IntRange { lo, hi } = ty {
            if attrs.contains(&attr.as_str()) {
                add_le(&mut hard, &IntTerm::Attr(attr), &IntTerm::Const(*hi), 0);
                add_le(&mut hard, &IntTerm::Const(*lo), &IntTerm::Attr(attr), 0);
            }
        }
    }

    for c in constraints {
        let effective = if c.negated { negate_int_op(c.op) } else { Some(c.op) };
        match effective {
            Some(CmpOp::Lt) => add_le(&mut hard, &c.left, &c.right, 1),
            Some(CmpOp::Le) => add_le(&mut hard, &c.left, &c.right, 0),
            Some(CmpOp::Ge) => add_le(&mut hard, &c.right, &c.left, 0),
            Some(CmpOp::Gt) => add_le(&mut hard, &c.right, &c.left, 1),
            Some(CmpOp::Eq) => {
                add_le(&mut hard, &c.left, &c.right, 0);
                add_le(&mut hard, &c.right, &c.left, 0);
            }
            None => branches.push((c.left, c.right)), // negated equality
        }
    }

    if branches.len() > 10 {
        return true; // conservative: never prunes a feasible system
    }
    let nodes = attrs.len() + 1;
    for choice in 0u32..(1 << branches.len()) {
        let mut edges = hard.clone();
        for (bi, (l, r)) in branches.iter().enumerate() {
            let (t1, t2, k) = if choice >> bi & 1 == 0 { (l, r, 1) } else { (r, l, 1) };
            let (n1, c1) = node(&attrs, t1);
            let (n2, c2) = node(&attrs, t2);
            edges.push((n1, n2, c2 - c1 - k));
        }
        if difference_system_feasible(nodes, &edges) {
            return true;
        }
    }
    false
}

fn negate_int_op(op: CmpOp) -> Option<CmpOp> {
    match op {
        CmpOp::Lt => Some(CmpOp::Ge),
        CmpOp::Le => Some(CmpOp::Gt),
        CmpOp::Ge => Some(CmpOp::Lt),
        CmpOp::Gt => Some(CmpOp::Le),
        CmpOp::Eq => None,
    }
}

/// Bellman–Ford negative-cycle test for `x_i - x_j <= w` systems.
fn difference_system_feasible(nodes: usize, edges: &[(usize, usize, i64)]) -> bool {
    let mut dist = vec![0i64; nodes];
    for round in 0..nodes {
        let mut changed = false;
        for &(x, y, w) in edges {
            // x - y <= w: relax dist[x] against dist[y] + w.
            let candidate = dist[y].saturating_add(w);
            if candidate < dist[x] {
                dist[x] = candidate;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
        if round + 1 == nodes && changed {
            return false;
        }
    }
    true
}

// --- enumeration side: bounded search -------------------------------------

fn enum_system_satisfiable(sig: &ActivitySignature, constraints: &[EnumConstraint]) -> bool {
    if constraints.is_empty() {
        return true;
    }
    let mut attrs: Vec<&str> = Vec::new();
    for c in constraints {
        if !attrs.contains(&c.left) {
            attrs.push(c.left);
        }
        if let EnumTermRhs::Attr(r) = c.right {
            if !attrs.contains(&r) {
                attrs.push(r);
            }
        }
    }
    let domains: Vec<&[String]> = attrs
        .iter()
        .map(|a| match sig.attribute_type(a) {
            Some(AttributeType::Enumeration(vals)) => vals.as_slice(),
            _ => &[][..],
        })
        .collect();
    let space: u64 = domains.iter().map(|d| d.len() as u64).product();
    if space == 0 {
        return false;
    }
    if space > 100_000 {
        return true; // conservative
    }

    let mut assignment: Vec<usize> = vec![0; attrs.len()];
    search(sig, constraints, &attrs, &domains, &mut assignment, 0)
}

fn search(
    sig: &ActivitySignature,
    constraints: &[EnumConstraint],
    attrs: &[&str],
    domains: &[&[String]],
    assignment: &mut Vec<usize>,
    depth: usize,
) -> bool {
    if depth == attrs.len() {
        return constraints
            .iter()
            .all(|c| enum_constraint_holds(sig, c, attrs, domains, assignment));
    }
    for i in 0..domains[depth].len() {
        assignment[depth] = i;
        if search(sig, constraints, attrs, domains, assignment, depth + 1) {
            return true;
        }
    }
    false
}

fn enum_constraint_holds(
    sig: &ActivitySignature,
    c: &EnumConstraint,
    attrs: &[&str],
    domains: &[&[String]],
    assignment: &[usize],
) -> bool {
    let slot = attrs.iter().position(|a| *a == c.left).unwrap();
    let left_val = &domains[slot][assignment[slot]];
    let outcome = match &c.right {
        EnumTermRhs::Const(s) => {
            if c.positional {
                let ty = sig.attribute_type(c.left).unwrap();
                match (ty.position_of(left_val), ty.position_of(s)) {
                    (Some(p), Some(q)) => c.op.evaluate(p, q),
                    _ => false,
                }
            } else {
                c.op == CmpOp::Eq && left_val == s
            }
        }
        EnumTermRhs::Attr(r) => {
            let rslot = attrs.iter().position(|a| a == r).unwrap();
            let right_val = &domains[rslot][assignment[rslot]];
            if c.positional {
                let ty = sig.attribute_type(c.left).unwrap();
                match (ty.position_of(left_val), ty.position_of(right_val)) {
                    (Some(p), Some(q)) => c.op.evaluate(p, q),
                    _ => false,
                }
            } else {
                left_val == right_val
            }
        }
    };
    outcome != c.negated
}
