//! Canonical temporal core and formula progression.
//!
//! Compilation works on a reduced form of the surface syntax: `true`,
//! event atoms, negation, n-ary conjunction/disjunction, next and until.
//! `false` is represented as `!true`, implication as `!l || r`, `F x` as
//! `true U x` and `G x` as `!(true U !x)`. The constructors keep every node
//! in a reduced disjunctive normal form over temporal literals (atoms,
//! nexts, untils, and their negations): clauses are sorted and deduplicated,
//! contradictory clauses and absorbed superset clauses are dropped, and
//! constants fold away. Residuals obtained by progression can therefore be
//! pooled into automaton states by plain equality, and since every literal
//! is drawn from the finite closure of the compiled formula, only finitely
//! many residuals exist and compilation always terminates.
//!
//! A residual describes what must hold of the *remaining* suffix of a
//! trace, which may be empty. That drives two non-obvious rules:
//!
//! * `x U true` is not `true` but [`live`] (`true U true`), satisfied
//!   exactly by non-empty suffixes, because an until needs at least one
//!   position to hold at; for the same reason `x U !true` folds to `!true`
//!   but `!true U y` must not fold to `y` (they differ on emptiness).
//! * progressing `X x` yields `x && live()`, not bare `x`: a strong next
//!   is false on the last event even when `x` itself would accept the
//!   empty remainder.

use std::collections::BTreeSet;

use crate::formula::{EventAtom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Node {
    True,
    Atom(EventAtom),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Next(Box<Node>),
    Until(Box<Node>, Box<Node>),
}

pub(crate) fn fls() -> Node {
    Node::Not(Box::new(Node::True))
}

pub(crate) fn is_false(n: &Node) -> bool {
    matches!(n, Node::Not(x) if **x == Node::True)
}

/// `true U true`: there is at least one more event.
pub(crate) fn live() -> Node {
    Node::Until(Box::new(Node::True), Box::new(Node::True))
}

/// A clause is a conjunction of literals (atoms, nexts, untils, and their
/// negations); a node in canonical form is a disjunction of clauses.
type Clause = BTreeSet<Node>;

fn negate_literal(l: &Node) -> Node {
    match l {
        Node::Not(x) => (**x).clone(),
        other => Node::Not(Box::new(other.clone())),
    }
}

/// Decompose a canonical node into its clauses. `false` is the empty
/// disjunction, `true` the empty conjunction.
fn to_clauses(n: Node) -> Vec<Clause> {
    if is_false(&n) {
        return Vec::new();
    }
    match n {
        Node::True => vec![Clause::new()],
        Node::Or(items) => items.into_iter().flat_map(to_clauses).collect(),
        Node::And(items) => vec![items.into_iter().collect()],
        literal => vec![Clause::from([literal])],
    }
}

/// Drop duplicate and absorbed clauses (any superset of another clause is
/// redundant), leaving a sorted antichain. Because the literals of every
/// clause come from the finite closure of the compiled formula, there are
/// finitely many antichains, which is what guarantees that progression
/// reaches finitely many distinct residuals.
fn reduce(mut clauses: Vec<Clause>) -> Vec<Clause> {
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Vec<Clause> = Vec::new();
    for clause in clauses {
        if !kept.iter().any(|k| k.is_subset(&clause)) {
            kept.push(clause);
        }
    }
    kept.sort();
    kept
}

/// Conjoin two clause sets, dropping contradictory merges.
fn and_clauses(a: &[Clause], b: &[Clause]) -> Vec<Clause> {
    let mut out = Vec::new();
    for ca in a {
        'merge: for cb in b {
            let merged: Clause = ca.union(cb).cloned().collect();
            for l in &merged {
                if merged.contains(&negate_literal(l)) {
                    continue 'merge;
                }
            }
            out.push(merged);
        }
    }
    reduce(out)
}

/// Rebuild a node from a reduced clause set.
fn from_clauses(clauses: Vec<Clause>) -> Node {
    if clauses.is_empty() {
        return fls();
    }
    if clauses[0].is_empty() {
        return Node::True;
    }
    let singles: BTreeSet<&Node> =
        clauses.iter().filter(|c| c.len() == 1).map(|c| c.first().unwrap()).collect();
    if singles.iter().any(|l| singles.contains(&negate_literal(l))) {
        return Node::True;
    }
    let mut items: Vec<Node> = clauses
        .into_iter()
        .map(|c| {
            if c.len() == 1 {
                c.into_iter().next().unwrap()
            } else {
                Node::And(c.into_iter().collect())
            }
        })
        .collect();
    items.sort();
    match items.len() {
        1 => items.pop().unwrap(),
        _ => Node::Or(items),
    }
}

pub(crate) fn not(x: Node) -> Node {
    let mut acc = vec![Clause::new()];
    for clause in to_clauses(x) {
        let complement: Vec<Clause> =
            clause.iter().map(|l| Clause::from([negate_literal(l)])).collect();
        acc = and_clauses(&acc, &complement);
        if acc.is_empty() {
            return fls();
        }
    }
    from_clauses(acc)
}

pub(crate) fn and(items: Vec<Node>) -> Node {
    let mut acc = vec![Clause::new()];
    for item in items {
        acc = and_clauses(&acc, &to_clauses(item));
        if acc.is_empty() {
            return fls();
        }
    }
    from_clauses(acc)
}

pub(crate) fn or(items: Vec<Node>) -> Node {
    let mut acc = Vec::new();
    for item in items {
        acc.extend(to_clauses(item));
    }
    from_clauses(reduce(acc))
}

pub(crate) fn next(x: Node) -> Node {
    if is_false(&x) {
        fls()
    } else {
        Node::Next(Box::new(x))
    }
}

pub(crate) fn until(l: Node, r: Node) -> Node {
    if is_false(&r) {
        return fls();
    }
    if r == Node::True {
        return live();
    }
    Node::Until(Box::new(l), Box::new(r))
}

pub(crate) fn normalize(f: &Formula) -> Node {
    if let Some(atom) = EventAtom::from_formula(f) {
        return match atom {
            EventAtom::True => Node::True,
            other => Node::Atom(other),
        };
    }
    match f {
        Formula::Not(x) => not(normalize(x)),
        Formula::And(l, r) => and(vec![normalize(l), normalize(r)]),
        Formula::Or(l, r) => or(vec![normalize(l), normalize(r)]),
        Formula::Implies(l, r) => or(vec![not(normalize(l)), normalize(r)]),
        Formula::Next(x) => next(normalize(x)),
        Formula::Until(l, r) => until(normalize(l), normalize(r)),
        Formula::Eventually(x) => until(Node::True, normalize(x)),
        Formula::Globally(x) => not(until(Node::True, not(normalize(x)))),
        _ => unreachable!("atomic formulas handled above"),
    }
}

/// Does the empty suffix satisfy the residual?
pub(crate) fn accepts_empty(n: &Node) -> bool {
    match n {
        Node::True => true,
        Node::Atom(_) => false,
        Node::Not(x) => !accepts_empty(x),
        Node::And(items) => items.iter().all(accepts_empty),
        Node::Or(items) => items.iter().any(accepts_empty),
        Node::Next(_) | Node::Until(..) => false,
    }
}

/// The atoms whose truth on the *current* event progression consults.
/// Atoms strictly under a next are evaluated on later events and are
/// deliberately excluded, which keeps per-state guard universes small.
pub(crate) fn immediate_atoms(n: &Node, out: &mut BTreeSet<EventAtom>) {
    match n {
        Node::True | Node::Next(_) => {}
        Node::Atom(a) => {
            out.insert(a.clone());
        }
        Node::Not(x) => immediate_atoms(x, out),
        Node::And(items) | Node::Or(items) => {
            for item in items {
                immediate_atoms(item, out);
            }
        }
        Node::Until(l, r) => {
            immediate_atoms(l, out);
            immediate_atoms(r, out);
        }
    }
}

/// Residual after consuming one event on which each atom's truth value is
/// given by `truth`.
pub(crate) fn progress<F: Fn(&EventAtom) -> bool>(n: &Node, truth: &F) -> Node {
    match n {
        Node::True => Node::True,
        Node::Atom(a) => {
            if truth(a) {
                Node::True
            } else {
                fls()
            }
        }
        Node::Not(x) => not(progress(x, truth)),
        Node::And(items) => and(items.iter().map(|i| progress(i, truth)).collect()),
        Node::Or(items) => or(items.iter().map(|i| progress(i, truth)).collect()),
        Node::Next(x) => and(vec![(**x).clone(), live()]),
        Node::Until(l, r) => or(vec![
            progress(r, truth),
            and(vec![progress(l, truth), n.clone()]),
        ]),
    }
}
