//! Builders for the program text.
//!
//! Everything here is deterministic: same model, same log, same lengths —
//! byte-identical program. Facts and rules use a fixed vocabulary of
//! predicates (`act`, `has_attr`, `val`, `init`, `acc`, `trans`, `hold`,
//! `state`, `trace`, `has_val`, `tr`, `tlength`, `time`, `var`,
//! `assgnmt`); names from the process model are emitted verbatim when they
//! are valid lowercase constants and double-quoted otherwise.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automata::{compile, Automaton, CompileError};
use crate::formula::{CmpOp, EventAtom, EventFormula};
use crate::model::{
    validate_trace, ActivitySignature, AttributeType, Log, ProcessVocabulary, TraceViolation,
    Value,
};
use crate::ProcessModel;

/// Hard cap on the number of rule bodies one guard may expand into.
const MAX_GUARD_BODIES: usize = 10_000;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(
        "constraints mention activity variables ({names}); \
         only query programs may contain variables",
        names = .variables.join(", ")
    )]
    HasVariables { variables: Vec<String> },
    #[error("invalid trace length range {min}..{max}; need 1 <= min <= max")]
    BadLengthRange { min: usize, max: usize },
    #[error("query programs need at least one trace")]
    EmptyLog,
    #[error("trace {id} is not a valid trace over the vocabulary: {first}", first = .problems[0])]
    InvalidTrace {
        id: String,
        problems: Vec<TraceViolation>,
    },
    #[error("a guard would expand into more than {MAX_GUARD_BODIES} rule bodies")]
    GuardExpansionTooLarge,
}

/// Render a model-level name as a program constant: unchanged when it
/// already is a valid lowercase constant, double-quoted otherwise.
fn asp_const(name: &str) -> String {
    let mut chars = name.chars();
    let lower_start = matches!(chars.next(), Some(c) if c.is_ascii_lowercase());
    if lower_start && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn value_term(value: &Value) -> String {
    match value {
        Value::Int(n) => n.to_string(),
        Value::Sym(s) => asp_const(s),
    }
}

/// Program variable holding the current value of an attribute.
fn value_var(attr: &str) -> String {
    let safe: String = attr
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    format!("V_{safe}")
}

/// Program constant naming an activity variable (`?A` becomes `varA`).
fn variable_const(var: &str) -> String {
    format!("var{var}")
}

fn trace_atom(per_trace: bool, activity_term: &str) -> String {
    if per_trace {
        format!("trace(J,{activity_term},T)")
    } else {
        format!("trace({activity_term},T)")
    }
}

fn has_val_atom(per_trace: bool, attr_term: &str, value: &str) -> String {
    if per_trace {
        format!("has_val(J,{attr_term},{value},T)")
    } else {
        format!("has_val({attr_term},{value},T)")
    }
}

fn hold_atom(index: usize, guard: usize, per_trace: bool) -> String {
    if per_trace {
        format!("hold({index},{guard},J,T)")
    } else {
        format!("hold({index},{guard},T)")
    }
}

/// Comparison symbol for the negation of `op` (`Eq` becomes `!=`).
fn flipped(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Lt => ">=",
        CmpOp::Le => ">",
        CmpOp::Eq => "!=",
        CmpOp::Ge => "<",
        CmpOp::Gt => "<=",
    }
}

/// One way a comparison literal can be realized on an event: an optional
/// activity the event must be an occurrence of, `has_val` atoms to add to
/// the body, and builtin comparisons over the bound value variables.
struct Alt {
    activity: Option<String>,
    has_vals: Vec<(String, String)>,
    builtins: Vec<String>,
}

impl Alt {
    /// The literal holds on this activity unconditionally.
    fn bare(activity: &str) -> Alt {
        Alt {
            activity: Some(activity.to_string()),
            has_vals: Vec::new(),
            builtins: Vec::new(),
        }
    }
}

/// Values of `list` whose position compares to the pivot's position as
/// demanded (`keep` selects the satisfying or the falsifying values).
/// `None` when the pivot is not in the list.
fn positional_values(list: &[String], op: CmpOp, pivot: &str, keep: bool) -> Option<Vec<String>> {
    let p = list.iter().position(|v| v == pivot)?;
    Some(
        list.iter()
            .enumerate()
            .filter(|&(i, _)| op.evaluate(i, p) == keep)
            .map(|(_, v)| v.clone())
            .collect(),
    )
}

fn positive_const_alts(v: &ProcessVocabulary, attr: &str, op: CmpOp, value: &Value) -> Vec<Alt> {
    if op == CmpOp::Eq {
        // Equality is exact term equality, independent of the activity.
        return vec![Alt {
            activity: None,
            has_vals: vec![(attr.to_string(), value_term(value))],
            builtins: Vec::new(),
        }];
    }
    match value {
        Value::Int(c) => {
            let decls: Vec<(&ActivitySignature, &AttributeType)> =
                v.attribute_declarations(attr).collect();
            let numeric: Vec<&ActivitySignature> = decls
                .iter()
                .filter(|(_, ty)| matches!(ty, AttributeType::IntRange { .. }))
                .map(|(sig, _)| *sig)
                .collect();
            let has_vals = vec![(attr.to_string(), value_var(attr))];
            let builtin = format!("{} {} {c}", value_var(attr), op.symbol());
            if numeric.len() == decls.len() {
                // Numeric everywhere the attribute exists: the builtin
                // alone is faithful.
                vec![Alt { activity: None, has_vals, builtins: vec![builtin] }]
            } else {
                // Symbolic declarations exist too; term order would compare
                // numbers with names, so pin the numeric activities.
                numeric
                    .into_iter()
                    .map(|sig| Alt {
                        activity: Some(sig.name().to_string()),
                        has_vals: has_vals.clone(),
                        builtins: vec![builtin.clone()],
                    })
                    .collect()
            }
        }
        Value::Sym(c) => {
            // Order between symbols is positional per enumeration, which no
            // builtin captures; expand into the concrete satisfying values.
            let lists: Vec<(&ActivitySignature, &[String])> = v
                .attribute_declarations(attr)
                .filter_map(|(sig, ty)| match ty {
                    AttributeType::Enumeration(vs) => Some((sig, vs.as_slice())),
                    AttributeType::IntRange { .. } => None,
                })
                .collect();
            let uniform = lists.windows(2).all(|w| w[0].1 == w[1].1);
            let mut alts = Vec::new();
            if uniform {
                if let Some((_, list)) = lists.first() {
                    for x in positional_values(list, op, c, true).unwrap_or_default() {
                        alts.push(Alt {
                            activity: None,
                            has_vals: vec![(attr.to_string(), asp_const(&x))],
                            builtins: Vec::new(),
                        });
                    }
                }
            } else {
                for (sig, list) in lists {
                    for x in positional_values(list, op, c, true).unwrap_or_default() {
                        alts.push(Alt {
                            activity: Some(sig.name().to_string()),
                            has_vals: vec![(attr.to_string(), asp_const(&x))],
                            builtins: Vec::new(),
                        });
                    }
                }
            }
            alts
        }
    }
}

fn negative_const_alts(v: &ProcessVocabulary, attr: &str, op: CmpOp, value: &Value) -> Vec<Alt> {
    // The negation also holds on every activity where the comparison is
    // statically false (attribute missing or of the wrong kind), so work
    // activity by activity.
    let mut alts = Vec::new();
    for sig in v.activities() {
        let name = sig.name();
        match (sig.attribute_type(attr), value) {
            (None, _) => alts.push(Alt::bare(name)),
            (Some(AttributeType::IntRange { .. }), Value::Int(c)) => alts.push(Alt {
                activity: Some(name.to_string()),
                has_vals: vec![(attr.to_string(), value_var(attr))],
                builtins: vec![format!("{} {} {c}", value_var(attr), flipped(op))],
            }),
            (Some(AttributeType::Enumeration(list)), Value::Sym(c)) => {
                if op == CmpOp::Eq {
                    alts.push(Alt {
                        activity: Some(name.to_string()),
                        has_vals: vec![(attr.to_string(), value_var(attr))],
                        builtins: vec![format!("{} != {}", value_var(attr), asp_const(c))],
                    });
                } else {
                    match positional_values(list, op, c, false) {
                        // Pivot outside this enumeration: the comparison is
                        // false here, its negation true.
                        None => alts.push(Alt::bare(name)),
                        Some(values) => {
                            for x in values {
                                alts.push(Alt {
                                    activity: Some(name.to_string()),
                                    has_vals: vec![(attr.to_string(), asp_const(&x))],
                                    builtins: Vec::new(),
                                });
                            }
                        }
                    }
                }
            }
            // Mismatched kinds: the comparison is statically false here.
            (Some(_), _) => alts.push(Alt::bare(name)),
        }
    }
    alts
}

fn positive_attr_alts(v: &ProcessVocabulary, left: &str, op: CmpOp, right: &str) -> Vec<Alt> {
    let pair_vars = || {
        vec![
            (left.to_string(), value_var(left)),
            (right.to_string(), value_var(right)),
        ]
    };
    if op == CmpOp::Eq {
        // Term equality is faithful for numbers and symbols alike, and the
        // `has_val` atoms already require both attributes to be present.
        return vec![Alt {
            activity: None,
            has_vals: pair_vars(),
            builtins: vec![format!("{} == {}", value_var(left), value_var(right))],
        }];
    }
    let carriers: Vec<(&ActivitySignature, &AttributeType, &AttributeType)> = v
        .activities()
        .iter()
        .filter_map(|sig| {
            Some((sig, sig.attribute_type(left)?, sig.attribute_type(right)?))
        })
        .collect();
    let all_numeric = !carriers.is_empty()
        && carriers.iter().all(|(_, l, r)| {
            matches!(l, AttributeType::IntRange { .. })
                && matches!(r, AttributeType::IntRange { .. })
        });
    let builtin = format!("{} {} {}", value_var(left), op.symbol(), value_var(right));
    if all_numeric {
        return vec![Alt { activity: None, has_vals: pair_vars(), builtins: vec![builtin] }];
    }
    let mut alts = Vec::new();
    for (sig, lt, rt) in carriers {
        match (lt, rt) {
            (AttributeType::IntRange { .. }, AttributeType::IntRange { .. }) => alts.push(Alt {
                activity: Some(sig.name().to_string()),
                has_vals: pair_vars(),
                builtins: vec![builtin.clone()],
            }),
            (AttributeType::Enumeration(l1), AttributeType::Enumeration(l2)) if l1 == l2 => {
                for (i, x) in l1.iter().enumerate() {
                    for (j, y) in l1.iter().enumerate() {
                        if op.evaluate(i, j) {
                            alts.push(Alt {
                                activity: Some(sig.name().to_string()),
                                has_vals: vec![
                                    (left.to_string(), asp_const(x)),
                                    (right.to_string(), asp_const(y)),
                                ],
                                builtins: Vec::new(),
                            });
                        }
                    }
                }
            }
            // Mixed kinds or differently ordered enumerations: statically
            // false on this activity.
            _ => {}
        }
    }
    alts
}

fn negative_attr_alts(v: &ProcessVocabulary, left: &str, op: CmpOp, right: &str) -> Vec<Alt> {
    let mut alts = Vec::new();
    for sig in v.activities() {
        let name = sig.name();
        let (Some(lt), Some(rt)) = (sig.attribute_type(left), sig.attribute_type(right)) else {
            alts.push(Alt::bare(name));
            continue;
        };
        let pair_vars = || {
            vec![
                (left.to_string(), value_var(left)),
                (right.to_string(), value_var(right)),
            ]
        };
        if op == CmpOp::Eq {
            // Inequality of terms is faithful whatever the kinds are.
            alts.push(Alt {
                activity: Some(name.to_string()),
                has_vals: pair_vars(),
                builtins: vec![format!("{} != {}", value_var(left), value_var(right))],
            });
            continue;
        }
        match (lt, rt) {
            (AttributeType::IntRange { .. }, AttributeType::IntRange { .. }) => alts.push(Alt {
                activity: Some(name.to_string()),
                has_vals: pair_vars(),
                builtins: vec![format!(
                    "{} {} {}",
                    value_var(left),
                    flipped(op),
                    value_var(right)
                )],
            }),
            (AttributeType::Enumeration(l1), AttributeType::Enumeration(l2)) if l1 == l2 => {
                for (i, x) in l1.iter().enumerate() {
                    for (j, y) in l1.iter().enumerate() {
                        if !op.evaluate(i, j) {
                            alts.push(Alt {
                                activity: Some(name.to_string()),
                                has_vals: vec![
                                    (left.to_string(), asp_const(x)),
                                    (right.to_string(), asp_const(y)),
                                ],
                                builtins: Vec::new(),
                            });
                        }
                    }
                }
            }
            // Statically false comparison, so the negation always holds.
            _ => alts.push(Alt::bare(name)),
        }
    }
    alts
}

/// Rule bodies (a disjunction of conjunctions of body atoms) equivalent to
/// the guard on events of the vocabulary.
fn guard_bodies(
    v: &ProcessVocabulary,
    guard: &EventFormula,
    per_trace: bool,
) -> Result<Vec<Vec<String>>, EmitError> {
    let mut pos_activity: Option<&str> = None;
    let mut neg_activities: Vec<&str> = Vec::new();
    let mut pos_vars: Vec<&str> = Vec::new();
    let mut neg_vars: Vec<&str> = Vec::new();
    let mut alt_lists: Vec<Vec<Alt>> = Vec::new();
    for lit in guard.literals() {
        match (&lit.atom, lit.negated) {
            (EventAtom::True, false) => {}
            (EventAtom::True, true) => return Ok(Vec::new()),
            (EventAtom::Activity(a), false) => {
                if pos_activity.is_some_and(|cur| cur != a) {
                    return Ok(Vec::new());
                }
                pos_activity = Some(a);
            }
            (EventAtom::Activity(a), true) => neg_activities.push(a),
            (EventAtom::Variable(x), false) => pos_vars.push(x),
            (EventAtom::Variable(x), true) => neg_vars.push(x),
            (EventAtom::AttrCmpConst(attr, op, value), negated) => alt_lists.push(if negated {
                negative_const_alts(v, attr, *op, value)
            } else {
                positive_const_alts(v, attr, *op, value)
            }),
            (EventAtom::AttrCmpAttr(l, op, r), negated) => alt_lists.push(if negated {
                negative_attr_alts(v, l, *op, r)
            } else {
                positive_attr_alts(v, l, *op, r)
            }),
        }
    }

    // Cross product of the per-literal alternatives.
    let mut combos: Vec<Vec<&Alt>> = vec![Vec::new()];
    for alts in &alt_lists {
        let mut next = Vec::with_capacity(combos.len().saturating_mul(alts.len()));
        for combo in &combos {
            for alt in alts {
                let mut with = combo.clone();
                with.push(alt);
                next.push(with);
            }
        }
        combos = next;
        if combos.len() > MAX_GUARD_BODIES {
            return Err(EmitError::GuardExpansionTooLarge);
        }
    }

    let mut bodies: Vec<Vec<String>> = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    'combo: for combo in combos {
        // Reconcile the activity restrictions of the chosen alternatives.
        let mut activity = pos_activity;
        for alt in &combo {
            if let Some(required) = alt.activity.as_deref() {
                match activity {
                    None => activity = Some(required),
                    Some(cur) if cur == required => {}
                    Some(_) => continue 'combo,
                }
            }
        }
        if let Some(cur) = activity {
            if neg_activities.contains(&cur) {
                continue 'combo;
            }
        }
        let needs_event_var = activity.is_none()
            && (!neg_activities.is_empty() || !pos_vars.is_empty() || !neg_vars.is_empty());
        let activity_term = match activity {
            Some(a) => Some(asp_const(a)),
            None if needs_event_var => Some("A".to_string()),
            None => None,
        };

        let mut atoms: Vec<String> = Vec::new();
        let mut grounded = false;
        if let Some(term) = &activity_term {
            atoms.push(trace_atom(per_trace, term));
            grounded = true;
        }
        if activity.is_none() && !neg_activities.is_empty() {
            atoms.push("act(A)".to_string());
            for b in &neg_activities {
                atoms.push(format!("A != {}", asp_const(b)));
            }
        }
        for x in &pos_vars {
            let term = activity_term.as_deref().expect("event variable bound");
            atoms.push(format!("assgnmt({},{term})", variable_const(x)));
        }
        for (i, x) in neg_vars.iter().enumerate() {
            let term = activity_term.as_deref().expect("event variable bound");
            let w = if i == 0 { "W".to_string() } else { format!("W{}", i + 1) };
            atoms.push(format!("assgnmt({},{w})", variable_const(x)));
            atoms.push(format!("{w} != {term}"));
        }
        for alt in &combo {
            for (attr, value) in &alt.has_vals {
                let atom = has_val_atom(per_trace, &asp_const(attr), value);
                if !atoms.contains(&atom) {
                    atoms.push(atom);
                    grounded = true;
                }
            }
        }
        for alt in &combo {
            for builtin in &alt.builtins {
                if !atoms.contains(builtin) {
                    atoms.push(builtin.clone());
                }
            }
        }
        if !grounded {
            if per_trace {
                atoms.push("tr(J)".to_string());
            }
            atoms.push("time(T)".to_string());
        }
        if seen.insert(atoms.clone()) {
            bodies.push(atoms);
        }
    }
    Ok(bodies)
}

/// Emit one automaton as `init`/`acc`/`trans` facts plus `hold` rules,
/// numbering guards from 1. With `per_trace` the `trace`, `has_val` and
/// `hold` atoms carry a leading trace index `J`.
pub fn emit_automaton(
    v: &ProcessVocabulary,
    automaton: &Automaton,
    index: usize,
    per_trace: bool,
) -> Result<String, EmitError> {
    let groups = automaton.groups();
    let mut offsets = vec![0usize; automaton.state_count() + 1];
    for g in groups {
        offsets[g.source + 1] += 1;
    }
    for s in 0..automaton.state_count() {
        offsets[s + 1] += offsets[s];
    }

    // A state with exactly two outgoing groups, of which exactly one is a
    // self-loop and the other carries only all-positive guards, emits the
    // self-loop as the complement of the other group instead of spelling
    // its own guards out.
    let mut complement_of: Vec<Option<usize>> = vec![None; groups.len()];
    for s in 0..automaton.state_count() {
        if offsets[s + 1] - offsets[s] != 2 {
            continue;
        }
        let (first, second) = (offsets[s], offsets[s] + 1);
        let loops = [first, second].map(|gi| groups[gi].target == groups[gi].source);
        let (looping, primary) = match loops {
            [true, false] => (first, second),
            [false, true] => (second, first),
            _ => continue,
        };
        let all_positive = groups[primary]
            .guards
            .iter()
            .all(|g| g.literals().iter().all(|l| !l.negated));
        if all_positive {
            complement_of[looping] = Some(primary);
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "init({index},s{}).", automaton.initial());
    for q in automaton.accepting_states() {
        let _ = writeln!(out, "acc({index},s{q}).");
    }

    let mut guard_ids: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    let mut next_guard = 0usize;
    for (gi, group) in groups.iter().enumerate() {
        if complement_of[gi].is_some() {
            continue;
        }
        for guard in &group.guards {
            next_guard += 1;
            guard_ids[gi].push(next_guard);
            let _ = writeln!(
                out,
                "trans({index},s{},{next_guard},s{}).",
                group.source, group.target
            );
            let bodies = guard_bodies(v, guard, per_trace)?;
            debug_assert!(!bodies.is_empty(), "guard `{guard}` expands to no rule bodies");
            for body in bodies {
                let _ = writeln!(
                    out,
                    "{} :- {}.",
                    hold_atom(index, next_guard, per_trace),
                    body.join(", ")
                );
            }
        }
    }
    for (gi, group) in groups.iter().enumerate() {
        let Some(primary) = complement_of[gi] else { continue };
        next_guard += 1;
        let _ = writeln!(
            out,
            "trans({index},s{},{next_guard},s{}).",
            group.source, group.target
        );
        let pg = &groups[primary];
        let single_activity = pg.guards.len() == 1
            && pg.guards[0].literals().len() == 1
            && matches!(pg.guards[0].literals()[0].atom, EventAtom::Activity(_));
        if single_activity && group.source != automaton.initial() {
            // "Any event that is not b": directly as an inequality.
            let EventAtom::Activity(b) = &pg.guards[0].literals()[0].atom else {
                unreachable!()
            };
            let body = if per_trace {
                format!("trace(J,A,T), act(A), A != {}", asp_const(b))
            } else {
                format!("trace(A,T), act(A), A != {}", asp_const(b))
            };
            let _ = writeln!(out, "{} :- {body}.", hold_atom(index, next_guard, per_trace));
        } else {
            // General complement: negation as failure over the primary
            // group's guards.
            let mut parts: Vec<String> = guard_ids[primary]
                .iter()
                .map(|j| format!("not {}", hold_atom(index, *j, per_trace)))
                .collect();
            if per_trace {
                parts.push("tr(J)".to_string());
            }
            parts.push("time(T)".to_string());
            let _ = writeln!(
                out,
                "{} :- {}.",
                hold_atom(index, next_guard, per_trace),
                parts.join(", ")
            );
        }
    }
    Ok(out)
}

/// Rules simulating every emitted automaton and requiring acceptance.
pub fn emit_run_rules(per_trace: bool) -> String {
    if per_trace {
        concat!(
            "% simulate every automaton over every trace\n",
            "state(I,J,S,0) :- init(I,S), tr(J).\n",
            "state(I,J,S2,T) :- state(I,J,S1,T-1), trans(I,S1,F,S2), hold(I,F,J,T-1).\n",
            "accepted(I,J) :- state(I,J,S,T), acc(I,S), tlength(J,T).\n",
            "% a trace conforms when every automaton run ends accepting\n",
            ":- init(I,_), tr(J), not accepted(I,J).\n",
        )
        .to_string()
    } else {
        concat!(
            "% simulate every automaton over the trace\n",
            "state(I,S,0) :- init(I,S).\n",
            "state(I,S2,T) :- state(I,S1,T-1), trans(I,S1,F,S2), hold(I,F,T-1).\n",
            "accepted(I) :- state(I,S,T), acc(I,S), tlength(T).\n",
            "% the trace conforms when every automaton run ends accepting\n",
            ":- init(I,_), not accepted(I).\n",
        )
        .to_string()
    }
}

fn push_value_facts(out: &mut String, v: &ProcessVocabulary, attr: &str) {
    // Merged integer intervals first, then enumeration values in
    // first-declaration order.
    let mut intervals: Vec<(i64, i64)> = v
        .attribute_declarations(attr)
        .filter_map(|(_, ty)| match ty {
            AttributeType::IntRange { lo, hi } => Some((*lo, *hi)),
            AttributeType::Enumeration(_) => None,
        })
        .collect();
    intervals.sort_unstable();
    let mut merged: Vec<(i64, i64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some((_, top)) if lo <= top.saturating_add(1) => *top = (*top).max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    for (lo, hi) in merged {
        if lo == hi {
            let _ = writeln!(out, "val({},{lo}).", asp_const(attr));
        } else {
            let _ = writeln!(out, "val({},{lo}..{hi}).", asp_const(attr));
        }
    }
    let mut seen = BTreeSet::new();
    for (_, ty) in v.attribute_declarations(attr) {
        if let AttributeType::Enumeration(vs) = ty {
            for s in vs {
                if seen.insert(s.clone()) {
                    let _ = writeln!(out, "val({},{}).", asp_const(attr), asp_const(s));
                }
            }
        }
    }
}

/// Facts describing the vocabulary: activities, which attributes they
/// carry, and the value universe of each attribute name.
pub fn emit_vocabulary(v: &ProcessVocabulary) -> String {
    let mut out = String::new();
    for sig in v.activities() {
        let _ = writeln!(out, "act({}).", asp_const(sig.name()));
    }
    for sig in v.activities() {
        for (attr, _) in sig.attributes() {
            let _ = writeln!(out, "has_attr({},{}).", asp_const(sig.name()), asp_const(attr));
        }
    }
    let mut seen = BTreeSet::new();
    for sig in v.activities() {
        for (attr, _) in sig.attributes() {
            if seen.insert(attr.clone()) {
                push_value_facts(&mut out, v, attr);
            }
        }
    }
    out
}

/// Does any attribute name carry different domains on different activities?
fn mixed_domains(v: &ProcessVocabulary) -> bool {
    let mut seen = BTreeSet::new();
    for sig in v.activities() {
        for (attr, ty) in sig.attributes() {
            if seen.insert(attr.clone())
                && v.attribute_declarations(attr).any(|(_, other)| other != ty)
            {
                return true;
            }
        }
    }
    false
}

fn push_activity_value_facts(out: &mut String, sig: &ActivitySignature) {
    for (attr, ty) in sig.attributes() {
        let head = format!("val_for({},{}", asp_const(sig.name()), asp_const(attr));
        match ty {
            AttributeType::IntRange { lo, hi } if lo == hi => {
                let _ = writeln!(out, "{head},{lo}).");
            }
            AttributeType::IntRange { lo, hi } => {
                let _ = writeln!(out, "{head},{lo}..{hi}).");
            }
            AttributeType::Enumeration(vs) => {
                for s in vs {
                    let _ = writeln!(out, "{head},{}).", asp_const(s));
                }
            }
        }
    }
}

fn reject_variables(model: &ProcessModel) -> Result<(), EmitError> {
    let variables: Vec<String> = model
        .variables()
        .into_iter()
        .map(|x| format!("?{x}"))
        .collect();
    if variables.is_empty() {
        Ok(())
    } else {
        Err(EmitError::HasVariables { variables })
    }
}

fn push_automata(
    out: &mut String,
    model: &ProcessModel,
    per_trace: bool,
) -> Result<(), EmitError> {
    out.push_str("\n% constraint automata\n");
    for (i, f) in model.constraints.iter().enumerate() {
        let automaton = compile(f, &model.vocabulary)?;
        out.push_str(&emit_automaton(&model.vocabulary, &automaton, i + 1, per_trace)?);
    }
    Ok(())
}

/// Ground the log as facts: `tr`, `time`, per-trace `tlength`, and one
/// `trace` fact (plus `has_val` facts) per event. Traces are numbered from
/// 1 in log order; any invalid trace is an error.
fn validated_log_facts(v: &ProcessVocabulary, log: &Log) -> Result<String, EmitError> {
    for (i, trace) in log.traces.iter().enumerate() {
        let problems = validate_trace(v, trace);
        if !problems.is_empty() {
            return Err(EmitError::InvalidTrace {
                id: trace.id.clone().unwrap_or_else(|| format!("#{}", i + 1)),
                problems,
            });
        }
    }
    let mut out = String::new();
    let max_len = log.traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let _ = writeln!(out, "tr(1..{}).", log.traces.len());
    let _ = writeln!(out, "time(0..{max_len}).");
    for (i, trace) in log.traces.iter().enumerate() {
        let j = i + 1;
        let _ = writeln!(out, "tlength({j},{}).", trace.len());
        for (t, event) in trace.events.iter().enumerate() {
            let _ = writeln!(out, "trace({j},{},{t}).", asp_const(&event.activity));
            let sig = v.signature(&event.activity).expect("trace was validated");
            for ((attr, _), value) in sig.attributes().iter().zip(&event.values) {
                let _ = writeln!(
                    out,
                    "has_val({j},{},{},{t}).",
                    asp_const(attr),
                    value_term(value)
                );
            }
        }
    }
    Ok(out)
}

/// A program whose answer sets are exactly the traces of the requested
/// lengths that satisfy every constraint of the model.
pub fn emit_generation_problem(
    model: &ProcessModel,
    min_length: usize,
    max_length: usize,
) -> Result<String, EmitError> {
    reject_variables(model)?;
    if min_length == 0 || min_length > max_length {
        return Err(EmitError::BadLengthRange { min: min_length, max: max_length });
    }
    let v = &model.vocabulary;
    let mut out = String::new();
    out.push_str("% vocabulary\n");
    out.push_str(&emit_vocabulary(v));
    push_automata(&mut out, model, false)?;
    out.push_str("\n% trace guess\n");
    let _ = writeln!(out, "time(0..{max_length}).");
    if min_length == max_length {
        let _ = writeln!(out, "tlength({max_length}).");
    } else {
        let _ = writeln!(out, "1 {{ tlength(L) : L = {min_length}..{max_length} }} 1.");
    }
    out.push_str("1 { trace(A,T) : act(A) } 1 :- time(T), tlength(L), T < L.\n");
    if mixed_domains(v) {
        // The same attribute name has different domains on different
        // activities, so the guess must be scoped per activity.
        for sig in v.activities() {
            push_activity_value_facts(&mut out, sig);
        }
        out.push_str("1 { has_val(N,V,T) : val_for(A,N,V) } 1 :- trace(A,T), has_attr(A,N).\n");
    } else {
        out.push_str("1 { has_val(N,V,T) : val(N,V) } 1 :- trace(A,T), has_attr(A,N).\n");
    }
    out.push_str(":- has_val(N,_,T), trace(A,T), not has_attr(A,N).\n");
    out.push('\n');
    out.push_str(&emit_run_rules(false));
    out.push_str("\n#show trace/2.\n#show has_val/3.\n");
    Ok(out)
}

/// A program that is satisfiable iff every trace of the log satisfies
/// every constraint of the model.
pub fn emit_conformance_problem(model: &ProcessModel, log: &Log) -> Result<String, EmitError> {
    reject_variables(model)?;
    let facts = validated_log_facts(&model.vocabulary, log)?;
    let mut out = String::new();
    out.push_str("% vocabulary\n");
    out.push_str(&emit_vocabulary(&model.vocabulary));
    push_automata(&mut out, model, true)?;
    out.push_str("\n% log\n");
    out.push_str(&facts);
    out.push('\n');
    out.push_str(&emit_run_rules(true));
    Ok(out)
}

/// A program whose answer sets are exactly the variable assignments under
/// which every trace of the log satisfies every constraint of the model.
pub fn emit_query_problem(model: &ProcessModel, log: &Log) -> Result<String, EmitError> {
    if log.traces.is_empty() {
        return Err(EmitError::EmptyLog);
    }
    let facts = validated_log_facts(&model.vocabulary, log)?;
    let mut out = String::new();
    out.push_str("% vocabulary\n");
    out.push_str(&emit_vocabulary(&model.vocabulary));
    push_automata(&mut out, model, true)?;
    out.push_str("\n% log\n");
    out.push_str(&facts);
    let variables = model.variables();
    if !variables.is_empty() {
        out.push_str("\n% assignment guess\n");
        for x in &variables {
            let _ = writeln!(out, "var({}).", variable_const(x));
        }
        out.push_str("1 { assgnmt(V,A) : act(A) } 1 :- var(V).\n");
    }
    out.push('\n');
    out.push_str(&emit_run_rules(true));
    out.push_str("\n#show assgnmt/2.\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::check_syntax;
    use crate::formula::{parse, EventLiteral};
    use crate::model::{Event, Trace};

    fn vocab(activities: Vec<ActivitySignature>) -> ProcessVocabulary {
        ProcessVocabulary::new(activities).unwrap()
    }

    fn plain() -> ProcessVocabulary {
        vocab(vec![
            ActivitySignature::new("a", vec![]).unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
    }

    fn with_ints() -> ProcessVocabulary {
        vocab(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 9).unwrap())],
            )
            .unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
    }

    fn with_enum() -> ProcessVocabulary {
        vocab(vec![
            ActivitySignature::new(
                "c",
                vec![(
                    "status".into(),
                    AttributeType::enumeration(["low", "mid", "high"]).unwrap(),
                )],
            )
            .unwrap(),
            ActivitySignature::new("d", vec![]).unwrap(),
        ])
    }

    fn emit(v: &ProcessVocabulary, text: &str, index: usize) -> String {
        let automaton = compile(&parse(text, v).unwrap(), v).unwrap();
        emit_automaton(v, &automaton, index, false).unwrap()
    }

    #[test]
    fn response_automaton_emits_the_reference_listing() {
        let listing = emit(&plain(), "G(a -> F b)", 1);
        assert_eq!(
            listing,
            "init(1,s0).\n\
             acc(1,s0).\n\
             trans(1,s0,1,s1).\n\
             hold(1,1,T) :- trace(a,T).\n\
             trans(1,s1,2,s0).\n\
             hold(1,2,T) :- trace(b,T).\n\
             trans(1,s0,3,s0).\n\
             hold(1,3,T) :- not hold(1,1,T), time(T).\n\
             trans(1,s1,4,s1).\n\
             hold(1,4,T) :- trace(A,T), act(A), A != b.\n"
        );
    }

    #[test]
    fn trivial_automaton_emits_one_unconditional_loop() {
        let v = plain();
        let automaton = Automaton::trivial();
        let listing = emit_automaton(&v, &automaton, 3, false).unwrap();
        assert_eq!(
            listing,
            "init(3,s0).\n\
             acc(3,s0).\n\
             trans(3,s0,1,s0).\n\
             hold(3,1,T) :- time(T).\n"
        );
    }

    #[test]
    fn data_guards_bind_values_and_compare() {
        let listing = emit(&with_ints(), "G(a -> n >= 5)", 1);
        assert_eq!(
            listing,
            "init(1,s0).\n\
             acc(1,s0).\n\
             trans(1,s0,1,s1).\n\
             hold(1,1,T) :- trace(a,T), has_val(n,V_n,T), V_n < 5.\n\
             trans(1,s1,2,s1).\n\
             hold(1,2,T) :- time(T).\n\
             trans(1,s0,3,s0).\n\
             hold(1,3,T) :- not hold(1,1,T), time(T).\n"
        );
    }

    #[test]
    fn variable_guards_use_assignment_atoms() {
        let listing = emit(&plain(), "F ?A", 1);
        assert_eq!(
            listing,
            "init(1,s0).\n\
             acc(1,s1).\n\
             trans(1,s0,1,s1).\n\
             hold(1,1,T) :- trace(A,T), assgnmt(varA,A).\n\
             trans(1,s1,2,s1).\n\
             hold(1,2,T) :- time(T).\n\
             trans(1,s0,3,s0).\n\
             hold(1,3,T) :- not hold(1,1,T), time(T).\n"
        );
    }

    #[test]
    fn positional_enum_guards_expand_into_value_rules() {
        let listing = emit(&with_enum(), "F(status >= mid)", 1);
        assert_eq!(
            listing,
            "init(1,s0).\n\
             acc(1,s1).\n\
             trans(1,s0,1,s1).\n\
             hold(1,1,T) :- has_val(status,mid,T).\n\
             hold(1,1,T) :- has_val(status,high,T).\n\
             trans(1,s1,2,s1).\n\
             hold(1,2,T) :- time(T).\n\
             trans(1,s0,3,s0).\n\
             hold(1,3,T) :- not hold(1,1,T), time(T).\n"
        );
    }

    #[test]
    fn negated_activity_guards_emit_inequalities_outside_complements() {
        // Three activities keep the first state's progress group from being
        // a complement, and the middle state has no self-loop at all, so
        // its "anything but b" guard is emitted directly.
        let v = vocab(vec![
            ActivitySignature::new("a", vec![]).unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
            ActivitySignature::new("c", vec![]).unwrap(),
        ]);
        let listing = emit(&v, "G(a -> X b)", 1);
        assert_eq!(
            listing,
            "init(1,s0).\n\
             acc(1,s0).\n\
             trans(1,s0,1,s1).\n\
             hold(1,1,T) :- trace(a,T).\n\
             trans(1,s1,2,s2).\n\
             hold(1,2,T) :- trace(A,T), act(A), A != b.\n\
             trans(1,s1,3,s0).\n\
             hold(1,3,T) :- trace(b,T).\n\
             trans(1,s2,4,s2).\n\
             hold(1,4,T) :- time(T).\n\
             trans(1,s0,5,s0).\n\
             hold(1,5,T) :- not hold(1,1,T), time(T).\n"
        );
    }

    #[test]
    fn attribute_comparisons_share_the_event_values() {
        let v = vocab(vec![ActivitySignature::new(
            "a",
            vec![
                ("n".into(), AttributeType::int_range(0, 3).unwrap()),
                ("m".into(), AttributeType::int_range(0, 3).unwrap()),
            ],
        )
        .unwrap()]);
        let listing = emit(&v, "F(n == m)", 1);
        assert!(
            listing.contains(
                "hold(1,1,T) :- has_val(n,V_n,T), has_val(m,V_m,T), V_n == V_m.\n"
            ),
            "{listing}"
        );
    }

    #[test]
    fn negated_comparisons_split_by_activity() {
        let v = vocab(vec![
            ActivitySignature::new(
                "e",
                vec![
                    (
                        "status".into(),
                        AttributeType::enumeration(["low", "mid"]).unwrap(),
                    ),
                    (
                        "grade".into(),
                        AttributeType::enumeration(["mid", "high"]).unwrap(),
                    ),
                ],
            )
            .unwrap(),
            ActivitySignature::new("f", vec![]).unwrap(),
        ]);
        let guard = EventFormula::new(vec![EventLiteral::negative(EventAtom::AttrCmpAttr(
            "status".into(),
            CmpOp::Eq,
            "grade".into(),
        ))]);
        let bodies = guard_bodies(&v, &guard, false).unwrap();
        assert_eq!(
            bodies,
            vec![
                vec![
                    "trace(e,T)".to_string(),
                    "has_val(status,V_status,T)".to_string(),
                    "has_val(grade,V_grade,T)".to_string(),
                    "V_status != V_grade".to_string(),
                ],
                vec!["trace(f,T)".to_string()],
            ]
        );
    }

    #[test]
    fn negated_positional_comparisons_expand_failing_values() {
        let v = with_enum();
        let guard = EventFormula::new(vec![EventLiteral::negative(EventAtom::AttrCmpConst(
            "status".into(),
            CmpOp::Ge,
            Value::Sym("mid".into()),
        ))]);
        let bodies = guard_bodies(&v, &guard, false).unwrap();
        assert_eq!(
            bodies,
            vec![
                vec!["trace(c,T)".to_string(), "has_val(status,low,T)".to_string()],
                vec!["trace(d,T)".to_string()],
            ]
        );
    }

    #[test]
    fn vocabulary_facts_cover_activities_attributes_and_values() {
        let v = vocab(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 9).unwrap())],
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
        ]);
        assert_eq!(
            emit_vocabulary(&v),
            "act(a).\n\
             act(b).\n\
             act(c).\n\
             has_attr(a,n).\n\
             has_attr(c,status).\n\
             val(n,0..9).\n\
             val(status,low).\n\
             val(status,mid).\n\
             val(status,high).\n"
        );
    }

    #[test]
    fn generation_program_guesses_traces_and_values() {
        let v = with_ints();
        let model = ProcessModel::new(
            v.clone(),
            vec![parse("G(a -> n >= 1)", &v).unwrap()],
        )
        .unwrap();
        let program = emit_generation_problem(&model, 1, 2).unwrap();
        assert!(program.contains("1 { tlength(L) : L = 1..2 } 1.\n"), "{program}");
        assert!(program.contains("1 { trace(A,T) : act(A) } 1 :- time(T), tlength(L), T < L.\n"));
        assert!(program.contains("1 { has_val(N,V,T) : val(N,V) } 1 :- trace(A,T), has_attr(A,N).\n"));
        assert!(program.contains("#show trace/2.\n#show has_val/3.\n"));
        check_syntax(&program).unwrap();
    }

    #[test]
    fn generation_scopes_value_guesses_when_domains_differ() {
        let v = vocab(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 3).unwrap())],
            )
            .unwrap(),
            ActivitySignature::new(
                "b",
                vec![("n".into(), AttributeType::int_range(0, 5).unwrap())],
            )
            .unwrap(),
        ]);
        let model = ProcessModel::new(v, vec![]).unwrap();
        let program = emit_generation_problem(&model, 2, 2).unwrap();
        assert!(program.contains("val(n,0..5).\n"), "{program}");
        assert!(program.contains("val_for(a,n,0..3).\n"));
        assert!(program.contains("val_for(b,n,0..5).\n"));
        assert!(program
            .contains("1 { has_val(N,V,T) : val_for(A,N,V) } 1 :- trace(A,T), has_attr(A,N).\n"));
        check_syntax(&program).unwrap();
    }

    #[test]
    fn generation_rejects_variables_and_bad_ranges() {
        let v = plain();
        let with_var =
            ProcessModel::new(v.clone(), vec![parse("F ?A", &v).unwrap()]).unwrap();
        assert!(matches!(
            emit_generation_problem(&with_var, 1, 2),
            Err(EmitError::HasVariables { .. })
        ));
        let model = ProcessModel::new(v, vec![]).unwrap();
        assert!(matches!(
            emit_generation_problem(&model, 0, 2),
            Err(EmitError::BadLengthRange { .. })
        ));
        assert!(matches!(
            emit_generation_problem(&model, 3, 2),
            Err(EmitError::BadLengthRange { .. })
        ));
    }

    #[test]
    fn conformance_program_grounds_the_log_per_trace() {
        let v = with_ints();
        let model = ProcessModel::new(
            v.clone(),
            vec![parse("G(a -> F b)", &v).unwrap()],
        )
        .unwrap();
        let log = Log::new(vec![
            Trace::with_id("t1", vec![Event::new("a", vec![Value::Int(5)]), Event::new("b", vec![])]),
            Trace::with_id("t2", vec![Event::new("b", vec![])]),
        ]);
        let program = emit_conformance_problem(&model, &log).unwrap();
        assert!(program.contains("tr(1..2).\n"), "{program}");
        assert!(program.contains("time(0..2).\n"));
        assert!(program.contains("tlength(1,2).\n"));
        assert!(program.contains("trace(1,a,0).\n"));
        assert!(program.contains("has_val(1,n,5,0).\n"));
        assert!(program.contains("trace(2,b,0).\n"));
        assert!(program.contains("hold(1,1,J,T) :- trace(J,a,T).\n"));
        assert!(program.contains("state(I,J,S,0) :- init(I,S), tr(J).\n"));
        assert!(program.contains(":- init(I,_), tr(J), not accepted(I,J).\n"));
        check_syntax(&program).unwrap();
    }

    #[test]
    fn conformance_rejects_invalid_traces() {
        let v = with_ints();
        let model = ProcessModel::new(v, vec![]).unwrap();
        let log = Log::new(vec![Trace::with_id("bad", vec![Event::new("a", vec![])])]);
        assert!(matches!(
            emit_conformance_problem(&model, &log),
            Err(EmitError::InvalidTrace { .. })
        ));
    }

    #[test]
    fn query_program_adds_the_assignment_guess() {
        let v = plain();
        let model = ProcessModel::new(
            v.clone(),
            vec![parse("G(?A -> F ?B)", &v).unwrap()],
        )
        .unwrap();
        let log = Log::new(vec![Trace::with_id(
            "t1",
            vec![Event::new("a", vec![]), Event::new("b", vec![])],
        )]);
        let program = emit_query_problem(&model, &log).unwrap();
        assert!(program.contains("var(varA).\nvar(varB).\n"), "{program}");
        assert!(program.contains("1 { assgnmt(V,A) : act(A) } 1 :- var(V).\n"));
        assert!(program.contains("#show assgnmt/2.\n"));
        check_syntax(&program).unwrap();
        assert!(matches!(
            emit_query_problem(&model, &Log::new(vec![])),
            Err(EmitError::EmptyLog)
        ));
    }

    #[test]
    fn odd_names_are_quoted() {
        assert_eq!(asp_const("fine_name3"), "fine_name3");
        assert_eq!(asp_const("Upper"), "\"Upper\"");
        assert_eq!(asp_const("has space"), "\"has space\"");
        assert_eq!(asp_const("has\"quote"), "\"has\\\"quote\"");
    }
}
