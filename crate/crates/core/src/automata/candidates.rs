//! Which truth assignments over a state's atoms can an event realize?
//!
//! Compilation needs, per source state, the set of realizable truth
//! assignments over that state's event atoms. Testing all `2^k` assignments
//! for satisfiability grows hopeless well before the atom cap, so this
//! module enumerates from the other side: it walks a finite set of
//! *candidate events* that provably covers every realizable assignment,
//! evaluates the atoms on each, and collects the distinct assignments.
//!
//! Candidates are built activity by activity. Enumeration attributes range
//! over their full declared value lists. An integer attribute ranges over a
//! small *boundary grid*: the constants the atoms mention, the domain
//! bounds, and offsets up to the number of integer attributes around each.
//! The grid is dense enough to witness every satisfiable combination of
//! interval constraints and pairwise orderings: any solution can be slid
//! gap-by-gap onto grid points without changing how it compares to the
//! mentioned constants or to the other attributes (ties and strict chains
//! between attributes need at most one grid point per attribute next to
//! each boundary, which the offsets provide). Attributes compared with one
//! another share their constant pools so orderings relative to the other
//! side's constants stay witnessed.
//!
//! Activity variables are not determined by the event: each variable is
//! independently bound either to the candidate's activity or away from it
//! (possible whenever a second activity exists), mirroring how bindings
//! resolve variables at run time.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{atom_holds, EventAtom};
use crate::model::{AttributeType, Event, ProcessVocabulary, Value};

use super::CompileError;

/// Hard limit on candidate events examined per state.
pub(crate) const MAX_EVENT_CANDIDATES: u128 = 1 << 18;

/// All assignments over `atoms` (bit `i` = truth of `atoms[i]`) realized by
/// some event of the vocabulary under some variable binding.
pub(crate) fn realizable_masks(
    atoms: &[EventAtom],
    v: &ProcessVocabulary,
) -> Result<BTreeSet<u32>, CompileError> {
    let mut pools: BTreeMap<&str, BTreeSet<i64>> = BTreeMap::new();
    let mut linked: Vec<(&str, &str)> = Vec::new();
    let mut variables: Vec<&str> = Vec::new();
    for atom in atoms {
        match atom {
            EventAtom::AttrCmpConst(attr, _, Value::Int(c)) => {
                pools.entry(attr).or_default().insert(*c);
            }
            EventAtom::AttrCmpConst(..) => {} // symbolic constants: full enums cover them
            EventAtom::AttrCmpAttr(l, _, r) => {
                pools.entry(l).or_default();
                pools.entry(r).or_default();
                linked.push((l, r));
            }
            EventAtom::Variable(x) => variables.push(x),
            EventAtom::True | EventAtom::Activity(_) => {}
        }
    }
    variables.sort_unstable();
    variables.dedup();

    // Attributes compared with each other share one constant pool.
    loop {
        let mut changed = false;
        for (l, r) in &linked {
            let left = pools.get(l).cloned().unwrap_or_default();
            let right = pools.get(r).cloned().unwrap_or_default();
            if left != right {
                let merged: BTreeSet<i64> = left.union(&right).copied().collect();
                pools.insert(l, merged.clone());
                pools.insert(r, merged);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // A variable can be bound away from an activity only when another
    // activity exists to bind it to.
    let other_activity = |name: &str| {
        v.activities()
            .iter()
            .map(|sig| sig.name())
            .find(|&n| n != name)
    };

    let mut budget: u128 = 0;
    let mut masks: BTreeSet<u32> = BTreeSet::new();
    for sig in v.activities() {
        let span = sig
            .attributes()
            .iter()
            .filter(|(_, ty)| matches!(ty, AttributeType::IntRange { .. }))
            .count() as i64;
        let grids: Vec<Vec<Value>> = sig
            .attributes()
            .iter()
            .map(|(name, ty)| grid(ty, pools.get(name.as_str()), span))
            .collect();

        let away = other_activity(sig.name());
        let bindings_per_event: u128 = if away.is_some() { 2 } else { 1 };
        let candidates = grids
            .iter()
            .map(|g| g.len() as u128)
            .product::<u128>()
            * bindings_per_event.pow(variables.len() as u32);
        budget += candidates;
        if budget > MAX_EVENT_CANDIDATES {
            return Err(CompileError::CandidateUniverseTooLarge { candidates: budget });
        }

        let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
        let tuples: usize = sizes.iter().product();
        for index in 0..tuples {
            let mut rest = index;
            let values: Vec<Value> = sizes
                .iter()
                .zip(&grids)
                .map(|(&size, grid)| {
                    let value = grid[rest % size].clone();
                    rest /= size;
                    value
                })
                .collect();
            let event = Event::new(sig.name(), values);

            let combos = if away.is_some() { 1u32 << variables.len() } else { 1 };
            for combo in 0..combos {
                let binding: BTreeMap<String, String> = variables
                    .iter()
                    .enumerate()
                    .map(|(i, &var)| {
                        let target = match away {
                            Some(other) if combo >> i & 1 == 0 => other,
                            _ => sig.name(),
                        };
                        (var.to_string(), target.to_string())
                    })
                    .collect();

                let mut mask = 0u32;
                for (bit, atom) in atoms.iter().enumerate() {
                    let truth = atom_holds(v, &event, Some(&binding), atom)
                        .expect("every variable is bound here");
                    if truth {
                        mask |= 1 << bit;
                    }
                }
                masks.insert(mask);
            }
        }
    }
    Ok(masks)
}

/// Candidate values for one attribute.
fn grid(ty: &AttributeType, pool: Option<&BTreeSet<i64>>, span: i64) -> Vec<Value> {
    match ty {
        AttributeType::Enumeration(values) => {
            values.iter().map(|s| Value::Sym(s.clone())).collect()
        }
        AttributeType::IntRange { lo, hi } => {
            let mut points: BTreeSet<i64> = BTreeSet::new();
            let mut anchor = |a: i64| {
                for d in -span..=span {
                    let x = a.saturating_add(d);
                    if x >= *lo && x <= *hi {
                        points.insert(x);
                    }
                }
            };
            anchor(*lo);
            anchor(*hi);
            if let Some(pool) = pool {
                for &c in pool {
                    anchor(c);
                }
            }
            points.into_iter().map(Value::Int).collect()
        }
    }
}
