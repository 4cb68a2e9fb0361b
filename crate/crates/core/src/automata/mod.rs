//! Compilation of constraints into finite-state automata.
//!
//! A state is a residual obligation: what must still hold of the remaining
//! suffix of the trace. Compilation starts from the normalized constraint,
//! enumerates the realizable truth assignments over the source state's
//! atom universe (found by walking candidate events of the vocabulary, see
//! [`candidates`]), progresses the residual under each assignment, and
//! pools equal residuals into target states. Assignments no event can
//! realize become don't-cares for guard minimization, so the emitted
//! guards are small human-readable conjunctions rather than raw truth
//! tables. Negated comparison literals in minimized guards are expanded
//! into positive comparisons plus the activities on which the comparison
//! can never hold, keeping guards directly executable against events and
//! directly emittable as solver rules.
//!
//! The resulting automata are deterministic and total over events of the
//! vocabulary: every event matches exactly one outgoing transition group
//! of each state. Events outside the vocabulary match nothing and
//! [`Automaton::accepts`] rejects such traces.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{
    clean_disjuncts, cross, negate_atom_disjuncts, satisfiable_literals, simplify_conjunction,
    subsume_disjuncts, validate_formula, EventAtom, EventFormula, EventLiteral, Formula,
    FormulaError,
};
use crate::model::{Event, ProcessVocabulary, Trace};

mod candidates;
mod minimize;
mod progress;

use candidates::{realizable_masks, MAX_EVENT_CANDIDATES};
use minimize::{expand_cover, minimize, Implicant};
use progress::{accepts_empty, immediate_atoms, normalize, progress, Node};

/// Largest atom universe minimized with the tabular method; above this,
/// guards are covered greedily against the other targets' assignments.
/// Prime generation degrades sharply past this width once don't-cares are
/// plentiful, while the greedy cover stays linear in the realizable set.
const MAX_TABULAR_BITS: usize = 6;

/// Hard limit on simultaneous event atoms at one state.
const MAX_GUARD_ATOMS: usize = 20;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(
        "guard construction would need {atoms} simultaneous event atoms at one state; \
         the supported maximum is {MAX_GUARD_ATOMS}"
    )]
    GuardUniverseTooLarge { atoms: usize },
    #[error(
        "guard construction would need {candidates} candidate events at one state; \
         the supported maximum is {MAX_EVENT_CANDIDATES}"
    )]
    CandidateUniverseTooLarge { candidates: u128 },
}

/// All transitions from `source` to `target`, as alternative guards.
///
/// Groups of one source are mutually exclusive on events of the
/// vocabulary; guards within a group may overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGroup {
    pub source: usize,
    pub target: usize,
    pub guards: Vec<EventFormula>,
}

/// A deterministic automaton over events, total on the vocabulary it was
/// compiled against.
#[derive(Debug, Clone)]
pub struct Automaton {
    state_count: usize,
    initial: usize,
    accepting: BTreeSet<usize>,
    groups: Vec<TransitionGroup>,
    /// `groups` is sorted by source; state `s` owns `offsets[s]..offsets[s+1]`.
    offsets: Vec<usize>,
}

impl Automaton {
    fn assemble(
        state_count: usize,
        initial: usize,
        accepting: BTreeSet<usize>,
        groups: Vec<TransitionGroup>,
    ) -> Automaton {
        debug_assert!(groups.windows(2).all(|w| w[0].source <= w[1].source));
        let mut offsets = vec![0usize; state_count + 1];
        for g in &groups {
            offsets[g.source + 1] += 1;
        }
        for s in 0..state_count {
            offsets[s + 1] += offsets[s];
        }
        Automaton { state_count, initial, accepting, groups, offsets }
    }

    /// The one-state automaton accepting every trace.
    pub fn trivial() -> Automaton {
        Automaton::assemble(
            1,
            0,
            BTreeSet::from([0]),
            vec![TransitionGroup { source: 0, target: 0, guards: vec![EventFormula::top()] }],
        )
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.contains(&state)
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.accepting.iter().copied()
    }

    pub fn groups(&self) -> &[TransitionGroup] {
        &self.groups
    }

    pub fn groups_from(&self, state: usize) -> &[TransitionGroup] {
        &self.groups[self.offsets[state]..self.offsets[state + 1]]
    }

    /// Successor state on `event`, or `None` when the event lies outside
    /// the vocabulary the automaton was compiled against. `binding` maps
    /// activity variables to activity names and is only consulted when the
    /// guards mention variables.
    pub fn step(
        &self,
        v: &ProcessVocabulary,
        state: usize,
        event: &Event,
        binding: Option<&BTreeMap<String, String>>,
    ) -> Result<Option<usize>, FormulaError> {
        for group in self.groups_from(state) {
            for guard in &group.guards {
                if guard.holds(v, event, binding)? {
                    return Ok(Some(group.target));
                }
            }
        }
        Ok(None)
    }

    /// Run the whole trace from the initial state. The empty trace is
    /// accepted iff the initial state is accepting.
    pub fn accepts(
        &self,
        v: &ProcessVocabulary,
        trace: &Trace,
        binding: Option<&BTreeMap<String, String>>,
    ) -> Result<bool, FormulaError> {
        let mut state = self.initial;
        for event in &trace.events {
            match self.step(v, state, event, binding)? {
                Some(next) => state = next,
                None => return Ok(false),
            }
        }
        Ok(self.is_accepting(state))
    }
}

/// Compile a constraint into an automaton over the vocabulary.
///
/// Activity variables may occur; they stay symbolic in the guards and are
/// resolved by the binding passed to [`Automaton::step`].
pub fn compile(f: &Formula, v: &ProcessVocabulary) -> Result<Automaton, CompileError> {
    validate_formula(f, v)?;
    let root = normalize(f);
    let mut ids: HashMap<Node, usize> = HashMap::new();
    ids.insert(root.clone(), 0);
    let mut nodes: Vec<Node> = vec![root];
    let mut groups: Vec<TransitionGroup> = Vec::new();

    let mut state = 0;
    while state < nodes.len() {
        let node = nodes[state].clone();
        let mut atom_set = BTreeSet::new();
        immediate_atoms(&node, &mut atom_set);
        let atoms: Vec<EventAtom> = atom_set.into_iter().collect();
        if atoms.len() > MAX_GUARD_ATOMS {
            return Err(CompileError::GuardUniverseTooLarge { atoms: atoms.len() });
        }

        let realizable = realizable_masks(&atoms, v)?;
        let mut by_target: Vec<(usize, Vec<u32>)> = Vec::new();
        for &mask in &realizable {
            let residual = progress(&node, &|atom: &EventAtom| {
                let bit = atoms.iter().position(|a| a == atom).unwrap();
                mask >> bit & 1 == 1
            });
            let target = *ids.entry(residual.clone()).or_insert_with(|| {
                nodes.push(residual);
                nodes.len() - 1
            });
            match by_target.iter_mut().find(|(t, _)| *t == target) {
                Some((_, on)) => on.push(mask),
                None => by_target.push((target, vec![mask])),
            }
        }

        for (target, on) in by_target {
            let guards = group_guards(&atoms, &on, &realizable, v);
            groups.push(TransitionGroup { source: state, target, guards });
        }
        state += 1;
    }

    let accepting = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| accepts_empty(n))
        .map(|(i, _)| i)
        .collect();
    Ok(Automaton::assemble(nodes.len(), 0, accepting, groups))
}

fn group_guards(
    atoms: &[EventAtom],
    on: &[u32],
    realizable: &BTreeSet<u32>,
    v: &ProcessVocabulary,
) -> Vec<EventFormula> {
    let implicants: Vec<Implicant> = if atoms.len() <= MAX_TABULAR_BITS {
        let dont_care: Vec<u32> =
            (0..1u32 << atoms.len()).filter(|m| !realizable.contains(m)).collect();
        minimize(atoms.len() as u32, on, &dont_care)
    } else {
        // Guards only need to separate this target from the other targets
        // on assignments an event can actually realize; everything
        // unrealizable is a free don't-care for the greedy cover.
        let off: Vec<u32> =
            realizable.iter().copied().filter(|m| !on.contains(m)).collect();
        expand_cover(atoms.len() as u32, on, &off)
    };
    let mut disjuncts: Vec<Vec<EventLiteral>> = Vec::new();
    for imp in implicants {
        disjuncts.extend(implicant_disjuncts(atoms, imp, v));
    }
    clean_disjuncts(disjuncts, v)
}

/// Literal conjunction(s) for one implicant. Negated comparison atoms are
/// replaced by their positive expansion (flipped comparison or an activity
/// that cannot satisfy the comparison), so emitted guards never negate a
/// comparison.
fn implicant_disjuncts(
    atoms: &[EventAtom],
    imp: Implicant,
    v: &ProcessVocabulary,
) -> Vec<Vec<EventLiteral>> {
    let mut disjuncts: Vec<Vec<EventLiteral>> = vec![Vec::new()];
    for (bit, atom) in atoms.iter().enumerate() {
        if imp.care >> bit & 1 == 0 {
            continue;
        }
        if imp.value >> bit & 1 == 1 {
            for d in &mut disjuncts {
                d.push(EventLiteral::positive(atom.clone()));
            }
        } else {
            match atom {
                EventAtom::AttrCmpAttr(..) | EventAtom::AttrCmpConst(..) => {
                    disjuncts = cross(disjuncts, negate_atom_disjuncts(atom, v));
                }
                _ => {
                    for d in &mut disjuncts {
                        d.push(EventLiteral::negative(atom.clone()));
                    }
                }
            }
        }
    }
    disjuncts
}

/// Synchronous product: accepts exactly the traces accepted by both.
pub fn product(a: &Automaton, b: &Automaton, v: &ProcessVocabulary) -> Automaton {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = vec![(a.initial, b.initial)];
    ids.insert(pairs[0], 0);
    let mut groups: Vec<TransitionGroup> = Vec::new();

    let mut state = 0;
    while state < pairs.len() {
        let (pa, pb) = pairs[state];
        let mut by_target: Vec<((usize, usize), Vec<EventFormula>)> = Vec::new();
        for ga in a.groups_from(pa) {
            for gb in b.groups_from(pb) {
                let mut merged: Vec<EventFormula> = Vec::new();
                for x in &ga.guards {
                    for y in &gb.guards {
                        let joint = x.merge(y);
                        if satisfiable_literals(joint.literals(), v) {
                            merged.push(EventFormula::new(simplify_conjunction(
                                joint.literals().to_vec(),
                                v,
                            )));
                        }
                    }
                }
                if merged.is_empty() {
                    continue;
                }
                let key = (ga.target, gb.target);
                match by_target.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, gs)) => gs.extend(merged),
                    None => by_target.push((key, merged)),
                }
            }
        }
        for (key, mut guards) in by_target {
            let target = match ids.get(&key) {
                Some(&t) => t,
                None => {
                    pairs.push(key);
                    ids.insert(key, pairs.len() - 1);
                    pairs.len() - 1
                }
            };
            guards.sort();
            guards.dedup();
            let guards = subsume_disjuncts(guards, v);
            groups.push(TransitionGroup { source: state, target, guards });
        }
        state += 1;
    }

    let accepting = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(x, y))| a.is_accepting(x) && b.is_accepting(y))
        .map(|(i, _)| i)
        .collect();
    Automaton::assemble(pairs.len(), 0, accepting, groups)
}

/// Product of any number of automata; the empty product is [`Automaton::trivial`].
pub fn product_all<'a, I>(items: I, v: &ProcessVocabulary) -> Automaton
where
    I: IntoIterator<Item = &'a Automaton>,
{
    items
        .into_iter()
        .fold(Automaton::trivial(), |acc, item| product(&acc, item, v))
}
