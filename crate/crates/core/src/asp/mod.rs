//! Emission of the analyses as answer-set programs.
//!
//! Every constraint automaton becomes a block of `init`/`acc`/`trans`
//! facts and `hold` rules; a fixed set of run rules simulates the automata
//! over `trace`/`has_val` atoms; and each analysis adds its own facts and
//! choice rules on top:
//!
//! * **generation** guesses a trace (and its attribute values) and the
//!   acceptance constraint prunes non-conforming guesses, so the answer
//!   sets are exactly the satisfying traces;
//! * **conformance** grounds the log as facts, one thread per trace, and
//!   is satisfiable iff every trace conforms;
//! * **query checking** additionally guesses an activity per variable, so
//!   the answer sets are exactly the satisfying assignments.
//!
//! Transition guards are numbered per automaton starting at 1, each guard
//! emitting one `trans` fact plus its `hold` rule(s). A state with exactly
//! two outgoing groups, of which one is a self-loop and the other carries
//! a single all-positive guard, emits the self-loop as the complement of
//! that guard: negation-as-failure on the guard's `hold` atom at the
//! initial state, and an activity inequality elsewhere when the guard is a
//! single activity.

mod emit;
pub mod solver;
mod validate;

pub use emit::{
    emit_automaton, emit_conformance_problem, emit_generation_problem, emit_query_problem,
    emit_run_rules, emit_vocabulary, EmitError,
};
pub use validate::{check_syntax, SyntaxIssue};
