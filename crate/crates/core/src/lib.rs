//! Data-aware declarative process mining.
//!
//! Process models are sets of temporal constraints over finite traces whose
//! events carry typed attribute values. Constraints are written in a linear
//! temporal logic over finite traces extended with attribute comparisons,
//! compiled into finite-state automata whose transition guards are
//! conjunctions of event literals, and the automata drive three analyses:
//!
//! * **conformance checking** — which traces of a log satisfy which
//!   constraints ([`conformance`]),
//! * **log generation** — produce traces satisfying (or violating) the
//!   model, randomly or exhaustively ([`loggen`]), and
//! * **query checking** — given constraints with activity variables, find
//!   the variable bindings that make every trace of a log conform
//!   ([`querycheck`]).
//!
//! Each analysis can also be emitted as an answer-set program for an
//! external solver ([`asp`]). Models and logs are read and written through
//! [`io`].

use std::collections::BTreeSet;

pub mod asp;
pub mod automata;
pub mod conformance;
pub mod formula;
pub mod io;
pub mod loggen;
pub mod model;
pub mod querycheck;

use formula::{validate_formula, Formula, FormulaError};
use model::ProcessVocabulary;

/// A process model: an activity vocabulary plus the temporal constraints
/// every trace must satisfy.
#[derive(Debug, Clone)]
pub struct ProcessModel {
    pub vocabulary: ProcessVocabulary,
    pub constraints: Vec<Formula>,
}

impl ProcessModel {
    /// Bundle a vocabulary with constraints, validating each constraint
    /// against the vocabulary. Activity variables are allowed here; the
    /// analyses that cannot handle them reject them at their own door.
    pub fn new(
        vocabulary: ProcessVocabulary,
        constraints: Vec<Formula>,
    ) -> Result<ProcessModel, FormulaError> {
        for f in &constraints {
            validate_formula(f, &vocabulary)?;
        }
        Ok(ProcessModel { vocabulary, constraints })
    }

    /// All activity variables occurring in any constraint.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.constraints {
            out.extend(formula::variables_of(f));
        }
        out
    }

    pub fn has_variables(&self) -> bool {
        !self.variables().is_empty()
    }
}
