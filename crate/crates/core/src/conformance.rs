//! Conformance checking: which traces of a log satisfy which constraints.
//!
//! Constraints are compiled once into automata and every trace is run
//! through all of them, so checking a log of `m` traces against `k`
//! constraints costs `k` compilations plus `m·k` linear scans.

use std::fmt::Write as _;

use serde_json::json;
use thiserror::Error;

use crate::automata::{compile, Automaton, CompileError};
use crate::formula::FormulaError;
use crate::model::{validate_trace, Log, Trace, TraceViolation};
use crate::ProcessModel;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(
        "constraints mention activity variables ({names}); \
         bind them (or run query checking) before conformance checking",
        names = .variables.join(", ")
    )]
    HasVariables { variables: Vec<String> },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("trace {id} is not a valid trace over the vocabulary: {first}", first = .problems[0])]
    InvalidTrace {
        id: String,
        problems: Vec<TraceViolation>,
    },
}

/// Compiled constraints, ready to run traces through.
#[derive(Debug)]
pub struct Checker {
    model: ProcessModel,
    automata: Vec<Automaton>,
}

impl Checker {
    pub fn new(model: &ProcessModel) -> Result<Checker, CheckError> {
        let variables: Vec<String> = model.variables().into_iter().collect();
        if !variables.is_empty() {
            return Err(CheckError::HasVariables {
                variables: variables.into_iter().map(|x| format!("?{x}")).collect(),
            });
        }
        let automata = model
            .constraints
            .iter()
            .map(|f| compile(f, &model.vocabulary))
            .collect::<Result<_, _>>()?;
        Ok(Checker { model: model.clone(), automata })
    }

    pub fn model(&self) -> &ProcessModel {
        &self.model
    }

    /// One verdict per constraint, in model order. The trace must be valid
    /// over the vocabulary (right activities, arities and domains).
    pub fn check_trace(&self, trace: &Trace) -> Result<Vec<bool>, CheckError> {
        let problems = validate_trace(&self.model.vocabulary, trace);
        if !problems.is_empty() {
            return Err(CheckError::InvalidTrace {
                id: trace.id.clone().unwrap_or_else(|| "<unnamed>".into()),
                problems,
            });
        }
        self.automata
            .iter()
            .map(|a| {
                a.accepts(&self.model.vocabulary, trace, None)
                    .map_err(CheckError::from)
            })
            .collect()
    }
}

/// Per-trace verdicts for a whole log.
#[derive(Debug, Clone)]
pub struct TraceVerdict {
    pub trace_id: String,
    /// One entry per constraint, in model order.
    pub results: Vec<bool>,
}

impl TraceVerdict {
    pub fn conforms(&self) -> bool {
        self.results.iter().all(|&r| r)
    }
}

#[derive(Debug, Clone)]
pub struct ConformanceReport {
    pub constraints: Vec<String>,
    pub verdicts: Vec<TraceVerdict>,
}

impl ConformanceReport {
    pub fn conforming(&self) -> usize {
        self.verdicts.iter().filter(|v| v.conforms()).count()
    }

    pub fn all_conform(&self) -> bool {
        self.conforming() == self.verdicts.len()
    }

    /// One line per trace and constraint:
    /// `<trace-id> <constraint-index> satisfied|violated`.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            for (i, &ok) in v.results.iter().enumerate() {
                let verdict = if ok { "satisfied" } else { "violated" };
                let _ = writeln!(out, "{} {} {}", v.trace_id, i + 1, verdict);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "constraints": self.constraints,
            "traces": self.verdicts.iter().map(|v| json!({
                "id": v.trace_id,
                "results": v.results,
                "conforms": v.conforms(),
            })).collect::<Vec<_>>(),
            "conforming": self.conforming(),
            "total": self.verdicts.len(),
        })
    }
}

/// Check every trace of the log against every constraint of the model.
/// Unnamed traces are reported positionally as `#1`, `#2`, ….
pub fn check_log(model: &ProcessModel, log: &Log) -> Result<ConformanceReport, CheckError> {
    let checker = Checker::new(model)?;
    let mut verdicts = Vec::with_capacity(log.traces.len());
    for (i, trace) in log.traces.iter().enumerate() {
        let results = checker.check_trace(trace)?;
        verdicts.push(TraceVerdict {
            trace_id: trace.id.clone().unwrap_or_else(|| format!("#{}", i + 1)),
            results,
        });
    }
    Ok(ConformanceReport {
        constraints: model.constraints.iter().map(ToString::to_string).collect(),
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::model::{ActivitySignature, AttributeType, Event, ProcessVocabulary, Value};

    fn model() -> ProcessModel {
        let v = ProcessVocabulary::new(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 9).unwrap())],
            )
            .unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
        .unwrap();
        let constraints = vec![
            parse("G(a -> F b)", &v).unwrap(),
            parse("G(a -> n >= 5)", &v).unwrap(),
        ];
        ProcessModel::new(v, constraints).unwrap()
    }

    fn a(n: i64) -> Event {
        Event::new("a", vec![Value::Int(n)])
    }

    fn b() -> Event {
        Event::new("b", vec![])
    }

    #[test]
    fn reports_per_trace_and_per_constraint() {
        let m = model();
        let log = Log {
            traces: vec![
                Trace::with_id("t1", vec![a(7), b()]),
                Trace::with_id("t2", vec![a(3), b()]),
                Trace::with_id("t3", vec![a(7)]),
                Trace::new(vec![b()]),
            ],
        };
        let report = check_log(&m, &log).unwrap();
        assert_eq!(report.conforming(), 2);
        assert!(!report.all_conform());
        let flat: Vec<(String, Vec<bool>)> = report
            .verdicts
            .iter()
            .map(|v| (v.trace_id.clone(), v.results.clone()))
            .collect();
        assert_eq!(
            flat,
            vec![
                ("t1".to_string(), vec![true, true]),
                ("t2".to_string(), vec![true, false]),
                ("t3".to_string(), vec![false, true]),
                ("#4".to_string(), vec![true, true]),
            ]
        );
        let text = report.text();
        assert!(text.contains("t2 2 violated"));
        assert!(text.contains("t3 1 violated"));
        assert!(text.contains("#4 2 satisfied"));
        let js = report.to_json();
        assert_eq!(js["total"], 4);
        assert_eq!(js["conforming"], 2);
        assert_eq!(js["traces"][1]["conforms"], false);
    }

    #[test]
    fn rejects_models_with_unbound_variables() {
        let m = model();
        let with_var = ProcessModel::new(
            m.vocabulary.clone(),
            vec![parse("G(?A -> F b)", &m.vocabulary).unwrap()],
        )
        .unwrap();
        let err = Checker::new(&with_var).unwrap_err();
        assert!(err.to_string().contains("?A"));
    }

    #[test]
    fn rejects_traces_that_do_not_fit_the_vocabulary() {
        let m = model();
        let checker = Checker::new(&m).unwrap();
        let bad = Trace::with_id("bad", vec![Event::new("a", vec![])]);
        let err = checker.check_trace(&bad).unwrap_err();
        assert!(matches!(err, CheckError::InvalidTrace { .. }));
        let empty = Trace::with_id("empty", vec![]);
        assert!(checker.check_trace(&empty).is_err());
    }
}
