//! Query checking: solve for activity variables.
//!
//! Constraints may mention activity variables (`?A`). Query checking finds
//! every assignment of activities to variables under which the whole log
//! conforms. Each constraint compiles once with its variables symbolic;
//! candidate assignments are enumerated lexicographically (variables by
//! name, activities in declaration order) and run against the compiled
//! automata. Constraints without variables are binding-independent, so
//! their verdicts are computed once per trace and reused across the whole
//! enumeration.
//!
//! Constraints with no variables at all degenerate to conformance
//! checking: the result is the single empty assignment when the log
//! conforms and no assignment otherwise.

use std::collections::BTreeMap;

use serde_json::json;
use thiserror::Error;

use crate::automata::{compile, Automaton, CompileError};
use crate::formula::{variables_of, FormulaError};
use crate::model::{validate_trace, Log, TraceViolation};
use crate::ProcessModel;

/// A binding of variable names (without the `?` sigil) to activity names.
pub type Assignment = BTreeMap<String, String>;

/// Cap on the assignment space (`activities ^ variables`).
const MAX_ASSIGNMENTS: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("query checking over an empty log is ill-posed: every assignment would hold vacuously")]
    EmptyLog,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("trace {id} is not a valid trace over the vocabulary: {first}", first = .problems[0])]
    InvalidTrace {
        id: String,
        problems: Vec<TraceViolation>,
    },
    #[error("{total} candidate assignments exceed the supported maximum of {limit}")]
    TooManyAssignments { total: u128, limit: u128 },
}

#[derive(Debug, Clone)]
pub struct QueryResult {
    /// The constraints that were solved, rendered in concrete syntax.
    pub constraints: Vec<String>,
    /// Variable names in enumeration order (sorted).
    pub variables: Vec<String>,
    /// All satisfying assignments, in enumeration order.
    pub assignments: Vec<Assignment>,
    /// Number of traces every assignment was checked against.
    pub trace_count: usize,
}

impl QueryResult {
    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "constraints": self.constraints,
            "variables": self.variables,
            "assignments": self.assignments,
            "traces": self.trace_count,
        })
    }
}

/// Render an assignment as `?A1=a ?A2=b` (empty assignments render empty).
pub fn format_assignment(assignment: &Assignment) -> String {
    assignment
        .iter()
        .map(|(var, act)| format!("?{var}={act}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Find every assignment under which all traces satisfy all constraints.
pub fn query_check(model: &ProcessModel, log: &Log) -> Result<QueryResult, QueryError> {
    if log.traces.is_empty() {
        return Err(QueryError::EmptyLog);
    }
    for (i, trace) in log.traces.iter().enumerate() {
        let problems = validate_trace(&model.vocabulary, trace);
        if !problems.is_empty() {
            return Err(QueryError::InvalidTrace {
                id: trace.id.clone().unwrap_or_else(|| format!("#{}", i + 1)),
                problems,
            });
        }
    }

    let variables: Vec<String> = model.variables().into_iter().collect();
    let compiled: Vec<(Automaton, bool)> = model
        .constraints
        .iter()
        .map(|f| compile(f, &model.vocabulary).map(|a| (a, !variables_of(f).is_empty())))
        .collect::<Result<_, _>>()?;

    let mut result = QueryResult {
        constraints: model.constraints.iter().map(ToString::to_string).collect(),
        variables: variables.clone(),
        assignments: Vec::new(),
        trace_count: log.traces.len(),
    };

    // Binding-independent constraints decide the whole query up front.
    for (automaton, has_vars) in &compiled {
        if *has_vars {
            continue;
        }
        for trace in &log.traces {
            if !automaton.accepts(&model.vocabulary, trace, None)? {
                return Ok(result); // no assignment can repair a fixed violation
            }
        }
    }

    if variables.is_empty() {
        result.assignments.push(Assignment::new());
        return Ok(result);
    }

    let activities: Vec<&str> = model
        .vocabulary
        .activities()
        .iter()
        .map(|sig| sig.name())
        .collect();
    let total = (activities.len() as u128)
        .checked_pow(variables.len() as u32)
        .unwrap_or(u128::MAX);
    if total > MAX_ASSIGNMENTS {
        return Err(QueryError::TooManyAssignments { total, limit: MAX_ASSIGNMENTS });
    }

    let mut odometer = vec![0usize; variables.len()];
    'assignments: loop {
        let binding: Assignment = variables
            .iter()
            .zip(&odometer)
            .map(|(var, &i)| (var.clone(), activities[i].to_string()))
            .collect();

        let mut holds = true;
        'check: for (automaton, has_vars) in &compiled {
            if !*has_vars {
                continue;
            }
            for trace in &log.traces {
                if !automaton.accepts(&model.vocabulary, trace, Some(&binding))? {
                    holds = false;
                    break 'check;
                }
            }
        }
        if holds {
            result.assignments.push(binding);
        }

        // Advance: last variable fastest.
        let mut pos = variables.len();
        loop {
            if pos == 0 {
                break 'assignments;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < activities.len() {
                break;
            }
            odometer[pos] = 0;
        }
    }

    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, satisfies, substitute};
    use crate::model::{ActivitySignature, AttributeType, Event, ProcessVocabulary, Trace, Value};

    fn vocab() -> ProcessVocabulary {
        ProcessVocabulary::new(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 3).unwrap())],
            )
            .unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
        .unwrap()
    }

    fn ab_log() -> Log {
        Log {
            traces: vec![
                Trace::with_id("t1", vec![Event::new("a", vec![Value::Int(2)]), Event::new("b", vec![])]),
                Trace::with_id("t2", vec![Event::new("b", vec![])]),
            ],
        }
    }

    fn names(result: &QueryResult) -> Vec<String> {
        result.assignments.iter().map(format_assignment).collect()
    }

    #[test]
    fn finds_all_response_instantiations() {
        let v = vocab();
        let m = ProcessModel::new(v.clone(), vec![parse("G(?A1 -> F ?A2)", &v).unwrap()]).unwrap();
        let result = query_check(&m, &ab_log()).unwrap();
        assert_eq!(result.variables, vec!["A1", "A2"]);
        assert_eq!(
            names(&result),
            vec!["?A1=a ?A2=a", "?A1=a ?A2=b", "?A1=b ?A2=b"]
        );
        assert_eq!(result.trace_count, 2);
    }

    #[test]
    fn agrees_with_substitution_brute_force() {
        let v = vocab();
        let f = parse("F ?A && G(?A -> !X ?B)", &v).unwrap();
        let m = ProcessModel::new(v.clone(), vec![f.clone()]).unwrap();
        let log = ab_log();
        let result = query_check(&m, &log).unwrap();
        for x in ["a", "b"] {
            for y in ["a", "b"] {
                let binding = Assignment::from([
                    ("A".to_string(), x.to_string()),
                    ("B".to_string(), y.to_string()),
                ]);
                let grounded = substitute(&f, &binding).unwrap();
                let expected = log
                    .traces
                    .iter()
                    .all(|t| satisfies(&v, t, &grounded).unwrap());
                assert_eq!(
                    result.assignments.contains(&binding),
                    expected,
                    "binding {binding:?}"
                );
            }
        }
    }

    #[test]
    fn data_conditions_constrain_the_bindings() {
        let v = vocab();
        // Only `a` carries `n`, so binding ?A to `b` fails on any trace
        // containing a `b` event.
        let m = ProcessModel::new(v.clone(), vec![parse("G(?A -> n >= 1)", &v).unwrap()]).unwrap();
        let result = query_check(&m, &ab_log()).unwrap();
        assert_eq!(names(&result), vec!["?A=a"]);
    }

    #[test]
    fn variable_free_queries_degenerate_to_conformance() {
        let v = vocab();
        let conforming = ProcessModel::new(v.clone(), vec![parse("F b", &v).unwrap()]).unwrap();
        let result = query_check(&conforming, &ab_log()).unwrap();
        assert_eq!(result.assignments, vec![Assignment::new()]);

        let violated = ProcessModel::new(v.clone(), vec![parse("F(n >= 3)", &v).unwrap()]).unwrap();
        let result = query_check(&violated, &ab_log()).unwrap();
        assert!(result.is_empty());
    }

    #[test]
    fn fixed_violations_empty_the_answer_even_with_variables() {
        let v = vocab();
        let m = ProcessModel::new(
            v.clone(),
            vec![
                parse("F ?A", &v).unwrap(),
                parse("F(n >= 3)", &v).unwrap(), // no trace reaches 3
            ],
        )
        .unwrap();
        let result = query_check(&m, &ab_log()).unwrap();
        assert!(result.is_empty());
    }

    #[test]
    fn rejects_empty_logs() {
        let v = vocab();
        let m = ProcessModel::new(v.clone(), vec![parse("F ?A", &v).unwrap()]).unwrap();
        assert!(matches!(
            query_check(&m, &Log { traces: vec![] }),
            Err(QueryError::EmptyLog)
        ));
    }
}
