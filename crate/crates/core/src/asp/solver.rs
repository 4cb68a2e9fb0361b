//! Optional bridge to an external grounder/solver.
//!
//! Nothing in this crate needs an external solver: generation, conformance
//! and query checking all run natively. The bridge exists to cross-check
//! emitted programs against an independent implementation. It is activated
//! by naming the solver executable (clingo-compatible output expected) in
//! the `DAPM_ASP_SOLVER` environment variable; when the variable is unset
//! the bridge reports that cleanly so callers can skip.

use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Environment variable naming the solver executable (optionally followed
/// by extra arguments, whitespace-separated).
pub const SOLVER_ENV: &str = "DAPM_ASP_SOLVER";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("could not write the program to a temporary file: {0}")]
    TempFile(std::io::Error),
    #[error("failed to run `{command}`: {message}")]
    Launch { command: String, message: String },
    #[error("solver output contains no SATISFIABLE/UNSATISFIABLE verdict")]
    NoVerdict,
}

/// Result of one solver invocation asking for all answer sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub satisfiable: bool,
    /// One entry per reported answer set: the atoms shown, as printed.
    pub answers: Vec<Vec<String>>,
}

/// Run the solver named by [`SOLVER_ENV`] on the program, enumerating all
/// answer sets. Returns `Ok(None)` when the variable is unset or empty.
pub fn solve_with_configured(program: &str) -> Result<Option<SolveOutcome>, SolverError> {
    match std::env::var(SOLVER_ENV) {
        Ok(command) if !command.trim().is_empty() => run_solver(&command, program).map(Some),
        _ => Ok(None),
    }
}

/// Run `command <file> 0` on the program text, where `command` may carry
/// extra arguments, and parse the answer sets from standard output.
pub fn run_solver(command: &str, program: &str) -> Result<SolveOutcome, SolverError> {
    static NEXT: AtomicU64 = AtomicU64::new(0);
    let path = std::env::temp_dir().join(format!(
        "dapm-{}-{}.lp",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&path, program).map_err(SolverError::TempFile)?;

    let mut words = command.split_whitespace();
    let exe = words.next().expect("command is non-empty");
    let output = Command::new(exe)
        .args(words)
        .arg(&path)
        .arg("0")
        .output();
    let _ = std::fs::remove_file(&path);
    // Solvers signal satisfiability through the exit status, so a "failed"
    // status is expected; only failure to launch is an error here.
    let output = output.map_err(|e| SolverError::Launch {
        command: command.to_string(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8_lossy(&output.stdout);
    parse_solver_output(&text).ok_or(SolverError::NoVerdict)
}

/// Parse clingo-style output: each `Answer: n` line is followed by one
/// line of space-separated atoms, and the verdict line is a bare
/// `SATISFIABLE` or `UNSATISFIABLE`.
pub fn parse_solver_output(text: &str) -> Option<SolveOutcome> {
    let mut answers = Vec::new();
    let mut satisfiable = None;
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let trimmed = line.trim();
        if trimmed.starts_with("Answer:") {
            let atoms = lines.next().unwrap_or("");
            answers.push(atoms.split_whitespace().map(str::to_string).collect());
        } else if trimmed == "SATISFIABLE" {
            satisfiable = Some(true);
        } else if trimmed == "UNSATISFIABLE" {
            satisfiable = Some(false);
        }
    }
    satisfiable.map(|satisfiable| SolveOutcome { satisfiable, answers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_clingo_style_transcript() {
        let text = "clingo version 5.6.2\n\
                    Reading from problem.lp\n\
                    Solving...\n\
                    Answer: 1\n\
                    trace(a,0) trace(b,1)\n\
                    Answer: 2\n\
                    trace(b,0) trace(b,1)\n\
                    SATISFIABLE\n\
                    \n\
                    Models       : 2\n";
        let outcome = parse_solver_output(text).unwrap();
        assert!(outcome.satisfiable);
        assert_eq!(
            outcome.answers,
            vec![
                vec!["trace(a,0)".to_string(), "trace(b,1)".to_string()],
                vec!["trace(b,0)".to_string(), "trace(b,1)".to_string()],
            ]
        );
    }

    #[test]
    fn parses_unsat_and_empty_answer_sets() {
        let unsat = parse_solver_output("Solving...\nUNSATISFIABLE\n").unwrap();
        assert!(!unsat.satisfiable);
        assert!(unsat.answers.is_empty());
        let empty = parse_solver_output("Answer: 1\n\nSATISFIABLE\n").unwrap();
        assert_eq!(empty.answers, vec![Vec::<String>::new()]);
        assert_eq!(parse_solver_output("no verdict here"), None);
    }

    #[test]
    fn skips_cleanly_without_the_environment_variable() {
        // The test harness never sets the variable; a set-but-empty value
        // must also skip.
        if std::env::var(SOLVER_ENV).is_err() {
            assert!(solve_with_configured("act(a).").unwrap().is_none());
        }
    }
}
