//! File formats: model files, line-oriented text logs, and an XES subset.
//!
//! # Model files
//!
//! A model file declares a vocabulary and a list of constraints:
//!
//! ```text
//! # Activities first; attributes are int ranges or enumerations.
//! activity a { n: int 0..9, status: enum { low, mid, high } }
//! activity b {}
//!
//! constraint G((a && n < 5) -> F b)
//! ```
//!
//! Declarations and constraints may be interleaved; constraints may
//! reference activities declared later in the file. `#` starts a comment.
//! See [`parse_model`] and [`write_model`].
//!
//! # Text logs
//!
//! One trace per line: the keyword `trace`, an optional identifier, `:`,
//! then the events. An event is an activity name, followed by its
//! attribute values in parentheses when it has any:
//!
//! ```text
//! trace t1: a(n=3, status=high) b
//! trace: b b          # anonymous trace
//! ```
//!
//! # XES logs
//!
//! The reader and writer speak a subset of XES: `<log>`, `<trace>` and
//! `<event>` elements; `<string key="concept:name" value=.../>` names the
//! trace or the event's activity; `<int>` and `<string>` children carry
//! the attribute payload. Anything else (other payload types, extension
//! and classifier declarations, foreign attributes) is ignored on read
//! and never written.
//!
//! # Strict and lenient decoding
//!
//! Log readers take a [`DecodeMode`]. [`DecodeMode::Strict`] (the
//! default) turns the first vocabulary violation into an error. Under
//! [`DecodeMode::Lenient`] out-of-range integers are clamped to the
//! nearest bound, undeclared and duplicated attributes are dropped, and
//! traces that cannot be repaired (unknown activity, missing or
//! mistyped value, no events) are skipped; every repair is recorded as
//! a warning on the returned [`LoadedLog`]. Structurally malformed
//! input — unparseable lines or XML, events without an activity name —
//! is an error in both modes.

mod model_file;
mod textlog;
mod xes;

use std::fs;
use std::io::BufReader;
use std::path::Path;

use thiserror::Error;

use crate::model::{
    AttributeType, Event, Log, ProcessVocabulary, Trace, TraceViolation, Value,
};
use crate::ProcessModel;

pub use model_file::{parse_model, write_model, ModelFileError};
pub use textlog::{read_text_log, write_text_log};
pub use xes::{read_xes_log, write_xes_log};

/// On-disk encodings for logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    /// Line-oriented `trace id: a(n=3) b` records.
    Text,
    /// The XES XML subset.
    Xes,
}

impl LogFormat {
    /// Infer the format from a file name: `.xes` (any case) means
    /// [`LogFormat::Xes`], everything else is the text format.
    pub fn from_path(path: &Path) -> LogFormat {
        match path.extension() {
            Some(ext) if ext.eq_ignore_ascii_case("xes") => LogFormat::Xes,
            _ => LogFormat::Text,
        }
    }
}

/// How log readers treat records that clash with the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    /// Any violation is an error.
    #[default]
    Strict,
    /// Clamp or drop what can be repaired, skip what cannot, and record
    /// a warning for each repair.
    Lenient,
}

/// A decoded log plus one warning per repair made while decoding it.
/// Strict decoding never produces warnings.
#[derive(Debug, Clone)]
pub struct LoadedLog {
    pub log: Log,
    pub warnings: Vec<String>,
}

/// A log that could not be read.
#[derive(Debug, Error)]
pub enum LogReadError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    /// A record that could not be decoded. `location` pins the record:
    /// `line N` in text logs, `trace N[, event M]` in XES files.
    #[error("{location}: {message}")]
    Decode { location: String, message: String },
}

/// A log that a writer refused to serialize.
#[derive(Debug, Error)]
pub enum LogWriteError {
    /// Writers only serialize logs that validate against the vocabulary.
    #[error("trace {id}: {first}", first = .problems[0])]
    InvalidTrace {
        id: String,
        problems: Vec<TraceViolation>,
    },
    /// The text format spells ids and values as bare identifiers and has
    /// no quoting; XES carries arbitrary strings.
    #[error("trace {id}: `{text}` is not an identifier; the text format cannot hold it (use XES)")]
    Unrepresentable { id: String, text: String },
}

/// What went wrong underneath a [`FileError`].
#[derive(Debug, Error)]
pub enum FileErrorKind {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error(transparent)]
    LogRead(#[from] LogReadError),
    #[error(transparent)]
    LogWrite(#[from] LogWriteError),
}

/// An operation on a named file that failed.
#[derive(Debug, Error)]
#[error("{path}: {kind}")]
pub struct FileError {
    pub path: String,
    pub kind: FileErrorKind,
}

impl FileError {
    fn new(path: &Path, kind: impl Into<FileErrorKind>) -> Self {
        FileError {
            path: path.display().to_string(),
            kind: kind.into(),
        }
    }
}

/// Read and parse a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<ProcessModel, FileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| FileError::new(path, e))?;
    parse_model(&text).map_err(|e| FileError::new(path, e))
}

/// Serialize a model to a file in the model-file syntax.
pub fn save_model(model: &ProcessModel, path: impl AsRef<Path>) -> Result<(), FileError> {
    let path = path.as_ref();
    fs::write(path, write_model(model)).map_err(|e| FileError::new(path, e))
}

/// Read a log file, inferring the format from the extension unless one
/// is given.
pub fn load_log(
    path: impl AsRef<Path>,
    v: &ProcessVocabulary,
    format: Option<LogFormat>,
    mode: DecodeMode,
) -> Result<LoadedLog, FileError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| FileError::new(path, e))?;
    let reader = BufReader::new(file);
    let result = match format.unwrap_or_else(|| LogFormat::from_path(path)) {
        LogFormat::Text => read_text_log(reader, v, mode),
        LogFormat::Xes => read_xes_log(reader, v, mode),
    };
    result.map_err(|e| FileError::new(path, e))
}

/// Write a log file, inferring the format from the extension unless one
/// is given. The log must validate against the vocabulary.
pub fn save_log(
    log: &Log,
    v: &ProcessVocabulary,
    path: impl AsRef<Path>,
    format: Option<LogFormat>,
) -> Result<(), FileError> {
    let path = path.as_ref();
    let text = match format.unwrap_or_else(|| LogFormat::from_path(path)) {
        LogFormat::Text => write_text_log(log, v),
        LogFormat::Xes => write_xes_log(log, v),
    }
    .map_err(|e| FileError::new(path, e))?;
    fs::write(path, text).map_err(|e| FileError::new(path, e))
}

/// An event as it sits in a file, before the vocabulary has vetted it.
pub(crate) struct RawEvent {
    pub activity: String,
    pub pairs: Vec<(String, Value)>,
}

/// How warnings and errors refer to a record.
fn record_label(id: &Option<String>) -> String {
    match id {
        Some(id) => format!("trace `{id}`"),
        None => "anonymous trace".to_string(),
    }
}

/// Trace-id fallback used in writer errors, mirroring the checker's
/// convention: the trace's own id, or `#N` by position.
pub(crate) fn trace_label(index: usize, trace: &Trace) -> String {
    trace
        .id
        .clone()
        .unwrap_or_else(|| format!("#{}", index + 1))
}

/// Writers demand logs that validate; this maps the first violation of
/// each trace into the writer error.
pub(crate) fn check_writable(log: &Log, v: &ProcessVocabulary) -> Result<(), LogWriteError> {
    for (i, trace) in log.traces.iter().enumerate() {
        let problems = crate::model::validate_trace(v, trace);
        if !problems.is_empty() {
            return Err(LogWriteError::InvalidTrace {
                id: trace_label(i, trace),
                problems,
            });
        }
    }
    Ok(())
}

/// Vet one decoded record against the vocabulary. Strict mode reports
/// the first problem as an error. Lenient mode clamps out-of-range
/// integers, drops undeclared or duplicated attribute pairs, and skips
/// the whole trace when no repair exists, pushing a warning for every
/// deviation. Returns `None` for a skipped trace.
pub(crate) fn settle_trace(
    v: &ProcessVocabulary,
    id: Option<String>,
    raw: Vec<RawEvent>,
    mode: DecodeMode,
    location: &str,
    warnings: &mut Vec<String>,
) -> Result<Option<Trace>, LogReadError> {
    let label = record_label(&id);
    let strict = mode == DecodeMode::Strict;

    // Strict: error out. Lenient: warn and signal that the trace is
    // dropped.
    macro_rules! unrepairable {
        ($($arg:tt)*) => {{
            let message = format!($($arg)*);
            if strict {
                return Err(LogReadError::Decode {
                    location: location.to_string(),
                    message: format!("{label}: {message}"),
                });
            }
            warnings.push(format!("{location}: dropping {label}: {message}"));
            return Ok(None);
        }};
    }

    if raw.is_empty() {
        unrepairable!("record holds no events");
    }

    let mut events = Vec::with_capacity(raw.len());
    for (ix, ev) in raw.into_iter().enumerate() {
        let at = format!("event {} (`{}`)", ix + 1, ev.activity);
        let sig = match v.signature(&ev.activity) {
            Some(sig) => sig,
            None => unrepairable!("activity `{}` is not declared", ev.activity),
        };
        let mut slots: Vec<Option<Value>> = vec![None; sig.arity()];
        for (attr, value) in ev.pairs {
            let slot = match sig.attribute_index(&attr) {
                Some(slot) => slot,
                None => {
                    if strict {
                        unrepairable!("{at}: attribute `{attr}` is not declared for this activity");
                    }
                    warnings.push(format!(
                        "{location}: {label}, {at}: ignoring undeclared attribute `{attr}`"
                    ));
                    continue;
                }
            };
            if slots[slot].is_some() {
                if strict {
                    unrepairable!("{at}: attribute `{attr}` appears twice");
                }
                warnings.push(format!(
                    "{location}: {label}, {at}: attribute `{attr}` appears twice; keeping the first value"
                ));
                continue;
            }
            let ty = &sig.attributes()[slot].1;
            if ty.contains(&value) {
                slots[slot] = Some(value);
            } else if let (AttributeType::IntRange { lo, hi }, Value::Int(n)) = (ty, &value) {
                if strict {
                    unrepairable!("{at}: value {n} for attribute `{attr}` is outside {lo}..{hi}");
                }
                let clamped = (*n).clamp(*lo, *hi);
                warnings.push(format!(
                    "{location}: {label}, {at}: clamped `{attr}` from {n} to {clamped}"
                ));
                slots[slot] = Some(Value::Int(clamped));
            } else {
                unrepairable!("{at}: value {value} is not in the domain of attribute `{attr}`");
            }
        }
        if let Some(missing) = slots.iter().position(Option::is_none) {
            let attr = &sig.attributes()[missing].0;
            unrepairable!("{at}: no value for attribute `{attr}`");
        }
        let values = slots.into_iter().map(|s| s.expect("all slots filled")).collect();
        events.push(Event::new(ev.activity, values));
    }

    Ok(Some(Trace { id, events }))
}
