//! The line-oriented text log format.
//!
//! One record per line: the keyword `trace`, an optional identifier, a
//! colon, then events left to right. Each event is an activity name,
//! followed by `(attr=value, ...)` when the activity carries attributes.
//! Values are integers or bare symbolic constants. Blank lines and `#`
//! comments are skipped; a `#` after the events comments out the rest of
//! the line.
//!
//! ```text
//! trace t1: a(n=3, status=high) b
//! trace: b b
//! ```

use std::io::BufRead;

use crate::formula::is_identifier;
use crate::model::{Log, ProcessVocabulary, Value};

use super::{
    check_writable, settle_trace, trace_label, DecodeMode, LoadedLog, LogReadError,
    LogWriteError, RawEvent,
};

/// Decode a text log. Lines are processed one at a time, so memory
/// tracks the decoded log, not the file.
pub fn read_text_log<R: BufRead>(
    reader: R,
    v: &ProcessVocabulary,
    mode: DecodeMode,
) -> Result<LoadedLog, LogReadError> {
    let mut traces = Vec::new();
    let mut warnings = Vec::new();
    for (ix, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let location = format!("line {}", ix + 1);
        let (id, raw) = parse_record(text, &location)?;
        if let Some(trace) = settle_trace(v, id, raw, mode, &location, &mut warnings)? {
            traces.push(trace);
        }
    }
    Ok(LoadedLog { log: Log::new(traces), warnings })
}

/// Render a log in the text format. The log must validate against the
/// vocabulary, and every id and symbolic value must be a bare
/// identifier — the format has no quoting.
pub fn write_text_log(log: &Log, v: &ProcessVocabulary) -> Result<String, LogWriteError> {
    check_writable(log, v)?;
    let mut out = String::new();
    for (ix, trace) in log.traces.iter().enumerate() {
        match &trace.id {
            Some(id) if !is_identifier(id) => {
                return Err(LogWriteError::Unrepresentable {
                    id: trace_label(ix, trace),
                    text: id.clone(),
                });
            }
            Some(id) => {
                out.push_str("trace ");
                out.push_str(id);
                out.push(':');
            }
            None => out.push_str("trace:"),
        }
        for event in &trace.events {
            out.push(' ');
            out.push_str(&event.activity);
            // The log validated, so the signature exists and arities match.
            let sig = v.signature(&event.activity).expect("validated activity");
            if sig.arity() == 0 {
                continue;
            }
            out.push('(');
            for (i, ((name, _), value)) in sig.attributes().iter().zip(&event.values).enumerate() {
                if let Value::Sym(s) = value {
                    if !is_identifier(s) {
                        return Err(LogWriteError::Unrepresentable {
                            id: trace_label(ix, trace),
                            text: s.clone(),
                        });
                    }
                }
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{name}={value}"));
            }
            out.push(')');
        }
        out.push('\n');
    }
    Ok(out)
}

/// One record line, already trimmed and known not to be a comment.
fn parse_record(text: &str, location: &str) -> Result<(Option<String>, Vec<RawEvent>), LogReadError> {
    let mut scan = Scan { text, pos: 0, location };
    match scan.ident() {
        Some("trace") => {}
        _ => return Err(scan.err("every record starts with the keyword `trace`")),
    }
    scan.skip_ws();
    let id = scan.ident().map(str::to_string);
    scan.skip_ws();
    if !scan.eat(':') {
        return Err(scan.err(match id {
            Some(_) => "expected `:` after the trace id",
            None => "expected a trace id or `:` after `trace`",
        }));
    }

    let mut events = Vec::new();
    loop {
        scan.skip_ws();
        match scan.peek() {
            None => break,
            Some('#') => break, // trailing comment
            Some(_) => {}
        }
        let activity = match scan.ident() {
            Some(name) => name.to_string(),
            None => return Err(scan.err("expected an activity name")),
        };
        let mut pairs = Vec::new();
        scan.skip_ws();
        if scan.eat('(') {
            loop {
                scan.skip_ws();
                if scan.eat(')') {
                    break;
                }
                let attr = match scan.ident() {
                    Some(name) => name.to_string(),
                    None => return Err(scan.err("expected an attribute name")),
                };
                scan.skip_ws();
                if !scan.eat('=') {
                    return Err(scan.err("expected `=` after the attribute name"));
                }
                scan.skip_ws();
                let value = scan.value()?;
                pairs.push((attr, value));
                scan.skip_ws();
                match scan.peek() {
                    Some(',') => {
                        scan.eat(',');
                    }
                    Some(')') => {}
                    _ => return Err(scan.err("expected `,` or `)` after a value")),
                }
            }
        }
        events.push(RawEvent { activity, pairs });
    }
    Ok((id, events))
}

/// A character cursor over one record line.
struct Scan<'a> {
    text: &'a str,
    pos: usize,
    location: &'a str,
}

impl<'a> Scan<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Consume `[A-Za-z_][A-Za-z0-9_]*` if one starts here.
    fn ident(&mut self) -> Option<&'a str> {
        let rest = &self.text[self.pos..];
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    /// An attribute value: an integer (optionally negative) or a bare
    /// symbolic constant.
    fn value(&mut self) -> Result<Value, LogReadError> {
        let rest = &self.text[self.pos..];
        let digits = |s: &str| s.chars().take_while(char::is_ascii_digit).count();
        let int_len = match rest.strip_prefix('-') {
            Some(tail) => match digits(tail) {
                0 => 0,
                n => n + 1,
            },
            None => digits(rest),
        };
        if int_len > 0 {
            let text = &rest[..int_len];
            let n: i64 = text
                .parse()
                .map_err(|_| self.err(&format!("integer `{text}` is out of range")))?;
            self.pos += int_len;
            return Ok(Value::Int(n));
        }
        match self.ident() {
            Some(sym) => Ok(Value::Sym(sym.to_string())),
            None => Err(self.err("expected an integer or a symbolic constant")),
        }
    }

    fn err(&self, message: &str) -> LogReadError {
        LogReadError::Decode {
            location: self.location.to_string(),
            message: message.to_string(),
        }
    }
}
