//! The XES subset: `<log>`, `<trace>`, `<event>`; `concept:name` strings
//! name traces and activities; `<int>`/`<string>` children carry the
//! payload. Every other element and payload type is skipped on read and
//! never written, so files produced here are plain but standard.

use std::io::BufRead;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event as Xml};
use quick_xml::{Reader, Writer};

use crate::model::{Log, ProcessVocabulary, Value};

use super::{
    check_writable, settle_trace, DecodeMode, LoadedLog, LogReadError, LogWriteError, RawEvent,
};

const CONCEPT_NAME: &str = "concept:name";

fn decode(location: String, message: impl Into<String>) -> LogReadError {
    LogReadError::Decode { location, message: message.into() }
}

/// Translate a quick-xml failure: I/O stays I/O, anything else becomes a
/// decode error pinned to the reader's byte offset.
fn xml_error<R>(xr: &Reader<R>, e: quick_xml::Error) -> LogReadError {
    match e {
        quick_xml::Error::Io(io) => {
            LogReadError::Io(std::io::Error::new(io.kind(), io.to_string()))
        }
        other => decode(format!("offset {}", xr.buffer_position()), other.to_string()),
    }
}

/// Decode an XES log. The reader is event-driven, so memory tracks the
/// decoded log, not the file.
pub fn read_xes_log<R: BufRead>(
    reader: R,
    v: &ProcessVocabulary,
    mode: DecodeMode,
) -> Result<LoadedLog, LogReadError> {
    let mut xr = Reader::from_reader(reader);
    xr.trim_text(true);
    let mut buf = Vec::new();
    let mut traces = Vec::new();
    let mut warnings = Vec::new();
    let mut trace_no = 0usize;
    let mut in_log = false;
    let mut seen_log = false;

    loop {
        buf.clear();
        match xr.read_event_into(&mut buf).map_err(|e| xml_error(&xr, e))? {
            Xml::Eof => break,
            Xml::Start(e) => match e.name().as_ref() {
                b"log" if !in_log => {
                    in_log = true;
                    seen_log = true;
                }
                b"trace" if in_log => {
                    trace_no += 1;
                    let (id, raw) = read_trace(&mut xr, trace_no)?;
                    let location = format!("trace {trace_no}");
                    if let Some(t) = settle_trace(v, id, raw, mode, &location, &mut warnings)? {
                        traces.push(t);
                    }
                }
                // Extensions, classifiers, globals, nested strangeness:
                // skip the whole subtree.
                _ => {
                    let mut sink = Vec::new();
                    xr.read_to_end_into(e.name(), &mut sink)
                        .map_err(|e| xml_error(&xr, e))?;
                }
            },
            Xml::Empty(e) => match e.name().as_ref() {
                b"log" if !in_log => seen_log = true,
                b"trace" if in_log => {
                    trace_no += 1;
                    let location = format!("trace {trace_no}");
                    if let Some(t) =
                        settle_trace(v, None, Vec::new(), mode, &location, &mut warnings)?
                    {
                        traces.push(t);
                    }
                }
                _ => {}
            },
            // The matching `</log>`; the reader checks tag pairing.
            Xml::End(_) => in_log = false,
            _ => {}
        }
    }
    if !seen_log {
        return Err(decode(
            "document".to_string(),
            "no <log> element found; is this an XES file?",
        ));
    }
    Ok(LoadedLog { log: Log::new(traces), warnings })
}

/// Everything between `<trace>` and `</trace>`.
fn read_trace<R: BufRead>(
    xr: &mut Reader<R>,
    trace_no: usize,
) -> Result<(Option<String>, Vec<RawEvent>), LogReadError> {
    let mut buf = Vec::new();
    let mut id: Option<String> = None;
    let mut raw: Vec<RawEvent> = Vec::new();
    loop {
        buf.clear();
        match xr.read_event_into(&mut buf).map_err(|e| xml_error(xr, e))? {
            Xml::Start(e) => match e.name().as_ref() {
                b"event" => {
                    raw.push(read_event(xr, trace_no, raw.len() + 1)?);
                }
                b"string" => {
                    let (key, value) = key_value(xr, &e, || format!("trace {trace_no}"))?;
                    if key == CONCEPT_NAME && id.is_none() {
                        id = Some(value);
                    }
                    let mut sink = Vec::new();
                    xr.read_to_end_into(e.name(), &mut sink)
                        .map_err(|e| xml_error(xr, e))?;
                }
                _ => {
                    let mut sink = Vec::new();
                    xr.read_to_end_into(e.name(), &mut sink)
                        .map_err(|e| xml_error(xr, e))?;
                }
            },
            Xml::Empty(e) => match e.name().as_ref() {
                b"event" => {
                    return Err(decode(
                        format!("trace {trace_no}, event {}", raw.len() + 1),
                        "event has no concept:name",
                    ));
                }
                b"string" => {
                    let (key, value) = key_value(xr, &e, || format!("trace {trace_no}"))?;
                    if key == CONCEPT_NAME && id.is_none() {
                        id = Some(value);
                    }
                }
                _ => {}
            },
            Xml::End(_) => return Ok((id, raw)),
            Xml::Eof => {
                return Err(decode(
                    format!("trace {trace_no}"),
                    "file ends inside a <trace> element",
                ))
            }
            _ => {}
        }
    }
}

/// Everything between `<event>` and `</event>`: the activity name and
/// the attribute pairs. Elements other than `<string>` and `<int>` are
/// skipped.
fn read_event<R: BufRead>(
    xr: &mut Reader<R>,
    trace_no: usize,
    event_no: usize,
) -> Result<RawEvent, LogReadError> {
    let mut buf = Vec::new();
    let mut activity: Option<String> = None;
    let mut pairs: Vec<(String, Value)> = Vec::new();
    let here = || format!("trace {trace_no}, event {event_no}");
    loop {
        buf.clear();
        match xr.read_event_into(&mut buf).map_err(|e| xml_error(xr, e))? {
            Xml::Start(e) => {
                absorb_payload(xr, &e, &mut activity, &mut pairs, &here)?;
                // The payload sits in the start tag; discard any children.
                let mut sink = Vec::new();
                xr.read_to_end_into(e.name(), &mut sink)
                    .map_err(|e| xml_error(xr, e))?;
            }
            Xml::Empty(e) => absorb_payload(xr, &e, &mut activity, &mut pairs, &here)?,
            Xml::End(_) => {
                return match activity {
                    Some(activity) => Ok(RawEvent { activity, pairs }),
                    None => Err(decode(here(), "event has no concept:name")),
                };
            }
            Xml::Eof => return Err(decode(here(), "file ends inside an <event> element")),
            _ => {}
        }
    }
}

/// Fold one `<string>` or `<int>` payload element into the event being
/// assembled; other elements are ignored.
fn absorb_payload<R>(
    xr: &Reader<R>,
    e: &BytesStart,
    activity: &mut Option<String>,
    pairs: &mut Vec<(String, Value)>,
    location: &impl Fn() -> String,
) -> Result<(), LogReadError> {
    match e.name().as_ref() {
        b"string" => {
            let (key, value) = key_value(xr, e, location)?;
            if key == CONCEPT_NAME {
                if activity.is_some() {
                    return Err(decode(location(), "event declares concept:name twice"));
                }
                *activity = Some(value);
            } else {
                pairs.push((key, Value::Sym(value)));
            }
        }
        b"int" => {
            let (key, value) = key_value(xr, e, location)?;
            let n: i64 = value.parse().map_err(|_| {
                decode(
                    location(),
                    format!("value `{value}` of <int key=\"{key}\"> is not an integer"),
                )
            })?;
            pairs.push((key, Value::Int(n)));
        }
        _ => {}
    }
    Ok(())
}

/// The `key` and `value` attributes every payload element carries.
fn key_value<R>(
    xr: &Reader<R>,
    e: &BytesStart,
    location: impl Fn() -> String,
) -> Result<(String, String), LogReadError> {
    let fetch = |attr: &str| -> Result<String, LogReadError> {
        match e.try_get_attribute(attr).map_err(|err| xml_error(xr, err))? {
            Some(a) => Ok(a
                .unescape_value()
                .map_err(|err| xml_error(xr, err))?
                .into_owned()),
            None => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                Err(decode(
                    location(),
                    format!("<{tag}> element is missing the `{attr}` attribute"),
                ))
            }
        }
    };
    Ok((fetch("key")?, fetch("value")?))
}

/// Render a log as XES. The log must validate against the vocabulary;
/// ids and values may be arbitrary strings since XML escapes them.
pub fn write_xes_log(log: &Log, v: &ProcessVocabulary) -> Result<String, LogWriteError> {
    check_writable(log, v)?;
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    let mut put = |ev: Xml| w.write_event(ev).expect("writing to memory cannot fail");

    put(Xml::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)));
    put(Xml::Start(BytesStart::new("log")));
    for trace in &log.traces {
        put(Xml::Start(BytesStart::new("trace")));
        if let Some(id) = &trace.id {
            put(Xml::Empty(payload("string", CONCEPT_NAME, id)));
        }
        for event in &trace.events {
            put(Xml::Start(BytesStart::new("event")));
            put(Xml::Empty(payload("string", CONCEPT_NAME, &event.activity)));
            let sig = v.signature(&event.activity).expect("validated activity");
            for ((attr, _), value) in sig.attributes().iter().zip(&event.values) {
                match value {
                    Value::Int(n) => put(Xml::Empty(payload("int", attr, &n.to_string()))),
                    Value::Sym(s) => put(Xml::Empty(payload("string", attr, s))),
                }
            }
            put(Xml::End(BytesEnd::new("event")));
        }
        put(Xml::End(BytesEnd::new("trace")));
    }
    put(Xml::End(BytesEnd::new("log")));

    let mut bytes = w.into_inner();
    bytes.push(b'\n');
    Ok(String::from_utf8(bytes).expect("the writer emits UTF-8"))
}

fn payload(tag: &'static str, key: &str, value: &str) -> BytesStart<'static> {
    let mut e = BytesStart::new(tag);
    e.push_attribute(("key", key));
    e.push_attribute(("value", value));
    e
}
