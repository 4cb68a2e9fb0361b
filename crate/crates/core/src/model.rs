//! Process vocabularies, events, traces and logs.
//!
//! A [`ProcessVocabulary`] fixes the universe of discourse for everything
//! else in this crate: which activities exist, which attributes each
//! activity carries, and which values those attributes may take. Events are
//! stored positionally — the i-th value of an event belongs to the i-th
//! attribute of the activity's signature — so most consumers need the
//! vocabulary at hand to interpret an event.
//!
//! Validation is deliberately split off from construction: [`Trace`] and
//! [`Event`] are plain data that may well be malformed (they frequently come
//! from dirty logs), and [`validate_event`] / [`validate_trace`] *describe*
//! problems instead of aborting on the first one.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// An attribute value: either an integer or a symbolic constant drawn from
/// an enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// The domain of one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttributeType {
    /// A bounded integer interval, both endpoints inclusive.
    IntRange { lo: i64, hi: i64 },
    /// A finite, ordered list of distinct symbolic constants. Order matters:
    /// relational comparisons between enumeration values compare positions
    /// in this list.
    Enumeration(Vec<String>),
}

impl AttributeType {
    /// Bounded integer domain; fails when `lo > hi`.
    pub fn int_range(lo: i64, hi: i64) -> Result<Self, ModelError> {
        if lo > hi {
            return Err(ModelError::EmptyIntRange { lo, hi });
        }
        Ok(AttributeType::IntRange { lo, hi })
    }

    /// Ordered enumeration domain; fails on empty or duplicated value lists.
    pub fn enumeration<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(ModelError::EmptyEnumeration);
        }
        let mut seen = BTreeSet::new();
        for v in &values {
            if !seen.insert(v.clone()) {
                return Err(ModelError::DuplicateEnumValue { value: v.clone() });
            }
        }
        Ok(AttributeType::Enumeration(values))
    }

    /// Does `value` belong to this domain?
    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (AttributeType::IntRange { lo, hi }, Value::Int(n)) => lo <= n && n <= hi,
            (AttributeType::Enumeration(vs), Value::Sym(s)) => vs.iter().any(|v| v == s),
            _ => false,
        }
    }

    /// Position of a symbolic constant in an enumeration, if any.
    pub fn position_of(&self, sym: &str) -> Option<usize> {
        match self {
            AttributeType::Enumeration(vs) => vs.iter().position(|v| v == sym),
            AttributeType::IntRange { .. } => None,
        }
    }

    /// Number of values in the domain, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        match self {
            AttributeType::IntRange { lo, hi } => (hi - lo).unsigned_abs().saturating_add(1),
            AttributeType::Enumeration(vs) => vs.len() as u64,
        }
    }
}

/// One activity: a name plus an ordered list of typed attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivitySignature {
    name: String,
    attributes: Vec<(String, AttributeType)>,
}

impl ActivitySignature {
    /// Fails when two attributes of the same activity share a name.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<(String, AttributeType)>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for (attr, _) in &attributes {
            if !seen.insert(attr.clone()) {
                return Err(ModelError::DuplicateAttribute {
                    activity: name,
                    attribute: attr.clone(),
                });
            }
        }
        Ok(ActivitySignature { name, attributes })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Attributes in declaration order.
    pub fn attributes(&self) -> &[(String, AttributeType)] {
        &self.attributes
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    /// Declaration index of an attribute, if this activity carries it.
    pub fn attribute_index(&self, attr: &str) -> Option<usize> {
        self.attributes.iter().position(|(a, _)| a == attr)
    }

    pub fn attribute_type(&self, attr: &str) -> Option<&AttributeType> {
        self.attributes
            .iter()
            .find(|(a, _)| a == attr)
            .map(|(_, t)| t)
    }
}

/// The set of activity signatures a process is described over.
///
/// Activity declaration order is preserved; it is the canonical enumeration
/// order used by deterministic generators and query-candidate enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessVocabulary {
    activities: Vec<ActivitySignature>,
}

impl ProcessVocabulary {
    /// Fails on an empty list or duplicated activity names.
    pub fn new(activities: Vec<ActivitySignature>) -> Result<Self, ModelError> {
        if activities.is_empty() {
            return Err(ModelError::NoActivities);
        }
        let mut seen = BTreeSet::new();
        for sig in &activities {
            if !seen.insert(sig.name().to_string()) {
                return Err(ModelError::DuplicateActivity {
                    activity: sig.name().to_string(),
                });
            }
        }
        Ok(ProcessVocabulary { activities })
    }

    /// Signatures in declaration order.
    pub fn activities(&self) -> &[ActivitySignature] {
        &self.activities
    }

    pub fn signature(&self, activity: &str) -> Option<&ActivitySignature> {
        self.activities.iter().find(|s| s.name() == activity)
    }

    /// Does any activity declare an attribute with this name?
    pub fn declares_attribute(&self, attr: &str) -> bool {
        self.activities
            .iter()
            .any(|s| s.attribute_index(attr).is_some())
    }

    /// All `(activity, type)` pairs declaring the named attribute.
    pub fn attribute_declarations<'a>(
        &'a self,
        attr: &'a str,
    ) -> impl Iterator<Item = (&'a ActivitySignature, &'a AttributeType)> + 'a {
        self.activities
            .iter()
            .filter_map(move |s| s.attribute_type(attr).map(|t| (s, t)))
    }
}

/// One event: an activity occurrence with values for each of the
/// signature's attributes, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub activity: String,
    pub values: Vec<Value>,
}

impl Event {
    pub fn new(activity: impl Into<String>, values: Vec<Value>) -> Self {
        Event {
            activity: activity.into(),
            values,
        }
    }

    /// Value of the named attribute, resolved through the vocabulary.
    /// `None` when the activity is unknown or does not carry the attribute
    /// or the event is too short.
    pub fn attribute_value<'a>(&'a self, v: &ProcessVocabulary, attr: &str) -> Option<&'a Value> {
        let sig = v.signature(&self.activity)?;
        let ix = sig.attribute_index(attr)?;
        self.values.get(ix)
    }
}

/// A finite, ordered sequence of events, optionally named.
///
/// Emptiness is *not* enforced structurally — dirty input logs may contain
/// empty trace records — but every semantic operation in the crate requires
/// at least one event and [`validate_trace`] reports emptiness as a
/// violation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    pub id: Option<String>,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(events: Vec<Event>) -> Self {
        Trace { id: None, events }
    }

    pub fn with_id(id: impl Into<String>, events: Vec<Event>) -> Self {
        Trace {
            id: Some(id.into()),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// A multiset of traces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Log {
    pub traces: Vec<Trace>,
}

impl Log {
    pub fn new(traces: Vec<Trace>) -> Self {
        Log { traces }
    }
}

/// Construction-time errors for vocabulary components.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("integer range {lo}..{hi} is empty")]
    EmptyIntRange { lo: i64, hi: i64 },
    #[error("enumeration must list at least one value")]
    EmptyEnumeration,
    #[error("enumeration value `{value}` is listed twice")]
    DuplicateEnumValue { value: String },
    #[error("activity `{activity}` declares attribute `{attribute}` twice")]
    DuplicateAttribute { activity: String, attribute: String },
    #[error("activity `{activity}` is declared twice")]
    DuplicateActivity { activity: String },
    #[error("a vocabulary must declare at least one activity")]
    NoActivities,
}

/// A problem found while checking an event against a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventViolation {
    UnknownActivity { activity: String },
    /// The event carries the wrong number of values for its signature.
    ArityMismatch { activity: String, expected: usize, actual: usize },
    /// A value falls outside its attribute's domain.
    ValueOutsideDomain { activity: String, attribute: String, value: Value },
}

impl fmt::Display for EventViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventViolation::UnknownActivity { activity } => {
                write!(f, "activity `{activity}` is not declared in the vocabulary")
            }
            EventViolation::ArityMismatch { activity, expected, actual } => write!(
                f,
                "activity `{activity}` expects {expected} attribute value(s), event carries {actual}"
            ),
            EventViolation::ValueOutsideDomain { activity, attribute, value } => write!(
                f,
                "value {value} outside the domain of attribute `{attribute}` of activity `{activity}`"
            ),
        }
    }
}

/// A problem found while checking a trace: either the trace is empty or
/// some event at `position` (1-based) is bad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceViolation {
    EmptyTrace,
    BadEvent { position: usize, violation: EventViolation },
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceViolation::EmptyTrace => write!(f, "empty trace"),
            TraceViolation::BadEvent { position, violation } => {
                write!(f, "event {position}: {violation}")
            }
        }
    }
}

/// Check a single event against the vocabulary. Returns every violation it
/// can describe; an empty result means the event is well-formed.
pub fn validate_event(v: &ProcessVocabulary, e: &Event) -> Vec<EventViolation> {
    let sig = match v.signature(&e.activity) {
        Some(sig) => sig,
        None => {
            return vec![EventViolation::UnknownActivity {
                activity: e.activity.clone(),
            }]
        }
    };
    let mut out = Vec::new();
    if sig.arity() != e.values.len() {
        out.push(EventViolation::ArityMismatch {
            activity: e.activity.clone(),
            expected: sig.arity(),
            actual: e.values.len(),
        });
    }
    for ((attr, ty), value) in sig.attributes().iter().zip(&e.values) {
        if !ty.contains(value) {
            out.push(EventViolation::ValueOutsideDomain {
                activity: e.activity.clone(),
                attribute: attr.clone(),
                value: value.clone(),
            });
        }
    }
    out
}

/// Check a whole trace; reports emptiness and all per-event violations with
/// 1-based positions. Never aborts early.
pub fn validate_trace(v: &ProcessVocabulary, t: &Trace) -> Vec<TraceViolation> {
    if t.events.is_empty() {
        return vec![TraceViolation::EmptyTrace];
    }
    t.events
        .iter()
        .enumerate()
        .flat_map(|(i, e)| {
            validate_event(v, e).into_iter().map(move |violation| {
                TraceViolation::BadEvent {
                    position: i + 1,
                    violation,
                }
            })
        })
        .collect()
}
