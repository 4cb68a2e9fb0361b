//! Log generation: produce traces that satisfy every constraint of a model.
//!
//! All constraints are compiled and folded into one product automaton, and
//! a table `reach[k][q]` — can state `q` reach acceptance in exactly `k`
//! further events — is computed over the concrete candidate-event moves.
//! Generation then never enters a dead end: every partial trace is
//! extended only through events whose target can still finish on time.
//!
//! Candidate events are the cartesian products of per-attribute value
//! candidates. Small domains are used in full; large integer ranges are
//! thinned to their endpoints plus the constants mentioned by the
//! constraints (±1, clamped), which preserves the values that guard
//! boundaries actually distinguish. Every emitted trace is exact — it was
//! driven through the product automaton — but with thinned domains a
//! pathological model could be reported infeasible even though some
//! unrepresented value combination would satisfy it; raise
//! [`GenerationLimits::value_candidates`] in that case.
//!
//! Random generation is deterministic for a fixed seed: attempt `i` draws
//! from an independent, seed-derived stream, so results do not depend on
//! thread scheduling even though attempts run in parallel batches.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::automata::{compile, product_all, Automaton, CompileError};
use crate::formula::Formula;
use crate::model::{AttributeType, Event, Log, ProcessVocabulary, Trace, Value};
use crate::ProcessModel;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error(
        "constraints mention activity variables ({names}); \
         bind them before generating logs",
        names = .variables.join(", ")
    )]
    HasVariables { variables: Vec<String> },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("requested trace count must be at least 1")]
    ZeroCount,
    #[error("trace lengths must be at least 1 and min_length <= max_length (got {min}..={max})")]
    BadLengthRange { min: usize, max: usize },
    #[error(
        "the vocabulary induces {total} candidate events, more than the limit of {limit}; \
         shrink attribute domains or lower value_candidates"
    )]
    TooManyCandidateEvents { total: usize, limit: usize },
    #[error(
        "{states} automaton states x {events} candidate events is too large to tabulate"
    )]
    SearchSpaceTooLarge { states: usize, events: usize },
    #[error(
        "attribute `{attribute}` of activity `{activity}` has {size} values, more than the \
         {limit} supported for exact counting"
    )]
    DomainTooLargeForCounting {
        activity: String,
        attribute: String,
        size: u128,
        limit: usize,
    },
    #[error("model count exceeds the supported integer range")]
    CountOverflow,
}

/// Tunable safety bounds for generation.
#[derive(Debug, Clone)]
pub struct GenerationLimits {
    /// Use an attribute's full domain when it has at most this many
    /// values; thin it to constraint-relevant candidates otherwise.
    pub value_candidates: usize,
    /// Upper bound on the total number of concrete candidate events.
    pub max_candidate_events: usize,
    /// Unique generation gives up after `factor x count` attempts.
    pub unique_attempt_factor: usize,
}

impl Default for GenerationLimits {
    fn default() -> Self {
        GenerationLimits {
            value_candidates: 64,
            max_candidate_events: 20_000,
            unique_attempt_factor: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub enum GenerationMode {
    /// Seeded random walks; `unique` retries until `count` distinct traces
    /// exist (or the attempt budget runs out).
    Random { seed: u64, unique: bool },
    /// All satisfying traces in lexicographic order (by trace length
    /// prefix first, then by event: activity declaration order, attribute
    /// values ascending).
    Exhaustive,
}

#[derive(Debug, Clone)]
pub struct GenerationRequest {
    pub count: usize,
    pub min_length: usize,
    pub max_length: usize,
    pub mode: GenerationMode,
    pub limits: GenerationLimits,
    /// Called with `(found, requested)` as the search advances — after
    /// each batch of random attempts, or per trace when exhaustive. For
    /// front-end progress display; has no effect on the result.
    pub progress: Option<fn(usize, usize)>,
}

impl GenerationRequest {
    fn validate(&self) -> Result<(), GenerationError> {
        if self.count == 0 {
            return Err(GenerationError::ZeroCount);
        }
        if self.min_length == 0 || self.min_length > self.max_length {
            return Err(GenerationError::BadLengthRange {
                min: self.min_length,
                max: self.max_length,
            });
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum GenerationOutcome {
    /// Exactly the requested number of traces.
    Complete(Log),
    /// Fewer traces than requested exist (or were found within the
    /// uniqueness budget); the log holds everything that was produced.
    Exhausted(Log),
    /// No trace in the requested length range satisfies the model.
    Infeasible,
}

impl GenerationOutcome {
    pub fn log(&self) -> Option<&Log> {
        match self {
            GenerationOutcome::Complete(log) | GenerationOutcome::Exhausted(log) => Some(log),
            GenerationOutcome::Infeasible => None,
        }
    }
}

/// Generate a log satisfying every constraint of the model.
pub fn generate(
    model: &ProcessModel,
    request: &GenerationRequest,
) -> Result<GenerationOutcome, GenerationError> {
    request.validate()?;
    let generator = Generator::build(model, &request.limits, request.max_length)?;
    let picked = match &request.mode {
        GenerationMode::Exhaustive => generator.exhaustive(request),
        GenerationMode::Random { seed, unique } => generator.random(request, *seed, *unique),
    };
    if picked.is_empty() {
        return Ok(GenerationOutcome::Infeasible);
    }
    let log = generator.materialize(&picked);
    if picked.len() == request.count {
        Ok(GenerationOutcome::Complete(log))
    } else {
        Ok(GenerationOutcome::Exhausted(log))
    }
}

/// Count how many traces with length in `min_length..=max_length` satisfy
/// the model. Exact, therefore restricted to models whose attribute
/// domains are small enough to enumerate in full.
pub fn count_models(
    model: &ProcessModel,
    min_length: usize,
    max_length: usize,
    limits: &GenerationLimits,
) -> Result<u128, GenerationError> {
    if min_length == 0 || min_length > max_length {
        return Err(GenerationError::BadLengthRange { min: min_length, max: max_length });
    }
    for sig in model.vocabulary.activities() {
        for (attr, ty) in sig.attributes() {
            let size = match ty {
                AttributeType::IntRange { lo, hi } => (*hi as i128 - *lo as i128 + 1) as u128,
                AttributeType::Enumeration(vals) => vals.len() as u128,
            };
            if size > limits.value_candidates as u128 {
                return Err(GenerationError::DomainTooLargeForCounting {
                    activity: sig.name().to_string(),
                    attribute: attr.clone(),
                    size,
                    limit: limits.value_candidates,
                });
            }
        }
    }
    let generator = Generator::build(model, limits, max_length)?;
    generator.count(min_length, max_length)
}

const DEAD: u32 = u32::MAX;
const MOVE_TABLE_CAP: usize = 20_000_000;

struct Generator {
    automaton: Automaton,
    candidates: Vec<Event>,
    /// `moves[state][event] = target` (or `DEAD`, unreachable for events
    /// built from the vocabulary).
    moves: Vec<Vec<u32>>,
    /// `reach[k][state]`: acceptance is reachable in exactly `k` moves.
    reach: Vec<Vec<bool>>,
}

impl Generator {
    fn build(
        model: &ProcessModel,
        limits: &GenerationLimits,
        max_length: usize,
    ) -> Result<Generator, GenerationError> {
        let variables: Vec<String> = model.variables().into_iter().collect();
        if !variables.is_empty() {
            return Err(GenerationError::HasVariables {
                variables: variables.into_iter().map(|x| format!("?{x}")).collect(),
            });
        }
        let automata = model
            .constraints
            .iter()
            .map(|f| compile(f, &model.vocabulary))
            .collect::<Result<Vec<_>, _>>()?;
        let automaton = product_all(&automata, &model.vocabulary);

        let candidates = candidate_events(&model.vocabulary, &model.constraints, limits)?;
        let states = automaton.state_count();
        if states.saturating_mul(candidates.len()) > MOVE_TABLE_CAP {
            return Err(GenerationError::SearchSpaceTooLarge {
                states,
                events: candidates.len(),
            });
        }

        let moves: Vec<Vec<u32>> = (0..states)
            .map(|state| {
                candidates
                    .iter()
                    .map(|event| {
                        automaton
                            .step(&model.vocabulary, state, event, None)
                            .expect("no variables left in compiled guards")
                            .map_or(DEAD, |t| t as u32)
                    })
                    .collect()
            })
            .collect();

        // Exact-length reachability over the candidate moves.
        let mut reach: Vec<Vec<bool>> = Vec::with_capacity(max_length + 1);
        reach.push((0..states).map(|q| automaton.is_accepting(q)).collect());
        let distinct_targets: Vec<Vec<u32>> = moves
            .iter()
            .map(|row| {
                let mut ts: Vec<u32> = row.iter().copied().filter(|&t| t != DEAD).collect();
                ts.sort_unstable();
                ts.dedup();
                ts
            })
            .collect();
        for k in 1..=max_length {
            let prev = &reach[k - 1];
            let row = (0..states)
                .map(|q| distinct_targets[q].iter().any(|&t| prev[t as usize]))
                .collect();
            reach.push(row);
        }

        Ok(Generator {
            automaton,
            candidates,
            moves,
            reach,
        })
    }

    fn feasible_lengths(&self, min: usize, max: usize) -> Vec<usize> {
        (min..=max)
            .filter(|&l| self.reach[l][self.automaton.initial()])
            .collect()
    }

    /// One seeded random walk; attempt indices give independent streams.
    fn random_trace(&self, seed: u64, attempt: u64, lengths: &[usize]) -> Option<Vec<u32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let length = lengths[rng.gen_range(0..lengths.len())];
        let mut state = self.automaton.initial();
        let mut picked = Vec::with_capacity(length);
        for step in 0..length {
            let remaining = length - step - 1;
            let viable: Vec<u32> = (0..self.candidates.len() as u32)
                .filter(|&e| {
                    let t = self.moves[state][e as usize];
                    t != DEAD && self.reach[remaining][t as usize]
                })
                .collect();
            let &event = viable.get(rng.gen_range(0..viable.len().max(1)))?;
            picked.push(event);
            state = self.moves[state][event as usize] as usize;
        }
        debug_assert!(self.automaton.is_accepting(state));
        Some(picked)
    }

    fn random(&self, request: &GenerationRequest, seed: u64, unique: bool) -> Vec<Vec<u32>> {
        let lengths = self.feasible_lengths(request.min_length, request.max_length);
        if lengths.is_empty() {
            return Vec::new();
        }
        let budget = request
            .limits
            .unique_attempt_factor
            .saturating_mul(request.count)
            .max(request.count) as u64;
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(request.count);
        let mut next_attempt = 0u64;
        while out.len() < request.count && next_attempt < budget {
            let batch = ((request.count - out.len()) as u64 * 2)
                .clamp(16, 1024)
                .min(budget - next_attempt);
            let results: Vec<Option<Vec<u32>>> = (next_attempt..next_attempt + batch)
                .into_par_iter()
                .map(|attempt| self.random_trace(seed, attempt, &lengths))
                .collect();
            for picked in results.into_iter().flatten() {
                if (!unique || seen.insert(picked.clone())) && out.len() < request.count {
                    out.push(picked);
                }
            }
            next_attempt += batch;
            if let Some(report) = request.progress {
                report(out.len(), request.count);
            }
        }
        out
    }

    fn exhaustive(&self, request: &GenerationRequest) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.dfs(
            self.automaton.initial(),
            &mut prefix,
            &mut out,
            request.count,
            request.min_length,
            request.max_length,
            request.progress,
        );
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        state: usize,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        count: usize,
        min: usize,
        max: usize,
        progress: Option<fn(usize, usize)>,
    ) -> bool {
        if prefix.len() >= min && self.automaton.is_accepting(state) {
            out.push(prefix.clone());
            if let Some(report) = progress {
                report(out.len(), count);
            }
            if out.len() == count {
                return true;
            }
        }
        if prefix.len() == max {
            return false;
        }
        let lo = min.saturating_sub(prefix.len() + 1);
        let hi = max - prefix.len() - 1;
        for event in 0..self.candidates.len() as u32 {
            let target = self.moves[state][event as usize];
            if target == DEAD || !(lo..=hi).any(|k| self.reach[k][target as usize]) {
                continue;
            }
            prefix.push(event);
            if self.dfs(target as usize, prefix, out, count, min, max, progress) {
                return true;
            }
            prefix.pop();
        }
        false
    }

    fn count(&self, min: usize, max: usize) -> Result<u128, GenerationError> {
        let states = self.automaton.state_count();
        // multiplicity[q] lists (target, number of events moving q there).
        let multiplicity: Vec<Vec<(u32, u128)>> = self
            .moves
            .iter()
            .map(|row| {
                let mut counts: BTreeMap<u32, u128> = BTreeMap::new();
                for &t in row.iter().filter(|&&t| t != DEAD) {
                    *counts.entry(t).or_insert(0) += 1;
                }
                counts.into_iter().collect()
            })
            .collect();

        let mut current: Vec<u128> = (0..states)
            .map(|q| u128::from(self.automaton.is_accepting(q)))
            .collect();
        let mut total: u128 = 0;
        for k in 1..=max {
            let next: Vec<u128> = (0..states)
                .map(|q| {
                    multiplicity[q].iter().try_fold(0u128, |acc, &(t, m)| {
                        current[t as usize]
                            .checked_mul(m)
                            .and_then(|x| acc.checked_add(x))
                            .ok_or(GenerationError::CountOverflow)
                    })
                })
                .collect::<Result<_, _>>()?;
            current = next;
            if k >= min {
                total = total
                    .checked_add(current[self.automaton.initial()])
                    .ok_or(GenerationError::CountOverflow)?;
            }
        }
        Ok(total)
    }

    fn materialize(&self, picked: &[Vec<u32>]) -> Log {
        let traces = picked
            .iter()
            .enumerate()
            .map(|(i, events)| {
                Trace::with_id(
                    format!("t{}", i + 1),
                    events
                        .iter()
                        .map(|&e| self.candidates[e as usize].clone())
                        .collect(),
                )
            })
            .collect();
        Log { traces }
    }
}

/// All concrete events generation may use, in canonical order: activities
/// in declaration order, attribute values ascending, rightmost attribute
/// varying fastest.
fn candidate_events(
    v: &ProcessVocabulary,
    constraints: &[Formula],
    limits: &GenerationLimits,
) -> Result<Vec<Event>, GenerationError> {
    let mut int_constants: BTreeMap<&str, BTreeSet<i64>> = BTreeMap::new();
    let mut sym_constants: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for f in constraints {
        collect_constants(f, &mut int_constants, &mut sym_constants);
    }

    let mut events = Vec::new();
    for sig in v.activities() {
        let per_attr: Vec<Vec<Value>> = sig
            .attributes()
            .iter()
            .map(|(name, ty)| attribute_candidates(name, ty, limits, &int_constants, &sym_constants))
            .collect();
        let combos: usize = per_attr.iter().map(Vec::len).product();
        if events.len() + combos > limits.max_candidate_events {
            return Err(GenerationError::TooManyCandidateEvents {
                total: events.len() + combos,
                limit: limits.max_candidate_events,
            });
        }
        let mut odometer = vec![0usize; per_attr.len()];
        loop {
            events.push(Event::new(
                sig.name(),
                odometer
                    .iter()
                    .zip(&per_attr)
                    .map(|(&i, vals)| vals[i].clone())
                    .collect(),
            ));
            // Advance, rightmost fastest.
            let mut pos = per_attr.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                odometer[pos] += 1;
                if odometer[pos] < per_attr[pos].len() {
                    break;
                }
                odometer[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX || per_attr.is_empty() {
                break;
            }
        }
    }
    Ok(events)
}

fn attribute_candidates(
    name: &str,
    ty: &AttributeType,
    limits: &GenerationLimits,
    int_constants: &BTreeMap<&str, BTreeSet<i64>>,
    sym_constants: &BTreeMap<&str, BTreeSet<&str>>,
) -> Vec<Value> {
    match ty {
        AttributeType::IntRange { lo, hi } => {
            let size = (*hi as i128 - *lo as i128 + 1) as u128;
            if size <= limits.value_candidates as u128 {
                return (*lo..=*hi).map(Value::Int).collect();
            }
            let mut picks: BTreeSet<i64> = BTreeSet::from([*lo, *hi]);
            if let Some(cs) = int_constants.get(name) {
                for &c in cs {
                    for candidate in [c - 1, c, c + 1] {
                        picks.insert(candidate.clamp(*lo, *hi));
                    }
                }
            }
            picks.into_iter().map(Value::Int).collect()
        }
        AttributeType::Enumeration(vals) => {
            if vals.len() <= limits.value_candidates {
                return vals.iter().cloned().map(Value::Sym).collect();
            }
            let referenced: BTreeSet<&str> =
                sym_constants.get(name).cloned().unwrap_or_default();
            vals.iter()
                .enumerate()
                .filter(|(i, s)| {
                    *i == 0 || *i == vals.len() - 1 || referenced.contains(s.as_str())
                })
                .map(|(_, s)| Value::Sym(s.clone()))
                .collect()
        }
    }
}

fn collect_constants<'f>(
    f: &'f Formula,
    ints: &mut BTreeMap<&'f str, BTreeSet<i64>>,
    syms: &mut BTreeMap<&'f str, BTreeSet<&'f str>>,
) {
    match f {
        Formula::AttrCmpConst(attr, _, Value::Int(c)) => {
            ints.entry(attr).or_default().insert(*c);
        }
        Formula::AttrCmpConst(attr, _, Value::Sym(s)) => {
            syms.entry(attr).or_default().insert(s);
        }
        Formula::True
        | Formula::Activity(_)
        | Formula::Variable(_)
        | Formula::AttrCmpAttr(..) => {}
        Formula::Not(x)
        | Formula::Next(x)
        | Formula::Eventually(x)
        | Formula::Globally(x) => collect_constants(x, ints, syms),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Until(l, r) => {
            collect_constants(l, ints, syms);
            collect_constants(r, ints, syms);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::check_log;
    use crate::formula::{parse, satisfies};
    use crate::model::ActivitySignature;

    fn model(texts: &[&str]) -> ProcessModel {
        let v = ProcessVocabulary::new(vec![
            ActivitySignature::new(
                "a",
                vec![("n".into(), AttributeType::int_range(0, 3).unwrap())],
            )
            .unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
        .unwrap();
        let constraints = texts.iter().map(|t| parse(t, &v).unwrap()).collect();
        ProcessModel::new(v, constraints).unwrap()
    }

    fn request(count: usize, min: usize, max: usize, mode: GenerationMode) -> GenerationRequest {
        GenerationRequest {
            count,
            min_length: min,
            max_length: max,
            mode,
            limits: GenerationLimits::default(),
            progress: None,
        }
    }

    #[test]
    fn random_generation_yields_distinct_conforming_traces() {
        let m = model(&["G(a -> F b)", "F(n >= 2)"]);
        let req = request(25, 2, 5, GenerationMode::Random { seed: 7, unique: true });
        let out = generate(&m, &req).unwrap();
        let log = match out {
            GenerationOutcome::Complete(log) => log,
            other => panic!("expected a complete log, got {other:?}"),
        };
        assert_eq!(log.traces.len(), 25);
        let mut seen = BTreeSet::new();
        for t in &log.traces {
            assert!((2..=5).contains(&t.len()));
            assert!(seen.insert(format!("{t:?}")), "duplicate trace {t:?}");
        }
        let report = check_log(&m, &log).unwrap();
        assert!(report.all_conform());
    }

    #[test]
    fn same_seed_reproduces_the_same_log() {
        let m = model(&["G(a -> F b)"]);
        let req = request(10, 1, 6, GenerationMode::Random { seed: 42, unique: true });
        let a = generate(&m, &req).unwrap();
        let b = generate(&m, &req).unwrap();
        assert_eq!(format!("{:?}", a.log()), format!("{:?}", b.log()));
    }

    #[test]
    fn exhaustive_generation_is_lexicographic_and_complete() {
        let v = ProcessVocabulary::new(vec![
            ActivitySignature::new("a", vec![]).unwrap(),
            ActivitySignature::new("b", vec![]).unwrap(),
        ])
        .unwrap();
        let m = ProcessModel::new(v.clone(), vec![parse("F b", &v).unwrap()]).unwrap();
        let out = generate(&m, &request(10, 1, 2, GenerationMode::Exhaustive)).unwrap();
        let log = match out {
            GenerationOutcome::Exhausted(log) => log,
            other => panic!("expected exhaustion, got {other:?}"),
        };
        let rendered: Vec<String> = log
            .traces
            .iter()
            .map(|t| {
                t.events
                    .iter()
                    .map(|e| e.activity.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        assert_eq!(rendered, vec!["a b", "b", "b a", "b b"]);
    }

    #[test]
    fn exhaustive_matches_brute_force_on_a_data_model() {
        let m = model(&["G(a -> n >= 1)", "F b"]);
        let out = generate(&m, &request(10_000, 1, 3, GenerationMode::Exhaustive)).unwrap();
        let log = match out {
            GenerationOutcome::Exhausted(log) => log,
            other => panic!("expected exhaustion, got {other:?}"),
        };
        // Brute force over the full event universe.
        let mut events = vec![Event::new("b", vec![])];
        for n in 0..=3 {
            events.push(Event::new("a", vec![Value::Int(n)]));
        }
        let mut expected = 0usize;
        let mut frontier: Vec<Vec<Event>> = vec![Vec::new()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for prefix in &frontier {
                for e in &events {
                    let mut t = prefix.clone();
                    t.push(e.clone());
                    next.push(t);
                }
            }
            for t in &next {
                let trace = Trace::new(t.clone());
                if m.constraints
                    .iter()
                    .all(|f| satisfies(&m.vocabulary, &trace, f).unwrap())
                {
                    expected += 1;
                }
            }
            frontier = next;
        }
        assert_eq!(log.traces.len(), expected);
        assert_eq!(
            count_models(&m, 1, 3, &GenerationLimits::default()).unwrap(),
            expected as u128
        );
        let report = check_log(&m, &log).unwrap();
        assert!(report.all_conform());
    }

    #[test]
    fn contradictory_models_are_infeasible() {
        let m = model(&["a && b"]);
        let out = generate(
            &m,
            &request(5, 1, 4, GenerationMode::Random { seed: 1, unique: false }),
        )
        .unwrap();
        assert!(matches!(out, GenerationOutcome::Infeasible));
        assert_eq!(count_models(&m, 1, 4, &GenerationLimits::default()).unwrap(), 0);
    }

    #[test]
    fn uniqueness_exhausts_small_trace_spaces() {
        let v = ProcessVocabulary::new(vec![ActivitySignature::new("a", vec![]).unwrap()])
            .unwrap();
        let m = ProcessModel::new(v, vec![Formula::True]).unwrap();
        let out = generate(
            &m,
            &request(5, 1, 1, GenerationMode::Random { seed: 3, unique: true }),
        )
        .unwrap();
        match out {
            GenerationOutcome::Exhausted(log) => assert_eq!(log.traces.len(), 1),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn thinned_domains_still_generate_and_counting_refuses_them() {
        let v = ProcessVocabulary::new(vec![ActivitySignature::new(
            "a",
            vec![("n".into(), AttributeType::int_range(0, 1_000_000).unwrap())],
        )
        .unwrap()])
        .unwrap();
        let f = parse("G(n < 5 || n > 999000)", &v).unwrap();
        let m = ProcessModel::new(v, vec![f]).unwrap();
        let req = request(8, 1, 3, GenerationMode::Random { seed: 9, unique: true });
        let out = generate(&m, &req).unwrap();
        let log = out.log().expect("feasible").clone();
        assert!(!log.traces.is_empty());
        assert!(check_log(&m, &log).unwrap().all_conform());
        assert!(matches!(
            count_models(&m, 1, 2, &GenerationLimits::default()),
            Err(GenerationError::DomainTooLargeForCounting { .. })
        ));
    }

    #[test]
    fn generated_ids_are_sequential() {
        let m = model(&["F b"]);
        let out = generate(
            &m,
            &request(3, 1, 2, GenerationMode::Random { seed: 0, unique: true }),
        )
        .unwrap();
        let log = out.log().unwrap();
        let ids: Vec<_> = log.traces.iter().map(|t| t.id.clone().unwrap()).collect();
        assert_eq!(ids, vec!["t1", "t2", "t3"]);
    }
}
