//! Randomized cross-checks between the independent implementations of the
//! same semantics: direct formula evaluation, compiled automata, the
//! generators, the query checker, and the file formats.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::select;

use dapm::automata::{compile, product};
use dapm::conformance::check_log;
use dapm::formula::{parse, satisfies, CmpOp, Formula};
use dapm::io::{
    parse_model, read_text_log, read_xes_log, write_model, write_text_log, write_xes_log,
    DecodeMode,
};
use dapm::loggen::{
    generate, GenerationLimits, GenerationMode, GenerationOutcome, GenerationRequest,
};
use dapm::model::{
    ActivitySignature, AttributeType, Event, Log, ProcessVocabulary, Trace, Value,
};
use dapm::querycheck::query_check;
use dapm::ProcessModel;

const STATUSES: [&str; 3] = ["low", "mid", "high"];

/// Three activities spanning the interesting cases: one with a single
/// integer attribute, one with two integers plus an enumeration, one bare.
fn vocabulary() -> ProcessVocabulary {
    let int = || AttributeType::int_range(0, 9).unwrap();
    ProcessVocabulary::new(vec![
        ActivitySignature::new("a", vec![("n".into(), int())]).unwrap(),
        ActivitySignature::new(
            "b",
            vec![
                ("n".into(), int()),
                ("m".into(), int()),
                ("status".into(), AttributeType::enumeration(STATUSES).unwrap()),
            ],
        )
        .unwrap(),
        ActivitySignature::new("c", vec![]).unwrap(),
    ])
    .unwrap()
}

fn event_strategy() -> impl Strategy<Value = Event> {
    prop_oneof![
        (0..10i64).prop_map(|n| Event::new("a", vec![Value::Int(n)])),
        (0..10i64, 0..10i64, select(&STATUSES[..])).prop_map(|(n, m, s)| Event::new(
            "b",
            vec![Value::Int(n), Value::Int(m), Value::Sym(s.into())]
        )),
        Just(Event::new("c", vec![])),
    ]
}

fn trace_strategy(max_len: usize) -> impl Strategy<Value = Trace> {
    proptest::collection::vec(event_strategy(), 1..=max_len).prop_map(Trace::new)
}

fn cmp_op() -> impl Strategy<Value = CmpOp> {
    select(&CmpOp::ALL[..])
}

fn leaf(with_vars: bool) -> BoxedStrategy<Formula> {
    let base = prop_oneof![
        1 => Just(Formula::True),
        4 => select(&["a", "b", "c"][..]).prop_map(|s| Formula::Activity(s.into())),
        3 => (select(&["n", "m"][..]), cmp_op(), 0..10i64)
            .prop_map(|(a, op, k)| Formula::AttrCmpConst(a.into(), op, Value::Int(k))),
        2 => (cmp_op(), select(&STATUSES[..]))
            .prop_map(|(op, s)| Formula::AttrCmpConst("status".into(), op, Value::Sym(s.into()))),
        2 => (select(&["n", "m"][..]), cmp_op(), select(&["n", "m"][..]))
            .prop_map(|(l, op, r)| Formula::AttrCmpAttr(l.into(), op, r.into())),
    ];
    if with_vars {
        prop_oneof![
            4 => base,
            1 => select(&["A1", "A2"][..]).prop_map(|s| Formula::Variable(s.into())),
        ]
        .boxed()
    } else {
        base.boxed()
    }
}

fn formula(with_vars: bool) -> impl Strategy<Value = Formula> {
    leaf(with_vars).prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::globally),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::until(l, r)),
        ]
    })
}

/// Replace every activity variable by its bound activity.
fn substitute(f: &Formula, binding: &BTreeMap<String, String>) -> Formula {
    match f {
        Formula::Variable(x) => match binding.get(x) {
            Some(activity) => Formula::Activity(activity.clone()),
            None => f.clone(),
        },
        Formula::True
        | Formula::Activity(_)
        | Formula::AttrCmpAttr(..)
        | Formula::AttrCmpConst(..) => f.clone(),
        Formula::Not(x) => Formula::not(substitute(x, binding)),
        Formula::Next(x) => Formula::next(substitute(x, binding)),
        Formula::Eventually(x) => Formula::eventually(substitute(x, binding)),
        Formula::Globally(x) => Formula::globally(substitute(x, binding)),
        Formula::And(l, r) => Formula::and(substitute(l, binding), substitute(r, binding)),
        Formula::Or(l, r) => Formula::or(substitute(l, binding), substitute(r, binding)),
        Formula::Implies(l, r) => {
            Formula::implies(substitute(l, binding), substitute(r, binding))
        }
        Formula::Until(l, r) => Formula::until(substitute(l, binding), substitute(r, binding)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, .. ProptestConfig::default() })]

    /// The concrete syntax printed for any valid formula parses back to
    /// the same tree.
    #[test]
    fn printed_formula_reparses(f in formula(true)) {
        let v = vocabulary();
        let text = f.to_string();
        let reparsed = parse(&text, &v);
        prop_assert_eq!(reparsed.as_ref(), Ok(&f), "printed as {:?}", text);
    }

    /// The compiled automaton accepts exactly the traces the evaluator
    /// satisfies, and it has a move for every in-vocabulary event from
    /// every state it reaches.
    #[test]
    fn automaton_agrees_with_direct_evaluation(
        f in formula(false),
        traces in proptest::collection::vec(trace_strategy(6), 1..6),
    ) {
        let v = vocabulary();
        let automaton = compile(&f, &v).unwrap();
        for t in &traces {
            let direct = satisfies(&v, t, &f).unwrap();
            let by_automaton = automaton.accepts(&v, t, None).unwrap();
            prop_assert_eq!(direct, by_automaton, "formula {} on {:?}", f, t);

            let mut state = automaton.initial();
            for event in &t.events {
                match automaton.step(&v, state, event, None).unwrap() {
                    Some(next) => state = next,
                    None => prop_assert!(
                        false,
                        "stuck in state {} of {} on {:?}",
                        state, f, event
                    ),
                }
            }
        }
    }

    /// The product automaton accepts exactly the intersection.
    #[test]
    fn product_accepts_the_intersection(
        f in formula(false),
        g in formula(false),
        traces in proptest::collection::vec(trace_strategy(5), 1..5),
    ) {
        let v = vocabulary();
        let fa = compile(&f, &v).unwrap();
        let ga = compile(&g, &v).unwrap();
        let both = product(&fa, &ga, &v);
        for t in &traces {
            let expected = fa.accepts(&v, t, None).unwrap() && ga.accepts(&v, t, None).unwrap();
            prop_assert_eq!(both.accepts(&v, t, None).unwrap(), expected);
        }
    }

    /// The convenience connectives mean exactly their expansions.
    #[test]
    fn sugar_matches_its_expansion(
        f in formula(false),
        g in formula(false),
        t in trace_strategy(6),
    ) {
        let v = vocabulary();
        let ev = |h: &Formula| satisfies(&v, &t, h).unwrap();

        let eventually = Formula::eventually(f.clone());
        let until_form = Formula::until(Formula::True, f.clone());
        prop_assert_eq!(ev(&eventually), ev(&until_form));

        let globally = Formula::globally(f.clone());
        let dual = Formula::not(Formula::eventually(Formula::not(f.clone())));
        prop_assert_eq!(ev(&globally), ev(&dual));

        let implies = Formula::implies(f.clone(), g.clone());
        let or_form = Formula::or(Formula::not(f.clone()), g.clone());
        prop_assert_eq!(ev(&implies), ev(&or_form));
    }

    /// Conformance checking reports, per trace and constraint, exactly
    /// what direct evaluation says.
    #[test]
    fn conformance_report_matches_pointwise_evaluation(
        constraints in proptest::collection::vec(formula(false), 1..3),
        traces in proptest::collection::vec(trace_strategy(5), 1..5),
    ) {
        let model = ProcessModel::new(vocabulary(), constraints).unwrap();
        let log = Log::new(traces);
        let report = check_log(&model, &log).unwrap();
        prop_assert_eq!(report.verdicts.len(), log.traces.len());
        for (verdict, trace) in report.verdicts.iter().zip(&log.traces) {
            for (result, constraint) in verdict.results.iter().zip(&model.constraints) {
                let expected = satisfies(&model.vocabulary, trace, constraint).unwrap();
                prop_assert_eq!(*result, expected);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    /// Random generation is reproducible, in bounds, and sound; `unique`
    /// yields pairwise-distinct traces.
    #[test]
    fn generation_is_sound_and_reproducible(
        constraints in proptest::collection::vec(formula(false), 1..3),
        lengths in (1usize..4, 1usize..4),
        count in 1usize..5,
        seed in any::<u64>(),
        unique in any::<bool>(),
    ) {
        let model = ProcessModel::new(vocabulary(), constraints).unwrap();
        let (min_length, max_length) = {
            let (x, y) = lengths;
            (x.min(y), x.max(y))
        };
        let request = GenerationRequest {
            count,
            min_length,
            max_length,
            mode: GenerationMode::Random { seed, unique },
            limits: GenerationLimits::default(),
            progress: None,
        };
        let first = generate(&model, &request).unwrap();
        let second = generate(&model, &request).unwrap();
        prop_assert_eq!(first.log(), second.log(), "same request, same log");

        if let Some(log) = first.log() {
            prop_assert!(!log.traces.is_empty());
            prop_assert!(log.traces.len() <= count);
            if matches!(first, GenerationOutcome::Complete(_)) {
                prop_assert_eq!(log.traces.len(), count);
            }
            if unique {
                let distinct: BTreeSet<_> = log.traces.iter().map(|t| &t.events).collect();
                prop_assert_eq!(distinct.len(), log.traces.len());
            }
            for trace in &log.traces {
                prop_assert!(trace.len() >= min_length && trace.len() <= max_length);
                for constraint in &model.constraints {
                    prop_assert!(
                        satisfies(&model.vocabulary, trace, constraint).unwrap(),
                        "generated trace {:?} violates {}",
                        trace,
                        constraint
                    );
                }
            }
        }
    }

    /// Exhaustive generation never repeats a trace and is sound.
    #[test]
    fn exhaustive_generation_is_duplicate_free(
        constraints in proptest::collection::vec(formula(false), 1..3),
        max_length in 1usize..3,
        count in 1usize..40,
    ) {
        let model = ProcessModel::new(vocabulary(), constraints).unwrap();
        let request = GenerationRequest {
            count,
            min_length: 1,
            max_length,
            mode: GenerationMode::Exhaustive,
            limits: GenerationLimits::default(),
            progress: None,
        };
        let outcome = generate(&model, &request).unwrap();
        if let Some(log) = outcome.log() {
            let distinct: BTreeSet<_> = log.traces.iter().map(|t| &t.events).collect();
            prop_assert_eq!(distinct.len(), log.traces.len());
            for trace in &log.traces {
                for constraint in &model.constraints {
                    prop_assert!(satisfies(&model.vocabulary, trace, constraint).unwrap());
                }
            }
        }
    }

    /// Query checking returns exactly the assignments under which plain
    /// substitution makes every trace satisfy every constraint.
    #[test]
    fn query_check_agrees_with_substitution(
        constraints in proptest::collection::vec(formula(true), 1..3),
        traces in proptest::collection::vec(trace_strategy(4), 1..4),
    ) {
        let model = ProcessModel::new(vocabulary(), constraints).unwrap();
        let log = Log::new(traces);
        let result = query_check(&model, &log).unwrap();

        let variables: Vec<String> = model.variables().into_iter().collect();
        let activities: Vec<String> =
            model.vocabulary.activities().iter().map(|s| s.name().to_string()).collect();

        // Enumerate every assignment by counting in base |activities|.
        let mut expected = BTreeSet::new();
        let total = activities.len().pow(variables.len() as u32);
        for index in 0..total {
            let mut binding = BTreeMap::new();
            let mut rest = index;
            for var in &variables {
                binding.insert(var.clone(), activities[rest % activities.len()].clone());
                rest /= activities.len();
            }
            let fits = log.traces.iter().all(|t| {
                model.constraints.iter().all(|c| {
                    satisfies(&model.vocabulary, t, &substitute(c, &binding)).unwrap()
                })
            });
            if fits {
                expected.insert(binding);
            }
        }

        let got: BTreeSet<_> = result.assignments.iter().cloned().collect();
        prop_assert_eq!(got, expected);
        prop_assert_eq!(result.trace_count, log.traces.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, .. ProptestConfig::default() })]

    /// A written model file parses back to the same vocabulary and
    /// constraints, and re-writing reproduces the bytes.
    #[test]
    fn model_file_round_trips(constraints in proptest::collection::vec(formula(true), 0..4)) {
        let model = ProcessModel::new(vocabulary(), constraints).unwrap();
        let text = write_model(&model);
        let reparsed = parse_model(&text).unwrap();
        prop_assert_eq!(&reparsed.vocabulary, &model.vocabulary);
        prop_assert_eq!(&reparsed.constraints, &model.constraints);
        prop_assert_eq!(write_model(&reparsed), text);
    }

    /// A written text log reads back losslessly under strict decoding.
    #[test]
    fn text_log_round_trips(
        traces in proptest::collection::vec(
            (proptest::option::of("[a-z][a-z0-9_]{0,8}"), trace_strategy(5)),
            0..5,
        ),
    ) {
        let v = vocabulary();
        let log = Log::new(
            traces
                .into_iter()
                .map(|(id, t)| Trace { id, events: t.events })
                .collect(),
        );
        let text = write_text_log(&log, &v).unwrap();
        let loaded = read_text_log(text.as_bytes(), &v, DecodeMode::Strict).unwrap();
        prop_assert!(loaded.warnings.is_empty(), "warnings: {:?}", loaded.warnings);
        prop_assert_eq!(loaded.log, log);
    }

    /// A written XES log reads back losslessly, including trace names the
    /// text format cannot carry.
    #[test]
    fn xes_log_round_trips(
        traces in proptest::collection::vec(
            (proptest::option::of("[ -~]{0,12}"), trace_strategy(5)),
            0..5,
        ),
    ) {
        let v = vocabulary();
        let log = Log::new(
            traces
                .into_iter()
                .map(|(id, t)| Trace { id, events: t.events })
                .collect(),
        );
        let text = write_xes_log(&log, &v).unwrap();
        let loaded = read_xes_log(text.as_bytes(), &v, DecodeMode::Strict).unwrap();
        prop_assert!(loaded.warnings.is_empty(), "warnings: {:?}", loaded.warnings);
        prop_assert_eq!(loaded.log, log);
    }
}
