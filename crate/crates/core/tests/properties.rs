use proptest::prelude::*;

use tagforge::codec::{Bracketing, HatTemplate, WordCodec};
use tagforge::engine::{
    check_trace, closure_level_with, derive_weakening, derives, naive_closure_oracle_with, ClosureConfig,
    DerivationTrace, Step,
};
use tagforge::lemmas::check_corollary5;
use tagforge::tag::{Alphabet, RunOutcome};
use tagforge::unify::{is_instance, unifiable_apart};
use tagforge::{
    match_instance, parse_formula, unify, Calculus, Error, Formula, Substitution, TagSystem, Word,
};

fn formula_over(vars: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop::sample::select(vars).prop_map(Formula::var);
    leaf.prop_recursive(depth, 64, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)))
}

fn formula() -> impl Strategy<Value = Formula> {
    formula_over(&["a", "b", "c", "d"], 12)
}

fn small_formula() -> impl Strategy<Value = Formula> {
    formula_over(&["a", "b", "c", "d"], 4)
}

/// Replace, at random, subterms of `k` equal to `u(v)` by `v`.
fn abstract_through(k: &Formula, u: &[(&'static str, Formula)], picks: &mut impl Iterator<Item = bool>) -> Formula {
    for (v, t) in u {
        if t == k && picks.next().unwrap_or(false) {
            return Formula::var(v);
        }
    }
    match k.as_imp() {
        Some((a, b)) => {
            let a = abstract_through(a, u, picks);
            let b = abstract_through(b, u, picks);
            Formula::imp(a, b)
        }
        None => k.clone(),
    }
}

fn unifier_case() -> impl Strategy<Value = (Formula, Formula, Substitution)> {
    let range = || formula_over(&["e", "f", "g", "h"], 3);
    (small_formula(), range(), range(), range(), range(), prop::collection::vec(any::<bool>(), 64)).prop_map(
        |(s, ta, tb, tc, td, bits)| {
            let pairs = [("a", ta), ("b", tb), ("c", tc), ("d", td)];
            let u = Substitution::from_pairs(pairs.iter().map(|(v, t)| (*v, t.clone())));
            let k = u.apply(&s);
            let g = abstract_through(&k, &pairs, &mut bits.into_iter().cycle());
            (s, g, u)
        },
    )
}

fn tag_system() -> impl Strategy<Value = TagSystem> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, d)| {
        let letters: Vec<char> = "abc".chars().take(m).collect();
        prop::collection::vec(prop::collection::vec(prop::sample::select(letters.clone()), 1..=3), m).prop_map(
            move |prods| {
                let productions = letters.iter().copied().zip(prods.into_iter().map(Word::new)).collect();
                TagSystem::new(d, productions).unwrap()
            },
        )
    })
}

fn system_and_word() -> impl Strategy<Value = (TagSystem, Word)> {
    tag_system().prop_flat_map(|t| {
        let letters = t.alphabet().letters().to_vec();
        (Just(t), prop::collection::vec(prop::sample::select(letters), 1..=8).prop_map(Word::new))
    })
}

fn bracketing() -> impl Strategy<Value = Bracketing> {
    let leaf = (1usize..=3).prop_map(Bracketing::Letter);
    leaf.prop_recursive(5, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Bracketing::dot(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn mgu_unifies(f in small_formula(), g in small_formula()) {
        if let Some(s) = unify(&f, &g) {
            prop_assert_eq!(s.apply(&f), s.apply(&g));
        }
    }

    #[test]
    fn every_unifier_factors_through_the_mgu((f, g, u) in unifier_case()) {
        prop_assert_eq!(u.apply(&f), u.apply(&g));
        let mgu = unify(&f, &g).expect("a unifier exists");
        for v in f.variables().into_iter().chain(g.variables()) {
            let x = Formula::var_sym(&v);
            prop_assert_eq!(u.apply(&mgu.apply(&x)), u.apply(&x));
        }
    }

    #[test]
    fn matching_implies_apart_unification(f in small_formula(), g in small_formula()) {
        if match_instance(&f, &g).is_some() {
            prop_assert!(unifiable_apart(&f, &g));
        }
        prop_assert!(match_instance(&f, &f).is_some_and(|s| s.is_empty()));
    }

    #[test]
    fn step_length_law((t, w) in system_and_word()) {
        match t.step(&w).unwrap() {
            Some(next) => {
                let omega = t.production(w.letters()[0]).unwrap();
                prop_assert_eq!(next.len(), w.len() - t.deletion() + omega.len());
            }
            None => prop_assert!(w.len() < t.deletion()),
        }
    }

    #[test]
    fn runs_are_deterministic_and_prefix_monotone((t, w) in system_and_word(), n in 0usize..30) {
        let a = t.run(&w, n).unwrap();
        prop_assert_eq!(&a, &t.run(&w, n).unwrap());
        if let RunOutcome::Halted { word, steps } = &a {
            let later = t.run(&w, n + 7).unwrap();
            prop_assert_eq!(later, RunOutcome::Halted { word: word.clone(), steps: *steps });
        }
    }

    #[test]
    fn decode_inverts_encode(b in bracketing(), hat in 0usize..3) {
        let codec = WordCodec::new(HatTemplate::escalation(3)[hat].clone(), Alphabet::first_n(3));
        let f = codec.encode(&b);
        let back = codec.decode(&f).expect("alphabetic");
        prop_assert_eq!(&back.parse, &b);
        prop_assert_eq!(f.variables().into_iter().map(|v| v.to_string()).collect::<Vec<_>>(), vec!["p".to_string()]);
        prop_assert!(is_instance(&f, &parse_formula("x -> y -> x").unwrap()));
    }

    #[test]
    fn distinct_parses_give_distinct_formulas(a in bracketing(), b in bracketing()) {
        let codec = WordCodec::new(HatTemplate::identity(), Alphabet::first_n(3));
        prop_assert_eq!(a == b, codec.encode(&a) == codec.encode(&b));
        prop_assert_eq!(a == b, unifiable_apart(&codec.encode(&a), &codec.encode(&b)));
    }

    #[test]
    fn step_chains_compose_along_halting_runs((t, w) in system_and_word()) {
        prop_assume!(t.deletion() >= 2);
        prop_assume!(t.run(&w, 40).unwrap().halted());
        let r = check_corollary5(&t, &HatTemplate::identity(), &w, 40).unwrap();
        prop_assert!(r.passed(), "{}", r.detail);
        prop_assert!(r.witness.revalidate());
    }
}

fn axiom() -> impl Strategy<Value = Formula> {
    formula_over(&["x", "y", "z"], 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracle_outputs_are_generator_instances(axioms in prop::collection::vec(axiom(), 1..=2)) {
        let c = Calculus::new("random", axioms);
        let pool = [parse_formula("p").unwrap(), parse_formula("p -> p").unwrap()];
        let config = ClosureConfig { generator_cap: 2_000, ..ClosureConfig::default() };
        let closure = match closure_level_with(&c, 2, config) {
            Err(Error::GeneratorCap { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        for n in 0..=2 {
            let out = match naive_closure_oracle_with(&c, n, &pool, 20_000) {
                Err(Error::OracleBudget(_)) => return Ok(()),
                other => other.unwrap(),
            };
            for f in &out {
                prop_assert!(closure.up_to(n).iter().any(|g| is_instance(f, &g.formula)), "{} at level {}", f, n);
            }
        }
    }

    #[test]
    fn closure_is_monotone_and_deterministic(axioms in prop::collection::vec(axiom(), 1..=2)) {
        let c = Calculus::new("random", axioms);
        let config = ClosureConfig { generator_cap: 2_000, ..ClosureConfig::default() };
        let (a, b) = match (closure_level_with(&c, 2, config), closure_level_with(&c, 2, config)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        let fa: Vec<&Formula> = a.formulas().collect();
        let fb: Vec<&Formula> = b.formulas().collect();
        prop_assert_eq!(fa, fb);
        for n in 0..2 {
            for g in a.up_to(n) {
                prop_assert!(a.up_to(n + 1).iter().any(|h| is_instance(&g.formula, &h.formula)));
            }
        }
    }

    #[test]
    fn emitted_traces_check_and_break_under_mutation(axioms in prop::collection::vec(axiom(), 1..=2), pick in any::<prop::sample::Index>()) {
        let c = Calculus::new("random", axioms);
        let config = ClosureConfig { generator_cap: 2_000, ..ClosureConfig::default() };
        let Ok(closure) = closure_level_with(&c, 2, config) else { return Ok(()) };
        let i = pick.index(closure.generators().len());
        let goal = closure.generators()[i].formula.clone();
        let trace = closure.trace(i);
        prop_assert!(check_trace(&c, &trace, &goal));
        let mut bad = trace.clone();
        let last = bad.len() - 1;
        let wrong = Formula::imp(goal.clone(), goal.clone());
        match &mut bad.steps_mut()[last] {
            Step::AxiomInstance { result, .. } | Step::Detachment { result, .. } => *result = wrong,
        }
        prop_assert!(bad.verify(&c).is_err());
    }
}

#[test]
fn derives_and_weakening_traces_check() {
    let k = tagforge::calculus::weakening_calculus();
    for goal in ["x -> y -> x", "a -> b -> c -> b", "(p -> p) -> q -> p -> p"] {
        let goal = parse_formula(goal).unwrap();
        let v = derives(&k, &goal, 2).unwrap();
        let trace: &DerivationTrace = v.trace().expect("derivable");
        assert!(check_trace(&k, trace, &goal));
        let weak = derive_weakening(&k, &goal, trace, &parse_formula("r").unwrap()).unwrap();
        assert!(check_trace(&k, &weak, &Formula::imp(parse_formula("r").unwrap(), goal.clone())));
    }
}
