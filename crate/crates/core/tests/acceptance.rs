//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tagforge::calculus::{hilbert_calculus, weakening_calculus};
use tagforge::codec::{HatTemplate, WordCodec};
use tagforge::engine::{closure_level, naive_closure_oracle};
use tagforge::lemmas::{
    check_code_inclusion, check_corollary5, check_halting_equivalence, check_inclusion, check_lemma1, check_lemma3,
    check_lemma6, check_production_calculus, LemmaVerdict,
};
use tagforge::reduction::{build_pt, AxiomGroup};
use tagforge::tag::Alphabet;
use tagforge::unify::is_instance;
use tagforge::{parse_formula, parse_tag_system, Calculus, Formula, TagSystem, Word};

type Outcome = Result<String, String>;

fn collatz() -> TagSystem {
    parse_tag_system("d=2\na -> bc\nb -> a\nc -> aaa").unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn codec_counts() -> Outcome {
    let codec = WordCodec::new(HatTemplate::identity(), Alphabet::latin());
    let counts: Vec<usize> =
        (1..=6).map(|n| codec.code_word(&Word::from(&"abcdef"[..n])).unwrap().len()).collect();
    ensure(counts == [1, 1, 2, 5, 14, 42], format!("counts {counts:?}"))?;
    let listing: Vec<String> = codec
        .code_word(&"acec".into())
        .unwrap()
        .members
        .iter()
        .map(|m| m.parse.display(codec.alphabet()))
        .collect();
    let expected = ["a·(c·(e·c))", "a·((c·e)·c)", "(a·c)·(e·c)", "(a·(c·e))·c", "((a·c)·e)·c"];
    ensure(listing == expected, format!("acec listing {listing:?}"))?;
    Ok(format!("counts {counts:?}; acec listing matches"))
}

fn combinators_disjoint() -> Outcome {
    for h in ["x", "x -> x", "x -> x -> x"] {
        let r = check_lemma1(&HatTemplate::parse(h).unwrap());
        ensure(r.passed(), format!("hat {h}: {}", r.detail))?;
    }
    Ok("3 templates".into())
}

fn alphabetic_pairs() -> Outcome {
    let r = check_lemma3(&HatTemplate::identity(), 3, 4).map_err(|e| e.to_string())?;
    ensure(r.resources.items == 471, format!("{} formulas", r.resources.items))?;
    ensure(r.passed(), format!("{}: {:?}", r.detail, r.witness))?;
    Ok(r.detail)
}

fn inclusion() -> Outcome {
    let h = HatTemplate::identity();
    let t = collatz();
    let pt = build_pt(&t, &h).map_err(|e| e.to_string())?;
    let groups: Vec<String> =
        [AxiomGroup::T1, AxiomGroup::T2, AxiomGroup::R].iter().map(|&g| format!("{g} {}", pt.group(g).len())).collect();
    let r = check_inclusion(&t, &h).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.witness.revalidate(), format!("P_T: {}", r.detail))?;
    let codes = check_code_inclusion(&h, t.alphabet(), 4).map_err(|e| e.to_string())?;
    ensure(codes.passed() && codes.witness.revalidate(), format!("codes: {}", codes.detail))?;
    // every trace is at most one detachment deep
    Ok(format!(
        "P_T has {} axioms ({}; the stated 20 counts T2 once per letter, not once per α), {} code members, all traced",
        pt.calculus.len(),
        groups.join(", "),
        codes.witness.count()
    ))
}

fn bracketing_chains() -> Outcome {
    let r = check_lemma6(&HatTemplate::identity(), 2, 5).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.witness.revalidate(), r.detail.clone())?;
    Ok(r.detail)
}

fn run_chain() -> Outcome {
    let r = check_corollary5(&collatz(), &HatTemplate::identity(), &"aaa".into(), 1000).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.witness.revalidate(), r.detail.clone())?;
    Ok(r.detail)
}

fn closure_classified() -> Outcome {
    let t = collatz();
    let h = HatTemplate::identity();
    let pt = build_pt(&t, &h).map_err(|e| e.to_string())?.calculus;
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let alpha = Word::from("aaa");
    let calc = Calculus::new(
        "P_T+aaa",
        pt.axioms().iter().cloned().chain(codec.code_word(&alpha).unwrap().formulas().cloned()).collect(),
    );
    let r = check_production_calculus(&t, &h, &alpha, &calc, pt.axioms(), 2).map_err(|e| e.to_string())?;
    ensure(r.passed(), format!("{}: {} {:?}", r.verdict, r.detail, r.witness.kind()))?;
    Ok(r.detail)
}

fn oracle_soundness() -> Outcome {
    let pool = [parse_formula("p").unwrap(), parse_formula("p -> p").unwrap()];
    let mut checked = 0;
    for c in [weakening_calculus(), hilbert_calculus()] {
        let closure = closure_level(&c, 2).map_err(|e| e.to_string())?;
        for n in 0..=2 {
            let out = naive_closure_oracle(&c, n, &pool).map_err(|e| e.to_string())?;
            for f in &out {
                ensure(
                    closure.up_to(n).iter().any(|g| is_instance(f, &g.formula)),
                    format!("{}: `{f}` at level {n} has no generator", c.label()),
                )?;
            }
            checked += out.len();
        }
    }
    Ok(format!("{checked} oracle formulas matched"))
}

fn halting_equivalence() -> Outcome {
    let k = weakening_calculus();
    let halting = parse_tag_system("d=2\na -> b\nb -> b").unwrap();
    let fwd = check_halting_equivalence(&halting, &k, &"aa".into(), 10).map_err(|e| e.to_string())?;
    ensure(fwd.passed() && fwd.witness.revalidate(), format!("forward: {} {}", fwd.verdict, fwd.detail))?;
    let growing = parse_tag_system("d=2\na -> aa").unwrap();
    let neg = check_halting_equivalence(&growing, &k, &"aa".into(), 4).map_err(|e| e.to_string())?;
    ensure(neg.verdict == LemmaVerdict::InconclusiveBudget, format!("negative: {} {}", neg.verdict, neg.detail))?;
    ensure(neg.detail.contains("structural check: pass"), format!("negative: {}", neg.detail))?;
    Ok(format!("forward: {}; negative: {}", fwd.detail, neg.detail))
}

fn negative_control() -> Outcome {
    let closure = closure_level(&weakening_calculus(), 5).map_err(|e| e.to_string())?;
    let goal: Formula = parse_formula("x -> x").unwrap();
    ensure(!closure.formulas().any(|g| is_instance(&goal, g)), "x -> x is an instance of a generator")?;
    Ok(format!("{} generators through level 5", closure.generators().len()))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "codec counts and acec listing", 1, codec_counts),
        (2, "x∘y and (x∘y)→z never unify", 1, combinators_disjoint),
        (3, "alphabetic formulas pairwise non-unifiable", 30, alphabetic_pairs),
        (4, "P_T and codes derive from x→(y→x)", 10, inclusion),
        (5, "R chains between all bracketings", 60, bracketing_chains),
        (6, "run chain for Collatz from aaa", 10, run_chain),
        (7, "P_T ∪ code(aaa) closure fully classified", 120, closure_classified),
        (8, "naive oracle sound against condensed closure", 60, oracle_soundness),
        (9, "halting equivalence, forward and guarded negative", 120, halting_equivalence),
        (10, "x→x not derivable from x→(y→x) through level 5", 60, negative_control),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(limit);
        let (status, detail) = match (&outcome, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("too slow; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("[{status}] criterion {id:>2}: {name} ({:.2}s, limit {limit}s): {detail}", elapsed.as_secs_f64());
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
