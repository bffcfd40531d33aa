//! Instance checks for the properties the reduction relies on, with
//! constructive chain builders and re-checkable witnesses.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{weakening_calculus, Calculus};
use crate::codec::{circ, Bracketing, HatTemplate, WordCodec};
use crate::engine::{
    axiom_link, chain_check, chain_to_trace, check_trace, closure_level_with, derive_weakening, derives_in,
    ChainProof, ClosureConfig, ClosureLevel, DerivationTrace, Step, Verdict,
};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::reduction::{build_pt, build_reduction, r_calculus, t_alpha_member_with, ReductionBundle};
use crate::subst::Substitution;
use crate::tag::{Alphabet, RunOutcome, TagSystem, Word};
use crate::unify::{is_instance, match_instance, unify};

/// Production steps allowed when deciding `α ⟹ word(A)`.
pub const REACH_BUDGET: usize = 10_000;

/// Formulas enumerated by the pairwise sweeps before giving up.
pub const SWEEP_BUDGET: usize = 20_000;

/// Closure levels searched directly before the halting check falls back
/// to the run chain.
pub const HALT_SEARCH_LEVELS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaVerdict {
    Pass,
    Fail,
    InconclusiveBudget,
}

impl fmt::Display for LemmaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaVerdict::Pass => "pass",
            LemmaVerdict::Fail => "fail",
            LemmaVerdict::InconclusiveBudget => "inconclusive-budget",
        })
    }
}

/// Evidence attached to a report.
#[derive(Clone, Debug)]
pub enum Witness {
    None,
    /// Each trace proves its formula in `calculus`.
    Traces { calculus: Calculus, items: Vec<(Formula, DerivationTrace)> },
    /// Each chain checks in `calculus`.
    Chains { calculus: Calculus, chains: Vec<ChainProof> },
    /// Formulas that break the property.
    Counterexample(Vec<Formula>),
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::None => "none",
            Witness::Traces { .. } => "traces",
            Witness::Chains { .. } => "chains",
            Witness::Counterexample(_) => "counterexample",
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Witness::None => 0,
            Witness::Traces { items, .. } => items.len(),
            Witness::Chains { chains, .. } => chains.len(),
            Witness::Counterexample(fs) => fs.len(),
        }
    }

    /// Re-run the independent checker over the evidence.
    pub fn revalidate(&self) -> bool {
        match self {
            Witness::None | Witness::Counterexample(_) => true,
            Witness::Traces { calculus, items } => items.iter().all(|(f, t)| check_trace(calculus, t, f)),
            Witness::Chains { calculus, chains } => chains.iter().all(|c| chain_check(calculus, c)),
        }
    }

    /// Every trace in the witness with the formula it proves; chain links
    /// prove `Ci → Ci+1`.
    pub fn traces(&self) -> Vec<(Formula, DerivationTrace)> {
        match self {
            Witness::Traces { items, .. } => items.clone(),
            Witness::Chains { chains, .. } => chains
                .iter()
                .flat_map(|c| {
                    c.links()
                        .iter()
                        .zip(c.waypoints().windows(2))
                        .map(|(l, w)| (Formula::imp(w[0].clone(), w[1].clone()), l.clone()))
                        .collect::<Vec<_>>()
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn calculus(&self) -> Option<&Calculus> {
        match self {
            Witness::Traces { calculus, .. } | Witness::Chains { calculus, .. } => Some(calculus),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    /// Closure generators computed.
    pub generators: usize,
    /// Items examined (pairs, axioms, targets, …).
    pub items: usize,
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub id: String,
    pub instance: String,
    pub verdict: LemmaVerdict,
    pub detail: String,
    pub witness: Witness,
    pub resources: Resources,
    pub elapsed: Duration,
}

impl LemmaReport {
    fn new(id: &str, instance: impl Into<String>) -> Self {
        LemmaReport {
            id: id.into(),
            instance: instance.into(),
            verdict: LemmaVerdict::Pass,
            detail: String::new(),
            witness: Witness::None,
            resources: Resources::default(),
            elapsed: Duration::ZERO,
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        self.elapsed = start.elapsed();
        self
    }

    fn fail(mut self, detail: impl Into<String>, counterexample: Vec<Formula>) -> Self {
        self.verdict = LemmaVerdict::Fail;
        self.detail = detail.into();
        self.witness = Witness::Counterexample(counterexample);
        self
    }

    fn inconclusive(mut self, detail: impl Into<String>) -> Self {
        self.verdict = LemmaVerdict::InconclusiveBudget;
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == LemmaVerdict::Pass
    }

    /// One JSON line; timings only when asked for, so output stays reproducible.
    pub fn to_json(&self, with_timing: bool) -> LemmaReportJson {
        let mut resources = self.resources.clone();
        resources.elapsed_ms = with_timing.then_some(self.elapsed.as_millis() as u64);
        LemmaReportJson {
            id: self.id.clone(),
            instance: self.instance.clone(),
            verdict: self.verdict,
            detail: self.detail.clone(),
            witness: WitnessJson {
                kind: self.witness.kind().into(),
                count: self.witness.count(),
                counterexample: match &self.witness {
                    Witness::Counterexample(fs) => fs.iter().map(|f| f.to_string()).collect(),
                    _ => Vec::new(),
                },
                files: Vec::new(),
            },
            resources,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub kind: String,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexample: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReportJson {
    pub id: String,
    pub instance: String,
    pub verdict: LemmaVerdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    pub witness: WitnessJson,
    pub resources: Resources,
}

/// `x ∘ y` and `(x ∘ y) → z` do not unify (variables shared as written).
pub fn check_lemma1(h: &HatTemplate) -> LemmaReport {
    let start = Instant::now();
    let report = LemmaReport::new("lemma1", format!("hat {h}"));
    let (x, y, z) = (Formula::var("x"), Formula::var("y"), Formula::var("z"));
    let c = circ(h, &x, &y);
    let cz = Formula::imp(c.clone(), z);
    let mut report = match unify(&c, &cz) {
        None => report,
        Some(s) => {
            let image = s.apply(&c);
            report.fail("x∘y and (x∘y)→z unify", vec![image])
        }
    };
    report.resources.items = 1;
    report.finish(start)
}

/// Every alphabetic formula over the first `size` letters with word length
/// `1..=max_len`, word by word (shorter first, then lexicographic).
pub fn alphabetic_formulas(codec: &WordCodec, max_len: usize) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for w in codec.alphabet().words_of_len(len) {
            out.extend(codec.code_word(&w)?.formulas().cloned());
            if out.len() > SWEEP_BUDGET {
                return Err(Error::OracleBudget(SWEEP_BUDGET));
            }
        }
    }
    Ok(out)
}

/// First pair of distinct formulas (after removing repeats) that unify once
/// made variable-disjoint.
pub fn first_unifiable_pair(formulas: &[Formula]) -> Option<(Formula, Formula)> {
    let mut seen = HashSet::new();
    let distinct: Vec<Formula> = formulas.iter().filter(|f| seen.insert((*f).clone())).cloned().collect();
    let avoid: BTreeSet<_> = distinct.iter().flat_map(|f| f.variables()).collect();
    let apart: Vec<Formula> =
        distinct.iter().map(|f| crate::unify::renaming_apart(f, &avoid).apply(f)).collect();
    (0..distinct.len()).into_par_iter().find_map_first(|i| {
        ((i + 1)..distinct.len())
            .find(|&j| unify(&distinct[i], &apart[j]).is_some())
            .map(|j| (distinct[i].clone(), distinct[j].clone()))
    })
}

/// No two distinct alphabetic formulas with words up to `max_len` unify.
pub fn check_lemma3(h: &HatTemplate, alphabet_size: usize, max_len: usize) -> Result<LemmaReport> {
    if alphabet_size == 0 || max_len == 0 {
        return Err(Error::Precondition("alphabet size and word length must be at least 1".into()));
    }
    let start = Instant::now();
    let mut report = LemmaReport::new("lemma3", format!("hat {h}, {alphabet_size} letters, words up to length {max_len}"));
    let codec = WordCodec::new(h.clone(), Alphabet::first_n(alphabet_size));
    let formulas = match alphabetic_formulas(&codec, max_len) {
        Ok(fs) => fs,
        Err(Error::OracleBudget(b)) => {
            return Ok(report.inconclusive(format!("more than {b} formulas to compare")).finish(start))
        }
        Err(e) => return Err(e),
    };
    report.resources.items = formulas.len();
    if let Some((a, b)) = first_unifiable_pair(&formulas) {
        report = report.fail("two distinct alphabetic formulas unify", vec![a, b]);
    } else {
        report.detail = format!("{} formulas, {} pairs", formulas.len(), formulas.len() * (formulas.len() - 1) / 2);
    }
    Ok(report.finish(start))
}

/// No two codes of distinct words share a unifiable pair, words up to `max_len`.
pub fn check_corollary4(h: &HatTemplate, alphabet_size: usize, max_len: usize) -> Result<LemmaReport> {
    let mut report = check_lemma3(h, alphabet_size, max_len)?;
    report.id = "corollary4".into();
    Ok(report)
}

/// Bracketings from `b` to its right-nested form, each step one top-level
/// application of a transformation rule.
pub fn normalization_path(b: &Bracketing) -> Vec<Bracketing> {
    let mut path = vec![b.clone()];
    let mut cur = b.clone();
    // x · (y · z) → (x · y) · z until the right part is right-nested
    while let Bracketing::Dot(x, r) = &cur {
        if r.is_right_nested() {
            break;
        }
        let Bracketing::Dot(y, z) = &**r else { unreachable!("letters are right-nested") };
        cur = Bracketing::dot(Bracketing::dot((**x).clone(), (**y).clone()), (**z).clone());
        path.push(cur.clone());
    }
    while let Bracketing::Dot(l, u) = &cur {
        let Bracketing::Dot(x, m) = &**l else { break };
        cur = match &**m {
            // (x · (y · z)) · u → ((x · y) · z) · u
            Bracketing::Dot(y, z) => Bracketing::dot(
                Bracketing::dot(Bracketing::dot((**x).clone(), (**y).clone()), (**z).clone()),
                (**u).clone(),
            ),
            // (x · a) · u → x · (a · u)
            Bracketing::Letter(_) => {
                Bracketing::dot((**x).clone(), Bracketing::dot((**m).clone(), (**u).clone()))
            }
        };
        path.push(cur.clone());
    }
    path
}

/// Chain from `from` to `to` (same word) whose links are axiom instances of `calculus`.
pub fn chain_between(codec: &WordCodec, calculus: &Calculus, from: &Bracketing, to: &Bracketing) -> Result<ChainProof> {
    if from.letters() != to.letters() {
        return Err(Error::Precondition("bracketings of different words".into()));
    }
    let mut path = normalization_path(from);
    let mut back = normalization_path(to);
    back.pop();
    path.extend(back.into_iter().rev());
    path.dedup();
    let formulas: Vec<Formula> = path.iter().map(|b| codec.encode(b)).collect();
    let mut chain = ChainProof::start(formulas[0].clone());
    for pair in formulas.windows(2) {
        let link = axiom_link(calculus, &pair[0], &pair[1])
            .ok_or_else(|| Error::Precondition("no transformation rule links two waypoints".into()))?;
        chain.push(pair[1].clone(), link);
    }
    Ok(chain)
}

/// Chains in the rule calculus `R` from `a` to every member of its word's
/// code, in code order.
pub fn build_chain_lemma6(h: &HatTemplate, alphabet: &Alphabet, a: &Bracketing) -> Result<Vec<ChainProof>> {
    let codec = WordCodec::new(h.clone(), alphabet.clone());
    let r = r_calculus(h);
    Bracketing::all(&a.letters()).iter().map(|target| chain_between(&codec, &r, a, target)).collect()
}

/// Every bracketing of every word up to `max_len` reaches every member of
/// its code in `R`.
pub fn check_lemma6(h: &HatTemplate, alphabet_size: usize, max_len: usize) -> Result<LemmaReport> {
    let start = Instant::now();
    let mut report = LemmaReport::new("lemma6", format!("hat {h}, {alphabet_size} letters, words up to length {max_len}"));
    let alphabet = Alphabet::first_n(alphabet_size);
    let codec = WordCodec::new(h.clone(), alphabet.clone());
    let r = r_calculus(h);
    let mut sources = Vec::new();
    for len in 1..=max_len {
        for w in alphabet.words_of_len(len) {
            sources.extend(Bracketing::all(&codec.indices(&w)?));
        }
    }
    let results: Vec<Result<Vec<ChainProof>>> =
        sources.par_iter().map(|b| build_chain_lemma6(h, &alphabet, b)).collect();
    let mut chains = Vec::new();
    for (b, res) in sources.iter().zip(results) {
        let group = res?;
        if let Some(bad) = group.iter().find(|c| !chain_check(&r, c)) {
            return Ok(report.fail("chain does not check", vec![codec.encode(b), bad.last().clone()]).finish(start));
        }
        chains.extend(group);
    }
    report.resources.items = chains.len();
    report.detail = format!("{} sources, {} chains", sources.len(), chains.len());
    report.witness = Witness::Chains { calculus: r, chains };
    Ok(report.finish(start))
}

/// Chain in `P_T` from the right-nested code of `xi` to the right-nested
/// code of its successor.
pub fn build_chain_lemma7(t: &TagSystem, h: &HatTemplate, xi: &Word) -> Result<ChainProof> {
    let pt = build_pt(t, h)?.calculus;
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    step_chain(t, &codec, &pt, xi)
}

fn step_chain(t: &TagSystem, codec: &WordCodec, pt: &Calculus, xi: &Word) -> Result<ChainProof> {
    let zeta = t
        .step(xi)?
        .ok_or_else(|| Error::Precondition(format!("no production applies to `{xi}`")))?;
    let idx = codec.indices(xi)?;
    let d = t.deletion();
    let source = Bracketing::right_nested(&idx);
    let target = Bracketing::right_nested(&codec.indices(&zeta)?);
    let omega = t.production(xi.letters()[0])?;
    if idx.len() == d {
        // ξ = a_i α, ζ = ω_i: one instance of T2
        let (from, to) = (codec.encode(&source), codec.encode(&target));
        let link = axiom_link(pt, &from, &to).ok_or_else(|| Error::Precondition("no T2 axiom applies".into()))?;
        let mut chain = ChainProof::start(from);
        chain.push(to, link);
        return Ok(chain);
    }
    let head = Bracketing::right_nested(&idx[..d]);
    let beta = Bracketing::right_nested(&idx[d..]);
    let split = Bracketing::dot(head, beta.clone());
    let mut chain = chain_between(codec, pt, &source, &split)?;
    let swapped = Bracketing::dot(beta, Bracketing::right_nested(&codec.indices(omega)?));
    let (from, to) = (codec.encode(&split), codec.encode(&swapped));
    let link = axiom_link(pt, &from, &to).ok_or_else(|| Error::Precondition("no T1 axiom applies".into()))?;
    chain.push(to, link);
    chain.extend(chain_between(codec, pt, &swapped, &target)?);
    Ok(chain)
}

/// Lemma-7 chains concatenated along the run from `xi`; ends at the
/// right-nested code of the last word reached within `max_steps`.
pub fn build_run_chain(t: &TagSystem, h: &HatTemplate, xi: &Word, max_steps: usize) -> Result<(ChainProof, Word, bool)> {
    let pt = build_pt(t, h)?.calculus;
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let mut chain = ChainProof::start(codec.right_nested(xi)?.formula);
    let mut w = xi.clone();
    for _ in 0..max_steps {
        match t.step(&w)? {
            None => return Ok((chain, w, true)),
            Some(next) => {
                chain.extend(step_chain(t, &codec, &pt, &w)?);
                w = next;
            }
        }
    }
    let halted = t.step(&w)?.is_none();
    Ok((chain, w, halted))
}

/// The concatenated chain along the whole run from `xi` checks in `P_T`.
pub fn check_corollary5(t: &TagSystem, h: &HatTemplate, xi: &Word, max_steps: usize) -> Result<LemmaReport> {
    let start = Instant::now();
    let mut report = LemmaReport::new("corollary5", format!("input {xi}, hat {h}"));
    let (chain, last, halted) = build_run_chain(t, h, xi, max_steps)?;
    let pt = build_pt(t, h)?.calculus;
    report.resources.items = chain.len();
    if !halted {
        report = report.inconclusive(format!("no halt within {max_steps} steps"));
    } else if !chain_check(&pt, &chain) {
        report = report.fail("run chain does not check", vec![chain.last().clone()]);
    } else {
        report.detail = format!("{} links ending at `{last}`", chain.len());
    }
    report.witness = Witness::Chains { calculus: pt, chains: vec![chain] };
    Ok(report.finish(start))
}

/// Searches chains whose waypoints are alphabetic formulas and checks that
/// whenever the code of `ζ` is reached from the code of `ξ` (|ξ|, |ζ| ≤
/// `max_len`), `ξ ⟹ ζ` holds in the tag system.
pub fn check_corollary6(t: &TagSystem, h: &HatTemplate, max_len: usize, steps: usize) -> Result<LemmaReport> {
    let start = Instant::now();
    let mut report = LemmaReport::new("corollary6", format!("hat {h}, words up to length {max_len}, {steps} steps"));
    let pt = build_pt(t, h)?.calculus;
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let bound = max_len + t.max_production_len() * steps;
    let mut words = Vec::new();
    for len in 1..=max_len {
        words.extend(t.alphabet().words_of_len(len));
    }
    let results: Vec<Result<Option<(Word, Word)>>> = words
        .par_iter()
        .map(|xi| {
            let reached = alphabetic_reach(&pt, &codec, &codec.code_word(xi)?.formulas().cloned().collect::<Vec<_>>(), bound);
            for zeta in &reached {
                if zeta.len() <= max_len && zeta != xi && !t.reaches(xi, zeta, REACH_BUDGET)? {
                    return Ok(Some((xi.clone(), zeta.clone())));
                }
            }
            Ok(None)
        })
        .collect();
    for r in results {
        if let Some((xi, zeta)) = r? {
            let f = |w: &Word| codec.right_nested(w).map(|a| a.formula);
            return Ok(report.fail(format!("chain from `{xi}` to `{zeta}` without a production"), vec![f(&xi)?, f(&zeta)?]).finish(start));
        }
    }
    report.resources.items = words.len() * words.len();
    Ok(report.finish(start))
}

/// Words of the alphabetic formulas reachable from `sources` by axiom
/// instances `F → G` of `calculus` with `G` alphabetic of word length ≤ `bound`.
fn alphabetic_reach(calculus: &Calculus, codec: &WordCodec, sources: &[Formula], bound: usize) -> BTreeSet<Word> {
    let mut seen: HashSet<Formula> = sources.iter().cloned().collect();
    let mut queue: VecDeque<Formula> = sources.iter().cloned().collect();
    let mut words = BTreeSet::new();
    while let Some(f) = queue.pop_front() {
        if let Some(a) = codec.decode(&f) {
            words.insert(a.word);
        }
        for ax in calculus.axioms() {
            let Some((ante, cons)) = ax.as_imp() else { continue };
            let Some(s) = match_instance(&f, ante) else { continue };
            if !cons.variables().iter().all(|v| ante.contains_var(v)) {
                continue;
            }
            let g = s.apply(cons);
            if codec.decode(&g).is_some_and(|a| a.word.len() <= bound) && seen.insert(g.clone()) {
                queue.push_back(g);
            }
        }
    }
    words
}

fn short_codes(codec: &WordCodec, deletion: usize) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for len in 1..deletion {
        for w in codec.alphabet().words_of_len(len) {
            out.extend(codec.code_word(&w)?.formulas().cloned());
        }
    }
    Ok(out)
}

fn closure_n(closure: &mut ClosureLevel, shorts: &[Formula], max_level: usize) -> Result<Option<usize>> {
    for level in 0..=max_level {
        closure.extend_to(level)?;
        let fresh = if level == 0 { closure.up_to(0) } else { closure.added_at(level) };
        let hit = fresh
            .iter()
            .any(|g| shorts.iter().any(|m| is_instance(m, &g.formula) || is_instance(&g.formula, m)));
        if hit {
            return Ok(Some(level));
        }
    }
    Ok(None)
}

/// Least closure level of the full reduction calculus holding a generator
/// related by instance (either way) to a code member of a word shorter than `d`.
pub fn compute_n(bundle: &ReductionBundle, max_level: usize) -> Result<Option<usize>> {
    let shorts = short_codes(&bundle.codec, bundle.tag.deletion())?;
    let mut closure = ClosureLevel::new(&bundle.full.calculus, ClosureConfig::from_env());
    closure_n(&mut closure, &shorts, max_level)
}

/// First generator in levels `0..=levels` that is neither an instance of a
/// `star` axiom nor a member of `T*_α`.
fn unclassified(
    closure: &ClosureLevel,
    star: &[Formula],
    t: &TagSystem,
    codec: &WordCodec,
    alpha: &Word,
    levels: usize,
) -> Result<Option<Formula>> {
    let gens = closure.up_to(levels);
    let verdicts: Vec<Result<bool>> = gens
        .par_iter()
        .map(|g| {
            if star.iter().any(|a| is_instance(&g.formula, a)) {
                return Ok(true);
            }
            t_alpha_member_with(codec, t, alpha, &g.formula, REACH_BUDGET)
        })
        .collect();
    for (g, v) in gens.iter().zip(verdicts) {
        if !v? {
            return Ok(Some(g.formula.clone()));
        }
    }
    Ok(None)
}

/// Classifies every generator of `calculus` up to level `n` as an instance
/// of a `star` axiom or a member of `T*_α`.
pub fn check_production_calculus(
    t: &TagSystem,
    h: &HatTemplate,
    alpha: &Word,
    calculus: &Calculus,
    star: &[Formula],
    n: usize,
) -> Result<LemmaReport> {
    let start = Instant::now();
    let mut report = LemmaReport::new("lemma9", format!("input {alpha}, hat {h}, levels 0..={n}"));
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let closure = match closure_level_with(calculus, n, ClosureConfig::from_env()) {
        Ok(c) => c,
        Err(e @ Error::GeneratorCap { .. }) => return Ok(report.inconclusive(e.to_string()).finish(start)),
        Err(e) => return Err(e),
    };
    report.resources.generators = closure.generators().len();
    report.resources.items = closure.generators().len();
    if let Some(bad) = unclassified(&closure, star, t, &codec, alpha, n)? {
        report = report.fail("generator is neither an axiom instance nor a produced word", vec![bad]);
    } else {
        report.detail = format!("{} generators classified", closure.generators().len());
    }
    Ok(report.finish(start))
}

/// Structural check of derivations from `P_T ∪ ᾱ` up to level `n`, and of
/// the full reduction calculus up to `min(n, N)` where `N` is the first level
/// at which a short word's code shows up.
pub fn check_production(t: &TagSystem, p0: &Calculus, h: &HatTemplate, alpha: &Word, n: usize) -> Result<LemmaReport> {
    let start = Instant::now();
    let pt = build_pt(t, h)?;
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let base = Calculus::new("P_T+alpha", pt.calculus.axioms().iter().cloned().chain(codec.code_word(alpha)?.formulas().cloned()).collect());
    let mut report = check_production_calculus(t, h, alpha, &base, pt.calculus.axioms(), n)?;
    if !report.passed() {
        return Ok(report.finish(start));
    }

    let bundle = build_reduction(t, p0, alpha, std::slice::from_ref(h))?;
    let shorts = short_codes(&codec, t.deletion())?;
    let mut closure = ClosureLevel::new(&bundle.full.calculus, ClosureConfig::from_env());
    let guard = match closure_n(&mut closure, &shorts, n) {
        Ok(found) => found,
        Err(e @ Error::GeneratorCap { .. }) => return Ok(report.inconclusive(e.to_string()).finish(start)),
        Err(e) => return Err(e),
    };
    let levels = guard.map_or(n, |g| g.min(n));
    if let Err(e) = closure.extend_to(levels) {
        return match e {
            Error::GeneratorCap { .. } => Ok(report.inconclusive(e.to_string()).finish(start)),
            e => Err(e),
        };
    }
    let star: Vec<Formula> = bundle.pt_with_halting().axioms().to_vec();
    report.resources.generators += closure.up_to(levels).len();
    report.resources.items += closure.up_to(levels).len();
    if let Some(bad) = unclassified(&closure, &star, t, &codec, alpha, levels)? {
        return Ok(report.fail("full calculus generator below the guard level is unclassified", vec![bad]).finish(start));
    }
    report.detail = format!(
        "{}; full calculus levels 0..={levels} ({})",
        report.detail,
        guard.map_or_else(|| format!("no short word within {n}"), |g| format!("short word at level {g}"))
    );
    Ok(report.finish(start))
}

/// Trace of `goal` in `c`: a direct axiom instance, or weakening of an
/// instance when `goal = E → D` with `D` an axiom instance.
fn inclusion_trace(c: &Calculus, goal: &Formula) -> Result<Option<DerivationTrace>> {
    if let Some(t) = DerivationTrace::axiom_instance(c, goal) {
        return Ok(Some(t));
    }
    let Some((e, d)) = goal.as_imp() else { return Ok(None) };
    let Some(base) = DerivationTrace::axiom_instance(c, d) else { return Ok(None) };
    derive_weakening(c, d, &base, e).map(Some)
}

fn inclusion_report(id: &str, instance: String, goals: Vec<Formula>) -> Result<LemmaReport> {
    let start = Instant::now();
    let k = weakening_calculus();
    let mut report = LemmaReport::new(id, instance);
    let mut items = Vec::new();
    for g in goals {
        match inclusion_trace(&k, &g)? {
            Some(t) if check_trace(&k, &t, &g) => items.push((g, t)),
            _ => return Ok(report.fail("axiom has no derivation from x -> y -> x", vec![g]).finish(start)),
        }
    }
    report.resources.items = items.len();
    report.detail = format!("{} traces", items.len());
    report.witness = Witness::Traces { calculus: k, items };
    Ok(report.finish(start))
}

/// Every axiom of `P_T` (plus `extra`) derives from `x → (y → x)`.
pub fn check_inclusion_with(t: &TagSystem, h: &HatTemplate, extra: &[Formula]) -> Result<LemmaReport> {
    let pt = build_pt(t, h)?;
    let goals = pt.calculus.axioms().iter().chain(extra).cloned().collect();
    inclusion_report("lemma12", format!("hat {h}, {} axioms", pt.calculus.len() + extra.len()), goals)
}

pub fn check_inclusion(t: &TagSystem, h: &HatTemplate) -> Result<LemmaReport> {
    check_inclusion_with(t, h, &[])
}

/// Every code member of every word up to `max_len` derives from `x → (y → x)`.
pub fn check_code_inclusion(h: &HatTemplate, alphabet: &Alphabet, max_len: usize) -> Result<LemmaReport> {
    let codec = WordCodec::new(h.clone(), alphabet.clone());
    let goals = match alphabetic_formulas(&codec, max_len) {
        Ok(fs) => fs,
        Err(Error::OracleBudget(b)) => {
            return Ok(LemmaReport::new("lemma5", format!("hat {h}")).inconclusive(format!("more than {b} formulas")))
        }
        Err(e) => return Err(e),
    };
    inclusion_report("lemma5", format!("hat {h}, {} letters, words up to length {max_len}", alphabet.len()), goals)
}

/// Hat templates tried, in order, when building a reduction.
pub fn default_hats() -> Vec<HatTemplate> {
    HatTemplate::escalation(4)
}

/// `T` halts on `input` iff the full reduction calculus extends `p0`,
/// checked within `budget`: forward by derivations of every `p0` axiom,
/// otherwise by the structural check and the absence of derivations.
pub fn check_halting_equivalence(t: &TagSystem, p0: &Calculus, input: &Word, budget: usize) -> Result<LemmaReport> {
    if p0.is_empty() {
        return Err(Error::Precondition("target calculus has no axioms".into()));
    }
    if t.deletion() < 2 {
        return Err(Error::Precondition("deletion number must be at least 2".into()));
    }
    let start = Instant::now();
    let bundle = build_reduction(t, p0, input, &default_hats())?;
    let mut report = LemmaReport::new("lemma11", format!("input {input}, hat {}, budget {budget}", bundle.hat));
    let full = bundle.full.calculus.clone();
    let mut closure = ClosureLevel::new(&full, ClosureConfig::from_env());
    let levels = budget.min(HALT_SEARCH_LEVELS);

    match t.run(input, budget)? {
        RunOutcome::Halted { word, steps } => {
            let mut items = Vec::new();
            let mut constructive = false;
            for (i, a) in p0.axioms().iter().enumerate() {
                let trace = match derives_in(&mut closure, a, levels) {
                    Ok(Verdict::Derivable { trace, .. }) => trace,
                    Ok(Verdict::NotFoundWithinBudget { .. }) | Err(Error::GeneratorCap { .. }) => {
                        constructive = true;
                        halting_trace(&bundle, &word, i, budget)?
                    }
                    Err(e) => return Err(e),
                };
                if !check_trace(&full, &trace, a) {
                    return Ok(report.fail("derivation of a target axiom does not check", vec![a.clone()]).finish(start));
                }
                items.push((a.clone(), trace));
            }
            report.resources.generators = closure.generators().len();
            report.resources.items = items.len();
            report.detail = format!(
                "halts at `{word}` after {steps} steps; {} target axioms derived{}",
                items.len(),
                if constructive { " (constructively)" } else { "" }
            );
            report.witness = Witness::Traces { calculus: full, items };
        }
        RunOutcome::BudgetExhausted { .. } => {
            for a in p0.axioms() {
                match derives_in(&mut closure, a, levels) {
                    Ok(Verdict::Derivable { trace, .. }) => {
                        report.resources.generators = closure.generators().len();
                        report = report.fail("target axiom derivable although no halt was seen", vec![a.clone()]);
                        report.witness = Witness::Traces { calculus: full.clone(), items: vec![(a.clone(), trace)] };
                        return Ok(report.finish(start));
                    }
                    Ok(Verdict::NotFoundWithinBudget { .. }) => {}
                    Err(e @ Error::GeneratorCap { .. }) => return Ok(report.inconclusive(e.to_string()).finish(start)),
                    Err(e) => return Err(e),
                }
            }
            report.resources.generators = closure.generators().len();
            let production = check_production(t, p0, &bundle.hat, input, levels)?;
            report.resources.items = production.resources.items;
            if production.verdict == LemmaVerdict::Fail {
                report.verdict = LemmaVerdict::Fail;
                report.detail = format!("structural check failed: {}", production.detail);
                report.witness = production.witness;
            } else {
                report = report.inconclusive(format!(
                    "no halt within {budget} steps; no target axiom derivable up to level {levels}; structural check: {}",
                    production.verdict
                ));
            }
        }
    }
    Ok(report.finish(start))
}

/// Derivation of `p0` axiom `index` in the full calculus: the run chain
/// from the input code to the halting word, then the matching `H` axiom.
pub fn halting_trace(bundle: &ReductionBundle, halt_word: &Word, index: usize, budget: usize) -> Result<DerivationTrace> {
    let full = &bundle.full.calculus;
    let (chain, last, halted) = build_run_chain(&bundle.tag, &bundle.hat, &bundle.input, budget)?;
    if !halted || &last != halt_word {
        return Err(Error::Precondition("run does not halt within the budget".into()));
    }
    let start = DerivationTrace::axiom_instance(full, chain.first())
        .ok_or_else(|| Error::Precondition("input code is not an axiom".into()))?;
    let mut trace = chain_to_trace(&start, &chain)?;
    let minor = trace.len() - 1;
    let h_count = bundle.p0.len();
    let (h_index, h_axiom) = full
        .axioms()
        .iter()
        .enumerate()
        .filter(|(i, _)| bundle.full.group_of(*i) == Some(crate::reduction::AxiomGroup::H))
        .skip(index % h_count.max(1))
        .step_by(h_count.max(1))
        .find(|(_, ax)| ax.as_imp().is_some_and(|(a, _)| a == chain.last()))
        .ok_or_else(|| Error::Precondition("no halting axiom for the final word".into()))?;
    let major = trace.push(Step::AxiomInstance { axiom: h_index, subst: Substitution::new(), result: h_axiom.clone() });
    let (_, target) = h_axiom.as_imp().expect("halting axioms are implications");
    trace.push(Step::Detachment {
        major,
        minor,
        major_subst: Substitution::new(),
        minor_subst: Substitution::new(),
        result: target.clone(),
    });
    Ok(trace)
}
