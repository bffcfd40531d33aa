//! Calculi that simulate a tag system.
//!
//! For a tag system with deletion number `d` the production calculus has
//!
//! ```text
//! (T1)  a_i α · x  →  x · ω_i        for every word α with |α| = d − 1
//! (T2)  a_i α      →  ω_i
//! (R1)  x · (y · z)        →  (x · y) · z
//! (R2)  (x · y) · z        →  x · (y · z)
//! (R3)  (x · (y · z)) · u  →  ((x · y) · z) · u
//! (R4)  ((x · y) · z) · u  →  (x · (y · z)) · u
//! ```
//!
//! where a word in a scheme stands for every member of its code. The halting
//! group adds `ᾱ → A` for every nonempty `α` shorter than `d` and every axiom
//! `A` of the target calculus, and the full calculus adds the input code.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::calculus::{Calculus, CalculusJson};
use crate::codec::{choose_hat, HatTemplate, WordCodec};
use crate::error::{Error, Result};
use crate::formula::{Formula, Symbol, CODE_VAR};
use crate::tag::{TagSystem, Word};
use crate::unify::renaming_apart;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomGroup {
    T1,
    T2,
    R,
    H,
    Input,
}

impl AxiomGroup {
    pub const ALL: [AxiomGroup; 5] = [AxiomGroup::T1, AxiomGroup::T2, AxiomGroup::R, AxiomGroup::H, AxiomGroup::Input];

    pub fn key(self) -> &'static str {
        match self {
            AxiomGroup::T1 => "T1",
            AxiomGroup::T2 => "T2",
            AxiomGroup::R => "R",
            AxiomGroup::H => "H",
            AxiomGroup::Input => "input",
        }
    }
}

impl fmt::Display for AxiomGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A calculus whose axioms are split into contiguous groups.
#[derive(Clone, Debug)]
pub struct GroupedCalculus {
    pub calculus: Calculus,
    pub groups: Vec<(AxiomGroup, Range<usize>)>,
}

impl GroupedCalculus {
    pub fn group(&self, g: AxiomGroup) -> &[Formula] {
        self.groups
            .iter()
            .find(|(k, _)| *k == g)
            .map_or(&[], |(_, r)| &self.calculus.axioms()[r.clone()])
    }

    pub fn group_of(&self, axiom: usize) -> Option<AxiomGroup> {
        self.groups.iter().find(|(_, r)| r.contains(&axiom)).map(|(g, _)| *g)
    }
}

fn scheme_vars() -> [Formula; 4] {
    [Formula::var("x"), Formula::var("y"), Formula::var("z"), Formula::var("u")]
}

/// The four transformation rules, in order R1..R4.
pub fn transformation_rules(h: &HatTemplate) -> Vec<Formula> {
    let [x, y, z, u] = scheme_vars();
    let d = |a: &Formula, b: &Formula| crate::codec::dot(h, a, b);
    let right = d(&x, &d(&y, &z));
    let left = d(&d(&x, &y), &z);
    vec![
        Formula::imp(right.clone(), left.clone()),
        Formula::imp(left.clone(), right.clone()),
        Formula::imp(d(&right, &u), d(&left, &u)),
        Formula::imp(d(&left, &u), d(&right, &u)),
    ]
}

/// The calculus `R` of transformation rules alone.
pub fn r_calculus(h: &HatTemplate) -> Calculus {
    Calculus::new("R", transformation_rules(h))
}

/// Production calculus `P_T = T1 ∪ T2 ∪ R`.
///
/// Order: T1 by letter, then `α` lexicographically, then bracketings of
/// `a_i α` and of `ω_i`; T2 likewise; then R1..R4. For `d = 1`, `α` is the
/// empty word.
pub fn build_pt(t: &TagSystem, h: &HatTemplate) -> Result<GroupedCalculus> {
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let x = Formula::var("x");
    let middles = t.alphabet().words_of_len(t.deletion() - 1);
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for (letter, omega) in t.productions() {
        let omega_code = codec.code_word(omega)?;
        for alpha in &middles {
            let head = Word::new(vec![letter]).concat(alpha);
            let head_code = codec.code_word(&head)?;
            for a in head_code.formulas() {
                for b in omega_code.formulas() {
                    t1.push(Formula::imp(codec.dot(a, &x), codec.dot(&x, b)));
                    t2.push(Formula::imp(a.clone(), b.clone()));
                }
            }
        }
    }
    let r = transformation_rules(h);
    let mut groups = Vec::new();
    let mut axioms = Vec::new();
    for (g, part) in [(AxiomGroup::T1, t1), (AxiomGroup::T2, t2), (AxiomGroup::R, r)] {
        let start = axioms.len();
        axioms.extend(part);
        groups.push((g, start..axioms.len()));
    }
    Ok(GroupedCalculus { calculus: Calculus::new("P_T", axioms), groups })
}

/// Halting group `H`: `A → B` for every code member `A` of a nonempty word
/// shorter than `d` and every axiom `B` of `p0`. Axioms of `p0` that use the
/// code variable `p` get it renamed apart first.
pub fn build_h(t: &TagSystem, p0: &Calculus, h: &HatTemplate) -> Result<Calculus> {
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    let reserved: BTreeSet<Symbol> = [Symbol::from(CODE_VAR)].into();
    let targets: Vec<Formula> = p0
        .axioms()
        .iter()
        .map(|a| if a.contains_var(CODE_VAR) { renaming_apart(a, &reserved).apply(a) } else { a.clone() })
        .collect();
    let mut axioms = Vec::new();
    for len in 1..t.deletion() {
        for w in t.alphabet().words_of_len(len) {
            for m in codec.code_word(&w)?.formulas() {
                for b in &targets {
                    axioms.push(Formula::imp(m.clone(), b.clone()));
                }
            }
        }
    }
    Ok(Calculus::new("H", axioms))
}

/// Everything needed to run the reduction for one tag system, target
/// calculus and input word.
#[derive(Clone, Debug)]
pub struct ReductionBundle {
    pub tag: TagSystem,
    pub p0: Calculus,
    pub hat: HatTemplate,
    pub input: Word,
    /// `P_T` with its T1/T2/R groups.
    pub pt: GroupedCalculus,
    pub h_axioms: Calculus,
    /// `P_T ∪ H ∪ input code`, grouped T1, T2, R, H, input.
    pub full: GroupedCalculus,
    pub codec: WordCodec,
}

impl ReductionBundle {
    /// `P_T ∪ H`.
    pub fn pt_with_halting(&self) -> Calculus {
        self.pt.calculus.union("P_T,P0", &self.h_axioms)
    }

    pub fn to_json(&self) -> BundleJson {
        let texts = |g| self.full.group(g).iter().map(|f| f.to_string()).collect();
        BundleJson {
            hat: self.hat.to_string(),
            tag_file: self.tag.to_tag_file(),
            p0: self.p0.to_json(),
            input: self.input.to_string(),
            t1: texts(AxiomGroup::T1),
            t2: texts(AxiomGroup::T2),
            r: texts(AxiomGroup::R),
            h: texts(AxiomGroup::H),
            input_code: texts(AxiomGroup::Input),
        }
    }
}

/// Bundle file: axiom groups as formula texts plus the inputs echoed back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub hat: String,
    pub tag_file: String,
    pub p0: CalculusJson,
    #[serde(rename = "input_word")]
    pub input: String,
    #[serde(rename = "T1")]
    pub t1: Vec<String>,
    #[serde(rename = "T2")]
    pub t2: Vec<String>,
    #[serde(rename = "R")]
    pub r: Vec<String>,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    #[serde(rename = "input")]
    pub input_code: Vec<String>,
}

impl BundleJson {
    /// The full calculus in group order.
    pub fn to_calculus(&self, label: &str) -> Result<Calculus> {
        let texts = self.t1.iter().chain(&self.t2).chain(&self.r).chain(&self.h).chain(&self.input_code);
        let axioms = texts.map(|s| crate::formula::parse_formula(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Calculus::new(label, axioms))
    }
}

/// Build `P_{T,P0,ξ}` with the first hat template that keeps `p0` clear of
/// the coding shapes.
pub fn build_reduction(
    t: &TagSystem,
    p0: &Calculus,
    input: &Word,
    candidates: &[HatTemplate],
) -> Result<ReductionBundle> {
    if input.is_empty() {
        return Err(Error::EmptyWord);
    }
    t.alphabet().contains_word(input)?;
    let hat = choose_hat(p0, candidates)?;
    let codec = WordCodec::new(hat.clone(), t.alphabet().clone());
    let pt = build_pt(t, &hat)?;
    let h_axioms = build_h(t, p0, &hat)?;
    let input_code: Vec<Formula> = codec.code_word(input)?.formulas().cloned().collect();

    let mut groups = pt.groups.clone();
    let mut axioms = pt.calculus.axioms().to_vec();
    for (g, part) in [(AxiomGroup::H, h_axioms.axioms().to_vec()), (AxiomGroup::Input, input_code)] {
        let start = axioms.len();
        axioms.extend(part);
        groups.push((g, start..axioms.len()));
    }
    let full = GroupedCalculus { calculus: Calculus::new("P_T,P0,xi", axioms), groups };
    Ok(ReductionBundle { tag: t.clone(), p0: p0.clone(), hat, input: input.clone(), pt, h_axioms, full, codec })
}

/// True iff `f` is an instance of an alphabetic formula whose word is `alpha`
/// or is produced from `alpha` within `max_steps` productions.
pub fn t_alpha_member(t: &TagSystem, alpha: &Word, f: &Formula, h: &HatTemplate, max_steps: usize) -> Result<bool> {
    let codec = WordCodec::new(h.clone(), t.alphabet().clone());
    t_alpha_member_with(&codec, t, alpha, f, max_steps)
}

pub(crate) fn t_alpha_member_with(
    codec: &WordCodec,
    t: &TagSystem,
    alpha: &Word,
    f: &Formula,
    max_steps: usize,
) -> Result<bool> {
    if alpha.is_empty() {
        return Err(Error::EmptyWord);
    }
    let Some((parse, _)) = codec.decode_instance(f) else {
        return Ok(false);
    };
    let w = codec.word_of(&parse);
    Ok(&w == alpha || t.reaches(alpha, &w, max_steps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::weakening_calculus;
    use crate::formula::parse_formula;
    use crate::subst::Substitution;
    use crate::tag::parse_tag_system;
    use crate::unify::{is_instance, unifiable_apart};

    const COLLATZ: &str = "d=2\na -> bc\nb -> a\nc -> aaa";

    fn collatz() -> TagSystem {
        parse_tag_system(COLLATZ).unwrap()
    }

    fn catalan(n: usize) -> usize {
        (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    #[test]
    fn collatz_production_counts() {
        let t = collatz();
        let pt = build_pt(&t, &HatTemplate::identity()).unwrap();
        // 3 choices of α, one bracketing of a_i α, Catalan(|ω_i| − 1) bracketings of ω_i
        let per_letter: Vec<usize> = t.productions().map(|(_, w)| 3 * catalan(w.len() - 1)).collect();
        assert_eq!(per_letter, [3, 3, 6]);
        assert_eq!(pt.group(AxiomGroup::T1).len(), 12);
        assert_eq!(pt.group(AxiomGroup::T2).len(), 12);
        assert_eq!(pt.group(AxiomGroup::R).len(), 4);
        assert_eq!(pt.calculus.len(), 28);
    }

    #[test]
    fn deletion_one_uses_single_letters() {
        let t = parse_tag_system("d=1\na -> ab\nb -> a").unwrap();
        let pt = build_pt(&t, &HatTemplate::identity()).unwrap();
        assert_eq!(pt.group(AxiomGroup::T1).len(), 2);
        assert_eq!(pt.group(AxiomGroup::T2).len(), 2);
    }

    #[test]
    fn r1_reads_as_regrouping() {
        let h = HatTemplate::identity();
        let codec = WordCodec::new(h.clone(), crate::tag::Alphabet::latin());
        let r1 = &transformation_rules(&h)[0];
        let (a, c, e) = (codec.letter_code(1), codec.letter_code(3), codec.letter_code(5));
        let s = Substitution::from_pairs([("x", a), ("y", c), ("z", e)]);
        let (lhs, rhs) = s.apply(r1).as_imp().map(|(l, r)| (l.clone(), r.clone())).unwrap();
        let l = codec.decode(&lhs).unwrap();
        let r = codec.decode(&rhs).unwrap();
        assert_eq!(l.word, Word::from("ace"));
        assert_eq!(r.word, Word::from("ace"));
        assert!(l.parse.is_right_nested());
        assert_eq!(r.parse.display(codec.alphabet()), "(a·c)·e");
    }

    #[test]
    fn halting_group_counts() {
        let t = collatz();
        let h = HatTemplate::identity();
        assert_eq!(build_h(&t, &weakening_calculus(), &h).unwrap().len(), 3);
        let looper = parse_tag_system("d=1\na -> a").unwrap();
        assert_eq!(build_h(&looper, &weakening_calculus(), &h).unwrap().len(), 0);
        let two = parse_tag_system("d=2\na -> b\nb -> a").unwrap();
        let p0 = Calculus::new("two", vec![parse_formula("x -> y -> x").unwrap(), parse_formula("x -> x").unwrap()]);
        assert_eq!(build_h(&two, &p0, &h).unwrap().len(), 4);
    }

    #[test]
    fn halting_group_keeps_code_variable_apart() {
        let t = parse_tag_system("d=2\na -> a").unwrap();
        let p0 = Calculus::new("uses p", vec![parse_formula("p -> p").unwrap()]);
        let hcalc = build_h(&t, &p0, &HatTemplate::identity()).unwrap();
        let (_, target) = hcalc.axioms()[0].as_imp().unwrap();
        assert!(!target.contains_var(CODE_VAR));
        assert!(crate::unify::alpha_equal(target, &p0.axioms()[0]));
    }

    #[test]
    fn bundle_layout() {
        let t = collatz();
        let b = build_reduction(&t, &weakening_calculus(), &"aa".into(), &HatTemplate::escalation(3)).unwrap();
        assert_eq!(b.full.calculus.len(), 28 + 3 + 1);
        assert_eq!(b.full.group(AxiomGroup::H).len(), 3);
        assert_eq!(b.full.group(AxiomGroup::Input).len(), 1);
        let order: Vec<_> = b.full.groups.iter().map(|(g, _)| *g).collect();
        assert_eq!(order, AxiomGroup::ALL);
        assert!(matches!(
            build_reduction(&t, &weakening_calculus(), &Word::empty(), &HatTemplate::escalation(1)),
            Err(Error::EmptyWord)
        ));
        let empty_p0 = Calculus::new("empty", vec![]);
        let b = build_reduction(&t, &empty_p0, &"aa".into(), &HatTemplate::escalation(1)).unwrap();
        assert!(b.h_axioms.is_empty());
    }

    #[test]
    fn bundle_json_round_trip() {
        let t = collatz();
        let b = build_reduction(&t, &weakening_calculus(), &"aab".into(), &HatTemplate::escalation(2)).unwrap();
        let json = b.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let back: BundleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
        assert_eq!(back.to_calculus("full").unwrap().axioms(), b.full.calculus.axioms());
        assert_eq!(parse_tag_system(&back.tag_file).unwrap(), t);
    }

    #[test]
    fn every_axiom_is_a_weakening_shape() {
        // each axiom is E → D with D an instance of x → (y → x)
        let k = parse_formula("x -> y -> x").unwrap();
        let b = build_reduction(&collatz(), &weakening_calculus(), &"aaa".into(), &HatTemplate::escalation(1)).unwrap();
        for (i, ax) in b.full.calculus.axioms().iter().enumerate() {
            let ok = match b.full.group_of(i).unwrap() {
                AxiomGroup::Input => is_instance(ax, &k),
                AxiomGroup::H => true,
                _ => is_instance(ax.as_imp().unwrap().1, &k),
            };
            assert!(ok, "axiom {i}");
        }
    }

    #[test]
    fn groups_do_not_unify_with_alphabetic_formulas() {
        let t = collatz();
        let b = build_reduction(&t, &weakening_calculus(), &"aaa".into(), &HatTemplate::escalation(1)).unwrap();
        let mut alphabetic = Vec::new();
        for len in 1..=3 {
            for w in t.alphabet().words_of_len(len) {
                alphabetic.extend(b.codec.code_word(&w).unwrap().formulas().cloned());
            }
        }
        for g in [AxiomGroup::T1, AxiomGroup::T2, AxiomGroup::R, AxiomGroup::H] {
            for ax in b.full.group(g) {
                for a in &alphabetic {
                    assert!(!unifiable_apart(ax, a));
                }
            }
        }
    }

    #[test]
    fn t_alpha_membership() {
        let t = collatz();
        let h = HatTemplate::identity();
        let codec = WordCodec::new(h.clone(), t.alphabet().clone());
        for m in codec.code_word(&"aaa".into()).unwrap().formulas() {
            assert!(t_alpha_member(&t, &"aaa".into(), m, &h, 0).unwrap());
        }
        for m in codec.code_word(&"abc".into()).unwrap().formulas() {
            assert!(t_alpha_member(&t, &"aaa".into(), m, &h, 1).unwrap());
            let inst = Substitution::from_pairs([("p", parse_formula("q -> q").unwrap())]).apply(m);
            assert!(t_alpha_member(&t, &"aaa".into(), &inst, &h, 1).unwrap());
        }
        let cbc = codec.right_nested(&"cbc".into()).unwrap().formula;
        assert!(!t_alpha_member(&t, &"aaa".into(), &cbc, &h, 1).unwrap());
        assert!(t_alpha_member(&t, &"aaa".into(), &cbc, &h, 2).unwrap());
        assert!(!t_alpha_member(&t, &"aaa".into(), &parse_formula("x -> y -> x").unwrap(), &h, 10).unwrap());
    }

    #[test]
    fn t_alpha_membership_matches_enumeration() {
        // brute force: f is a member iff it is an instance of some code member of a reachable word
        let t = parse_tag_system("d=2\na -> ab\nb -> a").unwrap();
        let h = HatTemplate::identity();
        let codec = WordCodec::new(h.clone(), t.alphabet().clone());
        let alpha = Word::from("ab");
        let reach: Vec<Word> = t.trajectory(&alpha, 3).unwrap();
        let mut probes = Vec::new();
        for len in 1..=4 {
            for w in t.alphabet().words_of_len(len) {
                probes.extend(codec.code_word(&w).unwrap().formulas().cloned());
            }
        }
        for f in &probes {
            let brute = reach
                .iter()
                .filter(|w| w.len() <= 4)
                .any(|w| codec.code_word(w).unwrap().formulas().any(|m| is_instance(f, m)));
            assert_eq!(t_alpha_member(&t, &alpha, f, &h, 3).unwrap(), brute, "{f}");
        }
    }
}
