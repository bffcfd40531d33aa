//! Encoding of letters and words as one-variable implicational formulas.
//!
//! A hat template `x̂` is any formula whose only variable is `x`. On top of it
//! the two-variable combinator
//!
//! ```text
//! a ∘ b := ((b̂ → b̂) → b̂) → (â → ((b̂ → b̂) → b̂))
//! ```
//!
//! is an instance of `x → (y → x)`. Letter `i` is coded as `C_i ∘ p` where
//! `C_i` is the right-nested chain of `i + 1` copies of `p`, and words are
//! glued with `a · b := ((a → a) → a) ∘ b`. A word is coded by the set of all
//! its bracketings.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::formula::{imp_chain, parse_formula, Formula, CODE_VAR};
use crate::subst::Substitution;
use crate::tag::{Alphabet, Word};
use crate::unify::{is_instance, match_instance};

/// Name of the single variable of a hat template.
pub const HAT_VAR: &str = "x";

/// A one-variable formula `x̂` in the variable `x`.
#[derive(Clone, PartialEq, Eq)]
pub struct HatTemplate {
    body: Formula,
}

impl HatTemplate {
    pub fn new(body: Formula) -> Result<Self> {
        let vars = body.variables();
        if vars.len() != 1 || !vars.iter().any(|v| &**v == HAT_VAR) {
            return Err(Error::BadHat(body.to_string()));
        }
        Ok(HatTemplate { body })
    }

    pub fn parse(text: &str) -> Result<Self> {
        HatTemplate::new(parse_formula(text)?)
    }

    /// The bare variable `x`.
    pub fn identity() -> Self {
        HatTemplate { body: Formula::var(HAT_VAR) }
    }

    /// `x`, `x → x`, `x → (x → x)`, … (`count` templates).
    pub fn escalation(count: usize) -> Vec<HatTemplate> {
        let x = Formula::var(HAT_VAR);
        (1..=count)
            .map(|n| HatTemplate { body: imp_chain(&vec![x.clone(); n]) })
            .collect()
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    /// `f̂`: the body with `x` replaced by `f`.
    pub fn at(&self, f: &Formula) -> Formula {
        Substitution::from_pairs([(HAT_VAR, f.clone())]).apply(&self.body)
    }
}

impl Default for HatTemplate {
    fn default() -> Self {
        HatTemplate::identity()
    }
}

impl fmt::Display for HatTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

impl fmt::Debug for HatTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HatTemplate({})", self.body)
    }
}

pub fn hat_at(h: &HatTemplate, f: &Formula) -> Formula {
    h.at(f)
}

fn guard(h: &HatTemplate, b: &Formula) -> Formula {
    let hb = h.at(b);
    Formula::imp(Formula::imp(hb.clone(), hb.clone()), hb)
}

/// `a ∘ b`.
pub fn circ(h: &HatTemplate, a: &Formula, b: &Formula) -> Formula {
    let g = guard(h, b);
    Formula::imp(g.clone(), Formula::imp(h.at(a), g))
}

/// `a ∘ b` built on `x → (F → x)`: the inner antecedent is `F` with every
/// variable replaced by `â`. `F` must not mention `x`.
pub fn circ_general(h: &HatTemplate, filler: &Formula, a: &Formula, b: &Formula) -> Result<Formula> {
    if filler.contains_var(HAT_VAR) {
        return Err(Error::Precondition(format!("filler `{filler}` contains the variable x")));
    }
    let ha = h.at(a);
    let mut s = Substitution::new();
    for v in filler.variables() {
        s.bind(v, ha.clone());
    }
    let g = guard(h, b);
    Ok(Formula::imp(g.clone(), Formula::imp(s.apply(filler), g)))
}

/// `(a → a) → a`, the left half of `a · b`.
fn triple(a: &Formula) -> Formula {
    Formula::imp(Formula::imp(a.clone(), a.clone()), a.clone())
}

/// `a · b`.
pub fn dot(h: &HatTemplate, a: &Formula, b: &Formula) -> Formula {
    circ(h, &triple(a), b)
}

/// Right-nested chain of `i + 1` copies of `p`.
pub fn letter_chain(i: usize, p: &Formula) -> Formula {
    imp_chain(&vec![p.clone(); i + 1])
}

/// Code of the `i`-th letter (1-based).
pub fn code_letter(h: &HatTemplate, i: usize) -> Formula {
    let p = Formula::var(CODE_VAR);
    circ(h, &letter_chain(i, &p), &p)
}

/// How an alphabetic formula is assembled from letter codes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bracketing {
    /// 1-based letter index.
    Letter(usize),
    Dot(Arc<Bracketing>, Arc<Bracketing>),
}

impl Bracketing {
    pub fn dot(a: Bracketing, b: Bracketing) -> Bracketing {
        Bracketing::Dot(Arc::new(a), Arc::new(b))
    }

    pub fn len(&self) -> usize {
        match self {
            Bracketing::Letter(_) => 1,
            Bracketing::Dot(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<usize>) {
        match self {
            Bracketing::Letter(i) => out.push(*i),
            Bracketing::Dot(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
        }
    }

    /// `a1 · (a2 · (… · an))`.
    pub fn right_nested(letters: &[usize]) -> Bracketing {
        let (last, init) = letters.split_last().expect("nonempty");
        init.iter()
            .rev()
            .fold(Bracketing::Letter(*last), |acc, &i| Bracketing::dot(Bracketing::Letter(i), acc))
    }

    pub fn is_right_nested(&self) -> bool {
        match self {
            Bracketing::Letter(_) => true,
            Bracketing::Dot(a, b) => matches!(**a, Bracketing::Letter(_)) && b.is_right_nested(),
        }
    }

    /// Every bracketing of `letters`, split point ascending then recursively.
    pub fn all(letters: &[usize]) -> Vec<Bracketing> {
        let mut memo = HashMap::new();
        all_bracketings(letters, &mut memo)
    }

    /// Infix text over an alphabet, e.g. `(a·c)·e`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        match self {
            Bracketing::Letter(i) => alphabet.letter(*i).map_or_else(|| format!("#{i}"), String::from),
            Bracketing::Dot(a, b) => {
                let side = |x: &Bracketing| match x {
                    Bracketing::Letter(_) => x.display(alphabet),
                    Bracketing::Dot(..) => format!("({})", x.display(alphabet)),
                };
                format!("{}·{}", side(a), side(b))
            }
        }
    }
}

impl fmt::Debug for Bracketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&Alphabet::latin()))
    }
}

fn all_bracketings(letters: &[usize], memo: &mut HashMap<Vec<usize>, Vec<Bracketing>>) -> Vec<Bracketing> {
    if let Some(done) = memo.get(letters) {
        return done.clone();
    }
    let out = if letters.len() == 1 {
        vec![Bracketing::Letter(letters[0])]
    } else {
        let mut v = Vec::new();
        for k in 1..letters.len() {
            let left = all_bracketings(&letters[..k], memo);
            let right = all_bracketings(&letters[k..], memo);
            for l in &left {
                for r in &right {
                    v.push(Bracketing::dot(l.clone(), r.clone()));
                }
            }
        }
        v
    };
    memo.insert(letters.to_vec(), out.clone());
    out
}

/// A formula together with its (unique) parse as an alphabetic formula.
#[derive(Clone, PartialEq, Eq)]
pub struct AlphabeticFormula {
    pub formula: Formula,
    pub parse: Bracketing,
    pub word: Word,
}

impl fmt::Debug for AlphabeticFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlphabeticFormula({:?}, word {})", self.parse, self.word)
    }
}

/// The code of a nonempty word: all of its bracketings.
#[derive(Clone, Debug)]
pub struct WordCode {
    pub word: Word,
    pub members: Vec<AlphabeticFormula>,
}

impl WordCode {
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.members.iter().map(|m| &m.formula)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_json(&self, hat: &HatTemplate) -> WordCodeJson {
        WordCodeJson {
            word: self.word.to_string(),
            hat: hat.to_string(),
            members: self.formulas().map(|f| f.to_string()).collect(),
        }
    }
}

/// `{"word": …, "hat": …, "members": [...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCodeJson {
    pub word: String,
    pub hat: String,
    pub members: Vec<String>,
}

/// Letter and word codes for a fixed hat template and alphabet.
#[derive(Clone, Debug)]
pub struct WordCodec {
    hat: HatTemplate,
    alphabet: Alphabet,
    letters: Vec<Formula>,
    dot_pattern: Formula,
    circ_pattern: Formula,
}

impl WordCodec {
    pub fn new(hat: HatTemplate, alphabet: Alphabet) -> Self {
        let letters = (1..=alphabet.len()).map(|i| code_letter(&hat, i)).collect();
        let (s, t) = (Formula::var("s"), Formula::var("t"));
        let circ_pattern = circ(&hat, &s, &t);
        let dot_pattern = dot(&hat, &s, &t);
        WordCodec { hat, alphabet, letters, dot_pattern, circ_pattern }
    }

    pub fn hat(&self) -> &HatTemplate {
        &self.hat
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letter_code(&self, index: usize) -> Formula {
        self.letters
            .get(index.wrapping_sub(1))
            .cloned()
            .unwrap_or_else(|| code_letter(&self.hat, index))
    }

    pub fn dot(&self, a: &Formula, b: &Formula) -> Formula {
        dot(&self.hat, a, b)
    }

    /// Formula of a bracketing.
    pub fn encode(&self, parse: &Bracketing) -> Formula {
        let mut memo: HashMap<*const Bracketing, Formula> = HashMap::new();
        self.encode_memo(parse, &mut memo)
    }

    fn encode_memo(&self, parse: &Bracketing, memo: &mut HashMap<*const Bracketing, Formula>) -> Formula {
        let key = parse as *const Bracketing;
        if let Some(f) = memo.get(&key) {
            return f.clone();
        }
        let f = match parse {
            Bracketing::Letter(i) => self.letter_code(*i),
            Bracketing::Dot(a, b) => {
                let fa = self.encode_memo(a, memo);
                let fb = self.encode_memo(b, memo);
                self.dot(&fa, &fb)
            }
        };
        memo.insert(key, f.clone());
        f
    }

    pub fn word_of(&self, parse: &Bracketing) -> Word {
        Word::new(
            parse
                .letters()
                .into_iter()
                .map(|i| self.alphabet.letter(i).expect("letter index within alphabet"))
                .collect(),
        )
    }

    pub fn indices(&self, w: &Word) -> Result<Vec<usize>> {
        w.letters().iter().map(|&c| self.alphabet.index_of(c)).collect()
    }

    pub fn alphabetic(&self, parse: Bracketing) -> AlphabeticFormula {
        AlphabeticFormula { formula: self.encode(&parse), word: self.word_of(&parse), parse }
    }

    /// All bracketings of `w`, in canonical order.
    pub fn code_word(&self, w: &Word) -> Result<WordCode> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let idx = self.indices(w)?;
        let members = Bracketing::all(&idx).into_iter().map(|b| self.alphabetic(b)).collect();
        Ok(WordCode { word: w.clone(), members })
    }

    /// `a1 · (a2 · (… · an))` for `w`.
    pub fn right_nested(&self, w: &Word) -> Result<AlphabeticFormula> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(self.alphabetic(Bracketing::right_nested(&self.indices(w)?)))
    }

    /// The unique parse of `f` as an alphabetic formula, if `f` is one.
    pub fn decode(&self, f: &Formula) -> Option<AlphabeticFormula> {
        let (parse, image) = self.decode_instance(f)?;
        if image.as_var().is_some_and(|v| &**v == CODE_VAR) {
            Some(AlphabeticFormula { formula: f.clone(), word: self.word_of(&parse), parse })
        } else {
            None
        }
    }

    /// If `f` is a substitution instance of an alphabetic formula `A`, returns
    /// the parse of `A` and the formula substituted for `p`.
    pub fn decode_instance(&self, f: &Formula) -> Option<(Bracketing, Formula)> {
        let mut memo = HashMap::new();
        self.decode_memo(f, &mut memo)
    }

    fn decode_memo(&self, f: &Formula, memo: &mut HashMap<u64, Option<(Bracketing, Formula)>>) -> Option<(Bracketing, Formula)> {
        if let Some(done) = memo.get(&f.id()) {
            return done.clone();
        }
        let out = self.decode_step(f, memo);
        memo.insert(f.id(), out.clone());
        out
    }

    fn decode_step(&self, f: &Formula, memo: &mut HashMap<u64, Option<(Bracketing, Formula)>>) -> Option<(Bracketing, Formula)> {
        if let Some(s) = match_instance(f, &self.dot_pattern) {
            let left = s.get("s").cloned().unwrap_or_else(|| Formula::var("s"));
            let right = s.get("t").cloned().unwrap_or_else(|| Formula::var("t"));
            let (lp, limg) = self.decode_memo(&left, memo)?;
            let (rp, rimg) = self.decode_memo(&right, memo)?;
            return (limg == rimg).then(|| (Bracketing::dot(lp, rp), limg));
        }
        let s = match_instance(f, &self.circ_pattern)?;
        let chain = s.get("s").cloned().unwrap_or_else(|| Formula::var("s"));
        let image = s.get("t").cloned().unwrap_or_else(|| Formula::var("t"));
        // chain must be image -> (image -> … -> image) with i + 1 copies
        let mut links = 0usize;
        let mut cur = chain;
        while cur != image {
            let (a, b) = cur.as_imp()?;
            if *a != image || links > self.alphabet.len() {
                return None;
            }
            links += 1;
            cur = b.clone();
        }
        (links >= 1 && links <= self.alphabet.len()).then_some((Bracketing::Letter(links), image))
    }
}

/// First candidate `h` such that no axiom of `p0` is an instance of
/// `x ∘ y` or `(x ∘ y) → z` built on `h`.
pub fn choose_hat(p0: &Calculus, candidates: &[HatTemplate]) -> Result<HatTemplate> {
    if candidates.is_empty() {
        return Err(Error::Precondition("no hat template candidates".into()));
    }
    let (x, y, z) = (Formula::var("x"), Formula::var("y"), Formula::var("z"));
    for h in candidates {
        let c = circ(h, &x, &y);
        let cz = Formula::imp(c.clone(), z.clone());
        if p0.axioms().iter().all(|a| !is_instance(a, &c) && !is_instance(a, &cz)) {
            return Ok(h.clone());
        }
    }
    Err(Error::HatExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unify::{unifiable_apart, unify};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn k() -> Formula {
        f("x -> y -> x")
    }

    fn codec() -> WordCodec {
        WordCodec::new(HatTemplate::identity(), Alphabet::latin())
    }

    #[test]
    fn hat_application() {
        assert_eq!(HatTemplate::parse("x -> x").unwrap().at(&f("p")), f("p -> p"));
        assert_eq!(HatTemplate::identity().at(&f("a -> b")), f("a -> b"));
        assert_eq!(HatTemplate::parse("x -> x -> x").unwrap().at(&f("y")), f("y -> y -> y"));
        assert!(HatTemplate::parse("x -> y").is_err());
        assert!(HatTemplate::parse("y").is_err());
    }

    #[test]
    fn circ_with_identity_hat() {
        let h = HatTemplate::identity();
        assert_eq!(circ(&h, &f("x"), &f("y")), f("((y -> y) -> y) -> x -> (y -> y) -> y"));
    }

    #[test]
    fn circ_is_instance_of_k() {
        for h in HatTemplate::escalation(3) {
            assert!(is_instance(&circ(&h, &f("a -> b"), &f("c")), &k()));
        }
    }

    #[test]
    fn circ_and_circ_arrow_z_do_not_unify() {
        let h = HatTemplate::identity();
        let c = circ(&h, &f("x"), &f("y"));
        assert!(unify(&c, &Formula::imp(c.clone(), f("z"))).is_none());
    }

    #[test]
    fn general_circ() {
        let h = HatTemplate::identity();
        // F a variable: same as circ
        assert_eq!(circ_general(&h, &f("y"), &f("a"), &f("b")).unwrap(), circ(&h, &f("a"), &f("b")));
        let g = circ_general(&h, &f("y -> y"), &f("a"), &f("b")).unwrap();
        assert!(match_instance(&g, &f("x -> (y -> y) -> x")).is_some());
        assert_eq!(g, f("((b -> b) -> b) -> (a -> a) -> (b -> b) -> b"));
        assert!(circ_general(&h, &f("x -> y"), &f("a"), &f("b")).is_err());
    }

    #[test]
    fn first_letter_code_by_hand() {
        assert_eq!(code_letter(&HatTemplate::identity(), 1), f("((p -> p) -> p) -> (p -> p) -> (p -> p) -> p"));
    }

    #[test]
    fn distinct_letters_do_not_unify() {
        for h in HatTemplate::escalation(3) {
            for i in 1..=5 {
                assert!(is_instance(&code_letter(&h, i), &k()));
                for j in 1..=5 {
                    if i != j {
                        assert!(!unifiable_apart(&code_letter(&h, i), &code_letter(&h, j)));
                    }
                }
            }
        }
    }

    #[test]
    fn dot_properties() {
        let c = codec();
        let (a, e) = (c.letter_code(1), c.letter_code(5));
        let d = c.dot(&a, &e);
        assert!(is_instance(&d, &k()));
        for i in 1..=6 {
            assert!(!unifiable_apart(&d, &c.letter_code(i)));
        }
        let code = c.code_word(&"ac".into()).unwrap();
        assert_eq!(code.len(), 1);
        assert_eq!(code.members[0].formula, c.dot(&c.letter_code(1), &c.letter_code(3)));
    }

    #[test]
    fn word_code_listings() {
        let c = codec();
        let ace = c.code_word(&"ace".into()).unwrap();
        let shown: Vec<String> = ace.members.iter().map(|m| m.parse.display(c.alphabet())).collect();
        assert_eq!(shown, ["a·(c·e)", "(a·c)·e"]);
        let acec = c.code_word(&"acec".into()).unwrap();
        let shown: Vec<String> = acec.members.iter().map(|m| m.parse.display(c.alphabet())).collect();
        assert_eq!(shown, ["a·(c·(e·c))", "a·((c·e)·c)", "(a·c)·(e·c)", "(a·(c·e))·c", "((a·c)·e)·c"]);
        assert_eq!(c.code_word(&"a".into()).unwrap().len(), 1);
        assert!(matches!(c.code_word(&Word::empty()), Err(Error::EmptyWord)));
    }

    #[test]
    fn decoding() {
        let c = codec();
        let (a, ce, e) = (c.letter_code(1), c.letter_code(3), c.letter_code(5));
        assert_eq!(c.decode(&c.dot(&a, &e)).unwrap().word, Word::from("aeca").slice(0..2));
        let left = c.dot(&c.dot(&a, &e), &c.dot(&ce, &a));
        let right = c.dot(&a, &c.dot(&c.dot(&e, &ce), &a));
        assert_eq!(c.decode(&left).unwrap().word, Word::from("aeca"));
        assert_eq!(c.decode(&right).unwrap().word, Word::from("aeca"));
        assert!(c.decode(&k()).is_none());
        assert!(c.decode(&f("p")).is_none());
    }

    #[test]
    fn decode_instance_recovers_image() {
        let c = codec();
        let code = c.code_word(&"abc".into()).unwrap();
        let s = Substitution::from_pairs([("p", f("q -> r"))]);
        for m in &code.members {
            let (parse, image) = c.decode_instance(&s.apply(&m.formula)).unwrap();
            assert_eq!(parse, m.parse);
            assert_eq!(image, f("q -> r"));
            assert!(c.decode(&s.apply(&m.formula)).is_none());
        }
    }

    #[test]
    fn decoding_with_other_hats() {
        for h in HatTemplate::escalation(3) {
            let c = WordCodec::new(h, Alphabet::first_n(3));
            for m in c.code_word(&"abca".into()).unwrap().members {
                assert_eq!(c.decode(&m.formula).unwrap().parse, m.parse);
            }
        }
    }

    #[test]
    fn hat_selection() {
        let cands = HatTemplate::escalation(2);
        let p0 = Calculus::new("K", vec![k()]);
        assert_eq!(choose_hat(&p0, &cands).unwrap(), HatTemplate::identity());
        let bad = Calculus::new("bad", vec![circ(&HatTemplate::identity(), &f("a"), &f("b"))]);
        assert!(matches!(choose_hat(&bad, &cands[..1]), Err(Error::HatExhausted)));
        assert_eq!(choose_hat(&bad, &cands).unwrap(), cands[1]);
        let empty = Calculus::new("empty", vec![]);
        assert_eq!(choose_hat(&empty, &cands[1..]).unwrap(), cands[1]);
    }
}
