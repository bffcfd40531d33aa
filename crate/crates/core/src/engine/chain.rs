//! Chain proofs `P ⊢ A ⇒ B` and small proof-building helpers.

use super::trace::{check_trace, DerivationTrace, Step};
use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::formula::{parse_formula, Formula};
use crate::subst::Substitution;
use crate::unify::match_instance;

/// Waypoints `C0, …, Cn` with, for each `i`, a trace whose conclusion has
/// `Ci → Ci+1` as an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainProof {
    waypoints: Vec<Formula>,
    links: Vec<DerivationTrace>,
}

impl ChainProof {
    /// The empty chain from `start` to itself.
    pub fn start(start: Formula) -> Self {
        ChainProof { waypoints: vec![start], links: Vec::new() }
    }

    pub fn from_parts(waypoints: Vec<Formula>, links: Vec<DerivationTrace>) -> Self {
        ChainProof { waypoints, links }
    }

    pub fn waypoints(&self) -> &[Formula] {
        &self.waypoints
    }

    pub fn links(&self) -> &[DerivationTrace] {
        &self.links
    }

    pub fn links_mut(&mut self) -> &mut Vec<DerivationTrace> {
        &mut self.links
    }

    pub fn first(&self) -> &Formula {
        &self.waypoints[0]
    }

    pub fn last(&self) -> &Formula {
        self.waypoints.last().expect("chain has a start")
    }

    /// Number of links.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn push(&mut self, next: Formula, link: DerivationTrace) {
        self.waypoints.push(next);
        self.links.push(link);
    }

    /// Append `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: ChainProof) {
        assert_eq!(self.last(), other.first(), "chains must meet");
        self.waypoints.extend(other.waypoints.into_iter().skip(1));
        self.links.extend(other.links);
    }
}

/// True iff every link validates in `c`.
pub fn chain_check(c: &Calculus, p: &ChainProof) -> bool {
    !p.waypoints.is_empty()
        && p.links.len() + 1 == p.waypoints.len()
        && p.links.iter().zip(p.waypoints.windows(2)).all(|(link, pair)| {
            check_trace(c, link, &Formula::imp(pair[0].clone(), pair[1].clone()))
        })
}

/// One-step link `from → to` as an instance of the first matching axiom.
pub fn axiom_link(c: &Calculus, from: &Formula, to: &Formula) -> Option<DerivationTrace> {
    DerivationTrace::axiom_instance(c, &Formula::imp(from.clone(), to.clone()))
}

/// Index and matching substitution of the first axiom of `c` that has `x → (y → x)` as an instance.
fn weakening_axiom(c: &Calculus) -> Option<(usize, Substitution)> {
    let k = parse_formula("x -> y -> x").expect("static formula");
    c.axioms().iter().enumerate().find_map(|(i, a)| match_instance(&k, a).map(|s| (i, s)))
}

/// From a trace of `derivable` (its conclusion has `derivable` as an
/// instance), build a trace of `antecedent → derivable`:
/// the instance `derivable → (antecedent → derivable)` of weakening, then
/// one detachment.
pub fn derive_weakening(
    c: &Calculus,
    derivable: &Formula,
    trace: &DerivationTrace,
    antecedent: &Formula,
) -> Result<DerivationTrace> {
    let (axiom, to_k) = weakening_axiom(c)
        .ok_or_else(|| Error::Precondition(format!("calculus `{}` has no axiom generalizing x -> y -> x", c.label())))?;
    let conclusion = trace
        .conclusion()
        .ok_or_else(|| Error::Precondition("empty trace for the weakened formula".into()))?;
    let minor_subst = match_instance(derivable, conclusion)
        .ok_or_else(|| Error::Precondition("trace does not conclude the weakened formula".into()))?;

    let target = Formula::imp(antecedent.clone(), derivable.clone());
    let instance = Formula::imp(derivable.clone(), target.clone());
    let axiom_vars = c.axioms()[axiom].variables();
    let subst = to_k
        .then(&Substitution::from_pairs([("x", derivable.clone()), ("y", antecedent.clone())]))
        .restrict(&axiom_vars);
    debug_assert_eq!(subst.apply(&c.axioms()[axiom]), instance);

    let mut out = trace.clone();
    let minor = out.len() - 1;
    let major = out.push(Step::AxiomInstance { axiom, subst, result: instance });
    out.push(Step::Detachment { major, minor, major_subst: Substitution::new(), minor_subst, result: target });
    Ok(out)
}

/// Turn a derivation of (a generalization of) `C0` plus a chain `C0 ⇒ Cn`
/// into a derivation of `Cn` by one detachment per link.
pub fn chain_to_trace(start: &DerivationTrace, chain: &ChainProof) -> Result<DerivationTrace> {
    let first = start
        .conclusion()
        .ok_or_else(|| Error::Precondition("empty start trace".into()))?;
    let mut minor_subst = match_instance(chain.first(), first)
        .ok_or_else(|| Error::Precondition("start trace does not conclude the first waypoint".into()))?;
    let mut out = start.clone();
    let mut minor = out.len() - 1;
    for (link, pair) in chain.links().iter().zip(chain.waypoints().windows(2)) {
        let offset = out.append(link);
        let major = out.len() - 1;
        debug_assert!(major >= offset);
        let wanted = Formula::imp(pair[0].clone(), pair[1].clone());
        let link_conclusion = link
            .conclusion()
            .ok_or_else(|| Error::Precondition("empty link".into()))?;
        let major_subst = match_instance(&wanted, link_conclusion)
            .ok_or_else(|| Error::Precondition("link does not conclude its waypoint pair".into()))?;
        minor = out.push(Step::Detachment {
            major,
            minor,
            major_subst,
            minor_subst,
            result: pair[1].clone(),
        });
        minor_subst = Substitution::new();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::weakening_calculus;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn empty_chain_checks() {
        let c = weakening_calculus();
        assert!(chain_check(&c, &ChainProof::start(f("a -> b"))));
    }

    #[test]
    fn corrupted_link_fails() {
        let c = weakening_calculus();
        let (a, b) = (f("q"), f("r -> q"));
        let link = axiom_link(&c, &a, &b).unwrap();
        let mut chain = ChainProof::start(a.clone());
        chain.push(b.clone(), link);
        assert!(chain_check(&c, &chain));
        let mut bad = chain.clone();
        if let Step::AxiomInstance { subst, .. } = &mut bad.links_mut()[0].steps_mut()[0] {
            *subst = Substitution::from_pairs([("x", f("s"))]);
        }
        assert!(!chain_check(&c, &bad));
        // a waypoint that the link does not justify
        let wrong = ChainProof::from_parts(vec![a, f("r -> r")], chain.links().to_vec());
        assert!(!chain_check(&c, &wrong));
    }

    #[test]
    fn weakening_trace() {
        let c = weakening_calculus();
        let d = f("(a -> a) -> b -> a -> a");
        let base = DerivationTrace::axiom_instance(&c, &d).unwrap();
        let t = derive_weakening(&c, &d, &base, &f("e")).unwrap();
        assert_eq!(t.len(), 3);
        assert!(check_trace(&c, &t, &f("e -> (a -> a) -> b -> a -> a")));
        // degenerate antecedent = derivable
        let t = derive_weakening(&c, &d, &base, &d).unwrap();
        assert!(check_trace(&c, &t, &Formula::imp(d.clone(), d.clone())));
        assert!(derive_weakening(&Calculus::new("empty", vec![]), &d, &base, &d).is_err());
    }

    #[test]
    fn weakening_through_a_renamed_axiom() {
        let c = Calculus::new("K'", vec![f("a -> b -> a")]);
        let d = f("q -> r -> q");
        let base = DerivationTrace::axiom_instance(&c, &d).unwrap();
        let t = derive_weakening(&c, &d, &base, &f("s")).unwrap();
        assert!(check_trace(&c, &t, &f("s -> q -> r -> q")));
    }

    #[test]
    fn chain_becomes_derivation() {
        let c = weakening_calculus().with_axiom(f("q"));
        let start = DerivationTrace::axiom_instance(&c, &f("q")).unwrap();
        let mut chain = ChainProof::start(f("q"));
        chain.push(f("r -> q"), axiom_link(&c, &f("q"), &f("r -> q")).unwrap());
        chain.push(f("s -> r -> q"), axiom_link(&c, &f("r -> q"), &f("s -> r -> q")).unwrap());
        assert!(chain_check(&c, &chain));
        let t = chain_to_trace(&start, &chain).unwrap();
        assert!(check_trace(&c, &t, &f("s -> r -> q")));
    }
}
