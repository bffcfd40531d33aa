//! Level saturation under condensed detachment.
//!
//! The substitution rule makes every closure level infinite, so a level is
//! represented by finitely many most general generators: a formula belongs to
//! the level iff it is an instance of some generator. Level `n + 1` adds the
//! condensed detachments of all pairs of level-`n` generators.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::trace::{DerivationTrace, Step};
use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::formula::{Formula, Kind, Symbol};
use crate::subst::Substitution;
use crate::unify::{canonical_rename, canonical_renaming, is_instance, renaming_apart, unify};

pub const DEFAULT_GENERATOR_CAP: usize = 50_000;

/// Environment variable that overrides the generator cap.
pub const GENERATOR_CAP_ENV: &str = "TAGFORGE_GENERATOR_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    /// Maximum number of generators; exceeding it is an error.
    pub generator_cap: usize,
    /// Drop new generators that are instances of retained ones.
    pub subsumption: bool,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { generator_cap: DEFAULT_GENERATOR_CAP, subsumption: true }
    }
}

impl ClosureConfig {
    /// Defaults, with the cap taken from `TAGFORGE_GENERATOR_CAP` when set.
    pub fn from_env() -> Self {
        let mut config = ClosureConfig::default();
        if let Some(cap) = std::env::var(GENERATOR_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            config.generator_cap = cap;
        }
        config
    }
}

/// Result of one condensed detachment with the substitutions that justify it.
#[derive(Clone, Debug)]
pub struct Detachment {
    pub result: Formula,
    pub major_subst: Substitution,
    pub minor_subst: Substitution,
}

/// Cheap necessary condition for unifiability: no constructor clash near the root.
fn may_unify(a: &Formula, b: &Formula, depth: u32) -> bool {
    if depth == 0 {
        return true;
    }
    match (a.kind(), b.kind()) {
        (Kind::Imp(a1, a2), Kind::Imp(b1, b2)) => may_unify(a1, b1, depth - 1) && may_unify(a2, b2, depth - 1),
        _ => true,
    }
}

/// Modus ponens with most general unification. The minor premise is renamed
/// apart from the major; the consequent comes back canonically renamed.
pub fn condensed_detach_full(major: &Formula, minor: &Formula) -> Option<Detachment> {
    let (antecedent, consequent) = major.as_imp()?;
    if !may_unify(antecedent, minor, 6) {
        return None;
    }
    let major_vars: BTreeSet<Symbol> = major.variables();
    let minor_vars: BTreeSet<Symbol> = minor.variables();
    let apart = renaming_apart(minor, &major_vars);
    let minor2 = apart.apply(minor);
    let mgu = unify(antecedent, &minor2)?;
    let raw = mgu.apply(consequent);
    let canon = canonical_renaming(&raw);
    let result = canon.apply(&raw);
    let major_subst = mgu.then(&canon).restrict(&major_vars);
    let minor_subst = apart.then(&mgu).then(&canon).restrict(&minor_vars);
    Some(Detachment { result, major_subst, minor_subst })
}

pub fn condensed_detach(major: &Formula, minor: &Formula) -> Option<Formula> {
    condensed_detach_full(major, minor).map(|d| d.result)
}

#[derive(Clone, Debug)]
enum Origin {
    Axiom(usize),
    Detach { major: usize, minor: usize, major_subst: Substitution, minor_subst: Substitution },
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub formula: Formula,
    /// First level at which this generator appears.
    pub level: usize,
    origin: Origin,
}

/// Generators of the closure levels `0..=level()` of a calculus.
#[derive(Clone, Debug)]
pub struct ClosureLevel {
    calculus: Calculus,
    config: ClosureConfig,
    generators: Vec<Generator>,
    /// `level_start[n]` is the index of the first generator added at level `n`.
    level_start: Vec<usize>,
    seen: HashSet<Formula>,
}

impl ClosureLevel {
    /// Level 0: the axioms.
    pub fn new(c: &Calculus, config: ClosureConfig) -> Self {
        let generators: Vec<Generator> = c
            .axioms()
            .iter()
            .enumerate()
            .map(|(i, a)| Generator { formula: a.clone(), level: 0, origin: Origin::Axiom(i) })
            .collect();
        let seen = c.axioms().iter().map(canonical_rename).collect();
        ClosureLevel { calculus: c.clone(), config, generators, level_start: vec![0], seen }
    }

    pub fn calculus(&self) -> &Calculus {
        &self.calculus
    }

    pub fn level(&self) -> usize {
        self.level_start.len() - 1
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.generators.iter().map(|g| &g.formula)
    }

    /// Generators present at level `n` (for `n ≤ level()`).
    pub fn up_to(&self, n: usize) -> &[Generator] {
        let end = self.level_start.get(n + 1).copied().unwrap_or(self.generators.len());
        &self.generators[..end]
    }

    /// Generators first added at level `n`.
    pub fn added_at(&self, n: usize) -> &[Generator] {
        let start = self.level_start.get(n).copied().unwrap_or(self.generators.len());
        let end = self.level_start.get(n + 1).copied().unwrap_or(self.generators.len());
        &self.generators[start..end]
    }

    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.level() < n {
            self.advance()?;
        }
        Ok(())
    }

    /// Compute the next level.
    pub fn advance(&mut self) -> Result<()> {
        let next_level = self.level() + 1;
        let start = self.level_start[self.level()];
        let end = self.generators.len();
        let gens = &self.generators;
        let candidates: Vec<(usize, usize, Detachment)> = (0..end)
            .into_par_iter()
            .flat_map_iter(|i| {
                let lo = if i >= start { 0 } else { start };
                (lo..end).filter_map(move |j| {
                    condensed_detach_full(&gens[i].formula, &gens[j].formula).map(|d| (i, j, d))
                })
            })
            .collect();

        self.level_start.push(end);
        for (major, minor, d) in candidates {
            if self.seen.contains(&d.result) {
                continue;
            }
            if self.config.subsumption && self.subsumed(&d.result) {
                continue;
            }
            self.seen.insert(d.result.clone());
            self.generators.push(Generator {
                formula: d.result,
                level: next_level,
                origin: Origin::Detach { major, minor, major_subst: d.major_subst, minor_subst: d.minor_subst },
            });
            if self.generators.len() > self.config.generator_cap {
                return Err(Error::GeneratorCap { cap: self.config.generator_cap, level: next_level });
            }
        }
        Ok(())
    }

    fn subsumed(&self, f: &Formula) -> bool {
        let depth = f.depth();
        let test = |g: &Generator| g.formula.depth() <= depth && is_instance(f, &g.formula);
        if self.generators.len() > 512 {
            self.generators.par_iter().any(test)
        } else {
            self.generators.iter().any(test)
        }
    }

    /// First generator (within level `max_level`) that has `goal` as an instance.
    pub fn find_instance_of(&self, goal: &Formula, max_level: usize) -> Option<usize> {
        self.up_to(max_level).iter().position(|g| is_instance(goal, &g.formula))
    }

    /// Derivation of generator `index` from the axioms.
    pub fn trace(&self, index: usize) -> DerivationTrace {
        let mut trace = DerivationTrace::new();
        let mut placed: HashMap<usize, usize> = HashMap::new();
        self.emit(index, &mut trace, &mut placed);
        trace
    }

    fn emit(&self, index: usize, trace: &mut DerivationTrace, placed: &mut HashMap<usize, usize>) -> usize {
        if let Some(&at) = placed.get(&index) {
            return at;
        }
        let g = &self.generators[index];
        let step = match &g.origin {
            Origin::Axiom(i) => Step::AxiomInstance { axiom: *i, subst: Substitution::new(), result: g.formula.clone() },
            Origin::Detach { major, minor, major_subst, minor_subst } => {
                let major_at = self.emit(*major, trace, placed);
                let minor_at = self.emit(*minor, trace, placed);
                Step::Detachment {
                    major: major_at,
                    minor: minor_at,
                    major_subst: major_subst.clone(),
                    minor_subst: minor_subst.clone(),
                    result: g.formula.clone(),
                }
            }
        };
        let at = trace.push(step);
        placed.insert(index, at);
        at
    }
}

/// Closure of `c` up to level `n`, with the default configuration.
pub fn closure_level(c: &Calculus, n: usize) -> Result<ClosureLevel> {
    closure_level_with(c, n, ClosureConfig::default())
}

pub fn closure_level_with(c: &Calculus, n: usize, config: ClosureConfig) -> Result<ClosureLevel> {
    let mut closure = ClosureLevel::new(c, config);
    closure.extend_to(n)?;
    Ok(closure)
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// `goal` is an instance of the conclusion of `trace`, found at `level`.
    Derivable { level: usize, trace: DerivationTrace },
    /// Inconclusive: nothing found up to `depth`.
    NotFoundWithinBudget { depth: usize },
}

impl Verdict {
    pub fn is_derivable(&self) -> bool {
        matches!(self, Verdict::Derivable { .. })
    }

    pub fn trace(&self) -> Option<&DerivationTrace> {
        match self {
            Verdict::Derivable { trace, .. } => Some(trace),
            Verdict::NotFoundWithinBudget { .. } => None,
        }
    }
}

/// Search levels `0..=depth` for a generator that has `goal` as an instance.
pub fn derives(c: &Calculus, goal: &Formula, depth: usize) -> Result<Verdict> {
    let mut closure = ClosureLevel::new(c, ClosureConfig::default());
    derives_in(&mut closure, goal, depth)
}

/// Like [`derives`], reusing (and extending) an existing closure.
pub fn derives_in(closure: &mut ClosureLevel, goal: &Formula, depth: usize) -> Result<Verdict> {
    for level in 0..=depth {
        closure.extend_to(level)?;
        let from = if level == 0 { 0 } else { closure.level_start[level] };
        let to = closure.up_to(level).len();
        if let Some(i) = (from..to).find(|&i| is_instance(goal, &closure.generators[i].formula)) {
            return Ok(Verdict::Derivable { level, trace: closure.trace(i) });
        }
    }
    Ok(Verdict::NotFoundWithinBudget { depth })
}
