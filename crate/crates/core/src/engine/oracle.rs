//! Literal level computation over a finite substitution pool.
//!
//! Level `n + 1` is level `n`, plus every modus ponens consequent of two
//! level-`n` members, plus every instance of a level-`n` member under a
//! substitution that sends each variable either to itself or to a pool
//! formula. Used only to cross-check the condensed representation.

use std::collections::BTreeSet;

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::subst::Substitution;

pub const DEFAULT_ORACLE_BUDGET: usize = 200_000;

pub fn naive_closure_oracle(c: &Calculus, n: usize, pool: &[Formula]) -> Result<BTreeSet<Formula>> {
    naive_closure_oracle_with(c, n, pool, DEFAULT_ORACLE_BUDGET)
}

pub fn naive_closure_oracle_with(c: &Calculus, n: usize, pool: &[Formula], budget: usize) -> Result<BTreeSet<Formula>> {
    let mut current: BTreeSet<Formula> = c.axioms().iter().cloned().collect();
    for _ in 0..n {
        let mut next = current.clone();
        for major in &current {
            if let Some((a, b)) = major.as_imp() {
                if current.contains(a) {
                    next.insert(b.clone());
                }
            }
        }
        for f in &current {
            for inst in pool_instances(f, pool) {
                next.insert(inst);
                if next.len() > budget {
                    return Err(Error::OracleBudget(budget));
                }
            }
        }
        current = next;
    }
    Ok(current)
}

fn pool_instances(f: &Formula, pool: &[Formula]) -> Vec<Formula> {
    let vars: Vec<_> = f.variables_in_order();
    let choices = pool.len() + 1;
    let total = choices.checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for code in 0..total.min(1 << 20) {
        let mut s = Substitution::new();
        let mut rest = code;
        for v in &vars {
            let pick = rest % choices;
            rest /= choices;
            if pick > 0 {
                s.bind(v.clone(), pool[pick - 1].clone());
            }
        }
        out.push(s.apply(f));
    }
    out
}
