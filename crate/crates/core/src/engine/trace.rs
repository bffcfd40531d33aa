//! Derivation traces and the checking kernel.
//!
//! A trace is a list of steps, each carrying its resulting formula. The
//! checker below only uses substitution application and instance matching;
//! it never calls the unifier, so it stays independent of the search that
//! produced the trace.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{schema_error, Calculus};
use crate::error::Result;
use crate::formula::{parse_formula, Formula};
use crate::subst::Substitution;
use crate::unify::{is_instance, match_instance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// `result = subst(axioms[axiom])`.
    AxiomInstance { axiom: usize, subst: Substitution, result: Formula },
    /// Modus ponens on instances: the major step proves `A → B`, and
    /// `major_subst(A) = minor_subst(minor)`; `result = major_subst(B)`.
    Detachment {
        major: usize,
        minor: usize,
        major_subst: Substitution,
        minor_subst: Substitution,
        result: Formula,
    },
}

impl Step {
    pub fn result(&self) -> &Formula {
        match self {
            Step::AxiomInstance { result, .. } | Step::Detachment { result, .. } => result,
        }
    }

    fn shifted(&self, offset: usize) -> Step {
        match self {
            Step::AxiomInstance { .. } => self.clone(),
            Step::Detachment { major, minor, major_subst, minor_subst, result } => Step::Detachment {
                major: major + offset,
                minor: minor + offset,
                major_subst: major_subst.clone(),
                minor_subst: minor_subst.clone(),
                result: result.clone(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    steps: Vec<Step>,
}

/// Why a trace was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFault {
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for TraceFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

impl DerivationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<Step>) -> Self {
        DerivationTrace { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn steps_mut(&mut self) -> &mut Vec<Step> {
        &mut self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(Step::result)
    }

    /// Index of the new step.
    pub fn push(&mut self, step: Step) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    /// Append all steps of `other`; returns the index `other`'s first step got.
    pub fn append(&mut self, other: &DerivationTrace) -> usize {
        let offset = self.steps.len();
        self.steps.extend(other.steps.iter().map(|s| s.shifted(offset)));
        offset
    }

    /// Single axiom-instance step proving `target`, using the first axiom it is an instance of.
    pub fn axiom_instance(c: &Calculus, target: &Formula) -> Option<DerivationTrace> {
        c.axioms().iter().enumerate().find_map(|(i, a)| {
            match_instance(target, a).map(|subst| DerivationTrace {
                steps: vec![Step::AxiomInstance { axiom: i, subst, result: target.clone() }],
            })
        })
    }

    /// Check every step against `c`.
    pub fn verify(&self, c: &Calculus) -> Result<(), TraceFault> {
        let fault = |step: usize, reason: String| TraceFault { step, reason };
        for (i, step) in self.steps.iter().enumerate() {
            match step {
                Step::AxiomInstance { axiom, subst, result } => {
                    let a = c
                        .axiom(*axiom)
                        .ok_or_else(|| fault(i, format!("axiom index {axiom} out of range")))?;
                    if subst.apply(a) != *result {
                        return Err(fault(i, "result is not the stated instance of the axiom".into()));
                    }
                }
                Step::Detachment { major, minor, major_subst, minor_subst, result } => {
                    if *major >= i || *minor >= i {
                        return Err(fault(i, "detachment must cite earlier steps".into()));
                    }
                    let (a, b) = self.steps[*major]
                        .result()
                        .as_imp()
                        .ok_or_else(|| fault(i, "major premise is not an implication".into()))?;
                    if major_subst.apply(a) != minor_subst.apply(self.steps[*minor].result()) {
                        return Err(fault(i, "minor premise does not match the antecedent".into()));
                    }
                    if major_subst.apply(b) != *result {
                        return Err(fault(i, "result is not the detached consequent".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// True iff every step of `t` is valid in `c` and `claimed` is an instance of its conclusion.
pub fn check_trace(c: &Calculus, t: &DerivationTrace, claimed: &Formula) -> bool {
    t.verify(c).is_ok() && t.conclusion().is_some_and(|last| is_instance(claimed, last))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepJson {
    Axiom {
        axiom: usize,
        subst: BTreeMap<String, String>,
        result: String,
    },
    Detach {
        major: usize,
        minor: usize,
        major_subst: BTreeMap<String, String>,
        minor_subst: BTreeMap<String, String>,
        result: String,
    },
}

/// Trace file: the claimed formula and the ordered steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<String>,
    pub steps: Vec<StepJson>,
}

fn subst_to_json(s: &Substitution) -> BTreeMap<String, String> {
    s.iter().map(|(v, f)| (v.to_string(), f.to_string())).collect()
}

fn subst_from_json(m: &BTreeMap<String, String>) -> Result<Substitution> {
    let mut s = Substitution::new();
    for (v, f) in m {
        if !crate::formula::is_identifier(v) {
            return Err(schema_error("trace", format!("bad variable name `{v}`")));
        }
        s.bind(v.as_str().into(), parse_formula(f)?);
    }
    Ok(s)
}

impl DerivationTrace {
    pub fn to_json(&self, claimed: Option<&Formula>) -> TraceJson {
        TraceJson {
            claimed: claimed.map(|f| f.to_string()),
            steps: self
                .steps
                .iter()
                .map(|s| match s {
                    Step::AxiomInstance { axiom, subst, result } => StepJson::Axiom {
                        axiom: *axiom,
                        subst: subst_to_json(subst),
                        result: result.to_string(),
                    },
                    Step::Detachment { major, minor, major_subst, minor_subst, result } => StepJson::Detach {
                        major: *major,
                        minor: *minor,
                        major_subst: subst_to_json(major_subst),
                        minor_subst: subst_to_json(minor_subst),
                        result: result.to_string(),
                    },
                })
                .collect(),
        }
    }

    /// Parse a trace file; returns the trace and its claimed formula, if any.
    pub fn from_json(json: &TraceJson) -> Result<(DerivationTrace, Option<Formula>)> {
        let mut steps = Vec::with_capacity(json.steps.len());
        for s in &json.steps {
            steps.push(match s {
                StepJson::Axiom { axiom, subst, result } => Step::AxiomInstance {
                    axiom: *axiom,
                    subst: subst_from_json(subst)?,
                    result: parse_formula(result)?,
                },
                StepJson::Detach { major, minor, major_subst, minor_subst, result } => Step::Detachment {
                    major: *major,
                    minor: *minor,
                    major_subst: subst_from_json(major_subst)?,
                    minor_subst: subst_from_json(minor_subst)?,
                    result: parse_formula(result)?,
                },
            });
        }
        let claimed = json.claimed.as_deref().map(parse_formula).transpose()?;
        Ok((DerivationTrace { steps }, claimed))
    }
}
