use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{parse_formula, Formula};

/// A finite, ordered, labeled list of axioms closed under modus ponens and substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calculus {
    label: String,
    axioms: Vec<Formula>,
}

impl Calculus {
    pub fn new(label: impl Into<String>, axioms: Vec<Formula>) -> Self {
        Calculus { label: label.into(), axioms }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn axiom(&self, i: usize) -> Option<&Formula> {
        self.axioms.get(i)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// Axioms of `self` followed by those of `other`.
    pub fn union(&self, label: impl Into<String>, other: &Calculus) -> Calculus {
        let mut axioms = self.axioms.clone();
        axioms.extend(other.axioms.iter().cloned());
        Calculus::new(label, axioms)
    }

    pub fn with_axiom(&self, axiom: Formula) -> Calculus {
        let mut axioms = self.axioms.clone();
        axioms.push(axiom);
        Calculus::new(self.label.clone(), axioms)
    }

    pub fn to_json(&self) -> CalculusJson {
        CalculusJson { label: self.label.clone(), axioms: self.axioms.iter().map(|a| a.to_string()).collect() }
    }

    pub fn from_json(json: &CalculusJson) -> Result<Self> {
        let axioms = json.axioms.iter().map(|a| parse_formula(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Calculus::new(json.label.clone(), axioms))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: CalculusJson = serde_json::from_str(text)?;
        Calculus::from_json(&json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("calculus serializes")
    }
}

/// `{"label": "...", "axioms": ["<formula>", ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalculusJson {
    pub label: String,
    pub axioms: Vec<String>,
}

/// `{x → (y → x)}`.
pub fn weakening_calculus() -> Calculus {
    Calculus::new("K", vec![parse_formula("x -> y -> x").expect("static formula")])
}

/// The two-axiom intuitionistic implicational base `{A1, A2}`.
pub fn hilbert_calculus() -> Calculus {
    Calculus::new(
        "Int",
        vec![
            parse_formula("x -> y -> x").expect("static formula"),
            parse_formula("(x -> y -> z) -> (x -> y) -> x -> z").expect("static formula"),
        ],
    )
}

pub(crate) fn schema_error(what: &'static str, message: impl Into<String>) -> Error {
    Error::Schema { what, message: message.into() }
}
