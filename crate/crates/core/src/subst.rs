use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::formula::{Formula, Kind, Symbol};

/// Finite map from variables to formulas, applied simultaneously.
///
/// Bindings are kept sorted by variable name so traces print deterministically.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Formula>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Formula)>) -> Self {
        let mut s = Substitution::new();
        for (name, f) in pairs {
            s.bind(Symbol::from(name), f);
        }
        s
    }

    /// Adds `var ↦ f`. Identity bindings are dropped.
    pub fn bind(&mut self, var: Symbol, f: Formula) {
        if f.as_var() == Some(&var) {
            self.bindings.remove(&var);
        } else {
            self.bindings.insert(var, f);
        }
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Formula)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> BTreeSet<Symbol> {
        self.bindings.keys().cloned().collect()
    }

    /// Replace every occurrence of a bound variable, all at once.
    pub fn apply(&self, f: &Formula) -> Formula {
        if self.bindings.is_empty() {
            return f.clone();
        }
        let mut memo: HashMap<u64, Formula> = HashMap::new();
        self.apply_memo(f, &mut memo)
    }

    fn apply_memo(&self, f: &Formula, memo: &mut HashMap<u64, Formula>) -> Formula {
        if let Some(done) = memo.get(&f.id()) {
            return done.clone();
        }
        let out = match f.kind() {
            Kind::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| f.clone()),
            Kind::Imp(a, b) => {
                let a2 = self.apply_memo(a, memo);
                let b2 = self.apply_memo(b, memo);
                if &a2 == a && &b2 == b {
                    f.clone()
                } else {
                    Formula::imp(a2, b2)
                }
            }
        };
        memo.insert(f.id(), out.clone());
        out
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, f) in &self.bindings {
            out.bind(v.clone(), other.apply(f));
        }
        for (v, f) in &other.bindings {
            if !self.bindings.contains_key(v) {
                out.bind(v.clone(), f.clone());
            }
        }
        out
    }

    /// Keep only bindings for the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Symbol>) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, f)| (v.clone(), f.clone()))
                .collect(),
        }
    }

    /// True if every bound formula is a variable and no two variables collide.
    pub fn is_renaming(&self) -> bool {
        let mut targets = BTreeSet::new();
        self.bindings
            .values()
            .all(|f| f.as_var().is_some_and(|v| targets.insert(v.clone())))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} := {t}")?;
        }
        f.write_str("}")
    }
}

/// Apply `s` to `f`.
pub fn apply_substitution(s: &Substitution, f: &Formula) -> Formula {
    s.apply(f)
}
