//! Unification, instance matching and renaming.
//!
//! Unification works on the shared node graph with union-find over node
//! classes: classes are merged before their children are visited, so every
//! pair of classes is processed at most once, and the occurs check becomes a
//! cycle check on the class graph after all merges are done.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::formula::{Formula, Kind, Symbol};
use crate::subst::Substitution;

struct Classes {
    nodes: Vec<Formula>,
    index: HashMap<u64, usize>,
    parent: Vec<usize>,
    /// A non-variable member of the class, if any (valid at roots).
    structure: Vec<Option<usize>>,
}

impl Classes {
    fn new(roots: &[&Formula]) -> Self {
        let mut c = Classes { nodes: Vec::new(), index: HashMap::new(), parent: Vec::new(), structure: Vec::new() };
        for r in roots {
            r.for_each_node(|f| {
                if !c.index.contains_key(&f.id()) {
                    let i = c.nodes.len();
                    c.index.insert(f.id(), i);
                    c.nodes.push(f.clone());
                    c.parent.push(i);
                    c.structure.push(if f.is_var() { None } else { Some(i) });
                }
            });
        }
        c
    }

    fn idx(&self, f: &Formula) -> usize {
        self.index[&f.id()]
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn children(&self, i: usize) -> (usize, usize) {
        let (a, b) = self.nodes[i].as_imp().expect("structure node is an implication");
        (self.idx(a), self.idx(b))
    }

    fn merge_all(&mut self, a: usize, b: usize) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((i, j)) = stack.pop() {
            let (ri, rj) = (self.find(i), self.find(j));
            if ri == rj {
                continue;
            }
            let (si, sj) = (self.structure[ri], self.structure[rj]);
            self.parent[rj] = ri;
            self.structure[ri] = si.or(sj);
            if let (Some(ti), Some(tj)) = (si, sj) {
                let (li, ri2) = self.children(ti);
                let (lj, rj2) = self.children(tj);
                stack.push((ri2, rj2));
                stack.push((li, lj));
            }
        }
        true
    }

    /// False if the class graph has a cycle (a variable would contain itself).
    fn acyclic(&mut self) -> bool {
        let n = self.nodes.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        for start in 0..n {
            let root = self.find(start);
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, u8)> = vec![(root, 0)];
            state[root] = 1;
            while let Some((r, phase)) = stack.pop() {
                let Some(t) = self.structure[r] else {
                    state[r] = 2;
                    continue;
                };
                let (l, rr) = self.children(t);
                let kids = [self.find(l), self.find(rr)];
                if (phase as usize) < kids.len() {
                    stack.push((r, phase + 1));
                    let k = kids[phase as usize];
                    match state[k] {
                        1 => return false,
                        0 => {
                            state[k] = 1;
                            stack.push((k, 0));
                        }
                        _ => {}
                    }
                } else {
                    state[r] = 2;
                }
            }
        }
        true
    }

    fn build(&mut self, i: usize, reps: &HashMap<usize, Symbol>, memo: &mut HashMap<usize, Formula>) -> Formula {
        let r = self.find(i);
        if let Some(done) = memo.get(&r) {
            return done.clone();
        }
        let out = match self.structure[r] {
            None => Formula::var_sym(&reps[&r]),
            Some(t) => {
                let (l, rr) = self.children(t);
                let a = self.build(l, reps, memo);
                let b = self.build(rr, reps, memo);
                Formula::imp(a, b)
            }
        };
        memo.insert(r, out.clone());
        out
    }
}

/// Most general unifier of `a` and `b`, taking both verbatim (shared variable
/// names denote the same variable). Bindings are idempotent.
pub fn unify(a: &Formula, b: &Formula) -> Option<Substitution> {
    unify_all(&[(a.clone(), b.clone())])
}

/// Simultaneous most general unifier of several equations.
pub fn unify_all(pairs: &[(Formula, Formula)]) -> Option<Substitution> {
    let roots: Vec<&Formula> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
    let mut classes = Classes::new(&roots);
    for (a, b) in pairs {
        let (i, j) = (classes.idx(a), classes.idx(b));
        classes.merge_all(i, j);
    }
    if !classes.acyclic() {
        return None;
    }
    // A variable-only class is represented by its smallest variable name.
    let mut reps: HashMap<usize, Symbol> = HashMap::new();
    let var_nodes: Vec<usize> = (0..classes.nodes.len()).filter(|&i| classes.nodes[i].is_var()).collect();
    for &i in &var_nodes {
        let r = classes.find(i);
        let name = classes.nodes[i].as_var().expect("variable").clone();
        reps.entry(r).and_modify(|cur| if name < *cur { *cur = name.clone() }).or_insert(name);
    }
    let mut memo = HashMap::new();
    let mut s = Substitution::new();
    for i in var_nodes {
        let value = classes.build(i, &reps, &mut memo);
        let name = classes.nodes[i].as_var().expect("variable").clone();
        s.bind(name, value);
    }
    Some(s)
}

/// `Some(s)` with `s(pattern) == candidate`, binding only variables of `pattern`.
/// Variables of `candidate` are treated as constants.
pub fn match_instance(candidate: &Formula, pattern: &Formula) -> Option<Substitution> {
    let mut bindings: HashMap<Symbol, Formula> = HashMap::new();
    if !match_into(candidate, pattern, &mut bindings) {
        return None;
    }
    let mut s = Substitution::new();
    for (v, f) in bindings {
        s.bind(v, f);
    }
    Some(s)
}

/// Extend `bindings` so that `pattern` maps to `candidate`.
pub(crate) fn match_into(candidate: &Formula, pattern: &Formula, bindings: &mut HashMap<Symbol, Formula>) -> bool {
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut stack = vec![(pattern.clone(), candidate.clone())];
    while let Some((p, c)) = stack.pop() {
        if !seen.insert((p.id(), c.id())) {
            continue;
        }
        match p.kind() {
            Kind::Var(v) => match bindings.get(v) {
                Some(bound) if *bound != c => return false,
                Some(_) => {}
                None => {
                    bindings.insert(v.clone(), c.clone());
                }
            },
            Kind::Imp(p1, p2) => {
                let Some((c1, c2)) = c.as_imp() else { return false };
                stack.push((p2.clone(), c2.clone()));
                stack.push((p1.clone(), c1.clone()));
            }
        }
    }
    true
}

pub fn is_instance(candidate: &Formula, pattern: &Formula) -> bool {
    let mut bindings = HashMap::new();
    match_into(candidate, pattern, &mut bindings)
}

/// Name of the `n`-th canonical variable (1-based).
pub fn canonical_name(n: usize) -> String {
    format!("v{n}")
}

/// Rename variables to `v1, v2, …` in order of first occurrence.
pub fn canonical_rename(f: &Formula) -> Formula {
    canonical_renaming(f).apply(f)
}

pub fn canonical_renaming(f: &Formula) -> Substitution {
    let mut s = Substitution::new();
    for (i, v) in f.variables_in_order().into_iter().enumerate() {
        s.bind(v, Formula::var(&canonical_name(i + 1)));
    }
    s
}

/// True iff each formula is a renaming of the other.
pub fn alpha_equal(a: &Formula, b: &Formula) -> bool {
    a == b || canonical_rename(a) == canonical_rename(b)
}

/// First names of the form `{stem}{n}` not in `avoid`.
pub fn fresh_names(stem: &str, count: usize, avoid: &BTreeSet<Symbol>) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(count);
    let mut n = 1usize;
    while out.len() < count {
        let name: Symbol = Symbol::from(format!("{stem}{n}"));
        if !avoid.contains(&name) {
            out.push(name);
        }
        n += 1;
    }
    out
}

/// Renaming that moves the variables of `f` away from `avoid`.
pub fn renaming_apart(f: &Formula, avoid: &BTreeSet<Symbol>) -> Substitution {
    let vars = f.variables_in_order();
    let mut blocked = avoid.clone();
    blocked.extend(vars.iter().cloned());
    let fresh = fresh_names("w", vars.len(), &blocked);
    let mut s = Substitution::new();
    for (v, n) in vars.into_iter().zip(fresh) {
        s.bind(v, Formula::var_sym(&n));
    }
    s
}

/// Unify `a` with a copy of `b` whose variables are renamed away from `a`.
/// Returns the unifier together with the renamed copy of `b`.
pub fn unify_apart(a: &Formula, b: &Formula) -> Option<(Substitution, Formula)> {
    let b2 = renaming_apart(b, &a.variables()).apply(b);
    unify(a, &b2).map(|s| (s, b2))
}

/// True iff `a` and `b` have a common instance once their variables are kept apart.
pub fn unifiable_apart(a: &Formula, b: &Formula) -> bool {
    unify_apart(a, b).is_some()
}
