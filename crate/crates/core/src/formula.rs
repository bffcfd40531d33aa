//! Implicational formulas.
//!
//! Formulas are hash-consed: two structurally equal formulas alive at the same
//! time share one node, so equality is a pointer comparison and every
//! traversal can be memoized per node. This matters because the word codes
//! nest each subformula up to six times, so their tree size grows
//! exponentially with word length while the node graph stays linear.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use crate::error::ParseError;

/// Variable name.
pub type Symbol = Arc<str>;

/// Variable reserved for letter codes.
pub const CODE_VAR: &str = "p";

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Var(Symbol),
    Imp(u64, u64),
}

const SHARDS: usize = 64;

struct Interner {
    shards: Vec<Mutex<HashMap<Key, Weak<Node>>>>,
}

fn interner() -> &'static Interner {
    static INTERNER: OnceLock<Interner> = OnceLock::new();
    INTERNER.get_or_init(|| Interner {
        shards: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
    })
}

fn shard_of(key: &Key) -> usize {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    (h.finish() as usize) % SHARDS
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// The two shapes a formula can take.
#[derive(Debug)]
pub enum Kind {
    Var(Symbol),
    Imp(Formula, Formula),
}

struct Node {
    id: u64,
    kind: Kind,
    /// Tree size (number of symbol occurrences), saturating.
    size: u64,
    depth: u32,
}

impl Node {
    fn key(&self) -> Key {
        match &self.kind {
            Kind::Var(name) => Key::Var(name.clone()),
            Kind::Imp(a, b) => Key::Imp(a.id(), b.id()),
        }
    }
}

impl Drop for Node {
    fn drop(&mut self) {
        let key = self.key();
        let me = self as *const Node;
        let mut shard = interner().shards[shard_of(&key)]
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        if let Some(weak) = shard.get(&key) {
            if std::ptr::eq(weak.as_ptr(), me) {
                shard.remove(&key);
            }
        }
    }
}

/// An implicational formula: a variable or `A -> B`.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl Formula {
    fn intern(key: Key, make: impl FnOnce() -> Kind) -> Formula {
        let shard = &interner().shards[shard_of(&key)];
        let mut map = shard.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(existing) = map.get(&key).and_then(Weak::upgrade) {
            return Formula(existing);
        }
        let kind = make();
        let (size, depth) = match &kind {
            Kind::Var(_) => (1, 0),
            Kind::Imp(a, b) => (
                a.size().saturating_add(b.size()).saturating_add(1),
                a.depth().max(b.depth()) + 1,
            ),
        };
        let node = Arc::new(Node {
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
            kind,
            size,
            depth,
        });
        map.insert(key, Arc::downgrade(&node));
        drop(map);
        Formula(node)
    }

    pub fn var(name: &str) -> Formula {
        let sym: Symbol = Arc::from(name);
        Formula::intern(Key::Var(sym.clone()), || Kind::Var(sym))
    }

    pub fn var_sym(name: &Symbol) -> Formula {
        Formula::intern(Key::Var(name.clone()), || Kind::Var(name.clone()))
    }

    pub fn imp(antecedent: Formula, consequent: Formula) -> Formula {
        let key = Key::Imp(antecedent.id(), consequent.id());
        Formula::intern(key, || Kind::Imp(antecedent, consequent))
    }

    /// Unique id of the shared node; stable for the lifetime of the formula.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn as_var(&self) -> Option<&Symbol> {
        match &self.0.kind {
            Kind::Var(v) => Some(v),
            Kind::Imp(..) => None,
        }
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match &self.0.kind {
            Kind::Imp(a, b) => Some((a, b)),
            Kind::Var(_) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.as_var().is_some()
    }

    /// Number of symbol occurrences in the tree (saturates at `u64::MAX`).
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// Visit every distinct node once, parents before children, left before right.
    pub fn for_each_node(&self, mut visit: impl FnMut(&Formula)) {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.id()) {
                continue;
            }
            visit(&f);
            if let Kind::Imp(a, b) = f.kind() {
                stack.push(b.clone());
                stack.push(a.clone());
            }
        }
    }

    /// Variables in order of first occurrence, reading left to right.
    pub fn variables_in_order(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut names = HashSet::new();
        self.for_each_node(|f| {
            if let Some(v) = f.as_var() {
                if names.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.variables_in_order().into_iter().collect()
    }

    pub fn contains_var(&self, name: &str) -> bool {
        let mut found = false;
        self.for_each_node(|f| {
            if f.as_var().is_some_and(|v| &**v == name) {
                found = true;
            }
        });
        found
    }

    /// Number of distinct nodes in the shared graph.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.for_each_node(|_| n += 1);
        n
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl Ord for Formula {
    /// Structural order: variables before implications, variables by name,
    /// implications lexicographically. Equal formulas share a node, so the
    /// walk only descends along one path.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            if a == b {
                return Ordering::Equal;
            }
            let next = match (a.kind(), b.kind()) {
                (Kind::Var(x), Kind::Var(y)) => return x.cmp(y),
                (Kind::Var(_), Kind::Imp(..)) => return Ordering::Less,
                (Kind::Imp(..), Kind::Var(_)) => return Ordering::Greater,
                (Kind::Imp(a1, a2), Kind::Imp(b1, b2)) => {
                    if a1 != b1 {
                        (a1.clone(), b1.clone())
                    } else {
                        (a2.clone(), b2.clone())
                    }
                }
            };
            a = next.0;
            b = next.1;
        }
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, false)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

fn write_formula(formula: &Formula, out: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
    match formula.kind() {
        Kind::Var(name) => out.write_str(name),
        Kind::Imp(a, b) => {
            if parens {
                out.write_str("(")?;
            }
            write_formula(a, out, a.as_imp().is_some())?;
            out.write_str(" -> ")?;
            write_formula(b, out, false)?;
            if parens {
                out.write_str(")")?;
            }
            Ok(())
        }
    }
}

/// Render with minimal parentheses; `->` associates to the right.
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Arrow,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                tokens.push((i, Token::Arrow));
                i += 2;
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    // formula := atom | atom "->" formula
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            atoms.push(self.atom()?);
        }
        let mut acc = atoms.pop().expect("at least one atom");
        while let Some(a) = atoms.pop() {
            acc = Formula::imp(a, acc);
        }
        Ok(acc)
    }

    // atom := ident | "(" formula ")"
    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::var(&name))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(ParseError::new(self.offset(), "expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Arrow) => Err(ParseError::new(at, "expected a variable or `(`, found `->`")),
            Some(Token::RParen) => Err(ParseError::new(at, "expected a variable or `(`, found `)`")),
            None => Err(ParseError::new(at, "unexpected end of input")),
        }
    }
}

/// Parse formula text: identifiers `[a-z][a-z0-9_]*`, right-associative `->`,
/// parentheses for grouping.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let f = parser.formula()?;
    if parser.pos != parser.tokens.len() {
        return Err(ParseError::new(parser.offset(), "trailing input"));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// Right-nested implication chain `first -> (.. -> last)`.
pub fn imp_chain(parts: &[Formula]) -> Formula {
    let (last, init) = parts.split_last().expect("nonempty chain");
    init.iter().rev().fold(last.clone(), |acc, a| Formula::imp(a.clone(), acc))
}
