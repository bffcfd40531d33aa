//! Post tag systems.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Finite word over single-character letters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub struct Word(Vec<char>);

impl Word {
    pub fn new(letters: Vec<char>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<char> {
        self.0.first().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.chars().collect())
    }
}

impl From<String> for Word {
    fn from(s: String) -> Self {
        Word(s.chars().collect())
    }
}

impl From<Word> for String {
    fn from(w: Word) -> Self {
        w.0.into_iter().collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Ordered set of distinct letters; letter `i` (1-based) gets the `i`-th code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet(Vec<char>);

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &c in &letters {
            if !seen.insert(c) {
                return Err(Error::TagSystem(format!("duplicate letter `{c}`")));
            }
        }
        if letters.is_empty() {
            return Err(Error::TagSystem("empty alphabet".into()));
        }
        Ok(Alphabet(letters))
    }

    /// `a`..`z` in order.
    pub fn latin() -> Self {
        Alphabet(('a'..='z').collect())
    }

    /// The first `n` latin letters.
    pub fn first_n(n: usize) -> Self {
        Alphabet(('a'..='z').take(n.clamp(1, 26)).collect())
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based position of `c`.
    pub fn index_of(&self, c: char) -> Result<usize> {
        self.0.iter().position(|&x| x == c).map(|i| i + 1).ok_or(Error::UnknownLetter(c))
    }

    pub fn letter(&self, index: usize) -> Option<char> {
        index.checked_sub(1).and_then(|i| self.0.get(i)).copied()
    }

    pub fn contains_word(&self, w: &Word) -> Result<()> {
        for &c in w.letters() {
            self.index_of(c)?;
        }
        Ok(())
    }

    /// All words of exactly `len` letters, in lexicographic alphabet order.
    pub fn words_of_len(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| self.0.iter().map(move |&c| w.concat(&Word(vec![c]))))
                .collect();
        }
        out
    }
}

/// Tag system: alphabet, one nonempty production per letter, deletion number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSystem {
    alphabet: Alphabet,
    productions: BTreeMap<char, Word>,
    deletion: usize,
}

impl TagSystem {
    /// `productions` lists letters in alphabet order.
    pub fn new(deletion: usize, productions: Vec<(char, Word)>) -> Result<Self> {
        if deletion == 0 {
            return Err(Error::TagSystem("deletion number must be at least 1".into()));
        }
        let alphabet = Alphabet::new(productions.iter().map(|(c, _)| *c).collect())?;
        for (c, w) in &productions {
            if w.is_empty() {
                return Err(Error::TagSystem(format!("empty production for `{c}`")));
            }
            for &l in w.letters() {
                if alphabet.index_of(l).is_err() {
                    return Err(Error::TagSystem(format!("unknown letter `{l}` in production for `{c}`")));
                }
            }
        }
        Ok(TagSystem { alphabet, productions: productions.into_iter().collect(), deletion })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn deletion(&self) -> usize {
        self.deletion
    }

    pub fn production(&self, letter: char) -> Result<&Word> {
        self.productions.get(&letter).ok_or(Error::UnknownLetter(letter))
    }

    /// Productions in alphabet order.
    pub fn productions(&self) -> impl Iterator<Item = (char, &Word)> {
        self.alphabet.letters().iter().map(|c| (*c, &self.productions[c]))
    }

    pub fn max_production_len(&self) -> usize {
        self.productions.values().map(Word::len).max().unwrap_or(0)
    }

    /// One production, or `None` when the word is shorter than the deletion number.
    pub fn step(&self, w: &Word) -> Result<Option<Word>> {
        self.alphabet.contains_word(w)?;
        Ok(self.step_unchecked(w))
    }

    fn step_unchecked(&self, w: &Word) -> Option<Word> {
        if w.len() < self.deletion {
            return None;
        }
        let head = w.first()?;
        let tail = w.slice(self.deletion..w.len());
        Some(tail.concat(&self.productions[&head]))
    }

    /// Run until the word is shorter than `d` or `max_steps` productions are spent.
    pub fn run(&self, w: &Word, max_steps: usize) -> Result<RunOutcome> {
        self.alphabet.contains_word(w)?;
        let mut current = w.clone();
        for steps in 0..=max_steps {
            if current.len() < self.deletion {
                return Ok(RunOutcome::Halted { word: current, steps });
            }
            if steps == max_steps {
                break;
            }
            current = self.step_unchecked(&current).expect("applicable");
        }
        Ok(RunOutcome::BudgetExhausted { word: current })
    }

    /// The run from `w`: `w` followed by each produced word, up to `max_steps` productions.
    pub fn trajectory(&self, w: &Word, max_steps: usize) -> Result<Vec<Word>> {
        self.alphabet.contains_word(w)?;
        let mut out = vec![w.clone()];
        while out.len() <= max_steps {
            match self.step_unchecked(out.last().expect("nonempty")) {
                Some(next) => out.push(next),
                None => break,
            }
        }
        Ok(out)
    }

    /// True iff `to` occurs in the run from `from` after at least one and at
    /// most `max_steps` productions. Stops early when the run revisits a word.
    pub fn reaches(&self, from: &Word, to: &Word, max_steps: usize) -> Result<bool> {
        self.alphabet.contains_word(from)?;
        let mut seen = HashSet::new();
        seen.insert(from.clone());
        let mut current = from.clone();
        for _ in 0..max_steps {
            match self.step_unchecked(&current) {
                None => return Ok(false),
                Some(next) => {
                    if &next == to {
                        return Ok(true);
                    }
                    if !seen.insert(next.clone()) {
                        return Ok(false);
                    }
                    current = next;
                }
            }
        }
        Ok(false)
    }

    /// Tag-file text that parses back to this system.
    pub fn to_tag_file(&self) -> String {
        let mut out = format!("d={}\n", self.deletion);
        for (c, w) in self.productions() {
            out.push_str(&format!("{c} -> {w}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RunOutcome {
    Halted { word: Word, steps: usize },
    BudgetExhausted { word: Word },
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

/// Parse the tag-file format: `d=<int>` first, then `<letter> -> <word>` lines;
/// blank lines and `#` comment lines are skipped. Errors carry 1-based line numbers.
pub fn parse_tag_system(text: &str) -> Result<TagSystem> {
    let mut deletion = None;
    let mut productions: Vec<(char, Word)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if deletion.is_none() {
            let value = line
                .strip_prefix("d=")
                .ok_or_else(|| ParseError::new(line_no, "missing `d=<int>` line"))?;
            let d: usize = value
                .trim()
                .parse()
                .map_err(|_| ParseError::new(line_no, format!("bad deletion number `{value}`")))?;
            deletion = Some(d);
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| ParseError::new(line_no, "expected `<letter> -> <word>`"))?;
        let lhs = lhs.trim();
        let mut chars = lhs.chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => c,
            _ => return Err(ParseError::new(line_no, format!("bad letter `{lhs}`")).into()),
        };
        let rhs = rhs.trim();
        if let Some(bad) = rhs.chars().find(|c| !c.is_ascii_lowercase()) {
            return Err(ParseError::new(line_no, format!("bad character `{bad}` in production")).into());
        }
        if productions.iter().any(|(c, _)| *c == letter) {
            return Err(Error::TagSystem(format!("duplicate letter `{letter}` (line {line_no})")));
        }
        productions.push((letter, Word::from(rhs)));
    }
    let d = deletion.ok_or_else(|| Error::TagSystem("missing `d=<int>` line".into()))?;
    if productions.is_empty() {
        return Err(Error::TagSystem("no productions".into()));
    }
    TagSystem::new(d, productions)
}
