//! Atomic propositions and sets of them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Maximum number of atomic propositions in one universe.
pub const MAX_APS: usize = 64;

/// An interned atomic proposition: an index into an [`ApUniverse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ap(pub(crate) u8);

impl Ap {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One letter of a trace: the propositions that hold at a step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApSet(u64);

impl ApSet {
    pub const EMPTY: ApSet = ApSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ApSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, ap: Ap) -> bool {
        self.0 >> ap.0 & 1 == 1
    }

    pub fn insert(&mut self, ap: Ap) {
        self.0 |= 1 << ap.0;
    }

    pub fn with(mut self, ap: Ap) -> Self {
        self.insert(ap);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Ap> {
        (0..MAX_APS as u8).filter(move |b| self.0 >> b & 1 == 1).map(Ap)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApError {
    #[error("unknown atomic proposition `{0}`")]
    Unknown(String),
    #[error("invalid atomic proposition name `{0}`")]
    InvalidName(String),
    #[error("too many atomic propositions (at most {MAX_APS})")]
    TooMany,
}

/// The declared set of atomic propositions, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApUniverse {
    names: Vec<String>,
    index: BTreeMap<String, Ap>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ApUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self, ApError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut universe = Self::new();
        for name in names {
            universe.intern(name.as_ref())?;
        }
        Ok(universe)
    }

    /// Returns the proposition for `name`, adding it if it is new.
    pub fn intern(&mut self, name: &str) -> Result<Ap, ApError> {
        if let Some(ap) = self.index.get(name) {
            return Ok(*ap);
        }
        if !is_identifier(name) {
            return Err(ApError::InvalidName(name.to_string()));
        }
        if self.names.len() == MAX_APS {
            return Err(ApError::TooMany);
        }
        let ap = Ap(self.names.len() as u8);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), ap);
        Ok(ap)
    }

    pub fn get(&self, name: &str) -> Option<Ap> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<Ap, ApError> {
        self.get(name).ok_or_else(|| ApError::Unknown(name.to_string()))
    }

    pub fn name(&self, ap: Ap) -> &str {
        &self.names[ap.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn aps(&self) -> impl Iterator<Item = Ap> + '_ {
        (0..self.names.len() as u8).map(Ap)
    }

    /// Propositions ordered by name.
    pub fn sorted(&self) -> impl Iterator<Item = Ap> + '_ {
        self.index.values().copied()
    }

    /// The lexicographically least proposition name, if any.
    pub fn least(&self) -> Option<Ap> {
        self.index.values().next().copied()
    }

    /// Every bit set in `set` names a proposition of this universe.
    pub fn admits(&self, set: ApSet) -> bool {
        self.names.len() == MAX_APS || set.bits() >> self.names.len() == 0
    }

    /// Encodes a step given by proposition names.
    pub fn letter<S: AsRef<str>>(&self, names: &[S]) -> Result<ApSet, ApError> {
        let mut set = ApSet::EMPTY;
        for name in names {
            set.insert(self.lookup(name.as_ref())?);
        }
        Ok(set)
    }

    /// Encodes a compact trace such as `"s;d;r"` or `"a,c;;a"`.
    pub fn word(&self, text: &str) -> Result<Vec<ApSet>, ApError> {
        text.split(';')
            .map(|step| {
                let names: Vec<&str> = step
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect();
                self.letter(&names)
            })
            .collect()
    }

    pub fn display_letter(&self, set: ApSet) -> LetterDisplay<'_> {
        LetterDisplay { universe: self, set }
    }

    pub fn display_word<'a>(&'a self, word: &'a [ApSet]) -> WordDisplay<'a> {
        WordDisplay { universe: self, word }
    }
}

pub struct LetterDisplay<'a> {
    universe: &'a ApUniverse,
    set: ApSet,
}

impl fmt::Display for LetterDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, ap) in self.set.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.universe.name(ap))?;
        }
        Ok(())
    }
}

pub struct WordDisplay<'a> {
    universe: &'a ApUniverse,
    word: &'a [ApSet],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, set) in self.word.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}", self.universe.display_letter(*set))?;
        }
        Ok(())
    }
}
