//! Formal words over named generators.
//!
//! Composition convention: the word `a b` evaluates to `map(a) ∘ map(b)`,
//! i.e. the rightmost letter acts first, matching functional notation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::numbers::QuadIrr;
use crate::pamap::PAHomeo;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator {0} has no assigned map")]
    MissingGenerator(GenId),
    #[error("cyclic definitions: {}", .0.iter().map(|g| g.name()).collect::<Vec<_>>().join(" -> "))]
    CyclicDefinition(Vec<GenId>),
    #[error("bad word token {0:?}")]
    BadToken(String),
}

/// Name of a generator. Cloning is a reference-count bump.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(Arc<str>);

impl GenId {
    pub fn new(name: &str) -> Self {
        GenId(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for GenId {
    fn from(s: &str) -> Self {
        GenId::new(s)
    }
}

/// A generator raised to `+1` or `-1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    gen: GenId,
    inverted: bool,
}

impl Letter {
    pub fn pos(gen: impl Into<GenId>) -> Self {
        Letter { gen: gen.into(), inverted: false }
    }

    pub fn neg(gen: impl Into<GenId>) -> Self {
        Letter { gen: gen.into(), inverted: true }
    }

    pub fn gen(&self) -> &GenId {
        &self.gen
    }

    pub fn exp(&self) -> i64 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn inverse(&self) -> Letter {
        Letter { gen: self.gen.clone(), inverted: !self.inverted }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverted != other.inverted
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}^-1", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// A finite sequence of letters; the empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    pub fn power(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for l in &self.0 {
            if out.last().is_some_and(|top| top.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        Word(out)
    }

    /// Replaces every defined generator by its definition, recursively.
    pub fn substitute(&self, defs: &HashMap<GenId, Word>) -> Result<Word, WordError> {
        check_acyclic(defs)?;
        let mut cache: HashMap<GenId, Word> = HashMap::new();
        let mut out = Vec::new();
        for l in &self.0 {
            match expand(l.gen(), defs, &mut cache) {
                Some(w) if l.inverted => out.extend(w.invert().0),
                Some(w) => out.extend(w.0),
                None => out.push(l.clone()),
            }
        }
        Ok(Word(out))
    }

    pub fn net_exponent(&self, g: &GenId) -> i64 {
        self.0.iter().filter(|l| &l.gen == g).map(Letter::exp).sum()
    }

    pub fn word_length(&self) -> usize {
        self.0.len()
    }

    /// Exact value of the word as a circle map.
    ///
    /// Maximal runs of one generator are collapsed to a single power, so
    /// long blocks such as `r^k` cost one composition.
    pub fn evaluate(&self, env: &Assignment) -> Result<PAHomeo, WordError> {
        let mut acc = PAHomeo::identity(env.field());
        let mut i = 0;
        while i < self.0.len() {
            let gen = &self.0[i].gen;
            let mut e = 0i64;
            let mut j = i;
            while j < self.0.len() && &self.0[j].gen == gen {
                e += self.0[j].exp();
                j += 1;
            }
            if e != 0 {
                let map = env.get(gen).ok_or_else(|| WordError::MissingGenerator(gen.clone()))?;
                let step = if e == 1 { map.clone() } else { map.pow(e) };
                acc = acc.compose(&step);
            } else if env.get(gen).is_none() {
                return Err(WordError::MissingGenerator(gen.clone()));
            }
            i = j;
        }
        Ok(acc)
    }
}

fn expand(g: &GenId, defs: &HashMap<GenId, Word>, cache: &mut HashMap<GenId, Word>) -> Option<Word> {
    if let Some(w) = cache.get(g) {
        return Some(w.clone());
    }
    let def = defs.get(g)?;
    let mut out = Vec::new();
    for l in &def.0 {
        match expand(l.gen(), defs, cache) {
            Some(w) if l.inverted => out.extend(w.invert().0),
            Some(w) => out.extend(w.0),
            None => out.push(l.clone()),
        }
    }
    let w = Word(out);
    cache.insert(g.clone(), w.clone());
    Some(w)
}

fn check_acyclic(defs: &HashMap<GenId, Word>) -> Result<(), WordError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        g: &GenId,
        defs: &HashMap<GenId, Word>,
        marks: &mut HashMap<GenId, Mark>,
        stack: &mut Vec<GenId>,
    ) -> Result<(), WordError> {
        match marks.get(g) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = stack.iter().position(|s| s == g).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(g.clone());
                return Err(WordError::CyclicDefinition(cycle));
            }
            None => {}
        }
        let Some(def) = defs.get(g) else { return Ok(()) };
        marks.insert(g.clone(), Mark::Active);
        stack.push(g.clone());
        for l in def.letters() {
            visit(l.gen(), defs, marks, stack)?;
        }
        stack.pop();
        marks.insert(g.clone(), Mark::Done);
        Ok(())
    }
    let mut marks = HashMap::new();
    let mut keys: Vec<&GenId> = defs.keys().collect();
    keys.sort();
    for g in keys {
        visit(g, defs, &mut marks, &mut Vec::new())?;
    }
    Ok(())
}

impl fmt::Display for Word {
    /// Whitespace-separated `name` / `name^-1` tokens.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|tok| {
                let (name, inverted) = match tok.strip_suffix("^-1") {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                let valid = !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_');
                if !valid {
                    return Err(WordError::BadToken(tok.to_string()));
                }
                Ok(Letter { gen: GenId::new(name), inverted })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Generator → map.
#[derive(Clone, Debug)]
pub struct Assignment {
    field: QuadIrr,
    maps: BTreeMap<GenId, PAHomeo>,
}

impl Assignment {
    pub fn new(field: &QuadIrr) -> Self {
        Assignment { field: field.clone(), maps: BTreeMap::new() }
    }

    pub fn with(mut self, g: impl Into<GenId>, map: PAHomeo) -> Self {
        self.insert(g, map);
        self
    }

    pub fn insert(&mut self, g: impl Into<GenId>, map: PAHomeo) {
        self.maps.insert(g.into(), map);
    }

    pub fn get(&self, g: &GenId) -> Option<&PAHomeo> {
        self.maps.get(g)
    }

    pub fn field(&self) -> &QuadIrr {
        &self.field
    }

    pub fn generators(&self) -> impl Iterator<Item = &GenId> {
        self.maps.keys()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Union; entries of `other` win on name clashes.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (g, m) in &other.maps {
            out.maps.insert(g.clone(), m.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn basic_ops() {
        assert_eq!(w("g").invert(), w("g^-1"));
        assert_eq!(w("g").power(-2), w("g^-1 g^-1"));
        assert_eq!(w("a b").power(3).len(), 6);
        let u = w("a b^-1 c");
        assert!(u.concat(&u.invert()).free_reduce().is_empty());
        assert_eq!(w("g g^-1").free_reduce(), Word::empty());
        assert_eq!(w("a g g^-1 b").free_reduce(), w("a b"));
        assert_eq!(w("a b b^-1 a^-1 c").free_reduce(), w("c"));
    }

    #[test]
    fn counts() {
        let u = w("x x^-1 x f1 x");
        assert_eq!(u.net_exponent(&"x".into()), 2);
        assert_eq!(u.word_length(), 5);
        assert_eq!(Word::empty().net_exponent(&"g".into()), 0);
    }

    #[test]
    fn substitution() {
        let mut defs = HashMap::new();
        defs.insert(GenId::new("H1"), w("x^-1 x^-1 f1 x x f1^-1"));
        let out = w("H1").substitute(&defs).unwrap();
        assert_eq!(out.len(), 6);
        assert_eq!(w("H1^-1").substitute(&defs).unwrap(), out.invert());
        assert_eq!(w("a b").substitute(&HashMap::new()).unwrap(), w("a b"));

        defs.insert(GenId::new("H2"), w("t H1^-1 t H1"));
        let out = w("H2").substitute(&defs).unwrap();
        assert_eq!(out.len(), 14);
        assert!(out.letters().iter().all(|l| ["x", "f1", "t"].contains(&l.gen().name())));
    }

    #[test]
    fn cyclic_substitution_is_rejected() {
        let mut defs = HashMap::new();
        defs.insert(GenId::new("A"), w("x B"));
        defs.insert(GenId::new("B"), w("A^-1"));
        match w("A").substitute(&defs) {
            Err(WordError::CyclicDefinition(c)) => {
                assert_eq!(c.first(), c.last());
                assert!(c.len() == 3);
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
        let mut selfref = HashMap::new();
        selfref.insert(GenId::new("A"), w("A"));
        assert!(matches!(w("y").substitute(&selfref), Err(WordError::CyclicDefinition(_))));
    }

    #[test]
    fn parse_print_round_trip() {
        let s = "T_alpha h_f1^-1 r_f1 r_f1 f2";
        assert_eq!(w(s).to_string(), s);
        assert!("a^2".parse::<Word>().is_err());
        assert!("a^-1^-1".parse::<Word>().is_err());
        assert_eq!("".parse::<Word>().unwrap(), Word::empty());
    }

    #[test]
    fn evaluation() {
        let al = QuadIrr::sqrt2_minus_1();
        let beta = al.ratio(1, 2048);
        let env = Assignment::new(&al).with("x", PAHomeo::rotation(&beta));
        assert!(Word::empty().evaluate(&env).unwrap().is_identity());
        assert_eq!(w("x x").evaluate(&env).unwrap(), PAHomeo::rotation(&al.ratio(2, 2048)));
        assert_eq!(w("x y").evaluate(&env), Err(WordError::MissingGenerator("y".into())));
        assert_eq!(w("y y^-1").evaluate(&env), Err(WordError::MissingGenerator("y".into())));
    }
}
