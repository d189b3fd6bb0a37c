//! Short words `h_n` over `{T_γ, h, r}` that agree with `T_γ^n` on `(0, a)`.
//!
//! With `h(x) = x/2` on `[0, a + 2/m)` and `r = T_{1/m}`:
//!
//! * `h_0 = id`,
//! * `h_n = T_γ h_{n-1}` for odd `n`,
//! * `h_n = r^{-2k} h^{-1} r^k h_{n/2} h` for even `n`, where `k ∈ {1..m}`
//!   is the unique value with `frac(nγ/2 + k/m) < 1/m`.
//!
//! Each halving step costs at most `3m + 2` letters, so
//! `|h_n| ≤ (3m + 3)(⌊log₂ n⌋ + 1) + 1`. For `g` trivial on `(a, 1)`,
//! `h_n g h_n⁻¹ = T_γ^n g T_γ^{-n}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed};
use thiserror::Error;

use crate::numbers::{AlphaVal, QuadIrr, Rational};
use crate::pamap::{CirclePoint, PAHomeo};
use crate::par::{self, Exec};
use crate::words::{Assignment, GenId, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Lemma1Error {
    #[error("need a+2/m<1 and 0<a, got a = {a}, m = {m}")]
    Threshold { a: String, m: u32 },
    #[error("gamma = {0} must be irrational and in (0, 1)")]
    BadGamma(String),
    #[error("frac(n*gamma/2) is a multiple of 1/m for n = {0}")]
    BoundaryHit(u64),
    #[error("choose_k needs an even n >= 2, got {0}")]
    NotEven(u64),
    #[error("{0} is not the identity on (a, 1)")]
    NotTrivial(GenId),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// `h` with `h(x) = x/2` on `[0, a + 2/m)`, affine from there to `(1, 1)`.
pub fn make_h(field: &QuadIrr, a: &Rational, m: u32) -> Result<PAHomeo, Lemma1Error> {
    let err = || Lemma1Error::Threshold { a: a.to_string(), m };
    if m == 0 || !a.is_positive() {
        return Err(err());
    }
    let c = a + Rational::new(2.into(), m.into());
    if c >= Rational::one() {
        return Err(err());
    }
    let half = Rational::new(1.into(), 2.into());
    PAHomeo::from_breakpoints(&[
        (CirclePoint::new(field.zero()), field.zero()),
        (CirclePoint::new(field.rational(c.clone())), field.rational(c * half)),
    ])
    .map_err(|_| err())
}

/// Generator names of one context.
#[derive(Debug, Clone)]
pub struct Lemma1Names {
    pub t_gamma: GenId,
    pub h: GenId,
    pub r: GenId,
}

impl Default for Lemma1Names {
    fn default() -> Self {
        Lemma1Names { t_gamma: "t_gamma".into(), h: "h".into(), r: "r".into() }
    }
}

/// One instance of the construction: `γ`, the interval `I = (a, 1)`, the
/// integer `m`, and the maps of `{T_γ, h, r}`.
pub struct Lemma1Ctx {
    gamma: AlphaVal,
    a: Rational,
    m: u32,
    /// The letter realizing `T_γ` (`t_gamma⁻¹` in a mirrored context).
    t_letter: Letter,
    h: GenId,
    r: GenId,
    assignment: Arc<Assignment>,
    memo: Mutex<HashMap<u64, Arc<Word>>>,
    mirror: OnceLock<Box<Lemma1Ctx>>,
}

impl std::fmt::Debug for Lemma1Ctx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lemma1Ctx")
            .field("gamma", &self.gamma)
            .field("a", &self.a)
            .field("m", &self.m)
            .field("t_letter", &self.t_letter)
            .finish()
    }
}

impl Lemma1Ctx {
    pub fn new(gamma: AlphaVal, a: Rational, m: u32, names: Lemma1Names) -> Result<Self, Lemma1Error> {
        if gamma.is_rational() {
            return Err(Lemma1Error::BadGamma(gamma.to_string()));
        }
        Self::new_allow_rational(gamma, a, m, names)
    }

    /// Like [`Lemma1Ctx::new`] but accepts a rational `γ`. For tests of the
    /// boundary cases only: the construction can fail for such `γ`.
    pub fn new_allow_rational(gamma: AlphaVal, a: Rational, m: u32, names: Lemma1Names) -> Result<Self, Lemma1Error> {
        let field = gamma.field().clone();
        if !(gamma.sign().is_gt() && gamma < field.integer(1)) {
            return Err(Lemma1Error::BadGamma(gamma.to_string()));
        }
        let h = make_h(&field, &a, m)?;
        let assignment = Assignment::new(&field)
            .with(names.t_gamma.clone(), PAHomeo::rotation(&gamma))
            .with(names.h.clone(), h)
            .with(names.r.clone(), PAHomeo::rotation(&field.rational(Rational::new(1.into(), m.into()))));
        Ok(Lemma1Ctx {
            gamma,
            a,
            m,
            t_letter: Letter::pos(names.t_gamma),
            h: names.h,
            r: names.r,
            assignment: Arc::new(assignment),
            memo: Mutex::new(HashMap::new()),
            mirror: OnceLock::new(),
        })
    }

    pub fn gamma(&self) -> &AlphaVal {
        &self.gamma
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t_letter(&self) -> &Letter {
        &self.t_letter
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    /// The same construction for `γ' = 1 − γ`, with `T_{γ'}` written as
    /// `t_gamma⁻¹`; no new generator is introduced.
    pub fn mirrored(&self) -> &Lemma1Ctx {
        self.mirror.get_or_init(|| {
            let one = self.gamma.field().integer(1);
            Box::new(Lemma1Ctx {
                gamma: &one - &self.gamma,
                a: self.a.clone(),
                m: self.m,
                t_letter: self.t_letter.inverse(),
                h: self.h.clone(),
                r: self.r.clone(),
                assignment: Arc::clone(&self.assignment),
                memo: Mutex::new(HashMap::new()),
                mirror: OnceLock::new(),
            })
        })
    }

    /// The unique `k ∈ {1, …, m}` with `frac(nγ/2 + k/m) < 1/m`.
    pub fn choose_k(&self, n: u64) -> Result<u32, Lemma1Error> {
        if n < 2 || n % 2 == 1 {
            return Err(Lemma1Error::NotEven(n));
        }
        let m = Rational::from_integer(self.m.into());
        let c0 = self.gamma.scale(&Rational::from_integer((n / 2).into())).frac();
        let (j, rem) = c0.scale(&m).floor_frac();
        if rem.is_zero() {
            return Err(Lemma1Error::BoundaryHit(n));
        }
        let j: u32 = j.try_into().expect("0 <= floor(frac * m) < m");
        let k = self.m - j;
        let inv_m = m.recip();
        debug_assert!((&c0 + &(&inv_m * Rational::from_integer(k.into()))).frac() < c0.field().rational(inv_m));
        Ok(k)
    }

    /// The word `h_n`, memoized per context.
    pub fn h_word(&self, n: u64) -> Result<Arc<Word>, Lemma1Error> {
        if let Some(w) = self.memo.lock().unwrap().get(&n) {
            return Ok(Arc::clone(w));
        }
        let word = if n == 0 {
            Word::empty()
        } else if n % 2 == 1 {
            let mut w = Word::letter(self.t_letter.clone());
            w.extend(&*self.h_word(n - 1)?);
            w
        } else {
            let k = self.choose_k(n)? as i64;
            let r = Word::letter(Letter::pos(self.r.clone()));
            let mut w = r.power(-2 * k);
            w.push(Letter::neg(self.h.clone()));
            w.extend(&r.power(k));
            w.extend(&*self.h_word(n / 2)?);
            w.push(Letter::pos(self.h.clone()));
            w
        };
        let word = Arc::new(word);
        self.memo.lock().unwrap().insert(n, Arc::clone(&word));
        Ok(word)
    }

    /// `(3m + 3)(⌊log₂ n⌋ + 1) + 1` for `n ≥ 1`, `0` for `n = 0`.
    pub fn length_bound(&self, n: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        (3 * self.m as u64 + 3) * (n.ilog2() as u64 + 1) + 1
    }

    /// The rotation `T_γ^n` as a circle map.
    pub fn target(&self, n: u64) -> PAHomeo {
        PAHomeo::rotation(&self.gamma.scale(&Rational::from_integer(n.into())))
    }

    /// Whether `h_n` agrees with `T_γ^n` on the arc `(0, a)`.
    pub fn agrees(&self, n: u64, word: &Word) -> Result<bool, Lemma1Error> {
        let map = word.evaluate(&self.assignment)?;
        let field = self.gamma.field();
        Ok(map.agrees_on(
            &self.target(n),
            &CirclePoint::new(field.zero()),
            &CirclePoint::new(field.rational(self.a.clone())),
        ))
    }

    pub fn check(&self, n: u64) -> Result<HWordCheck, Lemma1Error> {
        let word = self.h_word(n)?;
        let agrees = self.agrees(n, &word)?;
        Ok(HWordCheck { n, length: word.len() as u64, bound: self.length_bound(n), agrees })
    }

    /// Checks `h_n` for every `n` in `0..=max_n`.
    pub fn sweep(&self, max_n: u64, exec: Exec) -> Result<Vec<HWordCheck>, Lemma1Error> {
        // Warm the memo bottom-up so parallel rows mostly hit it.
        for n in 0..=max_n {
            self.h_word(n)?;
        }
        let ns: Vec<u64> = (0..=max_n).collect();
        par::try_map_collect(exec, &ns, |&n| self.check(n))
    }

    /// A word for `T_γ^n g T_γ^{-n}`: `h_n g h_n⁻¹`, or the mirrored
    /// construction for negative `n`. Rotation generators commute with
    /// `T_γ`, so for them the word is just `g`.
    pub fn conj_word(&self, n: i64, g: &Letter, env: &Assignment) -> Result<Word, Lemma1Error> {
        let map = env.get(g.gen()).ok_or_else(|| WordError::MissingGenerator(g.gen().clone()))?;
        if map.is_rotation() {
            return Ok(Word::letter(g.clone()));
        }
        let field = self.gamma.field();
        let id = PAHomeo::identity(field);
        if !map.agrees_on(&id, &CirclePoint::new(field.rational(self.a.clone())), &CirclePoint::new(field.integer(1))) {
            return Err(Lemma1Error::NotTrivial(g.gen().clone()));
        }
        let h = match n.signum() {
            0 => return Ok(Word::letter(g.clone())),
            1 => self.h_word(n as u64)?,
            _ => self.mirrored().h_word(n.unsigned_abs())?,
        };
        let mut w = Word::clone(&h);
        w.push(g.clone());
        w.extend(&h.invert());
        Ok(w)
    }

    /// Upper bound on `|conj_word(n, g)|` for a non-rotation `g`.
    pub fn conj_length_bound(&self, n: i64) -> u64 {
        2 * self.length_bound(n.unsigned_abs()) + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HWordCheck {
    pub n: u64,
    pub length: u64,
    pub bound: u64,
    pub agrees: bool,
}

impl HWordCheck {
    pub fn ok(&self) -> bool {
        self.agrees && self.length <= self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ctx() -> Lemma1Ctx {
        let al = QuadIrr::sqrt2_minus_1();
        Lemma1Ctx::new(al.alpha(), r(9, 10), 21, Lemma1Names::default()).unwrap()
    }

    #[test]
    fn h_values() {
        let al = QuadIrr::sqrt2_minus_1();
        let h = make_h(&al, &r(9, 10), 21).unwrap();
        assert_eq!(h.piece_count(), 2);
        assert_eq!(h.eval(&CirclePoint::new(al.ratio(1, 2))).into_value(), al.ratio(1, 4));
        assert_eq!(h.eval(&CirclePoint::new(al.ratio(995, 1000))).into_value(), al.ratio(4975, 10000));
        assert!(matches!(make_h(&al, &r(9, 10), 2), Err(Lemma1Error::Threshold { .. })));
        assert!(matches!(make_h(&al, &r(9, 10), 20), Err(Lemma1Error::Threshold { .. })));
    }

    #[test]
    fn choose_k_examples() {
        let c = ctx();
        assert_eq!(c.choose_k(4).unwrap(), 4);
        assert_eq!(c.choose_k(2).unwrap(), 13);
        assert_eq!(c.choose_k(3), Err(Lemma1Error::NotEven(3)));
        let al = QuadIrr::sqrt2_minus_1();
        let rational = Lemma1Ctx::new_allow_rational(al.ratio(1, 2), r(9, 10), 21, Lemma1Names::default()).unwrap();
        assert_eq!(rational.choose_k(4), Err(Lemma1Error::BoundaryHit(4)));
        assert!(matches!(
            Lemma1Ctx::new(al.ratio(1, 3), r(9, 10), 21, Lemma1Names::default()),
            Err(Lemma1Error::BadGamma(_))
        ));
    }

    #[test]
    fn small_words() {
        let c = ctx();
        assert!(c.h_word(0).unwrap().is_empty());
        assert_eq!(c.h_word(1).unwrap().to_string(), "t_gamma");
        let w2 = c.h_word(2).unwrap();
        assert_eq!(w2.len(), 3 * 13 + 2 + 1);
        for n in 0..40 {
            let chk = c.check(n).unwrap();
            assert!(chk.ok(), "{chk:?}");
        }
    }

    #[test]
    fn length_recurrence() {
        let c = ctx();
        for n in 1..300u64 {
            let len = c.h_word(n).unwrap().len() as u64;
            let prev = c.h_word(if n % 2 == 0 { n / 2 } else { n - 1 }).unwrap().len() as u64;
            let step = if n % 2 == 0 { 3 * 21 + 3 } else { 1 };
            assert!(len <= prev + step);
            assert!(len <= c.length_bound(n));
        }
    }

    #[test]
    fn conjugation() {
        let al = QuadIrr::sqrt2_minus_1();
        let c = ctx();
        let f1 = crate::constructions::make_f1(&al);
        let env = c.assignment().clone().with("f1", f1.clone());
        let g = Letter::pos("f1");
        assert_eq!(c.conj_word(0, &g, &env).unwrap(), Word::letter(g.clone()));
        for n in [3i64, 16, -16, -5] {
            let w = c.conj_word(n, &g, &env).unwrap();
            let t = al.alpha().scale(&Rational::from_integer(n.into()));
            let expect = PAHomeo::rotation(&t).compose(&f1).compose(&PAHomeo::rotation(&-&t));
            assert_eq!(w.evaluate(&env).unwrap(), expect, "n = {n}");
        }
        let env = env.with("t_quarter", PAHomeo::rotation(&al.ratio(1, 4)));
        assert_eq!(c.conj_word(7, &Letter::pos("t_quarter"), &env).unwrap().len(), 1);
        let bad =
            env.clone().with("bad", crate::constructions::make_f2(&al).compose(&PAHomeo::rotation(&al.ratio(1, 3))));
        assert_eq!(c.conj_word(2, &Letter::pos("bad"), &bad), Err(Lemma1Error::NotTrivial("bad".into())));
    }
}
