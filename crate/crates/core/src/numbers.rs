//! Exact arithmetic in `Q + Q·α` for a fixed quadratic irrational `α`.
//!
//! Every number the rest of the crate touches (breakpoints, offsets,
//! rotation angles) is of the form `a + b·α` with `a, b` rational. Slopes
//! stay rational, so the set is closed under everything the map algebra
//! needs: addition, negation and scaling by a rational.
//!
//! Signs are decided exactly by squaring, floors by a binary enclosure of
//! `α` followed by exact sign tests. A floating-point estimate with a
//! generous error bound answers first when it is unambiguous; every other
//! case goes through the exact path, so results never depend on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type Rational = BigRational;

/// Bits of the default binary enclosure used by [`AlphaVal::floor_frac`].
const ENCLOSURE_BITS: u64 = 96;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumberError {
    #[error("D = {0} must be a positive non-square integer")]
    NotIrrational(BigInt),
    #[error("Q must be nonzero")]
    ZeroDenominator,
    #[error("alpha = ({p} + sqrt({d}))/{q} does not lie in (0, 1)")]
    OutOfUnitInterval { p: BigInt, q: BigInt, d: BigInt },
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

struct QuadIrrInner {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    lo: Rational,
    hi: Rational,
    approx: f64,
}

/// The quadratic irrational `α = (P + √D) / Q`, with `0 < α < 1`.
///
/// Cheap to clone; every [`AlphaVal`] carries a handle to the `α` it is
/// expressed over.
#[derive(Clone)]
pub struct QuadIrr(Arc<QuadIrrInner>);

impl QuadIrr {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self, NumberError> {
        let (p, q, d) = (p.into(), q.into(), d.into());
        if q.is_zero() {
            return Err(NumberError::ZeroDenominator);
        }
        if !d.is_positive() {
            return Err(NumberError::NotIrrational(d));
        }
        let isqrt_d = d.sqrt();
        if &isqrt_d * &isqrt_d == d {
            return Err(NumberError::NotIrrational(d));
        }
        let (lo, hi) = enclosure(&p, &q, &d, ENCLOSURE_BITS);
        let approx = to_f64(&((&lo + &hi) / Rational::from_integer(2.into())));
        let alpha = QuadIrr(Arc::new(QuadIrrInner { p, q, d, lo, hi, approx }));
        let zero = Rational::zero();
        if alpha.sign_of(&zero, &Rational::one()) != Ordering::Greater
            || alpha.sign_of(&-Rational::one(), &Rational::one()) != Ordering::Less
        {
            let i = &alpha.0;
            return Err(NumberError::OutOfUnitInterval { p: i.p.clone(), q: i.q.clone(), d: i.d.clone() });
        }
        Ok(alpha)
    }

    /// `√2 − 1`, continued fraction `[0; 2, 2, 2, …]`.
    pub fn sqrt2_minus_1() -> Self {
        Self::new(-1, 1, 2).expect("sqrt(2) - 1 is a valid quadratic irrational")
    }

    pub fn p(&self) -> &BigInt {
        &self.0.p
    }

    pub fn q(&self) -> &BigInt {
        &self.0.q
    }

    pub fn d(&self) -> &BigInt {
        &self.0.d
    }

    /// `α` itself, as `0 + 1·α`.
    pub fn alpha(&self) -> AlphaVal {
        AlphaVal::new(self, Rational::zero(), Rational::one())
    }

    pub fn zero(&self) -> AlphaVal {
        AlphaVal::new(self, Rational::zero(), Rational::zero())
    }

    pub fn rational(&self, r: Rational) -> AlphaVal {
        AlphaVal::new(self, r, Rational::zero())
    }

    /// Shorthand for the rational `num/den` embedded in `Q + Qα`.
    pub fn ratio(&self, num: i64, den: i64) -> AlphaVal {
        self.rational(Rational::new(num.into(), den.into()))
    }

    pub fn integer(&self, n: impl Into<BigInt>) -> AlphaVal {
        self.rational(Rational::from_integer(n.into()))
    }

    /// Rational bounds `lo < α < hi` of width `2^-ENCLOSURE_BITS / |Q|`.
    pub fn enclosure(&self) -> (&Rational, &Rational) {
        (&self.0.lo, &self.0.hi)
    }

    /// Exact sign of `a + b·α`.
    ///
    /// Writes the number as `u + v·√D` and compares `u²` against `v²·D` when
    /// the two terms have opposite signs.
    pub fn sign_of(&self, a: &Rational, b: &Rational) -> Ordering {
        if b.is_zero() {
            return a.cmp(&Rational::zero());
        }
        if let Some((v, err)) = self.estimate(a, b) {
            if v > err {
                return Ordering::Greater;
            }
            if v < -err {
                return Ordering::Less;
            }
        }
        let i = &self.0;
        let q = Rational::from_integer(i.q.clone());
        let v = b / &q;
        let u = a + &v * Rational::from_integer(i.p.clone());
        let su = u.cmp(&Rational::zero());
        let sv = v.cmp(&Rational::zero());
        match (su, sv) {
            (Ordering::Equal, s) => s,
            (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (su, _) => {
                // |u| vs |v|√D; the dominant term decides; equality impossible.
                let u2 = &u * &u;
                let v2d = &v * &v * Rational::from_integer(i.d.clone());
                if u2 > v2d {
                    su
                } else {
                    su.reverse()
                }
            }
        }
    }

    /// `a + b·α` in `f64` with an error bound far above the accumulated
    /// rounding (a few ulps relative, plus slack for subnormals), or `None`
    /// if either coordinate is out of `f64` range.
    fn estimate(&self, a: &Rational, b: &Rational) -> Option<(f64, f64)> {
        let af = a.to_f64().filter(|x| x.is_finite())?;
        let bf = b.to_f64().filter(|x| x.is_finite())?;
        let v = af + bf * self.0.approx;
        let err = 1e-12 * (af.abs() + bf.abs()) + 1e-290;
        v.is_finite().then_some((v, err))
    }

    /// Continued-fraction convergents of `α`, an infinite stream.
    pub fn convergents(&self) -> Convergents {
        Convergents::new(self)
    }

    /// The first `count` below-side convergent denominators `q` with
    /// `frac(q·α) < beta0`, in increasing order.
    pub fn orbit_entries(&self, beta0: &Rational, count: usize) -> Vec<BigInt> {
        assert!(beta0.is_positive(), "beta0 must be positive");
        let bound = self.rational(beta0.clone());
        self.convergents()
            .filter(|c| c.side == Side::Below)
            .filter(|c| {
                let (_, frac) = self.integer(c.q.clone()).mul_alpha().floor_frac();
                frac < bound
            })
            .map(|c| c.q)
            .take(count)
            .collect()
    }

    fn same(&self, other: &QuadIrr) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self == other
    }
}

impl PartialEq for QuadIrr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.q == other.0.q && self.0.d == other.0.d)
    }
}

impl Eq for QuadIrr {}

impl fmt::Debug for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadIrr(({} + sqrt({}))/{})", self.0.p, self.0.d, self.0.q)
    }
}

impl FromStr for QuadIrr {
    type Err = NumberError;

    /// Parses `quad:P,Q,D`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NumberError::Parse { what: "quadratic irrational (quad:P,Q,D)", input: s.to_string() };
        let body = s.trim().strip_prefix("quad:").ok_or_else(err)?;
        let parts: Vec<BigInt> =
            body.split(',').map(|t| t.trim().parse::<BigInt>()).collect::<Result<_, _>>().map_err(|_| err())?;
        match parts.as_slice() {
            [p, q, d] => QuadIrr::new(p.clone(), q.clone(), d.clone()),
            _ => Err(err()),
        }
    }
}

/// Rational `lo < (P + √D)/Q < hi` from an integer square root at `bits`
/// binary digits.
fn enclosure(p: &BigInt, q: &BigInt, d: &BigInt, bits: u64) -> (Rational, Rational) {
    let scale = BigInt::one() << bits;
    let s = (d * &scale * &scale).sqrt();
    let sqrt_lo = Rational::new(s.clone(), scale.clone());
    let sqrt_hi = Rational::new(s + 1, scale);
    let p = Rational::from_integer(p.clone());
    let q = Rational::from_integer(q.clone());
    let a = (&p + sqrt_lo) / &q;
    let b = (&p + sqrt_hi) / &q;
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An exact number `a + b·α`.
///
/// The representation is unique because `α` is irrational. Mixing values
/// over different `α` is a programming error and panics.
#[derive(Clone)]
pub struct AlphaVal {
    a: Rational,
    b: Rational,
    alpha: QuadIrr,
}

impl AlphaVal {
    pub fn new(alpha: &QuadIrr, a: Rational, b: Rational) -> Self {
        AlphaVal { a, b, alpha: alpha.clone() }
    }

    /// Rational part.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of `α`.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> &QuadIrr {
        &self.alpha
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn sign(&self) -> Ordering {
        self.alpha.sign_of(&self.a, &self.b)
    }

    pub fn scale(&self, r: &Rational) -> AlphaVal {
        AlphaVal { a: &self.a * r, b: &self.b * r, alpha: self.alpha.clone() }
    }

    /// `self · α`, defined only for rational `self` (the product of two
    /// irrational members would leave `Q + Qα`).
    fn mul_alpha(&self) -> AlphaVal {
        assert!(self.b.is_zero(), "mul_alpha on an irrational value");
        AlphaVal { a: Rational::zero(), b: self.a.clone(), alpha: self.alpha.clone() }
    }

    /// `x = n + f` with `n` an integer and `f ∈ [0, 1)`.
    pub fn floor_frac(&self) -> (BigInt, AlphaVal) {
        let n = self.floor();
        let f = self - &self.alpha.integer(n.clone());
        (n, f)
    }

    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        if let Some((v, err)) = self.alpha.estimate(&self.a, &self.b) {
            let (lo, hi) = ((v - err).floor(), (v + err).floor());
            if lo == hi && lo.abs() < 1e15 {
                return BigInt::from(lo as i64);
            }
        }
        let (lo, hi) = self.alpha.enclosure();
        let (x_lo, x_hi) = if self.b.is_positive() {
            (&self.a + &self.b * lo, &self.a + &self.b * hi)
        } else {
            (&self.a + &self.b * hi, &self.a + &self.b * lo)
        };
        let mut lo_n = x_lo.floor().to_integer();
        let mut hi_n = x_hi.floor().to_integer();
        // Invariant: lo_n <= floor(x) <= hi_n.
        while lo_n < hi_n {
            let sum: BigInt = &lo_n + &hi_n + 1;
            let mid = sum.div_floor(&BigInt::from(2));
            let diff_a = &self.a - Rational::from_integer(mid.clone());
            if self.alpha.sign_of(&diff_a, &self.b) == Ordering::Less {
                hi_n = mid - 1;
            } else {
                lo_n = mid;
            }
        }
        lo_n
    }

    /// Fractional part, in `[0, 1)`.
    pub fn frac(&self) -> AlphaVal {
        self.floor_frac().1
    }

    /// Closed rational interval containing the value, from an enclosure of
    /// `α` at `bits` binary digits.
    pub fn interval(&self, bits: u64) -> (Rational, Rational) {
        if self.b.is_zero() {
            return (self.a.clone(), self.a.clone());
        }
        let i = &self.alpha.0;
        let (lo, hi) = enclosure(&i.p, &i.q, &i.d, bits);
        let x = &self.a + &self.b * &lo;
        let y = &self.a + &self.b * &hi;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Decimal rendering rounded (half up in magnitude) to `sig_digits`
    /// significant digits, exact in the sense that the printed digits are
    /// those of the true value.
    pub fn to_decimal(&self, sig_digits: usize) -> String {
        if self.b.is_zero() {
            return format_sig(&self.a, sig_digits);
        }
        let mut bits = 64 + 4 * sig_digits as u64;
        loop {
            let (lo, hi) = self.interval(bits);
            let (s_lo, s_hi) = (format_sig(&lo, sig_digits), format_sig(&hi, sig_digits));
            if s_lo == s_hi {
                return s_lo;
            }
            bits *= 2;
        }
    }

    /// Parses the exact string form `a_num/a_den+b_num/b_den*alpha`.
    pub fn parse(alpha: &QuadIrr, s: &str) -> Result<AlphaVal, NumberError> {
        let err = || NumberError::Parse { what: "exact value (a/b+c/d*alpha)", input: s.to_string() };
        let body = s.trim().strip_suffix("*alpha").ok_or_else(err)?;
        // The separating '+' is the first one after the rational part's slash.
        let slash = body.find('/').ok_or_else(err)?;
        let plus = body[slash..].find('+').map(|i| i + slash).ok_or_else(err)?;
        let a = parse_rational(&body[..plus]).ok_or_else(err)?;
        let b = parse_rational(&body[plus + 1..]).ok_or_else(err)?;
        Ok(AlphaVal::new(alpha, a, b))
    }

    fn check_field(&self, other: &AlphaVal) {
        assert!(self.alpha.same(&other.alpha), "mixing values over different alpha");
    }
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Positional decimal with `sig_digits` significant digits, rounding half
/// up in magnitude.
pub fn format_sig(r: &Rational, sig_digits: usize) -> String {
    assert!(sig_digits >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let x = r.abs();
    // Estimate the decimal exponent from bit lengths, then correct it.
    let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(BigInt::from(10).pow(k as u32))
        } else {
            Rational::new(BigInt::one(), BigInt::from(10).pow((-k) as u32))
        }
    };
    while pow10(e) > x {
        e -= 1;
    }
    while pow10(e + 1) <= x {
        e += 1;
    }
    let shift = sig_digits as i64 - 1 - e;
    let scaled = &x * pow10(shift);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut m = (scaled + half).floor().to_integer();
    if m == BigInt::from(10).pow(sig_digits as u32) {
        m /= 10;
        e += 1;
    }
    let digits = m.to_str_radix(10);
    let body = if e >= sig_digits as i64 - 1 {
        format!("{}{}", digits, "0".repeat((e - sig_digits as i64 + 1) as usize))
    } else if e < 0 {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
    } else {
        let split = (e + 1) as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}/{}", r.numer(), r.denom())
}

impl fmt::Display for AlphaVal {
    /// Exact form `a_num/a_den+b_num/b_den*alpha`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.a, f)?;
        f.write_str("+")?;
        fmt_rational(&self.b, f)?;
        f.write_str("*alpha")
    }
}

impl fmt::Debug for AlphaVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for AlphaVal {
    fn eq(&self, other: &Self) -> bool {
        self.check_field(other);
        self.a == other.a && self.b == other.b
    }
}

impl Eq for AlphaVal {}

impl PartialOrd for AlphaVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlphaVal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check_field(other);
        if self.a == other.a && self.b == other.b {
            return Ordering::Equal;
        }
        let est = |x: &AlphaVal| x.alpha.estimate(&x.a, &x.b);
        if let (Some((v, e)), Some((w, f))) = (est(self), est(other)) {
            let gap = v - w;
            let err = 2.0 * (e + f);
            if gap > err {
                return Ordering::Greater;
            }
            if gap < -err {
                return Ordering::Less;
            }
        }
        self.alpha.sign_of(&(&self.a - &other.a), &(&self.b - &other.b))
    }
}

impl<'a> Add<&'a AlphaVal> for &'a AlphaVal {
    type Output = AlphaVal;
    fn add(self, rhs: &AlphaVal) -> AlphaVal {
        self.check_field(rhs);
        AlphaVal { a: &self.a + &rhs.a, b: &self.b + &rhs.b, alpha: self.alpha.clone() }
    }
}

impl<'a> Sub<&'a AlphaVal> for &'a AlphaVal {
    type Output = AlphaVal;
    fn sub(self, rhs: &AlphaVal) -> AlphaVal {
        self.check_field(rhs);
        AlphaVal { a: &self.a - &rhs.a, b: &self.b - &rhs.b, alpha: self.alpha.clone() }
    }
}

impl Add for AlphaVal {
    type Output = AlphaVal;
    fn add(self, rhs: AlphaVal) -> AlphaVal {
        &self + &rhs
    }
}

impl Sub for AlphaVal {
    type Output = AlphaVal;
    fn sub(self, rhs: AlphaVal) -> AlphaVal {
        &self - &rhs
    }
}

impl Add<&Rational> for &AlphaVal {
    type Output = AlphaVal;
    fn add(self, rhs: &Rational) -> AlphaVal {
        AlphaVal { a: &self.a + rhs, b: self.b.clone(), alpha: self.alpha.clone() }
    }
}

impl Neg for &AlphaVal {
    type Output = AlphaVal;
    fn neg(self) -> AlphaVal {
        AlphaVal { a: -&self.a, b: -&self.b, alpha: self.alpha.clone() }
    }
}

impl Neg for AlphaVal {
    type Output = AlphaVal;
    fn neg(self) -> AlphaVal {
        -&self
    }
}

impl Mul<&Rational> for &AlphaVal {
    type Output = AlphaVal;
    fn mul(self, rhs: &Rational) -> AlphaVal {
        self.scale(rhs)
    }
}

/// Which side of `α` a convergent `p/q` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `q·α − p > 0`.
    Below,
    /// `q·α − p < 0`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub side: Side,
}

/// Infinite stream of convergents, driven by the exact complete-quotient
/// recurrence for `(P + √D)/Q` with `Q | D − P²`.
pub struct Convergents {
    alpha: QuadIrr,
    p: BigInt,
    q: BigInt,
    d: BigInt,
    isqrt_d: BigInt,
    prev: (BigInt, BigInt),
    prev2: (BigInt, BigInt),
}

impl Convergents {
    fn new(alpha: &QuadIrr) -> Self {
        let i = &alpha.0;
        let (mut p, mut q, mut d) = (i.p.clone(), i.q.clone(), i.d.clone());
        if !(&d - &p * &p).is_multiple_of(&q) {
            let qa = q.abs();
            p *= &qa;
            d = d * &q * &q;
            q *= qa;
        }
        let isqrt_d = d.sqrt();
        Convergents {
            alpha: alpha.clone(),
            p,
            q,
            d,
            isqrt_d,
            prev: (BigInt::one(), BigInt::zero()),
            prev2: (BigInt::zero(), BigInt::one()),
        }
    }

    fn partial_quotient(&self) -> BigInt {
        if self.q.is_positive() {
            (&self.p + &self.isqrt_d).div_floor(&self.q)
        } else {
            let num: BigInt = -&self.p - &self.isqrt_d - 1;
            num.div_floor(&-&self.q)
        }
    }
}

impl Iterator for Convergents {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let a = self.partial_quotient();
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;

        let num = &a * &self.prev.0 + &self.prev2.0;
        let den = &a * &self.prev.1 + &self.prev2.1;
        self.prev2 = std::mem::replace(&mut self.prev, (num.clone(), den.clone()));

        let err_sign = self.alpha.sign_of(&Rational::from_integer(-num.clone()), &Rational::from_integer(den.clone()));
        let side = match err_sign {
            Ordering::Greater => Side::Below,
            Ordering::Less => Side::Above,
            Ordering::Equal => unreachable!("alpha is irrational"),
        };
        Some(Convergent { p: num, q: den, side })
    }
}

/// Nearest `f64`, or NaN when out of range.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
