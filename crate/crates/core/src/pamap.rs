//! Orientation-preserving piecewise-affine circle homeomorphisms.
//!
//! A map is stored as a degree-one lift `F: R → R`, `F(x + 1) = F(x) + 1`,
//! cut into affine pieces. Piece `i` covers `[left_i, left_{i+1})`; the last
//! piece wraps around to `left_0 + 1`. Canonical form:
//!
//! * lefts strictly increasing in `[0, 1)`, starting at the smallest
//!   breakpoint;
//! * no two cyclically adjacent pieces share a slope (continuity then makes
//!   them collinear, so they are merged);
//! * a one-piece map (a rotation) is anchored at `left = 0`;
//! * the lift is normalized so that `F(left_0) ∈ [0, 1)`.
//!
//! Two maps are equal as circle homeomorphisms iff their canonical data is
//! identical, so `==` is structural.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numbers::{parse_rational, AlphaVal, QuadIrr, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PamapError {
    #[error("no samples given")]
    Empty,
    #[error("samples {0} and {1} are not strictly increasing")]
    NonMonotone(usize, usize),
    #[error("images of samples {0} and {1} (across the wrap) exceed one full turn")]
    RiseTooLarge(usize, usize),
    #[error("slope between samples {0} and {1} is not rational")]
    IrrationalSlope(usize, usize),
    #[error("malformed map text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A point of the circle, canonically represented in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CirclePoint(AlphaVal);

impl CirclePoint {
    pub fn new(x: AlphaVal) -> Self {
        CirclePoint(x.frac())
    }

    pub fn value(&self) -> &AlphaVal {
        &self.0
    }

    pub fn into_value(self) -> AlphaVal {
        self.0
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePiece {
    left: CirclePoint,
    slope: Rational,
    image_of_left: AlphaVal,
}

impl AffinePiece {
    pub fn left(&self) -> &CirclePoint {
        &self.left
    }

    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    /// Value of the lift at `left`.
    pub fn image_of_left(&self) -> &AlphaVal {
        &self.image_of_left
    }
}

/// An element of PAff₊(S¹) in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct PAHomeo {
    pieces: Vec<AffinePiece>,
}

/// Uncanonicalized piece data: left point (in `[0,1)`), slope, lift value.
type Raw = (AlphaVal, Rational, AlphaVal);

impl PAHomeo {
    pub fn identity(alpha: &QuadIrr) -> Self {
        Self::rotation(&alpha.zero())
    }

    /// `x ↦ x + t (mod 1)`.
    pub fn rotation(t: &AlphaVal) -> Self {
        let field = t.field();
        PAHomeo {
            pieces: vec![AffinePiece {
                left: CirclePoint(field.zero()),
                slope: Rational::one(),
                image_of_left: t.frac(),
            }],
        }
    }

    /// The piecewise-affine interpolant through `samples`; the last sample
    /// is joined to the first one shifted by a full turn.
    pub fn from_breakpoints(samples: &[(CirclePoint, AlphaVal)]) -> Result<Self, PamapError> {
        if samples.is_empty() {
            return Err(PamapError::Empty);
        }
        let k = samples.len();
        for i in 0..k - 1 {
            if samples[i + 1].0 <= samples[i].0 || samples[i + 1].1 <= samples[i].1 {
                return Err(PamapError::NonMonotone(i, i + 1));
            }
        }
        let one = Rational::one();
        let wrap_y = &samples[0].1 + &one;
        if samples[k - 1].1 >= wrap_y {
            return Err(PamapError::RiseTooLarge(k - 1, 0));
        }
        let wrap_x = samples[0].0.value() + &one;
        let mut raw = Vec::with_capacity(k);
        for i in 0..k {
            let (x0, y0) = (samples[i].0.value(), &samples[i].1);
            let (x1, y1) = if i + 1 < k { (samples[i + 1].0.value(), &samples[i + 1].1) } else { (&wrap_x, &wrap_y) };
            let slope = rational_ratio(&(y1 - y0), &(x1 - x0)).ok_or(PamapError::IrrationalSlope(i, (i + 1) % k))?;
            raw.push((x0.clone(), slope, y0.clone()));
        }
        Ok(Self::from_raw(raw))
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn field(&self) -> &QuadIrr {
        self.pieces[0].left.0.field()
    }

    pub fn is_rotation(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Rotation amount in `[0, 1)` if this map is a rotation.
    pub fn rotation_amount(&self) -> Option<&AlphaVal> {
        self.is_rotation().then(|| &self.pieces[0].image_of_left)
    }

    pub fn is_identity(&self) -> bool {
        self.rotation_amount().is_some_and(AlphaVal::is_zero)
    }

    /// Piece index containing `x ∈ [0, 1)`, and `x` lifted into that piece's
    /// domain (`x + 1` for the wrap part of the last piece).
    fn locate(&self, x: &AlphaVal) -> (usize, Option<AlphaVal>) {
        let k = self.pieces.len();
        if k == 1 {
            return (0, None);
        }
        if x < self.pieces[0].left.value() {
            let one = Rational::one();
            return (k - 1, Some(x + &one));
        }
        // Largest i with left_i <= x.
        let mut lo = 0;
        let mut hi = k;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.pieces[mid].left.value() <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, None)
    }

    fn eval_in_domain(&self, x: &AlphaVal) -> (AlphaVal, &Rational) {
        let (i, lifted) = self.locate(x);
        let p = &self.pieces[i];
        match lifted {
            None => (&p.image_of_left + &(x - p.left.value()).scale(&p.slope), &p.slope),
            Some(t) => {
                let v = &p.image_of_left + &(&t - p.left.value()).scale(&p.slope);
                (&v + &-Rational::one(), &p.slope)
            }
        }
    }

    /// Value of the lift at an arbitrary real `x`.
    pub fn lift_eval(&self, x: &AlphaVal) -> AlphaVal {
        self.lift_eval_with_slope(x).0
    }

    /// Lift value at `x` and the slope of the piece to the right of `x`.
    pub fn lift_eval_with_slope(&self, x: &AlphaVal) -> (AlphaVal, Rational) {
        let (n, f) = x.floor_frac();
        let (v, s) = self.eval_in_domain(&f);
        let s = s.clone();
        (&v + &Rational::from_integer(n), s)
    }

    pub fn eval(&self, x: &CirclePoint) -> CirclePoint {
        CirclePoint::new(self.eval_in_domain(x.value()).0)
    }

    /// Slope just to the right of `x`.
    pub fn right_slope(&self, x: &CirclePoint) -> &Rational {
        let (i, _) = self.locate(x.value());
        &self.pieces[i].slope
    }

    /// The unique `x ∈ [0, 1)` with `F(x) ≡ c (mod 1)`.
    fn preimage(&self, c: &AlphaVal) -> AlphaVal {
        let y0 = &self.pieces[0].image_of_left;
        let shift = (c - y0).floor();
        let c = c - &self.pieces[0].left.0.field().integer(shift);
        // c ∈ [y0, y0 + 1): largest i with y_i <= c.
        let mut lo = 0;
        let mut hi = self.pieces.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.pieces[mid].image_of_left <= c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = &self.pieces[lo];
        let x = p.left.value() + &(&c - &p.image_of_left).scale(&p.slope.recip());
        x.frac()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PAHomeo) -> PAHomeo {
        let (f, g) = (self, other);
        if let Some(t) = g.rotation_amount() {
            if let Some(s) = f.rotation_amount() {
                return PAHomeo::rotation(&(s + t));
            }
            return f.precompose_rotation(t);
        }
        if let Some(t) = f.rotation_amount() {
            return g.postcompose_rotation(t);
        }

        let lefts: Vec<AlphaVal> = g.pieces.iter().map(|p| p.left.0.clone()).collect();
        let mut pre: Vec<AlphaVal> = f.pieces.iter().map(|p| g.preimage(p.left.value())).collect();
        // Preimages of a sorted list are cyclically sorted.
        if let Some(cut) = (1..pre.len()).find(|&i| pre[i] < pre[i - 1]) {
            pre.rotate_left(cut);
        }
        let points = merge_dedup(lefts, pre);

        let raw: Vec<Raw> = points
            .into_iter()
            .map(|p| {
                let (gy, gs) = g.eval_in_domain(&p);
                let gs = gs.clone();
                let (fy, fs) = f.lift_eval_with_slope(&gy);
                (p, gs * fs, fy)
            })
            .collect();
        Self::from_raw(raw)
    }

    /// `x ↦ F(x + t)`.
    fn precompose_rotation(&self, t: &AlphaVal) -> PAHomeo {
        let mut raw: Vec<Raw> = self
            .pieces
            .iter()
            .map(|p| {
                let (n, left) = (p.left.value() - t).floor_frac();
                let y = &p.image_of_left - &p.left.0.field().integer(n);
                (left, p.slope.clone(), y)
            })
            .collect();
        if let Some(cut) = (1..raw.len()).find(|&i| raw[i].0 < raw[i - 1].0) {
            raw.rotate_left(cut);
        }
        Self::from_raw(raw)
    }

    /// `x ↦ F(x) + t`.
    fn postcompose_rotation(&self, t: &AlphaVal) -> PAHomeo {
        let raw = self.pieces.iter().map(|p| (p.left.0.clone(), p.slope.clone(), &p.image_of_left + t)).collect();
        Self::from_raw(raw)
    }

    pub fn inverse(&self) -> PAHomeo {
        let mut raw: Vec<Raw> = self
            .pieces
            .iter()
            .map(|p| {
                let (n, left) = p.image_of_left.floor_frac();
                let y = p.left.value() - &p.left.0.field().integer(n);
                (left, p.slope.recip(), y)
            })
            .collect();
        if let Some(cut) = (1..raw.len()).find(|&i| raw[i].0 < raw[i - 1].0) {
            raw.rotate_left(cut);
        }
        Self::from_raw(raw)
    }

    /// `self^n`, by repeated squaring; rotations in closed form.
    pub fn pow(&self, n: i64) -> PAHomeo {
        if let Some(t) = self.rotation_amount() {
            return PAHomeo::rotation(&t.scale(&Rational::from_integer(n.into())));
        }
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = PAHomeo::identity(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// Exact agreement of `self` and `other` on the positively oriented arc
    /// from `from` to `to` (the full circle when they coincide).
    pub fn agrees_on(&self, other: &PAHomeo, from: &CirclePoint, to: &CirclePoint) -> bool {
        let one = Rational::one();
        let start = from.value().clone();
        let end = if to > from { to.value().clone() } else { to.value() + &one };
        let mut points = vec![start.clone()];
        for p in self.pieces.iter().chain(other.pieces.iter()) {
            for cand in [p.left.value().clone(), p.left.value() + &one] {
                if cand > start && cand < end {
                    points.push(cand);
                }
            }
        }
        points.sort();
        points.dedup();
        points.iter().all(|u| {
            let (fu, fs) = self.lift_eval_with_slope(u);
            let (gu, gs) = other.lift_eval_with_slope(u);
            let diff = &fu - &gu;
            fs == gs && diff.is_rational() && diff.a().is_integer()
        })
    }

    /// Canonicalizes piece data sorted by left endpoint within `[0, 1)`.
    fn from_raw(raw: Vec<Raw>) -> PAHomeo {
        debug_assert!(!raw.is_empty());
        let mut merged: Vec<Raw> = Vec::with_capacity(raw.len());
        for piece in raw {
            match merged.last() {
                Some(last) if last.1 == piece.1 => {}
                _ => merged.push(piece),
            }
        }
        if merged.len() > 1 && merged[0].1 == merged[merged.len() - 1].1 {
            merged.remove(0);
        }
        if merged.len() == 1 {
            let (left, slope, y) = merged.pop().unwrap();
            debug_assert!(slope.is_one(), "a one-piece circle map must have slope 1");
            return PAHomeo::rotation(&(&y - &left));
        }
        let shift = merged[0].2.floor();
        let field = merged[0].0.field().clone();
        let shift = field.integer(shift);
        let pieces = merged
            .into_iter()
            .map(|(left, slope, y)| AffinePiece { left: CirclePoint(left), slope, image_of_left: &y - &shift })
            .collect();
        PAHomeo { pieces }
    }

    /// Checks every canonical-form and homeomorphism invariant.
    pub fn check_invariants(&self) -> Result<(), String> {
        let k = self.pieces.len();
        if k == 0 {
            return Err("no pieces".into());
        }
        let one = Rational::one();
        let y0 = &self.pieces[0].image_of_left;
        if y0.floor() != BigInt::zero() {
            return Err(format!("lift not normalized: F(left_0) = {y0}"));
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.slope.is_positive() {
                return Err(format!("piece {i} has non-positive slope"));
            }
            if p.left.value().floor() != BigInt::zero() {
                return Err(format!("piece {i} left endpoint outside [0,1)"));
            }
            let (next_left, next_y) = if i + 1 < k {
                let n = &self.pieces[i + 1];
                if n.left <= p.left {
                    return Err(format!("breakpoints {i}, {} not increasing", i + 1));
                }
                (n.left.value().clone(), n.image_of_left.clone())
            } else {
                let f = &self.pieces[0];
                (f.left.value() + &one, &f.image_of_left + &one)
            };
            let reached = &p.image_of_left + &(&next_left - p.left.value()).scale(&p.slope);
            if reached != next_y {
                return Err(format!("discontinuity after piece {i}"));
            }
            if k > 1 && p.slope == self.pieces[(i + 1) % k].slope {
                return Err(format!("pieces {i}, {} are collinear", (i + 1) % k));
            }
        }
        if k == 1 && (!self.pieces[0].left.value().is_zero() || !self.pieces[0].slope.is_one()) {
            return Err("one-piece map not anchored at 0 with slope 1".into());
        }
        Ok(())
    }

    /// One line per piece: `left slope image_of_left`, exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.pieces {
            out.push_str(&format!("{} {}/{} {}\n", p.left.value(), p.slope.numer(), p.slope.denom(), p.image_of_left));
        }
        out
    }

    /// Parses the output of [`PAHomeo::to_text`]; the result must already be
    /// in canonical form.
    pub fn from_text(alpha: &QuadIrr, text: &str) -> Result<PAHomeo, PamapError> {
        let mut pieces = Vec::new();
        for (line, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let perr = |reason: &str| PamapError::Parse { line: line + 1, reason: reason.to_string() };
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(perr("expected three fields"));
            }
            let left = AlphaVal::parse(alpha, toks[0]).map_err(|e| perr(&e.to_string()))?;
            let slope = parse_rational(toks[1]).ok_or_else(|| perr("bad slope"))?;
            let y = AlphaVal::parse(alpha, toks[2]).map_err(|e| perr(&e.to_string()))?;
            pieces.push(AffinePiece { left: CirclePoint(left), slope, image_of_left: y });
        }
        if pieces.is_empty() {
            return Err(PamapError::Empty);
        }
        let map = PAHomeo { pieces };
        map.check_invariants().map_err(|reason| PamapError::Parse { line: 0, reason })?;
        Ok(map)
    }
}

impl fmt::Debug for PAHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PAHomeo[\n")?;
        f.write_str(&self.to_text())?;
        f.write_str("]")
    }
}

impl fmt::Display for PAHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `num / den` when it is rational.
fn rational_ratio(num: &AlphaVal, den: &AlphaVal) -> Option<Rational> {
    if den.b().is_zero() {
        if !num.b().is_zero() || den.a().is_zero() {
            return None;
        }
        return Some(num.a() / den.a());
    }
    let s = num.b() / den.b();
    (num.a() == &(den.a() * &s)).then_some(s)
}

/// Merges two sorted lists into one sorted list without duplicates.
fn merge_dedup(a: Vec<AlphaVal>, b: Vec<AlphaVal>) -> Vec<AlphaVal> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let next = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Less => ia.next(),
                Ordering::Greater => ib.next(),
                Ordering::Equal => {
                    ib.next();
                    ia.next()
                }
            },
            (Some(_), None) => ia.next(),
            (None, Some(_)) => ib.next(),
            (None, None) => break,
        };
        let v = next.unwrap();
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al() -> QuadIrr {
        QuadIrr::sqrt2_minus_1()
    }

    fn pt(al: &QuadIrr, n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(al.ratio(n, d))
    }

    fn f1(al: &QuadIrr) -> PAHomeo {
        let s = |x: (i64, i64), y: (i64, i64)| (pt(al, x.0, x.1), al.ratio(y.0, y.1));
        PAHomeo::from_breakpoints(&[s((1, 10), (1, 10)), s((2, 5), (2, 5)), s((3, 5), (4, 5)), s((9, 10), (9, 10))])
            .unwrap()
    }

    #[test]
    fn rotations() {
        let al = al();
        assert_eq!(PAHomeo::rotation(&al.zero()), PAHomeo::identity(&al));
        let half = PAHomeo::rotation(&al.ratio(1, 2));
        assert!(half.compose(&half).is_identity());
        let r = PAHomeo::rotation(&al.ratio(2, 2048));
        assert_eq!(r.eval(&pt(&al, 0, 1)).value(), &al.ratio(1, 1024));
        let three_q = PAHomeo::rotation(&al.ratio(3, 4));
        assert_eq!(three_q.compose(&half), PAHomeo::rotation(&al.ratio(1, 4)));
        let t = al.alpha();
        assert_eq!(PAHomeo::rotation(&t).inverse(), PAHomeo::rotation(&(&al.integer(1) - &t)));
        assert!(PAHomeo::identity(&al).inverse().is_identity());
    }

    #[test]
    fn from_breakpoints_examples() {
        let al = al();
        let id = PAHomeo::from_breakpoints(&[(pt(&al, 0, 1), al.zero()), (pt(&al, 1, 2), al.ratio(1, 2))]).unwrap();
        assert!(id.is_identity());
        let m = PAHomeo::from_breakpoints(&[(pt(&al, 0, 1), al.zero()), (pt(&al, 1, 2), al.ratio(1, 4))]).unwrap();
        assert_eq!(m.piece_count(), 2);
        let slopes: Vec<_> = m.pieces().iter().map(|p| p.slope().clone()).collect();
        assert_eq!(slopes, vec![Rational::new(1.into(), 2.into()), Rational::new(3.into(), 2.into())]);
        let f = f1(&al);
        assert_eq!(f.eval(&pt(&al, 1, 2)).value(), &al.ratio(3, 5));
        f.check_invariants().unwrap();
    }

    #[test]
    fn from_breakpoints_errors() {
        let al = al();
        let e = PAHomeo::from_breakpoints(&[(pt(&al, 1, 2), al.zero()), (pt(&al, 1, 4), al.ratio(1, 2))]);
        assert_eq!(e, Err(PamapError::NonMonotone(0, 1)));
        let e = PAHomeo::from_breakpoints(&[(pt(&al, 0, 1), al.zero()), (pt(&al, 1, 2), al.ratio(3, 2))]);
        assert_eq!(e, Err(PamapError::RiseTooLarge(1, 0)));
        let e = PAHomeo::from_breakpoints(&[(pt(&al, 0, 1), al.zero()), (pt(&al, 1, 2), al.alpha())]);
        assert_eq!(e, Err(PamapError::IrrationalSlope(0, 1)));
        assert_eq!(PAHomeo::from_breakpoints(&[]), Err(PamapError::Empty));
    }

    #[test]
    fn compose_and_inverse() {
        let al = al();
        let f = f1(&al);
        let inv = f.inverse();
        assert!(f.compose(&inv).is_identity());
        assert!(inv.compose(&f).is_identity());
        assert_eq!(inv.inverse(), f);
        assert_eq!(inv.eval(&pt(&al, 3, 5)).value(), &al.ratio(1, 2));

        let beta = al.ratio(1, 2048);
        let shifted = f.compose(&PAHomeo::rotation(&beta.scale(&Rational::from_integer(2.into()))));
        let x = al.ratio(45, 100);
        let expect =
            &al.ratio(2, 5) + &(&(&x + &al.ratio(1, 1024)) - &al.ratio(2, 5)).scale(&Rational::from_integer(2.into()));
        assert_eq!(shifted.eval(&CirclePoint::new(x)).value(), &expect);
    }

    #[test]
    fn eval_examples() {
        let al = al();
        let f = f1(&al);
        assert_eq!(f.eval(&pt(&al, 95, 100)).value(), &al.ratio(95, 100));
        assert_eq!(f.eval(&pt(&al, 7, 10)).value(), &al.ratio(5, 6));
        let x = CirclePoint::new(al.alpha());
        assert_eq!(PAHomeo::identity(&al).eval(&x), x);
    }

    #[test]
    fn agreement_on_arcs() {
        let al = al();
        let f = f1(&al);
        let id = PAHomeo::identity(&al);
        assert!(f.agrees_on(&id, &pt(&al, 9, 10), &pt(&al, 11, 10)));
        assert!(f.agrees_on(&id, &pt(&al, 1, 10), &pt(&al, 4, 10)));
        assert!(!f.agrees_on(&id, &pt(&al, 1, 10), &pt(&al, 41, 100)));
        assert!(!f.agrees_on(&id, &pt(&al, 0, 1), &pt(&al, 0, 1)));
        let r = PAHomeo::rotation(&al.alpha());
        assert!(r.agrees_on(&r, &pt(&al, 0, 1), &pt(&al, 0, 1)));
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let al = al();
        let f = f1(&al);
        let mut acc = PAHomeo::identity(&al);
        for _ in 0..5 {
            acc = acc.compose(&f);
        }
        assert_eq!(f.pow(5), acc);
        assert!(f.pow(-5).compose(&acc).is_identity());
        assert!(f.pow(0).is_identity());
    }

    #[test]
    fn text_round_trip() {
        let al = al();
        let f = f1(&al).compose(&PAHomeo::rotation(&al.alpha()));
        let text = f.to_text();
        assert_eq!(PAHomeo::from_text(&al, &text).unwrap(), f);
        assert!(PAHomeo::from_text(&al, "0/1+0/1*alpha 2/1 0/1+0/1*alpha\n").is_err());
    }
}
