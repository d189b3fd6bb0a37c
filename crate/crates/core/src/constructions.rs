//! The explicit maps `f₁`, `f₂`, the tower `H₁ … H₅(β)`, and the group
//! identity `x t_quarter H₅ t_quarter⁻¹ x⁻¹ H₅ = x²` they produce when
//! `x = T_β`.
//!
//! Every claim is checked exactly: arc agreements through
//! [`PAHomeo::agrees_on`], identities through canonical-form equality.

use std::collections::HashMap;
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::numbers::{AlphaVal, QuadIrr, Rational};
use crate::pamap::{CirclePoint, PAHomeo};
use crate::words::{Assignment, GenId, Letter, Word};

/// Generator names shared by the symbolic identity and the pipeline.
pub mod gens {
    pub const X: &str = "x";
    pub const F1: &str = "f1";
    pub const F2: &str = "f2";
    pub const T_HALF: &str = "t_half";
    pub const T_QUARTER: &str = "t_quarter";
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("beta = {0} is outside (0, 1/1000)")]
    BetaOutOfRange(String),
    #[error("H level must be in 1..=5, got {0}")]
    BadLevel(u8),
}

/// Upper end of the admissible range for `β`.
pub fn beta_max() -> Rational {
    Rational::new(1.into(), 1000.into())
}

fn check_beta(beta: &AlphaVal) -> Result<(), ConstructionError> {
    let max = beta.field().rational(beta_max());
    if beta.sign().is_gt() && beta < &max {
        Ok(())
    } else {
        Err(ConstructionError::BetaOutOfRange(beta.to_string()))
    }
}

fn sample(al: &QuadIrr, x: (i64, i64), y: (i64, i64)) -> (CirclePoint, AlphaVal) {
    (CirclePoint::new(al.ratio(x.0, x.1)), al.ratio(y.0, y.1))
}

/// Slope 2 on `[0.4, 0.6]`, identity on `[0.9, 1.1]` and `[0.1, 0.4]`,
/// slope 1/3 on `[0.6, 0.9]`.
pub fn make_f1(al: &QuadIrr) -> PAHomeo {
    PAHomeo::from_breakpoints(&[
        sample(al, (1, 10), (1, 10)),
        sample(al, (2, 5), (2, 5)),
        sample(al, (3, 5), (4, 5)),
        sample(al, (9, 10), (9, 10)),
    ])
    .expect("f1 samples are monotone")
}

/// `2x` on `[0, 0.49]`, slope 1/99 on `[0.49, 0.985]`, identity on
/// `[0.985, 1]`.
pub fn make_f2(al: &QuadIrr) -> PAHomeo {
    PAHomeo::from_breakpoints(&[
        sample(al, (0, 1), (0, 1)),
        sample(al, (49, 100), (98, 100)),
        sample(al, (197, 200), (197, 200)),
    ])
    .expect("f2 samples are monotone")
}

/// The maps of the tower for one `β`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub beta: AlphaVal,
    pub f1: PAHomeo,
    pub f2: PAHomeo,
    /// `h[i]` is `H_{i+1}`.
    pub h: [PAHomeo; 5],
}

impl Tower {
    pub fn new(beta: &AlphaVal) -> Result<Self, ConstructionError> {
        check_beta(beta)?;
        let al = beta.field();
        let rot = |t: AlphaVal| PAHomeo::rotation(&t);
        let two = Rational::from_integer(2.into());
        let two_beta = beta.scale(&two);
        let t_half = rot(al.ratio(1, 2));
        let f1 = make_f1(al);
        let f2 = make_f2(al);

        let h1 = rot(-&two_beta).compose(&f1).compose(&rot(two_beta.clone())).compose(&f1.inverse());
        let h2 = t_half.compose(&h1.inverse()).compose(&t_half).compose(&h1);
        let h3 = rot(two_beta).compose(&h2);
        let h4 = f2.inverse().compose(&h3).compose(&f2);
        let h5 = t_half.compose(&h4).compose(&t_half).compose(&h4);
        Ok(Tower { beta: beta.clone(), f1, f2, h: [h1, h2, h3, h4, h5] })
    }

    pub fn level(&self, level: u8) -> Result<&PAHomeo, ConstructionError> {
        match level {
            1..=5 => Ok(&self.h[level as usize - 1]),
            _ => Err(ConstructionError::BadLevel(level)),
        }
    }

    /// The assignment `x ↦ T_β` plus the fixed letters of the identity.
    pub fn assignment(&self) -> Assignment {
        let al = self.beta.field();
        Assignment::new(al)
            .with(gens::X, PAHomeo::rotation(&self.beta))
            .with(gens::F1, self.f1.clone())
            .with(gens::F2, self.f2.clone())
            .with(gens::T_HALF, PAHomeo::rotation(&al.ratio(1, 2)))
            .with(gens::T_QUARTER, PAHomeo::rotation(&al.ratio(1, 4)))
    }
}

/// `H_level(β)` together with its defining word over `{x, f1, f2, t_half}`.
pub fn make_h(level: u8, beta: &AlphaVal) -> Result<(PAHomeo, Word), ConstructionError> {
    let tower = Tower::new(beta)?;
    let map = tower.level(level)?.clone();
    Ok((map, h_word(level)?))
}

fn tower_defs() -> HashMap<GenId, Word> {
    let parse = |s: &str| s.parse::<Word>().expect("static word");
    let mut defs = HashMap::new();
    defs.insert(GenId::new("H1"), parse("x^-1 x^-1 f1 x x f1^-1"));
    defs.insert(GenId::new("H2"), parse("t_half H1^-1 t_half H1"));
    defs.insert(GenId::new("H3"), parse("x x H2"));
    defs.insert(GenId::new("H4"), parse("f2^-1 H3 f2"));
    defs.insert(GenId::new("H5"), parse("t_half H4 t_half H4"));
    defs
}

/// Fully expanded word of `H_level`.
pub fn h_word(level: u8) -> Result<Word, ConstructionError> {
    if !(1..=5).contains(&level) {
        return Err(ConstructionError::BadLevel(level));
    }
    let top = Word::letter(Letter::pos(format!("H{level}").as_str()));
    Ok(top.substitute(&tower_defs()).expect("tower definitions are acyclic"))
}

/// The map `x ↦ G(2x)/2` on `[0, 1/2)`, and either the identity or
/// `x ↦ G(2x − 1)/2 + 1/2` on `[1/2, 1)`, for `G` the lift of `h` fixing
/// `0`. `None` when `h(0) ≠ 0`.
pub fn scaled_copies(h: &PAHomeo, upper_copy: bool) -> Option<PAHomeo> {
    let al = h.field();
    let zero = al.zero();
    let f0 = h.lift_eval(&zero);
    if !(f0.is_rational() && f0.a().is_integer()) {
        return None;
    }
    let mut points = vec![zero.clone()];
    points.extend(h.pieces().iter().map(|p| p.left().value().clone()).filter(|x| !x.is_zero()));
    points.sort();
    let half = Rational::new(1.into(), 2.into());
    let lower: Vec<(AlphaVal, AlphaVal)> =
        points.iter().map(|x| (x.scale(&half), (&h.lift_eval(x) - &f0).scale(&half))).collect();
    let mut samples: Vec<(CirclePoint, AlphaVal)> =
        lower.iter().map(|(x, y)| (CirclePoint::new(x.clone()), y.clone())).collect();
    if upper_copy {
        samples.extend(lower.iter().map(|(x, y)| (CirclePoint::new(x + &half), y + &half)));
    } else {
        samples.push((CirclePoint::new(al.rational(half.clone())), al.rational(half)));
    }
    PAHomeo::from_breakpoints(&samples).ok()
}

/// Outcome of every claim made about the tower, for one `β`.
#[derive(Clone, Debug)]
pub struct Lemma2Report {
    pub beta: AlphaVal,
    pub checks: Vec<(&'static str, bool)>,
    pub overall: bool,
}

impl Lemma2Report {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| *n == name).map(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let checks: serde_json::Map<String, serde_json::Value> =
            self.checks.iter().map(|(n, ok)| (n.to_string(), json!(ok))).collect();
        json!({
            "beta": self.beta.to_string(),
            "beta_decimal": self.beta.to_decimal(12),
            "checks": checks,
            "overall": self.overall,
        })
    }
}

impl fmt::Display for Lemma2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "beta: {} (~{})", self.beta, self.beta.to_decimal(12))?;
        for (name, ok) in &self.checks {
            writeln!(f, "  {name:<14} {}", if *ok { "ok" } else { "FAILED" })?;
        }
        write!(f, "  {:<14} {}", "overall", self.overall)
    }
}

pub fn verify_lemma2(beta: &AlphaVal) -> Result<Lemma2Report, ConstructionError> {
    let tower = Tower::new(beta)?;
    let al = beta.field();
    let pt = |n, d| CirclePoint::new(al.ratio(n, d));
    let rot = |t: &AlphaVal| PAHomeo::rotation(t);
    let id = PAHomeo::identity(al);
    let two = Rational::from_integer(2.into());
    let two_beta = beta.scale(&two);
    let half = al.ratio(1, 2);
    let quarter = al.ratio(1, 4);
    let t_half = rot(&half);
    let [h1, h2, h3, h4, h5] = &tower.h;

    let eq3_lhs = rot(&(&two_beta + &half)).compose(h3).compose(&rot(&-(&two_beta + &half))).compose(h3);
    let eq5_lhs = rot(&(beta + &quarter)).compose(h5).compose(&rot(&-(beta + &quarter))).compose(h5);

    let checks = vec![
        ("H1_shift", h1.agrees_on(&rot(&two_beta), &pt(41, 100), &pt(79, 100))),
        ("H1_fix", h1.agrees_on(&id, &pt(91, 100), &pt(109, 100))),
        ("H2_shift", h2.agrees_on(&rot(&-&two_beta), &pt(95, 100), &pt(1, 1))),
        ("H2_involution", t_half.compose(h2).compose(&t_half).compose(h2).is_identity()),
        ("H3_fix", h3.agrees_on(&id, &pt(95, 100), &pt(1, 1))),
        ("eq3", eq3_lhs == rot(&beta.scale(&Rational::from_integer(4.into())))),
        ("H4_structure", scaled_copies(h3, false).is_some_and(|s| &s == h4)),
        ("H5_structure", scaled_copies(h3, true).is_some_and(|s| &s == h5)),
        ("eq5", eq5_lhs == rot(&two_beta)),
    ];
    let overall = checks.iter().all(|(_, ok)| *ok);
    Ok(Lemma2Report { beta: beta.clone(), checks, overall })
}

/// The identity `x^{k₁} g₁ x^{k₂} g₂ ⋯ x^{k_l} g_l = x^k` in block form.
#[derive(Clone, Debug)]
pub struct IdentityEquation {
    pub lhs: Word,
    pub rhs: Word,
    /// `(k_i, g_i)` in order.
    pub blocks: Vec<(i64, Letter)>,
    pub k: i64,
    /// `k − (k₁ + ⋯ + k_l)`.
    pub m: i64,
}

impl IdentityEquation {
    pub fn l(&self) -> usize {
        self.blocks.len()
    }

    /// `S_j = k₁ + ⋯ + k_j` for every block.
    pub fn partial_sums(&self) -> Vec<i64> {
        self.blocks
            .iter()
            .scan(0i64, |s, (k, _)| {
                *s += k;
                Some(*s)
            })
            .collect()
    }

    /// The `g` letters allowed in the identity.
    pub fn allowed_letters() -> Vec<Letter> {
        [gens::F1, gens::F2, gens::T_HALF, gens::T_QUARTER]
            .iter()
            .flat_map(|g| [Letter::pos(*g), Letter::neg(*g)])
            .collect()
    }

    pub fn letters_allowed(&self) -> bool {
        let allowed = Self::allowed_letters();
        self.blocks.iter().all(|(_, g)| allowed.contains(g))
    }

    /// The rewritten form `∏ x^{S_j} g_j x^{-S_j} = x^m`, as one word.
    pub fn conjugate_form(&self) -> Word {
        let x = Word::letter(Letter::pos(gens::X));
        let mut w = Word::empty();
        for (s, (_, g)) in self.partial_sums().into_iter().zip(&self.blocks) {
            w.extend(&x.power(s));
            w.push(g.clone());
            w.extend(&x.power(-s));
        }
        w
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "blocks": self.blocks.iter().map(|(k, g)| json!({"k": k, "g": g.to_string()})).collect::<Vec<_>>(),
            "k": self.k,
            "l": self.l(),
            "m": self.m,
            "net_x_lhs": self.lhs.net_exponent(&GenId::new(gens::X)),
            "net_x_rhs": self.rhs.net_exponent(&GenId::new(gens::X)),
        })
    }
}

/// Expands `x t_quarter H₅ t_quarter⁻¹ x⁻¹ H₅` down to the letters
/// `{x, f1, f2, t_half, t_quarter}` and splits it into `x`-blocks.
///
/// `x`-runs are summed; `g` letters are never cancelled against each other,
/// so the block sequence is exactly what the substitution produced.
pub fn identity_equation() -> IdentityEquation {
    let top: Word = "x t_quarter H5 t_quarter^-1 x^-1 H5".parse().expect("static word");
    let lhs = top.substitute(&tower_defs()).expect("tower definitions are acyclic");
    let x = GenId::new(gens::X);
    let rhs = Word::letter(Letter::pos(gens::X)).power(2);

    let mut blocks = Vec::new();
    let mut run = 0i64;
    for l in lhs.letters() {
        if l.gen() == &x {
            run += l.exp();
        } else {
            blocks.push((run, l.clone()));
            run = 0;
        }
    }
    debug_assert_eq!(run, 0, "the left side ends with a g letter");
    let k = rhs.net_exponent(&x);
    let total: i64 = blocks.iter().map(|(k, _)| k).sum();
    IdentityEquation { lhs, rhs, blocks, k, m: k - total }
}

/// `true` iff `β` lies in the range the tower claims are made for.
pub fn beta_in_range(beta: &AlphaVal) -> bool {
    check_beta(beta).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al() -> QuadIrr {
        QuadIrr::sqrt2_minus_1()
    }

    #[test]
    fn f1_values() {
        let al = al();
        let f1 = make_f1(&al);
        let at = |n, d| f1.eval(&CirclePoint::new(al.ratio(n, d))).into_value();
        assert_eq!(at(1, 2), al.ratio(3, 5));
        assert_eq!(at(95, 100), al.ratio(95, 100));
        assert_eq!(at(7, 10), al.ratio(5, 6));
        // The identity pieces on [0.9, 1.1] and [0.1, 0.4] are one piece.
        assert_eq!(f1.piece_count(), 3);
        let id = PAHomeo::identity(&al);
        assert!(f1.agrees_on(&id, &CirclePoint::new(al.ratio(9, 10)), &CirclePoint::new(al.ratio(11, 10))));
    }

    #[test]
    fn f2_values() {
        let al = al();
        let f2 = make_f2(&al);
        let at = |n, d| f2.eval(&CirclePoint::new(al.ratio(n, d))).into_value();
        assert_eq!(at(1, 4), al.ratio(1, 2));
        assert_eq!(at(99, 100), al.ratio(99, 100));
        assert_eq!(at(49, 100), al.ratio(98, 100));
        assert_eq!(f2.piece_count(), 3);
        assert_eq!(f2.pieces()[1].slope(), &Rational::new(1.into(), 99.into()));
        let id = PAHomeo::identity(&al);
        assert!(f2.agrees_on(&id, &CirclePoint::new(al.ratio(197, 200)), &CirclePoint::new(al.ratio(1, 1))));
    }

    #[test]
    fn beta_range_enforced() {
        let al = al();
        assert!(matches!(Tower::new(&al.ratio(1, 1000)), Err(ConstructionError::BetaOutOfRange(_))));
        assert!(matches!(Tower::new(&al.zero()), Err(ConstructionError::BetaOutOfRange(_))));
        assert!(matches!(make_h(6, &al.ratio(1, 2048)), Err(ConstructionError::BadLevel(6))));
    }

    #[test]
    fn tower_claims() {
        let al = al();
        let beta = al.ratio(1, 2048);
        let t = Tower::new(&beta).unwrap();
        let id = PAHomeo::identity(&al);
        let pt = |n, d| CirclePoint::new(al.ratio(n, d));
        assert!(t.h[2].agrees_on(&id, &pt(95, 100), &pt(1, 1)));
        let x = al.ratio(1, 5);
        let h5 = t.h[4].lift_eval(&x);
        let h3 = t.h[2].lift_eval(&x.scale(&Rational::from_integer(2.into())));
        assert_eq!(CirclePoint::new(h5), CirclePoint::new(h3.scale(&Rational::new(1.into(), 2.into()))));
        let half = PAHomeo::rotation(&al.ratio(1, 2));
        assert!(half.compose(&t.h[1]).compose(&half).compose(&t.h[1]).is_identity());
    }

    #[test]
    fn words_match_maps() {
        let al = al();
        let beta = al.ratio(1, 2048);
        let tower = Tower::new(&beta).unwrap();
        let env = tower.assignment();
        for level in 1..=5 {
            let (map, word) = make_h(level, &beta).unwrap();
            assert_eq!(word.evaluate(&env).unwrap(), map, "H{level}");
        }
        let (_, w2) = make_h(2, &beta).unwrap();
        let h2 = w2.evaluate(&env).unwrap();
        let pt = |n, d| CirclePoint::new(al.ratio(n, d));
        assert!(h2.agrees_on(
            &PAHomeo::rotation(&-beta.scale(&Rational::from_integer(2.into()))),
            &pt(95, 100),
            &pt(1, 1)
        ));
    }

    #[test]
    fn report_for_small_beta() {
        let al = al();
        let r = verify_lemma2(&al.ratio(1, 2048)).unwrap();
        assert_eq!(r.checks.len(), 9);
        assert!(r.overall, "{r}");
        assert_eq!(r.check("eq5"), Some(true));
        assert_eq!(r.to_json()["overall"], json!(true));
    }

    #[test]
    fn equation_counts() {
        let eq = identity_equation();
        let x = GenId::new(gens::X);
        assert_eq!(eq.lhs.net_exponent(&x), 8);
        assert_eq!(eq.rhs.net_exponent(&x), 2);
        assert_eq!(eq.m, -6);
        assert!(eq.letters_allowed());
        assert_ne!(eq.k, eq.blocks.iter().map(|(k, _)| k).sum::<i64>());
        assert_eq!(eq.l(), 38);
    }

    #[test]
    fn reduction_preserves_value() {
        let al = al();
        let env = Tower::new(&al.ratio(1, 4096)).unwrap().assignment();
        let eq = identity_equation();
        let reduced = eq.lhs.free_reduce();
        assert_eq!(reduced.evaluate(&env).unwrap(), eq.lhs.evaluate(&env).unwrap());
    }
}
