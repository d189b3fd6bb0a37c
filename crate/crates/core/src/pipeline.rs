//! Certified short words for powers of `T_α`.
//!
//! The identity from [`crate::constructions`] is rewritten as a product of
//! conjugates `x^{S_j} g_j x^{-S_j} = x^m` (`S_j` the partial sums of the
//! `x`-exponents, `m = −6`). Putting `x = T_α^n` with `frac(nα) ∈ (0, β₀)`
//! and replacing each conjugate by the short word from [`crate::lemma1`]
//! gives a word of length `O(log n)` over a fixed 9-letter alphabet that
//! evaluates exactly to `T_α^{mn}`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::constructions::{self, gens, IdentityEquation};
use crate::lemma1::{Lemma1Ctx, Lemma1Error, Lemma1Names};
use crate::numbers::{AlphaVal, QuadIrr, Rational};
use crate::pamap::PAHomeo;
use crate::par::{self, Exec};
use crate::words::{Assignment, GenId, Letter, Word};

pub const T_ALPHA: &str = "T_alpha";
pub const H_F1: &str = "h_f1";
pub const R_F1: &str = "r_f1";
pub const H_F2: &str = "h_f2";
pub const R_F2: &str = "r_f2";

/// All generator names, in a fixed order.
pub const GENERATORS: [&str; 9] = [T_ALPHA, gens::F1, gens::F2, gens::T_HALF, gens::T_QUARTER, H_F1, R_F1, H_F2, R_F2];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("frac({n}*alpha) is not in (0, 1/1000)")]
    NotInSubsequence { n: u64 },
    #[error("n = {0} does not fit in 64 bits")]
    TooLarge(BigInt),
    #[error("count must be at least 1")]
    EmptyTable,
    #[error("no conjugation context for generator {0}")]
    NoContext(GenId),
    #[error(transparent)]
    Lemma1(#[from] Lemma1Error),
}

/// `β₀`: the subsequence condition is `frac(nα) ∈ (0, β₀)`.
pub fn beta0() -> Rational {
    constructions::beta_max()
}

/// The finite generating set and the two conjugation contexts.
#[derive(Debug)]
pub struct GenSet {
    alpha: QuadIrr,
    assignment: Assignment,
    f1_ctx: Lemma1Ctx,
    f2_ctx: Lemma1Ctx,
    equation: IdentityEquation,
}

pub fn build_genset(alpha: &QuadIrr) -> Result<GenSet, PipelineError> {
    GenSet::new(alpha)
}

impl GenSet {
    pub fn new(alpha: &QuadIrr) -> Result<Self, PipelineError> {
        let ctx = |a: Rational, m: u32, h: &str, r: &str| {
            Lemma1Ctx::new(alpha.alpha(), a, m, Lemma1Names { t_gamma: T_ALPHA.into(), h: h.into(), r: r.into() })
        };
        let f1_ctx = ctx(Rational::new(9.into(), 10.into()), 21, H_F1, R_F1)?;
        let f2_ctx = ctx(Rational::new(197.into(), 200.into()), 134, H_F2, R_F2)?;
        let assignment = Assignment::new(alpha)
            .with(gens::F1, constructions::make_f1(alpha))
            .with(gens::F2, constructions::make_f2(alpha))
            .with(gens::T_HALF, PAHomeo::rotation(&alpha.ratio(1, 2)))
            .with(gens::T_QUARTER, PAHomeo::rotation(&alpha.ratio(1, 4)))
            .merged(f1_ctx.assignment())
            .merged(f2_ctx.assignment());
        Ok(GenSet { alpha: alpha.clone(), assignment, f1_ctx, f2_ctx, equation: constructions::identity_equation() })
    }

    pub fn alpha(&self) -> &QuadIrr {
        &self.alpha
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn equation(&self) -> &IdentityEquation {
        &self.equation
    }

    /// `m = k − Σ kᵢ`.
    pub fn m(&self) -> i64 {
        self.equation.m
    }

    pub fn context(&self, g: &GenId) -> Option<&Lemma1Ctx> {
        match g.name() {
            gens::F1 => Some(&self.f1_ctx),
            gens::F2 => Some(&self.f2_ctx),
            _ => None,
        }
    }

    /// `frac(nα)`.
    pub fn frac_n_alpha(&self, n: u64) -> AlphaVal {
        self.alpha.alpha().scale(&Rational::from_integer(n.into())).frac()
    }

    pub fn in_subsequence(&self, n: u64) -> bool {
        let f = self.frac_n_alpha(n);
        f.sign().is_gt() && f < self.alpha.rational(beta0())
    }

    fn is_rotation_letter(&self, g: &Letter) -> bool {
        self.assignment.get(g.gen()).is_some_and(PAHomeo::is_rotation)
    }

    /// The word for `T_α^{m·n}`.
    pub fn distortion_word(&self, n: u64) -> Result<Word, PipelineError> {
        if !self.in_subsequence(n) {
            return Err(PipelineError::NotInSubsequence { n });
        }
        let mut word = Word::empty();
        for (s, (_, g)) in self.equation.partial_sums().into_iter().zip(&self.equation.blocks) {
            if self.is_rotation_letter(g) {
                word.push(g.clone());
                continue;
            }
            let ctx = self.context(g.gen()).ok_or_else(|| PipelineError::NoContext(g.gen().clone()))?;
            word.extend(&ctx.conj_word(n as i64 * s, g, &self.assignment)?);
        }
        Ok(word)
    }

    /// Constructive upper bound on `|distortion_word(n)|`.
    pub fn length_bound(&self, n: u64) -> u64 {
        self.equation
            .partial_sums()
            .into_iter()
            .zip(&self.equation.blocks)
            .map(|(s, (_, g))| match self.context(g.gen()) {
                Some(ctx) if s != 0 => ctx.conj_length_bound(n as i64 * s),
                _ => 1,
            })
            .sum()
    }

    /// `T_α^{m·n}`.
    pub fn target(&self, n: u64) -> PAHomeo {
        let power = Rational::from_integer(BigInt::from(n) * self.m());
        PAHomeo::rotation(&self.alpha.alpha().scale(&power))
    }

    pub fn verify_distortion_word(&self, n: u64, w: &Word) -> bool {
        w.evaluate(&self.assignment).is_ok_and(|map| map == self.target(n))
    }

    pub fn row(&self, n: u64) -> Result<DistortionRow, PipelineError> {
        let word = self.distortion_word(n)?;
        let verified = self.verify_distortion_word(n, &word);
        let word_len = word.len() as u64;
        let log2_n = (n as f64).log2();
        let len = Rational::from_integer(word_len.into());
        let ratio_log = Rational::from_float(word_len as f64 / log2_n).unwrap_or_else(|| len.clone());
        let ratio_linear = len / Rational::from_integer((n as i64 * self.m().abs()).into());
        Ok(DistortionRow {
            n,
            frac_n_alpha: self.frac_n_alpha(n),
            word_len,
            bound: self.length_bound(n),
            target_power: n as i64 * self.m(),
            log2_n,
            ratio_log,
            ratio_linear,
            verified,
        })
    }
}

/// One line of the growth table.
#[derive(Debug, Clone)]
pub struct DistortionRow {
    pub n: u64,
    pub frac_n_alpha: AlphaVal,
    pub word_len: u64,
    pub bound: u64,
    /// `n·m`; the word represents `T_α^{target_power}`.
    pub target_power: i64,
    pub log2_n: f64,
    /// `word_len / log₂ n`.
    pub ratio_log: Rational,
    /// `word_len / (|m|·n)`, exact.
    pub ratio_linear: Rational,
    pub verified: bool,
}

pub const CSV_HEADER: &str = "n,frac_n_alpha_decimal,target_power,word_len,log2_n,ratio_log,ratio_linear,verified";

const CSV_DIGITS: usize = 12;

impl DistortionRow {
    pub fn csv_line(&self) -> String {
        let log2 = Rational::from_float(self.log2_n).expect("finite log");
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.frac_n_alpha.to_decimal(CSV_DIGITS),
            self.target_power,
            self.word_len,
            crate::numbers::format_sig(&log2, CSV_DIGITS),
            crate::numbers::format_sig(&self.ratio_log, CSV_DIGITS),
            crate::numbers::format_sig(&self.ratio_linear, CSV_DIGITS),
            self.verified
        )
    }
}

pub fn to_csv(rows: &[DistortionRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// The exponents `n` of the first `count` rows.
pub fn table_exponents(alpha: &QuadIrr, count: usize) -> Result<Vec<u64>, PipelineError> {
    alpha.orbit_entries(&beta0(), count).into_iter().map(|q| q.to_u64().ok_or(PipelineError::TooLarge(q))).collect()
}

pub fn distortion_table(alpha: &QuadIrr, count: usize) -> Result<Vec<DistortionRow>, PipelineError> {
    distortion_table_with(alpha, count, Exec::default())
}

pub fn distortion_table_with(alpha: &QuadIrr, count: usize, exec: Exec) -> Result<Vec<DistortionRow>, PipelineError> {
    if count == 0 {
        return Err(PipelineError::EmptyTable);
    }
    let gs = GenSet::new(alpha)?;
    let ns = table_exponents(alpha, count)?;
    par::try_map_collect(exec, &ns, |&n| gs.row(n))
}
