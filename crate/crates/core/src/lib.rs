//! Exact computations with piecewise-affine circle homeomorphisms.
//!
//! The crate builds explicit maps and group words showing that an
//! irrational rotation `T_α` is distorted in PAff₊(S¹): for a sparse
//! sequence of exponents `n` it produces words of length `O(log n)` over a
//! fixed finite generating set that evaluate *exactly* to `T_α^{-6n}`.
//!
//! * [`numbers`]: exact arithmetic in `Q + Qα`, continued fractions.
//! * [`pamap`]: canonical piecewise-affine circle maps.
//! * [`words`]: formal words, substitution, evaluation.
//! * [`constructions`]: the maps `f₁, f₂, H₁…H₅` and the identity they satisfy.
//! * [`lemma1`]: logarithmic-length conjugators `h_n`.
//! * [`pipeline`]: the assembled distortion words and growth table.
//! * [`cli`]: command-line front end.

pub mod cli;
pub mod constructions;
pub mod lemma1;
pub mod numbers;
pub mod pamap;
pub mod par;
pub mod pipeline;
pub mod words;

pub use numbers::{AlphaVal, QuadIrr, Rational};
pub use pamap::{CirclePoint, PAHomeo};
pub use words::{Assignment, GenId, Letter, Word};
