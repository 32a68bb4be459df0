//! Numerical workbench for rank certification of joint shift-invariant
//! subspaces of the Hardy space over the bidisc, realized on finite
//! coefficient truncations.
//!
//! The library constructs, for a pair of finite Blaschke products
//! `(phi, psi)`, every object needed to certify that the subspace
//! `S = (Q_phi ⊗ Q_psi)^⊥` of the two-variable Hardy space has rank 2
//! as a joint invariant subspace of the coordinate shifts:
//!
//! * [`blaschke`] — finite Blaschke products, Taylor coefficients,
//!   truncated multiplication (Toeplitz) matrices and rigorous tail bounds;
//! * [`model_space`] — one-variable model spaces `Q_phi`, compressed
//!   shifts, the conjugation (C-symmetry) `f ↦ M_z^*(phi·conj(f))`, and the
//!   single-generator check for Beurling subspaces;
//! * [`bidisc`] — the truncated two-variable space, the shift pair,
//!   the defect projection onto `S`, and orthonormal frames for `S`, `E`
//!   and `Ẽ` together with their structural identities;
//! * [`rank_engine`] — Krylov orbit spans, coverage measurement, the
//!   explicit orthogonal witness construction, the bilinear vanishing
//!   identity, semi-invariant compression, and certificate assembly;
//! * [`cli`] — the command surface (`certify`, `witness`, `frames`,
//!   `selftest`) used by the `bidisc-rank` binary.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to use from multiple threads.

pub mod blaschke;
pub mod cli;
pub mod linalg;
pub mod model_space;
pub mod rank_engine;

pub mod bidisc;

use thiserror::Error;

/// Errors shared across the workbench modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A Blaschke zero lies outside the allowed disk `|a| <= margin`.
    #[error("invalid zero {zero}: |zero| = {modulus:.6} exceeds the allowed margin {margin}")]
    InvalidZero {
        zero: String,
        modulus: f64,
        margin: f64,
    },

    /// The unimodular constant of a Blaschke product is not on the circle.
    #[error("constant {constant} is not unimodular (| |c| - 1 | = {defect:.3e})")]
    NonUnimodularConstant { constant: String, defect: f64 },

    /// An operation that needs a nontrivial model space was given a
    /// degree-zero inner function.
    #[error("degenerate inner function (degree 0): {context}")]
    DegenerateInner { context: &'static str },

    /// Two constructions of the same subspace disagree beyond tolerance.
    #[error("coverage failure in {context}: residual {residual:.3e} exceeds tolerance {tol:.3e}{detail}")]
    CoverageFailure {
        context: &'static str,
        residual: f64,
        tol: f64,
        detail: String,
    },

    /// A monomial power would push products past the reliable window.
    #[error("window overflow: requested power {requested} exceeds the safe limit {limit}")]
    WindowOverflow { requested: usize, limit: usize },

    /// An operation received an (exactly) zero input vector.
    #[error("zero input: {context}")]
    ZeroInput { context: &'static str },

    /// A verified hypothesis of an operation does not hold.
    #[error("precondition violated: {which} (residual {residual:.3e}, tolerance {tol:.3e})")]
    PreconditionViolation {
        which: &'static str,
        residual: f64,
        tol: f64,
    },

    /// Coefficient data with the wrong dimensions.
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },

    /// Malformed textual input (complex literals, zero lists, frame files).
    #[error("parse error: {0}")]
    Parse(String),

    /// The truncation degree cannot support the requested computation.
    #[error("truncation too small: {context} (need n >= {needed}, got {got})")]
    TruncationTooSmall {
        context: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

// pub use blaschke::{BlaschkeProduct, CoeffVector};
// pub use bidisc::{BidiscVector, FrameLabel, SubspaceFrame, TiltedCoefficients};
pub use model_space::{Conjugation, ModelSpaceFrame};
// pub use rank_engine::{KrylovReport, RankCertificate, Verdict};
