//! Finite Blaschke products: the only inner functions instantiated by this
//! crate, given exactly by their zeros and a unimodular constant.
//!
//! A product with zeros `a_1, ..., a_d` (repeated per multiplicity) and
//! constant `c` is
//!
//! ```text
//! B(z) = c · Π (z - a_i) / (1 - conj(a_i) z),   |a_i| < 1, |c| = 1.
//! ```
//!
//! Everything downstream works with coefficient truncations, so this module
//! also provides Maclaurin coefficients to any degree, the truncated
//! multiplication (lower-triangular Toeplitz) matrix, and a rigorous
//! geometric bound on the coefficient tail that the truncation discards.

use crate::linalg::C64;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Default bound on zero moduli. Zeros up to this modulus keep the
/// geometric tail decay usable at desk-scale truncation degrees.
pub const DEFAULT_ZERO_MARGIN: f64 = 0.9;

/// Tolerance for the unimodularity check on the constant.
const UNIMODULAR_TOL: f64 = 1e-12;

/// A finite Blaschke product. Immutable after construction; degree 0 means
/// the constant function (a "trivial" inner function whose model space is
/// the zero subspace).
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    constant: C64,
    margin: f64,
}

/// Coefficients of a one-variable function truncated at a fixed degree:
/// entry `k` is the coefficient of `z^k`, `0 <= k <= n`.
#[derive(Debug, Clone)]
pub struct CoeffVector {
    pub coeffs: DVector<C64>,
}

impl CoeffVector {
    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The H² norm of the truncation.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl BlaschkeProduct {
    /// Build a product from its zeros, enforcing `|a| <= margin` with the
    /// default margin and `|c| = 1` to machine precision.
    pub fn new(zeros: Vec<C64>, constant: C64) -> Result<Self> {
        Self::with_margin(zeros, constant, DEFAULT_ZERO_MARGIN)
    }

    pub fn with_margin(zeros: Vec<C64>, constant: C64, margin: f64) -> Result<Self> {
        assert!(margin > 0.0 && margin < 1.0, "margin must lie in (0, 1)");
        for a in &zeros {
            let m = a.norm();
            if m > margin {
                return Err(Error::InvalidZero {
                    zero: format_complex(*a),
                    modulus: m,
                    margin,
                });
            }
        }
        let defect = (constant.norm() - 1.0).abs();
        if defect > UNIMODULAR_TOL {
            return Err(Error::NonUnimodularConstant {
                constant: format_complex(constant),
                defect,
            });
        }
        Ok(Self {
            zeros,
            constant,
            margin,
        })
    }

    /// `z^d` with the default constant 1.
    pub fn monomial(degree: usize) -> Self {
        Self {
            zeros: vec![C64::new(0.0, 0.0); degree],
            constant: C64::new(1.0, 0.0),
            margin: DEFAULT_ZERO_MARGIN,
        }
    }

    /// The constant function 1 (degree 0).
    pub fn trivial() -> Self {
        Self::monomial(0)
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Largest zero modulus (0 for the constant function); the geometric
    /// ratio governing coefficient decay.
    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// The product with every zero doubled, i.e. the square `B²` up to the
    /// squared constant.
    pub fn squared(&self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&self.zeros);
        Self {
            zeros,
            constant: self.constant * self.constant,
            margin: self.margin,
        }
    }

    /// Evaluate at a point of the closed disk.
    pub fn evaluate(&self, z: C64) -> C64 {
        let mut acc = self.constant;
        for a in &self.zeros {
            acc *= (z - a) / (C64::new(1.0, 0.0) - a.conj() * z);
        }
        acc
    }

    /// Maclaurin coefficients through degree `n`.
    ///
    /// Each factor expands as `-a + (1 - |a|²) Σ_{k≥1} conj(a)^{k-1} z^k`;
    /// the product is their truncated convolution, which commutes with
    /// truncation because all factors are power series.
    pub fn taylor_coefficients(&self, n: usize) -> CoeffVector {
        let mut acc = DVector::<C64>::zeros(n + 1);
        acc[0] = self.constant;
        for a in &self.zeros {
            let factor = factor_series(*a, n);
            acc = convolve_truncated(&acc, &factor, n);
        }
        CoeffVector { coeffs: acc }
    }

    /// Truncated multiplication matrix: the lower-triangular Toeplitz
    /// matrix whose first column is `taylor_coefficients(n)`. Represents
    /// `P_n M_B` on inputs of degree <= n.
    pub fn multiplication_matrix(&self, n: usize) -> DMatrix<C64> {
        let col = self.taylor_coefficients(n).coeffs;
        let mut m = DMatrix::<C64>::zeros(n + 1, n + 1);
        for j in 0..=n {
            for i in j..=n {
                m[(i, j)] = col[i - j];
            }
        }
        m
    }

    /// Rigorous upper bound on the coefficient tail `‖B - T_m B‖` of the
    /// truncation at degree `m` (an H² norm of the discarded part).
    ///
    /// Bounding each factor's coefficients by their absolute values gives a
    /// positive dominating series for `|B_k|`; the tail of its square sum is
    /// evaluated term by term and closed off with a geometric remainder once
    /// the index leaves the computed prefix.
    pub fn tail_bound(&self, m: usize) -> f64 {
        abs_series_tail_bound(
            &self.abs_coefficient_series(4 * (m + 8)),
            self.degree(),
            self.max_zero_modulus(),
            m,
        )
    }

    /// Dominating absolute-coefficient series of the product, computed to
    /// the given length by exact convolution of the per-factor series.
    fn abs_coefficient_series(&self, len: usize) -> Vec<f64> {
        let mut acc = vec![0.0f64; len + 1];
        acc[0] = 1.0;
        for a in &self.zeros {
            let r = a.norm();
            let mut fac = vec![0.0f64; len + 1];
            if r == 0.0 {
                if len >= 1 {
                    fac[1] = 1.0;
                }
            } else {
                fac[0] = r;
                let scale = 1.0 - r * r;
                let mut pw = 1.0;
                for item in fac.iter_mut().skip(1) {
                    *item = scale * pw;
                    pw *= r;
                }
            }
            let mut next = vec![0.0f64; len + 1];
            for i in 0..=len {
                if acc[i] == 0.0 {
                    continue;
                }
                for j in 0..=(len - i) {
                    next[i + j] += acc[i] * fac[j];
                }
            }
            acc = next;
        }
        acc
    }
}

/// Coefficients of one factor `(z - a)/(1 - conj(a) z)` through degree `n`.
fn factor_series(a: C64, n: usize) -> DVector<C64> {
    let mut f = DVector::<C64>::zeros(n + 1);
    f[0] = -a;
    let scale = C64::new(1.0 - a.norm_sqr(), 0.0);
    let mut pw = C64::new(1.0, 0.0);
    for k in 1..=n {
        f[k] = scale * pw;
        pw *= a.conj();
    }
    f
}

/// Truncated convolution of two coefficient vectors.
pub fn convolve_truncated(a: &DVector<C64>, b: &DVector<C64>, n: usize) -> DVector<C64> {
    let mut out = DVector::<C64>::zeros(n + 1);
    for i in 0..a.len().min(n + 1) {
        let ai = a[i];
        if ai == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..b.len().min(n + 1 - i) {
            out[i + j] += ai * b[j];
        }
    }
    out
}

/// Tail bound for a dominating positive series `s` of a degree-`d` rational
/// function with pole radius `1/r`: `sqrt(Σ_{k>m} s_k²)` plus a geometric
/// closing term past the computed prefix.
pub(crate) fn abs_series_tail_bound(s: &[f64], d: usize, r: f64, m: usize) -> f64 {
    if r == 0.0 {
        // Polynomial of degree d: nothing past degree d.
        let mut sq = 0.0;
        for (k, v) in s.iter().enumerate().skip(m + 1) {
            if k <= d {
                sq += v * v;
            }
        }
        return sq.sqrt();
    }
    let mut sq = 0.0f64;
    let last = s.len() - 1;
    for v in s.iter().skip(m + 1) {
        sq += v * v;
    }
    // Past the prefix the term ratio is at most rho = r·(last + d)/(last + 1),
    // comfortably below 1 for the prefix lengths used here.
    let rho = r * ((last + d) as f64) / ((last + 1) as f64);
    let rho2 = (rho * rho).min(0.999);
    sq += s[last] * s[last] * rho2 / (1.0 - rho2);
    sq.sqrt()
}

/// Format a complex number in the CLI literal grammar (`a`, `a+bi`,
/// `a-bi`, `bi`).
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parse a complex literal: `a`, `a+bi`, `a-bi` or `bi` with decimal
/// floats.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    if let Some(body) = s.strip_suffix(&['i', 'I'][..]) {
        // Either pure imaginary `bi` or full `a±bi`. Scan for the sign that
        // separates the real part from the imaginary part (not a leading
        // sign, not an exponent sign).
        let bytes = body.as_bytes();
        let mut split = None;
        for (idx, &ch) in bytes.iter().enumerate().skip(1) {
            if (ch == b'+' || ch == b'-') && bytes[idx - 1] != b'e' && bytes[idx - 1] != b'E' {
                split = Some(idx);
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad real part in `{s}`")))?;
                let im_text = &body[idx..];
                let im: f64 = im_text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad imaginary part in `{s}`")))?;
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = body
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad imaginary literal `{s}`")))?;
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad real literal `{s}`")))?;
        Ok(C64::new(re, 0.0))
    }
}

/// Parse a semicolon-separated zero list (empty input means degree 0).
pub fn parse_zero_list(text: &str) -> Result<Vec<C64>> {
    let s = text.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(parse_complex).collect()
}
