//! Dense complex linear algebra helpers shared by every module: inner
//! products, Gram–Schmidt orthonormalization with rank-revealing drops,
//! principal-angle style subspace gaps, and a small-matrix eigensolver.
//!
//! Conventions: the inner product is linear in the **first** argument,
//! `inner(a, b) = sum_i a_i * conj(b_i)`, matching the pairing used in the
//! analytic identities this crate verifies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

pub type C64 = Complex64;

/// Drop tolerance for rank-revealing orthogonalization.
pub const DROP_TOL: f64 = 1e-10;

/// `sum_i a_i * conj(b_i)`.
pub fn inner(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis accumulator with re-orthogonalization and a
/// rank-revealing drop test: a candidate whose residual after projection is
/// below `drop_tol` (relative to its original norm) contributes no new
/// direction and is discarded.
pub struct Orthonormalizer {
    dim: usize,
    drop_tol: f64,
    cols: Vec<DVector<C64>>,
}

impl Orthonormalizer {
    pub fn new(dim: usize, drop_tol: f64) -> Self {
        Self {
            dim,
            drop_tol,
            cols: Vec::new(),
        }
    }

    /// Seed with vectors that are already mutually orthonormal.
    pub fn from_orthonormal(dim: usize, drop_tol: f64, cols: Vec<DVector<C64>>) -> Self {
        Self {
            dim,
            drop_tol,
            cols,
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn basis(&self) -> &[DVector<C64>] {
        &self.cols
    }

    pub fn into_basis(self) -> Vec<DVector<C64>> {
        self.cols
    }

    /// Coefficients of the orthogonal projection of `v` onto the basis.
    pub fn project_coeffs(&self, v: &DVector<C64>) -> Vec<C64> {
        self.cols.par_iter().map(|q| inner(v, q)).collect()
    }

    fn subtract_projection(&self, v: &mut DVector<C64>) {
        if self.cols.is_empty() {
            return;
        }
        let coeffs = self.project_coeffs(v);
        for (q, c) in self.cols.iter().zip(coeffs) {
            v.axpy(-c, q, C64::new(1.0, 0.0));
        }
    }

    /// Residual of `v` against the current span (the vector itself is not
    /// added). Two projection passes keep the residual orthogonal to
    /// working precision.
    pub fn residual(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut r = v.clone();
        self.subtract_projection(&mut r);
        self.subtract_projection(&mut r);
        r
    }

    pub fn residual_norm(&self, v: &DVector<C64>) -> f64 {
        norm(&self.residual(v))
    }

    /// Orthogonalize `v` against the basis and append the normalized
    /// residual if it is a genuinely new direction. Returns `true` when a
    /// direction was added.
    pub fn try_append(&mut self, v: &DVector<C64>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let scale = norm(v);
        if scale == 0.0 {
            return false;
        }
        let mut r = v.clone();
        self.subtract_projection(&mut r);
        // Re-orthogonalize once; twice is enough at these scales.
        self.subtract_projection(&mut r);
        let rn = norm(&r);
        if rn <= self.drop_tol * scale {
            return false;
        }
        r.unscale_mut(rn);
        self.cols.push(r);
        true
    }
}

/// Orthonormalize a family in order (rank-revealing); drops dependent
/// vectors instead of failing.
pub fn orthonormalize(dim: usize, vectors: &[DVector<C64>], drop_tol: f64) -> Vec<DVector<C64>> {
    let mut ortho = Orthonormalizer::new(dim, drop_tol);
    for v in vectors {
        ortho.try_append(v);
    }
    ortho.into_basis()
}

/// Largest singular value of the column family `cols`, by power iteration
/// on the Gram operator. Deterministic start vector; accurate enough for
/// gap/agreement thresholds (absolute error well below 1e-10 here).
pub fn max_singular_value(cols: &[DVector<C64>]) -> f64 {
    if cols.is_empty() {
        return 0.0;
    }
    let k = cols.len();
    // x lives in coefficient space; apply B^H B where B has `cols` columns.
    let mut x = DVector::<C64>::from_fn(k, |i, _| {
        let t = 0.7 * (i as f64 + 1.0);
        C64::new(t.cos(), t.sin())
    });
    let xn = norm(&x);
    x.unscale_mut(xn);
    let dim = cols[0].len();
    let mut sigma = 0.0f64;
    for _ in 0..500 {
        // y = B x
        let mut y = DVector::<C64>::zeros(dim);
        for (c, xi) in cols.iter().zip(x.iter()) {
            y.axpy(*xi, c, C64::new(1.0, 0.0));
        }
        // z = B^H y
        let z: Vec<C64> = cols.par_iter().map(|c| inner(&y, c)).collect();
        let z = DVector::from_vec(z);
        let zn = norm(&z);
        if zn == 0.0 {
            return 0.0;
        }
        let new_sigma = zn.sqrt();
        let done = (new_sigma - sigma).abs() <= 1e-12 * new_sigma.max(1e-300);
        sigma = new_sigma;
        x = z.unscale(zn);
        if done {
            break;
        }
    }
    sigma
}

/// Sines of the angles of the family `targets` relative to `span(basis)`
/// (singular values of `(I - P)·T`), largest first. `basis` must be
/// orthonormal.
pub fn gap_sines(basis: &[DVector<C64>], targets: &[DVector<C64>]) -> Vec<f64> {
    if targets.is_empty() {
        return Vec::new();
    }
    let dim = targets[0].len();
    let holder = Orthonormalizer::from_orthonormal(dim, DROP_TOL, basis.to_vec());
    let residuals: Vec<DVector<C64>> = targets.iter().map(|t| holder.residual(t)).collect();
    let m = DMatrix::<C64>::from_columns(&residuals);
    let mut sv = m.singular_values().iter().copied().collect::<Vec<f64>>();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest principal angle (radians) of `targets` against `span(basis)`,
/// computed sine-side for full accuracy near zero. For large families the
/// power-iteration estimate is used instead of a full SVD.
pub fn max_gap_angle(basis: &[DVector<C64>], targets: &[DVector<C64>]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let dim = targets[0].len();
    let holder = Orthonormalizer::from_orthonormal(dim, DROP_TOL, basis.to_vec());
    let residuals: Vec<DVector<C64>> = targets.iter().map(|t| holder.residual(t)).collect();
    let sigma = if targets.len() <= 48 {
        let m = DMatrix::<C64>::from_columns(&residuals);
        m.singular_values().iter().copied().fold(0.0, f64::max)
    } else {
        max_singular_value(&residuals)
    };
    sigma.clamp(0.0, 1.0).asin()
}

/// Coefficients of the characteristic polynomial of `m`, monic, lowest
/// degree first (Faddeev–LeVerrier).
pub fn char_poly(m: &DMatrix<C64>) -> Vec<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return vec![one];
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = one;
    let mut aux = DMatrix::<C64>::identity(n, n);
    for k in 1..=n {
        let prod = m * &aux;
        let trace: C64 = (0..n).map(|i| prod[(i, i)]).sum();
        let c = -trace / C64::new(k as f64, 0.0);
        coeffs[n - k] = c;
        aux = prod;
        for i in 0..n {
            aux[(i, i)] += c;
        }
    }
    coeffs
}

/// Roots of a monic-normalizable polynomial by Durand–Kerner iteration.
/// Coefficients are lowest degree first; the leading coefficient must be
/// nonzero. Suited to the small degrees that arise here.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<C64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            C64::from_polar(0.4 + 0.5 * radius, angle)
        })
        .collect();
    let eval = |z: C64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let mut denom = C64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}

/// Eigenvalues of a small dense complex matrix via its characteristic
/// polynomial. Intended for the compressed-shift matrices (degree <= ~6).
pub fn eigenvalues_small(m: &DMatrix<C64>) -> Vec<C64> {
    poly_roots(&char_poly(m))
}

/// Frobenius-norm distance between two matrices.
pub fn frob_dist(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm of a small matrix.
pub fn op_norm_small(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}
