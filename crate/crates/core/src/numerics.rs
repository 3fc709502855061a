//! Dense complex linear algebra needed by the rest of the crate.
//!
//! The only heavy kernel is a Cholesky solve of a Hermitian positive-definite
//! system, used to evaluate the closed-form LCMV weight
//! `w = γ R⁻¹a₀ / (a₀ᴴ R⁻¹ a₀)`. No explicit inverse is ever formed.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivot tolerance of the Cholesky factorization.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Allowed deviation from exact Hermitian symmetry when wrapping a matrix.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Hermitian inner product `aᴴ b` (conjugate-linear in `a`).
#[inline]
pub fn dot_h(a: ArrayView1<'_, Complex64>, b: ArrayView1<'_, Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm `‖v‖²`.
#[inline]
pub fn norm_sqr(v: ArrayView1<'_, Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// A square complex matrix known to equal its own conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: Array2<Complex64>,
}

impl HermitianMatrix {
    /// Wraps `data` after checking squareness and Hermitian symmetry.
    ///
    /// The tolerance is relative to the largest entry magnitude so that
    /// covariances with large interferer powers are accepted.
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != cols {
            return Err(Error::Argument(format!(
                "Hermitian matrix must be square, got {rows}x{cols}"
            )));
        }
        let scale = data.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let asym = max_asymmetry(&data);
        if asym > HERMITIAN_TOLERANCE * scale {
            return Err(Error::Argument(format!(
                "matrix is not Hermitian (max |a_ij - conj(a_ji)| = {asym:e})"
            )));
        }
        Ok(Self { data })
    }

    /// Wraps `data` without checking; callers guarantee the symmetry.
    pub(crate) fn from_trusted(data: Array2<Complex64>) -> Self {
        Self { data }
    }

    pub fn identity(m: usize) -> Self {
        Self {
            data: Array2::eye(m).mapv(|v: f64| Complex64::new(v, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    /// Quadratic form `vᴴ R v`, real because R is Hermitian.
    pub fn quadratic_form(&self, v: ArrayView1<'_, Complex64>) -> f64 {
        dot_h(v, self.data.dot(&v).view()).re
    }
}

/// Largest `|a_ij − conj(a_ji)|` over all entry pairs.
pub fn max_asymmetry(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Lower-triangular Cholesky factor `L` with `R = L Lᴴ` (nalgebra backend).
#[derive(Debug, Clone)]
pub struct Cholesky {
    inner: nalgebra::Cholesky<Complex64, nalgebra::Dyn>,
    lower: Array2<Complex64>,
}

impl Cholesky {
    pub fn factor(r: &HermitianMatrix) -> Result<Self> {
        let a = r.as_array();
        let n = r.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
        let inner = m
            .cholesky()
            .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
        let l = inner.l();
        // nalgebra accepts any positive pivot; reject near-singular ones too
        if let Some(j) = (0..n).find(|&j| !(l[(j, j)].re * l[(j, j)].re > PIVOT_TOLERANCE)) {
            return Err(Error::Numerical(format!(
                "matrix is not positive definite (pivot {:e} at column {j})",
                l[(j, j)].re * l[(j, j)].re
            )));
        }
        let lower = Array2::from_shape_fn((n, n), |(i, j)| l[(i, j)]);
        Ok(Self { inner, lower })
    }

    pub fn lower(&self) -> &Array2<Complex64> {
        &self.lower
    }

    /// Solves `L Lᴴ x = b`.
    pub fn solve(&self, b: ArrayView1<'_, Complex64>) -> Result<Array1<Complex64>> {
        let n = self.lower.nrows();
        if b.len() != n {
            return Err(Error::Argument(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let rhs = nalgebra::DVector::from_iterator(n, b.iter().copied());
        Ok(Array1::from_iter(self.inner.solve(&rhs).iter().copied()))
    }
}

/// Solves `R x = b` for Hermitian positive-definite `R`.
pub fn solve_hermitian_pd(
    r: &HermitianMatrix,
    b: ArrayView1<'_, Complex64>,
) -> Result<Array1<Complex64>> {
    Cholesky::factor(r)?.solve(b)
}

/// Beamformer weight vector `w`, with output `y = wᴴ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Array1<Complex64>);

impl WeightVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_array(&self) -> &Array1<Complex64> {
        &self.0
    }

    /// Array response `wᴴ a`.
    pub fn response(&self, a: ArrayView1<'_, Complex64>) -> Complex64 {
        dot_h(self.0.view(), a)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Closed-form LCMV weight `γ R⁻¹a₀ / (a₀ᴴ R⁻¹ a₀)`.
pub fn lcmv_optimal_weight(
    r: &HermitianMatrix,
    a0: ArrayView1<'_, Complex64>,
    gamma: f64,
) -> Result<WeightVector> {
    if norm_sqr(a0) == 0.0 {
        return Err(Error::Argument("constraint vector a0 is zero".into()));
    }
    let r_inv_a = solve_hermitian_pd(r, a0)?;
    let denom = dot_h(a0, r_inv_a.view());
    if !(denom.norm() > 0.0) {
        return Err(Error::Numerical(format!(
            "a0ᴴ R⁻¹ a0 = {denom} is not usable"
        )));
    }
    // wᴴa0 = conj(γ/denom)·denom = γ requires the scale conj(γ/denom); denom is real here.
    let scale = (Complex64::new(gamma, 0.0) / denom).conj();
    Ok(WeightVector(r_inv_a.mapv(|z| z * scale)))
}
