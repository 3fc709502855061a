//! Reduced-rank joint iterative optimization (JIO).
//!
//! The snapshot is compressed by a bank of `r` full-rank filters,
//! `x̄ = T_rᴴ x`, and filtered by a reduced-rank weight, `y = w̄ᴴ x̄`. Both
//! are adapted by stochastic gradient:
//!
//! ```text
//! T_r ← T_r − μ_T y* [I − a₀a₀ᴴ] x w̄ᴴ
//! w̄   ← w̄   − μ_w y* [I − āāᴴ/(āᴴā)] x̄          ā = T_rᴴ a₀
//! ```
//!
//! [`JioSg`] uses fixed steps on every snapshot. [`JioSmSg`] updates only
//! when `|y|² > δ²(i)` and picks each step so that, taken alone, it brings
//! the output magnitude down to exactly `δ(i)`:
//!
//! ```text
//! μ_T = (1 − δ/|y|) / (w̄ᴴw̄ · xᴴ[I − a₀a₀ᴴ]x)
//! μ_w = (1 − δ/|y|) / (x̄ᴴ[I − āāᴴ/(āᴴā)]x̄)
//! ```
//!
//! [`JioOptions::new`] uses `I − a₀a₀ᴴ` without normalization in the
//! projection-matrix term. That matrix is not a projector when
//! `‖a₀‖² = m > 1`; [`ProjectorKind::Normalized`] swaps in
//! `I − a₀a₀ᴴ/‖a₀‖²`, and is what the experiment harness uses by default.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

use super::{check_len, Beamformer, Counters, StepOutcome, DENOMINATOR_TOLERANCE};
use crate::bounds::BoundPolicy;
use crate::error::{Error, Result};
use crate::numerics::{dot_h, norm_sqr};

/// Matrix multiplying `x` in the projection-matrix update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectorKind {
    /// `I − a₀a₀ᴴ`.
    #[default]
    Unnormalized,
    /// `I − a₀a₀ᴴ/‖a₀‖²`.
    Normalized,
}

/// Outcome of a step-size evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `|y|² ≤ δ²`: no update is required.
    Gated,
    /// Denominator too small; the sub-update is skipped.
    Degenerate,
    Value(f64),
}

impl StepSize {
    /// Numerical step, zero unless [`StepSize::Value`].
    pub fn value(self) -> f64 {
        match self {
            StepSize::Value(mu) => mu,
            _ => 0.0,
        }
    }
}

/// `[I − a₀a₀ᴴ] x` or its normalized counterpart.
pub fn apply_projector(
    x: ArrayView1<'_, Complex64>,
    a0: ArrayView1<'_, Complex64>,
    kind: ProjectorKind,
) -> Array1<Complex64> {
    let mut coeff = dot_h(a0, x);
    if kind == ProjectorKind::Normalized {
        coeff /= norm_sqr(a0);
    }
    let mut out = x.to_owned();
    out.zip_mut_with(&a0, |o, a| *o -= a * coeff);
    out
}

/// `[I − āāᴴ/(āᴴā)] x̄`.
pub fn reduced_projector_apply(
    x_bar: ArrayView1<'_, Complex64>,
    a_bar: ArrayView1<'_, Complex64>,
) -> Array1<Complex64> {
    apply_projector(x_bar, a_bar, ProjectorKind::Normalized)
}

fn exceeds(y: Complex64, delta: f64) -> bool {
    y.norm_sqr() > delta * delta
}

/// Step size of the projection-matrix update.
pub fn jio_mu_t(
    y: Complex64,
    delta: f64,
    w_bar: ArrayView1<'_, Complex64>,
    x: ArrayView1<'_, Complex64>,
    a0: ArrayView1<'_, Complex64>,
    kind: ProjectorKind,
) -> StepSize {
    if !exceeds(y, delta) {
        return StepSize::Gated;
    }
    let px = apply_projector(x, a0, kind);
    // xᴴ[I − a₀a₀ᴴ]x is real (Hermitian form) but may be negative
    let denom = norm_sqr(w_bar) * dot_h(x, px.view()).re;
    if denom.abs() <= DENOMINATOR_TOLERANCE || !denom.is_finite() {
        return StepSize::Degenerate;
    }
    StepSize::Value((1.0 - delta / y.norm()) / denom)
}

/// Step size of the reduced-rank weight update.
pub fn jio_mu_w(
    y: Complex64,
    delta: f64,
    x_bar: ArrayView1<'_, Complex64>,
    a_bar: ArrayView1<'_, Complex64>,
) -> StepSize {
    if !exceeds(y, delta) {
        return StepSize::Gated;
    }
    if !(norm_sqr(a_bar) > 0.0) {
        return StepSize::Degenerate;
    }
    let denom = norm_sqr(reduced_projector_apply(x_bar, a_bar).view());
    if denom <= DENOMINATOR_TOLERANCE || !denom.is_finite() {
        return StepSize::Degenerate;
    }
    StepSize::Value((1.0 - delta / y.norm()) / denom)
}

/// `T_r ← T_r − μ_T y* [I − a₀a₀ᴴ] x w̄ᴴ` (a rank-one correction).
pub fn jio_projection_update(
    projection: &mut Array2<Complex64>,
    mu_t: f64,
    y: Complex64,
    x: ArrayView1<'_, Complex64>,
    w_bar: ArrayView1<'_, Complex64>,
    a0: ArrayView1<'_, Complex64>,
    kind: ProjectorKind,
) {
    if mu_t == 0.0 {
        return;
    }
    let px = apply_projector(x, a0, kind);
    let scale = y.conj() * mu_t;
    for ((i, j), t) in projection.indexed_iter_mut() {
        *t -= scale * px[i] * w_bar[j].conj();
    }
}

/// `w̄ ← w̄ − μ_w y* [I − āāᴴ/(āᴴā)] x̄`.
pub fn jio_weight_update(
    w_bar: &mut Array1<Complex64>,
    mu_w: f64,
    y: Complex64,
    x_bar: ArrayView1<'_, Complex64>,
    a_bar: ArrayView1<'_, Complex64>,
) {
    if mu_w == 0.0 {
        return;
    }
    let px = reduced_projector_apply(x_bar, a_bar);
    let scale = y.conj() * mu_w;
    w_bar.zip_mut_with(&px, |w, p| *w -= p * scale);
}

/// Knobs shared by the JIO filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JioOptions {
    pub rank: usize,
    pub gamma: f64,
    pub projector: ProjectorKind,
    /// Re-impose `w̄ᴴā = γ` after every projection-matrix update.
    pub reproject: bool,
}

impl JioOptions {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            gamma: 1.0,
            projector: ProjectorKind::Unnormalized,
            reproject: false,
        }
    }
}

/// Projection matrix, reduced weight and cached reduced steering vector.
#[derive(Debug, Clone)]
pub struct JioSmState {
    projection: Array2<Complex64>,
    weight: Array1<Complex64>,
    reduced_steering: Array1<Complex64>,
    a0: Array1<Complex64>,
    options: JioOptions,
    counters: Counters,
}

impl JioSmState {
    /// `T_r(1) = [I_r 0]ᵀ`, `w̄(1) = γ ā / ‖ā‖²` with `ā = T_r(1)ᴴ a₀`.
    pub fn new(a0: ArrayView1<'_, Complex64>, options: JioOptions) -> Result<Self> {
        let m = a0.len();
        let r = options.rank;
        if r == 0 || r > m {
            return Err(Error::Config(format!(
                "rank r = {r} must satisfy 1 <= r <= m = {m}"
            )));
        }
        let projection = Array2::from_shape_fn((m, r), |(i, j)| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let reduced_steering = projection.t().mapv(|z| z.conj()).dot(&a0);
        let a_norm = norm_sqr(reduced_steering.view());
        if !(a_norm > 0.0) {
            return Err(Error::Numerical(
                "initial reduced steering vector is zero".into(),
            ));
        }
        let weight = reduced_steering.mapv(|z| z * (options.gamma / a_norm));
        Ok(Self {
            projection,
            weight,
            reduced_steering,
            a0: a0.to_owned(),
            options,
            counters: Counters::default(),
        })
    }

    /// Replaces `T_r` and `w̄`; the cached `ā` is recomputed.
    pub fn with_parameters(
        a0: ArrayView1<'_, Complex64>,
        projection: Array2<Complex64>,
        weight: Array1<Complex64>,
        options: JioOptions,
    ) -> Result<Self> {
        let m = a0.len();
        if projection.nrows() != m || projection.ncols() != weight.len() || weight.is_empty() {
            return Err(Error::Argument(format!(
                "projection {}x{} and weight of length {} do not fit m = {m}",
                projection.nrows(),
                projection.ncols(),
                weight.len()
            )));
        }
        let mut s = Self {
            reduced_steering: Array1::zeros(weight.len()),
            options: JioOptions {
                rank: weight.len(),
                ..options
            },
            projection,
            weight,
            a0: a0.to_owned(),
            counters: Counters::default(),
        };
        s.refresh_steering();
        Ok(s)
    }

    pub fn projection(&self) -> &Array2<Complex64> {
        &self.projection
    }

    pub fn weight(&self) -> &Array1<Complex64> {
        &self.weight
    }

    pub fn reduced_steering(&self) -> &Array1<Complex64> {
        &self.reduced_steering
    }

    pub fn options(&self) -> &JioOptions {
        &self.options
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// `x̄ = T_rᴴ x`.
    pub fn reduce(&self, x: ArrayView1<'_, Complex64>) -> Result<Array1<Complex64>> {
        check_len(x, self.a0.len())?;
        Ok(conj_transpose_dot(self.projection.view(), x))
    }

    pub fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        let x_bar = self.reduce(x)?;
        Ok(dot_h(self.weight.view(), x_bar.view()))
    }

    /// `w = T_r w̄`.
    pub fn effective_weight(&self) -> Array1<Complex64> {
        self.projection.dot(&self.weight)
    }

    fn refresh_steering(&mut self) {
        self.reduced_steering = conj_transpose_dot(self.projection.view(), self.a0.view());
    }

    fn reproject(&mut self) {
        let a = &self.reduced_steering;
        let a_norm = norm_sqr(a.view());
        if a_norm > 0.0 {
            let correction = (Complex64::new(self.options.gamma, 0.0)
                - dot_h(a.view(), self.weight.view()))
                / a_norm;
            self.weight.zip_mut_with(a, |w, ai| *w += ai * correction);
        }
    }

    /// One joint update with explicit step sizes; `x̄` and `y` are the
    /// pre-update values. Returns whether anything changed.
    fn joint_update(
        &mut self,
        x: ArrayView1<'_, Complex64>,
        x_bar: ArrayView1<'_, Complex64>,
        y: Complex64,
        mu_t: StepSize,
        delta_for_w: Option<f64>,
        mu_w_fixed: f64,
    ) -> bool {
        let mut changed = false;
        if let StepSize::Value(mu) = mu_t {
            jio_projection_update(
                &mut self.projection,
                mu,
                y,
                x,
                self.weight.view(),
                self.a0.view(),
                self.options.projector,
            );
            self.refresh_steering();
            if self.options.reproject {
                self.reproject();
            }
            changed = true;
        }
        let mu_w = match delta_for_w {
            Some(delta) => jio_mu_w(y, delta, x_bar, self.reduced_steering.view()),
            None => StepSize::Value(mu_w_fixed),
        };
        if let StepSize::Value(mu) = mu_w {
            jio_weight_update(&mut self.weight, mu, y, x_bar, self.reduced_steering.view());
            changed |= mu != 0.0;
        }
        changed
    }
}

fn conj_transpose_dot(
    t: ArrayView2<'_, Complex64>,
    x: ArrayView1<'_, Complex64>,
) -> Array1<Complex64> {
    Array1::from_iter(t.columns().into_iter().map(|col| dot_h(col, x)))
}

/// The set-membership JIO filter with a bound policy.
#[derive(Debug, Clone)]
pub struct JioSmSg {
    state: JioSmState,
    bound: BoundPolicy,
}

impl JioSmSg {
    pub fn new(
        a0: ArrayView1<'_, Complex64>,
        options: JioOptions,
        bound: BoundPolicy,
    ) -> Result<Self> {
        Self::from_state(JioSmState::new(a0, options)?, bound)
    }

    /// Wraps an existing state and seeds the bound from its weights.
    pub fn from_state(state: JioSmState, mut bound: BoundPolicy) -> Result<Self> {
        bound.initial_bound(norm_sqr(state.effective_weight().view()));
        Ok(Self { state, bound })
    }

    pub fn state(&self) -> &JioSmState {
        &self.state
    }

    pub fn bound(&self) -> &BoundPolicy {
        &self.bound
    }

    /// One pass of the loop body.
    ///
    /// Computes `x̄`, `y` and `δ(i)`; if `|y|² > δ²(i)` it updates `T_r`
    /// with `μ_T`, refreshes `ā = T_rᴴa₀`, then updates `w̄` with `μ_w`
    /// evaluated on the refreshed `ā`. Otherwise the state is untouched.
    pub fn iterate(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        let x_bar = self.state.reduce(x)?;
        let y = dot_h(self.state.weight.view(), x_bar.view());
        let delta = self
            .bound
            .pdb_update(&self.state.projection, &self.state.weight);
        let mut updated = false;
        if exceeds(y, delta) {
            let mu_t = jio_mu_t(
                y,
                delta,
                self.state.weight.view(),
                x,
                self.state.a0.view(),
                self.state.options.projector,
            );
            updated = self
                .state
                .joint_update(x, x_bar.view(), y, mu_t, Some(delta), 0.0);
        }
        self.state.counters.record(updated);
        Ok(StepOutcome { y, updated })
    }
}

impl Beamformer for JioSmSg {
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        self.state.output(x)
    }

    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        self.iterate(x)
    }

    fn effective_weight(&self) -> Array1<Complex64> {
        self.state.effective_weight()
    }

    fn counters(&self) -> Counters {
        self.state.counters
    }

    fn observe_noise(&mut self, value: f64) -> Result<()> {
        self.bound.observe_noise(value).map(|_| ())
    }
}

/// JIO with fixed step sizes, updating on every snapshot.
#[derive(Debug, Clone)]
pub struct JioSg {
    state: JioSmState,
    mu_t: f64,
    mu_w: f64,
}

impl JioSg {
    pub fn new(
        a0: ArrayView1<'_, Complex64>,
        options: JioOptions,
        mu_t: f64,
        mu_w: f64,
    ) -> Result<Self> {
        Ok(Self::from_state(JioSmState::new(a0, options)?, mu_t, mu_w))
    }

    pub fn from_state(state: JioSmState, mu_t: f64, mu_w: f64) -> Self {
        Self { state, mu_t, mu_w }
    }

    pub fn state(&self) -> &JioSmState {
        &self.state
    }

    pub fn iterate(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        let x_bar = self.state.reduce(x)?;
        let y = dot_h(self.state.weight.view(), x_bar.view());
        let mu_t = if self.mu_t == 0.0 {
            StepSize::Gated
        } else {
            StepSize::Value(self.mu_t)
        };
        let updated = self
            .state
            .joint_update(x, x_bar.view(), y, mu_t, None, self.mu_w);
        self.state.counters.record(updated);
        Ok(StepOutcome { y, updated })
    }
}

impl Beamformer for JioSg {
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        self.state.output(x)
    }

    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        self.iterate(x)
    }

    fn effective_weight(&self) -> Array1<Complex64> {
        self.state.effective_weight()
    }

    fn counters(&self) -> Counters {
        self.state.counters
    }
}
