//! Full-rank constrained SG (Frost-style) and its set-membership variant.

use ndarray::{Array1, ArrayView1};
use num_complex::Complex64;

use super::{check_len, Beamformer, Counters, StepOutcome, DENOMINATOR_TOLERANCE};
use crate::bounds::BoundPolicy;
use crate::error::{Error, Result};
use crate::numerics::{dot_h, norm_sqr};

/// Weight vector on the constraint `wᴴa₀ = γ` plus the normalized
/// constraint projector `P = I − a₀a₀ᴴ/(a₀ᴴa₀)`.
#[derive(Debug, Clone)]
pub struct FullRankState {
    w: Array1<Complex64>,
    a0: Array1<Complex64>,
    a0_norm_sqr: f64,
    counters: Counters,
}

impl FullRankState {
    /// Starts from `w(1) = γ a₀ / ‖a₀‖²`.
    pub fn new(a0: ArrayView1<'_, Complex64>, gamma: f64) -> Result<Self> {
        let a0_norm_sqr = norm_sqr(a0);
        if !(a0_norm_sqr > 0.0) {
            return Err(Error::Argument("steering vector a0 is zero".into()));
        }
        Ok(Self {
            w: a0.mapv(|z| z * (gamma / a0_norm_sqr)),
            a0: a0.to_owned(),
            a0_norm_sqr,
            counters: Counters::default(),
        })
    }

    /// Starts from an arbitrary weight.
    pub fn with_weight(a0: ArrayView1<'_, Complex64>, w: Array1<Complex64>) -> Result<Self> {
        let mut s = Self::new(a0, 1.0)?;
        check_len(w.view(), s.a0.len())?;
        s.w = w;
        Ok(s)
    }

    pub fn weight(&self) -> &Array1<Complex64> {
        &self.w
    }

    pub fn steering(&self) -> &Array1<Complex64> {
        &self.a0
    }

    pub fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        check_len(x, self.w.len())?;
        Ok(dot_h(self.w.view(), x))
    }

    /// `P x` with the normalized projector.
    pub fn project(&self, x: ArrayView1<'_, Complex64>) -> Array1<Complex64> {
        let coeff = dot_h(self.a0.view(), x) / self.a0_norm_sqr;
        let mut px = x.to_owned();
        px.zip_mut_with(&self.a0, |p, a| *p -= a * coeff);
        px
    }

    fn apply(&mut self, mu: f64, y: Complex64, px: &Array1<Complex64>) {
        let scale = y.conj() * mu;
        self.w.zip_mut_with(px, |w, p| *w -= p * scale);
    }

    /// `w ← w − μ y* P x`; returns `y` computed before the update.
    pub fn sg_step(&mut self, x: ArrayView1<'_, Complex64>, mu: f64) -> Result<Complex64> {
        let y = self.output(x)?;
        let px = self.project(x);
        self.apply(mu, y, &px);
        Ok(y)
    }

    /// Data-selective step with bound `δ`.
    ///
    /// Updates only when `|y|² > δ²`, with `μ = (1 − δ/|y|) / (xᴴPx)` so
    /// that the a-posteriori output has magnitude `δ`. Returns `y` and
    /// whether the weight changed.
    pub fn sm_step(
        &mut self,
        x: ArrayView1<'_, Complex64>,
        delta: f64,
    ) -> Result<(Complex64, bool)> {
        let y = self.output(x)?;
        let mag = y.norm();
        if mag * mag <= delta * delta {
            return Ok((y, false));
        }
        let px = self.project(x);
        // xᴴPx = ‖Px‖² because P is an orthogonal projector
        let denom = norm_sqr(px.view());
        if denom <= DENOMINATOR_TOLERANCE {
            return Ok((y, false));
        }
        let mu = (1.0 - delta / mag) / denom;
        self.apply(mu, y, &px);
        Ok((y, true))
    }
}

/// Full-rank constrained SG with a fixed step size.
#[derive(Debug, Clone)]
pub struct FullRankSg {
    state: FullRankState,
    mu: f64,
}

impl FullRankSg {
    pub fn new(a0: ArrayView1<'_, Complex64>, gamma: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            state: FullRankState::new(a0, gamma)?,
            mu,
        })
    }

    pub fn state(&self) -> &FullRankState {
        &self.state
    }
}

impl Beamformer for FullRankSg {
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        self.state.output(x)
    }

    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        let y = self.state.sg_step(x, self.mu)?;
        let updated = self.mu != 0.0;
        self.state.counters.record(updated);
        Ok(StepOutcome { y, updated })
    }

    fn effective_weight(&self) -> Array1<Complex64> {
        self.state.w.clone()
    }

    fn counters(&self) -> Counters {
        self.state.counters
    }
}

/// Full-rank set-membership SG driven by a bound policy.
#[derive(Debug, Clone)]
pub struct FullRankSmSg {
    state: FullRankState,
    bound: BoundPolicy,
}

impl FullRankSmSg {
    pub fn new(a0: ArrayView1<'_, Complex64>, gamma: f64, mut bound: BoundPolicy) -> Result<Self> {
        let state = FullRankState::new(a0, gamma)?;
        bound.initial_bound(norm_sqr(state.w.view()));
        Ok(Self { state, bound })
    }

    pub fn state(&self) -> &FullRankState {
        &self.state
    }

    pub fn bound(&self) -> &BoundPolicy {
        &self.bound
    }
}

impl Beamformer for FullRankSmSg {
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        self.state.output(x)
    }

    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        check_len(x, self.state.w.len())?;
        let delta = self.bound.advance(norm_sqr(self.state.w.view()));
        let (y, updated) = self.state.sm_step(x, delta)?;
        self.state.counters.record(updated);
        Ok(StepOutcome { y, updated })
    }

    fn effective_weight(&self) -> Array1<Complex64> {
        self.state.w.clone()
    }

    fn counters(&self) -> Counters {
        self.state.counters
    }

    fn observe_noise(&mut self, value: f64) -> Result<()> {
        self.bound.observe_noise(value).map(|_| ())
    }
}
