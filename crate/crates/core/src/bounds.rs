//! Bound policies for the set-membership update gate.
//!
//! A snapshot triggers an update only when `|y(i)|² ≥ δ²(i)`. The bound is
//! either a constant or the parameter-dependent bound (PDB)
//!
//! ```text
//! δ(i) = β δ(i−1) + (1−β) √(α ‖w(i)‖² σ̂_n²(i))
//! ```
//!
//! where `w(i)` is the effective full-rank weight (`T_r w̄` for the
//! reduced-rank filters). The recursion is seeded at its own fixed point
//! for the initial weights, so `δ(0) = √(α ‖w(1)‖² σ̂_n²)`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::norm_sqr;

/// Source of the noise power `σ̂_n²(i)` fed to the PDB recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// Pass the configured true noise power straight through.
    Known,
    /// Exponentially smooth externally supplied instantaneous estimates.
    Smoothed { rho: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseEstimator {
    mode: NoiseMode,
    estimate: f64,
}

impl NoiseEstimator {
    pub fn known(noise_power: f64) -> Result<Self> {
        check_noise(noise_power)?;
        Ok(Self {
            mode: NoiseMode::Known,
            estimate: noise_power,
        })
    }

    /// Smoothed estimator starting from `prior`.
    pub fn smoothed(rho: f64, prior: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Config(format!(
                "noise.rho = {rho} must lie in [0, 1]"
            )));
        }
        check_noise(prior)?;
        Ok(Self {
            mode: NoiseMode::Smoothed { rho },
            estimate: prior,
        })
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn estimate(&self) -> f64 {
        self.estimate
    }

    /// Folds in one observation and returns `σ̂_n²(i)`.
    ///
    /// In known mode the observation is the true noise power and replaces
    /// the estimate.
    pub fn observe(&mut self, value: f64) -> Result<f64> {
        check_noise(value)?;
        self.estimate = match self.mode {
            NoiseMode::Known => value,
            NoiseMode::Smoothed { rho } => rho * self.estimate + (1.0 - rho) * value,
        };
        Ok(self.estimate)
    }
}

fn check_noise(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "noise power {v} must be finite and > 0"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    Fixed,
    Pdb { alpha: f64, beta: f64 },
}

/// Current bound `δ(i)` and the state needed to advance it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPolicy {
    mode: BoundMode,
    delta: f64,
    noise: NoiseEstimator,
}

impl BoundPolicy {
    pub fn fixed(delta: f64, noise: NoiseEstimator) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!(
                "bound.delta_fixed = {delta} must be finite and >= 0"
            )));
        }
        Ok(Self {
            mode: BoundMode::Fixed,
            delta,
            noise,
        })
    }

    /// Parameter-dependent bound; `α > 1`, `β ∈ [0, 1]`.
    ///
    /// `δ` starts at zero until [`initial_bound`](Self::initial_bound) seeds it.
    pub fn pdb(alpha: f64, beta: f64, noise: NoiseEstimator) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::Config(format!(
                "bound.alpha = {alpha} must be a finite value > 1"
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Config(format!(
                "bound.beta = {beta} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            mode: BoundMode::Pdb { alpha, beta },
            delta: 0.0,
            noise,
        })
    }

    pub fn mode(&self) -> BoundMode {
        self.mode
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn noise(&self) -> &NoiseEstimator {
        &self.noise
    }

    pub fn observe_noise(&mut self, value: f64) -> Result<f64> {
        self.noise.observe(value)
    }

    /// Instantaneous PDB target `√(α ‖w‖² σ̂_n²)`.
    fn target(alpha: f64, weight_norm_sqr: f64, noise: f64) -> f64 {
        (alpha * weight_norm_sqr * noise).sqrt()
    }

    /// Seeds `δ` from the initial weights and returns it.
    ///
    /// Fixed mode keeps the configured value.
    pub fn initial_bound(&mut self, weight_norm_sqr: f64) -> f64 {
        if let BoundMode::Pdb { alpha, .. } = self.mode {
            self.delta = Self::target(alpha, weight_norm_sqr, self.noise.estimate());
        }
        self.delta
    }

    /// Advances `δ(i)` given `‖w(i)‖²`; fixed mode returns δ unchanged.
    pub fn advance(&mut self, weight_norm_sqr: f64) -> f64 {
        if let BoundMode::Pdb { alpha, beta } = self.mode {
            let target = Self::target(alpha, weight_norm_sqr, self.noise.estimate());
            self.delta = beta * self.delta + (1.0 - beta) * target;
        }
        self.delta
    }

    /// PDB step for a reduced-rank pair, using `‖T_r w̄‖²`.
    pub fn pdb_update(&mut self, projection: &Array2<Complex64>, w_bar: &Array1<Complex64>) -> f64 {
        self.advance(norm_sqr(projection.dot(w_bar).view()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn known() -> NoiseEstimator {
        NoiseEstimator::known(1.0).unwrap()
    }

    #[test]
    fn alpha_must_exceed_one() {
        for alpha in [1.0, 0.5, -3.0, f64::NAN] {
            assert!(matches!(
                BoundPolicy::pdb(alpha, 0.99, known()),
                Err(Error::Config(_))
            ));
        }
    }

    #[test]
    fn beta_outside_unit_interval_rejected() {
        assert!(BoundPolicy::pdb(22.0, 1.01, known()).is_err());
        assert!(BoundPolicy::pdb(22.0, -0.1, known()).is_err());
    }

    #[test]
    fn beta_one_freezes_delta() {
        let mut p = BoundPolicy::pdb(22.0, 1.0, known()).unwrap();
        let d0 = p.initial_bound(0.3);
        for w in [0.1, 5.0, 100.0] {
            assert_eq!(p.advance(w), d0);
        }
    }

    #[test]
    fn beta_zero_tracks_target() {
        let mut p = BoundPolicy::pdb(22.0, 0.0, known()).unwrap();
        p.initial_bound(7.0);
        let d = p.advance(1.0);
        assert!((d - 22f64.sqrt()).abs() < 1e-15);
        assert!((d - 4.6904).abs() < 1e-4);
    }

    #[test]
    fn generic_step_is_convex_combination() {
        let mut p = BoundPolicy::pdb(22.0, 0.99, NoiseEstimator::known(0.1).unwrap()).unwrap();
        let prev = p.initial_bound(0.2);
        let d = p.advance(0.05);
        let expected = 0.99 * prev + 0.01 * (22.0_f64 * 0.05 * 0.1).sqrt();
        assert!((d - expected).abs() < 1e-15);
    }

    #[test]
    fn pdb_update_uses_effective_weight_norm() {
        let t = array![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        ];
        let w = array![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)];
        // T w = [0.5, -1, 0.5] → ‖Tw‖² = 1.5
        let mut p = BoundPolicy::pdb(4.0, 0.0, known()).unwrap();
        assert!((p.pdb_update(&t, &w) - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn initial_bound_fixed_point() {
        let mut p = BoundPolicy::pdb(22.0, 0.99, known()).unwrap();
        assert!((p.initial_bound(1.0) - 22f64.sqrt()).abs() < 1e-15);
        // seeding at the fixed point makes the first recursion step a no-op
        assert!((p.advance(1.0) - 22f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn initial_bound_fixed_mode() {
        let mut p = BoundPolicy::fixed(1.0, known()).unwrap();
        assert_eq!(p.initial_bound(123.0), 1.0);
        assert_eq!(p.advance(0.001), 1.0);
    }

    #[test]
    fn negative_fixed_delta_rejected() {
        assert!(BoundPolicy::fixed(-0.1, known()).is_err());
    }

    #[test]
    fn known_noise_passes_through() {
        let mut n = NoiseEstimator::known(1.0).unwrap();
        assert_eq!(n.observe(1.0).unwrap(), 1.0);
    }

    #[test]
    fn smoothed_noise() {
        let mut frozen = NoiseEstimator::smoothed(1.0, 3.0).unwrap();
        assert_eq!(frozen.observe(8.0).unwrap(), 3.0);
        let mut n = NoiseEstimator::smoothed(0.9, 1.0).unwrap();
        assert!((n.observe(2.0).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_noise_rejected() {
        assert!(NoiseEstimator::known(0.0).is_err());
        assert!(NoiseEstimator::smoothed(0.5, -1.0).is_err());
        assert!(NoiseEstimator::known(1.0).unwrap().observe(-2.0).is_err());
    }

    proptest! {
        #[test]
        fn pdb_stays_between_history_and_target(
            alpha in 1.0001f64..100.0,
            beta in 0.0f64..=1.0,
            seed_norm in 1e-4f64..10.0,
            norms in prop::collection::vec(1e-4f64..10.0, 1..50),
        ) {
            let mut p = BoundPolicy::pdb(alpha, beta, known()).unwrap();
            let mut prev = p.initial_bound(seed_norm);
            for w in norms {
                let target = (alpha * w).sqrt();
                let d = p.advance(w);
                let lo = prev.min(target) * (1.0 - 1e-12);
                let hi = prev.max(target) * (1.0 + 1e-12);
                prop_assert!(d >= 0.0);
                prop_assert!(d >= lo && d <= hi);
                prev = d;
            }
        }

        #[test]
        fn fixed_mode_never_moves(delta in 0.0f64..10.0, norms in prop::collection::vec(0.0f64..10.0, 1..20)) {
            let mut p = BoundPolicy::fixed(delta, known()).unwrap();
            p.initial_bound(1.0);
            for w in norms {
                prop_assert_eq!(p.advance(w), delta);
            }
        }
    }
}
