//! Output SINR of a weight vector against the true scenario statistics.
//!
//! `SINR = p₀ |wᴴa(θ₀)|² / (wᴴ R_in w)` where `R_in` is the true
//! interference-plus-noise covariance. The quadratic form is evaluated in
//! factored form, `σ_n²‖w‖² + Σ_k p_k |a_kᴴw|²`, so no `m×m` matrix is built.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;

use crate::array_model::{array_manifold, linear_to_db, ScenarioConfig};
use crate::error::{Error, Result};
use crate::numerics::{dot_h, norm_sqr};

/// Reported SINR in dB when the desired response vanishes.
pub const SINR_DB_FLOOR: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinr {
    pub linear: f64,
    pub db: f64,
}

impl Sinr {
    pub fn from_linear(linear: f64) -> Self {
        let db = if linear > 0.0 {
            linear_to_db(linear).max(SINR_DB_FLOOR)
        } else {
            SINR_DB_FLOOR
        };
        Self { linear, db }
    }
}

/// Precomputed manifold and powers for repeated SINR evaluation.
#[derive(Debug, Clone)]
pub struct SinrEvaluator {
    manifold: Array2<Complex64>,
    powers: Vec<f64>,
    noise_power: f64,
}

impl SinrEvaluator {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self {
            manifold: array_manifold(config)?,
            powers: config.powers.clone(),
            noise_power: config.noise_power,
        })
    }

    /// Interference-plus-noise output power `wᴴ R_in w`.
    pub fn interference_plus_noise(&self, w: ArrayView1<'_, Complex64>) -> f64 {
        let mut total = self.noise_power * norm_sqr(w);
        for (k, col) in self.manifold.columns().into_iter().enumerate().skip(1) {
            total += self.powers[k] * dot_h(col, w).norm_sqr();
        }
        total
    }

    pub fn sinr(&self, w: ArrayView1<'_, Complex64>) -> Result<Sinr> {
        if w.len() != self.manifold.nrows() {
            return Err(Error::Argument(format!(
                "weight has length {}, expected {}",
                w.len(),
                self.manifold.nrows()
            )));
        }
        let denom = self.interference_plus_noise(w);
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::Numerical(format!(
                "interference-plus-noise power {denom} is not positive; weight is zero or broken"
            )));
        }
        let response = dot_h(w, self.manifold.column(0));
        Ok(Sinr::from_linear(
            self.powers[0] * response.norm_sqr() / denom,
        ))
    }
}

/// One-shot SINR evaluation; see [`SinrEvaluator`] for repeated use.
pub fn output_sinr(w: &Array1<Complex64>, config: &ScenarioConfig) -> Result<Sinr> {
    SinrEvaluator::new(config)?.sinr(w.view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{steering_vector, true_covariance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matched_filter_array_gain() {
        let cfg = ScenarioConfig {
            m: 64,
            doas: vec![90.0],
            powers: vec![1.0],
            phases: vec![0.0],
            noise_power: 1.0,
            element_spacing_ratio: 0.5,
            gamma: 1.0,
        };
        let a0 = steering_vector(90.0, 64, 0.5).unwrap();
        let s = output_sinr(&a0, &cfg).unwrap();
        assert!((s.linear - 64.0).abs() < 1e-9);
        assert!((s.db - 18.0618).abs() < 1e-4);
    }

    #[test]
    fn orthogonal_weight_hits_floor() {
        // at 90° the steering vector is all ones; [1,-1,0,0] is orthogonal
        let cfg = ScenarioConfig {
            m: 4,
            doas: vec![90.0, 40.0],
            powers: vec![1.0, 10.0],
            phases: vec![0.0; 2],
            noise_power: 1.0,
            element_spacing_ratio: 0.5,
            gamma: 1.0,
        };
        let w = Array1::from(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let s = output_sinr(&w, &cfg).unwrap();
        assert!(s.linear < 1e-20);
        assert_eq!(s.db, SINR_DB_FLOOR);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let cfg = ScenarioConfig {
            m: 3,
            doas: vec![90.0],
            powers: vec![1.0],
            phases: vec![0.0],
            noise_power: 1.0,
            element_spacing_ratio: 0.5,
            gamma: 1.0,
        };
        assert!(matches!(
            output_sinr(&Array1::zeros(3), &cfg),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn matches_dense_quadratic_form() {
        let cfg = ScenarioConfig {
            m: 7,
            doas: vec![95.0, 30.0, 140.0],
            powers: vec![2.0, 50.0, 20.0],
            phases: vec![0.0; 3],
            noise_power: 0.4,
            element_spacing_ratio: 0.5,
            gamma: 1.0,
        };
        let r_in = true_covariance(&cfg, true).unwrap();
        let a0 = steering_vector(95.0, 7, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let w = Array1::from_shape_fn(7, |_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let num: Complex64 = w.iter().zip(a0.iter()).map(|(wi, ai)| wi.conj() * ai).sum();
            let mut den = Complex64::new(0.0, 0.0);
            for i in 0..7 {
                for j in 0..7 {
                    den += w[i].conj() * r_in.as_array()[(i, j)] * w[j];
                }
            }
            let expected = 2.0 * num.norm_sqr() / den.re;
            let got = output_sinr(&w, &cfg).unwrap().linear;
            assert!((got - expected).abs() <= 1e-10 * expected);
        }
    }
}
