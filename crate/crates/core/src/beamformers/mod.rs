//! Adaptive beamformer state machines.
//!
//! Every beamformer consumes one snapshot at a time, emits `y(i)` computed
//! with the weights in force *before* the snapshot, and may update its
//! internal state. [`Beamformer::effective_weight`] exposes the full-rank
//! weight used for SINR evaluation (`T_r w̄` for the reduced-rank filters).

mod full_rank;
mod jio;

pub use full_rank::{FullRankSg, FullRankSmSg, FullRankState};
pub use jio::{
    apply_projector, jio_mu_t, jio_mu_w, jio_projection_update, jio_weight_update,
    reduced_projector_apply, JioOptions, JioSg, JioSmSg, JioSmState, ProjectorKind, StepSize,
};

use ndarray::{Array1, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{dot_h, lcmv_optimal_weight, HermitianMatrix, WeightVector};

/// Denominators at or below this magnitude make a sub-update degenerate.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

/// Result of feeding one snapshot to a beamformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Output `y(i)` with the pre-update weights.
    pub y: Complex64,
    /// Whether any parameter changed on this snapshot.
    pub updated: bool,
}

/// Snapshot and update counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub snapshots_seen: u64,
    pub updates_performed: u64,
}

impl Counters {
    pub(crate) fn record(&mut self, updated: bool) {
        self.snapshots_seen += 1;
        if updated {
            self.updates_performed += 1;
        }
    }

    pub fn update_fraction(&self) -> f64 {
        if self.snapshots_seen == 0 {
            0.0
        } else {
            self.updates_performed as f64 / self.snapshots_seen as f64
        }
    }
}

pub trait Beamformer: Send {
    /// `y = wᴴx` without mutating state.
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64>;

    /// Processes one snapshot.
    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome>;

    /// The full-rank weight currently in force.
    fn effective_weight(&self) -> Array1<Complex64>;

    fn counters(&self) -> Counters;

    /// Feeds an instantaneous noise-power observation to bound policies
    /// that track one. Beamformers without a bound ignore it.
    fn observe_noise(&mut self, _value: f64) -> Result<()> {
        Ok(())
    }
}

pub(crate) fn check_len(x: ArrayView1<'_, Complex64>, expected: usize) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "snapshot has length {}, expected {expected}",
            x.len()
        )))
    }
}

/// Fixed closed-form LCMV weight computed from the true covariance.
#[derive(Debug, Clone)]
pub struct OracleBeamformer {
    weight: WeightVector,
    counters: Counters,
}

impl OracleBeamformer {
    pub fn new(r: &HermitianMatrix, a0: ArrayView1<'_, Complex64>, gamma: f64) -> Result<Self> {
        Ok(Self {
            weight: lcmv_optimal_weight(r, a0, gamma)?,
            counters: Counters::default(),
        })
    }

    pub fn weight(&self) -> &WeightVector {
        &self.weight
    }
}

impl Beamformer for OracleBeamformer {
    fn output(&self, x: ArrayView1<'_, Complex64>) -> Result<Complex64> {
        check_len(x, self.weight.len())?;
        Ok(dot_h(self.weight.0.view(), x))
    }

    fn step(&mut self, x: ArrayView1<'_, Complex64>) -> Result<StepOutcome> {
        let y = self.output(x)?;
        self.counters.record(false);
        Ok(StepOutcome { y, updated: false })
    }

    fn effective_weight(&self) -> Array1<Complex64> {
        self.weight.0.clone()
    }

    fn counters(&self) -> Counters {
        self.counters
    }
}
