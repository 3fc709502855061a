//! Monte Carlo driver.
//!
//! Run `k` draws from a ChaCha20 stream seeded with the master seed and
//! switched to stream number `k`, so each run is reproducible on its own and
//! the result does not depend on how runs are spread over threads. All
//! algorithms of a run consume the same snapshot sequence. Per-snapshot SINR
//! is evaluated on the weights in force after the snapshot has been
//! processed; ensemble curves average linear SINR across runs, in run order,
//! and then convert to dB.

use ndarray::ArrayView1;
use num_complex::Complex64;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::config::{AlgorithmKind, AlgorithmSpec, ExperimentConfig, NoiseSettings};
use super::metrics::{Sinr, SinrEvaluator};
use crate::array_model::{linear_to_db, true_covariance, ScenarioConfig, SnapshotGenerator};
use crate::beamformers::{Beamformer, FullRankSg, FullRankSmSg, JioSg, JioSmSg, OracleBeamformer};
use crate::error::{Error, Result};
use crate::numerics::norm_sqr;

/// Random stream of run `run` under `master_seed`.
pub fn run_rng(master_seed: u64, run: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(run as u64);
    rng
}

/// Instantiates one algorithm for a scenario.
pub fn build_beamformer(
    spec: &AlgorithmSpec,
    scenario: &ScenarioConfig,
) -> Result<Box<dyn Beamformer>> {
    let generator = SnapshotGenerator::new(scenario)?;
    let a0 = generator.manifold().column(0).to_owned();
    let gamma = scenario.gamma;
    Ok(match spec.kind {
        AlgorithmKind::JioSmSg => Box::new(JioSmSg::new(
            a0.view(),
            spec.jio,
            spec.bound_policy(scenario.noise_power)?,
        )?),
        AlgorithmKind::JioSg => Box::new(JioSg::new(a0.view(), spec.jio, spec.mu_t, spec.mu_w)?),
        AlgorithmKind::FrSg => Box::new(FullRankSg::new(a0.view(), gamma, spec.mu)?),
        AlgorithmKind::FrSmSg => Box::new(FullRankSmSg::new(
            a0.view(),
            gamma,
            spec.bound_policy(scenario.noise_power)?,
        )?),
        AlgorithmKind::Oracle => Box::new(OracleBeamformer::new(
            &true_covariance(scenario, false)?,
            a0.view(),
            gamma,
        )?),
    })
}

/// Everything recorded for one algorithm in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmTrace {
    /// Linear output SINR after each snapshot.
    pub sinr: Vec<f64>,
    /// Whether each snapshot triggered an update.
    pub updated: Vec<bool>,
    /// FNV-1a digest of every snapshot the algorithm consumed.
    pub stream_checksum: u64,
}

impl AlgorithmTrace {
    /// `(Σ flags up to i) / i` for `i = 1..=N`.
    pub fn cumulative_update_fraction(&self) -> Vec<f64> {
        let mut count = 0u64;
        self.updated
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                count += u64::from(u);
                count as f64 / (i + 1) as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub run: usize,
    pub scenario: ScenarioConfig,
    pub traces: Vec<AlgorithmTrace>,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_fold(mut h: u64, x: ArrayView1<'_, Complex64>) -> u64 {
    for z in x.iter() {
        for b in
            z.re.to_bits()
                .to_le_bytes()
                .into_iter()
                .chain(z.im.to_bits().to_le_bytes())
        {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// SINR of the current weights. A diverged filter (non-finite weights or
/// output power) scores at the floor instead of aborting the experiment.
fn score(evaluator: &SinrEvaluator, bf: &dyn Beamformer) -> Result<Sinr> {
    let w = bf.effective_weight();
    if !w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Ok(Sinr::from_linear(0.0));
    }
    match evaluator.sinr(w.view()) {
        Err(Error::Numerical(_)) => Ok(Sinr::from_linear(0.0)),
        other => other,
    }
}

/// Executes run `run` of the experiment.
pub fn run_single(config: &ExperimentConfig, run: usize) -> Result<RunTrace> {
    let specs = config.algorithm_specs();
    let mut rng = run_rng(config.master_seed, run);
    // the random layout draws its DOAs from the head of the run's own stream
    let layout_seed = rng.next_u64();
    let scenario = config.scenario.build(layout_seed)?;
    let generator = SnapshotGenerator::new(&scenario)?;
    let evaluator = SinrEvaluator::new(&scenario)?;
    let mut beamformers = specs
        .iter()
        .map(|s| build_beamformer(s, &scenario))
        .collect::<Result<Vec<_>>>()?;
    let n = config.snapshots;
    let mut traces: Vec<AlgorithmTrace> = specs
        .iter()
        .map(|_| AlgorithmTrace {
            sinr: Vec::with_capacity(n),
            updated: Vec::with_capacity(n),
            stream_checksum: FNV_OFFSET,
        })
        .collect();
    let mut current: Vec<Sinr> = beamformers
        .iter()
        .map(|b| score(&evaluator, b.as_ref()))
        .collect::<Result<_>>()?;
    let m = scenario.m as f64;
    for _ in 0..n {
        let snapshot = generator.generate(&mut rng);
        let noise_obs = norm_sqr(snapshot.noise.view()) / m;
        for (idx, (bf, spec)) in beamformers.iter_mut().zip(&specs).enumerate() {
            let trace = &mut traces[idx];
            trace.stream_checksum = fnv_fold(trace.stream_checksum, snapshot.x.view());
            if let NoiseSettings::Smoothed { .. } = spec.noise {
                bf.observe_noise(noise_obs)?;
            }
            let outcome = bf.step(snapshot.x.view())?;
            if outcome.updated {
                current[idx] = score(&evaluator, bf.as_ref())?;
            }
            trace.sinr.push(current[idx].linear);
            trace.updated.push(outcome.updated);
        }
    }
    Ok(RunTrace {
        run,
        scenario,
        traces,
    })
}

/// Ensemble curve of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrCurve {
    pub label: String,
    pub kind: AlgorithmKind,
    /// Mean output SINR in dB, one entry per snapshot.
    pub mean_sinr_db: Vec<f64>,
    /// Run-averaged cumulative update fraction, one entry per snapshot.
    pub cum_update_fraction: Vec<f64>,
}

impl SinrCurve {
    pub fn len(&self) -> usize {
        self.mean_sinr_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_sinr_db.is_empty()
    }

    /// Mean SINR (dB) at 1-based snapshot `i`.
    pub fn sinr_at(&self, snapshot: usize) -> f64 {
        self.mean_sinr_db[snapshot - 1]
    }

    pub fn final_update_fraction(&self) -> f64 {
        self.cum_update_fraction.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub label: String,
    pub final_sinr_db: f64,
    pub update_fraction: f64,
    pub mean_updates: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curves: Vec<SinrCurve>,
    pub summary: Vec<AlgorithmSummary>,
}

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&SinrCurve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

/// Runs every Monte Carlo trial and reduces them in run order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let runs = || -> Result<Vec<RunTrace>> {
        (0..config.runs)
            .into_par_iter()
            .map(|k| run_single(config, k))
            .collect()
    };
    let traces = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot build a pool of {threads} threads: {e}")))?
            .install(runs)?,
        None => runs()?,
    };
    Ok(reduce(config, &traces))
}

fn reduce(config: &ExperimentConfig, runs: &[RunTrace]) -> ExperimentResult {
    let specs = config.algorithm_specs();
    let n = config.snapshots;
    let k = runs.len() as f64;
    let mut curves = Vec::with_capacity(specs.len());
    let mut summary = Vec::with_capacity(specs.len());
    for (idx, spec) in specs.iter().enumerate() {
        let mut sinr_sum = vec![0.0; n];
        let mut frac_sum = vec![0.0; n];
        let mut updates = 0.0;
        for run in runs {
            let trace = &run.traces[idx];
            for (acc, v) in sinr_sum.iter_mut().zip(&trace.sinr) {
                *acc += v;
            }
            for (acc, v) in frac_sum.iter_mut().zip(trace.cumulative_update_fraction()) {
                *acc += v;
            }
            updates += trace.updated.iter().filter(|u| **u).count() as f64;
        }
        let mean_sinr_db: Vec<f64> = sinr_sum
            .iter()
            .map(|s| Sinr::from_linear(s / k).db)
            .collect();
        let cum_update_fraction: Vec<f64> = frac_sum.iter().map(|f| f / k).collect();
        summary.push(AlgorithmSummary {
            label: spec.label.clone(),
            final_sinr_db: mean_sinr_db.last().copied().unwrap_or(f64::NAN),
            update_fraction: cum_update_fraction.last().copied().unwrap_or(0.0),
            mean_updates: updates / k,
        });
        curves.push(SinrCurve {
            label: spec.label.clone(),
            kind: spec.kind,
            mean_sinr_db,
            cum_update_fraction,
        });
    }
    ExperimentResult { curves, summary }
}

/// `10 log10` of the mean of linear values; exposed for reporting.
pub fn mean_db(values: &[f64]) -> f64 {
    linear_to_db(values.iter().sum::<f64>() / values.len() as f64)
}
