//! Uniform linear array model.
//!
//! `q` far-field narrowband sources impinge on an `m`-element ULA. Snapshot
//! `i` is `x(i) = A(θ) s(i) + n(i)`, where column `k` of `A` is the steering
//! vector of source `k`, `s(i)` holds BPSK symbols scaled by the source
//! amplitudes and `n(i)` is circularly-symmetric white Gaussian noise.
//! Source 0 is always the desired user.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::HermitianMatrix;

/// Half-wavelength spacing `d/λ_c`.
pub const HALF_WAVELENGTH: f64 = 0.5;

/// Interferers never sit closer than this to the desired DOA (degrees).
pub const GUARD_BAND_DEG: f64 = 5.0;

/// Sector over which interferer DOAs are laid out (degrees, open interval).
pub const INTERFERER_SECTOR_DEG: (f64, f64) = (20.0, 160.0);

/// How the powers of the desired user, interferers and noise are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerReference {
    /// `σ_n² = 1`, desired power `10^(SNR/10)`, interferer power `10^(INR/10)`.
    UnitNoise,
    /// Desired power 1, `σ_n² = 10^(−SNR/10)`, interferer power `σ_n²·10^(INR/10)`.
    UnitSignal,
    /// Desired power 1 with SNR and INR measured after the array gain `m`:
    /// `σ_n² = m·10^(−SNR/10)`, interferer power `σ_n²·10^(INR/10)/m`.
    /// Equivalent to unit-norm steering vectors with per-element levels.
    ArrayGain,
}

/// Placement of the interferer DOAs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoaLayout {
    /// Evenly spaced over the interferer sector, skipping the guard band.
    Even,
    /// Uniform random over the same admissible set, drawn from the given seed.
    Random { seed: u64 },
}

/// The statistical world: array geometry, sources and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Sensor count.
    pub m: usize,
    /// Source DOAs in degrees; entry 0 is the desired user.
    pub doas: Vec<f64>,
    /// Linear source powers, aligned with `doas`.
    pub powers: Vec<f64>,
    /// Carrier phase offset of each source in radians.
    pub phases: Vec<f64>,
    /// Per-element noise variance `σ_n²`.
    pub noise_power: f64,
    /// Inter-element spacing in wavelengths.
    pub element_spacing_ratio: f64,
    /// Constraint value `γ` of `wᴴa(θ₀) = γ`.
    pub gamma: f64,
}

impl ScenarioConfig {
    /// Builds a scenario from SNR/INR levels and a DOA layout.
    pub fn from_levels(
        m: usize,
        q: usize,
        desired_doa: f64,
        snr_db: f64,
        inr_db: f64,
        layout: DoaLayout,
        reference: PowerReference,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::Config(
                "at least the desired source is required (q >= 1)".into(),
            ));
        }
        let mut doas = vec![desired_doa];
        doas.extend(interferer_doas(desired_doa, q - 1, layout)?);
        let (desired, interferer, noise) = match reference {
            PowerReference::UnitNoise => (db_to_linear(snr_db), db_to_linear(inr_db), 1.0),
            PowerReference::UnitSignal => {
                let noise = db_to_linear(-snr_db);
                (1.0, noise * db_to_linear(inr_db), noise)
            }
            PowerReference::ArrayGain => {
                let noise = m as f64 * db_to_linear(-snr_db);
                (1.0, noise * db_to_linear(inr_db) / m as f64, noise)
            }
        };
        let mut powers = vec![desired];
        powers.extend(std::iter::repeat_n(interferer, q - 1));
        let config = Self {
            m,
            phases: vec![0.0; q],
            doas,
            powers,
            noise_power: noise,
            element_spacing_ratio: HALF_WAVELENGTH,
            gamma: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn q(&self) -> usize {
        self.doas.len()
    }

    pub fn desired_power(&self) -> f64 {
        self.powers.first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q();
        if self.m == 0 {
            return Err(Error::Config("sensor count m must be at least 1".into()));
        }
        if q > self.m {
            return Err(Error::Config(format!(
                "source count q = {q} exceeds sensor count m = {}",
                self.m
            )));
        }
        if self.powers.len() != q || self.phases.len() != q {
            return Err(Error::Config(format!(
                "expected {q} powers and phases, got {} and {}",
                self.powers.len(),
                self.phases.len()
            )));
        }
        if let Some(p) = self.powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::Config(format!(
                "source power {p} must be finite and >= 0"
            )));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::Config(format!(
                "noise power {} must be finite and > 0",
                self.noise_power
            )));
        }
        if !(self.element_spacing_ratio > 0.0) {
            return Err(Error::Config("element spacing ratio must be > 0".into()));
        }
        for &theta in &self.doas {
            check_doa(theta)?;
        }
        for i in 0..q {
            for j in (i + 1)..q {
                if self.doas[i] == self.doas[j] {
                    return Err(Error::Config(format!(
                        "duplicate DOA {} deg (sources {i} and {j})",
                        self.doas[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

fn check_doa(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 180.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("DOA {theta} deg outside (0, 180)")))
    }
}

/// Admissible interferer intervals: the sector minus the guard band.
fn admissible_intervals(desired: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = INTERFERER_SECTOR_DEG;
    let (g_lo, g_hi) = (desired - GUARD_BAND_DEG, desired + GUARD_BAND_DEG);
    [(lo, g_lo.min(hi)), (g_hi.max(lo), hi)]
        .into_iter()
        .filter(|(a, b)| b > a)
        .collect()
}

/// Maps `u ∈ [0,1)` onto the admissible set by arc length.
fn map_to_intervals(intervals: &[(f64, f64)], u: f64) -> f64 {
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut t = u * total;
    for &(a, b) in intervals {
        if t < b - a {
            return a + t;
        }
        t -= b - a;
    }
    intervals.last().map(|&(_, b)| b).unwrap_or(90.0)
}

/// DOAs of `count` interferers around the desired direction.
pub fn interferer_doas(desired: f64, count: usize, layout: DoaLayout) -> Result<Vec<f64>> {
    check_doa(desired)?;
    let intervals = admissible_intervals(desired);
    if count > 0 && intervals.is_empty() {
        return Err(Error::Config(format!(
            "no admissible interferer directions around {desired} deg"
        )));
    }
    let doas = match layout {
        DoaLayout::Even => (0..count)
            .map(|k| map_to_intervals(&intervals, (k as f64 + 0.5) / count as f64))
            .collect(),
        DoaLayout::Random { seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| map_to_intervals(&intervals, rng.gen::<f64>()))
                .collect()
        }
    };
    Ok(doas)
}

/// `a(θ)_k = exp(−2πj·k·(d/λ_c)·cos θ)` for `k = 0..m`.
pub fn steering_vector(theta_deg: f64, m: usize, spacing_ratio: f64) -> Result<Array1<Complex64>> {
    check_doa(theta_deg)?;
    if m == 0 {
        return Err(Error::Argument("steering vector needs m >= 1".into()));
    }
    let step = -2.0 * PI * spacing_ratio * theta_deg.to_radians().cos();
    Ok(Array1::from_shape_fn(m, |k| {
        Complex64::from_polar(1.0, step * k as f64)
    }))
}

/// `A(θ)`: one steering vector per source, as columns.
pub fn array_manifold(config: &ScenarioConfig) -> Result<Array2<Complex64>> {
    config.validate()?;
    let mut a = Array2::zeros((config.m, config.q()));
    for (k, &theta) in config.doas.iter().enumerate() {
        a.column_mut(k).assign(&steering_vector(
            theta,
            config.m,
            config.element_spacing_ratio,
        )?);
    }
    Ok(a)
}

/// One received snapshot with the quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Received vector `x(i)`, length `m`.
    pub x: Array1<Complex64>,
    /// Amplitude-scaled source symbols `s(i)`, length `q`.
    pub symbols: Array1<Complex64>,
    /// Noise realization `n(i)`, length `m`.
    pub noise: Array1<Complex64>,
}

/// Draws snapshots for one scenario from a caller-owned random stream.
///
/// The manifold is computed once; each draw consumes `q` uniform symbol
/// decisions followed by `2m` standard normals, in that order.
#[derive(Debug, Clone)]
pub struct SnapshotGenerator {
    manifold: Array2<Complex64>,
    amplitudes: Vec<Complex64>,
    noise_std: f64,
}

impl SnapshotGenerator {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let manifold = array_manifold(config)?;
        let amplitudes = config
            .powers
            .iter()
            .zip(&config.phases)
            .map(|(&p, &phi)| Complex64::from_polar(p.sqrt(), phi))
            .collect();
        Ok(Self {
            manifold,
            amplitudes,
            noise_std: (config.noise_power / 2.0).sqrt(),
        })
    }

    pub fn manifold(&self) -> &Array2<Complex64> {
        &self.manifold
    }

    /// Assembles `x = A s + n` from given symbols and noise.
    pub fn assemble(
        &self,
        symbols: Array1<Complex64>,
        noise: Array1<Complex64>,
    ) -> Result<Snapshot> {
        if symbols.len() != self.manifold.ncols() || noise.len() != self.manifold.nrows() {
            return Err(Error::Argument(format!(
                "expected {} symbols and {} noise samples, got {} and {}",
                self.manifold.ncols(),
                self.manifold.nrows(),
                symbols.len(),
                noise.len()
            )));
        }
        let x = self.manifold.dot(&symbols) + &noise;
        Ok(Snapshot { x, symbols, noise })
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Snapshot {
        let symbols = Array1::from_iter(self.amplitudes.iter().map(|&amp| {
            if rng.gen::<bool>() {
                amp
            } else {
                -amp
            }
        }));
        let m = self.manifold.nrows();
        let noise = Array1::from_shape_fn(m, |_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * self.noise_std
        });
        let x = self.manifold.dot(&symbols) + &noise;
        Snapshot { x, symbols, noise }
    }
}

/// Draws one snapshot; prefer [`SnapshotGenerator`] for streams.
pub fn generate_snapshot<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Snapshot> {
    Ok(SnapshotGenerator::new(config)?.generate(rng))
}

/// `Σ_k p_k a(θ_k) a(θ_k)ᴴ + σ_n² I`, over interferers only when
/// `exclude_desired` is set.
pub fn true_covariance(config: &ScenarioConfig, exclude_desired: bool) -> Result<HermitianMatrix> {
    let a = array_manifold(config)?;
    let m = config.m;
    let mut r = Array2::<Complex64>::zeros((m, m));
    let first = usize::from(exclude_desired);
    for k in first..config.q() {
        let p = config.powers[k];
        let col = a.column(k);
        for i in 0..m {
            for j in 0..m {
                r[(i, j)] += col[i] * col[j].conj() * p;
            }
        }
    }
    for i in 0..m {
        r[(i, i)] += config.noise_power;
        // diagonal of a Hermitian matrix is real; drop round-off imaginary parts
        r[(i, i)].im = 0.0;
    }
    Ok(HermitianMatrix::from_trusted(r))
}

/// `(1/N) Σ x(i) x(i)ᴴ`.
pub fn sample_covariance(snapshots: &[Snapshot]) -> Result<HermitianMatrix> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::Argument("sample covariance needs at least one snapshot".into()))?;
    let m = first.x.len();
    let mut r = Array2::<Complex64>::zeros((m, m));
    for s in snapshots {
        if s.x.len() != m {
            return Err(Error::Argument(
                "snapshots have inconsistent lengths".into(),
            ));
        }
        for i in 0..m {
            let xi = s.x[i];
            for j in i..m {
                r[(i, j)] += xi * s.x[j].conj();
            }
        }
    }
    let n = snapshots.len() as f64;
    for i in 0..m {
        r[(i, i)] = Complex64::new(r[(i, i)].re / n, 0.0);
        for j in (i + 1)..m {
            r[(i, j)] /= n;
            r[(j, i)] = r[(i, j)].conj();
        }
    }
    Ok(HermitianMatrix::from_trusted(r))
}
