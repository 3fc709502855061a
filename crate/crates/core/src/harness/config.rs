//! Experiment configuration and its flat `section.key = value` text format.
//!
//! Blank lines and lines starting with `#` are ignored. Every key must be
//! one of [`KNOWN_KEYS`]; later assignments win, and overrides passed to
//! [`parse_config`] are applied after the file. Missing keys take the
//! defaults of [`ExperimentConfig::default`], which reproduce the 64-element,
//! 25-source convergence scenario.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::array_model::{DoaLayout, PowerReference, ScenarioConfig};
use crate::beamformers::{JioOptions, ProjectorKind};
use crate::bounds::{BoundPolicy, NoiseEstimator};
use crate::error::{Error, Result};

/// Every accepted configuration key.
pub const KNOWN_KEYS: &[&str] = &[
    "scenario.m",
    "scenario.q",
    "scenario.desired_doa",
    "scenario.snr_db",
    "scenario.inr_db",
    "scenario.doa_layout",
    "scenario.power_reference",
    "scenario.spacing",
    "scenario.gamma",
    "run.snapshots",
    "run.runs",
    "run.seed",
    "run.threads",
    "run.algorithms",
    "jio.rank",
    "jio.mu_t",
    "jio.mu_w",
    "jio.projector",
    "jio.reproject",
    "sg.mu",
    "bound.mode",
    "bound.delta_fixed",
    "bound.alpha",
    "bound.beta",
    "noise.mode",
    "noise.rho",
    "output.csv",
    "output.plot",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    JioSmSg,
    JioSg,
    FrSg,
    FrSmSg,
    Oracle,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::JioSmSg,
        AlgorithmKind::JioSg,
        AlgorithmKind::FrSg,
        AlgorithmKind::FrSmSg,
        AlgorithmKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::JioSmSg => "jio-sm-sg",
            AlgorithmKind::JioSg => "jio-sg",
            AlgorithmKind::FrSg => "fr-sg",
            AlgorithmKind::FrSmSg => "fr-sm-sg",
            AlgorithmKind::Oracle => "oracle",
        }
    }

    /// Whether updates are data-selective.
    pub fn is_gated(self) -> bool {
        matches!(self, AlgorithmKind::JioSmSg | AlgorithmKind::FrSmSg)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm `{s}`; expected one of jio-sm-sg, jio-sg, fr-sg, fr-sm-sg, oracle"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundModeSetting {
    Fixed,
    Pdb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModeSetting {
    Known,
    Smoothed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSettings {
    Fixed { delta: f64 },
    Pdb { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSettings {
    Known,
    Smoothed { rho: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSettings {
    pub m: usize,
    pub q: usize,
    pub desired_doa: f64,
    pub snr_db: f64,
    pub inr_db: f64,
    pub layout: LayoutSetting,
    pub power_reference: PowerReference,
    pub spacing: f64,
    pub gamma: f64,
}

/// Interferer placement; `Random` redraws the DOAs for every run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutSetting {
    Even,
    Random,
}

impl ScenarioSettings {
    /// Materializes the scenario; `layout_seed` is used by the random layout.
    pub fn build(&self, layout_seed: u64) -> Result<ScenarioConfig> {
        let layout = match self.layout {
            LayoutSetting::Even => DoaLayout::Even,
            LayoutSetting::Random => DoaLayout::Random { seed: layout_seed },
        };
        let mut cfg = ScenarioConfig::from_levels(
            self.m,
            self.q,
            self.desired_doa,
            self.snr_db,
            self.inr_db,
            layout,
            self.power_reference,
        )?;
        cfg.element_spacing_ratio = self.spacing;
        cfg.gamma = self.gamma;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One algorithm instance of an experiment, with its own parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// Column label in the CSV and legend.
    pub label: String,
    pub jio: JioOptions,
    pub mu_t: f64,
    pub mu_w: f64,
    pub mu: f64,
    pub bound: BoundSettings,
    pub noise: NoiseSettings,
}

impl AlgorithmSpec {
    pub fn bound_policy(&self, noise_power: f64) -> Result<BoundPolicy> {
        let noise = match self.noise {
            NoiseSettings::Known => NoiseEstimator::known(noise_power)?,
            NoiseSettings::Smoothed { rho } => NoiseEstimator::smoothed(rho, noise_power)?,
        };
        match self.bound {
            BoundSettings::Fixed { delta } => BoundPolicy::fixed(delta, noise),
            BoundSettings::Pdb { alpha, beta } => BoundPolicy::pdb(alpha, beta, noise),
        }
    }

    /// Copy with a different bound and a label describing it.
    pub fn with_bound(&self, bound: BoundSettings) -> Self {
        let suffix = match bound {
            BoundSettings::Fixed { delta } => format!("delta={delta}"),
            BoundSettings::Pdb { .. } => "pdb".to_string(),
        };
        Self {
            label: format!("{}[{suffix}]", self.kind),
            bound,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSettings,
    pub algorithms: Vec<AlgorithmKind>,
    /// Explicit per-algorithm specs; when non-empty they replace `algorithms`.
    pub custom_algorithms: Vec<AlgorithmSpec>,
    pub rank: usize,
    pub mu_t: f64,
    pub mu_w: f64,
    pub fr_mu: f64,
    pub projector: ProjectorKind,
    pub reproject: bool,
    pub bound_mode: BoundModeSetting,
    pub delta_fixed: f64,
    pub alpha: f64,
    pub beta: f64,
    pub noise_mode: NoiseModeSetting,
    pub rho: f64,
    pub snapshots: usize,
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

/// Runs per experiment unless overridden (minutes-scale on a desktop).
pub const DEFAULT_RUNS: usize = 100;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSettings {
                m: 64,
                q: 25,
                desired_doa: 90.0,
                snr_db: 10.0,
                inr_db: 30.0,
                layout: LayoutSetting::Even,
                power_reference: PowerReference::ArrayGain,
                spacing: 0.5,
                gamma: 1.0,
            },
            algorithms: AlgorithmKind::ALL.to_vec(),
            custom_algorithms: Vec::new(),
            rank: 5,
            mu_t: 1e-5,
            mu_w: 1e-5,
            fr_mu: 1e-6,
            projector: ProjectorKind::Normalized,
            reproject: false,
            bound_mode: BoundModeSetting::Pdb,
            delta_fixed: 1.0,
            alpha: 22.0,
            beta: 0.99,
            noise_mode: NoiseModeSetting::Known,
            rho: 0.99,
            snapshots: 1000,
            runs: DEFAULT_RUNS,
            master_seed: 2011,
            threads: None,
            csv: None,
            plot: None,
        }
    }
}

impl ExperimentConfig {
    /// Algorithm settings for `kind` taken from the shared settings.
    pub fn spec_for(&self, kind: AlgorithmKind) -> AlgorithmSpec {
        AlgorithmSpec {
            kind,
            label: kind.name().to_string(),
            jio: JioOptions {
                rank: self.rank,
                gamma: self.scenario.gamma,
                projector: self.projector,
                reproject: self.reproject,
            },
            mu_t: self.mu_t,
            mu_w: self.mu_w,
            mu: self.fr_mu,
            bound: self.bound(),
            noise: self.noise(),
        }
    }

    pub fn bound(&self) -> BoundSettings {
        match self.bound_mode {
            BoundModeSetting::Fixed => BoundSettings::Fixed {
                delta: self.delta_fixed,
            },
            BoundModeSetting::Pdb => BoundSettings::Pdb {
                alpha: self.alpha,
                beta: self.beta,
            },
        }
    }

    pub fn noise(&self) -> NoiseSettings {
        match self.noise_mode {
            NoiseModeSetting::Known => NoiseSettings::Known,
            NoiseModeSetting::Smoothed => NoiseSettings::Smoothed { rho: self.rho },
        }
    }

    /// The algorithm instances to run, in output order.
    pub fn algorithm_specs(&self) -> Vec<AlgorithmSpec> {
        if self.custom_algorithms.is_empty() {
            self.algorithms.iter().map(|&k| self.spec_for(k)).collect()
        } else {
            self.custom_algorithms.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snapshots == 0 {
            return Err(Error::Config("run.snapshots must be >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("run.runs must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("run.threads must be >= 1".into()));
        }
        let specs = self.algorithm_specs();
        if specs.is_empty() {
            return Err(Error::Config(
                "run.algorithms must name at least one algorithm".into(),
            ));
        }
        let mut labels: Vec<&str> = specs.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("algorithm labels must be unique".into()));
        }
        let scenario = self.scenario.build(0)?;
        for spec in &specs {
            if matches!(spec.kind, AlgorithmKind::JioSg | AlgorithmKind::JioSmSg)
                && (spec.jio.rank == 0 || spec.jio.rank > scenario.m)
            {
                return Err(Error::Config(format!(
                    "jio.rank = {} must satisfy 1 <= r <= m = {}",
                    spec.jio.rank, scenario.m
                )));
            }
            for (key, v) in [
                ("jio.mu_t", spec.mu_t),
                ("jio.mu_w", spec.mu_w),
                ("sg.mu", spec.mu),
            ] {
                if !v.is_finite() {
                    return Err(Error::Config(format!("{key} = {v} must be finite")));
                }
            }
            spec.bound_policy(scenario.noise_power)?;
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "scenario.m" => self.scenario.m = parse(key, v, "a positive integer")?,
            "scenario.q" => self.scenario.q = parse(key, v, "a positive integer")?,
            "scenario.desired_doa" => {
                self.scenario.desired_doa = parse_f64(key, v, "an angle in (0, 180) degrees")?
            }
            "scenario.snr_db" => self.scenario.snr_db = parse_f64(key, v, "a finite dB value")?,
            "scenario.inr_db" => self.scenario.inr_db = parse_f64(key, v, "a finite dB value")?,
            "scenario.doa_layout" => {
                self.scenario.layout = match v {
                    "even" => LayoutSetting::Even,
                    "random" => LayoutSetting::Random,
                    _ => return Err(bad(key, v, "`even` or `random`")),
                }
            }
            "scenario.power_reference" => {
                self.scenario.power_reference = match v {
                    "unit-noise" => PowerReference::UnitNoise,
                    "unit-signal" => PowerReference::UnitSignal,
                    "array-gain" => PowerReference::ArrayGain,
                    _ => return Err(bad(key, v, "`unit-noise`, `unit-signal` or `array-gain`")),
                }
            }
            "scenario.spacing" => self.scenario.spacing = parse_f64(key, v, "a spacing ratio > 0")?,
            "scenario.gamma" => {
                self.scenario.gamma = parse_f64(key, v, "a finite constraint value")?
            }
            "run.snapshots" => self.snapshots = parse(key, v, "an integer >= 1")?,
            "run.runs" => self.runs = parse(key, v, "an integer >= 1")?,
            "run.seed" => self.master_seed = parse(key, v, "an unsigned 64-bit integer")?,
            "run.threads" => self.threads = Some(parse(key, v, "an integer >= 1")?),
            "run.algorithms" => {
                self.algorithms = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse::<AlgorithmKind>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Config(format!("key `{key}`: {e}")))?;
                if self.algorithms.is_empty() {
                    return Err(bad(key, v, "a comma-separated list of algorithm names"));
                }
            }
            "jio.rank" => self.rank = parse(key, v, "an integer 1 <= r <= m")?,
            "jio.mu_t" => self.mu_t = parse_f64(key, v, "a finite step size")?,
            "jio.mu_w" => self.mu_w = parse_f64(key, v, "a finite step size")?,
            "jio.projector" => {
                self.projector = match v {
                    "unnormalized" => ProjectorKind::Unnormalized,
                    "normalized" => ProjectorKind::Normalized,
                    _ => return Err(bad(key, v, "`unnormalized` or `normalized`")),
                }
            }
            "jio.reproject" => self.reproject = parse(key, v, "`true` or `false`")?,
            "sg.mu" => self.fr_mu = parse_f64(key, v, "a finite step size")?,
            "bound.mode" => {
                self.bound_mode = match v {
                    "fixed" => BoundModeSetting::Fixed,
                    "pdb" => BoundModeSetting::Pdb,
                    _ => return Err(bad(key, v, "`fixed` or `pdb`")),
                }
            }
            "bound.delta_fixed" => {
                self.delta_fixed = parse_f64(key, v, "a bound >= 0")?;
                if self.delta_fixed < 0.0 {
                    return Err(bad(key, v, "a bound >= 0"));
                }
            }
            "bound.alpha" => {
                self.alpha = parse_f64(key, v, "a value > 1")?;
                if self.alpha <= 1.0 {
                    return Err(bad(key, v, "a value > 1"));
                }
            }
            "bound.beta" => {
                self.beta = parse_f64(key, v, "a forgetting factor in [0, 1]")?;
                if !(0.0..=1.0).contains(&self.beta) {
                    return Err(bad(key, v, "a forgetting factor in [0, 1]"));
                }
            }
            "noise.mode" => {
                self.noise_mode = match v {
                    "known" => NoiseModeSetting::Known,
                    "smoothed" => NoiseModeSetting::Smoothed,
                    _ => return Err(bad(key, v, "`known` or `smoothed`")),
                }
            }
            "noise.rho" => {
                self.rho = parse_f64(key, v, "a smoothing factor in [0, 1]")?;
                if !(0.0..=1.0).contains(&self.rho) {
                    return Err(bad(key, v, "a smoothing factor in [0, 1]"));
                }
            }
            "output.csv" => self.csv = Some(PathBuf::from(v)),
            "output.plot" => self.plot = Some(PathBuf::from(v)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

fn bad(key: &str, value: &str, expected: &str) -> Error {
    Error::Config(format!("key `{key}`: expected {expected}, got `{value}`"))
}

fn parse<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, expected))
}

fn parse_f64(key: &str, value: &str, expected: &str) -> Result<f64> {
    let v: f64 = parse(key, value, expected)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, value, expected))
    }
}

/// Parses config text, then applies `overrides` in order, then validates.
///
/// Empty text yields the default experiment.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `section.key = value`, got `{line}`",
                lineno + 1
            ))
        })?;
        config.set(key.trim(), value)?;
    }
    for (key, value) in overrides {
        config.set(key.trim(), value)?;
    }
    config.validate()?;
    Ok(config)
}
