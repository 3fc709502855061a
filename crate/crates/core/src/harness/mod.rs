//! Monte Carlo experiment harness: configuration, runner, SINR metric and
//! CSV / SVG output.

pub mod config;
pub mod csv;
pub mod metrics;
pub mod plot;
pub mod runner;

pub use config::{
    parse_config, AlgorithmKind, AlgorithmSpec, BoundSettings, ExperimentConfig, NoiseSettings,
};
pub use csv::{format_sig6, render_csv, write_csv, CSV_HEADER};
pub use metrics::{output_sinr, Sinr, SinrEvaluator, SINR_DB_FLOOR};
pub use plot::{emit_plot, render_svg};
pub use runner::{
    run_experiment, run_single, AlgorithmSummary, ExperimentResult, RunTrace, SinrCurve,
};

/// Fixed-bound sweep: every gated algorithm of `base` with each fixed `δ`,
/// followed by its time-varying (PDB) counterpart.
pub fn sweep_bound_config(base: &ExperimentConfig, deltas: &[f64]) -> ExperimentConfig {
    let kinds: Vec<AlgorithmKind> = {
        let gated: Vec<AlgorithmKind> = base
            .algorithms
            .iter()
            .copied()
            .filter(|k| k.is_gated())
            .collect();
        if gated.is_empty() {
            vec![AlgorithmKind::FrSmSg, AlgorithmKind::JioSmSg]
        } else {
            gated
        }
    };
    let mut custom = Vec::new();
    for kind in kinds {
        let spec = base.spec_for(kind);
        for &delta in deltas {
            custom.push(spec.with_bound(BoundSettings::Fixed { delta }));
        }
        custom.push(spec.with_bound(BoundSettings::Pdb {
            alpha: base.alpha,
            beta: base.beta,
        }));
    }
    ExperimentConfig {
        custom_algorithms: custom,
        ..base.clone()
    }
}
