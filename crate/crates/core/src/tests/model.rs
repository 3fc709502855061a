use crate::array_model::{
    array_manifold, sample_covariance, steering_vector, true_covariance, DoaLayout, PowerReference,
    ScenarioConfig, SnapshotGenerator,
};
use crate::numerics::{Cholesky, HermitianMatrix};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_scenario() -> ScenarioConfig {
    ScenarioConfig::from_levels(
        8,
        3,
        90.0,
        10.0,
        20.0,
        DoaLayout::Even,
        PowerReference::UnitNoise,
    )
    .unwrap()
}

#[test]
fn noise_is_circular_with_configured_power() {
    let cfg = small_scenario();
    let gen = SnapshotGenerator::new(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    let (mut mean, mut power, mut re2, mut pseudo) =
        (Complex64::new(0.0, 0.0), 0.0, 0.0, Complex64::new(0.0, 0.0));
    for _ in 0..n {
        let s = gen.generate(&mut rng);
        for z in s.noise.iter() {
            mean += z;
            power += z.norm_sqr();
            re2 += z.re * z.re;
            pseudo += z * z;
        }
    }
    let count = (n * cfg.m) as f64;
    assert!((mean / count).norm() < 0.01);
    assert!((power / count / cfg.noise_power - 1.0).abs() < 0.01);
    assert!((re2 / count / (cfg.noise_power / 2.0) - 1.0).abs() < 0.02);
    // E[n²] = 0 for a circular variable
    assert!((pseudo / count).norm() < 0.01);
}

#[test]
fn symbols_are_bpsk_with_source_power() {
    let cfg = small_scenario();
    let gen = SnapshotGenerator::new(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut plus = 0usize;
    for _ in 0..4000 {
        let s = gen.generate(&mut rng);
        for (k, z) in s.symbols.iter().enumerate() {
            assert!((z.norm_sqr() - cfg.powers[k]).abs() < 1e-9 * cfg.powers[k]);
        }
        // with zero phases the symbols are real
        if s.symbols[0].re > 0.0 {
            plus += 1;
        }
    }
    assert!((1800..2200).contains(&plus));
}

#[test]
fn received_vector_is_manifold_times_symbols_plus_noise() {
    let cfg = small_scenario();
    let gen = SnapshotGenerator::new(&cfg).unwrap();
    let a = array_manifold(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let s = gen.generate(&mut rng);
    let rebuilt = a.dot(&s.symbols) + &s.noise;
    for (u, v) in rebuilt.iter().zip(s.x.iter()) {
        assert!((u - v).norm() < 1e-12);
    }
}

#[test]
fn random_doas_give_full_column_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let m = rng.gen_range(4..16);
        let q = rng.gen_range(1..m);
        let seed = rng.gen();
        let cfg = ScenarioConfig::from_levels(
            m,
            q,
            90.0,
            0.0,
            10.0,
            DoaLayout::Random { seed },
            PowerReference::UnitNoise,
        )
        .unwrap();
        let a = array_manifold(&cfg).unwrap();
        let gram: Array2<Complex64> = a.t().mapv(|z| z.conj()).dot(&a);
        // AᴴA positive definite iff A has full column rank
        assert!(Cholesky::factor(&HermitianMatrix::new(gram).unwrap()).is_ok());
    }
}

#[test]
fn steering_vector_known_values() {
    let a = steering_vector(90.0, 4, 0.5).unwrap();
    for z in a.iter() {
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
    // cos 60° = 1/2: phase falls by π/2 per element
    let a = steering_vector(60.0, 3, 0.5).unwrap();
    assert!((a[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    assert!((a[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    assert!(steering_vector(0.0, 3, 0.5).is_err());
}

#[test]
fn sample_covariance_tracks_truth_on_small_array() {
    let cfg = small_scenario();
    let gen = SnapshotGenerator::new(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let snaps: Vec<_> = (0..50_000).map(|_| gen.generate(&mut rng)).collect();
    let r_hat = sample_covariance(&snaps).unwrap();
    let r = true_covariance(&cfg, false).unwrap();
    let diff = r_hat.as_array() - r.as_array();
    let rel = diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        / r.as_array()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
    assert!(rel < 0.05, "relative error {rel}");
}

#[test]
fn ensemble_mean_of_received_vector_vanishes() {
    let cfg = small_scenario();
    let gen = SnapshotGenerator::new(&cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let n = 100_000;
    let mut sum = ndarray::Array1::<Complex64>::zeros(cfg.m);
    for _ in 0..n {
        sum += &gen.generate(&mut rng).x;
    }
    let mean_norm = sum.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / n as f64;
    let total = cfg.powers.iter().sum::<f64>() + cfg.noise_power;
    assert!(
        mean_norm < 0.05 * (cfg.m as f64 * total).sqrt(),
        "{mean_norm}"
    );
}
