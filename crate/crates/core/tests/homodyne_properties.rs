use std::f64::consts::PI;

use homodyne_ml::homodyne::{sample_at_phase, total_variance_param, HomodyneModel};
use homodyne_ml::quadrature::GaussLegendre;
use homodyne_ml::{
    homodyne_logpdf, homodyne_pdf, sample_dataset, wigner_marginal_numeric, ChannelConfig, Gains,
    Probe,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn config(g1: f64, g2: f64, t: f64, eta: f64) -> ChannelConfig {
    ChannelConfig::new(Gains::new(g1, g2).unwrap(), t, eta).unwrap()
}

proptest! {
    #[test]
    fn vacuum_density_is_even(x in -5.0..5.0f64, phi in 0.0..PI, g1 in 0.0..5.0f64, g2 in 0.0..5.0f64) {
        let cfg = config(g1, g2, 1.0, 0.7);
        let p = Probe::real(0.0).unwrap();
        prop_assert_eq!(homodyne_pdf(x, phi, p, &cfg), homodyne_pdf(-x, phi, p, &cfg));
    }

    #[test]
    fn logpdf_is_log_of_pdf(x in -10.0..10.0f64, phi in 0.0..PI, re in -5.0..5.0f64, g2 in 0.0..5.0f64, eta in 0.1..1.0f64) {
        let cfg = config(3.0, g2, 1.0, eta);
        let p = Probe::new(re, 1.0).unwrap();
        let pdf = homodyne_pdf(x, phi, p, &cfg);
        prop_assume!(pdf > 1e-300);
        let lp = homodyne_logpdf(x, phi, p, &cfg);
        prop_assert!((lp.exp() - pdf).abs() <= 1e-12 * pdf);
    }
}

#[test]
fn density_normalized_in_both_regimes() {
    let rule = GaussLegendre::new(201);
    let probe = Probe::new(4.0, 1.0).unwrap();
    for (g1, g2) in [(3.0, 1.0), (2.0, 2.0), (3.0, 5.0), (0.0, 0.0)] {
        for t in [0.5, 1.0] {
            for eta in [0.3, 0.6, 1.0] {
                for phi in [0.0, 1.0, 2.5] {
                    let cfg = config(g1, g2, t, eta);
                    let m = HomodyneModel::new(probe, &cfg);
                    let (mu, sd) = (m.mean(phi), m.variance().sqrt());
                    let mass = rule.integrate(|x| m.pdf(x, phi), mu - 12.0 * sd, mu + 12.0 * sd, 4);
                    assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
                }
            }
        }
    }
}

#[test]
fn oracle_agrees_on_parameter_grid() {
    let mut worst: f64 = 0.0;
    for (g1, g2) in [(3.0, 1.0), (3.0, 2.0), (3.0, 3.0), (3.0, 4.0), (3.0, 5.0)] {
        for eta in [0.3, 0.5, 0.6, 0.8, 1.0] {
            for phi in [0.0, 0.7, 1.4, 2.1, 2.8] {
                let cfg = config(g1, g2, 1.0, eta);
                let probe = Probe::real(4.0).unwrap();
                let ch = cfg.derive();
                for x in [-2.0, 0.0, 2.0] {
                    let a = homodyne_pdf(x, phi, probe, &cfg);
                    let b = wigner_marginal_numeric(probe, &ch, eta, phi, x).unwrap();
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    assert!(worst < 1e-6, "worst {worst}");
}

#[test]
fn oracle_marginal_integrates_to_one() {
    let rule = GaussLegendre::new(201);
    let probe = Probe::real(2.0).unwrap();
    let cfg = config(3.0, 1.0, 1.0, 0.8);
    let ch = cfg.derive();
    let m = HomodyneModel::new(probe, &cfg);
    let (mu, sd) = (m.mean(0.4), m.variance().sqrt());
    let mass = rule.integrate(
        |x| wigner_marginal_numeric(probe, &ch, 0.8, 0.4, x).unwrap(),
        mu - 10.0 * sd,
        mu + 10.0 * sd,
        1,
    );
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn variance_param_decreases_with_efficiency() {
    let ch = config(3.0, 1.0, 1.0, 1.0).derive();
    let mut last = f64::INFINITY;
    for k in 1..=100 {
        let s = total_variance_param(&ch, k as f64 / 100.0).unwrap();
        assert!(s < last);
        last = s;
    }
}

#[test]
fn cosine_moment_recovers_amplitude() {
    let cfg = config(3.0, 1.0, 1.0, 0.6);
    let probe = Probe::real(4.0).unwrap();
    let d = sample_dataset(probe, &cfg, 100_000, 5).unwrap();
    let terms: Vec<f64> = d.samples.iter().map(|s| s.value * s.phase.cos()).collect();
    let n = terms.len() as f64;
    let mean = terms.iter().sum::<f64>() / n;
    let var = terms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let expect = cfg.derive().g * 4.0 / 2.0;
    assert!(
        (mean - expect).abs() < 5.0 * se,
        "mean {mean} expect {expect} se {se}"
    );
}

#[test]
fn fixed_phase_variance_matches_model() {
    let cfg = config(0.0, 0.0, 1.0, 0.7);
    let probe = Probe::real(0.0).unwrap();
    let xs = sample_at_phase(probe, &cfg, 0.0, 100_000, 11);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fourth = xs.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let se = ((fourth - var * var) / n).sqrt();
    let expect = HomodyneModel::new(probe, &cfg).variance();
    assert!(
        (var - expect).abs() < 5.0 * se,
        "var {var} expect {expect} se {se}"
    );
}

#[test]
fn sampler_passes_kolmogorov_smirnov() {
    let cfg = config(3.0, 5.0, 1.0, 0.6);
    let probe = Probe::new(4.0, -1.0).unwrap();
    let phi = 0.9;
    let m = HomodyneModel::new(probe, &cfg);
    let normal = Normal::new(m.mean(phi), m.variance().sqrt()).unwrap();
    let n = 100_000;
    let critical = 1.6276 / (n as f64).sqrt();
    let mut passed = 0;
    for seed in 0..100 {
        let mut xs = sample_at_phase(probe, &cfg, phi, n, seed);
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = normal.cdf(x);
                (c - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - c)
            })
            .fold(0.0, f64::max);
        if d < critical {
            passed += 1;
        }
    }
    assert!(passed >= 95, "{passed}/100 below the 1% critical value");
}

#[test]
fn identical_inputs_identical_dataset() {
    let cfg = config(3.0, 1.0, 1.0, 0.6);
    let probe = Probe::real(4.0).unwrap();
    let a = sample_dataset(probe, &cfg, 5000, 99).unwrap();
    let b = sample_dataset(probe, &cfg, 5000, 99).unwrap();
    assert_eq!(a, b);
    // a prefix of a longer record is the shorter record
    let c = sample_dataset(probe, &cfg, 100, 99).unwrap();
    assert_eq!(&a.samples[..100], &c.samples[..]);
}
