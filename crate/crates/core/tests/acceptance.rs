//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! cargo test --release --test acceptance

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use homodyne_ml::cli::{run, EXIT_OK};
use homodyne_ml::estimator::{fisher_errors, grid_search_oracle, mle_fit, FitOptions};
use homodyne_ml::harness::{run_eta_sweep, run_n_scaling, run_table, spearman, ExperimentConfig};
use homodyne_ml::homodyne::HomodyneModel;
use homodyne_ml::quadrature::GaussLegendre;
use homodyne_ml::{
    derive_channel, homodyne_pdf, invert_channel, sample_dataset, wigner_marginal_numeric,
    ChannelConfig, Gains, Probe,
};

/// Published per-run errors (δG1, δG2) for G1 = 3 and G2 = 1..=5.
const TABLE_ERRORS: [(f64, f64); 5] = [
    (0.03489146, 0.03299910),
    (0.04629955, 0.04412476),
    (0.07376747, 0.07122468),
    (0.09926873, 0.09763157),
    (0.06556872, 0.06240839),
];

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gains(a: f64, b: f64) -> Gains {
    Gains::new(a, b).unwrap()
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let config = ExperimentConfig::table_defaults();
    assert_eq!(config.n_trials, 50);
    let report = run_table(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut ok = elapsed < Duration::from_secs(120);
    let mut detail = String::new();
    for (row, (p1, p2)) in report.rows.iter().zip(TABLE_ERRORS) {
        let n = (row.trials - row.failed) as f64;
        let truth = row.gains_true;
        for (name, stats, t, published) in [
            ("G1", row.g1, truth.g1(), p1),
            ("G2", row.g2, truth.g2(), p2),
        ] {
            let z = (stats.mean - t).abs() / (stats.std / n.sqrt());
            let ratio = stats.std / published;
            ok &= z < 3.0 && (0.5..=2.0).contains(&ratio);
            detail += &format!(
                "[G2={} {name}: mean {:.4} z={:.2}, std {:.4} / published {:.4} = {:.2}] ",
                truth.g2(),
                stats.mean,
                z,
                stats.std,
                published,
                ratio
            );
        }
    }
    detail += &format!("runtime {:.1}s", elapsed.as_secs_f64());
    check(ok, detail)
}

fn n_scaling() -> Outcome {
    let start = Instant::now();
    let config = ExperimentConfig::scaling_defaults();
    assert_eq!(config.n_trials, 20);
    let (_, fit) = run_n_scaling(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let in_band = |s: f64| (-0.6..=-0.4).contains(&s);
    check(
        in_band(fit.g1.slope) && in_band(fit.g2.slope) && elapsed < Duration::from_secs(300),
        format!(
            "slopes G1 {:.4}, G2 {:.4} (band [-0.6, -0.4]); runtime {:.1}s",
            fit.g1.slope,
            fit.g2.slope,
            elapsed.as_secs_f64()
        ),
    )
}

fn eta_robustness() -> Outcome {
    let config = ExperimentConfig::eta_defaults();
    let report = run_eta_sweep(&config).map_err(|e| e.to_string())?;
    let etas: Vec<f64> = report.rows.iter().map(|r| r.sweep_value).collect();
    let lo = report.rows.first().unwrap();
    let hi = report.rows.last().unwrap();
    assert_eq!((lo.sweep_value, hi.sweep_value), (0.3, 1.0));
    let mut ok = true;
    let mut detail = String::new();
    for (name, pick) in [
        (
            "G1",
            (|r: &homodyne_ml::harness::ReportRow| r.g1.fisher_mean) as fn(&_) -> f64,
        ),
        ("G2", |r| r.g2.fisher_mean),
    ] {
        let errs: Vec<f64> = report.rows.iter().map(pick).collect();
        let rho = spearman(&etas, &errs);
        let ratio = pick(lo) / pick(hi);
        ok &= pick(lo).is_finite() && ratio < 3.0 && rho <= -0.5;
        detail += &format!("{name}: err(0.3)/err(1.0) = {ratio:.3}, spearman {rho:.3}; ");
    }
    check(ok, detail)
}

fn oracle_suite() -> Outcome {
    // closed form vs Wigner-marginal quadrature on a 5x5x5 (G2, η, φ) grid
    let probe = Probe::real(4.0).unwrap();
    let mut worst_pdf: f64 = 0.0;
    for g2 in [1.0, 2.0, 3.0, 4.0, 5.0] {
        for eta in [0.2, 0.4, 0.6, 0.8, 1.0] {
            for phi in [0.0, 0.6, 1.2, 1.8, 2.4] {
                let cfg = ChannelConfig::new(gains(3.0, g2), 1.0, eta).unwrap();
                let ch = cfg.derive();
                let m = HomodyneModel::new(probe, &cfg);
                let x = m.mean(phi) + 0.5 * m.variance().sqrt();
                let num =
                    wigner_marginal_numeric(probe, &ch, eta, phi, x).map_err(|e| e.to_string())?;
                worst_pdf = worst_pdf.max((num - homodyne_pdf(x, phi, probe, &cfg)).abs());
            }
        }
    }

    // grid argmax vs simplex fit
    let mut worst_grid: f64 = 0.0;
    for seed in 0..10u64 {
        let cfg = ChannelConfig::new(gains(3.0, 1.0), 1.0, 0.6).unwrap();
        let d = sample_dataset(probe, &cfg, 1000, 300 + seed).unwrap();
        let fit = mle_fit(&d, &FitOptions::default()).map_err(|e| e.to_string())?;
        let grid = grid_search_oracle(&d, gains(2.4, 0.4), gains(3.6, 1.6), 121)
            .map_err(|e| e.to_string())?;
        worst_grid = worst_grid
            .max((grid.g1() - fit.gains_hat.g1()).abs())
            .max((grid.g2() - fit.gains_hat.g2()).abs());
    }

    // normalization
    let rule = GaussLegendre::new(201);
    let mut worst_norm: f64 = 0.0;
    for (g1, g2) in [(3.0, 1.0), (3.0, 3.0), (3.0, 5.0)] {
        for eta in [0.3, 1.0] {
            for phi in [0.0, 1.3] {
                let cfg = ChannelConfig::new(gains(g1, g2), 1.0, eta).unwrap();
                let m = HomodyneModel::new(probe, &cfg);
                let (mu, sd) = (m.mean(phi), m.variance().sqrt());
                let mass = rule.integrate(|x| m.pdf(x, phi), mu - 12.0 * sd, mu + 12.0 * sd, 4);
                worst_norm = worst_norm.max((mass - 1.0).abs());
            }
        }
    }
    check(
        worst_pdf < 1e-6 && worst_grid <= 0.01 + 1e-9 && worst_norm < 1e-8,
        format!(
            "max |pdf - quadrature| {worst_pdf:.2e}; max |grid - fit| {worst_grid:.4}; max |mass - 1| {worst_norm:.2e}"
        ),
    )
}

fn analytic_limits() -> Outcome {
    let mut ok = true;
    let mut worst_cont: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        for eps in [1e-4, 1e-6, 1e-8] {
            let ch = derive_channel(gains(3.0 + eps, 3.0 - eps), t);
            let err = (ch.delta_sq - 3.0 * t).abs();
            ok &= err <= 10.0 * eps * t * t;
            worst_cont = worst_cont.max(err / (10.0 * eps * t * t));
        }
    }

    let mut worst_inv: f64 = 0.0;
    let mut worst_semi: f64 = 0.0;
    for (g1, g2) in [(3.0, 1.0), (3.0, 2.0), (3.0, 4.0), (3.0, 5.0), (0.5, 6.0)] {
        let g = gains(g1, g2);
        for eta in [0.3, 0.6, 1.0] {
            let ch = derive_channel(g, 1.0);
            let inv = invert_channel(ch.g, ch.s_sq + (1.0 - eta) / (2.0 * eta), 1.0, eta)
                .map_err(|e| e.to_string())?;
            worst_inv = worst_inv
                .max(((inv.gains.g1() - g1) / g1).abs())
                .max(((inv.gains.g2() - g2) / g2).abs());
        }
        let (a, b) = (derive_channel(g, 0.4), derive_channel(g, 0.9));
        let whole = derive_channel(g, 1.3);
        worst_semi = worst_semi
            .max(((a.g * b.g - whole.g) / whole.g).abs())
            .max(((b.g * b.g * a.delta_sq + b.delta_sq - whole.delta_sq) / whole.delta_sq).abs());
    }
    ok &= worst_inv < 1e-10 && worst_semi < 1e-10;

    let cfg = ChannelConfig::new(gains(3.0, 1.0), 1.0, 0.6).unwrap();
    let d = sample_dataset(Probe::real(4.0).unwrap(), &cfg, 10_000, 4).unwrap();
    let mut dd = d.clone();
    dd.samples.extend_from_slice(&d.samples);
    let at = mle_fit(&d, &FitOptions::default())
        .map_err(|e| e.to_string())?
        .gains_hat;
    let (a1, a2) = fisher_errors(&d, at).map_err(|e| e.to_string())?;
    let (b1, b2) = fisher_errors(&dd, at).map_err(|e| e.to_string())?;
    let dev = (((b1 * b1) / (a1 * a1) - 0.5) / 0.5)
        .abs()
        .max((((b2 * b2) / (a2 * a2) - 0.5) / 0.5).abs());
    ok &= dev < 1e-6;
    check(
        ok,
        format!(
            "continuity err/bound max {worst_cont:.3}; inversion {worst_inv:.1e}; semigroup {worst_semi:.1e}; doubling {dev:.1e}"
        ),
    )
}

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["homodyne-ml"];
    argv.extend_from_slice(args);
    run(argv)
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    matches!((fs::read(a), fs::read(b)), (Ok(x), Ok(y)) if x == y)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let p = |name: &str| root.join(name).to_str().unwrap().to_string();
    let mut mismatched = Vec::new();

    for run_id in ["1", "2"] {
        let data = p(&format!("data{run_id}.csv"));
        let steps: Vec<Vec<String>> = vec![
            vec![
                "simulate", "--g1", "3", "--g2", "1", "--alpha", "4", "--eta", "0.6", "--t", "1",
                "--n", "10000", "--seed", "7", "--out", &data,
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            vec![
                "estimate".into(),
                "--input".into(),
                data.clone(),
                "--out".into(),
                p(&format!("fit{run_id}.txt")),
            ],
            vec![
                "table".into(),
                "--trials".into(),
                "50".into(),
                "--seed".into(),
                "1".into(),
                "--out".into(),
                p(&format!("table{run_id}")),
            ],
            vec![
                "scaling".into(),
                "--out".into(),
                p(&format!("scaling{run_id}")),
            ],
            vec![
                "eta-sweep".into(),
                "--out".into(),
                p(&format!("eta{run_id}")),
            ],
        ];
        for step in steps {
            let argv: Vec<&str> = step.iter().map(String::as_str).collect();
            if cli(&argv) != EXIT_OK {
                return Err(format!("command failed: {}", argv.join(" ")));
            }
        }
    }
    let pairs = [
        ("data1.csv", "data2.csv"),
        ("fit1.txt", "fit2.txt"),
        ("table1/report.csv", "table2/report.csv"),
        ("table1/plot.csv", "table2/plot.csv"),
        ("scaling1/report.csv", "scaling2/report.csv"),
        ("scaling1/plot.csv", "scaling2/plot.csv"),
        ("scaling1/slopes.txt", "scaling2/slopes.txt"),
        ("eta1/report.csv", "eta2/report.csv"),
        ("eta1/plot.csv", "eta2/plot.csv"),
    ];
    for (a, b) in pairs {
        if !same_bytes(&root.join(a), &root.join(b)) {
            mismatched.push(a);
        }
    }
    check(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!(
                "{} artifacts byte-identical across repeated runs",
                pairs.len()
            )
        } else {
            format!("differing artifacts: {mismatched:?}")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 6] = [
        (
            "table reproduction (G1=3, G2=1..5, 50 trials)",
            table_reproduction,
        ),
        ("N scaling of the statistical error", n_scaling),
        ("robustness to detector efficiency", eta_robustness),
        ("oracle suite", oracle_suite),
        ("analytic-limit suite", analytic_limits),
        ("determinism of CLI artifacts", determinism),
    ];
    let mut failures = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", 6 - failures, 6);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
