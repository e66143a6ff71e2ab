//! Statistical error versus homodyne detector efficiency.
//!
//! N = 5·10³, G1 = 2, G2 = 1, α0 = 8, t = 1, η from 0.3 to 1.0.

use homodyne_ml::harness::{run_eta_sweep, spearman, ExperimentConfig};

fn main() {
    let config = ExperimentConfig::eta_defaults();
    let report = run_eta_sweep(&config).expect("eta sweep failed");
    println!(
        "{:>5} | {:>9} {:>9} | {:>9} {:>9}",
        "eta", "dG1", "std G1", "dG2", "std G2"
    );
    for row in &report.rows {
        println!(
            "{:>5} | {:>9.5} {:>9.5} | {:>9.5} {:>9.5}",
            row.sweep_value, row.g1.fisher_mean, row.g1.std, row.g2.fisher_mean, row.g2.std
        );
    }
    let etas: Vec<f64> = report.rows.iter().map(|r| r.sweep_value).collect();
    let e1: Vec<f64> = report.rows.iter().map(|r| r.g1.fisher_mean).collect();
    let e2: Vec<f64> = report.rows.iter().map(|r| r.g2.fisher_mean).collect();
    println!("Spearman(eta, dG1) = {:.3}", spearman(&etas, &e1));
    println!("Spearman(eta, dG2) = {:.3}", spearman(&etas, &e2));
    let (first, last) = (&report.rows[0], &report.rows[report.rows.len() - 1]);
    println!(
        "dG(eta={}) / dG(eta={}): {:.3}, {:.3}",
        first.sweep_value,
        last.sweep_value,
        first.g1.fisher_mean / last.g1.fisher_mean,
        first.g2.fisher_mean / last.g2.fisher_mean
    );
}
