//! Statistical error versus number of homodyne data, with a log-log fit.
//!
//! G1 = 3, G2 = 5, η = 0.6, α0 = 5, t = 1, 20 trials per point.

use homodyne_ml::harness::{run_n_scaling, ExperimentConfig};

fn main() {
    let config = ExperimentConfig::scaling_defaults();
    let (report, fit) = run_n_scaling(&config).expect("scaling run failed");
    println!(
        "{:>8} | {:>9} {:>9} | {:>9} {:>9}",
        "N", "dG1", "std G1", "dG2", "std G2"
    );
    for row in &report.rows {
        println!(
            "{:>8} | {:>9.5} {:>9.5} | {:>9.5} {:>9.5}",
            row.sweep_value, row.g1.fisher_mean, row.g1.std, row.g2.fisher_mean, row.g2.std
        );
    }
    println!(
        "slope G1: {:.4}  (r² {:.5})",
        fit.g1.slope, fit.g1.r_squared
    );
    println!(
        "slope G2: {:.4}  (r² {:.5})",
        fit.g2.slope, fit.g2.r_squared
    );
}
