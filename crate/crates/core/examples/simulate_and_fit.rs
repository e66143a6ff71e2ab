//! One simulated experiment: sample a random-phase homodyne record, fit it,
//! and compare with the brute-force grid maximum.
//!
//! cargo run --release --example simulate_and_fit -- [g1] [g2] [seed]

use homodyne_ml::{
    grid_search_oracle, log_likelihood, mle_fit, moment_init, sample_dataset, ChannelConfig,
    FitOptions, Gains, Probe,
};

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let g1 = args.first().copied().unwrap_or(3.0);
    let g2 = args.get(1).copied().unwrap_or(1.0);
    let seed = args.get(2).copied().unwrap_or(7.0) as u64;

    let truth = Gains::new(g1, g2).unwrap();
    let config = ChannelConfig::new(truth, 1.0, 0.6).unwrap();
    let probe = Probe::real(4.0).unwrap();
    let data = sample_dataset(probe, &config, 10_000, seed).unwrap();

    let init = moment_init(&data).unwrap();
    println!(
        "moments: g={:.6} s^2={:.6} -> G1={:.5} G2={:.5}",
        init.g_hat,
        init.s_sq_hat,
        init.gains.g1(),
        init.gains.g2()
    );

    let fit = mle_fit(&data, &FitOptions::default()).unwrap();
    println!(
        "ML fit:  G1={:.5} ± {:.5}  G2={:.5} ± {:.5}  (loglik {:.3}, {} iterations)",
        fit.gains_hat.g1(),
        fit.err.0,
        fit.gains_hat.g2(),
        fit.err.1,
        fit.loglik,
        fit.iters
    );
    println!("loglik at truth: {:.3}", log_likelihood(&data, truth));

    let lo = Gains::new((g1 - 0.3).max(0.0), (g2 - 0.3).max(0.0)).unwrap();
    let hi = Gains::new(g1 + 0.3, g2 + 0.3).unwrap();
    let grid = grid_search_oracle(&data, lo, hi, 61).unwrap();
    println!(
        "grid argmax (0.01 cells): G1={:.2} G2={:.2}",
        grid.g1(),
        grid.g2()
    );
}
