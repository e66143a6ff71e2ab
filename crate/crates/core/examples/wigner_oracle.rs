//! Closed-form homodyne density against the numerically integrated Wigner
//! marginal.

use homodyne_ml::{homodyne_pdf, wigner_marginal_numeric, ChannelConfig, Gains, Probe};

fn main() {
    let probe = Probe::real(4.0).unwrap();
    let mut worst: f64 = 0.0;
    for (g1, g2) in [(3.0, 1.0), (3.0, 3.0), (3.0, 5.0)] {
        for eta in [0.6, 1.0] {
            let config = ChannelConfig::new(Gains::new(g1, g2).unwrap(), 1.0, eta).unwrap();
            let ch = config.derive();
            for phi in [0.0, 0.7, 2.0] {
                for x in [-2.0, 0.0, 2.0, 4.0] {
                    let exact = homodyne_pdf(x, phi, probe, &config);
                    let num = wigner_marginal_numeric(probe, &ch, eta, phi, x).unwrap();
                    worst = worst.max((exact - num).abs());
                }
            }
        }
    }
    println!("largest |closed form - quadrature| = {worst:.3e}");
}
