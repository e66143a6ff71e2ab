//! Derived channel quantities across the absorption/amplification boundary.

use homodyne_ml::{derive_channel, gains_from_atoms, invert_channel, total_variance_param, Gains};

fn main() {
    let t = 1.0;
    let eta = 0.6;
    println!(
        "{:>4} {:>4} | {:>6} {:>9} {:>9} {:>9} {:>9}",
        "G1", "G2", "Q", "g", "delta^2", "s^2", "gain"
    );
    for g2 in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let gains = Gains::new(3.0, g2).unwrap();
        let ch = derive_channel(gains, t);
        let s_sq = total_variance_param(&ch, eta).unwrap();
        println!(
            "{:>4} {:>4} | {:>6} {:>9.6} {:>9.6} {:>9.6} {:>9.4}",
            3.0, g2, ch.q, ch.g, ch.delta_sq, s_sq, ch.gain_factor
        );
        let back = invert_channel(ch.g, s_sq, t, eta).unwrap().gains;
        assert!((back.g1() - 3.0).abs() < 1e-10 && (back.g2() - g2).abs() < 1e-10);
    }

    // gains from a two-level atomic medium: G = γ N
    let gains = gains_from_atoms(0.5, 6.0, 2.0).unwrap();
    println!(
        "gamma=0.5, N1=6, N2=2 -> G1={}, G2={}",
        gains.g1(),
        gains.g2()
    );
}
