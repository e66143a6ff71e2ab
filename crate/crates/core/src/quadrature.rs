//! Composite Gauss–Legendre quadrature with panel doubling.

use std::f64::consts::PI;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over [a, b] split into `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + half * x);
            }
            total += s * half;
        }
        total
    }
}

/// P_n(x) and P_n'(x).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of a refined integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Change between the last two refinement levels.
    pub error: f64,
    pub panels: usize,
}

/// Integrates with `rule` on one panel, then doubles the panel count until two
/// successive values differ by less than `tol` or `max_levels` doublings have
/// been spent.
pub fn integrate_refined<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_levels: usize,
) -> Estimate {
    let mut panels = 1;
    let mut prev = rule.integrate(&mut f, a, b, panels);
    let mut error = f64::INFINITY;
    for _ in 0..max_levels {
        panels *= 2;
        let next = rule.integrate(&mut f, a, b, panels);
        error = (next - prev).abs();
        prev = next;
        if error < tol {
            break;
        }
    }
    Estimate {
        value: prev,
        error,
        panels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 20, 201] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        // ∫_0^2 x^9 dx = 2^10 / 10
        let v = rule.integrate(|x| x.powi(9), 0.0, 2.0, 1);
        assert!((v - 102.4).abs() < 1e-11);
    }

    #[test]
    fn nodes_symmetric_and_sorted() {
        let rule = GaussLegendre::new(201);
        assert_eq!(rule.len(), 201);
        assert!(rule.nodes[100].abs() < 1e-15);
        for i in 0..200 {
            assert!(rule.nodes[i] < rule.nodes[i + 1]);
            assert!((rule.nodes[i] + rule.nodes[200 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_mass() {
        let rule = GaussLegendre::new(201);
        let est = integrate_refined(
            &rule,
            |x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt(),
            -8.0,
            8.0,
            1e-12,
            4,
        );
        assert!((est.value - 1.0).abs() < 1e-14);
        assert!(est.error < 1e-12);
    }
}
