//! Nelder–Mead minimization on a small fixed dimension.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    /// Stop when the spread of objective values across the simplex is below this.
    pub f_tol: f64,
    /// ...and every vertex lies within this distance (per coordinate) of the best.
    pub x_tol: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub f: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Minimizes `f` from the simplex spanned by `start` and `start + step_i e_i`.
///
/// The first vertex is `start` itself, so the returned value never exceeds
/// `f(start)`.
pub(crate) fn minimize<const N: usize, F>(
    mut f: F,
    start: [f64; N],
    steps: [f64; N],
    opts: SimplexOptions,
) -> SimplexResult<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    // N + 1 vertices; const generics cannot express N + 1 yet
    let mut verts: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    verts.push(start);
    for i in 0..N {
        let mut v = start;
        v[i] += steps[i];
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(|v| sanitize(f(v))).collect();

    let mut iters = 0;
    let mut converged = false;
    while iters < opts.max_iters {
        order(&mut verts, &mut vals);
        if spread_ok(&verts, &vals, &opts) {
            converged = true;
            break;
        }
        iters += 1;

        let worst = N;
        let mut centroid = [0.0; N];
        for v in &verts[..N] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / N as f64;
            }
        }
        let toward = |coef: f64| -> [f64; N] {
            let mut p = centroid;
            for (i, pi) in p.iter_mut().enumerate() {
                *pi += coef * (centroid[i] - verts[worst][i]);
            }
            p
        };

        let xr = toward(REFLECT);
        let fr = sanitize(f(&xr));
        if fr < vals[0] {
            let xe = toward(EXPAND);
            let fe = sanitize(f(&xe));
            if fe < fr {
                verts[worst] = xe;
                vals[worst] = fe;
            } else {
                verts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            verts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst vertex
        let (xc, fc) = if fr < vals[worst] {
            let xc = toward(CONTRACT * REFLECT);
            let fc = sanitize(f(&xc));
            (xc, fc)
        } else {
            let xc = toward(-CONTRACT);
            let fc = sanitize(f(&xc));
            (xc, fc)
        };
        if fc < vals[worst].min(fr) {
            verts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        let best = verts[0];
        for k in 1..=N {
            for i in 0..N {
                verts[k][i] = best[i] + SHRINK * (verts[k][i] - best[i]);
            }
            vals[k] = sanitize(f(&verts[k]));
        }
    }
    order(&mut verts, &mut vals);
    SimplexResult {
        x: verts[0],
        f: vals[0],
        iters,
        converged,
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Stable sort by objective value; ties keep their previous order.
fn order<const N: usize>(verts: &mut Vec<[f64; N]>, vals: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..verts.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    *verts = idx.iter().map(|&i| verts[i]).collect();
    *vals = idx.iter().map(|&i| vals[i]).collect();
}

fn spread_ok<const N: usize>(verts: &[[f64; N]], vals: &[f64], opts: &SimplexOptions) -> bool {
    let f_spread = vals[vals.len() - 1] - vals[0];
    if !(f_spread <= opts.f_tol) {
        return false;
    }
    verts[1..].iter().all(|v| {
        v.iter()
            .zip(&verts[0])
            .all(|(a, b)| (a - b).abs() <= opts.x_tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: SimplexOptions = SimplexOptions {
        f_tol: 1e-14,
        x_tol: 1e-9,
        max_iters: 5000,
    };

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            [-1.2, 1.0],
            [0.1, 0.1],
            OPTS,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64; 2]| (x[0] - 3.0).powi(2) + 5.0 * (x[1] + 1.0).powi(2);
        let r = minimize(
            f,
            [0.5, 0.5],
            [0.2, 0.2],
            SimplexOptions {
                max_iters: 3,
                ..OPTS
            },
        );
        assert!(r.f <= f(&[0.5, 0.5]));
        assert!(!r.converged);
        assert_eq!(r.iters, 3);
    }

    #[test]
    fn nan_regions_are_avoided() {
        let r = minimize(
            |x: &[f64; 1]| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    (x[0] - 0.5).powi(2)
                }
            },
            [2.0],
            [-1.0],
            OPTS,
        );
        assert!((r.x[0] - 0.5).abs() < 1e-6);
    }
}
