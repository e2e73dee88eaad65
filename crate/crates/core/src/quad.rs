//! Gauss-Legendre quadrature with adaptive node doubling.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence and cached per n.
fn rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n).or_insert_with(|| {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev initial guess for the i-th root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                // Evaluate P_n(x) and its derivative via the recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let dp = {
                        let mut p0 = 1.0;
                        let mut p1 = x;
                        for k in 2..=n {
                            let kf = k as f64;
                            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                            p0 = p1;
                            p1 = p2;
                        }
                        n as f64 * (x * p1 - p0) / (x * x - 1.0)
                    };
                    nodes[i] = -x;
                    nodes[n - 1 - i] = x;
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    weights[i] = w;
                    weights[n - 1 - i] = w;
                    break;
                }
            }
        }
        Box::leak(Box::new((nodes, weights)))
    })
}

/// Integrate `f` over [a, b] with the fixed n-point rule.
pub fn fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = rule(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate `f` over [a, b], doubling the node count from 64 until two
/// successive estimates agree to `rel_tol` relative.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut n = 64;
    let mut prev = fixed(&mut f, a, b, n);
    for _ in 0..5 {
        n *= 2;
        let cur = fixed(&mut f, a, b, n);
        let scale = cur.abs().max(1e-300);
        if (cur - prev).abs() <= rel_tol * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    let cur = fixed(&mut f, a, b, 2 * n);
    let achieved = (cur - prev).abs() / cur.abs().max(1e-300);
    if achieved <= rel_tol {
        Ok(cur)
    } else {
        Err(Error::QuadratureNoConvergence {
            achieved,
            requested: rel_tol,
        })
    }
}
