use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Upper end of the normalization search. With `a <= 1` every link
/// probability `a * exp(-d / beta)` is already a valid probability.
pub const WAXMAN_A_MAX: f64 = 1.0;

const CALIBRATION_REL_TOL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

fn uniform_coords<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

#[inline]
fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

// Σ_{i<j} exp(-d_ij / beta).
fn kernel_sum(coords: &[[f64; 2]], beta: f64) -> f64 {
    let mut total = 0.0;
    for (i, &p) in coords.iter().enumerate() {
        let mut row = 0.0;
        for &q in &coords[i + 1..] {
            row += (-dist(p, q) / beta).exp();
        }
        total += row;
    }
    total
}

/// Expected edge count `Σ_{i<j} min(1, a exp(-d_ij / beta))`.
pub fn waxman_expected_edges(coords: &[[f64; 2]], a: f64, beta: f64) -> f64 {
    if a <= 1.0 {
        // Kernel values never exceed 1, so the clamp is inactive.
        return a * kernel_sum(coords, beta);
    }
    let mut total = 0.0;
    for (i, &p) in coords.iter().enumerate() {
        for &q in &coords[i + 1..] {
            total += (a * (-dist(p, q) / beta).exp()).min(1.0);
        }
    }
    total
}

/// Bisection for the normalization `a` on fixed coordinates so that the
/// expected edge count equals `n * target_k / 2`.
pub fn calibrate_waxman_on(coords: &[[f64; 2]], target_k: f64, beta: f64) -> Result<f64> {
    if coords.len() < 2 || !(beta > 0.0) {
        return Err(Error::usage("Waxman calibration needs n >= 2 and beta > 0"));
    }
    let target = coords.len() as f64 * target_k / 2.0;
    let s = kernel_sum(coords, beta);
    // a <= A_MAX = 1, so the expectation is linear in a.
    let expected = |a: f64| a * s;
    let tol = CALIBRATION_REL_TOL * target;
    let mut hi = WAXMAN_A_MAX;
    let at_max = expected(hi);
    if at_max < target - tol {
        return Err(Error::Generation(format!(
            "Waxman target degree {target_k} unreachable with beta={beta} \
             (expected degree {:.3} at a={WAXMAN_A_MAX}); increase beta",
            2.0 * at_max / coords.len() as f64
        )));
    }
    if (at_max - target).abs() <= tol {
        return Ok(hi);
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let e = expected(mid);
        if (e - target).abs() <= tol && target > 0.0 {
            return Ok(mid);
        }
        if e < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Samples fresh uniform coordinates and calibrates `a` on them.
pub fn calibrate_waxman<R: Rng + ?Sized>(n: usize, target_k: f64, beta: f64, rng: &mut R) -> Result<f64> {
    let coords = uniform_coords(n, rng);
    calibrate_waxman_on(&coords, target_k, beta)
}

/// Waxman geometric graph on the unit square: nodes placed uniformly, each
/// pair linked independently with probability `min(1, a exp(-d / beta))`,
/// `a` calibrated on the drawn coordinates.
pub fn gen_waxman<R: Rng + ?Sized>(n: usize, target_k: f64, beta: f64, rng: &mut R) -> Result<Graph> {
    if n < 2 {
        return Err(Error::usage("Waxman needs at least 2 nodes"));
    }
    let coords = uniform_coords(n, rng);
    let a = calibrate_waxman_on(&coords, target_k, beta)?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = (a * (-dist(coords[i], coords[j]) / beta).exp()).min(1.0);
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)?.with_coords(coords)
}
