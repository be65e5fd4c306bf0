//! PCA over per-configuration feature vectors.
//!
//! Features are centered but not rescaled; components come from a Jacobi
//! eigen-decomposition of the sample covariance.

mod jacobi;

pub use jacobi::{symmetric_eigen, SymmetricEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};

use crate::coverage::DEFAULT_WINDOW;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub mean_vector: Vec<f64>,
    /// Unit loading vectors in descending eigenvalue order. Each is oriented
    /// so its loadings sum to a non-negative value.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// `(pc1, pc2)` for each fitted row, in input order.
    pub projections: Vec<[f64; 2]>,
    /// Set when the input carries no variance; ratios are then all zero.
    pub degenerate: bool,
    /// Steps between consecutive features, used to label axis profiles.
    pub window: usize,
}

impl PcaResult {
    pub fn dim(&self) -> usize {
        self.mean_vector.len()
    }

    /// Coordinates of `vector` on every component.
    pub fn scores(&self, vector: &[f64]) -> Result<Vec<f64>> {
        if vector.len() != self.dim() {
            return Err(Error::usage(format!(
                "vector of length {} does not match PCA dimension {}",
                vector.len(),
                self.dim()
            )));
        }
        let centered: Vec<f64> = vector.iter().zip(&self.mean_vector).map(|(x, m)| x - m).collect();
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn cumulative_ratio(&self) -> Vec<f64> {
        self.explained_variance_ratio
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            })
            .collect()
    }
}

/// Fits PCA to `rows` (one configuration per row).
pub fn pca_fit(rows: &[Vec<f64>]) -> Result<PcaResult> {
    if rows.len() < 2 {
        return Err(Error::usage(format!("PCA needs at least 2 rows, got {}", rows.len())));
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::usage("PCA rows are empty"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(Error::usage(format!("row {i} has {} columns, expected {d}", r.len())));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::usage(format!("row {i} holds a non-finite value")));
        }
    }
    let m = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        for (acc, x) in mean.iter_mut().zip(r) {
            *acc += x;
        }
    }
    for x in &mut mean {
        *x /= m;
    }
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, mu)| x - mu).collect())
        .collect();
    let mut cov = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let s: f64 = centered.iter().map(|r| r[i] * r[j]).sum::<f64>() / (m - 1.0);
            cov[i * d + j] = s;
            cov[j * d + i] = s;
        }
    }
    let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();

    let eig = symmetric_eigen(&cov, d)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]).then(a.cmp(&b)));
    let mut components = Vec::with_capacity(d);
    let mut eigenvalues = Vec::with_capacity(d);
    for &k in &order {
        let mut c: Vec<f64> = (0..d).map(|i| eig.vectors[i * d + k]).collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if c.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for x in &mut c {
            *x *= sign / norm;
        }
        components.push(c);
        eigenvalues.push(eig.values[k]);
    }
    let degenerate = !(trace > 0.0);
    let explained_variance_ratio = if degenerate {
        vec![0.0; d]
    } else {
        eigenvalues.iter().map(|&l| (l / trace).clamp(0.0, 1.0)).collect()
    };
    let mut result = PcaResult {
        mean_vector: mean,
        components,
        eigenvalues,
        explained_variance_ratio,
        projections: Vec::new(),
        degenerate,
        window: DEFAULT_WINDOW,
    };
    result.projections = rows
        .iter()
        .map(|r| project(&result, r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|(a, b)| [a, b])
        .collect();
    Ok(result)
}

/// Coordinates of `vector` on the first two components.
pub fn project(result: &PcaResult, vector: &[f64]) -> Result<(f64, f64)> {
    if vector.len() != result.dim() {
        return Err(Error::usage(format!(
            "vector of length {} does not match PCA dimension {}",
            vector.len(),
            result.dim()
        )));
    }
    let dot = |k: usize| -> f64 {
        result.components.get(k).map_or(0.0, |c| {
            c.iter()
                .zip(vector.iter().zip(&result.mean_vector))
                .map(|(w, (x, m))| w * (x - m))
                .sum()
        })
    };
    Ok((dot(0), dot(1)))
}

/// Loadings of component `axis` (1-based) keyed by epoch: feature `j`
/// covers the window ending at step `window * (j + 1)`.
pub fn axis_profile(result: &PcaResult, axis: usize) -> Result<Vec<(usize, f64)>> {
    if axis == 0 || axis > result.components.len() {
        return Err(Error::usage(format!(
            "axis {axis} out of range 1..={}",
            result.components.len()
        )));
    }
    Ok(result.components[axis - 1]
        .iter()
        .enumerate()
        .map(|(j, &w)| (result.window * (j + 1), w))
        .collect())
}

/// Scales a curve so its maximum becomes 1.
pub fn normalize_curve(curve: &[f64]) -> Result<Vec<f64>> {
    let max = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::usage("cannot normalize a curve whose maximum is not positive"));
    }
    Ok(curve.iter().map(|x| x / max).collect())
}
