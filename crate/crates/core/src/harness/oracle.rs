//! Exact expected coverage for memoryless walks on small graphs.
//!
//! The dynamic program runs over (current node, visited set) states and
//! evaluates the transition formulas directly from node degrees, without
//! going through the sampling engine it is meant to check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coverage::learning_curve;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::walks::{run_walk, DynamicsKind, WalkDynamics};

pub const ORACLE_MAX_NODES: usize = 12;
pub const ORACLE_MAX_STEPS: usize = 60;

fn transition_row(g: &Graph, i: usize, kind: DynamicsKind) -> Vec<(usize, f64)> {
    let nbrs = g.neighbors(i);
    let raw: Vec<f64> = nbrs
        .iter()
        .map(|&j| {
            let kj = g.neighbors(j).len() as f64;
            match kind {
                DynamicsKind::Rw => 1.0,
                DynamicsKind::Rwd => kj,
                DynamicsKind::Rwid => 1.0 / kj,
                DynamicsKind::Tsaw => unreachable!(),
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    nbrs.iter().zip(raw).map(|(&j, w)| (j, w / total)).collect()
}

/// Exact first and second moments of coverage at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMoments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

impl CoverageMoments {
    /// Standard error of a mean over `walks` independent walks.
    pub fn standard_error(&self, walks: usize) -> Vec<f64> {
        self.variance
            .iter()
            .map(|v| (v.max(0.0) / walks as f64).sqrt())
            .collect()
    }
}

/// `E[coverage]` at steps `0..=n_steps` for a walk started at `start`.
pub fn oracle_expected_coverage(g: &Graph, dynamics: DynamicsKind, start: usize, n_steps: usize) -> Result<Vec<f64>> {
    Ok(oracle_coverage_moments(g, dynamics, start, n_steps)?.mean)
}

/// Mean and variance of coverage from the same dynamic program.
pub fn oracle_coverage_moments(
    g: &Graph,
    dynamics: DynamicsKind,
    start: usize,
    n_steps: usize,
) -> Result<CoverageMoments> {
    let n = g.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(Error::usage(format!(
            "oracle supports at most {ORACLE_MAX_NODES} nodes, graph has {n}"
        )));
    }
    if n_steps > ORACLE_MAX_STEPS {
        return Err(Error::usage(format!(
            "oracle supports at most {ORACLE_MAX_STEPS} steps"
        )));
    }
    if !dynamics.is_memoryless() {
        return Err(Error::usage("oracle excludes TSAW: its state includes edge counters"));
    }
    if start >= n {
        return Err(Error::usage(format!("start node {start} out of range")));
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| transition_row(g, i, dynamics)).collect();
    let masks = 1usize << n;
    let idx = |node: usize, mask: usize| node * masks + mask;
    let mut prob = vec![0.0f64; n * masks];
    prob[idx(start, 1 << start)] = 1.0;
    let moments = |prob: &[f64]| -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for node in 0..n {
            for mask in 0..masks {
                let p = prob[idx(node, mask)];
                if p != 0.0 {
                    let c = mask.count_ones() as f64 / n as f64;
                    m1 += p * c;
                    m2 += p * c * c;
                }
            }
        }
        (m1, m2 - m1 * m1)
    };
    let mut out = CoverageMoments {
        mean: Vec::with_capacity(n_steps + 1),
        variance: Vec::with_capacity(n_steps + 1),
    };
    let mut record = |prob: &[f64]| {
        let (m, v) = moments(prob);
        out.mean.push(m);
        out.variance.push(v);
    };
    record(&prob);
    for _ in 0..n_steps {
        let mut next = vec![0.0f64; n * masks];
        for node in 0..n {
            for mask in 0..masks {
                let p = prob[idx(node, mask)];
                if p == 0.0 {
                    continue;
                }
                if rows[node].is_empty() {
                    return Err(Error::DeadEnd(node));
                }
                for &(j, w) in &rows[node] {
                    next[idx(j, mask | (1 << j))] += p * w;
                }
            }
        }
        let total: f64 = next.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numeric(format!("oracle probability mass drifted to {total}")));
        }
        prob = next;
        record(&prob);
    }
    Ok(out)
}

/// Monte Carlo estimate of coverage: per-step mean and standard error over
/// `walks` independent walks from `start`.
pub fn monte_carlo_coverage(
    g: &Graph,
    dynamics: &WalkDynamics,
    start: usize,
    n_steps: usize,
    walks: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if walks < 2 {
        return Err(Error::usage("Monte Carlo estimate needs at least 2 walks"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0; n_steps + 1];
    let mut sum_sq = vec![0.0; n_steps + 1];
    for _ in 0..walks {
        let walk_seed: u64 = rng.random();
        let seq = run_walk(g, dynamics, start, n_steps, &mut ChaCha8Rng::seed_from_u64(walk_seed))?;
        let curve = learning_curve(&seq, g.node_count())?;
        for (t, v) in curve.values.iter().enumerate() {
            sum[t] += v;
            sum_sq[t] += v * v;
        }
    }
    let w = walks as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / w).collect();
    let se = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| {
            let var = ((sq - w * m * m) / (w - 1.0)).max(0.0);
            (var / w).sqrt()
        })
        .collect();
    Ok((mean, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, path};

    #[test]
    fn single_edge_is_forced() {
        let g = path(2);
        for kind in [DynamicsKind::Rw, DynamicsKind::Rwd, DynamicsKind::Rwid] {
            let c = oracle_expected_coverage(&g, kind, 0, 5).unwrap();
            assert_eq!(c, vec![0.5, 1.0, 1.0, 1.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn triangle_first_step_always_discovers() {
        let c = oracle_expected_coverage(&complete(3), DynamicsKind::Rw, 0, 2).unwrap();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c[1] - 2.0 / 3.0).abs() < 1e-15);
        // Step 2: third node found with probability 1/2.
        assert!((c[2] - (2.0 / 3.0 + 0.5 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_matches_coupon_collector() {
        // On K_N a uniform walk moves to each other node with prob 1/(N-1);
        // with v nodes seen, a new one is found with prob (N-v)/(N-1).
        let n = 6;
        let steps = 30;
        let c = oracle_expected_coverage(&complete(n), DynamicsKind::Rw, 2, steps).unwrap();
        let mut dist = vec![0.0; n + 1];
        dist[1] = 1.0;
        for value in c.iter().take(steps + 1) {
            let expected: f64 = (1..=n).map(|v| dist[v] * v as f64).sum::<f64>() / n as f64;
            assert!((value - expected).abs() < 1e-12);
            let mut next = vec![0.0; n + 1];
            for v in 1..=n {
                let p_new = (n - v) as f64 / (n - 1) as f64;
                next[v] += dist[v] * (1.0 - p_new);
                if v < n {
                    next[v + 1] += dist[v] * p_new;
                }
            }
            dist = next;
        }
    }

    #[test]
    fn rejects_out_of_scope_inputs() {
        assert!(oracle_expected_coverage(&complete(13), DynamicsKind::Rw, 0, 5).is_err());
        assert!(oracle_expected_coverage(&complete(4), DynamicsKind::Tsaw, 0, 5).is_err());
        assert!(oracle_expected_coverage(&complete(4), DynamicsKind::Rw, 0, 61).is_err());
        assert!(oracle_expected_coverage(&complete(4), DynamicsKind::Rw, 4, 5).is_err());
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        assert!(matches!(
            oracle_expected_coverage(&g, DynamicsKind::Rw, 0, 1),
            Err(Error::DeadEnd(0))
        ));
    }

    #[test]
    fn triangle_variance() {
        let m = oracle_coverage_moments(&complete(3), DynamicsKind::Rw, 0, 2).unwrap();
        assert_eq!(m.variance[0], 0.0);
        assert!(m.variance[1].abs() < 1e-15);
        // coverage is 2/3 or 1 with equal odds
        assert!((m.variance[2] - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_agrees_on_path() {
        let g = path(5);
        let exact = oracle_coverage_moments(&g, DynamicsKind::Rwd, 2, 20).unwrap();
        let se = exact.standard_error(20_000);
        let (mean, _) = monte_carlo_coverage(&g, &WalkDynamics::rwd(), 2, 20, 20_000, 4).unwrap();
        for t in 0..=20 {
            assert!((mean[t] - exact.mean[t]).abs() <= 4.0 * se[t] + 1e-12, "t={t}");
        }
    }

    #[test]
    fn monte_carlo_agrees_on_small_er() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = loop {
            let g = crate::netgen::gen_er(10, 20, &mut rng).unwrap();
            if g.is_connected() {
                break g;
            }
        };
        let exact = oracle_coverage_moments(&g, DynamicsKind::Rw, 0, 40).unwrap();
        let se = exact.standard_error(100_000);
        let (mean, _) = monte_carlo_coverage(&g, &WalkDynamics::rw(), 0, 40, 100_000, 8).unwrap();
        for t in 0..=40 {
            assert!((mean[t] - exact.mean[t]).abs() <= 3.0 * se[t] + 1e-12, "t={t}");
        }
    }
}
