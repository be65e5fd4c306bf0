//! Benchmark graphs with planted communities.
//!
//! Construction:
//! 1. equal community sizes (remainder spread one per community);
//! 2. power-law degrees with exponent `t1` on `[x_min, max_k]`, `x_min`
//!    solved so the expected degree equals the target, resampled until the
//!    realized mean is within 3%;
//! 3. each degree split into internal and external stubs with expected
//!    external fraction `mu`;
//! 4. configuration-model pairing inside communities and across them, with
//!    edge-swap rewiring of self-loops, multi-edges and external pairs that
//!    land inside one community.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

const DEGREE_MEAN_REL_TOL: f64 = 0.03;
const DEGREE_RESAMPLES: usize = 1000;
const REWIRING_SWEEPS: usize = 100;
const SWAP_TRIES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LfrParams {
    pub n_communities: usize,
    /// Degree exponent.
    pub t1: f64,
    /// Community-size exponent; only `0` (equal sizes) is supported.
    pub t2: f64,
    /// Mixing parameter: expected fraction of each node's edges leaving its
    /// community.
    pub mu: f64,
    /// Maximum degree; `None` selects `min(30 * target_k, n / 10)`.
    pub max_k: Option<usize>,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n_communities: 5,
            t1: 3.0,
            t2: 0.0,
            mu: 0.20,
            max_k: None,
        }
    }
}

impl LfrParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_communities == 0 {
            return Err(Error::usage("LFR needs at least one community"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::usage(format!("LFR mu {} outside [0, 1]", self.mu)));
        }
        if self.t2 != 0.0 {
            return Err(Error::usage("only t2 = 0 (equal community sizes) is supported"));
        }
        if !(self.t1 > 1.0) {
            return Err(Error::usage("LFR degree exponent t1 must exceed 1"));
        }
        Ok(())
    }

    pub fn resolved_max_k(&self, n: usize, target_k: f64) -> usize {
        self.max_k.unwrap_or_else(|| ((30.0 * target_k) as usize).min(n / 10))
    }
}

/// Truncated continuous power law on `[lo, hi]` with density `∝ x^-t`.
#[derive(Debug, Clone, Copy)]
struct PowerLaw {
    lo: f64,
    hi: f64,
    t: f64,
}

impl PowerLaw {
    fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        let e = 1.0 - self.t;
        (x.powf(e) - self.lo.powf(e)) / (self.hi.powf(e) - self.lo.powf(e))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e = 1.0 - self.t;
        let u: f64 = rng.random();
        let (a, b) = (self.lo.powf(e), self.hi.powf(e));
        (a + u * (b - a)).powf(1.0 / e)
    }

    /// Mean of `round(X)`.
    fn rounded_mean(&self) -> f64 {
        let first = self.lo.round() as usize;
        let last = self.hi.round() as usize;
        (first..=last)
            .map(|j| {
                let j = j as f64;
                j * (self.cdf(j + 0.5) - self.cdf(j - 0.5))
            })
            .sum()
    }
}

fn degree_law(target_k: f64, max_k: usize, t1: f64) -> Result<PowerLaw> {
    let hi = max_k as f64;
    let law = |lo: f64| PowerLaw { lo, hi, t: t1 };
    let mut lo_x = 1.0;
    let mut hi_x = hi;
    if law(lo_x).rounded_mean() > target_k || target_k > hi {
        return Err(Error::usage(format!(
            "LFR average degree {target_k} unreachable with max_k={max_k}, t1={t1}"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo_x + hi_x);
        if law(mid).rounded_mean() < target_k {
            lo_x = mid;
        } else {
            hi_x = mid;
        }
    }
    Ok(law(0.5 * (lo_x + hi_x)))
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Pairs stubs uniformly at random, then repairs invalid pairs (self-loops,
/// edges already in `present`, pairs rejected by `allowed`) by swapping
/// endpoints with random accepted edges of the same matching.
fn pair_stubs<R, F>(
    mut stubs: Vec<usize>,
    allowed: F,
    present: &mut HashSet<(usize, usize)>,
    out: &mut Vec<(usize, usize)>,
    rng: &mut R,
) -> Result<()>
where
    R: Rng + ?Sized,
    F: Fn(usize, usize) -> bool,
{
    debug_assert!(stubs.len().is_multiple_of(2));
    stubs.shuffle(rng);
    let mut accepted: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut pending = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && allowed(u, v) && present.insert(key(u, v)) {
            accepted.push(key(u, v));
        } else {
            pending.push((u, v));
        }
    }
    for _ in 0..REWIRING_SWEEPS {
        if pending.is_empty() {
            break;
        }
        let mut still = Vec::new();
        for (u, v) in pending {
            let mut fixed = false;
            for _ in 0..SWAP_TRIES {
                if accepted.is_empty() {
                    break;
                }
                let idx = rng.random_range(0..accepted.len());
                let (mut x, mut y) = accepted[idx];
                if rng.random::<bool>() {
                    std::mem::swap(&mut x, &mut y);
                }
                // (u,v) + (x,y) -> (u,x) + (v,y); degrees are preserved.
                let (e1, e2) = (key(u, x), key(v, y));
                if u == x || v == y || e1 == e2 || !allowed(u, x) || !allowed(v, y) {
                    continue;
                }
                if present.contains(&e1) || present.contains(&e2) {
                    continue;
                }
                present.remove(&key(x, y));
                present.insert(e1);
                present.insert(e2);
                accepted[idx] = e1;
                accepted.push(e2);
                fixed = true;
                break;
            }
            if !fixed {
                still.push((u, v));
            }
        }
        pending = still;
    }
    if !pending.is_empty() {
        return Err(Error::Generation(format!(
            "LFR rewiring left {} invalid pairs after {REWIRING_SWEEPS} sweeps",
            pending.len()
        )));
    }
    out.extend(accepted);
    Ok(())
}

pub fn gen_lfr<R: Rng + ?Sized>(n: usize, target_k: f64, params: &LfrParams, rng: &mut R) -> Result<Graph> {
    params.validate()?;
    let nc = params.n_communities;
    if nc > n {
        return Err(Error::usage("more communities than nodes"));
    }
    let base = n / nc;
    let rem = n % nc;
    let mut community = Vec::with_capacity(n);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (c, group) in members.iter_mut().enumerate() {
        let size = base + usize::from(c < rem);
        for _ in 0..size {
            group.push(community.len());
            community.push(c);
        }
    }
    let max_k = params.resolved_max_k(n, target_k);
    if (max_k as f64) < target_k {
        return Err(Error::usage(format!(
            "LFR max_k {max_k} below target degree {target_k}"
        )));
    }
    if max_k >= base {
        return Err(Error::usage(format!(
            "LFR max_k {max_k} does not fit in communities of {base} nodes"
        )));
    }

    let law = degree_law(target_k, max_k, params.t1)?;
    let mut degree = Vec::new();
    for attempt in 0.. {
        if attempt == DEGREE_RESAMPLES {
            return Err(Error::Generation(format!(
                "no degree sequence within {}% of {target_k} after {DEGREE_RESAMPLES} draws",
                DEGREE_MEAN_REL_TOL * 100.0
            )));
        }
        degree = (0..n)
            .map(|_| (law.sample(rng).round() as usize).clamp(1, max_k))
            .collect();
        let mean = degree.iter().sum::<usize>() as f64 / n as f64;
        if (mean - target_k).abs() <= DEGREE_MEAN_REL_TOL * target_k {
            break;
        }
    }

    // Stochastic rounding keeps the expected external fraction at mu.
    let mut internal: Vec<usize> = degree
        .iter()
        .map(|&k| {
            let x = (1.0 - params.mu) * k as f64;
            let whole = x.floor();
            let extra = rng.random::<f64>() < x - whole;
            whole as usize + usize::from(extra)
        })
        .collect();
    let mut external: Vec<usize> = degree.iter().zip(&internal).map(|(k, i)| k - i).collect();

    // Even internal stub count per community, even external total.
    for group in &members {
        if group.iter().map(|&v| internal[v]).sum::<usize>() % 2 == 1 {
            let mut order = group.clone();
            order.shuffle(rng);
            if let Some(&v) = order.iter().find(|&&v| internal[v] + external[v] < max_k) {
                internal[v] += 1;
            } else if let Some(&v) = order.iter().find(|&&v| internal[v] > 0) {
                internal[v] -= 1;
            }
        }
    }
    if external.iter().sum::<usize>() % 2 == 1 {
        let candidates: Vec<usize> = (0..n).filter(|&v| external[v] > 0).collect();
        let v = candidates[rng.random_range(0..candidates.len())];
        external[v] -= 1;
    }

    let mut present = HashSet::new();
    let mut edges = Vec::new();
    for group in &members {
        let stubs: Vec<usize> = group
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, internal[v]))
            .collect();
        pair_stubs(stubs, |_, _| true, &mut present, &mut edges, rng)?;
    }
    let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, external[v])).collect();
    pair_stubs(
        stubs,
        |u, v| community[u] != community[v],
        &mut present,
        &mut edges,
        rng,
    )?;

    Graph::from_edges(n, edges)?.with_communities(community)
}

/// Fraction of edges whose endpoints carry different community labels.
pub fn lfr_mixing(g: &Graph) -> Option<f64> {
    let c = g.communities()?;
    if g.edge_count() == 0 {
        return Some(0.0);
    }
    let cross = g.edges().iter().filter(|&&(u, v)| c[u] != c[v]).count();
    Some(cross as f64 / g.edge_count() as f64)
}
