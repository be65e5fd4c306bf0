//! Local stochastic walk dynamics driven by one stepping engine.
//!
//! All four dynamics pick the next node by inverse-CDF sampling over the
//! current node's sorted neighbor list, consuming exactly one uniform draw
//! per step.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default edge-memory decay for the true self-avoiding walk.
pub const DEFAULT_LAMBDA: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynamicsKind {
    /// Uniform over neighbors.
    Rw,
    /// Proportional to neighbor degree.
    Rwd,
    /// Proportional to inverse neighbor degree.
    Rwid,
    /// True self-avoiding walk: proportional to `exp(-lambda * f)` where `f`
    /// counts prior traversals of the incident edge.
    Tsaw,
}

impl DynamicsKind {
    pub const ALL: [DynamicsKind; 4] = [
        DynamicsKind::Rw,
        DynamicsKind::Rwd,
        DynamicsKind::Rwid,
        DynamicsKind::Tsaw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DynamicsKind::Rw => "RW",
            DynamicsKind::Rwd => "RWD",
            DynamicsKind::Rwid => "RWID",
            DynamicsKind::Tsaw => "TSAW",
        }
    }

    pub fn is_memoryless(self) -> bool {
        self != DynamicsKind::Tsaw
    }
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DynamicsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RW" => Ok(DynamicsKind::Rw),
            "RWD" => Ok(DynamicsKind::Rwd),
            "RWID" => Ok(DynamicsKind::Rwid),
            "TSAW" => Ok(DynamicsKind::Tsaw),
            other => Err(Error::usage(format!("unknown dynamics {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkDynamics {
    kind: DynamicsKind,
    lambda: f64,
}

impl WalkDynamics {
    pub fn rw() -> Self {
        Self::new(DynamicsKind::Rw)
    }

    pub fn rwd() -> Self {
        Self::new(DynamicsKind::Rwd)
    }

    pub fn rwid() -> Self {
        Self::new(DynamicsKind::Rwid)
    }

    /// TSAW with the default `lambda = ln 2`.
    pub fn tsaw() -> Self {
        Self::new(DynamicsKind::Tsaw)
    }

    pub fn tsaw_with_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::usage(format!("TSAW lambda must be positive, got {lambda}")));
        }
        Ok(WalkDynamics {
            kind: DynamicsKind::Tsaw,
            lambda,
        })
    }

    pub fn new(kind: DynamicsKind) -> Self {
        WalkDynamics {
            kind,
            lambda: DEFAULT_LAMBDA,
        }
    }

    pub fn kind(&self) -> DynamicsKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    // Unnormalized weight of moving to `neighbor` across edge `edge_id`.
    #[inline]
    fn weight(&self, g: &Graph, state: &WalkState, neighbor: usize, edge_id: usize) -> f64 {
        match self.kind {
            DynamicsKind::Rw => 1.0,
            DynamicsKind::Rwd => g.neighbors(neighbor).len() as f64,
            DynamicsKind::Rwid => 1.0 / g.neighbors(neighbor).len() as f64,
            DynamicsKind::Tsaw => {
                let f = state.edge_visits.get(edge_id).copied().unwrap_or(0);
                (-self.lambda * f as f64).exp()
            }
        }
    }
}

/// Position, step counter and (for TSAW) per-edge traversal counts.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    current: usize,
    step: usize,
    /// Dense per-edge counters indexed by edge id; allocated on the first
    /// TSAW step and empty otherwise.
    edge_visits: Vec<u32>,
}

impl WalkState {
    pub fn new(g: &Graph, start: usize) -> Result<Self> {
        if start >= g.node_count() {
            return Err(Error::usage(format!(
                "start node {start} out of range for {} nodes",
                g.node_count()
            )));
        }
        Ok(WalkState {
            current: start,
            step: 0,
            edge_visits: Vec::new(),
        })
    }

    /// Builds a state with explicit edge counters, mainly for inspecting the
    /// TSAW distribution at a chosen memory configuration.
    pub fn with_edge_visits(g: &Graph, start: usize, visits: &[(usize, usize, u32)]) -> Result<Self> {
        let mut state = Self::new(g, start)?;
        state.edge_visits = vec![0; g.edge_count()];
        for &(u, v, count) in visits {
            let id = g
                .edge_id(u, v)
                .ok_or_else(|| Error::usage(format!("({u}, {v}) is not an edge")))?;
            state.edge_visits[id] = count;
            state.step += count as usize;
        }
        Ok(state)
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Traversal count of the undirected edge `{u, v}` (zero when unvisited
    /// or not an edge).
    pub fn edge_visits(&self, g: &Graph, u: usize, v: usize) -> u32 {
        g.edge_id(u, v)
            .and_then(|id| self.edge_visits.get(id).copied())
            .unwrap_or(0)
    }

    pub fn total_edge_visits(&self) -> u64 {
        self.edge_visits.iter().map(|&c| c as u64).sum()
    }
}

/// Node indices visited by one walk, start included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitSequence {
    pub nodes: Vec<usize>,
}

impl VisitSequence {
    pub fn steps(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// One node index per line, LF-terminated.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for n in &self.nodes {
            writeln!(out, "{n}")?;
        }
        Ok(())
    }
}

/// Normalized transition probabilities aligned with `g.neighbors(current)`.
pub fn transition_distribution(g: &Graph, state: &WalkState, dynamics: &WalkDynamics) -> Result<Vec<f64>> {
    let i = state.current;
    let nbrs = g.neighbors(i);
    if nbrs.is_empty() {
        return Err(Error::DeadEnd(i));
    }
    let mut weights: Vec<f64> = nbrs
        .iter()
        .zip(g.neighbor_edge_ids(i))
        .map(|(&j, &e)| dynamics.weight(g, state, j, e))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Advances the walk by one edge traversal.
pub fn step<R: Rng + ?Sized>(g: &Graph, state: &mut WalkState, dynamics: &WalkDynamics, rng: &mut R) -> Result<()> {
    let i = state.current;
    let nbrs = g.neighbors(i);
    let ids = g.neighbor_edge_ids(i);
    if nbrs.is_empty() {
        return Err(Error::DeadEnd(i));
    }
    let u: f64 = rng.random();
    let pos = if dynamics.kind == DynamicsKind::Rw {
        // Inverse CDF over equal masses.
        ((u * nbrs.len() as f64) as usize).min(nbrs.len() - 1)
    } else {
        let total: f64 = nbrs
            .iter()
            .zip(ids)
            .map(|(&j, &e)| dynamics.weight(g, state, j, e))
            .sum();
        let target = u * total;
        let mut acc = 0.0;
        let mut chosen = nbrs.len() - 1;
        for (k, (&j, &e)) in nbrs.iter().zip(ids).enumerate() {
            acc += dynamics.weight(g, state, j, e);
            if target < acc {
                chosen = k;
                break;
            }
        }
        chosen
    };
    if dynamics.kind == DynamicsKind::Tsaw {
        if state.edge_visits.is_empty() {
            state.edge_visits = vec![0; g.edge_count()];
        }
        state.edge_visits[ids[pos]] += 1;
    }
    state.current = nbrs[pos];
    state.step += 1;
    Ok(())
}

/// Runs `n_steps` steps from `start`; the result has `n_steps + 1` entries.
pub fn run_walk<R: Rng + ?Sized>(
    g: &Graph,
    dynamics: &WalkDynamics,
    start: usize,
    n_steps: usize,
    rng: &mut R,
) -> Result<VisitSequence> {
    let mut state = WalkState::new(g, start)?;
    let mut nodes = Vec::with_capacity(n_steps + 1);
    nodes.push(start);
    for _ in 0..n_steps {
        step(g, &mut state, dynamics, rng)?;
        nodes.push(state.current);
    }
    Ok(VisitSequence { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{complete, path};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    // Node 0 joined to nodes 1, 2, 3 whose degrees are 2, 4, 6.
    fn degree_fan() -> Graph {
        let mut edges = vec![(0, 1), (0, 2), (0, 3)];
        let mut next = 4;
        for (hub, extra) in [(1, 1), (2, 3), (3, 5)] {
            for _ in 0..extra {
                edges.push((hub, next));
                next += 1;
            }
        }
        Graph::from_edges(next, edges).unwrap()
    }

    #[test]
    fn rw_is_uniform() {
        let g = complete(4);
        let s = WalkState::new(&g, 0).unwrap();
        let p = transition_distribution(&g, &s, &WalkDynamics::rw()).unwrap();
        assert_close(&p, &[1.0 / 3.0; 3], 1e-15);
    }

    #[test]
    fn rwd_proportional_to_degree() {
        let g = degree_fan();
        let s = WalkState::new(&g, 0).unwrap();
        let p = transition_distribution(&g, &s, &WalkDynamics::rwd()).unwrap();
        assert_close(&p, &[1.0 / 6.0, 1.0 / 3.0, 0.5], 1e-15);
    }

    #[test]
    fn rwid_proportional_to_inverse_degree() {
        // 0 - 1 (degree 2), 0 - 2 (degree 4)
        let g = Graph::from_edges(6, [(0, 1), (1, 3), (0, 2), (2, 4), (2, 5), (2, 3)]).unwrap();
        let s = WalkState::new(&g, 0).unwrap();
        let p = transition_distribution(&g, &s, &WalkDynamics::rwid()).unwrap();
        assert_close(&p, &[2.0 / 3.0, 1.0 / 3.0], 1e-15);
    }

    #[test]
    fn tsaw_halves_weight_per_visit() {
        let g = path(3);
        let s = WalkState::with_edge_visits(&g, 1, &[(1, 2, 1)]).unwrap();
        let p = transition_distribution(&g, &s, &WalkDynamics::tsaw()).unwrap();
        assert_close(&p, &[2.0 / 3.0, 1.0 / 3.0], 1e-15);
    }

    #[test]
    fn dead_end_is_reported() {
        let g = Graph::from_edges(2, []).unwrap();
        let mut s = WalkState::new(&g, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            transition_distribution(&g, &s, &WalkDynamics::rw()),
            Err(Error::DeadEnd(0))
        ));
        assert!(matches!(
            step(&g, &mut s, &WalkDynamics::rw(), &mut rng),
            Err(Error::DeadEnd(0))
        ));
    }

    #[test]
    fn invalid_lambda_rejected() {
        assert!(WalkDynamics::tsaw_with_lambda(0.0).is_err());
        assert!(WalkDynamics::tsaw_with_lambda(-1.0).is_err());
        assert!(WalkDynamics::tsaw_with_lambda(f64::NAN).is_err());
    }

    #[test]
    fn forced_alternation_on_single_edge() {
        let g = path(2);
        for kind in DynamicsKind::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let seq = run_walk(&g, &WalkDynamics::new(kind), 0, 4, &mut rng).unwrap();
            assert_eq!(seq.nodes, vec![0, 1, 0, 1, 0]);
        }
    }

    #[test]
    fn zero_steps_returns_start() {
        let g = complete(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seq = run_walk(&g, &WalkDynamics::tsaw(), 2, 0, &mut rng).unwrap();
        assert_eq!(seq.nodes, vec![2]);
        assert!(run_walk(&g, &WalkDynamics::rw(), 3, 1, &mut rng).is_err());
    }

    #[test]
    fn tsaw_counters_match_traversals_on_triangle() {
        let g = complete(3);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut s = WalkState::new(&g, 0).unwrap();
        let mut trail = vec![0];
        for _ in 0..3 {
            step(&g, &mut s, &WalkDynamics::tsaw(), &mut rng).unwrap();
            trail.push(s.current());
        }
        let mut expected = std::collections::HashMap::new();
        for w in trail.windows(2) {
            *expected.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0u32) += 1;
        }
        for &(u, v) in g.edges() {
            assert_eq!(s.edge_visits(&g, u, v), *expected.get(&(u, v)).unwrap_or(&0));
            assert_eq!(s.edge_visits(&g, v, u), s.edge_visits(&g, u, v));
        }
        assert_eq!(s.total_edge_visits(), 3);
        assert_eq!(s.step(), 3);
    }

    #[test]
    fn rw_on_triangle_is_empirically_uniform() {
        let g = complete(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let mut s = WalkState::new(&g, 0).unwrap();
            step(&g, &mut s, &WalkDynamics::rw(), &mut rng).unwrap();
            counts[s.current()] += 1;
        }
        assert_eq!(counts[0], 0);
        let p = 0.5;
        let se = (n as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - n as f64 * p).abs() < 3.0 * se, "{counts:?}");
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let g = degree_fan();
        for kind in DynamicsKind::ALL {
            let dynamics = WalkDynamics::new(kind);
            let a = run_walk(&g, &dynamics, 0, 200, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
            let b = run_walk(&g, &dynamics, 0, 200, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sequence_export_format() {
        let seq = VisitSequence { nodes: vec![3, 1, 4] };
        let mut buf = Vec::new();
        seq.write_to(&mut buf).unwrap();
        assert_eq!(buf, b"3\n1\n4\n");
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn arb_connected() -> impl Strategy<Value = Graph> {
        (3usize..16).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |extra| {
                let ring = (0..n).map(|i| (i, (i + 1) % n));
                Graph::from_edges_lossy(n, ring.chain(extra)).unwrap().0
            })
        })
    }

    proptest! {
        #[test]
        fn distributions_are_normalized(g in arb_connected(), seed in any::<u64>(), steps in 0usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for kind in DynamicsKind::ALL {
                let dynamics = WalkDynamics::new(kind);
                let mut s = WalkState::new(&g, 0).unwrap();
                for _ in 0..steps {
                    let p = transition_distribution(&g, &s, &dynamics).unwrap();
                    prop_assert!(p.iter().all(|&x| x >= 0.0));
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    step(&g, &mut s, &dynamics, &mut rng).unwrap();
                }
                if kind == DynamicsKind::Tsaw {
                    prop_assert_eq!(s.total_edge_visits(), steps as u64);
                }
            }
        }

        #[test]
        fn regular_graph_collapses_degree_biases(n in 3usize..30, start in 0usize..30) {
            let g = cycle(n);
            let s = WalkState::new(&g, start % n).unwrap();
            let rw = transition_distribution(&g, &s, &WalkDynamics::rw()).unwrap();
            let rwd = transition_distribution(&g, &s, &WalkDynamics::rwd()).unwrap();
            let rwid = transition_distribution(&g, &s, &WalkDynamics::rwid()).unwrap();
            prop_assert_eq!(&rw, &rwd);
            prop_assert_eq!(&rw, &rwid);
        }

        #[test]
        fn tiny_lambda_tsaw_matches_rw(g in arb_connected(), seed in any::<u64>(), steps in 0usize..80) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tsaw = WalkDynamics::tsaw_with_lambda(1e-12).unwrap();
            let mut s = WalkState::new(&g, 0).unwrap();
            for _ in 0..steps {
                step(&g, &mut s, &tsaw, &mut rng).unwrap();
            }
            let p = transition_distribution(&g, &s, &tsaw).unwrap();
            let uniform = 1.0 / p.len() as f64;
            prop_assert!(p.iter().all(|x| (x - uniform).abs() < 1e-9));
        }

        #[test]
        fn consecutive_visits_are_adjacent(g in arb_connected(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for kind in DynamicsKind::ALL {
                let seq = run_walk(&g, &WalkDynamics::new(kind), 1, 50, &mut rng).unwrap();
                prop_assert_eq!(seq.nodes.len(), 51);
                for w in seq.nodes.windows(2) {
                    prop_assert!(g.has_edge(w[0], w[1]));
                }
            }
        }
    }
}
