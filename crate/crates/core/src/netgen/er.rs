use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `G(n, m)`: exactly `m_edges` edges drawn uniformly without replacement
/// from all `n(n-1)/2` node pairs.
pub fn gen_er<R: Rng + ?Sized>(n: usize, m_edges: usize, rng: &mut R) -> Result<Graph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m_edges > pairs {
        return Err(Error::usage(format!(
            "{m_edges} edges requested but only {pairs} pairs exist on {n} nodes"
        )));
    }
    let edges = index::sample(rng, pairs, m_edges).into_iter().map(unrank_pair);
    Graph::from_edges(n, edges)
}

// Pairs ranked by larger endpoint: rank p <-> (i, j), i < j, p = j(j-1)/2 + i.
fn unrank_pair(p: usize) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * p as f64).sqrt()) / 2.0) as usize;
    while j * (j - 1) / 2 > p {
        j -= 1;
    }
    while (j + 1) * j / 2 <= p {
        j += 1;
    }
    (p - j * (j - 1) / 2, j)
}
