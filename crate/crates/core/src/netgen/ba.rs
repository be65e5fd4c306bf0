use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Barabási–Albert growth from a clique on `m_attach + 1` nodes. Each new
/// node links to `m_attach` distinct existing nodes sampled with probability
/// proportional to their current degree.
pub fn gen_ba<R: Rng + ?Sized>(n: usize, m_attach: usize, rng: &mut R) -> Result<Graph> {
    if m_attach == 0 || m_attach >= n {
        return Err(Error::usage(format!(
            "BA needs 1 <= m_attach < n, got m_attach={m_attach}, n={n}"
        )));
    }
    let seed = m_attach + 1;
    let total = seed * (seed - 1) / 2 + (n - seed) * m_attach;
    let mut edges = Vec::with_capacity(total);
    // Each node appears once per incident edge end.
    let mut ends = Vec::with_capacity(2 * total);
    for i in 0..seed {
        for j in i + 1..seed {
            edges.push((i, j));
            ends.push(i);
            ends.push(j);
        }
    }
    let mut chosen = Vec::with_capacity(m_attach);
    for v in seed..n {
        chosen.clear();
        while chosen.len() < m_attach {
            let t = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ba_edge_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(gen_ba(5, 2, &mut rng).unwrap().edge_count(), 7);
        let k4 = gen_ba(4, 3, &mut rng).unwrap();
        assert_eq!(k4.edge_count(), 6);
        for m in 1..6 {
            let g = gen_ba(300, m, &mut rng).unwrap();
            assert_eq!(g.edge_count(), (m + 1) * m / 2 + (300 - m - 1) * m);
            assert!(g.is_connected());
        }
        assert!(gen_ba(5, 0, &mut rng).is_err());
        assert!(gen_ba(5, 5, &mut rng).is_err());
    }

    #[test]
    fn ba_has_heavy_tail() {
        // Fit of the log-log CCDF slope over degrees in [2m, 10m]; the
        // exponent-3 density gives a CCDF slope near -2.
        let m = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let mut max_deg = 0;
        let mut all = Vec::new();
        for _ in 0..20 {
            let g = gen_ba(5000, m, &mut rng).unwrap();
            max_deg = max_deg.max(g.max_degree());
            all.extend(g.degrees());
        }
        assert!(max_deg > 100, "max degree {max_deg}");
        let total = all.len() as f64;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for k in 2 * m..=10 * m {
            let ccdf = all.iter().filter(|&&d| d >= k).count() as f64 / total;
            xs.push((k as f64).ln());
            ys.push(ccdf.ln());
        }
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = num / den;
        assert!((slope + 2.0).abs() <= 0.5, "CCDF slope {slope}");
    }
}
