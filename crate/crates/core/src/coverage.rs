//! Learning (coverage) curves, ensemble aggregation and rate features.

use crate::error::{Error, Result};
use crate::walks::VisitSequence;

/// Window, in steps, between consecutive rate-curve samples.
pub const DEFAULT_WINDOW: usize = 100;

/// Fraction of distinct nodes seen after each visit.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub values: Vec<f64>,
}

/// Describes which configuration cell a curve or feature vector came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveMeta {
    pub model: String,
    pub n: usize,
    pub target_k: f64,
    pub dynamics: String,
    pub n_networks: usize,
    pub n_walks_per_network: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCurve {
    pub mean: Vec<f64>,
    /// Sample standard deviation (divisor `n - 1`); zeros for a single curve.
    pub std: Vec<f64>,
    pub count: usize,
    pub meta: CurveMeta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub features: Vec<f64>,
    pub window: usize,
    pub meta: CurveMeta,
}

/// `values[t]` = distinct nodes among the first `t + 1` visits, divided by
/// `n_effective`.
pub fn learning_curve(seq: &VisitSequence, n_effective: usize) -> Result<LearningCurve> {
    if n_effective == 0 {
        return Err(Error::usage("n_effective must be positive"));
    }
    let mut seen = vec![false; n_effective];
    let mut distinct = 0usize;
    let inv = 1.0 / n_effective as f64;
    let mut values = Vec::with_capacity(seq.nodes.len());
    for &node in &seq.nodes {
        let slot = seen
            .get_mut(node)
            .ok_or_else(|| Error::usage(format!("node {node} outside universe of {n_effective}")))?;
        if !*slot {
            *slot = true;
            distinct += 1;
        }
        values.push(distinct as f64 * inv);
    }
    Ok(LearningCurve { values })
}

/// Pointwise mean and sample standard deviation, accumulated in input order.
pub fn ensemble(curves: &[LearningCurve], meta: CurveMeta) -> Result<EnsembleCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::usage("ensemble needs at least one curve"))?;
    let len = first.values.len();
    if let Some(bad) = curves.iter().find(|c| c.values.len() != len) {
        return Err(Error::usage(format!(
            "curve lengths differ: {} vs {len}",
            bad.values.len()
        )));
    }
    let count = curves.len();
    let mut mean = vec![0.0; len];
    for c in curves {
        for (m, v) in mean.iter_mut().zip(&c.values) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    let mut std = vec![0.0; len];
    if count > 1 {
        for c in curves {
            for ((s, v), m) in std.iter_mut().zip(&c.values).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in &mut std {
            *s = (*s / (count - 1) as f64).sqrt();
        }
    }
    Ok(EnsembleCurve { mean, std, count, meta })
}

/// `features[j] = mean[(j + 1) * window] - mean[j * window]`.
pub fn rate_features(curve: &EnsembleCurve, window: usize) -> Result<FeatureVector> {
    let features = rate_samples(&curve.mean, window)?;
    Ok(FeatureVector {
        features,
        window,
        meta: curve.meta.clone(),
    })
}

/// Windowed differences of a raw curve.
pub fn rate_samples(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::usage("window must be positive"));
    }
    if values.is_empty() || !(values.len() - 1).is_multiple_of(window) {
        return Err(Error::usage(format!(
            "curve of {} steps is not divisible into windows of {window}",
            values.len().saturating_sub(1)
        )));
    }
    let blocks = (values.len() - 1) / window;
    Ok((0..blocks)
        .map(|j| values[(j + 1) * window] - values[j * window])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(nodes: &[usize]) -> VisitSequence {
        VisitSequence { nodes: nodes.to_vec() }
    }

    fn curve(values: &[f64]) -> LearningCurve {
        LearningCurve {
            values: values.to_vec(),
        }
    }

    fn ens_of(values: Vec<f64>) -> EnsembleCurve {
        EnsembleCurve {
            std: vec![0.0; values.len()],
            mean: values,
            count: 1,
            meta: CurveMeta::default(),
        }
    }

    #[test]
    fn learning_curve_examples() {
        let c = learning_curve(&seq(&[0, 1, 0, 2]), 4).unwrap();
        assert_eq!(c.values, vec![0.25, 0.5, 0.5, 0.75]);

        let c = learning_curve(&seq(&[3; 5]), 10).unwrap();
        assert_eq!(c.values, vec![0.1; 5]);

        let n = 7;
        let order: Vec<usize> = (0..n).collect();
        let c = learning_curve(&seq(&order), n).unwrap();
        assert_eq!(c.values[n - 1], 1.0);
    }

    #[test]
    fn learning_curve_rejects_out_of_universe() {
        assert!(matches!(learning_curve(&seq(&[0, 4]), 4), Err(Error::Usage(_))));
    }

    #[test]
    fn ensemble_examples() {
        let c = curve(&[0.1, 0.3, 0.4]);
        let e = ensemble(&[c.clone(), c.clone()], CurveMeta::default()).unwrap();
        assert_eq!(e.mean, c.values);
        assert_eq!(e.std, vec![0.0; 3]);

        let e = ensemble(&[curve(&[0.0, 1.0]), curve(&[0.0, 0.0])], CurveMeta::default()).unwrap();
        assert_eq!(e.mean, vec![0.0, 0.5]);
        assert!((e.std[1] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ensemble_rejects_mismatched_lengths() {
        assert!(ensemble(&[curve(&[0.1]), curve(&[0.1, 0.2])], CurveMeta::default()).is_err());
        assert!(ensemble(&[], CurveMeta::default()).is_err());
    }

    #[test]
    fn rate_feature_examples() {
        let constant = ens_of(vec![0.3; 501]);
        let f = rate_features(&constant, 100).unwrap();
        assert_eq!(f.features, vec![0.0; 5]);

        let s = 1e-4;
        let linear = ens_of((0..=500).map(|t| t as f64 * s).collect());
        let f = rate_features(&linear, 100).unwrap();
        for x in &f.features {
            assert!((x - 100.0 * s).abs() < 1e-12);
        }

        let long = ens_of(vec![0.0; 5001]);
        assert_eq!(rate_features(&long, DEFAULT_WINDOW).unwrap().features.len(), 50);
    }

    #[test]
    fn rate_features_require_divisibility() {
        assert!(rate_features(&ens_of(vec![0.0; 250]), 100).is_err());
        assert!(rate_features(&ens_of(vec![0.0; 201]), 0).is_err());
    }

    proptest! {
        #[test]
        fn curve_invariants(nodes in proptest::collection::vec(0usize..20, 1..200)) {
            let c = learning_curve(&seq(&nodes), 20).unwrap();
            prop_assert_eq!(c.values.len(), nodes.len());
            prop_assert!((c.values[0] - 1.0 / 20.0).abs() < 1e-15);
            for (t, w) in c.values.windows(2).enumerate() {
                prop_assert!(w[1] >= w[0]);
                prop_assert!(w[1] <= ((t + 2) as f64 / 20.0).min(1.0) + 1e-15);
            }
        }

        #[test]
        fn relabeling_invariance(
            nodes in proptest::collection::vec(0usize..12, 1..100),
            perm in Just((0..12).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let a = learning_curve(&seq(&nodes), 12).unwrap();
            let relabeled: Vec<usize> = nodes.iter().map(|&x| perm[x]).collect();
            let b = learning_curve(&seq(&relabeled), 12).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn features_telescope(steps in proptest::collection::vec(0.0f64..0.01, 500)) {
            let mut acc = 0.0;
            let mut mean = vec![0.0];
            for s in steps {
                acc += s;
                mean.push(acc);
            }
            let f = rate_samples(&mean, 100).unwrap();
            let total: f64 = f.iter().sum();
            prop_assert!((total - (mean[500] - mean[0])).abs() < 1e-12);
        }
    }
}
