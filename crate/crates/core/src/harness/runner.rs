use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{axis_profile, pca_fit, PcaResult};
use crate::coverage::{
    ensemble, learning_curve, rate_features, CurveMeta, EnsembleCurve, FeatureVector, LearningCurve,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::netgen::{generate, GeneratorSpec, Model};
use crate::walks::{run_walk, DynamicsKind};

use super::config::ExperimentConfig;
use super::csvio::{fmt_g12, write_file, Table};
use super::seed::{derive_seed, GRAPH_STREAM};

/// Seeds tried per network before the topology cell is reported as failed.
pub const GENERATION_ATTEMPTS: u64 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkStats {
    pub seed: u64,
    pub attempts: u64,
    /// Average degree of the generated graph before giant-component reduction.
    pub realized_k: f64,
    pub giant_size: usize,
}

#[derive(Debug, Clone)]
pub struct TopologyResult {
    pub spec: GeneratorSpec,
    pub networks: Vec<NetworkStats>,
    pub failure: Option<String>,
}

impl TopologyResult {
    pub fn mean_realized_k(&self) -> f64 {
        if self.networks.is_empty() {
            return f64::NAN;
        }
        self.networks.iter().map(|s| s.realized_k).sum::<f64>() / self.networks.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub model: Model,
    pub n: usize,
    pub k: f64,
    pub dynamics: DynamicsKind,
    pub ensemble: EnsembleCurve,
    pub features: FeatureVector,
}

/// One per-configuration feature row, as stored in features.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub model: String,
    pub n: usize,
    pub k: f64,
    pub dynamics: String,
    pub features: Vec<f64>,
}

/// PCA fitted to all feature rows sharing one node count.
#[derive(Debug, Clone)]
pub struct PcaFit {
    pub n: usize,
    /// Indices of the fitted rows in the row list given to [`fit_by_n`].
    pub rows: Vec<usize>,
    pub result: PcaResult,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub topologies: Vec<TopologyResult>,
    pub cells: Vec<CellResult>,
    pub failures: Vec<String>,
    pub pca: Vec<PcaFit>,
    pub workers: usize,
    pub elapsed: Duration,
}

impl ExperimentResults {
    pub fn cell(&self, model: Model, n: usize, k: f64, dynamics: DynamicsKind) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.n == n && c.k == k && c.dynamics == dynamics)
    }

    pub fn feature_rows(&self) -> Vec<FeatureRow> {
        self.cells.iter().map(CellResult::feature_row).collect()
    }

    pub fn pca_for(&self, n: usize) -> Option<&PcaFit> {
        self.pca.iter().find(|f| f.n == n)
    }
}

impl CellResult {
    pub fn feature_row(&self) -> FeatureRow {
        FeatureRow {
            model: self.model.to_string(),
            n: self.n,
            k: self.k,
            dynamics: self.dynamics.to_string(),
            features: self.features.features.clone(),
        }
    }

    /// Mean coverage after `step` steps.
    pub fn mean_at(&self, step: usize) -> f64 {
        self.ensemble.mean[step]
    }

    pub fn final_mean(&self) -> f64 {
        *self.ensemble.mean.last().expect("non-empty curve")
    }

    /// Standard error of the mean coverage at `step`.
    pub fn std_error_at(&self, step: usize) -> f64 {
        self.ensemble.std[step] / (self.ensemble.count as f64).sqrt()
    }
}

fn generate_network(
    spec: &GeneratorSpec,
    master_seed: u64,
    topology: u64,
    network: u64,
) -> Result<(Graph, NetworkStats)> {
    let mut last = None;
    for attempt in 0..GENERATION_ATTEMPTS {
        let seed = derive_seed(master_seed, topology, network, GRAPH_STREAM - attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match generate(spec, &mut rng) {
            Ok(g) => {
                let realized_k = g.average_degree();
                let giant = g.giant_component().graph;
                let stats = NetworkStats {
                    seed,
                    attempts: attempt + 1,
                    realized_k,
                    giant_size: giant.node_count(),
                };
                return Ok((giant, stats));
            }
            Err(e @ Error::Generation(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn walk_curve(graph: &Graph, config: &ExperimentConfig, kind: DynamicsKind, seed: u64) -> Result<LearningCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..graph.node_count());
    let seq = run_walk(graph, &config.walk_dynamics(kind), start, config.steps, &mut rng)?;
    learning_curve(&seq, graph.node_count())
}

/// Runs every configuration cell on a pool of `workers` threads. Results do
/// not depend on the worker count.
pub fn run_cells(
    config: &ExperimentConfig,
    workers: usize,
    progress: Option<&(dyn Fn(&str) + Sync)>,
) -> Result<ExperimentResults> {
    config.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::usage(format!("cannot build worker pool: {e}")))?;
    let say = |msg: String| {
        if let Some(p) = progress {
            p(&msg);
        }
    };

    let n_dyn = config.dynamics.len() as u64;
    let mut topologies = Vec::new();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    pool.install(|| -> Result<()> {
        for (t, spec) in config.topology_specs().into_iter().enumerate() {
            let t = t as u64;
            let generated: Vec<Result<(Graph, NetworkStats)>> = (0..config.networks_per_config as u64)
                .into_par_iter()
                .map(|net| generate_network(&spec, config.master_seed, t, net))
                .collect();
            let mut graphs = Vec::new();
            let mut stats = Vec::new();
            let mut failure = None;
            for (net, g) in generated.into_iter().enumerate() {
                match g {
                    Ok((g, s)) => {
                        graphs.push(g);
                        stats.push(s);
                    }
                    Err(e @ Error::Generation(_)) => {
                        failure = Some(format!("network {net}: {e}"));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            let label = format!("{} n={} k={}", spec.model, spec.n, fmt_g12(spec.target_k));
            if let Some(f) = &failure {
                failures.push(format!("{label}: {f}"));
                say(format!("{label}: generation failed ({f})"));
                topologies.push(TopologyResult {
                    spec,
                    networks: stats,
                    failure,
                });
                continue;
            }
            for (d, &kind) in config.dynamics.iter().enumerate() {
                let cell_index = t * n_dyn + d as u64;
                let tasks: Vec<(usize, u64)> = (0..graphs.len())
                    .flat_map(|net| (0..config.walks_per_network as u64).map(move |w| (net, w)))
                    .collect();
                let curves: Result<Vec<LearningCurve>> = tasks
                    .par_iter()
                    .map(|&(net, w)| {
                        let seed = derive_seed(config.master_seed, cell_index, net as u64, w);
                        walk_curve(&graphs[net], config, kind, seed)
                    })
                    .collect();
                let curves = match curves {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("{label} {kind}: {e}"));
                        continue;
                    }
                };
                let meta = CurveMeta {
                    model: spec.model.to_string(),
                    n: spec.n,
                    target_k: spec.target_k,
                    dynamics: kind.to_string(),
                    n_networks: graphs.len(),
                    n_walks_per_network: config.walks_per_network,
                    master_seed: config.master_seed,
                };
                let ens = ensemble(&curves, meta)?;
                let features = rate_features(&ens, config.window)?;
                cells.push(CellResult {
                    model: spec.model,
                    n: spec.n,
                    k: spec.target_k,
                    dynamics: kind,
                    ensemble: ens,
                    features,
                });
            }
            say(format!(
                "{label}: realized <k>={:.3}, giant sizes {:?}",
                stats.iter().map(|s| s.realized_k).sum::<f64>() / stats.len() as f64,
                stats.iter().map(|s| s.giant_size).collect::<Vec<_>>()
            ));
            topologies.push(TopologyResult {
                spec,
                networks: stats,
                failure: None,
            });
        }
        Ok(())
    })?;

    let mut results = ExperimentResults {
        config: config.clone(),
        topologies,
        cells,
        failures,
        pca: Vec::new(),
        workers: workers.max(1),
        elapsed: Duration::ZERO,
    };
    results.pca = fit_by_n(&results.feature_rows(), config.window)?;
    results.elapsed = started.elapsed();
    Ok(results)
}

/// Fits one PCA per distinct node count (in first-seen order). Node counts
/// with fewer than two rows are skipped.
pub fn fit_by_n(rows: &[FeatureRow], window: usize) -> Result<Vec<PcaFit>> {
    let mut ns: Vec<usize> = Vec::new();
    for r in rows {
        if !ns.contains(&r.n) {
            ns.push(r.n);
        }
    }
    let mut fits = Vec::new();
    for n in ns {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].n == n).collect();
        if idx.len() < 2 {
            continue;
        }
        let matrix: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].features.clone()).collect();
        let mut result = pca_fit(&matrix)?;
        result.window = window;
        fits.push(PcaFit { n, rows: idx, result });
    }
    Ok(fits)
}

/// Files written for one experiment.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Bundle {
    /// The CSV members, in write order.
    pub fn csv_files(&self) -> Vec<&PathBuf> {
        self.files
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .collect()
    }
}

pub fn curves_csv(cells: &[CellResult], thin: usize) -> String {
    let mut s = String::from("model,n,k,dynamics,step,mean,std\n");
    for c in cells {
        let last = c.ensemble.mean.len() - 1;
        let k = fmt_g12(c.k);
        for (t, (m, sd)) in c.ensemble.mean.iter().zip(&c.ensemble.std).enumerate() {
            if t % thin == 0 || t == last {
                let _ = writeln!(
                    s,
                    "{},{},{k},{},{t},{},{}",
                    c.model,
                    c.n,
                    c.dynamics,
                    fmt_g12(*m),
                    fmt_g12(*sd)
                );
            }
        }
    }
    s
}

pub fn features_csv(rows: &[FeatureRow]) -> String {
    let width = rows.first().map_or(0, |r| r.features.len());
    let mut s = String::from("model,n,k,dynamics");
    for j in 0..width {
        let _ = write!(s, ",f{j}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},{},{},{}", r.model, r.n, fmt_g12(r.k), r.dynamics);
        for x in &r.features {
            let _ = write!(s, ",{}", fmt_g12(*x));
        }
        s.push('\n');
    }
    s
}

pub fn parse_features_csv(table: &Table) -> Result<Vec<FeatureRow>> {
    let (cm, cn, ck, cd) = (
        table.column("model")?,
        table.column("n")?,
        table.column("k")?,
        table.column("dynamics")?,
    );
    let fcols: Vec<usize> = (0..).map_while(|j| table.column(&format!("f{j}")).ok()).collect();
    (0..table.rows.len())
        .map(|i| {
            let row = &table.rows[i];
            Ok(FeatureRow {
                model: row[cm].clone(),
                n: table.number(i, cn)? as usize,
                k: table.number(i, ck)?,
                dynamics: row[cd].clone(),
                features: fcols.iter().map(|&c| table.number(i, c)).collect::<Result<_>>()?,
            })
        })
        .collect()
}

pub fn pca_csv(rows: &[FeatureRow], fits: &[PcaFit]) -> String {
    let mut s = String::from("model,n,k,dynamics,pc1,pc2\n");
    for fit in fits {
        for (&i, p) in fit.rows.iter().zip(&fit.result.projections) {
            let r = &rows[i];
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.model,
                r.n,
                fmt_g12(r.k),
                r.dynamics,
                fmt_g12(p[0]),
                fmt_g12(p[1])
            );
        }
    }
    s
}

pub fn variance_csv(result: &PcaResult) -> String {
    let mut s = String::from("component,eigenvalue,ratio,cumulative\n");
    for (i, ((l, r), c)) in result
        .eigenvalues
        .iter()
        .zip(&result.explained_variance_ratio)
        .zip(result.cumulative_ratio())
        .enumerate()
    {
        let _ = writeln!(s, "{},{},{},{}", i + 1, fmt_g12(*l), fmt_g12(*r), fmt_g12(c));
    }
    s
}

pub fn profiles_csv(result: &PcaResult) -> String {
    let mut s = String::from("axis,epoch,loading\n");
    for axis in 1..=result.components.len().min(2) {
        for (epoch, w) in axis_profile(result, axis).expect("axis in range") {
            let _ = writeln!(s, "{axis},{epoch},{}", fmt_g12(w));
        }
    }
    s
}

/// Writes pca.csv plus variance/profile tables: per node count as
/// `variance_n{N}.csv` / `profiles_n{N}.csv`, and the largest node count's
/// fit again as `variance.csv` / `profiles.csv`.
pub fn write_pca_outputs(dir: &Path, rows: &[FeatureRow], fits: &[PcaFit]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        files.push(path);
        Ok(())
    };
    put("pca.csv".into(), pca_csv(rows, fits))?;
    let largest = fits.iter().max_by_key(|f| f.n);
    match largest {
        Some(f) => {
            put("variance.csv".into(), variance_csv(&f.result))?;
            put("profiles.csv".into(), profiles_csv(&f.result))?;
        }
        None => {
            put("variance.csv".into(), "component,eigenvalue,ratio,cumulative\n".into())?;
            put("profiles.csv".into(), "axis,epoch,loading\n".into())?;
        }
    }
    for f in fits {
        put(format!("variance_n{}.csv", f.n), variance_csv(&f.result))?;
        put(format!("profiles_n{}.csv", f.n), profiles_csv(&f.result))?;
    }
    Ok(files)
}

pub fn manifest_text(results: &ExperimentResults) -> String {
    let cfg = &results.config;
    let mut s = String::new();
    let _ = writeln!(s, "config_sha256={}", cfg.hash());
    let _ = writeln!(s, "master_seed={}", cfg.master_seed);
    let _ = writeln!(s, "workers={}", results.workers);
    let _ = writeln!(s, "wall_clock_seconds={:.3}", results.elapsed.as_secs_f64());
    let _ = writeln!(s, "cells={}", results.cells.len());
    let _ = writeln!(s, "steps={}", cfg.steps);
    let _ = writeln!(s, "std_pooling=all networks x walks pooled, sample std (n-1)");
    let _ = writeln!(s, "coverage_denominator=giant component size");
    for t in &results.topologies {
        let key = format!("topology.{}.{}.{}", t.spec.model, t.spec.n, fmt_g12(t.spec.target_k));
        let join = |v: Vec<String>| v.join(",");
        let _ = writeln!(s, "{key}.realized_k={}", fmt_g12(t.mean_realized_k()));
        let _ = writeln!(
            s,
            "{key}.realized_k_per_network={}",
            join(t.networks.iter().map(|n| fmt_g12(n.realized_k)).collect())
        );
        let _ = writeln!(
            s,
            "{key}.giant_sizes={}",
            join(t.networks.iter().map(|n| n.giant_size.to_string()).collect())
        );
        let _ = writeln!(
            s,
            "{key}.seeds={}",
            join(t.networks.iter().map(|n| n.seed.to_string()).collect())
        );
        if let Some(f) = &t.failure {
            let _ = writeln!(s, "{key}.failure={f}");
        }
    }
    for f in &results.failures {
        let _ = writeln!(s, "failure={f}");
    }
    for n in &cfg.ns {
        match results.pca_for(*n) {
            Some(fit) => {
                let _ = writeln!(s, "pca.{n}=fitted rows={}", fit.rows.len());
            }
            None => {
                let _ = writeln!(s, "pca.{n}=skipped (fewer than 2 feature rows)");
            }
        }
    }
    s
}

/// Writes the CSV bundle and manifest into `dir`.
pub fn write_bundle(results: &ExperimentResults, dir: &Path) -> Result<Bundle> {
    let mut files = Vec::new();
    let curves = dir.join("curves.csv");
    write_file(&curves, &curves_csv(&results.cells, results.config.thin))?;
    files.push(curves);
    let rows = results.feature_rows();
    let features = dir.join("features.csv");
    write_file(&features, &features_csv(&rows))?;
    files.push(features);
    files.extend(write_pca_outputs(dir, &rows, &results.pca)?);
    let manifest = dir.join("manifest.txt");
    write_file(&manifest, &manifest_text(results))?;
    files.push(manifest);
    Ok(Bundle {
        dir: dir.to_path_buf(),
        files,
    })
}

/// Full pipeline: run every cell, write the bundle to the config's output
/// directory and render the SVG figures next to it.
pub fn run_experiment(
    config: &ExperimentConfig,
    workers: usize,
    progress: Option<&(dyn Fn(&str) + Sync)>,
) -> Result<(ExperimentResults, Bundle)> {
    let results = run_cells(config, workers, progress)?;
    let mut bundle = write_bundle(&results, &config.output_dir)?;
    bundle.files.extend(super::plot::emit_plots(&config.output_dir)?);
    Ok((results, bundle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            models: vec![Model::Er],
            ns: vec![100],
            ks: vec![4.0],
            dynamics: vec![DynamicsKind::Rw],
            steps: 200,
            networks_per_config: 1,
            walks_per_network: 2,
            output_dir: dir.to_path_buf(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn tiny_bundle_shape() {
        let dir = tempfile::tempdir().unwrap();
        let (results, bundle) = run_experiment(&tiny(dir.path()), 1, None).unwrap();
        assert_eq!(results.cells.len(), 1);
        let curves = Table::read(&dir.path().join("curves.csv")).unwrap();
        assert_eq!(curves.rows.len(), 201);
        let features = Table::read(&dir.path().join("features.csv")).unwrap();
        assert_eq!(features.rows.len(), 1);
        assert_eq!(features.header.len(), 4 + 2);
        // one row: nothing to fit
        assert!(results.pca.is_empty());
        let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(manifest.contains("pca.100=skipped"));
        assert!(manifest.contains("config_sha256="));
        assert!(bundle.files.iter().any(|p| p.ends_with("curves_n100.svg")));
    }

    #[test]
    fn thinning_keeps_last_step() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path());
        cfg.thin = 30;
        let results = run_cells(&cfg, 1, None).unwrap();
        let text = curves_csv(&results.cells, cfg.thin);
        let steps: Vec<String> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().to_string())
            .collect();
        assert_eq!(steps.first().unwrap(), "0");
        assert_eq!(steps.last().unwrap(), "200");
        assert_eq!(steps.len(), 8);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path());
        cfg.models = vec![Model::Er, Model::Ba];
        cfg.dynamics = DynamicsKind::ALL.to_vec();
        cfg.networks_per_config = 2;
        cfg.walks_per_network = 3;
        let a = run_cells(&cfg, 1, None).unwrap();
        let b = run_cells(&cfg, 8, None).unwrap();
        assert_eq!(curves_csv(&a.cells, 1), curves_csv(&b.cells, 1));
        assert_eq!(features_csv(&a.feature_rows()), features_csv(&b.feature_rows()));
        assert_eq!(a.pca.len(), 1);
        assert_eq!(a.pca[0].result.projections, b.pca[0].result.projections);
    }

    #[test]
    fn features_round_trip_through_csv() {
        let rows = vec![
            FeatureRow {
                model: "ER".into(),
                n: 10,
                k: 4.0,
                dynamics: "RW".into(),
                features: vec![0.1, 0.25],
            },
            FeatureRow {
                model: "BA".into(),
                n: 10,
                k: 6.5,
                dynamics: "TSAW".into(),
                features: vec![1.0 / 3.0, 0.0],
            },
        ];
        let table = Table::parse(&features_csv(&rows)).unwrap();
        let back = parse_features_csv(&table).unwrap();
        assert_eq!(back[0], rows[0]);
        assert_eq!(back[1].model, "BA");
        assert!((back[1].features[0] - 1.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn fit_by_n_groups_rows() {
        let row = |n, f: Vec<f64>| FeatureRow {
            model: "ER".into(),
            n,
            k: 4.0,
            dynamics: "RW".into(),
            features: f,
        };
        let rows = vec![
            row(5, vec![0.0, 1.0]),
            row(7, vec![1.0, 2.0]),
            row(5, vec![2.0, 0.0]),
            row(9, vec![0.0, 0.0]),
        ];
        let fits = fit_by_n(&rows, 100).unwrap();
        assert_eq!(fits.len(), 1);
        assert_eq!(fits[0].n, 5);
        assert_eq!(fits[0].rows, vec![0, 2]);
    }
}
