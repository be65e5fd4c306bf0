//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::netgen::{GeneratorSpec, LfrParams, Model, ModelParams, DEFAULT_WAXMAN_BETA};
use crate::walks::{DynamicsKind, WalkDynamics, DEFAULT_LAMBDA};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<Model>,
    pub ns: Vec<usize>,
    pub ks: Vec<f64>,
    pub dynamics: Vec<DynamicsKind>,
    pub steps: usize,
    pub networks_per_config: usize,
    pub walks_per_network: usize,
    pub master_seed: u64,
    pub waxman_beta: f64,
    pub tsaw_lambda: f64,
    pub lfr: LfrParams,
    pub window: usize,
    /// Row thinning for curves.csv: keep every `thin`-th step plus the last.
    pub thin: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: Model::ALL.to_vec(),
            ns: vec![500, 1000, 5000],
            ks: vec![4.0, 6.0, 8.0, 10.0],
            dynamics: DynamicsKind::ALL.to_vec(),
            steps: 5000,
            networks_per_config: 5,
            walks_per_network: 50,
            master_seed: 0,
            waxman_beta: DEFAULT_WAXMAN_BETA,
            tsaw_lambda: DEFAULT_LAMBDA,
            lfr: LfrParams::default(),
            window: crate::coverage::DEFAULT_WINDOW,
            thin: 1,
            output_dir: PathBuf::from("results"),
        }
    }
}

fn list<T>(value: &str, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| Error::usage(format!("bad entry {s:?} for {key}"))))
        .collect()
}

fn scalar<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::usage(format!("bad value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Parses the config text. Unknown keys are rejected; missing keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let at = |e: Error| match e {
                Error::Usage(message) => Error::Parse {
                    line: lineno + 1,
                    message,
                },
                other => other,
            };
            cfg.set(key, value).map_err(at)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "models" => self.models = list(value, key, |s| s.parse().ok())?,
            "ns" => self.ns = list(value, key, |s| s.parse().ok())?,
            "ks" => self.ks = list(value, key, |s| s.parse().ok())?,
            "dynamics" => self.dynamics = list(value, key, |s| s.parse().ok())?,
            "steps" => self.steps = scalar(value, key)?,
            "networks_per_config" => self.networks_per_config = scalar(value, key)?,
            "walks_per_network" => self.walks_per_network = scalar(value, key)?,
            "master_seed" => self.master_seed = scalar(value, key)?,
            "waxman_beta" => self.waxman_beta = scalar(value, key)?,
            "tsaw_lambda" => self.tsaw_lambda = scalar(value, key)?,
            "lfr_communities" => self.lfr.n_communities = scalar(value, key)?,
            "lfr_t1" => self.lfr.t1 = scalar(value, key)?,
            "lfr_t2" => self.lfr.t2 = scalar(value, key)?,
            "lfr_mu" => self.lfr.mu = scalar(value, key)?,
            "lfr_max_k" => {
                self.lfr.max_k = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(scalar(value, key)?)
                }
            }
            "window" => self.window = scalar(value, key)?,
            "thin" => self.thin = scalar(value, key)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            other => return Err(Error::usage(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() || self.ns.is_empty() || self.ks.is_empty() || self.dynamics.is_empty() {
            return Err(Error::usage("models, ns, ks and dynamics must be non-empty"));
        }
        if self.window == 0 || self.steps == 0 || !self.steps.is_multiple_of(self.window) {
            return Err(Error::usage(format!(
                "steps ({}) must be a positive multiple of the feature window ({})",
                self.steps, self.window
            )));
        }
        if self.networks_per_config == 0 || self.walks_per_network == 0 {
            return Err(Error::usage(
                "networks_per_config and walks_per_network must be positive",
            ));
        }
        if self.thin == 0 {
            return Err(Error::usage("thin must be positive"));
        }
        WalkDynamics::tsaw_with_lambda(self.tsaw_lambda)?;
        for spec in self.topology_specs() {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn walk_dynamics(&self, kind: DynamicsKind) -> WalkDynamics {
        match kind {
            DynamicsKind::Tsaw => WalkDynamics::tsaw_with_lambda(self.tsaw_lambda).expect("lambda validated"),
            other => WalkDynamics::new(other),
        }
    }

    pub fn generator_spec(&self, model: Model, n: usize, k: f64) -> GeneratorSpec {
        let mut spec = GeneratorSpec::new(model, n, k);
        spec.params = match model {
            Model::Wax => ModelParams::Waxman { beta: self.waxman_beta },
            Model::Lfr => ModelParams::Lfr(self.lfr.clone()),
            _ => ModelParams::None,
        };
        spec
    }

    /// Topology cells in (model, n, k) order.
    pub fn topology_specs(&self) -> Vec<GeneratorSpec> {
        let mut out = Vec::new();
        for &m in &self.models {
            for &n in &self.ns {
                for &k in &self.ks {
                    out.push(self.generator_spec(m, n, k));
                }
            }
        }
        out
    }

    /// Canonical `key = value` text; parsing it reproduces the config.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(
            s,
            "models = {}",
            join(self.models.iter().map(|m| m.to_string()).collect())
        );
        let _ = writeln!(s, "ns = {}", join(self.ns.iter().map(|n| n.to_string()).collect()));
        let _ = writeln!(s, "ks = {}", join(self.ks.iter().map(|&k| format!("{k:?}")).collect()));
        let _ = writeln!(
            s,
            "dynamics = {}",
            join(self.dynamics.iter().map(|d| d.to_string()).collect())
        );
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "networks_per_config = {}", self.networks_per_config);
        let _ = writeln!(s, "walks_per_network = {}", self.walks_per_network);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "waxman_beta = {:?}", self.waxman_beta);
        let _ = writeln!(s, "tsaw_lambda = {:?}", self.tsaw_lambda);
        let _ = writeln!(s, "lfr_communities = {}", self.lfr.n_communities);
        let _ = writeln!(s, "lfr_t1 = {:?}", self.lfr.t1);
        let _ = writeln!(s, "lfr_t2 = {:?}", self.lfr.t2);
        let _ = writeln!(s, "lfr_mu = {:?}", self.lfr.mu);
        match self.lfr.max_k {
            Some(k) => {
                let _ = writeln!(s, "lfr_max_k = {k}");
            }
            None => {
                let _ = writeln!(s, "lfr_max_k = auto");
            }
        }
        let _ = writeln!(s, "window = {}", self.window);
        let _ = writeln!(s, "thin = {}", self.thin);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        s
    }

    /// SHA-256 over everything that influences the CSV bundle.
    pub fn hash(&self) -> String {
        let text: String = self
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("output_dir"))
            .map(|l| format!("{l}\n"))
            .collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
