//! Random graph generators for the four topology families.
//!
//! Every generator is a pure function of its parameters and the supplied
//! random stream, and always returns a simple graph. Reduction to the giant
//! component is left to the caller.

mod ba;
mod er;
mod lfr;
mod waxman;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use ba::gen_ba;
pub use er::gen_er;
pub use lfr::{gen_lfr, lfr_mixing, LfrParams};
pub use waxman::{calibrate_waxman, calibrate_waxman_on, gen_waxman, waxman_expected_edges, WAXMAN_A_MAX};

/// Default Waxman distance scale in unit-square units.
pub const DEFAULT_WAXMAN_BETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Er,
    Ba,
    Wax,
    Lfr,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Er, Model::Ba, Model::Wax, Model::Lfr];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Er => "ER",
            Model::Ba => "BA",
            Model::Wax => "WAX",
            Model::Lfr => "LFR",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ER" => Ok(Model::Er),
            "BA" => Ok(Model::Ba),
            "WAX" | "WAXMAN" => Ok(Model::Wax),
            "LFR" => Ok(Model::Lfr),
            other => Err(Error::usage(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    None,
    Waxman { beta: f64 },
    Lfr(LfrParams),
}

/// What to generate: model family, size, target average degree and any
/// model-specific knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub target_k: f64,
    pub params: ModelParams,
}

impl GeneratorSpec {
    /// Generator settings with default model parameters (Waxman beta 0.1, LFR defaults).
    pub fn new(model: Model, n: usize, target_k: f64) -> Self {
        let params = match model {
            Model::Er | Model::Ba => ModelParams::None,
            Model::Wax => ModelParams::Waxman {
                beta: DEFAULT_WAXMAN_BETA,
            },
            Model::Lfr => ModelParams::Lfr(LfrParams::default()),
        };
        GeneratorSpec {
            model,
            n,
            target_k,
            params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::usage("generators need at least 2 nodes"));
        }
        if !(self.target_k > 0.0) || self.target_k >= (self.n - 1) as f64 {
            return Err(Error::usage(format!(
                "target average degree {} must lie in (0, n - 1)",
                self.target_k
            )));
        }
        match (&self.model, &self.params) {
            (Model::Ba, _) => {
                let m = (self.target_k / 2.0).round();
                if m < 1.0 {
                    return Err(Error::usage("BA needs target_k / 2 to round to at least 1"));
                }
            }
            (Model::Wax, ModelParams::Waxman { beta }) => {
                if !(*beta > 0.0) {
                    return Err(Error::usage("Waxman beta must be positive"));
                }
            }
            (Model::Wax, _) => return Err(Error::usage("Waxman generator needs a beta parameter")),
            (Model::Lfr, ModelParams::Lfr(p)) => p.validate()?,
            (Model::Lfr, _) => return Err(Error::usage("LFR generator needs LFR parameters")),
            (Model::Er, _) => {}
        }
        Ok(())
    }

    /// BA attachment count `round(target_k / 2)`.
    pub fn ba_attach(&self) -> usize {
        (self.target_k / 2.0).round() as usize
    }

    /// ER edge count `round(n * target_k / 2)`.
    pub fn er_edges(&self) -> usize {
        (self.n as f64 * self.target_k / 2.0).round() as usize
    }
}

/// Generates one graph for `spec`. The result may be disconnected.
pub fn generate<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    match (&spec.model, &spec.params) {
        (Model::Er, _) => gen_er(spec.n, spec.er_edges(), rng),
        (Model::Ba, _) => gen_ba(spec.n, spec.ba_attach(), rng),
        (Model::Wax, ModelParams::Waxman { beta }) => gen_waxman(spec.n, spec.target_k, *beta, rng),
        (Model::Lfr, ModelParams::Lfr(p)) => gen_lfr(spec.n, spec.target_k, p, rng),
        _ => unreachable!("validated above"),
    }
}
