//! Experiment grid runner, output bundle, figures and the exact oracle.

mod config;
mod csvio;
mod oracle;
mod plot;
mod runner;
mod seed;

pub use config::ExperimentConfig;
pub use csvio::{fmt_g12, write_file, Table};
pub use oracle::{
    monte_carlo_coverage, oracle_coverage_moments, oracle_expected_coverage, CoverageMoments, ORACLE_MAX_NODES,
    ORACLE_MAX_STEPS,
};
pub use plot::{emit_plots, emit_plots_from};
pub use runner::{
    curves_csv, features_csv, fit_by_n, manifest_text, parse_features_csv, pca_csv, profiles_csv, run_cells,
    run_experiment, variance_csv, write_bundle, write_pca_outputs, Bundle, CellResult, ExperimentResults, FeatureRow,
    NetworkStats, PcaFit, TopologyResult, GENERATION_ATTEMPTS,
};
pub use seed::{derive_seed, GRAPH_STREAM};
