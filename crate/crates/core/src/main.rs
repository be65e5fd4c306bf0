use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netcover::harness::{
    emit_plots_from, fit_by_n, monte_carlo_coverage, oracle_coverage_moments, parse_features_csv, run_experiment,
    write_file, write_pca_outputs, ExperimentConfig, Table,
};
use netcover::netgen::{generate, GeneratorSpec, Model, ModelParams};
use netcover::walks::{run_walk, DynamicsKind, WalkDynamics};
use netcover::{Error, Graph, Result};

#[derive(Parser)]
#[command(
    name = "netcover",
    version,
    about = "Random-walk coverage experiments on synthetic networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one network and write it as an edge list.
    Generate {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: f64,
        /// Waxman distance scale.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reduce to the giant component before writing.
        #[arg(long)]
        giant: bool,
        /// Output file (stdout if omitted). Metadata goes to FILE.meta.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one walk on an edge-list graph and print the visited nodes.
    Walk {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dynamics: DynamicsKind,
        /// TSAW reinforcement strength.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a full experiment grid from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides master_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Overrides output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides thin.
        #[arg(long)]
        thin: Option<usize>,
    },
    /// Refit PCA from a features.csv file.
    Pca {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render SVG figures from a result directory.
    Plot {
        #[arg(long)]
        out: PathBuf,
        /// Directory holding the CSVs (defaults to --out).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compare the exact expected coverage with Monte Carlo on a small graph.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dynamics: DynamicsKind,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn load_graph(path: &Path) -> Result<Graph> {
    let loaded = Graph::from_edge_list(&read_text(path)?)?;
    if loaded.dropped > 0 {
        eprintln!("warning: dropped {} self-loop/duplicate edges", loaded.dropped);
    }
    Ok(loaded.graph)
}

fn stdout_err(e: io::Error) -> Error {
    Error::io(Path::new("<stdout>"), e)
}

fn cmd_generate(
    model: Model,
    n: usize,
    k: f64,
    beta: Option<f64>,
    seed: u64,
    giant: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut spec = GeneratorSpec::new(model, n, k);
    if let Some(b) = beta {
        if model != Model::Wax {
            return Err(Error::Usage("--beta only applies to WAX".into()));
        }
        spec.params = ModelParams::Waxman { beta: b };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = generate(&spec, &mut rng)?;
    let realized_k = g.average_degree();
    let giant_size = g.giant_component().graph.node_count();
    if giant {
        g = g.giant_component().graph;
    }
    let meta = format!(
        "model={model}\nn={n}\ntarget_k={k}\nrealized_k={realized_k}\nseed={seed}\ngiant_component_size={giant_size}\n"
    );
    match out {
        Some(path) => {
            write_file(&path, &g.to_edge_list())?;
            let mut meta_path = path.into_os_string();
            meta_path.push(".meta");
            write_file(Path::new(&meta_path), &meta)?;
        }
        None => {
            io::stdout()
                .write_all(g.to_edge_list().as_bytes())
                .map_err(stdout_err)?;
            eprint!("{meta}");
        }
    }
    Ok(())
}

fn cmd_walk(
    graph: &Path,
    kind: DynamicsKind,
    lambda: Option<f64>,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<()> {
    let g = load_graph(graph)?;
    let dynamics = match (kind, lambda) {
        (DynamicsKind::Tsaw, Some(l)) => WalkDynamics::tsaw_with_lambda(l)?,
        (_, Some(_)) => return Err(Error::Usage("--lambda only applies to TSAW".into())),
        (k, None) => WalkDynamics::new(k),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = run_walk(&g, &dynamics, start, steps, &mut rng)?;
    let stdout = io::stdout();
    seq.write_to(io::BufWriter::new(stdout.lock())).map_err(stdout_err)
}

fn cmd_run(config: &Path, seed: Option<u64>, workers: usize, out: Option<PathBuf>, thin: Option<usize>) -> Result<()> {
    let mut cfg = ExperimentConfig::parse(&read_text(config)?)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(t) = thin {
        cfg.thin = t;
    }
    if workers == 0 {
        return Err(Error::Usage("--workers must be positive".into()));
    }
    let progress = |msg: &str| eprintln!("{msg}");
    let (results, bundle) = run_experiment(&cfg, workers, Some(&progress))?;
    eprintln!(
        "{} cells in {:.1}s, {} files in {}",
        results.cells.len(),
        results.elapsed.as_secs_f64(),
        bundle.files.len(),
        bundle.dir.display()
    );
    for f in &results.failures {
        eprintln!("failure: {f}");
    }
    if !results.failures.is_empty() {
        return Err(Error::Generation(format!("{} cells failed", results.failures.len())));
    }
    Ok(())
}

fn cmd_pca(features: &Path, out: &Path) -> Result<()> {
    let rows = parse_features_csv(&Table::read(features)?)?;
    let fits = fit_by_n(&rows, netcover::coverage::DEFAULT_WINDOW)?;
    let files = write_pca_outputs(out, &rows, &fits)?;
    for fit in &fits {
        let r = &fit.result.explained_variance_ratio;
        eprintln!(
            "n={}: {} rows, ratio[0]={:.4}, ratio[0..2]={:.4}",
            fit.n,
            fit.rows.len(),
            r.first().copied().unwrap_or(0.0),
            r.iter().take(2).sum::<f64>()
        );
    }
    eprintln!("wrote {} files", files.len());
    Ok(())
}

fn cmd_oracle(graph: &Path, kind: DynamicsKind, start: usize, steps: usize, walks: usize, seed: u64) -> Result<()> {
    let g = load_graph(graph)?;
    let moments = oracle_coverage_moments(&g, kind, start, steps)?;
    let se = moments.standard_error(walks);
    let exact = moments.mean;
    let (mean, _) = monte_carlo_coverage(&g, &WalkDynamics::new(kind), start, steps, walks, seed)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    let mut worst = 0.0f64;
    writeln!(out, "step\texact\tmonte_carlo\tse\tz").map_err(stdout_err)?;
    for t in 0..=steps {
        let z = if se[t] > 0.0 {
            (mean[t] - exact[t]) / se[t]
        } else if (mean[t] - exact[t]).abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        if t % 5 == 0 {
            worst = worst.max(z.abs());
        }
        writeln!(out, "{t}\t{:.6}\t{:.6}\t{:.6}\t{:.2}", exact[t], mean[t], se[t], z).map_err(stdout_err)?;
    }
    out.flush().map_err(stdout_err)?;
    if worst > 4.0 {
        return Err(Error::Numeric(format!(
            "Monte Carlo deviates by {worst:.2} standard errors"
        )));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            model,
            n,
            k,
            beta,
            seed,
            giant,
            out,
        } => cmd_generate(model, n, k, beta, seed, giant, out),
        Command::Walk {
            graph,
            dynamics,
            lambda,
            start,
            steps,
            seed,
        } => cmd_walk(&graph, dynamics, lambda, start, steps, seed),
        Command::Run {
            config,
            seed,
            workers,
            out,
            thin,
        } => cmd_run(&config, seed, workers, out, thin),
        Command::Pca { features, out } => cmd_pca(&features, &out),
        Command::Plot { out, input } => {
            let input = input.unwrap_or_else(|| out.clone());
            let files = emit_plots_from(&input, &out)?;
            eprintln!("wrote {} figures", files.len());
            Ok(())
        }
        Command::Oracle {
            graph,
            dynamics,
            start,
            steps,
            walks,
            seed,
        } => cmd_oracle(&graph, dynamics, start, steps, walks, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<()> {
        let cli = Cli::try_parse_from(std::iter::once("netcover").chain(args.iter().copied()))
            .map_err(|e| Error::Usage(e.to_string()))?;
        dispatch(cli)
    }

    fn p(path: &Path) -> &str {
        path.to_str().unwrap()
    }

    #[test]
    fn generate_writes_graph_and_meta() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("g.txt");
        exec(&[
            "generate",
            "--model",
            "BA",
            "--n",
            "50",
            "--k",
            "4",
            "--seed",
            "3",
            "--out",
            p(&out),
        ])
        .unwrap();
        let loaded = Graph::from_edge_list(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(loaded.graph.node_count(), 50);
        let meta = std::fs::read_to_string(dir.path().join("g.txt.meta")).unwrap();
        assert!(meta.contains("model=BA") && meta.contains("giant_component_size=50"));
    }

    #[test]
    fn bad_arguments_are_usage_errors() {
        assert_eq!(
            exec(&["generate", "--model", "XX", "--n", "5", "--k", "2"])
                .unwrap_err()
                .exit_code(),
            1
        );
        assert_eq!(exec(&["frobnicate"]).unwrap_err().exit_code(), 1);
        let e = exec(&["generate", "--model", "ER", "--n", "50", "--k", "4", "--beta", "0.2"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let dir = tempfile::tempdir().unwrap();
        let e = exec(&[
            "pca",
            "--features",
            p(&dir.path().join("missing.csv")),
            "--out",
            p(dir.path()),
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn generation_failures_exit_with_two() {
        let e = exec(&["generate", "--model", "WAX", "--n", "30", "--k", "28", "--beta", "0.01"]).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
    }

    #[test]
    fn walk_and_oracle_reject_bad_options() {
        let dir = tempfile::tempdir().unwrap();
        let graph = dir.path().join("tri.txt");
        std::fs::write(&graph, "0 1\n1 2\n0 2\n").unwrap();
        let e = exec(&["oracle", "--graph", p(&graph), "--dynamics", "TSAW", "--steps", "5"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = exec(&[
            "walk",
            "--graph",
            p(&graph),
            "--dynamics",
            "RW",
            "--lambda",
            "1",
            "--steps",
            "3",
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn run_then_refit_and_replot() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.cfg");
        std::fs::write(
            &cfg,
            "models = ER, WAX\nns = 80\nks = 4\nsteps = 300\nnetworks_per_config = 1\nwalks_per_network = 3\n",
        )
        .unwrap();
        let out = dir.path().join("res");
        exec(&[
            "run",
            "--config",
            p(&cfg),
            "--seed",
            "4",
            "--workers",
            "2",
            "--out",
            p(&out),
            "--thin",
            "50",
        ])
        .unwrap();
        let refit = dir.path().join("refit");
        exec(&["pca", "--features", p(&out.join("features.csv")), "--out", p(&refit)]).unwrap();
        // the refit sees features rounded to 12 digits
        let (a, b) = (
            Table::read(&out.join("pca.csv")).unwrap(),
            Table::read(&refit.join("pca.csv")).unwrap(),
        );
        assert_eq!(a.rows.len(), 8);
        assert_eq!(a.rows.len(), b.rows.len());
        for i in 0..a.rows.len() {
            for c in [4, 5] {
                assert!((a.number(i, c).unwrap() - b.number(i, c).unwrap()).abs() < 1e-8);
            }
        }
        let figs = dir.path().join("figs");
        exec(&["plot", "--out", p(&figs), "--input", p(&out)]).unwrap();
        assert!(figs.join("pca_n80.svg").exists());
        let curves = Table::read(&out.join("curves.csv")).unwrap();
        // 2 models x 4 dynamics x (steps 0, 50, ..., 300)
        assert_eq!(curves.rows.len(), 8 * 7);
    }
}
