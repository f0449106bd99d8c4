//! `vsem`: generate datasets, run experiments, inspect snapshots, teach from
//! the terminal, and serve the HTTP teaching API.
//!
//! Exit status is 0 on success, 2 for usage and configuration errors, and 1
//! for failures at run time. `VSEM_LOG` sets the log filter (default `warn`).

mod teach;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use vsem::{generate_synthetic, snapshot, Dataset, Experiment, RunConfig, SyntheticConfig};

#[derive(Parser)]
#[command(
    name = "vsem",
    version,
    about = "Incremental genus/differentia learning over embedded video encounters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic labeled dataset.
    Generate(GenerateArgs),
    /// Run the simulated-supervision experiment and write one CSV per alpha.
    Run(RunArgs),
    /// Print the hierarchy stored in a memory snapshot.
    Inspect(InspectArgs),
    /// Teach a memory interactively, answering questions on the terminal.
    Teach(teach::TeachArgs),
    /// Serve the HTTP teaching API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 5)]
    genera: usize,
    #[arg(long, default_value_t = 2)]
    instances: usize,
    /// Sequences per instance showing the discriminative view.
    #[arg(long, default_value_t = 5)]
    with_diff: usize,
    /// Sequences per instance without it.
    #[arg(long, default_value_t = 5)]
    without_diff: usize,
    #[arg(long, default_value_t = 180)]
    frames: usize,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 0.5)]
    spread: f64,
    #[arg(long, default_value_t = 5.0)]
    offset: f64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Dataset manifest.
    #[arg(long)]
    dataset: PathBuf,
    /// Supervision probability; repeat for a sweep [default: 1.0 0.3 0.2 0.1].
    #[arg(long)]
    alpha: Vec<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    /// Leading iterations that are always supervised.
    #[arg(long)]
    bootstrap: Option<u64>,
    /// Trailing window of the accuracy curves, in iterations.
    #[arg(long)]
    smoothing: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// JSON file with any of the fields above (`alphas` for the sweep);
    /// flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    alphas: Option<Vec<f64>>,
    runs: Option<usize>,
    window: Option<usize>,
    stride: Option<usize>,
    bootstrap: Option<u64>,
    smoothing: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
}

#[derive(Args)]
struct InspectArgs {
    snapshot: PathBuf,
    /// Print the hierarchy as JSON instead of a tree.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Manifest of a dataset offered to sessions that do not name one.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

fn generate(a: GenerateArgs) -> vsem::Result<()> {
    let config = SyntheticConfig {
        num_genera: a.genera,
        instances_per_genus: a.instances,
        sequences_with_differentia: a.with_diff,
        sequences_without_differentia: a.without_diff,
        frames_per_sequence: a.frames,
        dim: a.dim,
        genus_spread: a.spread,
        differentia_offset: a.offset,
        noise: a.noise,
        seed: a.seed,
    };
    let data = generate_synthetic(&config)?;
    let manifest = data.write(&a.out)?;
    println!("{}", manifest.display());
    Ok(())
}

fn run(a: RunArgs) -> vsem::Result<()> {
    let file: RunFile = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| vsem::Error::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| vsem::Error::InvalidArgument(format!("config {}: {e}", path.display())))?
        }
        None => RunFile::default(),
    };
    let d = RunConfig::default();
    let alphas = if a.alpha.is_empty() {
        file.alphas.unwrap_or_else(|| vec![1.0, 0.3, 0.2, 0.1])
    } else {
        a.alpha
    };
    if alphas.is_empty() {
        return Err(vsem::Error::InvalidArgument("no alpha values given".into()));
    }
    let config = RunConfig {
        alpha: alphas[0],
        window: a.window.or(file.window).unwrap_or(d.window),
        stride: a.stride.or(file.stride).unwrap_or(d.stride),
        bootstrap: a.bootstrap.or(file.bootstrap).unwrap_or(d.bootstrap),
        runs: a.runs.or(file.runs).unwrap_or(d.runs),
        smoothing: a.smoothing.or(file.smoothing).unwrap_or(d.smoothing),
        seed: a.seed.or(file.seed).unwrap_or(d.seed),
        jobs: a.jobs.or(file.jobs),
    };
    for alpha in &alphas {
        RunConfig {
            alpha: *alpha,
            ..config.clone()
        }
        .validate()?;
    }

    let data = Dataset::load(&a.dataset)?;
    let base = Experiment::new(&data, config)?;
    for alpha in alphas {
        let curves = base.with_alpha(alpha)?.run()?;
        let path = curves.save_csv(&a.out_dir)?;
        let q = curves.final_quartile();
        println!(
            "alpha {alpha}: final-quarter genus {:.3}, differentia {:.3} -> {}",
            q.genus,
            q.differentia,
            path.display()
        );
    }
    Ok(())
}

fn inspect(a: InspectArgs) -> vsem::Result<()> {
    let memory = snapshot::load(&a.snapshot)?;
    let view = vsem::export_hierarchy(&memory, memory.theta())?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&view).expect("hierarchy serializes"));
    } else {
        print!("{}", view.render_tree());
    }
    Ok(())
}

fn serve(a: ServeArgs) -> vsem::Result<()> {
    let dataset = a.dataset.map(Dataset::load).transpose()?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| vsem::Error::io("tokio runtime", e))?;
    runtime
        .block_on(vsem_service::serve(a.addr, vsem_service::AppState::new(dataset)))
        .map_err(|e| vsem::Error::io(a.addr.to_string(), e))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_env("VSEM_LOG").unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Inspect(a) => inspect(a),
        Command::Teach(a) => teach::teach(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
