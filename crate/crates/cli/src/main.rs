use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use fundsim_cli::config::{resolve, BoundArg, OutputFormat, Overrides, RunConfig, Threads};
use fundsim_cli::service::{self, AppState, ServiceConfig};
use fundsim_cli::CliError;
use fundsim_core::distributions::closed_form_stats;
use fundsim_core::experiments::{run_sweep, to_csv_string, to_json_string, PRESETS};
use fundsim_core::PowerLawParams;
use log::{info, warn};

const LOG_ENV: &str = "FUNDSIM_LOG";

#[derive(Parser)]
#[command(name = "fundsim", version, about = "Monte Carlo simulation of power-law venture fund returns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form statistics of a raw power law as JSON.
    Stats {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "xmin")]
        x_min: f64,
        /// Moment order.
        #[arg(long, default_value_t = service::DEFAULT_MOMENT_ORDER)]
        k: u32,
    },
    /// Run a parameter sweep and write its metrics table.
    Simulate(SimulateArgs),
    /// List the built-in experiment presets.
    Presets,
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads, or "auto".
    #[arg(long)]
    threads: Option<Threads>,
    /// World power-law exponent.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "xmin")]
    x_min: Option<f64>,
    /// ROI cap, or "none".
    #[arg(long)]
    bound: Option<BoundArg>,
    #[arg(long)]
    n_funds: Option<usize>,
    #[arg(long)]
    n_replicates: Option<usize>,
    #[arg(long)]
    pool_size: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "FUNDSIM_BIND", default_value = service::DEFAULT_BIND)]
    bind: String,
    /// Largest grid (in grid points) a request may ask for.
    #[arg(long, env = "FUNDSIM_MAX_CELLS", default_value_t = service::DEFAULT_MAX_CELLS)]
    max_cells: usize,
    /// Sweeps allowed to run at once; further requests get 503.
    #[arg(long, env = "FUNDSIM_MAX_CONCURRENT", default_value_t = service::DEFAULT_MAX_CONCURRENT)]
    max_concurrent: usize,
    /// Per-request time budget in seconds.
    #[arg(long, default_value_t = service::DEFAULT_TIME_BUDGET.as_secs())]
    timeout_secs: u64,
    /// Worker threads for the simulations, or "auto".
    #[arg(long, default_value = "auto")]
    threads: Threads,
}

fn init_logging(fallback: &str) {
    let filters = std::env::var(LOG_ENV).unwrap_or_else(|_| fallback.to_string());
    env_logger::Builder::new().parse_filters(&filters).init();
}

fn set_threads(threads: Threads) -> Result<(), CliError> {
    if let Some(n) = threads.count() {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("cannot start {n} worker threads: {e}")))?;
    }
    Ok(())
}

/// Writes to standard output; a reader that went away early is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Runtime(e.to_string())),
        _ => Ok(()),
    }
}

fn cmd_stats(alpha: f64, x_min: f64, k: u32) -> Result<(), CliError> {
    let params = PowerLawParams::new(alpha, x_min).map_err(|e| CliError::Config(e.to_string()))?;
    let json = serde_json::to_string_pretty(&closed_form_stats(params, k))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    emit(&(json + "\n"))
}

fn cmd_presets() -> Result<(), CliError> {
    let listing: String = PRESETS
        .iter()
        .map(|(name, description)| format!("{name:<24} {description}\n"))
        .collect();
    emit(&listing)
}

/// Writes next to `path` first and renames into place.
fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?),
        None => None,
    };
    let overrides = Overrides {
        preset: args.preset,
        seed: args.seed,
        alpha: args.alpha,
        x_min: args.x_min,
        bound: args.bound,
        n_funds: args.n_funds,
        n_replicates: args.n_replicates,
        pool_size: args.pool_size,
        out: args.out,
        format: args.format,
        threads: args.threads,
    };
    let config: RunConfig = resolve(text.as_deref(), &overrides)?;
    init_logging(config.log_level.as_deref().unwrap_or("warn"));
    set_threads(config.threads)?;

    info!("running {} grid points", config.plan.grid_size());
    let result = run_sweep(&config.plan).map_err(|e| CliError::Runtime(e.to_string()))?;
    for row in result.failed_rows() {
        let k = &row.key;
        warn!(
            "grid point N={} bound={:?} r={} failed: {}",
            k.portfolio_size,
            k.bound,
            k.reserve_fraction,
            row.error.as_deref().unwrap_or_default()
        );
    }
    let failed = result.failed_rows().count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} grid points failed; see the error rows", result.rows.len());
    }

    let body = match config.format() {
        OutputFormat::Csv => to_csv_string(&result),
        OutputFormat::Json => to_json_string(&result).map(|s| s + "\n"),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    match &config.output.path {
        Some(path) => write_atomically(path, body.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => emit(&body)?,
    }
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<(), CliError> {
    init_logging("info");
    if args.max_concurrent == 0 {
        return Err(CliError::Config("max-concurrent must be >= 1".into()));
    }
    set_threads(args.threads)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
    let listener = runtime
        .block_on(tokio::net::TcpListener::bind(&args.bind))
        .map_err(|e| CliError::Runtime(format!("cannot bind {}: {e}", args.bind)))?;
    let addr = listener
        .local_addr()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let state = AppState::new(ServiceConfig {
        max_cells: args.max_cells,
        max_concurrent: args.max_concurrent,
        time_budget: Duration::from_secs(args.timeout_secs),
        ..ServiceConfig::default()
    });
    println!("fundsim service listening on http://{addr}");
    let _ = std::io::stdout().flush();
    runtime
        .block_on(service::serve(listener, state, service::shutdown_signal()))
        .map_err(|e| CliError::Runtime(format!("server error: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Stats { alpha, x_min, k } => cmd_stats(alpha, x_min, k),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Presets => cmd_presets(),
        Command::Serve(args) => cmd_serve(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
