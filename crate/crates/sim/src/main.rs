use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use poltrack_core::constellation::{Constellation, Format};
use poltrack_sim::config::{Algorithm, ConfigOverrides, ExperimentConfig, Metric};
use poltrack_sim::experiments::{self, Axis};
use poltrack_sim::{output, SimError};

#[derive(Parser, Debug)]
#[command(name = "poltrack", version, about = "Joint phase and polarization tracking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// PS-QPSK, PM-QPSK, PM-16-QAM, PM-64-QAM or PM-256-QAM.
    #[arg(long)]
    format: Option<String>,
    #[arg(long, value_enum)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_enum)]
    metric: Option<Metric>,
    /// Absolute dB, or `anchor`, `anchor+X`, `anchor-X` relative to the AWGN
    /// SER 1e-3 point.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    delta_nu_hz: Option<f64>,
    #[arg(long)]
    delta_p_hz: Option<f64>,
    #[arg(long)]
    baud: Option<f64>,
    /// Symbols per trial.
    #[arg(long)]
    symbols: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// SOP update every this many symbols.
    #[arg(long)]
    sop_period: Option<u64>,
    /// Start from the true inverse channel instead of the identity.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    known_initial_channel: Option<bool>,
    /// Keep the initial estimate (zero step sizes).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    freeze_tracker: Option<bool>,
    /// Leading symbols excluded from error counts.
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long)]
    mma_stage_len: Option<u64>,
    /// Maximum symbols simulated by this command.
    #[arg(long)]
    budget: Option<f64>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cumulative true and estimated phase/SOP of one trial.
    TrackDemo {
        #[command(flatten)]
        common: Common,
        /// Trace row interval in symbols.
        #[arg(long, default_value_t = 10)]
        every: u64,
    },
    /// SER versus polarization linewidth (Δp·T grid).
    SweepPol {
        #[command(flatten)]
        common: Common,
    },
    /// SER versus laser linewidth (Δν·T grid).
    SweepLw {
        #[command(flatten)]
        common: Common,
    },
    /// SER versus SNR (dB grid).
    SweepSnr {
        #[command(flatten)]
        common: Common,
    },
    /// Windowed SER after a blind start, averaged over trials.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Largest linewidth keeping SER at 1e-3 at the configured SNR.
    #[command(name = "tolerance-1db")]
    Tolerance1db {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
    },
    /// Counted operations of the Jones tracker step.
    OpAudit {
        #[arg(long, default_value = "PM-16-QAM")]
        format: String,
        /// Comma-separated SOP update periods.
        #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
        periods: Vec<u64>,
        #[arg(long, default_value_t = 4096)]
        symbols: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Constellation points and Stokes images.
    DumpConstellation {
        #[arg(long, default_value = "PM-16-QAM")]
        format: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

impl Common {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            format: self.format.clone(),
            algorithm: self.algorithm,
            metric: self.metric,
            snr_db: self.snr_db.clone(),
            delta_nu_hz: self.delta_nu_hz,
            delta_p_hz: self.delta_p_hz,
            baud: self.baud,
            symbols: self.symbols,
            trials: self.trials,
            seed: self.seed,
            sop_period: self.sop_period,
            known_initial_channel: self.known_initial_channel,
            freeze_tracker: self.freeze_tracker,
            warmup: self.warmup,
            mma_stage_len: self.mma_stage_len,
            budget: self.budget,
            grid: self.grid.clone(),
        }
    }

    /// Command defaults, then the file, then flags.
    fn resolve(&self, defaults: ConfigOverrides) -> Result<ExperimentConfig, SimError> {
        let file = match &self.config {
            Some(p) => ConfigOverrides::from_file(p)?,
            None => ConfigOverrides::default(),
        };
        ExperimentConfig::resolve(defaults.overlay(file).overlay(self.overrides()))
    }
}

fn parse_format(s: &str) -> Result<Format, SimError> {
    s.parse().map_err(|e: poltrack_core::Error| SimError::Config(e.to_string()))
}

fn emit(run: &RunArgs, bytes: &[u8]) -> Result<(), SimError> {
    match &run.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn sweep_csv(common: &Common, axis: Axis) -> Result<Vec<u8>, SimError> {
    let cfg = common.resolve(ConfigOverrides::default())?;
    let points = experiments::sweep(&cfg, axis)?;
    let mut buf = Vec::new();
    output::write_sweep(&mut buf, &points)?;
    Ok(buf)
}

fn execute(command: &Command) -> Result<Vec<u8>, SimError> {
    let mut buf = Vec::new();
    match command {
        Command::TrackDemo { common, every } => {
            let defaults = ConfigOverrides {
                delta_nu_hz: Some(1e6),
                delta_p_hz: Some(1e3),
                symbols: Some(100_000),
                trials: Some(1),
                ..Default::default()
            };
            let cfg = common.resolve(defaults)?;
            let (trace, outcome) = experiments::track_demo(&cfg, *every)?;
            eprintln!(
                "track-demo: {} errors in {} symbols, cycle slip: {}",
                outcome.errors, outcome.counted, outcome.cycle_slip
            );
            output::write_trace(&mut buf, &trace)?;
        }
        Command::SweepPol { common } => return sweep_csv(common, Axis::Pol),
        Command::SweepLw { common } => return sweep_csv(common, Axis::Laser),
        Command::SweepSnr { common } => return sweep_csv(common, Axis::Snr),
        Command::Converge { common } => {
            let defaults = ConfigOverrides {
                known_initial_channel: Some(false),
                warmup: Some(0),
                symbols: Some(10_000),
                trials: Some(1000),
                ..Default::default()
            };
            let cfg = common.resolve(defaults)?;
            output::write_convergence(&mut buf, &experiments::convergence(&cfg)?)?;
        }
        Command::Tolerance1db { common, axis } => {
            let cfg = common.resolve(ConfigOverrides::default())?;
            let t = experiments::find_1db_tolerance(&cfg, *axis)?;
            output::write_tolerance(&mut buf, &cfg, &t)?;
        }
        Command::OpAudit { format, periods, symbols, seed, .. } => {
            let rows = experiments::op_audit(parse_format(format)?, periods, *symbols, *seed)?;
            output::write_audit(&mut buf, &rows)?;
        }
        Command::DumpConstellation { format, .. } => {
            output::write_constellation(&mut buf, &Constellation::new(parse_format(format)?))?;
        }
    }
    Ok(buf)
}

fn run_args(command: &Command) -> &RunArgs {
    match command {
        Command::TrackDemo { common, .. }
        | Command::SweepPol { common }
        | Command::SweepLw { common }
        | Command::SweepSnr { common }
        | Command::Converge { common }
        | Command::Tolerance1db { common, .. } => &common.run,
        Command::OpAudit { run, .. } | Command::DumpConstellation { run, .. } => run,
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    let args = run_args(&cli.command);
    let bytes = match args.threads {
        Some(0) => return Err(SimError::Config("threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Config(format!("thread pool: {e}")))?
            .install(|| execute(&cli.command))?,
        None => execute(&cli.command)?,
    };
    emit(args, &bytes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
