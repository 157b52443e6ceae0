use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use holeburn_cli::config::{ExperimentConfig, Mode, SweepConfig, SweepParam};
use holeburn_cli::runner::{run_sweep, run_to_dir, RunError};

/// Conditional hole burning and Fock-state preparation in a
/// qubit-coupled resonator: run schedules, inspect device couplings, and
/// sweep parameters. Each run writes `report.json` (and
/// `distribution.csv` for dynamics modes) to the output directory.
#[derive(Parser)]
#[command(name = "holeburn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Burn holes at chosen levels of a coherent state's distribution.
    Burn(BurnArgs),
    /// Prepare |N> with one excited detection per quantum (N <= 5).
    Fock1(FockArgs),
    /// Prepare |N> with ceil(N/2) excited detections.
    Fock2(FockArgs),
    /// Reduce physical device parameters to the effective coupling.
    Device(DeviceArgs),
    /// Run one of the above over a grid of a numeric parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coherent amplitude magnitude.
    #[arg(long)]
    alpha: Option<f64>,
    /// Coherent amplitude phase, radians.
    #[arg(long)]
    alpha_phase: Option<f64>,
    /// Coupling with unit, e.g. "45MHz", "5 GHz", "1rad/s".
    #[arg(long)]
    beta: Option<String>,
    /// Truncation tail tolerance, in (0, 1e-6].
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Fail (exit 4) instead of warning when the schedule exceeds the
    /// coherence budget.
    #[arg(long)]
    strict_budget: bool,
    /// Qubit coherence time, seconds.
    #[arg(long)]
    qubit_coherence: Option<f64>,
    /// Resonator coherence time, seconds.
    #[arg(long)]
    nr_coherence: Option<f64>,
}

#[derive(Args)]
struct BurnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated hole positions, e.g. "4,1,7".
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
}

#[derive(Args)]
struct FockArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target Fock index.
    #[arg(long)]
    n: Option<usize>,
    /// Largest sine-zero order tried per round.
    #[arg(long)]
    search_depth: Option<usize>,
}

#[derive(Args)]
struct DeviceArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Copy, Clone, ValueEnum)]
enum SweepParamArg {
    Alpha,
    SearchDepth,
    TailTol,
    BetaRadps,
}

#[derive(Copy, Clone, ValueEnum)]
enum SweepModeArg {
    Burn,
    Fock1,
    Fock2,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parameter to sweep.
    #[arg(long)]
    param: Option<SweepParamArg>,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    /// Number of grid points (endpoints included).
    #[arg(long)]
    steps: Option<usize>,
    /// Mode each grid point runs in.
    #[arg(long)]
    mode: Option<SweepModeArg>,
    /// Concurrent grid points.
    #[arg(long)]
    workers: Option<usize>,
    /// Target Fock index for fock grid points.
    #[arg(long)]
    n: Option<usize>,
    /// Hole positions for burn grid points.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
    #[arg(long)]
    search_depth: Option<usize>,
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig, RunError> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn apply_common(config: &mut ExperimentConfig, common: &CommonArgs, mode: Mode) {
    config.mode = Some(mode);
    if common.out.is_some() {
        config.out_dir.clone_from(&common.out);
    }
    if common.alpha.is_some() {
        config.alpha = common.alpha;
    }
    if common.alpha_phase.is_some() {
        config.alpha_phase = common.alpha_phase;
    }
    if common.beta.is_some() {
        config.beta.clone_from(&common.beta);
    }
    if common.tail_tol.is_some() {
        config.tail_tol = common.tail_tol;
    }
    if common.strict_budget {
        config.strict_budget = Some(true);
    }
    if common.qubit_coherence.is_some() {
        config.qubit_coherence_s = common.qubit_coherence;
    }
    if common.nr_coherence.is_some() {
        config.nr_coherence_s = common.nr_coherence;
    }
}

fn build_config(command: &Command) -> Result<ExperimentConfig, RunError> {
    match command {
        Command::Burn(args) => {
            let mut config = load_config(&args.common.config)?;
            apply_common(&mut config, &args.common, Mode::Burn);
            if args.targets.is_some() {
                config.targets.clone_from(&args.targets);
            }
            Ok(config)
        }
        Command::Fock1(args) | Command::Fock2(args) => {
            let mode = if matches!(command, Command::Fock1(_)) {
                Mode::Fock1
            } else {
                Mode::Fock2
            };
            let mut config = load_config(&args.common.config)?;
            apply_common(&mut config, &args.common, mode);
            if args.n.is_some() {
                config.n = args.n;
            }
            if args.search_depth.is_some() {
                config.search_depth = args.search_depth;
            }
            Ok(config)
        }
        Command::Device(args) => {
            let mut config = load_config(&args.common.config)?;
            apply_common(&mut config, &args.common, Mode::Device);
            Ok(config)
        }
        Command::Sweep(args) => {
            let mut config = load_config(&args.common.config)?;
            apply_common(&mut config, &args.common, Mode::Sweep);
            if args.n.is_some() {
                config.n = args.n;
            }
            if args.targets.is_some() {
                config.targets.clone_from(&args.targets);
            }
            if args.search_depth.is_some() {
                config.search_depth = args.search_depth;
            }
            merge_sweep_flags(&mut config, args)?;
            Ok(config)
        }
    }
}

fn merge_sweep_flags(config: &mut ExperimentConfig, args: &SweepArgs) -> Result<(), RunError> {
    let param = args.param.map(|p| match p {
        SweepParamArg::Alpha => SweepParam::Alpha,
        SweepParamArg::SearchDepth => SweepParam::SearchDepth,
        SweepParamArg::TailTol => SweepParam::TailTol,
        SweepParamArg::BetaRadps => SweepParam::BetaRadps,
    });
    let mode = args.mode.map(|m| match m {
        SweepModeArg::Burn => Mode::Burn,
        SweepModeArg::Fock1 => Mode::Fock1,
        SweepModeArg::Fock2 => Mode::Fock2,
    });
    if let Some(sweep) = &mut config.sweep {
        if let Some(p) = param {
            sweep.param = p;
        }
        if let Some(v) = args.min {
            sweep.min = v;
        }
        if let Some(v) = args.max {
            sweep.max = v;
        }
        if let Some(v) = args.steps {
            sweep.steps = v;
        }
        if let Some(m) = mode {
            sweep.mode = m;
        }
        if args.workers.is_some() {
            sweep.workers = args.workers;
        }
    } else {
        let (param, min, max, steps, mode) = match (param, args.min, args.max, args.steps, mode) {
            (Some(p), Some(lo), Some(hi), Some(k), Some(m)) => (p, lo, hi, k, m),
            _ => {
                return Err(RunError::Config(
                    "sweep needs --param, --min, --max, --steps and --mode \
                         (or a sweep block in the config file)"
                        .into(),
                ))
            }
        };
        config.sweep = Some(SweepConfig {
            param,
            min,
            max,
            steps,
            mode,
            workers: args.workers,
        });
    }
    Ok(())
}

fn execute(command: &Command) -> Result<(), RunError> {
    let config = build_config(command)?;
    match command {
        Command::Sweep(_) => {
            let reports = run_sweep(&config)?;
            let out = config.out_dir.clone().unwrap_or_else(|| "out".into());
            for (i, report) in reports.iter().enumerate() {
                let mut line = format!("point {i}: ");
                summarize(report, &mut line);
                println!("{line}");
            }
            println!("sweep table: {}", out.join("sweep.csv").display());
        }
        _ => {
            let (report, out_dir) = run_to_dir(&config)?;
            let mut line = String::new();
            summarize(&report, &mut line);
            println!("{line}");
            println!("report: {}", out_dir.join("report.json").display());
        }
    }
    Ok(())
}

fn summarize(report: &holeburn_cli::report::RunReport, line: &mut String) {
    line.push_str(&format!("mode={}", report.mode));
    if let Some(p) = report.success_prob {
        line.push_str(&format!(" success_prob={p:.6e}"));
    }
    if let Some(f) = report.fidelity {
        line.push_str(&format!(" fidelity={f:.6}"));
    }
    if let Some(dev) = &report.device {
        line.push_str(&format!(
            " beta={:.4e} rad/s ({:.3} MHz cyclic) omega0={:.4e} rad/s resonant={}",
            dev.beta_radps,
            dev.beta_cyclic_hz / 1e6,
            dev.omega0_radps,
            dev.resonant
        ));
    }
    if let Some(budget) = &report.budget {
        if !budget.within_budget {
            line.push_str(&format!(
                " [budget: {}/{} steps fit]",
                budget.feasible_steps, budget.scheduled_steps
            ));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
