//! Executes resolved configs: dispatches to the protocol or device
//! operations, assembles reports, and writes artifacts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use holeburn::device::{decoherence_budget, flux_quantum, uniform_step_budget};
use holeburn::fock::FockVector;
use holeburn::protocol::{prep_fock_strategy1, prep_fock_strategy2, run_schedule, Schedule};
use holeburn::{CouplingParams, Error as CoreError, ProtocolResult, QubitOutcome};

use crate::config::{
    resolve, sweep_grid, sweep_point_config, ConfigError, ExperimentConfig, Mode, Resolved,
};
use crate::report::{
    emit_distribution, emit_sweep_csv, units_meta, write_report, BudgetReport, ConventionsMeta,
    DeviceReport, RunReport, StepReport, NOMINAL_HOLE_TIME_NS,
};

/// Anything that can stop a run, tagged with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Invalid configuration (exit 2).
    Config(String),
    /// The requested post-selection chain is impossible (exit 3).
    Branch(String),
    /// Schedule exceeds the coherence budget in strict mode (exit 4).
    Budget(String),
    /// Filesystem trouble (exit 1).
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(_) => 1,
            RunError::Config(_) => 2,
            RunError::Branch(_) => 3,
            RunError::Budget(_) => 4,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Branch(msg) => write!(f, "impossible branch: {msg}"),
            RunError::Budget(msg) => write!(f, "budget violation: {msg}"),
            RunError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

fn core(e: CoreError) -> RunError {
    match e {
        CoreError::EmptyBranch { .. } => RunError::Branch(e.to_string()),
        other => RunError::Config(other.to_string()),
    }
}

/// Compute a single run's report without touching the filesystem.
pub fn run_single(resolved: &Resolved) -> Result<RunReport, RunError> {
    let mut report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        mode: resolved.mode.to_string(),
        config: resolved.echo.clone(),
        units: units_meta(resolved.beta_radps, &resolved.beta_source),
        conventions: ConventionsMeta::default(),
        schedule: Vec::new(),
        step_probs: Vec::new(),
        success_prob: None,
        fidelity: None,
        distribution: None,
        budget: None,
        device: None,
        checksum: String::new(),
        generated_unix_ms: 0,
    };

    if let Some(dev) = &resolved.device {
        let scale = dev.model.omega0.abs().max(f64::MIN_POSITIVE);
        report.device = Some(DeviceReport {
            lambda0_radps: dev.model.lambda0,
            beta_radps: dev.model.beta(),
            beta_cyclic_hz: dev.model.beta() / (2.0 * std::f64::consts::PI),
            omega0_radps: dev.model.omega0,
            omega_radps: dev.params.omega,
            resonant: (dev.params.omega - dev.model.omega0).abs() / scale <= 1e-3,
            omega_defaulted_to_resonance: dev.omega_defaulted,
            n1: dev.model.n1,
            ec_radps: dev.model.ec,
            small_angle: dev.model.small_angle,
            small_angle_ok: dev.model.small_angle_ok(),
            flux_quantum_wb: flux_quantum(),
        });
    }

    if resolved.mode == Mode::Device {
        return Ok(report.seal());
    }

    let params = CouplingParams::new(resolved.beta_radps).map_err(core)?;
    let (schedule, result) = match resolved.mode {
        Mode::Burn => {
            let initial = FockVector::coherent(resolved.alpha, resolved.tail_tol).map_err(core)?;
            for &n in &resolved.targets {
                if n >= initial.dim() {
                    return Err(RunError::Config(format!(
                        "target {n} lies outside the truncated basis of {} levels",
                        initial.dim()
                    )));
                }
            }
            let schedule = Schedule::hole_burning(&resolved.targets, &params).map_err(core)?;
            let result = run_schedule(&initial, &schedule, &params, None).map_err(core)?;
            (schedule, result)
        }
        Mode::Fock1 => prep_fock_strategy1(
            resolved.fock_n,
            resolved.alpha,
            &params,
            resolved.search_depth,
            resolved.tail_tol,
        )
        .map_err(core)?,
        Mode::Fock2 => prep_fock_strategy2(
            resolved.fock_n,
            resolved.alpha,
            &params,
            resolved.search_depth,
            resolved.tail_tol,
        )
        .map_err(core)?,
        Mode::Device | Mode::Sweep => unreachable!("handled above / by run_sweep"),
    };

    report.budget = Some(budget_report(resolved, &schedule)?);
    report.schedule = schedule
        .steps()
        .iter()
        .map(|s| StepReport {
            tau: s.tau,
            target_n: s.target_n,
            outcome: match s.outcome {
                QubitOutcome::G => 'G',
                QubitOutcome::E => 'E',
            },
        })
        .collect();
    fill_dynamics(&mut report, &result);
    Ok(report.seal())
}

fn fill_dynamics(report: &mut RunReport, result: &ProtocolResult) {
    report.step_probs = result.step_probs.clone();
    report.success_prob = Some(result.success_prob);
    report.fidelity = result.fidelity;
    report.distribution = Some(result.distribution.probs().to_vec());
}

fn budget_report(resolved: &Resolved, schedule: &Schedule) -> Result<BudgetReport, RunError> {
    let taus = schedule.taus();
    let (feasible, margin) =
        decoherence_budget(&taus, resolved.qubit_coherence_s, resolved.nr_coherence_s)
            .map_err(core)?;
    let within = feasible == schedule.len();
    if resolved.strict_budget && !within {
        return Err(RunError::Budget(format!(
            "only {feasible} of {} steps fit inside the coherence window",
            schedule.len()
        )));
    }
    Ok(BudgetReport {
        qubit_coherence_s: resolved.qubit_coherence_s,
        nr_coherence_s: resolved.nr_coherence_s,
        total_duration_s: schedule.total_duration(),
        scheduled_steps: schedule.len(),
        feasible_steps: feasible,
        margin,
        within_budget: within,
        computed_step_times_ns: taus.iter().map(|t| t * 1e9).collect(),
        nominal_hole_time_ns: NOMINAL_HOLE_TIME_NS,
        nominal_step_capacity: uniform_step_budget(
            NOMINAL_HOLE_TIME_NS * 1e-9,
            resolved.qubit_coherence_s,
        ),
    })
}

/// Resolve, run, and write `report.json` (plus `distribution.csv` for
/// dynamics modes) under the configured output directory.
pub fn run_to_dir(config: &ExperimentConfig) -> Result<(RunReport, PathBuf), RunError> {
    let resolved = resolve(config)?;
    if resolved.mode == Mode::Sweep {
        return Err(RunError::Config(
            "sweep configs go through run_sweep".into(),
        ));
    }
    let report = run_single(&resolved)?;
    write_run_artifacts(&report, &resolved.out_dir)?;
    Ok((report, resolved.out_dir))
}

pub fn write_run_artifacts(report: &RunReport, out_dir: &Path) -> Result<(), RunError> {
    write_report(report, &out_dir.join("report.json"))?;
    if let Some(probs) = &report.distribution {
        emit_distribution(probs, &out_dir.join("distribution.csv"))?;
    }
    Ok(())
}

/// Run every grid point of a sweep, each as an independent single run in
/// `out_dir/point_NNN/`, then write the aggregate CSV.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RunReport>, RunError> {
    let resolved = resolve(config)?;
    let sweep = match (&resolved.sweep, resolved.mode) {
        (Some(s), Mode::Sweep) => s.clone(),
        _ => return Err(RunError::Config("not a sweep config".into())),
    };
    let grid = sweep_grid(&sweep);
    let workers = sweep.workers.unwrap_or(1).clamp(1, grid.len().max(1));

    // Each point is an isolated single run writing to its own directory.
    let jobs: Vec<(usize, f64, ExperimentConfig, PathBuf)> = grid
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut point = sweep_point_config(config, value);
            let dir = resolved.out_dir.join(format!("point_{i:03}"));
            point.out_dir = Some(dir.clone());
            (i, value, point, dir)
        })
        .collect();

    let results: Mutex<Vec<Option<Result<RunReport, RunError>>>> =
        Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (_, _, point, _) = &jobs[i];
                let outcome = run_to_dir(point).map(|(report, _)| report);
                results.lock().expect("no poisoned workers")[i] = Some(outcome);
            });
        }
    });

    let mut reports = Vec::with_capacity(jobs.len());
    let mut rows = Vec::with_capacity(jobs.len());
    for (slot, (_, value, _, _)) in results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .zip(&jobs)
    {
        let report = slot.expect("every job ran")?;
        rows.push((*value, report.success_prob, report.fidelity));
        reports.push(report);
    }
    emit_sweep_csv(
        &sweep.param.to_string(),
        &rows,
        &resolved.out_dir.join("sweep.csv"),
    )?;
    Ok(reports)
}
