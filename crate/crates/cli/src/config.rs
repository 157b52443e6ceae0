//! Experiment configuration: JSON document plus CLI overrides, resolved
//! into a fully validated run description.
//!
//! Frequencies are accepted with an explicit unit (`Hz`, `kHz`, `MHz`,
//! `GHz`, `rad/s`). Hz-family units are cyclic and convert as
//! `omega = 2*pi*f`; `rad/s` passes through. All internal frequencies are
//! angular.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use holeburn::device::{effective_model, flux_quantum, DeviceParams, EffectiveModel};

/// Default coherence time of the qubit, seconds.
pub const DEFAULT_QUBIT_COHERENCE_S: f64 = 500e-9;

/// Default coherence time of the resonator, seconds.
pub const DEFAULT_NR_COHERENCE_S: f64 = 160e-6;

const DEFAULT_SEARCH_DEPTH: usize = 8;
const DEFAULT_FOCK_ALPHA: f64 = 0.6;
const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Burn,
    Fock1,
    Fock2,
    Device,
    Sweep,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Burn => "burn",
            Mode::Fock1 => "fock1",
            Mode::Fock2 => "fock2",
            Mode::Device => "device",
            Mode::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

/// Numeric parameter a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    SearchDepth,
    TailTol,
    BetaRadps,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepParam::Alpha => "alpha",
            SweepParam::SearchDepth => "search_depth",
            SweepParam::TailTol => "tail_tol",
            SweepParam::BetaRadps => "beta_radps",
        };
        f.write_str(s)
    }
}

/// Raw configuration document. Every field is optional here; presence
/// requirements depend on the mode and are enforced by [`resolve`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Coherent amplitude magnitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Optional phase of the coherent amplitude, radians.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_phase: Option<f64>,
    /// Coupling as a value with unit, e.g. "45 MHz" or "1 rad/s".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    /// Hole positions for `burn` mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    /// Target Fock index for the `fock*` modes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_coherence_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr_coherence_s: Option<f64>,
    /// Fail runs that exceed the coherence budget instead of warning.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_budget: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// Physical device block; field suffixes spell the unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    /// Josephson energy per junction, frequency with unit.
    pub ej0: String,
    pub c1_f: f64,
    pub cj0_f: f64,
    pub v1_v: f64,
    /// Tuning flux in units of the flux quantum.
    pub phi_x_phi0: f64,
    /// Equilibrium flux in units of the flux quantum.
    pub phi_b_phi0: f64,
    pub b_t: f64,
    pub ell_m: f64,
    pub x0_m: f64,
    /// Resonator frequency with unit; defaults to the computed qubit
    /// splitting (resonance).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// Mode each grid point runs in (`burn`, `fock1`, `fock2`).
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// A validation failure; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Parse a frequency like "45 MHz" or "2.827e8 rad/s" into rad/s.
pub fn parse_frequency(input: &str) -> Result<f64, ConfigError> {
    let trimmed = input.trim();
    let units: [(&str, f64); 5] = [
        ("rad/s", 1.0),
        ("ghz", 2.0 * std::f64::consts::PI * 1e9),
        ("mhz", 2.0 * std::f64::consts::PI * 1e6),
        ("khz", 2.0 * std::f64::consts::PI * 1e3),
        ("hz", 2.0 * std::f64::consts::PI),
    ];
    let lower = trimmed.to_ascii_lowercase();
    for (suffix, factor) in units {
        if let Some(number) = lower.strip_suffix(suffix) {
            let value: f64 = number
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("bad frequency value in {input:?}")))?;
            if !value.is_finite() || value <= 0.0 {
                return err(format!("frequency must be positive, got {input:?}"));
            }
            return Ok(value * factor);
        }
    }
    err(format!(
        "frequency {input:?} needs a unit: Hz, kHz, MHz, GHz or rad/s"
    ))
}

/// Where the resolved coupling came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    /// Given directly; the original string is kept for the report.
    Direct { input: String },
    /// Derived from the device block as `|lambda0|`.
    Device,
}

/// Device block converted to SI with the effective model attached.
#[derive(Debug, Clone)]
pub struct ResolvedDevice {
    pub params: DeviceParams,
    pub model: EffectiveModel,
    /// True when the resonator frequency was defaulted to resonance.
    pub omega_defaulted: bool,
}

/// A validated, fully defaulted run description.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub mode: Mode,
    pub alpha: Complex64,
    pub beta_radps: f64,
    pub beta_source: BetaSource,
    pub targets: Vec<usize>,
    pub fock_n: usize,
    pub search_depth: usize,
    pub tail_tol: f64,
    pub qubit_coherence_s: f64,
    pub nr_coherence_s: f64,
    pub strict_budget: bool,
    pub out_dir: PathBuf,
    pub device: Option<ResolvedDevice>,
    pub sweep: Option<SweepConfig>,
    /// The normalized raw document, echoed into reports.
    pub echo: ExperimentConfig,
}

/// Fill defaults, enforce mode-specific requirements, and convert units.
pub fn resolve(config: &ExperimentConfig) -> Result<Resolved, ConfigError> {
    let mode = match config.mode {
        Some(m) => m,
        None => return err("mode is required (burn, fock1, fock2, device, sweep)"),
    };

    let needs_dynamics = |m: Mode| matches!(m, Mode::Burn | Mode::Fock1 | Mode::Fock2);

    // The sweep's grid points run in the inner mode.
    let dynamic_mode = match (mode, &config.sweep) {
        (Mode::Sweep, Some(sweep)) => {
            if !needs_dynamics(sweep.mode) {
                return err("sweep.mode must be burn, fock1 or fock2");
            }
            if sweep.steps == 0 {
                return err("sweep.steps must be at least 1");
            }
            if !(sweep.min.is_finite() && sweep.max.is_finite()) || sweep.min > sweep.max {
                return err("sweep range needs finite min <= max");
            }
            if sweep.workers == Some(0) {
                return err("sweep.workers must be at least 1");
            }
            Some(sweep.mode)
        }
        (Mode::Sweep, None) => return err("sweep mode needs a sweep block"),
        (_, Some(_)) => return err("a sweep block is only valid in sweep mode"),
        (m, None) => needs_dynamics(m).then_some(m),
    };

    // Exactly one coupling source; every mode needs one.
    let device = match &config.device {
        Some(block) => Some(resolve_device(block)?),
        None => None,
    };
    if mode == Mode::Device {
        if config.beta.is_some() {
            return err("device mode derives the coupling; drop the beta field");
        }
        if device.is_none() {
            return err("device mode requires a device block");
        }
    }
    let (beta_radps, beta_source) = match (&config.beta, &device) {
        (Some(_), Some(_)) => {
            return err("give either beta or a device block, not both");
        }
        (Some(text), None) => (
            parse_frequency(text)?,
            BetaSource::Direct {
                input: text.clone(),
            },
        ),
        (None, Some(dev)) => {
            if mode != Mode::Device && !resonant(dev) {
                return err(format!(
                    "device is off resonance: omega = {:.6e} rad/s vs omega0 = {:.6e} rad/s",
                    dev.params.omega, dev.model.omega0
                ));
            }
            (dev.model.beta(), BetaSource::Device)
        }
        (None, None) => {
            return err("a coupling is required: beta or a device block");
        }
    };

    let alpha_mag = match (config.alpha, dynamic_mode) {
        (Some(a), _) => {
            if !a.is_finite() || a < 0.0 {
                return err(format!(
                    "alpha must be a finite non-negative magnitude, got {a}"
                ));
            }
            a
        }
        (None, Some(Mode::Fock1 | Mode::Fock2)) => DEFAULT_FOCK_ALPHA,
        (None, Some(Mode::Burn)) => return err("burn mode requires alpha"),
        (None, _) => 0.0,
    };
    let alpha = Complex64::from_polar(alpha_mag, config.alpha_phase.unwrap_or(0.0));

    let targets = match (dynamic_mode, &config.targets) {
        (Some(Mode::Burn), Some(t)) => t.clone(),
        (Some(Mode::Burn), None) => return err("burn mode requires targets"),
        (_, Some(_)) => return err("targets only apply to burn mode"),
        (_, None) => Vec::new(),
    };

    let fock_n = match (dynamic_mode, config.n) {
        (Some(Mode::Fock1 | Mode::Fock2), Some(n)) => n,
        (Some(Mode::Fock1 | Mode::Fock2), None) => {
            return err("fock modes require n, the target Fock index")
        }
        (_, Some(_)) => return err("n only applies to the fock modes"),
        (_, None) => 0,
    };

    let tail_tol = config.tail_tol.unwrap_or(DEFAULT_TAIL_TOL);
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return err(format!("tail_tol must lie in (0, 1e-6], got {tail_tol}"));
    }
    let search_depth = config.search_depth.unwrap_or(DEFAULT_SEARCH_DEPTH);
    if search_depth == 0 {
        return err("search_depth must be at least 1");
    }
    let qubit_coherence_s = config
        .qubit_coherence_s
        .unwrap_or(DEFAULT_QUBIT_COHERENCE_S);
    let nr_coherence_s = config.nr_coherence_s.unwrap_or(DEFAULT_NR_COHERENCE_S);
    let positive = |t: f64| t.is_finite() && t > 0.0;
    if !positive(qubit_coherence_s) || !positive(nr_coherence_s) {
        return err("coherence times must be positive");
    }

    let mut echo = config.clone();
    // The output location is not part of the experiment; identical
    // experiments must yield identical report bodies wherever they land.
    echo.out_dir = None;
    echo.alpha = Some(alpha_mag);
    echo.alpha_phase = Some(config.alpha_phase.unwrap_or(0.0));
    echo.tail_tol = Some(tail_tol);
    echo.search_depth = Some(search_depth);
    echo.qubit_coherence_s = Some(qubit_coherence_s);
    echo.nr_coherence_s = Some(nr_coherence_s);
    echo.strict_budget = Some(config.strict_budget.unwrap_or(false));

    Ok(Resolved {
        mode,
        alpha,
        beta_radps,
        beta_source,
        targets,
        fock_n,
        search_depth,
        tail_tol,
        qubit_coherence_s,
        nr_coherence_s,
        strict_budget: config.strict_budget.unwrap_or(false),
        out_dir: config
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out")),
        device,
        sweep: config.sweep.clone(),
        echo,
    })
}

fn resonant(dev: &ResolvedDevice) -> bool {
    let scale = dev.model.omega0.abs().max(f64::MIN_POSITIVE);
    (dev.params.omega - dev.model.omega0).abs() / scale <= 1e-3
}

fn resolve_device(block: &DeviceConfig) -> Result<ResolvedDevice, ConfigError> {
    let phi0 = flux_quantum();
    let ej0 = parse_frequency(&block.ej0)?;
    let mut params = DeviceParams {
        ej0,
        c1: block.c1_f,
        cj0: block.cj0_f,
        v1: block.v1_v,
        phi_x: block.phi_x_phi0 * phi0,
        phi_b: block.phi_b_phi0 * phi0,
        b_field: block.b_t,
        ell: block.ell_m,
        x0: block.x0_m,
        omega: 1.0, // replaced below
    };
    let omega_defaulted = block.omega.is_none();
    params.omega = match &block.omega {
        Some(text) => parse_frequency(text)?,
        None => {
            // Default to resonance with the computed splitting.
            let probe = effective_model(&params)
                .map_err(|e| ConfigError(format!("device block rejected: {e}")))?;
            if probe.omega0 <= 0.0 || probe.omega0.is_nan() {
                return err(format!(
                    "cannot default the resonator to resonance: omega0 = {:.6e} rad/s",
                    probe.omega0
                ));
            }
            probe.omega0
        }
    };
    let model =
        effective_model(&params).map_err(|e| ConfigError(format!("device block rejected: {e}")))?;
    if !model.small_angle_ok() {
        eprintln!(
            "warning: flux expansion parameter {:.3e} is no longer small; the linear coupling is unreliable",
            model.small_angle
        );
    }
    Ok(ResolvedDevice {
        params,
        model,
        omega_defaulted,
    })
}

/// Evenly spaced sweep grid, inclusive of both ends.
pub fn sweep_grid(sweep: &SweepConfig) -> Vec<f64> {
    if sweep.steps == 1 {
        return vec![sweep.min];
    }
    let span = sweep.max - sweep.min;
    (0..sweep.steps)
        .map(|i| sweep.min + span * i as f64 / (sweep.steps - 1) as f64)
        .collect()
}

/// The grid-point config: the base document with the swept parameter
/// overridden and the inner mode installed.
pub fn sweep_point_config(base: &ExperimentConfig, value: f64) -> ExperimentConfig {
    let sweep = base.sweep.as_ref().expect("checked by resolve");
    let mut point = base.clone();
    point.mode = Some(sweep.mode);
    point.sweep = None;
    match sweep.param {
        SweepParam::Alpha => point.alpha = Some(value),
        SweepParam::SearchDepth => point.search_depth = Some(value.round().max(1.0) as usize),
        SweepParam::TailTol => point.tail_tol = Some(value),
        SweepParam::BetaRadps => point.beta = Some(format!("{value:e} rad/s")),
    }
    point
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_units_parse() {
        let tau = 2.0 * std::f64::consts::PI;
        assert_eq!(parse_frequency("1 rad/s").unwrap(), 1.0);
        assert_eq!(parse_frequency("2.827e8rad/s").unwrap(), 2.827e8);
        assert!((parse_frequency("45 MHz").unwrap() - tau * 45e6).abs() < 1e-3);
        assert!((parse_frequency("45MHz").unwrap() - tau * 45e6).abs() < 1e-3);
        assert!((parse_frequency("5 GHz").unwrap() - tau * 5e9).abs() < 1e-1);
        assert!((parse_frequency("2 kHz").unwrap() - tau * 2e3).abs() < 1e-9);
        assert!((parse_frequency("10 Hz").unwrap() - tau * 10.0).abs() < 1e-12);
        assert!(parse_frequency("45").is_err());
        assert!(parse_frequency("-3 MHz").is_err());
        assert!(parse_frequency("fast").is_err());
    }

    #[test]
    fn burn_mode_requirements() {
        let mut config = ExperimentConfig {
            mode: Some(Mode::Burn),
            alpha: Some(2.0),
            beta: Some("1 rad/s".into()),
            targets: Some(vec![4, 1]),
            ..Default::default()
        };
        let resolved = resolve(&config).unwrap();
        assert_eq!(resolved.targets, vec![4, 1]);
        assert_eq!(resolved.beta_radps, 1.0);
        assert_eq!(resolved.tail_tol, 1e-12);

        config.targets = None;
        assert!(resolve(&config).is_err());
        config.targets = Some(vec![4]);
        config.alpha = None;
        assert!(resolve(&config).is_err());
        config.alpha = Some(2.0);
        config.beta = None;
        assert!(resolve(&config).is_err());
    }

    #[test]
    fn fock_mode_defaults_alpha() {
        let config = ExperimentConfig {
            mode: Some(Mode::Fock1),
            beta: Some("1 rad/s".into()),
            n: Some(3),
            ..Default::default()
        };
        let resolved = resolve(&config).unwrap();
        assert_eq!(resolved.alpha.re, 0.6);
        assert_eq!(resolved.search_depth, 8);
        assert_eq!(resolved.fock_n, 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"mode": "burn", "alhpa": 2.0}"#);
        assert!(err.is_err());
    }

    #[test]
    fn sweep_needs_a_block_and_sane_range() {
        let mut config = ExperimentConfig {
            mode: Some(Mode::Sweep),
            alpha: Some(0.6),
            beta: Some("1 rad/s".into()),
            n: Some(3),
            ..Default::default()
        };
        assert!(resolve(&config).is_err());
        config.sweep = Some(SweepConfig {
            param: SweepParam::Alpha,
            min: 0.2,
            max: 1.0,
            steps: 5,
            mode: Mode::Fock1,
            workers: None,
        });
        assert!(resolve(&config).is_ok());

        let sweep = config.sweep.as_mut().unwrap();
        sweep.steps = 0;
        assert!(resolve(&config).is_err());
        let sweep = config.sweep.as_mut().unwrap();
        sweep.steps = 5;
        sweep.mode = Mode::Device;
        assert!(resolve(&config).is_err());
    }

    #[test]
    fn sweep_grid_endpoints() {
        let sweep = SweepConfig {
            param: SweepParam::Alpha,
            min: 0.2,
            max: 1.0,
            steps: 5,
            mode: Mode::Fock1,
            workers: None,
        };
        let grid = sweep_grid(&sweep);
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.2);
        assert_eq!(grid[4], 1.0);

        let single = SweepConfig { steps: 1, ..sweep };
        assert_eq!(sweep_grid(&single), vec![0.2]);
    }

    #[test]
    fn beta_and_device_are_mutually_exclusive() {
        let config = ExperimentConfig {
            mode: Some(Mode::Burn),
            alpha: Some(2.0),
            beta: Some("1 rad/s".into()),
            targets: Some(vec![4]),
            device: Some(device_block()),
            ..Default::default()
        };
        assert!(resolve(&config).is_err());
    }

    fn device_block() -> DeviceConfig {
        DeviceConfig {
            ej0: "5 GHz".into(),
            c1_f: 3e-16,
            cj0_f: 1e-16,
            v1_v: 5.343e-4,
            phi_x_phi0: 0.0,
            phi_b_phi0: 0.5,
            b_t: 0.1,
            ell_m: 3e-5,
            x0_m: 5e-13,
            omega: None,
        }
    }

    #[test]
    fn device_mode_resolves_coupling_from_the_block() {
        let config = ExperimentConfig {
            mode: Some(Mode::Device),
            device: Some(device_block()),
            ..Default::default()
        };
        let resolved = resolve(&config).unwrap();
        assert_eq!(resolved.beta_source, BetaSource::Device);
        let cyclic = resolved.beta_radps / (2.0 * std::f64::consts::PI);
        assert!((cyclic - 45e6).abs() / 45e6 < 0.05);
        let dev = resolved.device.as_ref().unwrap();
        assert!(dev.omega_defaulted);
    }

    #[test]
    fn off_resonance_device_cannot_drive_dynamics() {
        let mut block = device_block();
        block.omega = Some("50 MHz".into());
        let config = ExperimentConfig {
            mode: Some(Mode::Burn),
            alpha: Some(2.0),
            targets: Some(vec![4]),
            device: Some(block),
            ..Default::default()
        };
        let err = resolve(&config).unwrap_err();
        assert!(err.0.contains("resonance"), "{err}");
    }
}
