//! Machine-readable run artifacts: one JSON report per run, one CSV
//! distribution table per dynamics run, and one aggregate CSV per sweep.
//!
//! Report bodies are deterministic: rerunning an identical config yields
//! identical bytes except for the trailing `generated_unix_ms` field,
//! which is excluded from the embedded checksum.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{BetaSource, ExperimentConfig};
use crate::runner::RunError;

/// Nominal single-hole duration quoted for feasibility estimates, ns.
/// Reported side by side with the schedule actually computed, which at
/// realistic couplings comes out an order of magnitude longer.
pub const NOMINAL_HOLE_TIME_NS: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct UnitsMeta {
    /// How frequency inputs were read.
    pub frequency_reading: &'static str,
    /// The coupling input, when one was given directly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_input: Option<String>,
    pub beta_radps: f64,
    pub beta_cyclic_hz: f64,
}

/// Index conventions the closed forms follow; recorded so the tables can
/// be reproduced without reading the source.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionsMeta {
    pub excited_sine_index: &'static str,
    pub normalization_sum_index: &'static str,
}

impl Default for ConventionsMeta {
    fn default() -> Self {
        Self {
            excited_sine_index:
                "round j multiplies a component that started at level n by sin(beta*sqrt(n+j)*tau_j)",
            normalization_sum_index:
                "closed-form denominators sum over the same running level index as the numerator",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_n: Option<usize>,
    pub outcome: char,
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetReport {
    pub qubit_coherence_s: f64,
    pub nr_coherence_s: f64,
    pub total_duration_s: f64,
    pub scheduled_steps: usize,
    pub feasible_steps: usize,
    pub margin: f64,
    pub within_budget: bool,
    /// Computed step times next to the nominal per-hole figure they are
    /// usually compared against.
    pub computed_step_times_ns: Vec<f64>,
    pub nominal_hole_time_ns: f64,
    /// Steps of a nominal-time schedule that fit the qubit coherence.
    pub nominal_step_capacity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviceReport {
    pub lambda0_radps: f64,
    pub beta_radps: f64,
    pub beta_cyclic_hz: f64,
    pub omega0_radps: f64,
    pub omega_radps: f64,
    pub resonant: bool,
    pub omega_defaulted_to_resonance: bool,
    pub n1: f64,
    pub ec_radps: f64,
    pub small_angle: f64,
    pub small_angle_ok: bool,
    pub flux_quantum_wb: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub mode: String,
    pub config: ExperimentConfig,
    pub units: UnitsMeta,
    pub conventions: ConventionsMeta,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<StepReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub step_probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceReport>,
    /// FNV-1a 64 over the serialized report with this field empty and the
    /// timestamp zeroed.
    pub checksum: String,
    pub generated_unix_ms: u64,
}

impl RunReport {
    pub(crate) fn seal(mut self) -> Self {
        self.checksum = String::new();
        self.generated_unix_ms = 0;
        let body = serde_json::to_vec(&self).expect("report serializes");
        self.checksum = format!("fnv1a64:{:016x}", fnv1a64(&body));
        self.generated_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        self
    }
}

pub fn units_meta(beta_radps: f64, source: &BetaSource) -> UnitsMeta {
    UnitsMeta {
        frequency_reading:
            "Hz-family inputs are cyclic, converted as omega = 2*pi*f; rad/s passes through",
        beta_input: match source {
            BetaSource::Direct { input } => Some(input.clone()),
            BetaSource::Device => None,
        },
        beta_radps,
        beta_cyclic_hz: beta_radps / (2.0 * std::f64::consts::PI),
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Write `content` to `path` atomically: temp file in the same directory,
/// then rename.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(content).map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)?;
    Ok(())
}

/// Serialize a report (pretty, trailing newline) and write it atomically.
pub fn write_report(report: &RunReport, path: &Path) -> Result<(), RunError> {
    let mut body = serde_json::to_vec_pretty(report)
        .map_err(|e| RunError::Io(format!("serialize report: {e}")))?;
    body.push(b'\n');
    write_atomic(path, &body)
}

/// Distribution table: header `n,p`, one row per level, probabilities with
/// 12 significant digits, `\n` line endings, `.` decimal separator.
pub fn emit_distribution(probs: &[f64], path: &Path) -> Result<(), RunError> {
    let mut out = String::from("n,p\n");
    for (n, p) in probs.iter().enumerate() {
        out.push_str(&format!("{n},{p:.11e}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Sweep aggregate: `<param>,success_prob,fidelity`, one row per point.
/// The fidelity cell is empty for modes that do not define one.
pub fn emit_sweep_csv(
    param: &str,
    rows: &[(f64, Option<f64>, Option<f64>)],
    path: &Path,
) -> Result<(), RunError> {
    let mut out = format!("{param},success_prob,fidelity\n");
    for (value, success, fidelity) in rows {
        let success = success.map(|v| format!("{v:.11e}")).unwrap_or_default();
        let fidelity = fidelity.map(|v| format!("{v:.11e}")).unwrap_or_default();
        out.push_str(&format!("{value:.11e},{success},{fidelity}\n"));
    }
    write_atomic(path, out.as_bytes())
}
