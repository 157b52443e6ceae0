//! Physical device parameters for the flux-coupled charge-qubit /
//! resonator layout, reduced to the effective model the dynamics modules
//! consume, plus coherence-time budget arithmetic.
//!
//! Every energy is held internally as an angular frequency (rad/s,
//! hbar = 1); conversion from Hz/GHz inputs belongs to the caller.

use crate::error::{Error, Result};

/// Planck constant, J s (exact SI).
pub const PLANCK: f64 = 6.62607015e-34;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Elementary charge, C (exact SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Above this value of `pi B l x0 / phi0` the linearized coupling is no
/// longer trustworthy (the sine expansion error passes ~0.2%).
pub const SMALL_ANGLE_WARN: f64 = 0.1;

/// How close `cos(pi phi_b / phi0)` must sit to zero at the working point.
pub const WORKING_POINT_TOL: f64 = 1e-6;

/// Superconducting flux quantum `h / 2e`, Wb.
pub fn flux_quantum() -> f64 {
    PLANCK / (2.0 * ELEMENTARY_CHARGE)
}

/// Raw device quantities, SI units; energies as angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    /// Josephson energy of each junction, rad/s.
    pub ej0: f64,
    /// Input capacitance, F.
    pub c1: f64,
    /// Capacitance of each Josephson junction, F.
    pub cj0: f64,
    /// Input gate voltage, V.
    pub v1: f64,
    /// Tuning flux through the side loops, Wb.
    pub phi_x: f64,
    /// Induced flux at the resonator's equilibrium position, Wb.
    pub phi_b: f64,
    /// Magnetic field threading the main loop, T.
    pub b_field: f64,
    /// Resonator length, m.
    pub ell: f64,
    /// Zero-point amplitude of the resonator, m.
    pub x0: f64,
    /// Resonator frequency, rad/s.
    pub omega: f64,
}

impl DeviceParams {
    /// Sign constraints: everything positive except the fluxes.
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("ej0", self.ej0),
            ("c1", self.c1),
            ("cj0", self.cj0),
            ("v1", self.v1),
            ("b_field", self.b_field),
            ("ell", self.ell),
            ("x0", self.x0),
            ("omega", self.omega),
        ];
        for (name, value) in positives {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveDeviceParam(name));
            }
        }
        if !self.phi_x.is_finite() || !self.phi_b.is_finite() {
            return Err(Error::NonFinite("flux"));
        }
        Ok(())
    }
}

/// The reduced model: linear coupling, qubit splitting, and the
/// dimensionless expansion parameter they rest on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModel {
    /// Signed coupling `-4 ej0 cos(pi phi_x/phi0) (pi B l x0/phi0)`, rad/s.
    pub lambda0: f64,
    /// Qubit splitting `8 ec (n1 - 1/2)`, rad/s.
    pub omega0: f64,
    /// Gate charge number `c1 v1 / 2e`.
    pub n1: f64,
    /// Charging energy, rad/s.
    pub ec: f64,
    /// `pi B l x0 / phi0`; must stay well below 1.
    pub small_angle: f64,
}

impl EffectiveModel {
    /// Coupling strength for the dynamics modules.
    pub fn beta(&self) -> f64 {
        self.lambda0.abs()
    }

    /// Whether the linearization behind `lambda0` holds.
    pub fn small_angle_ok(&self) -> bool {
        self.small_angle < SMALL_ANGLE_WARN
    }
}

/// Flux through the main loop with the resonator displaced by `x`.
pub fn total_flux(phi_b: f64, b_field: f64, ell: f64, x: f64) -> f64 {
    phi_b + b_field * ell * x
}

/// Charging energy `e^2 / (c1 + 4 cj0)` as an angular frequency, rad/s.
pub fn charging_energy(c1: f64, cj0: f64) -> Result<f64> {
    if c1.is_nan() || c1 <= 0.0 {
        return Err(Error::NonPositiveDeviceParam("c1"));
    }
    if cj0.is_nan() || cj0 <= 0.0 {
        return Err(Error::NonPositiveDeviceParam("cj0"));
    }
    Ok(ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / ((c1 + 4.0 * cj0) * HBAR))
}

/// Reduce raw device quantities to the effective model.
///
/// Requires the equilibrium flux to sit at the working point
/// `cos(pi phi_b / phi0) = 0`, where the constant part of the flux term
/// drops out and only the displacement coupling survives.
pub fn effective_model(params: &DeviceParams) -> Result<EffectiveModel> {
    params.validate()?;
    let phi0 = flux_quantum();
    let wp = (std::f64::consts::PI * params.phi_b / phi0).cos();
    if wp.abs() > WORKING_POINT_TOL {
        return Err(Error::WorkingPoint(wp.abs()));
    }
    let small_angle = std::f64::consts::PI * params.b_field * params.ell * params.x0 / phi0;
    let lambda0 =
        -4.0 * params.ej0 * (std::f64::consts::PI * params.phi_x / phi0).cos() * small_angle;
    let ec = charging_energy(params.c1, params.cj0)?;
    let n1 = params.c1 * params.v1 / (2.0 * ELEMENTARY_CHARGE);
    let omega0 = 8.0 * ec * (n1 - 0.5);
    Ok(EffectiveModel {
        lambda0,
        omega0,
        n1,
        ec,
        small_angle,
    })
}

/// How many schedule steps fit inside the shorter coherence time, and the
/// fraction of that time still unused afterwards.
pub fn decoherence_budget(taus: &[f64], t_qubit: f64, t_nr: f64) -> Result<(usize, f64)> {
    if t_qubit.is_nan() || t_qubit <= 0.0 {
        return Err(Error::NonPositiveDeviceParam("t_qubit"));
    }
    if t_nr.is_nan() || t_nr <= 0.0 {
        return Err(Error::NonPositiveDeviceParam("t_nr"));
    }
    let limit = t_qubit.min(t_nr);
    let mut elapsed = 0.0;
    let mut feasible = 0;
    for &tau in taus {
        if elapsed + tau >= limit {
            break;
        }
        elapsed += tau;
        feasible += 1;
    }
    Ok((feasible, (limit - elapsed) / limit))
}

/// Steps of a uniform-`tau` schedule that fit before `t_limit`.
pub fn uniform_step_budget(tau: f64, t_limit: f64) -> usize {
    if tau.is_nan() || tau <= 0.0 || t_limit.is_nan() || t_limit <= 0.0 {
        return 0;
    }
    (t_limit / tau).floor() as usize
}
