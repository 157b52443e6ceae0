//! Exact resonant Jaynes-Cummings evolution of the joint qubit-resonator
//! state, and projective qubit measurement with post-selection.
//!
//! On resonance the propagator block-diagonalizes over the doublets
//! `{|g,n>, |e,n+1>}`, so evolution is applied as analytic rotations
//!
//! ```text
//! g'_n     = cos(bt sqrt(n+1)) g_n     - i sin(bt sqrt(n+1)) e_{n+1}
//! e'_{n+1} = cos(bt sqrt(n+1)) e_{n+1} - i sin(bt sqrt(n+1)) g_n
//! ```
//!
//! never through a generic matrix exponential; norms are preserved to
//! machine precision. The unpaired `|e,0>` component is held fixed (the
//! supported protocols never populate it: the qubit always enters in
//! `|g>`), and the unpaired top `|g,D-1>` component likewise, which is
//! harmless only while the truncation edge is empty -- hence the leak
//! check at every call.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockVector, EMPTY_BRANCH_TOL};

/// Qubit-resonator coupling strength. Positive; `rad/s` when times are in
/// seconds, or `1` when times are quoted in units of `1/beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    beta: f64,
}

impl CouplingParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::NonPositiveCoupling(beta));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Detection outcome of the qubit: ground or excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitOutcome {
    G,
    E,
}

/// Joint qubit (x) resonator state: one amplitude vector per qubit sector,
/// sharing a single truncation dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    g: Vec<Complex64>,
    e: Vec<Complex64>,
    tail_tol: f64,
}

impl JointState {
    /// Wrap sector amplitudes; both must have the same nonzero length.
    pub fn new(g: Vec<Complex64>, e: Vec<Complex64>, tail_tol: f64) -> Result<Self> {
        if g.is_empty() || g.len() != e.len() {
            return Err(Error::EmptyBasis);
        }
        let finite = |v: &[Complex64]| v.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        if !finite(&g) || !finite(&e) {
            return Err(Error::NonFinite("joint amplitudes"));
        }
        if tail_tol.is_nan() || tail_tol <= 0.0 {
            return Err(Error::InvalidTailTol(tail_tol));
        }
        Ok(Self { g, e, tail_tol })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn g_amps(&self) -> &[Complex64] {
        &self.g
    }

    pub fn e_amps(&self) -> &[Complex64] {
        &self.e
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g
            .iter()
            .chain(self.e.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// Rabi frequency of the `{|g,n>, |e,n+1>}` doublet: `beta * sqrt(n+1)`.
pub fn rabi_frequency(params: &CouplingParams, n: usize) -> f64 {
    params.beta * ((n + 1) as f64).sqrt()
}

/// Product state of a freshly prepared qubit with the resonator.
///
/// The basis is padded by one level so a subsequent excitation swap into
/// the resonator still fits.
pub fn embed(qubit: QubitOutcome, nr: &FockVector) -> JointState {
    let filled = nr.padded_amps(1);
    let empty = vec![Complex64::new(0.0, 0.0); filled.len()];
    let (g, e) = match qubit {
        QubitOutcome::G => (filled, empty),
        QubitOutcome::E => (empty, filled),
    };
    JointState {
        g,
        e,
        tail_tol: nr.tail_tol(),
    }
}

/// Evolve for a time `t` under the resonant interaction.
///
/// Fails if probability above `100 * tail_tol` sits in the top two basis
/// levels, where the truncated propagator is no longer exact.
pub fn jc_propagate(state: &JointState, params: &CouplingParams, t: f64) -> Result<JointState> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidDuration(t));
    }
    let dim = state.dim();
    let top = dim.saturating_sub(2);
    let edge: f64 = state.g[top..]
        .iter()
        .chain(&state.e[top..])
        .map(|a| a.norm_sqr())
        .sum();
    let limit = 100.0 * state.tail_tol;
    if edge > limit {
        return Err(Error::TruncationLeak { mass: edge, limit });
    }

    let mut g = state.g.clone();
    let mut e = state.e.clone();
    // e[0] and g[dim-1] have no doublet partner and stay fixed.
    for n in 0..dim - 1 {
        let theta = rabi_frequency(params, n) * t;
        let (sin, cos) = theta.sin_cos();
        let rot = Complex64::new(0.0, -sin);
        let (gn, en1) = (state.g[n], state.e[n + 1]);
        g[n] = cos * gn + rot * en1;
        e[n + 1] = cos * en1 + rot * gn;
    }
    Ok(JointState {
        g,
        e,
        tail_tol: state.tail_tol,
    })
}

/// Project onto a qubit outcome, returning the surviving resonator
/// amplitudes unnormalized together with the branch probability.
pub fn measure_qubit(state: &JointState, outcome: QubitOutcome) -> Result<(FockVector, f64)> {
    let sector = match outcome {
        QubitOutcome::G => &state.g,
        QubitOutcome::E => &state.e,
    };
    let prob: f64 = sector.iter().map(|a| a.norm_sqr()).sum();
    if prob < EMPTY_BRANCH_TOL {
        return Err(Error::EmptyBranch { prob });
    }
    Ok((FockVector::new(sector.clone(), state.tail_tol)?, prob))
}

/// One protocol step: couple a fresh ground-state qubit to the resonator,
/// evolve for `t`, then post-select the qubit in `outcome`.
///
/// A `G` detection multiplies each amplitude by `cos(bt sqrt(n+1))` in
/// place; an `E` detection multiplies by `-i sin(bt sqrt(n+1))` and shifts
/// the component up one level. The returned state is normalized and
/// `step_prob` is the pre-normalization branch probability.
pub fn conditional_step(
    nr: &FockVector,
    params: &CouplingParams,
    t: f64,
    outcome: QubitOutcome,
) -> Result<(FockVector, f64)> {
    let joint = embed(QubitOutcome::G, nr);
    let evolved = jc_propagate(&joint, params, t)?;
    let (branch, prob) = measure_qubit(&evolved, outcome)?;
    let branch = match outcome {
        // The padding level stays exactly empty on a G detection; drop it
        // so hole-burning schedules do not grow the basis.
        QubitOutcome::G => {
            let mut amps = branch.amps().to_vec();
            debug_assert_eq!(amps.last().map(|a| a.norm_sqr()), Some(0.0));
            amps.pop();
            FockVector::new(amps, nr.tail_tol())?
        }
        QubitOutcome::E => branch,
    };
    let (normalized, _) = branch.normalize()?;
    Ok((normalized, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn beta1() -> CouplingParams {
        CouplingParams::new(1.0).unwrap()
    }

    #[test]
    fn rabi_frequency_values() {
        assert_eq!(rabi_frequency(&beta1(), 0), 1.0);
        assert_eq!(rabi_frequency(&beta1(), 3), 2.0);
        let b = CouplingParams::new(2.827e8).unwrap();
        assert!((rabi_frequency(&b, 4) - 6.322e8).abs() / 6.322e8 < 1e-3);
    }

    #[test]
    fn embed_places_amplitudes_in_selected_sector() {
        let vac = FockVector::vacuum();
        let s = embed(QubitOutcome::G, &vac);
        assert_eq!(s.dim(), vac.dim() + 1);
        assert!((s.g_amps()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(s.e_amps().iter().all(|a| a.norm() == 0.0));

        let two = FockVector::fock(2, 6).unwrap();
        let s = embed(QubitOutcome::E, &two);
        assert!((s.e_amps()[2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(s.g_amps().iter().all(|a| a.norm() == 0.0));

        let coh = FockVector::coherent(c(2.0, 0.0), 1e-12).unwrap();
        let s = embed(QubitOutcome::G, &coh);
        for (a, b) in s.g_amps().iter().zip(coh.amps()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ground_vacuum_rabi_oscillation() {
        let vac = FockVector::vacuum();
        let joint = embed(QubitOutcome::G, &vac);
        let t = 0.3321;
        let out = jc_propagate(&joint, &beta1(), t).unwrap();
        assert!((out.g_amps()[0] - c(t.cos(), 0.0)).norm() < 1e-15);
        assert!((out.e_amps()[1] - c(0.0, -t.sin())).norm() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let coh = FockVector::coherent(c(1.3, 0.4), 1e-12).unwrap();
        let joint = embed(QubitOutcome::G, &coh);
        let out = jc_propagate(&joint, &beta1(), 0.0).unwrap();
        assert_eq!(out, joint);
    }

    #[test]
    fn quarter_period_swaps_excitation() {
        let vac = FockVector::vacuum();
        let joint = embed(QubitOutcome::G, &vac);
        let out = jc_propagate(&joint, &beta1(), PI / 2.0).unwrap();
        assert!(out.g_amps()[0].norm_sqr() < 1e-30);
        assert!((out.e_amps()[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn dark_component_is_preserved() {
        let dim = 16;
        let mut e = vec![c(0.0, 0.0); dim];
        e[0] = c(0.6, 0.3);
        let mut g = vec![c(0.0, 0.0); dim];
        g[0] = c(0.5, 0.0);
        let s = JointState::new(g, e, 1e-12).unwrap();
        let out = jc_propagate(&s, &beta1(), 1.234).unwrap();
        assert!((out.e_amps()[0] - c(0.6, 0.3)).norm() < 1e-15);
        assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn measurement_branches_are_complete() {
        let vac = FockVector::vacuum();
        let theta = 0.7;
        let out = jc_propagate(&embed(QubitOutcome::G, &vac), &beta1(), theta).unwrap();
        let (gs, pg) = measure_qubit(&out, QubitOutcome::G).unwrap();
        let (es, pe) = measure_qubit(&out, QubitOutcome::E).unwrap();
        assert!((pg - theta.cos().powi(2)).abs() < 1e-12);
        assert!((pe - theta.sin().powi(2)).abs() < 1e-12);
        assert!((pg + pe - 1.0).abs() < 1e-12);
        assert!((gs.amps()[0].norm_sqr() - pg).abs() < 1e-12);
        assert!((es.amps()[1].norm_sqr() - pe).abs() < 1e-12);
    }

    #[test]
    fn empty_branch_is_an_error() {
        let vac = FockVector::vacuum();
        let out = jc_propagate(&embed(QubitOutcome::G, &vac), &beta1(), PI / 2.0).unwrap();
        assert!(matches!(
            measure_qubit(&out, QubitOutcome::G),
            Err(Error::EmptyBranch { .. })
        ));
    }

    #[test]
    fn conditional_step_ground_applies_cosine_multipliers() {
        let coh = FockVector::coherent(c(2.0, 0.0), 1e-12).unwrap();
        let t = PI / (2.0 * 5.0f64.sqrt());
        let (state, prob) = conditional_step(&coh, &beta1(), t, QubitOutcome::G).unwrap();
        assert_eq!(state.dim(), coh.dim());
        // The n=4 component is eliminated by the quarter-period choice.
        assert!(state.amps()[4].norm_sqr() <= 1e-20);
        // Remaining amplitudes match the analytic multiplier.
        let norm = prob.sqrt();
        for (n, (out, inp)) in state.amps().iter().zip(coh.amps()).enumerate() {
            let expect = inp * (t * ((n + 1) as f64).sqrt()).cos() / norm;
            assert!((out - expect).norm() < 1e-12, "n={n}");
        }
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_step_excited_shifts_up() {
        let vac = FockVector::vacuum();
        let (state, prob) = conditional_step(&vac, &beta1(), PI / 2.0, QubitOutcome::E).unwrap();
        assert!((prob - 1.0).abs() < 1e-12);
        assert_eq!(state.dim(), vac.dim() + 1);
        assert!((state.amps()[1].norm_sqr() - 1.0).abs() < 1e-12);

        let t = 0.4;
        let (_, pg) = conditional_step(&vac, &beta1(), t, QubitOutcome::G).unwrap();
        assert!((pg - t.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn propagation_composes() {
        let coh = FockVector::coherent(c(1.1, -0.3), 1e-12).unwrap();
        let joint = embed(QubitOutcome::G, &coh);
        let (t1, t2) = (0.37, 1.21);
        let once = jc_propagate(&joint, &beta1(), t1 + t2).unwrap();
        let twice =
            jc_propagate(&jc_propagate(&joint, &beta1(), t1).unwrap(), &beta1(), t2).unwrap();
        for (a, b) in once
            .g_amps()
            .iter()
            .chain(once.e_amps())
            .zip(twice.g_amps().iter().chain(twice.e_amps()))
        {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn truncation_leak_is_detected() {
        let dim = 16;
        let mut g = vec![c(0.0, 0.0); dim];
        g[dim - 1] = c(1.0, 0.0);
        let s = JointState::new(g, vec![c(0.0, 0.0); dim], 1e-12).unwrap();
        assert!(matches!(
            jc_propagate(&s, &beta1(), 0.5),
            Err(Error::TruncationLeak { .. })
        ));
    }

    #[test]
    fn negative_time_rejected() {
        let s = embed(QubitOutcome::G, &FockVector::vacuum());
        assert!(matches!(
            jc_propagate(&s, &beta1(), -1.0),
            Err(Error::InvalidDuration(_))
        ));
    }
}
