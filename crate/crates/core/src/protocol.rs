//! Hole-burning schedules, sequential protocol execution, closed-form
//! distribution and success-probability formulas, and the two Fock-state
//! preparation strategies.
//!
//! A protocol is a sequence of identical rounds: couple a fresh
//! ground-state qubit to the resonator for a chosen time, detect the
//! qubit, and keep the run only when the detection matches the schedule.
//! Ground detections carve cosine zeros into the number distribution
//! (holes); excited detections multiply by sines and shift every
//! component up one quantum, which is what the preparation strategies
//! exploit.
//!
//! Every closed form here is cross-checked against the step-by-step
//! simulation in the test suites; the sequential route is the ground
//! truth.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockVector, NumberDistribution};
use crate::jc::{conditional_step, rabi_frequency, CouplingParams, QubitOutcome};

/// Lowest acceptable fidelity from a preparation-schedule search.
pub const SEARCH_FIDELITY_FLOOR: f64 = 0.95;

/// One protocol round: interaction time, the component the round is meant
/// to remove (when any), and the detection outcome that keeps the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleStep {
    pub tau: f64,
    pub target_n: Option<usize>,
    pub outcome: QubitOutcome,
}

/// An ordered list of rounds sharing one detection outcome: all `G` for
/// hole burning, all `E` for Fock preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: Vec<ScheduleStep>,
}

impl Schedule {
    pub fn new(steps: Vec<ScheduleStep>) -> Result<Self> {
        for step in &steps {
            if !step.tau.is_finite() || step.tau <= 0.0 {
                return Err(Error::InvalidDuration(step.tau));
            }
        }
        if steps.windows(2).any(|w| w[0].outcome != w[1].outcome) {
            return Err(Error::MixedOutcomes);
        }
        Ok(Self { steps })
    }

    /// Ground-detection schedule burning one hole per target, in order.
    pub fn hole_burning(targets: &[usize], params: &CouplingParams) -> Result<Self> {
        for (i, &n) in targets.iter().enumerate() {
            if targets[..i].contains(&n) {
                return Err(Error::DuplicateTarget(n));
            }
        }
        let steps = targets
            .iter()
            .map(|&n| ScheduleStep {
                tau: hole_time(n, params),
                target_n: Some(n),
                outcome: QubitOutcome::G,
            })
            .collect();
        Self::new(steps)
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.tau).collect()
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|s| s.tau).sum()
    }
}

/// Outcome of running a schedule to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    /// Normalized resonator state after the last detection.
    pub final_state: FockVector,
    /// Post-selection probability of each round, in order.
    pub step_probs: Vec<f64>,
    /// Product of the step probabilities: the chance every detection
    /// comes out as prescribed.
    pub success_prob: f64,
    /// Number distribution of the final state.
    pub distribution: NumberDistribution,
    /// Population of the target number state, when one was named.
    pub fidelity: Option<f64>,
}

/// Interaction time that burns a hole at `target_n`: a quarter period of
/// the `{|g,n>, |e,n+1>}` doublet, `pi / (2 beta sqrt(n+1))`.
pub fn hole_time(target_n: usize, params: &CouplingParams) -> f64 {
    std::f64::consts::PI / (2.0 * rabi_frequency(params, target_n))
}

/// Run every round of `schedule` on `initial`, post-selecting as it goes.
///
/// `fidelity_target` names the number state whose final population should
/// be reported, when the caller cares (the preparation strategies do).
pub fn run_schedule(
    initial: &FockVector,
    schedule: &Schedule,
    params: &CouplingParams,
    fidelity_target: Option<usize>,
) -> Result<ProtocolResult> {
    let mut state = initial.clone();
    let mut step_probs = Vec::with_capacity(schedule.len());
    for step in schedule.steps() {
        let (next, prob) = conditional_step(&state, params, step.tau, step.outcome)?;
        state = next;
        step_probs.push(prob);
    }
    let success_prob = step_probs.iter().product();
    let distribution = state.number_distribution();
    let fidelity = match fidelity_target {
        Some(n) => Some(state.fidelity_to_fock(n)?),
        None => None,
    };
    Ok(ProtocolResult {
        final_state: state,
        step_probs,
        success_prob,
        distribution,
        fidelity,
    })
}

/// Burn one hole per entry of `targets` into a coherent state, by running
/// the quarter-period ground-detection schedule sequentially.
///
/// ```
/// use holeburn::protocol::burn_holes;
/// use holeburn::CouplingParams;
/// use num_complex::Complex64;
///
/// let params = CouplingParams::new(1.0).unwrap();
/// let result = burn_holes(Complex64::new(2.0, 0.0), &[4], &params, 1e-12).unwrap();
/// assert!(result.distribution.prob(4) <= 1e-20);
/// assert!((result.success_prob - 0.0939).abs() < 1e-3);
/// ```
pub fn burn_holes(
    alpha: Complex64,
    targets: &[usize],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<ProtocolResult> {
    let schedule = Schedule::hole_burning(targets, params)?;
    let initial = FockVector::coherent(alpha, tail_tol)?;
    for &n in targets {
        if n >= initial.dim() {
            return Err(Error::IndexOutOfRange {
                index: n,
                dim: initial.dim(),
            });
        }
    }
    run_schedule(&initial, &schedule, params, None)
}

/// Number distribution after ground detections at times `taus`, from the
/// product formula: `P_n` proportional to
/// `(|a|^2n / n!) prod_j cos^2(beta sqrt(n+1) tau_j)`, normalized over the
/// truncated basis.
pub fn holes_distribution_closed_form(
    alpha: Complex64,
    taus: &[f64],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<NumberDistribution> {
    if taus.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let weights = ground_weights(alpha, taus, params, tail_tol)?;
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyBranch { prob: total });
    }
    Ok(NumberDistribution::from_probs(
        weights.iter().map(|w| w / total).collect(),
    ))
}

/// Probability that every ground detection of the hole-burning run
/// succeeds: `exp(-|a|^2) sum_m (|a|^2m / m!) prod_j cos^2(beta sqrt(m+1) tau_j)`.
///
/// An empty `taus` list leaves the empty product, so the value is the
/// retained coherent mass (1 up to the truncation tail).
pub fn success_probability_closed_form(
    alpha: Complex64,
    taus: &[f64],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<f64> {
    Ok(ground_weights(alpha, taus, params, tail_tol)?.iter().sum())
}

fn ground_weights(
    alpha: Complex64,
    taus: &[f64],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<Vec<f64>> {
    let initial = FockVector::coherent(alpha, tail_tol)?;
    Ok(initial
        .amps()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let mut w = c.norm_sqr();
            for &tau in taus {
                w *= (rabi_frequency(params, n) * tau).cos().powi(2);
            }
            w
        })
        .collect())
}

/// Final resonator state after `M` excited detections at times `taus`,
/// from the product formula: the amplitude landing on `|n+M>` is
/// proportional to `(a^n / sqrt(n!)) (-i)^M prod_j sin(beta sqrt(n+j) tau_j)`.
///
/// The `j`-th sine factor uses the level the component actually occupies
/// during round `j`, i.e. `sqrt(n+j)` for a component that started at `n`.
pub fn e_detection_amplitudes_closed_form(
    alpha: Complex64,
    taus: &[f64],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<FockVector> {
    if taus.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let initial = FockVector::coherent(alpha, tail_tol)?;
    let shifts = taus.len();
    let phase = match shifts % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); initial.dim() + shifts];
    for (n, c) in initial.amps().iter().enumerate() {
        let mut a = c * phase;
        for (j, &tau) in taus.iter().enumerate() {
            a *= (params.beta() * ((n + j + 1) as f64).sqrt() * tau).sin();
        }
        amps[n + shifts] = a;
    }
    let (state, _) = FockVector::new(amps, tail_tol)?.normalize()?;
    Ok(state)
}

/// Probability that every excited detection succeeds:
/// `exp(-|a|^2) sum_m (|a|^2m / m!) prod_j sin^2(beta sqrt(m+j) tau_j)`.
pub fn prep_success_probability(
    alpha: Complex64,
    taus: &[f64],
    params: &CouplingParams,
    tail_tol: f64,
) -> Result<f64> {
    let initial = FockVector::coherent(alpha, tail_tol)?;
    Ok(initial
        .amps()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let mut w = c.norm_sqr();
            for (j, &tau) in taus.iter().enumerate() {
                w *= (params.beta() * ((m + j + 1) as f64).sqrt() * tau)
                    .sin()
                    .powi(2);
            }
            w
        })
        .sum())
}

/// Prepare `|N>` with `N` excited detections, one per quantum.
///
/// Round `j` pins its time to a sine zero that exactly removes the
/// component that started at level `j`: `tau_j = k_j pi / (beta sqrt(2j))`
/// with integer `k_j`. After `N` rounds the surviving vacuum component
/// sits at `|N>` and every lower level is empty, so the fidelity is set by
/// the un-removed components above, which the exhaustive search over
/// `k_j` in `1..=search_depth` suppresses. Ties in fidelity go to the
/// shorter schedule.
pub fn prep_fock_strategy1(
    target: usize,
    alpha: Complex64,
    params: &CouplingParams,
    search_depth: usize,
    tail_tol: f64,
) -> Result<(Schedule, ProtocolResult)> {
    if target == 0 || target > 5 {
        return Err(Error::UnsupportedTarget(
            target,
            "one detection per quantum works for 1 <= N <= 5",
        ));
    }
    let rounds = target;
    // kill[j-1] = component removed at round j, here always j itself.
    let kills: Vec<usize> = (1..=rounds).collect();
    search_kill_schedules(target, alpha, params, search_depth, tail_tol, &[kills])
}

/// Prepare `|N>` with `M = ceil(N/2)` excited detections.
///
/// The `M` upward shifts alone move the level-`(N-M)` component onto
/// `|N>`; the rounds' sine zeros then remove the components that would
/// land below it (levels `0..N-M-1`) and, for odd `N`, the nearest one
/// above. Which round removes which component, and the integer `k_j` in
/// `tau_j = k_j pi / (beta sqrt(n'+j))`, are chosen by exhaustive search
/// maximizing fidelity, ties to the shorter schedule.
pub fn prep_fock_strategy2(
    target: usize,
    alpha: Complex64,
    params: &CouplingParams,
    search_depth: usize,
    tail_tol: f64,
) -> Result<(Schedule, ProtocolResult)> {
    if target < 2 {
        return Err(Error::UnsupportedTarget(
            target,
            "shift-assisted preparation needs N >= 2",
        ));
    }
    // The assignment x order search is factorial in the round count, and
    // the surviving population is negligible well before this point.
    if target > 8 {
        return Err(Error::UnsupportedTarget(
            target,
            "shift-assisted preparation supports N <= 8",
        ));
    }
    let rounds = target.div_ceil(2);
    let kept = target - rounds;
    let mut kills: Vec<usize> = (0..kept).collect();
    if target % 2 == 1 {
        kills.push(kept + 1);
    }
    let assignments = permutations(&kills);
    search_kill_schedules(target, alpha, params, search_depth, tail_tol, &assignments)
}

/// Exhaustive search over kill-to-round assignments and sine-zero orders
/// `k_j`, keeping the schedule with the highest final fidelity to
/// `|target>`.
fn search_kill_schedules(
    target: usize,
    alpha: Complex64,
    params: &CouplingParams,
    search_depth: usize,
    tail_tol: f64,
    assignments: &[Vec<usize>],
) -> Result<(Schedule, ProtocolResult)> {
    if search_depth == 0 {
        return Err(Error::FidelityShortfall {
            achieved: 0.0,
            required: SEARCH_FIDELITY_FLOOR,
        });
    }
    let initial = FockVector::coherent(alpha, tail_tol)?;
    let rounds = assignments[0].len();
    let mut best: Option<(f64, f64, Schedule, ProtocolResult)> = None;

    for kills in assignments {
        let mut ks = vec![1usize; rounds];
        loop {
            let steps: Vec<ScheduleStep> = kills
                .iter()
                .zip(&ks)
                .enumerate()
                .map(|(i, (&kill, &k))| ScheduleStep {
                    tau: k as f64 * std::f64::consts::PI
                        / (params.beta() * ((kill + i + 1) as f64).sqrt()),
                    target_n: Some(kill),
                    outcome: QubitOutcome::E,
                })
                .collect();
            let schedule = Schedule::new(steps)?;
            // A candidate whose post-selection chain dies is simply skipped.
            if let Ok(result) = run_schedule(&initial, &schedule, params, Some(target)) {
                let fid = result.fidelity.expect("target requested");
                let dur = schedule.total_duration();
                let better = match &best {
                    None => true,
                    Some((best_fid, best_dur, _, _)) => {
                        fid > *best_fid || (fid == *best_fid && dur < *best_dur)
                    }
                };
                if better {
                    best = Some((fid, dur, schedule, result));
                }
            }
            if !next_k_vector(&mut ks, search_depth) {
                break;
            }
        }
    }

    match best {
        Some((fid, _, schedule, result)) if fid >= SEARCH_FIDELITY_FLOOR => Ok((schedule, result)),
        Some((fid, _, _, _)) => Err(Error::FidelityShortfall {
            achieved: fid,
            required: SEARCH_FIDELITY_FLOOR,
        }),
        None => Err(Error::FidelityShortfall {
            achieved: 0.0,
            required: SEARCH_FIDELITY_FLOOR,
        }),
    }
}

/// Advance a mixed-radix counter over `1..=depth`; false when exhausted.
fn next_k_vector(ks: &mut [usize], depth: usize) -> bool {
    for k in ks.iter_mut() {
        if *k < depth {
            *k += 1;
            return true;
        }
        *k = 1;
    }
    false
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DEFAULT_TAIL_TOL;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn beta1() -> CouplingParams {
        CouplingParams::new(1.0).unwrap()
    }

    #[test]
    fn hole_time_formula() {
        assert!((hole_time(0, &beta1()) - PI / 2.0).abs() < 1e-15);
        assert!((hole_time(4, &beta1()) - 0.70248).abs() < 1e-5);
        let b = CouplingParams::new(2.0 * PI * 45e6).unwrap();
        let tau = hole_time(0, &b);
        assert!((tau - 1.0 / 1.8e8).abs() / tau < 1e-12);
    }

    #[test]
    fn single_hole_success_and_exactness() {
        let result = burn_holes(c(2.0, 0.0), &[4], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        // Frozen from the independent product-sum oracle.
        assert!((result.success_prob - 0.09394036198298487).abs() < 1e-9);
        assert!(result.distribution.prob(4) <= 1e-20);
        for n in 0..13 {
            if n != 4 {
                assert!(result.distribution.prob(n) > 0.0, "n={n}");
            }
        }
        let product: f64 = result.step_probs.iter().product();
        assert!((result.success_prob - product).abs() < 1e-12);
    }

    #[test]
    fn multi_hole_success_values() {
        // Frozen from the independent product-sum oracle.
        let two = burn_holes(c(2.0, 0.0), &[4, 1], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!((two.success_prob - 0.04128271092581137).abs() < 1e-9);
        assert!(two.distribution.prob(4) <= 1e-20);
        assert!(two.distribution.prob(1) <= 1e-20);

        let three = burn_holes(c(2.0, 0.0), &[4, 1, 7], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!((three.success_prob - 0.003266323173532781).abs() < 1e-9);
        for &n in &[1, 4, 7] {
            assert!(three.distribution.prob(n) <= 1e-20);
        }
    }

    #[test]
    fn closed_form_distribution_matches_sequential() {
        let alpha = c(2.0, 0.0);
        let params = beta1();
        let result = burn_holes(alpha, &[4, 1, 7], &params, DEFAULT_TAIL_TOL).unwrap();
        let taus: Vec<f64> = [4, 1, 7].iter().map(|&n| hole_time(n, &params)).collect();
        let closed =
            holes_distribution_closed_form(alpha, &taus, &params, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(closed.dim(), result.distribution.dim());
        for n in 0..closed.dim() {
            assert!(
                (closed.prob(n) - result.distribution.prob(n)).abs() < 1e-10,
                "n={n}"
            );
        }
        let ps = success_probability_closed_form(alpha, &taus, &params, DEFAULT_TAIL_TOL).unwrap();
        assert!((ps - result.success_prob).abs() < 1e-10);
    }

    #[test]
    fn closed_form_cosine_zero_is_exact() {
        let tau = PI / (2.0 * 5.0f64.sqrt());
        let dist = holes_distribution_closed_form(c(2.0, 0.0), &[tau], &beta1(), DEFAULT_TAIL_TOL)
            .unwrap();
        assert!(dist.prob(4) <= 1e-20);
        assert!((dist.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_holes_costs_nothing() {
        let ps =
            success_probability_closed_form(c(2.0, 0.0), &[], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!((ps - 1.0).abs() < 1e-9);
        let result = burn_holes(c(2.0, 0.0), &[], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!((result.success_prob - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adding_a_hole_never_helps() {
        let one = burn_holes(c(2.0, 0.0), &[4], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        let two = burn_holes(c(2.0, 0.0), &[4, 1], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!(two.success_prob <= one.success_prob);
    }

    #[test]
    fn hole_order_does_not_change_the_outcome() {
        let a = burn_holes(c(2.0, 0.0), &[4, 1, 7], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        let b = burn_holes(c(2.0, 0.0), &[7, 1, 4], &beta1(), DEFAULT_TAIL_TOL).unwrap();
        assert!((a.success_prob - b.success_prob).abs() < 1e-12);
        for n in 0..a.distribution.dim() {
            assert!((a.distribution.prob(n) - b.distribution.prob(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn burn_input_validation() {
        assert!(matches!(
            burn_holes(c(2.0, 0.0), &[4, 4], &beta1(), DEFAULT_TAIL_TOL),
            Err(Error::DuplicateTarget(4))
        ));
        assert!(matches!(
            burn_holes(c(2.0, 0.0), &[500], &beta1(), DEFAULT_TAIL_TOL),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn e_detection_closed_form_matches_sequential() {
        let alpha = c(0.8, 0.2);
        let params = beta1();
        let taus = [1.1, 0.6, 2.3];
        let closed =
            e_detection_amplitudes_closed_form(alpha, &taus, &params, DEFAULT_TAIL_TOL).unwrap();

        let steps: Vec<ScheduleStep> = taus
            .iter()
            .map(|&tau| ScheduleStep {
                tau,
                target_n: None,
                outcome: QubitOutcome::E,
            })
            .collect();
        let schedule = Schedule::new(steps).unwrap();
        let initial = FockVector::coherent(alpha, DEFAULT_TAIL_TOL).unwrap();
        let result = run_schedule(&initial, &schedule, &params, None).unwrap();

        assert_eq!(closed.dim(), result.final_state.dim());
        for (n, (a, b)) in closed
            .amps()
            .iter()
            .zip(result.final_state.amps())
            .enumerate()
        {
            assert!((a - b).norm() < 1e-10, "n={n}: {a} vs {b}");
        }

        let ps = prep_success_probability(alpha, &taus, &params, DEFAULT_TAIL_TOL).unwrap();
        assert!((ps - result.success_prob).abs() < 1e-10);
    }

    #[test]
    fn e_detection_sine_zero_empties_the_bottom() {
        // One excited round of a full period moves nothing out of |0>, so
        // the |1> component of the outcome vanishes.
        let state =
            e_detection_amplitudes_closed_form(c(0.6, 0.0), &[PI], &beta1(), DEFAULT_TAIL_TOL)
                .unwrap();
        assert!(state.amps()[1].norm_sqr() <= 1e-30);
        assert!(state.amps()[0].norm_sqr() == 0.0);
    }

    #[test]
    fn e_detection_from_near_vacuum_gives_one_quantum() {
        let state = e_detection_amplitudes_closed_form(
            c(1e-8, 0.0),
            &[PI / 2.0],
            &beta1(),
            DEFAULT_TAIL_TOL,
        )
        .unwrap();
        assert!(state.fidelity_to_fock(1).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn prep_success_from_vacuum_is_a_plain_sine() {
        for &tau in &[0.3, 1.0, 2.2] {
            let ps =
                prep_success_probability(c(0.0, 0.0), &[tau], &beta1(), DEFAULT_TAIL_TOL).unwrap();
            assert!((ps - tau.sin().powi(2)).abs() < 1e-15, "tau={tau}");
        }
    }

    #[test]
    fn strategy1_prepares_small_fock_states() {
        let params = beta1();
        let (schedule, result) =
            prep_fock_strategy1(3, c(0.6, 0.0), &params, 8, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(schedule.len(), 3);
        assert!(schedule
            .steps()
            .iter()
            .all(|s| s.outcome == QubitOutcome::E));
        assert!(result.fidelity.unwrap() >= 0.99);
        // The chain of step probabilities equals the closed form.
        let ps = prep_success_probability(c(0.6, 0.0), &schedule.taus(), &params, DEFAULT_TAIL_TOL)
            .unwrap();
        assert!((ps - result.success_prob).abs() < 1e-10);
        // Everything below the target is strictly empty.
        for n in 0..3 {
            assert_eq!(result.distribution.prob(n), 0.0);
        }
    }

    #[test]
    fn strategy1_near_vacuum_single_round() {
        let (_, result) =
            prep_fock_strategy1(1, c(1e-6, 0.0), &beta1(), 4, DEFAULT_TAIL_TOL).unwrap();
        assert!(result.fidelity.unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn strategy2_single_round_anchor() {
        // N=2 needs one round; the search lands on tau = 4 pi / beta, the
        // hand-checkable schedule. Fidelity frozen from direct amplitude
        // evaluation.
        let (schedule, result) =
            prep_fock_strategy2(2, c(0.6, 0.0), &beta1(), 8, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(schedule.len(), 1);
        assert!((schedule.steps()[0].tau - 4.0 * PI).abs() < 1e-12);
        assert!((result.fidelity.unwrap() - 0.9883873577510751).abs() < 1e-9);
    }

    #[test]
    fn strategy2_reaches_higher_targets() {
        let (schedule, result) =
            prep_fock_strategy2(4, c(0.6, 0.0), &beta1(), 8, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(schedule.len(), 2);
        assert!(result.fidelity.unwrap() >= 0.97);
        for n in 0..2 {
            assert_eq!(result.distribution.prob(n), 0.0);
        }
    }

    #[test]
    fn strategy_input_validation() {
        let p = beta1();
        assert!(matches!(
            prep_fock_strategy1(0, c(0.6, 0.0), &p, 8, DEFAULT_TAIL_TOL),
            Err(Error::UnsupportedTarget(0, _))
        ));
        assert!(matches!(
            prep_fock_strategy1(6, c(0.6, 0.0), &p, 8, DEFAULT_TAIL_TOL),
            Err(Error::UnsupportedTarget(6, _))
        ));
        assert!(matches!(
            prep_fock_strategy2(1, c(0.6, 0.0), &p, 8, DEFAULT_TAIL_TOL),
            Err(Error::UnsupportedTarget(1, _))
        ));
        assert!(matches!(
            prep_fock_strategy2(9, c(0.6, 0.0), &p, 8, DEFAULT_TAIL_TOL),
            Err(Error::UnsupportedTarget(9, _))
        ));
        assert!(matches!(
            prep_fock_strategy1(3, c(0.6, 0.0), &p, 0, DEFAULT_TAIL_TOL),
            Err(Error::FidelityShortfall { .. })
        ));
    }

    #[test]
    fn too_much_coherent_amplitude_fails_the_search() {
        // A bright initial state leaves too many contaminants for N
        // rounds to remove.
        let err = prep_fock_strategy1(2, c(2.4, 0.0), &beta1(), 2, DEFAULT_TAIL_TOL);
        assert!(matches!(err, Err(Error::FidelityShortfall { .. })));
    }

    #[test]
    fn schedules_reject_bad_steps() {
        assert!(matches!(
            Schedule::new(vec![ScheduleStep {
                tau: 0.0,
                target_n: None,
                outcome: QubitOutcome::G,
            }]),
            Err(Error::InvalidDuration(_))
        ));
        assert!(matches!(
            Schedule::new(vec![
                ScheduleStep {
                    tau: 1.0,
                    target_n: None,
                    outcome: QubitOutcome::G,
                },
                ScheduleStep {
                    tau: 1.0,
                    target_n: None,
                    outcome: QubitOutcome::E,
                },
            ]),
            Err(Error::MixedOutcomes)
        ));
    }
}
