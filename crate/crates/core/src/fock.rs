//! Truncated-Fock-space state algebra: construction, normalization,
//! number distributions, and overlaps with number states.
//!
//! All states are value types over an explicit finite basis `|0>..|D-1>`.
//! Construction from a coherent state chooses `D` so that the neglected
//! Poisson mass stays below a caller-supplied tail tolerance, which bounds
//! the truncation error of every probability reported downstream.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation tolerance (probability mass allowed beyond the basis).
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Smallest basis ever used, so low-excitation states stay well resolved.
pub const FLOOR_DIM: usize = 16;

/// Branch probabilities below this are treated as impossible outcomes.
pub const EMPTY_BRANCH_TOL: f64 = 1e-30;

/// Resonator state: complex amplitudes over the truncated number basis.
///
/// Unnormalized values are permitted transiently (post-measurement
/// branches keep their raw amplitudes so the norm can be read off as the
/// branch probability); every public protocol result is normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    tail_tol: f64,
}

impl FockVector {
    /// Wrap raw amplitudes. Requires at least one amplitude, all finite.
    pub fn new(amps: Vec<Complex64>, tail_tol: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        if tail_tol.is_nan() || tail_tol <= 0.0 {
            return Err(Error::InvalidTailTol(tail_tol));
        }
        Ok(Self { amps, tail_tol })
    }

    /// The number state `|n>` in a basis of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::IndexOutOfRange { index: n, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim.max(1)];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(amps, DEFAULT_TAIL_TOL)
    }

    /// The vacuum state in the floor-dimension basis.
    pub fn vacuum() -> Self {
        Self::fock(0, FLOOR_DIM).expect("floor dimension holds the vacuum")
    }

    /// Coherent state `|alpha>` truncated at [`auto_dim`]`(alpha, 0, tail_tol)`.
    ///
    /// Amplitudes are the textbook coefficients
    /// `c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`, kept as-is: the state
    /// is normalized up to the neglected tail, which is below `tail_tol`.
    ///
    /// ```
    /// use holeburn::FockVector;
    /// use num_complex::Complex64;
    ///
    /// let state = FockVector::coherent(Complex64::new(2.0, 0.0), 1e-12).unwrap();
    /// let p0 = state.number_distribution().prob(0);
    /// assert!((p0 - (-4.0f64).exp()).abs() < 1e-12);
    /// ```
    pub fn coherent(alpha: Complex64, tail_tol: f64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        check_tail_tol(tail_tol)?;
        let dim = auto_dim(alpha, 0, tail_tol);
        let mut amps = Vec::with_capacity(dim);
        // c_{n+1} = c_n * alpha / sqrt(n+1), seeded with the Gaussian prefactor
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..dim {
            amps.push(c);
            c *= alpha / ((n + 1) as f64).sqrt();
        }
        Self::new(amps, tail_tol)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Squared norm; for a post-measurement branch this is its probability.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm, returning the pre-normalization norm alongside.
    ///
    /// Fails on a (numerically) zero vector, which signals an impossible
    /// post-selection branch upstream.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr < EMPTY_BRANCH_TOL {
            return Err(Error::EmptyBranch { prob: norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        let amps = self.amps.iter().map(|a| a / norm).collect();
        Ok((
            Self {
                amps,
                tail_tol: self.tail_tol,
            },
            norm,
        ))
    }

    /// Occupation probabilities `p_n = |c_n|^2`. Expects a normalized state.
    pub fn number_distribution(&self) -> NumberDistribution {
        NumberDistribution {
            p: self.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Population of the number state `|n>` after normalization. Used as
    /// the preparation fidelity when `|n>` is the target state.
    pub fn fidelity_to_fock(&self, n: usize) -> Result<f64> {
        if n >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: n,
                dim: self.dim(),
            });
        }
        let norm_sqr = self.norm_sqr();
        if norm_sqr < EMPTY_BRANCH_TOL {
            return Err(Error::EmptyBranch { prob: norm_sqr });
        }
        Ok(self.amps[n].norm_sqr() / norm_sqr)
    }

    /// Copy of the amplitudes with `extra` zero levels appended.
    pub(crate) fn padded_amps(&self, extra: usize) -> Vec<Complex64> {
        let mut amps = self.amps.clone();
        amps.resize(self.amps.len() + extra, Complex64::new(0.0, 0.0));
        amps
    }
}

/// Probabilities over the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution {
    p: Vec<f64>,
}

impl NumberDistribution {
    /// Wrap a probability vector (used by the closed-form constructors).
    pub(crate) fn from_probs(p: Vec<f64>) -> Self {
        Self { p }
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Probability of `n` quanta; zero outside the stored basis.
    pub fn prob(&self, n: usize) -> f64 {
        self.p.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Basis size for a coherent state of amplitude `alpha`, with room for
/// `extra_shift` upward one-quantum shifts.
///
/// The base size is the smallest cut where the remaining Poisson tail,
/// including one guard level, drops below `tail_tol`; the guard level keeps
/// the top retained amplitude itself below tolerance. Never below
/// [`FLOOR_DIM`]; `extra_shift` levels are added on top.
pub fn auto_dim(alpha: Complex64, extra_shift: usize, tail_tol: f64) -> usize {
    let mean = alpha.norm_sqr();
    // Smallest k with sum_{n >= k} Poisson(mean; n) < tail_tol.
    let mut term = (-mean).exp();
    let mut tail = 1.0_f64;
    let mut k = 0usize;
    while tail - term >= tail_tol && k < 4096 {
        tail -= term;
        k += 1;
        term *= mean / k as f64;
    }
    FLOOR_DIM.max(k + 2) + extra_shift
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if tail_tol.is_nan() || tail_tol <= 0.0 || tail_tol > 1e-6 {
        return Err(Error::InvalidTailTol(tail_tol));
    }
    Ok(())
}
