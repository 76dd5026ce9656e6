//! Quantum dynamics of the damped, pulse-driven Kerr cavity in a truncated
//! Fock basis.
//!
//! Single stochastic trajectories follow the Monte Carlo wavefunction
//! scheme: deterministic evolution under the non-Hermitian pseudo-
//! Hamiltonian `H - (i/2) gamma n` punctuated by photon-emission jumps at
//! norm-threshold crossings. A dense Lindblad master-equation integrator is
//! provided as a small-dimension oracle for validating the unraveling.

mod master;
mod ops;
mod trajectory;

pub use master::{integrate_master_equation, DensityMatrix, MASTER_DIMENSION_CAP};
pub use ops::{build_operators, BandedOp, FockOperators};
pub use trajectory::{
    bin_jump_counts, evolve_trajectory, nonhermitian_evolution, JumpRecord, TrajectoryOutput,
};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuantumError {
    #[error("Fock truncation must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("truncation breach at t={t:.6}: population {population:.3e} in the top {levels} Fock levels (raise n_trunc)")]
    TruncationBreach {
        t: f64,
        population: f64,
        levels: usize,
    },
    #[error("step too large at t={t:.6}: {detail}")]
    StepTooLarge { t: f64, detail: String },
    #[error("trace drifted by {drift:.3e} at t={t:.6}")]
    TraceDrift { t: f64, drift: f64 },
    #[error("dimension {n} exceeds the master-equation cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("invalid step setup: {0}")]
    InvalidStep(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// Truncation-health monitor: fail when more than `tol` of the population
/// sits in the top `levels` Fock states at any sample time.
///
/// The guard only makes sense when the truncation comfortably exceeds the
/// populated levels; disable it for deliberately tiny oracle dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationGuard {
    pub levels: usize,
    pub tol: f64,
}

impl Default for TruncationGuard {
    fn default() -> Self {
        Self {
            levels: 5,
            tol: 1e-6,
        }
    }
}

/// Physics parameters and truncation of the quantum model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumParams {
    pub chi: f64,
    pub gamma: f64,
    pub n_trunc: usize,
    pub truncation_guard: Option<TruncationGuard>,
}

impl QuantumParams {
    pub fn new(chi: f64, gamma: f64, n_trunc: usize) -> Self {
        assert!(gamma >= 0.0, "damping rate must be non-negative");
        Self {
            chi,
            gamma,
            n_trunc,
            truncation_guard: Some(TruncationGuard::default()),
        }
    }

    pub fn without_truncation_guard(mut self) -> Self {
        self.truncation_guard = None;
        self
    }
}

/// Pure state over the truncated Fock basis `|0> .. |N-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.len() < 2 {
            return Err(QuantumError::InvalidDimension(amplitudes.len()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QuantumError::InvalidState(
                "non-finite amplitude".to_string(),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// The vacuum state `|0>`.
    pub fn vacuum(n_trunc: usize) -> Self {
        Self::fock(n_trunc, 0)
    }

    /// The Fock (number) state `|m>`.
    pub fn fock(n_trunc: usize, m: usize) -> Self {
        assert!(n_trunc >= 2 && m < n_trunc);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_trunc];
        amplitudes[m] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Coherent state with amplitude `alpha`, renormalized over the
    /// truncated basis.
    pub fn coherent(n_trunc: usize, alpha: Complex64) -> Self {
        assert!(n_trunc >= 2);
        let mut amplitudes = Vec::with_capacity(n_trunc);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        amplitudes.push(c);
        for m in 1..n_trunc {
            c *= alpha / (m as f64).sqrt();
            amplitudes.push(c);
        }
        let mut psi = Self { amplitudes };
        psi.normalize();
        psi
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        assert!(norm > 0.0, "cannot normalize the zero vector");
        for a in &mut self.amplitudes {
            *a /= norm;
        }
    }
}
