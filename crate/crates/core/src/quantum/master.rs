//! Dense Lindblad master-equation integrator, used as a desk-scale oracle
//! for validating the stochastic unraveling. Deliberately capped at small
//! Hilbert dimensions: production runs use trajectories, not the density
//! matrix.

use num_complex::Complex64;

use super::{QuantumError, QuantumParams, WaveFunction};
use crate::classical::{steps_per_half_period, steps_per_sample, DriveProfile};
use crate::series::TimeSeries;

/// Upper bound on the Hilbert dimension accepted by the oracle.
pub const MASTER_DIMENSION_CAP: usize = 64;

/// Dense density operator over the truncated Fock basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Projector onto a pure state (normalized).
    pub fn from_pure(psi: &WaveFunction) -> Self {
        let n = psi.dim();
        let norm2 = psi.norm_sqr();
        let amps = psi.amplitudes();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(amps[i] * amps[j].conj() / norm2);
            }
        }
        Self { n, data }
    }

    pub fn fock(n_trunc: usize, m: usize) -> Self {
        Self::from_pure(&WaveFunction::fock(n_trunc, m))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Purity `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += (self.get(i, j) * self.get(j, i)).re;
            }
        }
        acc
    }

    fn validate(&self) -> Result<(), QuantumError> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(QuantumError::InvalidState(format!(
                "density operator trace is {tr}, expected 1"
            )));
        }
        for i in 0..self.n {
            for j in 0..=i {
                let d = self.get(i, j) - self.get(j, i).conj();
                if d.norm() > 1e-9 {
                    return Err(QuantumError::InvalidState(format!(
                        "density operator is not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hamiltonian bands for a fixed drive value; `H = (chi/2) a†²a² +
/// i F (a† - a)` is tridiagonal with a real diagonal.
struct HamiltonianBands {
    diag: Vec<f64>,
    sub: Vec<Complex64>,
    sup: Vec<Complex64>,
}

impl HamiltonianBands {
    fn build(params: &QuantumParams, f: f64) -> Self {
        let n = params.n_trunc;
        Self {
            diag: (0..n)
                .map(|m| 0.5 * params.chi * (m * (m - m.min(1))) as f64)
                .collect(),
            sub: (0..n)
                .map(|m| Complex64::new(0.0, f * (m as f64).sqrt()))
                .collect(),
            sup: (0..n)
                .map(|m| {
                    if m + 1 < n {
                        Complex64::new(0.0, -f * ((m + 1) as f64).sqrt())
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        }
    }
}

/// `out = -i [H, rho] + gamma (a rho a† - (n rho + rho n)/2)`, all terms
/// written band-wise in O(n^2).
fn lindblad_rhs(
    h: &HamiltonianBands,
    gamma: f64,
    rho: &[Complex64],
    n: usize,
    out: &mut [Complex64],
) {
    let at = |i: usize, j: usize| rho[i * n + j];
    for i in 0..n {
        for j in 0..n {
            let mut h_rho = h.diag[i] * at(i, j);
            if i > 0 {
                h_rho += h.sub[i] * at(i - 1, j);
            }
            if i + 1 < n {
                h_rho += h.sup[i] * at(i + 1, j);
            }
            let mut rho_h = at(i, j) * h.diag[j];
            if j > 0 {
                rho_h += at(i, j - 1) * h.sup[j - 1];
            }
            if j + 1 < n {
                rho_h += at(i, j + 1) * h.sub[j + 1];
            }
            let mut acc = -Complex64::i() * (h_rho - rho_h);
            acc -= 0.5 * gamma * (i + j) as f64 * at(i, j);
            if i + 1 < n && j + 1 < n {
                acc += gamma * (((i + 1) * (j + 1)) as f64).sqrt() * at(i + 1, j + 1);
            }
            out[i * n + j] = acc;
        }
    }
}

/// Integrates the Lindblad equation with fixed-step RK4 and returns the
/// sampled `<n>` and `<x>` series. The trace is monitored every step.
pub fn integrate_master_equation(
    initial: &DensityMatrix,
    params: &QuantumParams,
    drive: &DriveProfile,
    t_end: f64,
    dt: f64,
    sample_interval: f64,
) -> Result<(TimeSeries, TimeSeries), QuantumError> {
    let n = params.n_trunc;
    if n > MASTER_DIMENSION_CAP {
        return Err(QuantumError::DimensionTooLarge {
            n,
            cap: MASTER_DIMENSION_CAP,
        });
    }
    if initial.dim() != n {
        return Err(QuantumError::InvalidState(format!(
            "density dimension {} does not match n_trunc {}",
            initial.dim(),
            n
        )));
    }
    initial.validate()?;
    let half_steps =
        steps_per_half_period(drive.period(), dt).map_err(QuantumError::InvalidStep)?;
    let stride = steps_per_sample(sample_interval, dt).map_err(QuantumError::InvalidStep)?;
    let period_steps = 2 * half_steps;
    let total_steps = (t_end / dt).round() as usize;

    let h_on = HamiltonianBands::build(params, drive.amplitude());
    let h_off = HamiltonianBands::build(params, 0.0);

    let size = n * n;
    let mut rho = initial.data.clone();
    let zero = vec![Complex64::new(0.0, 0.0); size];
    let (mut k1, mut k2, mut k3, mut k4, mut stage) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);

    let mut n_series = Vec::with_capacity(total_steps / stride + 1);
    let mut x_series = Vec::with_capacity(total_steps / stride + 1);

    for step in 0..=total_steps {
        let t = step as f64 * dt;
        let trace: Complex64 = (0..n).map(|i| rho[i * n + i]).sum();
        let drift = (trace - Complex64::new(1.0, 0.0)).norm();
        if drift > 1e-6 {
            return Err(QuantumError::TraceDrift { t, drift });
        }
        if step % stride == 0 {
            let n_exp: f64 = (0..n).map(|i| i as f64 * rho[i * n + i].re).sum();
            let mut x_exp = 0.0;
            for m in 0..n - 1 {
                let c = ((m + 1) as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
                x_exp += c * (rho[(m + 1) * n + m] + rho[m * n + m + 1]).re;
            }
            n_series.push(n_exp);
            x_series.push(x_exp);
        }
        if step == total_steps {
            break;
        }

        let h = if step % period_steps < half_steps {
            &h_on
        } else {
            &h_off
        };
        lindblad_rhs(h, params.gamma, &rho, n, &mut k1);
        for i in 0..size {
            stage[i] = rho[i] + 0.5 * dt * k1[i];
        }
        lindblad_rhs(h, params.gamma, &stage, n, &mut k2);
        for i in 0..size {
            stage[i] = rho[i] + 0.5 * dt * k2[i];
        }
        lindblad_rhs(h, params.gamma, &stage, n, &mut k3);
        for i in 0..size {
            stage[i] = rho[i] + dt * k3[i];
        }
        lindblad_rhs(h, params.gamma, &stage, n, &mut k4);
        let w = dt / 6.0;
        for i in 0..size {
            rho[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }

    Ok((
        TimeSeries::new(0.0, sample_interval, n_series),
        TimeSeries::new(0.0, sample_interval, x_series),
    ))
}
