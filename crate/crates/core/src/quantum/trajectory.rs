//! Single quantum-jump trajectories and photon-count binning.
//!
//! Between jumps the unnormalized state evolves under the tridiagonal drift
//! generator with fixed-step RK4 (steps aligned to the pulse edges, so the
//! generator is constant within every step). A uniform threshold `r` is
//! drawn up front; when the squared norm falls to `r` the jump time is
//! located by bisection inside the step, the annihilation operator is
//! applied, the state is renormalized, and a fresh threshold is drawn.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ops::DriftGenerator;
use super::{QuantumError, QuantumParams, WaveFunction};
use crate::classical::{steps_per_half_period, steps_per_sample, DriveProfile};
use crate::series::TimeSeries;

/// Strictly increasing photon-emission times of one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JumpRecord {
    times: Vec<f64>,
}

impl JumpRecord {
    pub fn new(times: Vec<f64>) -> Result<Self, QuantumError> {
        if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(QuantumError::InvalidState(
                "jump times must be non-negative and strictly increasing".into(),
            ));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Observable records of a single trajectory, sampled on a uniform grid
/// from the normalized state.
#[derive(Debug, Clone)]
pub struct TrajectoryOutput {
    /// Position expectation `<x>` with `x = (a + a†)/sqrt(2)`.
    pub position: TimeSeries,
    /// Real part of `<a>`; directly comparable to the classical amplitude.
    pub re_annihilation: TimeSeries,
    /// Photon number `<n>`.
    pub photon_number: TimeSeries,
    pub jumps: JumpRecord,
}

struct Rk4Buffers {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    stage: Vec<Complex64>,
}

impl Rk4Buffers {
    fn new(n: usize) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k1: zero.clone(),
            k2: zero.clone(),
            k3: zero.clone(),
            k4: zero.clone(),
            stage: zero,
        }
    }

    /// One RK4 step of `dpsi/dt = M psi` over `h`, writing into `out`.
    fn step(&mut self, gen: &DriftGenerator, psi: &[Complex64], h: f64, out: &mut [Complex64]) {
        let n = psi.len();
        gen.apply(psi, &mut self.k1);
        for i in 0..n {
            self.stage[i] = psi[i] + 0.5 * h * self.k1[i];
        }
        gen.apply(&self.stage, &mut self.k2);
        for i in 0..n {
            self.stage[i] = psi[i] + 0.5 * h * self.k2[i];
        }
        gen.apply(&self.stage, &mut self.k3);
        for i in 0..n {
            self.stage[i] = psi[i] + h * self.k3[i];
        }
        gen.apply(&self.stage, &mut self.k4);
        let w = h / 6.0;
        for i in 0..n {
            out[i] = psi[i] + w * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn number_weighted_norm(v: &[Complex64]) -> f64 {
    v.iter()
        .enumerate()
        .map(|(m, a)| m as f64 * a.norm_sqr())
        .sum()
}

fn annihilation_expectation(v: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..v.len() - 1 {
        acc += v[m].conj() * ((m + 1) as f64).sqrt() * v[m + 1];
    }
    acc
}

/// Applies the annihilation operator and renormalizes; the target must have
/// support outside the vacuum.
fn apply_jump(psi: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) -> Result<(), QuantumError> {
    let n = psi.len();
    scratch.clear();
    scratch.resize(n, Complex64::new(0.0, 0.0));
    for m in 0..n - 1 {
        scratch[m] = ((m + 1) as f64).sqrt() * psi[m + 1];
    }
    let norm = norm_sqr(scratch).sqrt();
    if norm <= 0.0 {
        return Err(QuantumError::InvalidState(
            "jump fired on a state with no photons to emit".into(),
        ));
    }
    for (p, s) in psi.iter_mut().zip(scratch.iter()) {
        *p = s / norm;
    }
    Ok(())
}

fn draw_threshold(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let r: f64 = rng.gen();
        if r > 0.0 {
            return r;
        }
    }
}

/// Evolves a single Monte Carlo wavefunction trajectory and records
/// `<x>`, `Re<a>`, and `<n>` every `sample_interval`, plus the jump times.
///
/// The threshold stream is `ChaCha8Rng::seed_from_u64(seed)`: one uniform
/// draw up front, then one after every jump, which makes trajectories
/// bit-reproducible for a given seed.
pub fn evolve_trajectory(
    initial: &WaveFunction,
    params: &QuantumParams,
    drive: &DriveProfile,
    t_end: f64,
    dt: f64,
    sample_interval: f64,
    seed: u64,
) -> Result<TrajectoryOutput, QuantumError> {
    let n = params.n_trunc;
    if n < 2 {
        return Err(QuantumError::InvalidDimension(n));
    }
    if initial.dim() != n {
        return Err(QuantumError::InvalidState(format!(
            "initial state dimension {} does not match n_trunc {}",
            initial.dim(),
            n
        )));
    }
    let half_steps =
        steps_per_half_period(drive.period(), dt).map_err(QuantumError::InvalidStep)?;
    let stride = steps_per_sample(sample_interval, dt).map_err(QuantumError::InvalidStep)?;
    let period_steps = 2 * half_steps;
    let total_steps = (t_end / dt).round() as usize;
    let jump_tol = dt / 100.0;

    let gen_on = DriftGenerator::build(params, drive.amplitude());
    let gen_off = DriftGenerator::build(params, 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut threshold = draw_threshold(&mut rng);

    let mut psi: Vec<Complex64> = initial.amplitudes().to_vec();
    let norm = norm_sqr(&psi).sqrt();
    if norm <= 0.0 {
        return Err(QuantumError::InvalidState("initial state has zero norm".into()));
    }
    for a in &mut psi {
        *a /= norm;
    }

    let mut bufs = Rk4Buffers::new(n);
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    let mut trial = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = Vec::with_capacity(n);

    let sample_count = total_steps / stride + 1;
    let mut position = Vec::with_capacity(sample_count);
    let mut re_a = Vec::with_capacity(sample_count);
    let mut photon = Vec::with_capacity(sample_count);
    let mut jump_times: Vec<f64> = Vec::new();

    for step in 0..=total_steps {
        let t = step as f64 * dt;
        let norm2 = norm_sqr(&psi);

        if step % stride == 0 {
            let a_exp = annihilation_expectation(&psi) / norm2;
            position.push(std::f64::consts::SQRT_2 * a_exp.re);
            re_a.push(a_exp.re);
            photon.push(number_weighted_norm(&psi) / norm2);
            if let Some(guard) = params.truncation_guard {
                let lo = n - guard.levels.min(n);
                let top: f64 = psi[lo..].iter().map(|a| a.norm_sqr()).sum::<f64>() / norm2;
                if top > guard.tol {
                    return Err(QuantumError::TruncationBreach {
                        t,
                        population: top,
                        levels: guard.levels,
                    });
                }
            }
        }
        if step == total_steps {
            break;
        }

        let n_mean = number_weighted_norm(&psi) / norm2;
        let step_probability = params.gamma * n_mean * dt;
        if step_probability >= 0.1 {
            return Err(QuantumError::StepTooLarge {
                t,
                detail: format!(
                    "per-step jump probability gamma*<n>*dt = {step_probability:.3} >= 0.1"
                ),
            });
        }

        let generator = if step % period_steps < half_steps {
            &gen_on
        } else {
            &gen_off
        };

        // Advance by dt, resolving any jumps inside the step.
        let mut offset = 0.0;
        while offset < dt {
            let h = dt - offset;
            bufs.step(generator, &psi, h, &mut next);
            let before = norm_sqr(&psi);
            let after = norm_sqr(&next);
            if !after.is_finite() {
                return Err(QuantumError::StepTooLarge {
                    t,
                    detail: "state norm became non-finite; dt is too large for this truncation"
                        .into(),
                });
            }
            if params.gamma > 0.0 && after > before * (1.0 + 1e-10) {
                return Err(QuantumError::StepTooLarge {
                    t,
                    detail: "unnormalized norm increased between jumps".into(),
                });
            }
            if after > threshold {
                std::mem::swap(&mut psi, &mut next);
                break;
            }
            // Norm crossed the threshold inside (offset, offset + h]:
            // bisect the substep length down to jump_tol.
            let mut lo = 0.0;
            let mut hi = h;
            while hi - lo > jump_tol {
                let mid = 0.5 * (lo + hi);
                bufs.step(generator, &psi, mid, &mut trial);
                if norm_sqr(&trial) > threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            bufs.step(generator, &psi, hi, &mut trial);
            std::mem::swap(&mut psi, &mut trial);
            apply_jump(&mut psi, &mut scratch)?;
            jump_times.push(t + offset + hi);
            threshold = draw_threshold(&mut rng);
            offset += hi;
        }
    }

    Ok(TrajectoryOutput {
        position: TimeSeries::new(0.0, sample_interval, position),
        re_annihilation: TimeSeries::new(0.0, sample_interval, re_a),
        photon_number: TimeSeries::new(0.0, sample_interval, photon),
        jumps: JumpRecord { times: jump_times },
    })
}

/// Deterministic evolution under the non-Hermitian drift alone (no jumps),
/// returning the final unnormalized state and the squared-norm decay curve.
pub fn nonhermitian_evolution(
    initial: &WaveFunction,
    params: &QuantumParams,
    drive: &DriveProfile,
    t_end: f64,
    dt: f64,
    sample_interval: f64,
) -> Result<(WaveFunction, TimeSeries), QuantumError> {
    let n = params.n_trunc;
    if initial.dim() != n {
        return Err(QuantumError::InvalidState(format!(
            "initial state dimension {} does not match n_trunc {}",
            initial.dim(),
            n
        )));
    }
    let half_steps =
        steps_per_half_period(drive.period(), dt).map_err(QuantumError::InvalidStep)?;
    let stride = steps_per_sample(sample_interval, dt).map_err(QuantumError::InvalidStep)?;
    let period_steps = 2 * half_steps;
    let total_steps = (t_end / dt).round() as usize;

    let gen_on = DriftGenerator::build(params, drive.amplitude());
    let gen_off = DriftGenerator::build(params, 0.0);
    let mut bufs = Rk4Buffers::new(n);
    let mut psi: Vec<Complex64> = initial.amplitudes().to_vec();
    let mut next = psi.clone();

    let mut norms = Vec::with_capacity(total_steps / stride + 1);
    for step in 0..=total_steps {
        if step % stride == 0 {
            norms.push(norm_sqr(&psi));
        }
        if step == total_steps {
            break;
        }
        let generator = if step % period_steps < half_steps {
            &gen_on
        } else {
            &gen_off
        };
        bufs.step(generator, &psi, dt, &mut next);
        std::mem::swap(&mut psi, &mut next);
    }
    Ok((
        WaveFunction::new(psi)?,
        TimeSeries::new(0.0, sample_interval, norms),
    ))
}

/// Sliding-window photon counts: value `k` counts the jump times falling in
/// `[t_start + k*stride, t_start + k*stride + width)`. With `stride == width`
/// the windows tile the range without overlap.
pub fn bin_jump_counts(
    record: &JumpRecord,
    width: f64,
    stride: f64,
    t_start: f64,
    t_end: f64,
) -> TimeSeries {
    assert!(width > 0.0 && stride > 0.0 && t_end > t_start);
    let span = t_end - t_start;
    let n_bins = if span < width {
        0
    } else {
        ((span - width) / stride).floor() as usize + 1
    };
    let times = record.times();
    let mut values = Vec::with_capacity(n_bins);
    for k in 0..n_bins {
        let lo = t_start + k as f64 * stride;
        let hi = lo + width;
        let a = times.partition_point(|&t| t < lo);
        let b = times.partition_point(|&t| t < hi);
        values.push((b - a) as f64);
    }
    TimeSeries::new(t_start, stride, values)
}
