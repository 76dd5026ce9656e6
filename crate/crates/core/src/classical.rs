//! Mean-field dynamics of the damped, pulse-driven Kerr cavity.
//!
//! The state is a single complex amplitude `xi`; its real and imaginary
//! parts are the cavity position and momentum. The drive is a rectangular
//! pulse train: on at amplitude `A` for the first half of each period, off
//! for the second half. Integration is fixed-step RK4 with the step grid
//! aligned to the pulse edges, so the discontinuous drive is constant
//! within every step and the integrator stays at full order.

use num_complex::Complex64;
use thiserror::Error;

use crate::series::TimeSeries;

/// Divergence guard for `|xi|`; an amplitude above this aborts integration.
pub const OVERFLOW_GUARD: f64 = 1e6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassicalError {
    #[error("invalid drive: require amplitude >= 0 and period > 0, got A={amplitude}, T={period}")]
    InvalidDrive { amplitude: f64, period: f64 },
    #[error("invalid step setup: {0}")]
    InvalidStep(String),
    #[error("state diverged: |xi| exceeded {guard:.1e} at t={t:.6}")]
    NonFiniteState { t: f64, guard: f64 },
}

/// Rectangular pulse train: value `A` on `[nT, nT + T/2)`, `0` on the
/// second half of every period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProfile {
    amplitude: f64,
    period: f64,
}

impl DriveProfile {
    pub fn new(amplitude: f64, period: f64) -> Result<Self, ClassicalError> {
        if !(amplitude >= 0.0) || !(period > 0.0) || !amplitude.is_finite() || !period.is_finite()
        {
            return Err(ClassicalError::InvalidDrive { amplitude, period });
        }
        Ok(Self { amplitude, period })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Drive value at time `t`. The pulse occupies the half-open interval
    /// `[0, T/2)` of each period, so `t = T/2` already sits in the gap.
    pub fn value(&self, t: f64) -> f64 {
        // f64 `%` is exact (fmod), so the reduction introduces no drift.
        let phase = t.rem_euclid(self.period);
        if phase < 0.5 * self.period {
            self.amplitude
        } else {
            0.0
        }
    }
}

/// Drive value at time `t` under `profile`.
pub fn drive_value(profile: &DriveProfile, t: f64) -> f64 {
    profile.value(t)
}

/// Physics parameters of the mean-field equation.
///
/// `nonlinear_conjugate` selects the form of the Kerr term:
/// `true` uses `-i chi |xi|^2 conj(xi)` and `false` the standard
/// `-i chi |xi|^2 xi`. The conjugated form is the constructor default;
/// note that it makes the flow hyperbolic and divergent for generic driven
/// initial data, so attractor studies run with the standard form (see
/// [`ClassicalParams::standard_kerr`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalParams {
    pub chi: f64,
    pub gamma: f64,
    pub nonlinear_conjugate: bool,
}

impl ClassicalParams {
    /// Parameters with the conjugated Kerr term (`-i chi |xi|^2 conj(xi)`).
    pub fn new(chi: f64, gamma: f64) -> Self {
        assert!(gamma >= 0.0, "damping rate must be non-negative");
        Self {
            chi,
            gamma,
            nonlinear_conjugate: true,
        }
    }

    /// Parameters with the standard Kerr term (`-i chi |xi|^2 xi`).
    pub fn standard_kerr(chi: f64, gamma: f64) -> Self {
        Self {
            nonlinear_conjugate: false,
            ..Self::new(chi, gamma)
        }
    }

    pub fn with_nonlinear_conjugate(mut self, on: bool) -> Self {
        self.nonlinear_conjugate = on;
        self
    }
}

/// Right-hand side of the mean-field equation:
/// `dxi/dt = -(gamma/2) xi + F(t) + kerr(xi)`.
pub fn classical_rhs(
    xi: Complex64,
    t: f64,
    params: &ClassicalParams,
    drive: &DriveProfile,
) -> Complex64 {
    rhs_with_drive(xi, drive.value(t), params)
}

#[inline]
fn rhs_with_drive(xi: Complex64, f: f64, params: &ClassicalParams) -> Complex64 {
    let nonlinear_arg = if params.nonlinear_conjugate {
        xi.conj()
    } else {
        xi
    };
    let kerr = -Complex64::i() * params.chi * xi.norm_sqr() * nonlinear_arg;
    -0.5 * params.gamma * xi + f + kerr
}

#[inline]
fn rk4_step(xi: Complex64, f: f64, dt: f64, params: &ClassicalParams) -> Complex64 {
    let k1 = rhs_with_drive(xi, f, params);
    let k2 = rhs_with_drive(xi + 0.5 * dt * k1, f, params);
    let k3 = rhs_with_drive(xi + 0.5 * dt * k2, f, params);
    let k4 = rhs_with_drive(xi + dt * k3, f, params);
    xi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Number of `dt` steps per half period, or an error when the pulse edges
/// would fall inside a step.
pub(crate) fn steps_per_half_period(period: f64, dt: f64) -> Result<usize, String> {
    if !(dt > 0.0) {
        return Err(format!("dt must be positive, got {dt}"));
    }
    let half = 0.5 * period;
    let m = (half / dt).round();
    if m < 1.0 || ((m * dt - half).abs() > 1e-9 * half) {
        return Err(format!(
            "dt={dt} does not divide the half period {half}; pulse edges must fall on step boundaries"
        ));
    }
    Ok(m as usize)
}

/// Number of `dt` steps per sample, or an error when the sample grid is not
/// an integer multiple of the step grid.
pub(crate) fn steps_per_sample(sample_interval: f64, dt: f64) -> Result<usize, String> {
    let k = (sample_interval / dt).round();
    if k < 1.0 || ((k * dt - sample_interval).abs() > 1e-9 * sample_interval) {
        return Err(format!(
            "sample interval {sample_interval} is not an integer multiple of dt={dt}"
        ));
    }
    Ok(k as usize)
}

/// Integrates the mean-field equation from `initial` over `[0, t_end]` and
/// returns the sampled real and imaginary parts of `xi`.
///
/// The drive is evaluated once per step from the step index (exact integer
/// arithmetic), which keeps the pulse train exactly periodic over arbitrarily
/// long runs.
pub fn integrate_classical(
    initial: Complex64,
    params: &ClassicalParams,
    drive: &DriveProfile,
    t_end: f64,
    dt: f64,
    sample_interval: f64,
) -> Result<(TimeSeries, TimeSeries), ClassicalError> {
    let half_steps = steps_per_half_period(drive.period(), dt).map_err(ClassicalError::InvalidStep)?;
    let sample_stride =
        steps_per_sample(sample_interval, dt).map_err(ClassicalError::InvalidStep)?;
    let period_steps = 2 * half_steps;
    let total_steps = (t_end / dt).round() as usize;

    let mut xi = initial;
    let mut re = Vec::with_capacity(total_steps / sample_stride + 1);
    let mut im = Vec::with_capacity(total_steps / sample_stride + 1);
    for step in 0..=total_steps {
        if !xi.re.is_finite() || !xi.im.is_finite() || xi.norm_sqr() > OVERFLOW_GUARD * OVERFLOW_GUARD
        {
            return Err(ClassicalError::NonFiniteState {
                t: step as f64 * dt,
                guard: OVERFLOW_GUARD,
            });
        }
        if step % sample_stride == 0 {
            re.push(xi.re);
            im.push(xi.im);
        }
        if step < total_steps {
            let on = step % period_steps < half_steps;
            let f = if on { drive.amplitude() } else { 0.0 };
            xi = rk4_step(xi, f, dt, params);
        }
    }
    Ok((
        TimeSeries::new(0.0, sample_interval, re),
        TimeSeries::new(0.0, sample_interval, im),
    ))
}

/// One column of a stroboscopic bifurcation scan. `samples` is `None` when
/// the integration diverged for this amplitude.
#[derive(Debug, Clone)]
pub struct BifurcationColumn {
    pub amplitude: f64,
    pub samples: Option<Vec<f64>>,
}

/// Stroboscopic values `Re(xi(nT))` for `n_min < n < n_max`, scanned over
/// drive amplitudes at fixed period. Divergent columns are flagged and the
/// scan continues.
pub fn bifurcation_scan(
    a_values: &[f64],
    period: f64,
    params: &ClassicalParams,
    n_min: usize,
    n_max: usize,
    dt: f64,
) -> Result<Vec<BifurcationColumn>, ClassicalError> {
    if n_min >= n_max {
        return Err(ClassicalError::InvalidStep(format!(
            "need n_min < n_max, got {n_min} >= {n_max}"
        )));
    }
    a_values
        .iter()
        .map(|&a| {
            let drive = DriveProfile::new(a, period)?;
            let samples = stroboscopic_re(Complex64::new(0.0, 0.0), params, &drive, n_min, n_max, dt);
            Ok(BifurcationColumn {
                amplitude: a,
                samples: samples.ok(),
            })
        })
        .collect()
}

fn stroboscopic_re(
    initial: Complex64,
    params: &ClassicalParams,
    drive: &DriveProfile,
    n_min: usize,
    n_max: usize,
    dt: f64,
) -> Result<Vec<f64>, ClassicalError> {
    let half_steps = steps_per_half_period(drive.period(), dt).map_err(ClassicalError::InvalidStep)?;
    let period_steps = 2 * half_steps;
    let total_steps = (n_max - 1) * period_steps;

    let mut xi = initial;
    let mut out = Vec::with_capacity(n_max - n_min);
    for step in 0..=total_steps {
        if !xi.re.is_finite() || !xi.im.is_finite() || xi.norm_sqr() > OVERFLOW_GUARD * OVERFLOW_GUARD
        {
            return Err(ClassicalError::NonFiniteState {
                t: step as f64 * dt,
                guard: OVERFLOW_GUARD,
            });
        }
        if step % period_steps == 0 {
            let n = step / period_steps;
            if n > n_min && n < n_max {
                out.push(xi.re);
            }
        }
        if step < total_steps {
            let on = step % period_steps < half_steps;
            let f = if on { drive.amplitude() } else { 0.0 };
            xi = rk4_step(xi, f, dt, params);
        }
    }
    Ok(out)
}
