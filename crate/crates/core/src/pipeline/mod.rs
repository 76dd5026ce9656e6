//! Composition of simulation, embedding, and persistence into reproducible
//! experiments: single (A, T) cells, phase-diagram sweeps over the drive
//! plane, and embedding-hyperparameter robustness studies.

mod configfile;

pub use configfile::{apply_config_text, canonical_config_string, ConfigError};

use rayon::prelude::*;
use thiserror::Error;

use crate::classical::{integrate_classical, ClassicalError, ClassicalParams, DriveProfile};
use crate::embedding::{
    delay_embed, estimate_delay_mi, estimate_dimension_fnn, EmbeddingError, PointCloud,
};
use crate::homology::{
    average_lifetime, maxmin_subsample, rips_persistence_budgeted, DistanceMatrix, Feature,
    HomologyError, PersistenceDiagram, DEFAULT_SIMPLEX_BUDGET,
};
use crate::quantum::{bin_jump_counts, evolve_trajectory, QuantumError, QuantumParams, WaveFunction};
use crate::series::TimeSeries;
use crate::stats::mean_std;
use num_complex::Complex64;

/// Observable driving the topological analysis of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Real part of the classical mean-field amplitude.
    Classical,
    /// Position expectation of a single quantum trajectory.
    QuantumX,
    /// Binned photon-emission counts of a single quantum trajectory.
    QuantumPhotonCount,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classical" => Some(Self::Classical),
            "quantum-x" => Some(Self::QuantumX),
            "quantum-photon-count" => Some(Self::QuantumPhotonCount),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::QuantumX => "quantum-x",
            Self::QuantumPhotonCount => "quantum-photon-count",
        }
    }

    pub fn is_quantum(&self) -> bool {
        !matches!(self, Self::Classical)
    }
}

/// Uniform grid over a half-open interval `(min, max]`: `count` values at
/// `min + (i+1) (max - min) / count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.count)
            .map(|i| self.min + span * (i + 1) as f64 / self.count as f64)
            .collect()
    }
}

/// Either estimate embedding hyperparameters per cell (mutual information
/// for the delay, false nearest neighbors for the dimension) or fix them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingPolicy {
    Auto,
    Fixed { tau: usize, dim: usize },
}

/// Full description of an experiment; every run is a pure function of this
/// struct, which is also what gets hashed into artifact names.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub a_grid: GridSpec,
    pub t_grid: GridSpec,
    pub chi: f64,
    pub gamma: f64,
    pub n_trunc: usize,
    /// Kerr-term form of the classical limit; the conjugated variant
    /// diverges under drive, so attractor studies keep this off.
    pub nonlinear_conjugate: bool,
    pub embedding: EmbeddingPolicy,
    pub max_tau: usize,
    pub mi_bins: usize,
    pub max_embed_dim: usize,
    pub fnn_r_tol: f64,
    pub fnn_threshold: f64,
    /// Series prefix length used by the MI/FNN estimators.
    pub estimator_samples: usize,
    /// Maxmin landmark cap before persistence.
    pub subsample: usize,
    pub seed: u64,
    /// Discarded transient, in units of the drive period.
    pub transient_periods: f64,
    /// Total evolution time, in units of the drive period.
    pub total_periods: f64,
    pub samples_per_period: usize,
    /// Photon-count window width and stride, in absolute time units.
    pub bin_width: f64,
    pub bin_stride: f64,
    /// Quantum cells average the lifetime summary over this many seeds.
    pub trajectories: usize,
    pub max_simplices: usize,
}

impl SweepConfig {
    /// Desk-scale preset: small truncation and window, 8x8 grid. Fast
    /// enough for tests and laptops.
    pub fn desk() -> Self {
        Self {
            mode: Mode::Classical,
            a_grid: GridSpec { min: 0.0, max: 5.0, count: 8 },
            t_grid: GridSpec { min: 0.0, max: 50.0, count: 8 },
            chi: 0.008,
            gamma: 0.05,
            n_trunc: 300,
            nonlinear_conjugate: false,
            embedding: EmbeddingPolicy::Auto,
            max_tau: 60,
            mi_bins: 16,
            max_embed_dim: 4,
            fnn_r_tol: 15.0,
            fnn_threshold: 0.01,
            estimator_samples: 2000,
            subsample: 256,
            seed: 1,
            transient_periods: 100.0,
            total_periods: 300.0,
            samples_per_period: 20,
            bin_width: 9.0,
            bin_stride: 9.0,
            trajectories: 1,
            max_simplices: DEFAULT_SIMPLEX_BUDGET,
        }
    }

    /// Production preset: N = 300 truncation, 400T..1000T window, 50x50
    /// grid. Hours of compute; run offline.
    pub fn full() -> Self {
        Self {
            a_grid: GridSpec { min: 0.0, max: 5.0, count: 50 },
            t_grid: GridSpec { min: 0.0, max: 50.0, count: 50 },
            subsample: 400,
            transient_periods: 400.0,
            total_periods: 1000.0,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut problems = Vec::new();
        if self.a_grid.count == 0 || self.t_grid.count == 0 {
            problems.push("grid counts must be >= 1".to_string());
        }
        if !(self.a_grid.min >= 0.0 && self.a_grid.max > self.a_grid.min) {
            problems.push("need 0 <= a-min < a-max".to_string());
        }
        if !(self.t_grid.min >= 0.0 && self.t_grid.max > self.t_grid.min) {
            problems.push("need 0 <= t-min < t-max".to_string());
        }
        if self.gamma < 0.0 {
            problems.push("gamma must be non-negative".to_string());
        }
        if self.n_trunc < 2 {
            problems.push("n-trunc must be at least 2".to_string());
        }
        if !(self.transient_periods >= 0.0 && self.total_periods > self.transient_periods) {
            problems.push("need 0 <= transient-periods < total-periods".to_string());
        }
        if self.samples_per_period == 0 {
            problems.push("samples-per-period must be >= 1".to_string());
        }
        if !(self.bin_width > 0.0 && self.bin_stride > 0.0) {
            problems.push("bin-width and bin-stride must be positive".to_string());
        }
        if self.subsample == 0 {
            problems.push("subsample must be >= 1".to_string());
        }
        if self.trajectories == 0 {
            problems.push("trajectories must be >= 1".to_string());
        }
        if let EmbeddingPolicy::Fixed { tau, dim } = self.embedding {
            if tau == 0 || dim == 0 {
                problems.push("fixed embedding needs tau >= 1 and dim >= 1".to_string());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(PipelineError::Config(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Any module failure attributable to a single cell.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CellError {
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Compact per-cell state recorded in grids and CSVs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    TruncationBreach,
    Diverged,
    Failed,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::TruncationBreach => "truncation-breach",
            Self::Diverged => "diverged",
            Self::Failed => "failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Self::Ok),
            "truncation-breach" => Some(Self::TruncationBreach),
            "diverged" => Some(Self::Diverged),
            "failed" => Some(Self::Failed),
            _ => None,
        }
    }

    pub fn from_error(err: &CellError) -> Self {
        match err {
            CellError::Classical(ClassicalError::NonFiniteState { .. }) => Self::Diverged,
            CellError::Quantum(QuantumError::TruncationBreach { .. }) => Self::TruncationBreach,
            _ => Self::Failed,
        }
    }
}

/// Everything worth reporting about a completed cell besides the diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDiagnostics {
    pub tau: usize,
    pub dim: usize,
    pub series_len: usize,
    pub cloud_points: usize,
    pub landmarks: usize,
    pub h1_features: usize,
    pub dt: f64,
    pub jump_count: Option<usize>,
    pub mean_photon_number: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub l_avg: f64,
    pub diagram: PersistenceDiagram,
    pub diagnostics: CellDiagnostics,
    /// Post-transient observable series (the pipeline input to embedding).
    pub series: TimeSeries,
}

/// splitmix64 finalizer; the basis of the per-cell seed derivation.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-cell seed: `seed ^ h(index)` with `h(0) = 0`, so a
/// 1x1 sweep reproduces a direct `run_cell` call with the same seed.
pub fn cell_seed(seed: u64, cell_index: usize) -> u64 {
    seed ^ (splitmix64(cell_index as u64) ^ splitmix64(0))
}

/// Seed of trajectory replica `j` within a cell (replica 0 keeps the cell
/// seed).
pub fn trajectory_seed(cell_seed: u64, replica: usize) -> u64 {
    if replica == 0 {
        cell_seed
    } else {
        splitmix64(cell_seed.wrapping_add(replica as u64))
    }
}

/// Stability-aware RK4 step for quantum cells: fine enough for the top of
/// the truncated Kerr spectrum, aligned both to the pulse edges and to the
/// sampling grid, and never coarser than T/2000.
pub fn quantum_time_step(period: f64, amplitude: f64, config: &SweepConfig) -> f64 {
    let n = config.n_trunc as f64;
    let spectral_radius =
        0.5 * config.chi * (n - 1.0) * (n - 2.0) + 2.0 * amplitude.abs() * n.sqrt()
            + 0.5 * config.gamma * n
            + 1.0;
    let dt_stable = 2.5 / spectral_radius;
    let mut half_steps = ((0.5 * period) / dt_stable).ceil().max(1000.0) as usize;
    // Samples per period s requires s | 2m for the sample grid to align.
    let s = config.samples_per_period;
    let q = if s % 2 == 0 { s / 2 } else { s }.max(1);
    half_steps = half_steps.div_ceil(q) * q;
    0.5 * period / half_steps as f64
}

struct SimulatedObservable {
    series: TimeSeries,
    dt: f64,
    jump_count: Option<usize>,
    mean_photon_number: Option<f64>,
}

/// Runs the configured simulation for one `(A, T)` cell and returns the
/// post-transient observable series.
fn simulate_observable(
    amplitude: f64,
    period: f64,
    config: &SweepConfig,
    seed: u64,
) -> Result<SimulatedObservable, CellError> {
    let drive = DriveProfile::new(amplitude, period)?;
    let t_end = config.total_periods * period;
    let t_transient = config.transient_periods * period;
    let sample_interval = period / config.samples_per_period as f64;
    match config.mode {
        Mode::Classical => {
            let params = ClassicalParams {
                chi: config.chi,
                gamma: config.gamma,
                nonlinear_conjugate: config.nonlinear_conjugate,
            };
            let dt = period / 2000.0;
            let (re, _) = integrate_classical(
                Complex64::new(0.0, 0.0),
                &params,
                &drive,
                t_end,
                dt,
                sample_interval,
            )?;
            Ok(SimulatedObservable {
                series: re.since(t_transient),
                dt,
                jump_count: None,
                mean_photon_number: None,
            })
        }
        Mode::QuantumX | Mode::QuantumPhotonCount => {
            let params = QuantumParams::new(config.chi, config.gamma, config.n_trunc);
            let dt = quantum_time_step(period, amplitude, config);
            let out = evolve_trajectory(
                &WaveFunction::vacuum(config.n_trunc),
                &params,
                &drive,
                t_end,
                dt,
                sample_interval,
                seed,
            )?;
            let photon_tail = out.photon_number.since(t_transient);
            let mean_photon = if photon_tail.is_empty() {
                 0.0
            } else {
                photon_tail.values.iter().sum::<f64>() / photon_tail.len() as f64
            };
            let series = match config.mode {
                Mode::QuantumX => out.position.since(t_transient),
                Mode::QuantumPhotonCount => bin_jump_counts(
                    &out.jumps,
                    config.bin_width,
                    config.bin_stride,
                    t_transient,
                    t_end,
                ),
                Mode::Classical => unreachable!(),
            };
            Ok(SimulatedObservable {
                series,
                dt,
                jump_count: Some(out.jumps.len()),
                mean_photon_number: Some(mean_photon),
            })
        }
    }
}

/// Picks embedding hyperparameters per the configured policy, shrinking the
/// MI scan range when the series is short.
fn choose_embedding(
    series: &TimeSeries,
    config: &SweepConfig,
) -> Result<(usize, usize), CellError> {
    match config.embedding {
        EmbeddingPolicy::Fixed { tau, dim } => Ok((tau, dim)),
        EmbeddingPolicy::Auto => {
            let prefix_len = series.len().min(config.estimator_samples);
            let prefix = TimeSeries::new(0.0, series.dt, series.values[..prefix_len].to_vec());
            let max_tau = config.max_tau.min(prefix_len / 4).max(2);
            let tau = estimate_delay_mi(&prefix, max_tau, config.mi_bins)?;
            let dim = estimate_dimension_fnn(
                &prefix,
                tau,
                config.max_embed_dim,
                config.fnn_r_tol,
                config.fnn_threshold,
            )?;
            Ok((tau, dim))
        }
    }
}

/// Embeds a series, subsamples landmarks, and summarizes the Rips diagram.
fn analyze_series(
    series: &TimeSeries,
    tau: usize,
    dim: usize,
    config: &SweepConfig,
) -> Result<(f64, PersistenceDiagram, PointCloud), CellError> {
    let cloud = delay_embed(series, tau, dim)?;
    let landmarks = maxmin_subsample(&cloud, config.subsample, 0)?;
    let dm = DistanceMatrix::from_cloud(&landmarks)?;
    let diameter = dm.max_distance();
    let diagram = if diameter > 0.0 {
        rips_persistence_budgeted(&dm, 1, diameter, config.max_simplices)?
    } else {
        // Point attractor: every landmark coincides; one essential
        // component and no cycles.
        PersistenceDiagram::from_features(vec![Feature {
            dim: 0,
            birth: 0.0,
            death: f64::INFINITY,
        }])
    };
    let l_avg = average_lifetime(&diagram, 1);
    Ok((l_avg, diagram, landmarks))
}

/// Full pipeline for one cell: simulate, embed, subsample, reduce,
/// summarize. Quantum cells with `config.trajectories > 1` average the
/// lifetime summary over replica seeds (the diagram reported is replica 0's).
pub fn run_cell(amplitude: f64, period: f64, config: &SweepConfig) -> Result<CellResult, CellError> {
    run_cell_seeded(amplitude, period, config, config.seed)
}

/// [`run_cell`] with an explicit seed; sweeps call this with the derived
/// per-cell seed.
pub fn run_cell_seeded(
    amplitude: f64,
    period: f64,
    config: &SweepConfig,
    seed: u64,
) -> Result<CellResult, CellError> {
    let sim = simulate_observable(amplitude, period, config, seed)?;
    let (tau, dim) = choose_embedding(&sim.series, config)?;
    let (mut l_avg, diagram, landmarks) = analyze_series(&sim.series, tau, dim, config)?;

    let replicas = if config.mode.is_quantum() {
        config.trajectories
    } else {
        1
    };
    if replicas > 1 {
        let mut lifetimes = vec![l_avg];
        for j in 1..replicas {
            let sim_j = simulate_observable(amplitude, period, config, trajectory_seed(seed, j))?;
            let (tau_j, dim_j) = choose_embedding(&sim_j.series, config)?;
            let (l_j, _, _) = analyze_series(&sim_j.series, tau_j, dim_j, config)?;
            lifetimes.push(l_j);
        }
        l_avg = lifetimes.iter().sum::<f64>() / lifetimes.len() as f64;
    }

    let cloud_points = sim.series.len().saturating_sub((dim - 1) * tau);
    Ok(CellResult {
        l_avg,
        diagnostics: CellDiagnostics {
            tau,
            dim,
            series_len: sim.series.len(),
            cloud_points,
            landmarks: landmarks.len(),
            h1_features: diagram.dim(1).count(),
            dt: sim.dt,
            jump_count: sim.jump_count,
            mean_photon_number: sim.mean_photon_number,
        },
        diagram,
        series: sim.series,
    })
}

/// Average-lifetime map over the drive plane with per-cell status flags.
/// Row-major over (T index, A index).
#[derive(Debug, Clone)]
pub struct PhaseDiagramGrid {
    pub a_values: Vec<f64>,
    pub t_values: Vec<f64>,
    values: Vec<Option<f64>>,
    status: Vec<CellStatus>,
}

impl PhaseDiagramGrid {
    /// Reassembles a grid from row-major (T, A) cell data, e.g. when
    /// re-rendering artifacts from a stored grid CSV.
    pub fn from_parts(
        a_values: Vec<f64>,
        t_values: Vec<f64>,
        values: Vec<Option<f64>>,
        status: Vec<CellStatus>,
    ) -> Result<Self, PipelineError> {
        let cells = a_values.len() * t_values.len();
        if values.len() != cells || status.len() != cells {
            return Err(PipelineError::Config(format!(
                "grid shape mismatch: {} x {} grid with {} values, {} statuses",
                t_values.len(),
                a_values.len(),
                values.len(),
                status.len()
            )));
        }
        Ok(Self {
            a_values,
            t_values,
            values,
            status,
        })
    }

    pub fn value(&self, t_index: usize, a_index: usize) -> Option<f64> {
        self.values[t_index * self.a_values.len() + a_index]
    }

    pub fn status(&self, t_index: usize, a_index: usize) -> CellStatus {
        self.status[t_index * self.a_values.len() + a_index]
    }

    /// Cell values in row-major order (missing for flagged cells).
    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }
}

/// One sweep cell: summary, diagram, and diagnostics, or the failure that
/// flagged it.
#[derive(Debug, Clone)]
pub struct CellReport {
    pub t_index: usize,
    pub a_index: usize,
    pub amplitude: f64,
    pub period: f64,
    pub seed: u64,
    pub status: CellStatus,
    pub l_avg: Option<f64>,
    pub diagram: Option<PersistenceDiagram>,
    pub diagnostics: Option<CellDiagnostics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub grid: PhaseDiagramGrid,
    pub cells: Vec<CellReport>,
}

impl SweepOutput {
    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.status != CellStatus::Ok).count()
    }
}

/// Evaluates [`run_cell_seeded`] over the configured (A, T) grid. Cells are
/// independent, seeded from the cell index, and run on the rayon pool;
/// failures flag their cell and the sweep continues.
pub fn sweep_phase_diagram(config: &SweepConfig) -> Result<SweepOutput, PipelineError> {
    config.validate()?;
    let a_values = config.a_grid.values();
    let t_values = config.t_grid.values();
    let n_a = a_values.len();

    let indices: Vec<usize> = (0..n_a * t_values.len()).collect();
    let cells: Vec<CellReport> = indices
        .par_iter()
        .map(|&idx| {
            let (ti, ai) = (idx / n_a, idx % n_a);
            let (amplitude, period) = (a_values[ai], t_values[ti]);
            let seed = cell_seed(config.seed, idx);
            match run_cell_seeded(amplitude, period, config, seed) {
                Ok(result) => CellReport {
                    t_index: ti,
                    a_index: ai,
                    amplitude,
                    period,
                    seed,
                    status: CellStatus::Ok,
                    l_avg: Some(result.l_avg),
                    diagram: Some(result.diagram),
                    diagnostics: Some(result.diagnostics),
                    error: None,
                },
                Err(err) => CellReport {
                    t_index: ti,
                    a_index: ai,
                    amplitude,
                    period,
                    seed,
                    status: CellStatus::from_error(&err),
                    l_avg: None,
                    diagram: None,
                    diagnostics: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();

    let values = cells.iter().map(|c| c.l_avg).collect();
    let status = cells.iter().map(|c| c.status).collect();
    Ok(SweepOutput {
        grid: PhaseDiagramGrid {
            a_values,
            t_values,
            values,
            status,
        },
        cells,
    })
}

/// Which hyperparameter a robustness row varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    Delay,
    Dimension,
}

impl SweptParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Delay => "tau",
            Self::Dimension => "dim",
        }
    }
}

/// Labeled (A, T) points and the hyperparameter ranges of a robustness
/// study. `fixed_dim` holds while `tau_values` vary and vice versa.
#[derive(Debug, Clone)]
pub struct RobustnessPlan {
    pub regular: Vec<(f64, f64)>,
    pub chaotic: Vec<(f64, f64)>,
    pub tau_values: Vec<usize>,
    pub d_values: Vec<usize>,
    pub fixed_tau: usize,
    pub fixed_dim: usize,
}

impl Default for RobustnessPlan {
    fn default() -> Self {
        Self {
            regular: vec![(1.0, 8.0), (1.0, 10.0), (0.8, 10.0)],
            chaotic: vec![(4.5, 8.0), (4.5, 10.0), (4.2, 10.0)],
            tau_values: (2..=12).collect(),
            d_values: vec![2, 3, 4],
            fixed_tau: 7,
            fixed_dim: 2,
        }
    }
}

/// Per-phase mean and spread of the lifetime summary at one hyperparameter
/// setting.
#[derive(Debug, Clone)]
pub struct RobustnessRow {
    pub swept: SweptParameter,
    pub value: usize,
    pub regular_mean: f64,
    pub regular_std: f64,
    pub chaotic_mean: f64,
    pub chaotic_std: f64,
    pub failures: usize,
}

/// Sweeps the embedding delay (at fixed dimension) and the embedding
/// dimension (at fixed delay) over labeled regular and chaotic points,
/// reusing one simulated trajectory per point.
pub fn robustness_study(
    config: &SweepConfig,
    plan: &RobustnessPlan,
) -> Result<Vec<RobustnessRow>, PipelineError> {
    config.validate()?;
    if plan.regular.is_empty() || plan.chaotic.is_empty() {
        return Err(PipelineError::Config(
            "robustness study needs at least one point per phase".into(),
        ));
    }

    let points: Vec<(f64, f64)> = plan
        .regular
        .iter()
        .chain(plan.chaotic.iter())
        .copied()
        .collect();
    let series: Vec<Result<TimeSeries, CellError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(a, t))| {
            simulate_observable(a, t, config, cell_seed(config.seed, i)).map(|s| s.series)
        })
        .collect();

    let settings: Vec<(SweptParameter, usize, usize, usize)> = plan
        .tau_values
        .iter()
        .map(|&tau| (SweptParameter::Delay, tau, tau, plan.fixed_dim))
        .chain(
            plan.d_values
                .iter()
                .map(|&d| (SweptParameter::Dimension, d, plan.fixed_tau, d)),
        )
        .collect();

    let rows: Vec<RobustnessRow> = settings
        .par_iter()
        .map(|&(swept, value, tau, dim)| {
            let mut lifetimes = vec![Vec::new(), Vec::new()];
            let mut failures = 0usize;
            for (i, sim) in series.iter().enumerate() {
                let phase = usize::from(i >= plan.regular.len());
                match sim {
                    Ok(s) => match analyze_series(s, tau, dim, config) {
                        Ok((l_avg, _, _)) => lifetimes[phase].push(l_avg),
                        Err(_) => failures += 1,
                    },
                    Err(_) => failures += 1,
                }
            }
            let (regular_mean, regular_std) = mean_std(&lifetimes[0]);
            let (chaotic_mean, chaotic_std) = mean_std(&lifetimes[1]);
            RobustnessRow {
                swept,
                value,
                regular_mean,
                regular_std,
                chaotic_mean,
                chaotic_std,
                failures,
            }
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_excludes_lower_edge() {
        let g = GridSpec { min: 0.0, max: 5.0, count: 8 };
        let v = g.values();
        assert_eq!(v.len(), 8);
        assert!(v[0] > 0.0);
        assert_eq!(*v.last().unwrap(), 5.0);
    }

    #[test]
    fn cell_seed_is_stable_and_zero_index_preserving() {
        assert_eq!(cell_seed(42, 0), 42);
        assert_ne!(cell_seed(42, 1), 42);
        assert_ne!(cell_seed(42, 1), cell_seed(42, 2));
        assert_eq!(cell_seed(42, 7), cell_seed(42, 7));
    }

    #[test]
    fn quantum_step_respects_alignment_and_stability() {
        let config = SweepConfig::desk();
        for (t, a) in [(8.0, 4.5), (50.0, 5.0), (6.25, 0.625)] {
            let dt = quantum_time_step(t, a, &config);
            let half = 0.5 * t / dt;
            assert!((half - half.round()).abs() < 1e-9, "pulse edge misaligned");
            let sample = t / config.samples_per_period as f64;
            let per_sample = sample / dt;
            assert!(
                (per_sample - per_sample.round()).abs() < 1e-9,
                "sample grid misaligned"
            );
            assert!(dt <= t / 2000.0 + 1e-12);
            let n = config.n_trunc as f64;
            let lambda = 0.5 * config.chi * (n - 1.0) * (n - 2.0) + 2.0 * a * n.sqrt();
            assert!(lambda * dt < 2.8, "RK4 stability bound violated");
        }
    }

    #[test]
    fn config_validation_catches_bad_grids() {
        let mut config = SweepConfig::desk();
        config.a_grid.count = 0;
        assert!(config.validate().is_err());
        let mut config = SweepConfig::desk();
        config.transient_periods = 500.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn classical_undriven_cell_has_zero_lifetime() {
        let mut config = SweepConfig::desk();
        config.mode = Mode::Classical;
        config.total_periods = 150.0;
        config.transient_periods = 50.0;
        config.embedding = EmbeddingPolicy::Fixed { tau: 5, dim: 2 };
        let result = run_cell(0.0, 8.0, &config).unwrap();
        assert_eq!(result.l_avg, 0.0);
        assert_eq!(result.diagnostics.dim, 2);
    }
}
