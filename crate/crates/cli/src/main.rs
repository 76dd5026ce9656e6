//! Command-line pipeline for topological chaos detection in the damped,
//! pulse-driven Kerr cavity.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 when a sweep or
//! study finished with per-cell failures (partial results are still
//! written).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use kerr_tda::classical::{
    bifurcation_scan, integrate_classical, ClassicalParams, DriveProfile,
};
use kerr_tda::embedding::{delay_embed, estimate_delay_mi, estimate_dimension_fnn};
use kerr_tda::export::{
    self, bifurcation_csv, cloud_csv, config_hash, diagram_svg, export_cell, export_robustness,
    export_sweep, heatmap_svg, parse_cloud_csv, parse_series_csv, series_csv, ExportFormats,
};
use kerr_tda::homology::{
    average_lifetime, maxmin_subsample, rips_persistence_budgeted, DistanceMatrix,
    PersistenceDiagram,
};
use kerr_tda::pipeline::{
    apply_config_text, canonical_config_string, run_cell, robustness_study, sweep_phase_diagram,
    CellStatus, Mode, PhaseDiagramGrid, RobustnessPlan, SweepConfig,
};
use kerr_tda::quantum::{evolve_trajectory, QuantumParams, WaveFunction};
use kerr_tda::Complex64;

#[derive(Parser)]
#[command(
    name = "kerr-tda",
    about = "Chaos detection for the pulse-driven Kerr cavity via attractor topology",
    version
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file with `key = value` lines (see README for keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base RNG seed; cells derive their own seeds from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Parameter preset: `desk` (small truncation/window/grid) or `full`
    /// (production scale).
    #[arg(long, global = true, default_value = "desk")]
    preset: String,
    /// Observable: classical, quantum-x, or quantum-photon-count.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the classical mean-field equation; writes Re/Im series.
    ClassicalSim {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        period: f64,
    },
    /// Run one quantum trajectory; writes <x>, Re<a>, <n>, and jump times.
    QuantumSim {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        period: f64,
    },
    /// Stroboscopic bifurcation scan over drive amplitude at fixed period.
    Bifurcation {
        #[arg(long)]
        period: f64,
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 5.0)]
        a_max: f64,
        #[arg(long, default_value_t = 200)]
        a_count: usize,
        #[arg(long, default_value_t = 40)]
        n_min: usize,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Delay-embed a time-series CSV into a point-cloud CSV.
    Embed {
        /// Input CSV with `t,value` rows.
        #[arg(long)]
        input: PathBuf,
        /// Embedding delay in samples (estimated from mutual information
        /// when omitted).
        #[arg(long)]
        tau: Option<usize>,
        /// Embedding dimension (estimated via false nearest neighbors when
        /// omitted).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Vietoris-Rips persistence of a point-cloud CSV.
    Ph {
        /// Input CSV with one point per row.
        #[arg(long)]
        input: PathBuf,
        /// Filtration cutoff (defaults to the cloud diameter).
        #[arg(long)]
        max_radius: Option<f64>,
    },
    /// Full pipeline for a single (A, T) cell.
    Cell {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        period: f64,
    },
    /// Average-lifetime phase diagram over the configured (A, T) grid.
    Sweep,
    /// Embedding-hyperparameter robustness study over labeled points.
    Robustness {
        /// Regular-phase points as `A:T` pairs, comma separated.
        #[arg(long)]
        regular: Option<String>,
        /// Chaotic-phase points as `A:T` pairs, comma separated.
        #[arg(long)]
        chaotic: Option<String>,
        /// Delays to sweep at the fixed dimension.
        #[arg(long)]
        tau_values: Option<String>,
        /// Dimensions to sweep at the fixed delay.
        #[arg(long)]
        d_values: Option<String>,
        #[arg(long, default_value_t = 7)]
        fixed_tau: usize,
        #[arg(long, default_value_t = 2)]
        fixed_dim: usize,
    },
    /// Re-render artifacts (e.g. SVGs) from a previously written run
    /// directory.
    Export {
        /// A `sweep-*` or `cell-*` directory written by this tool.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of `csv,svg`.
        #[arg(long, default_value = "csv,svg")]
        formats: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Treat argument errors as configuration errors (exit 1),
            // keeping clap's rendered help/usage output.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(cell_failures) => {
            if cell_failures {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Builds the effective configuration: preset, then config file, then
/// flag overrides.
fn build_config(common: &Common) -> Result<SweepConfig> {
    let mut config = match common.preset.as_str() {
        "desk" => SweepConfig::desk(),
        "full" => SweepConfig::full(),
        other => bail!("unknown preset {other:?}; expected desk or full"),
    };
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        apply_config_text(&mut config, &text)?;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(mode) = &common.mode {
        config.mode = Mode::parse(mode)
            .ok_or_else(|| anyhow!("unknown mode {mode:?}; expected classical, quantum-x, or quantum-photon-count"))?;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(threads) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let config = build_config(&cli.common)?;
    let out = &cli.common.out;
    match cli.command {
        Command::ClassicalSim { amplitude, period } => {
            classical_sim(&config, amplitude, period, out)?;
            Ok(false)
        }
        Command::QuantumSim { amplitude, period } => {
            quantum_sim(&config, amplitude, period, out)?;
            Ok(false)
        }
        Command::Bifurcation {
            period,
            a_min,
            a_max,
            a_count,
            n_min,
            n_max,
        } => {
            bifurcation(&config, period, a_min, a_max, a_count, n_min, n_max, out)
        }
        Command::Embed { input, tau, dim } => {
            embed(&config, &input, tau, dim, out)?;
            Ok(false)
        }
        Command::Ph { input, max_radius } => {
            ph(&config, &input, max_radius, out)?;
            Ok(false)
        }
        Command::Cell { amplitude, period } => {
            let result = run_cell(amplitude, period, &config)
                .map_err(|e| anyhow!("cell (A={amplitude}, T={period}) failed: {e}"))?;
            let manifest = export_cell(out, &config, amplitude, period, &result, ExportFormats::default())?;
            println!(
                "cell (A={amplitude}, T={period}): L_avg = {}, tau = {}, dim = {}",
                result.l_avg, result.diagnostics.tau, result.diagnostics.dim
            );
            println!("wrote {}", manifest.root.display());
            Ok(false)
        }
        Command::Sweep => {
            let output = sweep_phase_diagram(&config)?;
            let failed = output.failed_cells();
            let manifest = export_sweep(out, &config, &output, ExportFormats::default())?;
            println!(
                "sweep {}x{}: {} cells, {} failed",
                config.t_grid.count,
                config.a_grid.count,
                output.cells.len(),
                failed
            );
            println!("wrote {}", manifest.root.display());
            Ok(failed > 0)
        }
        Command::Robustness {
            regular,
            chaotic,
            tau_values,
            d_values,
            fixed_tau,
            fixed_dim,
        } => {
            let mut plan = RobustnessPlan::default();
            if let Some(points) = regular {
                plan.regular = parse_points(&points)?;
            }
            if let Some(points) = chaotic {
                plan.chaotic = parse_points(&points)?;
            }
            if let Some(v) = tau_values {
                plan.tau_values = parse_list(&v)?;
            }
            if let Some(v) = d_values {
                plan.d_values = parse_list(&v)?;
            }
            plan.fixed_tau = fixed_tau;
            plan.fixed_dim = fixed_dim;
            let rows = robustness_study(&config, &plan)?;
            let failures: usize = rows.iter().map(|r| r.failures).sum();
            let manifest = export_robustness(out, &config, &rows)?;
            for r in &rows {
                println!(
                    "{}={}: regular {:.4} +/- {:.4}, chaotic {:.4} +/- {:.4}",
                    r.swept.as_str(),
                    r.value,
                    r.regular_mean,
                    r.regular_std,
                    r.chaotic_mean,
                    r.chaotic_std
                );
            }
            println!("wrote {}", manifest.root.display());
            Ok(failures > 0)
        }
        Command::Export { input, formats } => {
            let formats = ExportFormats::parse(&formats)
                .ok_or_else(|| anyhow!("invalid formats {formats:?}; expected subset of csv,svg"))?;
            reexport(&input, formats)?;
            Ok(false)
        }
    }
}

fn write_named(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn classical_sim(config: &SweepConfig, amplitude: f64, period: f64, out: &Path) -> Result<()> {
    let params = ClassicalParams {
        chi: config.chi,
        gamma: config.gamma,
        nonlinear_conjugate: config.nonlinear_conjugate,
    };
    let drive = DriveProfile::new(amplitude, period)?;
    let dt = period / 2000.0;
    let (re, im) = integrate_classical(
        Complex64::new(0.0, 0.0),
        &params,
        &drive,
        config.total_periods * period,
        dt,
        period / config.samples_per_period as f64,
    )?;
    let dir = out.join(format!(
        "classical-{}-a{amplitude}-t{period}",
        &config_hash(config)[..8]
    ));
    write_named(&dir, "config.txt", &canonical_config_string(config))?;
    write_named(&dir, "re.csv", &series_csv(&re))?;
    let path = write_named(&dir, "im.csv", &series_csv(&im))?;
    println!("wrote {}", path.parent().unwrap().display());
    Ok(())
}

fn quantum_sim(config: &SweepConfig, amplitude: f64, period: f64, out: &Path) -> Result<()> {
    let params = QuantumParams::new(config.chi, config.gamma, config.n_trunc);
    let drive = DriveProfile::new(amplitude, period)?;
    let dt = kerr_tda::pipeline::quantum_time_step(period, amplitude, config);
    let traj = evolve_trajectory(
        &WaveFunction::vacuum(config.n_trunc),
        &params,
        &drive,
        config.total_periods * period,
        dt,
        period / config.samples_per_period as f64,
        config.seed,
    )?;
    let dir = out.join(format!(
        "quantum-{}-a{amplitude}-t{period}",
        &config_hash(config)[..8]
    ));
    write_named(&dir, "config.txt", &canonical_config_string(config))?;
    write_named(&dir, "x.csv", &series_csv(&traj.position))?;
    write_named(&dir, "re_a.csv", &series_csv(&traj.re_annihilation))?;
    write_named(&dir, "n.csv", &series_csv(&traj.photon_number))?;
    let mut jumps = String::from("t\n");
    for &t in traj.jumps.times() {
        jumps.push_str(&export::format_float(t));
        jumps.push('\n');
    }
    let path = write_named(&dir, "jumps.csv", &jumps)?;
    println!(
        "trajectory: {} jumps, dt = {dt}",
        traj.jumps.len()
    );
    println!("wrote {}", path.parent().unwrap().display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bifurcation(
    config: &SweepConfig,
    period: f64,
    a_min: f64,
    a_max: f64,
    a_count: usize,
    n_min: usize,
    n_max: usize,
    out: &Path,
) -> Result<bool> {
    if a_count == 0 || a_max <= a_min {
        bail!("need a_count >= 1 and a_min < a_max");
    }
    let params = ClassicalParams {
        chi: config.chi,
        gamma: config.gamma,
        nonlinear_conjugate: config.nonlinear_conjugate,
    };
    let a_values: Vec<f64> = (0..a_count)
        .map(|i| a_min + (a_max - a_min) * (i + 1) as f64 / a_count as f64)
        .collect();
    let columns = bifurcation_scan(&a_values, period, &params, n_min, n_max, period / 2000.0)?;
    let diverged = columns.iter().filter(|c| c.samples.is_none()).count();
    let dir = out.join(format!("bifurcation-{}-t{period}", &config_hash(config)[..8]));
    write_named(&dir, "config.txt", &canonical_config_string(config))?;
    let path = write_named(&dir, "bifurcation.csv", &bifurcation_csv(&columns, n_min))?;
    println!(
        "bifurcation at T={period}: {} columns, {} diverged",
        columns.len(),
        diverged
    );
    println!("wrote {}", path.parent().unwrap().display());
    Ok(diverged > 0)
}

fn embed(
    config: &SweepConfig,
    input: &Path,
    tau: Option<usize>,
    dim: Option<usize>,
    out: &Path,
) -> Result<()> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading series {}", input.display()))?;
    let series = parse_series_csv(&text).map_err(|e| anyhow!("{}: {e}", input.display()))?;
    let tau = match tau {
        Some(t) => t,
        None => estimate_delay_mi(
            &series,
            config.max_tau.min(series.len() / 4).max(2),
            config.mi_bins,
        )?,
    };
    let dim = match dim {
        Some(d) => d,
        None => estimate_dimension_fnn(
            &series,
            tau,
            config.max_embed_dim,
            config.fnn_r_tol,
            config.fnn_threshold,
        )?,
    };
    let cloud = delay_embed(&series, tau, dim)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    let path = write_named(
        &out.join("embed"),
        &format!("{stem}-tau{tau}-d{dim}.cloud.csv"),
        &cloud_csv(&cloud),
    )?;
    println!("embedded {} points at tau = {tau}, dim = {dim}", cloud.len());
    println!("wrote {}", path.display());
    Ok(())
}

fn ph(config: &SweepConfig, input: &Path, max_radius: Option<f64>, out: &Path) -> Result<()> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading cloud {}", input.display()))?;
    let cloud = parse_cloud_csv(&text).map_err(|e| anyhow!("{}: {e}", input.display()))?;
    let landmarks = maxmin_subsample(&cloud, config.subsample, 0)?;
    let dm = DistanceMatrix::from_cloud(&landmarks)?;
    let radius = max_radius.unwrap_or_else(|| dm.max_distance());
    let diagram = rips_persistence_budgeted(&dm, 1, radius, config.max_simplices)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("cloud");
    let dir = out.join("ph");
    write_named(&dir, &format!("{stem}.diagram.csv"), &diagram.to_csv())?;
    let path = write_named(&dir, &format!("{stem}.diagram.svg"), &diagram_svg(&diagram))?;
    println!(
        "persistence of {} landmarks (radius {radius}): L_avg(H0) = {}, L_avg(H1) = {}",
        landmarks.len(),
        average_lifetime(&diagram, 0),
        average_lifetime(&diagram, 1)
    );
    println!("wrote {}", path.parent().unwrap().display());
    Ok(())
}

fn parse_points(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|pair| {
            let (a, t) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| anyhow!("expected A:T, got {pair:?}"))?;
            Ok((a.trim().parse()?, t.trim().parse()?))
        })
        .collect()
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|e| anyhow!("{e}: {v:?}")))
        .collect()
}

/// Re-renders figures from a stored run directory (grid and diagram CSVs).
fn reexport(input: &Path, formats: ExportFormats) -> Result<()> {
    let mut wrote = 0usize;
    let grid_path = input.join("grid.csv");
    if grid_path.exists() && formats.svg {
        let grid = parse_grid_csv(&fs::read_to_string(&grid_path)?)?;
        fs::write(input.join("heatmap.svg"), heatmap_svg(&grid))?;
        wrote += 1;
    }
    for entry in walk_csvs(input)? {
        if entry
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(".diagram.csv"))
            && formats.svg
        {
            let diagram = PersistenceDiagram::from_csv(&fs::read_to_string(&entry)?)?;
            let svg_path = entry.with_extension("svg");
            fs::write(&svg_path, diagram_svg(&diagram))?;
            wrote += 1;
        }
    }
    let diagram_path = input.join("diagram.csv");
    if diagram_path.exists() && formats.svg {
        let diagram = PersistenceDiagram::from_csv(&fs::read_to_string(&diagram_path)?)?;
        fs::write(input.join("diagram.svg"), diagram_svg(&diagram))?;
        wrote += 1;
    }
    if wrote == 0 {
        bail!(
            "nothing to export from {}: no grid.csv or *.diagram.csv found",
            input.display()
        );
    }
    println!("re-rendered {wrote} figure(s) under {}", input.display());
    Ok(())
}

fn walk_csvs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        if let Ok(entries) = fs::read_dir(&d) {
            for entry in entries.flatten() {
                let path = entry.path();
                if path.is_dir() {
                    stack.push(path);
                } else if path.extension().is_some_and(|e| e == "csv") {
                    out.push(path);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Parses the `A,T,L_avg,status` grid CSV back into a grid (row-major over
/// T then A, as written by this tool).
fn parse_grid_csv(text: &str) -> Result<PhaseDiagramGrid> {
    let mut rows: Vec<(f64, f64, Option<f64>, CellStatus)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || i == 0 {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            bail!("grid CSV line {}: expected 4 columns", i + 1);
        }
        let a: f64 = parts[0].parse()?;
        let t: f64 = parts[1].parse()?;
        let value = if parts[2].is_empty() {
            None
        } else {
            Some(parts[2].parse()?)
        };
        let status = CellStatus::parse(parts[3])
            .ok_or_else(|| anyhow!("grid CSV line {}: unknown status {:?}", i + 1, parts[3]))?;
        rows.push((a, t, value, status));
    }
    let mut a_values: Vec<f64> = Vec::new();
    for &(a, _, _, _) in &rows {
        if a_values.contains(&a) {
            break;
        }
        a_values.push(a);
    }
    if a_values.is_empty() || rows.len() % a_values.len() != 0 {
        bail!("grid CSV is not rectangular");
    }
    let t_values: Vec<f64> = rows
        .chunks(a_values.len())
        .map(|chunk| chunk[0].1)
        .collect();
    let values = rows.iter().map(|r| r.2).collect();
    let status = rows.iter().map(|r| r.3).collect();
    Ok(PhaseDiagramGrid::from_parts(a_values, t_values, values, status)?)
}
