//! Artifact emission: CSV tables and SVG figures with deterministic,
//! config-hash-keyed file names. All floats are written in shortest
//! round-trip decimal form, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::classical::BifurcationColumn;
use crate::homology::PersistenceDiagram;
use crate::pipeline::{
    canonical_config_string, CellResult, PhaseDiagramGrid, RobustnessRow, SweepConfig, SweepOutput,
};
use crate::series::TimeSeries;

/// Which artifact families to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportFormats {
    pub csv: bool,
    pub svg: bool,
}

impl Default for ExportFormats {
    fn default() -> Self {
        Self { csv: true, svg: true }
    }
}

impl ExportFormats {
    /// Parses a comma-separated subset of `csv,svg`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut formats = Self { csv: false, svg: false };
        for part in s.split(',') {
            match part.trim() {
                "csv" => formats.csv = true,
                "svg" => formats.svg = true,
                "" => {}
                _ => return None,
            }
        }
        Some(formats)
    }
}

/// Files written by one export call, relative to `root`.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub root: PathBuf,
    pub files: Vec<PathBuf>,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Stable 16-hex-digit digest of the canonical config rendering.
pub fn config_hash(config: &SweepConfig) -> String {
    format!("{:016x}", fnv1a64(canonical_config_string(config).as_bytes()))
}

/// Shortest decimal rendering that round-trips and always carries a
/// fractional part or exponent (`1.0`, not `1`).
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// `t,value` rendering of a series.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series.iter() {
        let _ = writeln!(out, "{},{}", format_float(t), format_float(v));
    }
    out
}

/// `A,T,L_avg,status` rendering of a phase-diagram grid, row-major over
/// (T, A); flagged cells leave `L_avg` empty.
pub fn grid_csv(grid: &PhaseDiagramGrid) -> String {
    let mut out = String::from("A,T,L_avg,status\n");
    for (ti, &t) in grid.t_values.iter().enumerate() {
        for (ai, &a) in grid.a_values.iter().enumerate() {
            let value = grid
                .value(ti, ai)
                .map(format_float)
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_float(a),
                format_float(t),
                value,
                grid.status(ti, ai).as_str()
            );
        }
    }
    out
}

/// `A,n,re_xi` rendering of a bifurcation scan; `n` is the period index of
/// the stroboscopic sample. Diverged columns emit a single row with an
/// empty value and `diverged` status marker in the `re_xi` column position.
pub fn bifurcation_csv(columns: &[BifurcationColumn], n_min: usize) -> String {
    let mut out = String::from("A,n,re_xi\n");
    for col in columns {
        match &col.samples {
            Some(samples) => {
                for (k, v) in samples.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        format_float(col.amplitude),
                        n_min + 1 + k,
                        format_float(*v)
                    );
                }
            }
            None => {
                let _ = writeln!(out, "{},,diverged", format_float(col.amplitude));
            }
        }
    }
    out
}

/// Robustness-study table.
pub fn robustness_csv(rows: &[RobustnessRow]) -> String {
    let mut out =
        String::from("swept,value,regular_mean,regular_std,chaotic_mean,chaotic_std,failures\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.swept.as_str(),
            r.value,
            format_float(r.regular_mean),
            format_float(r.regular_std),
            format_float(r.chaotic_mean),
            format_float(r.chaotic_std),
            r.failures
        );
    }
    out
}

/// Parses a `t,value` CSV back into a series, inferring the grid from the
/// first two rows and validating uniformity.
pub fn parse_series_csv(text: &str) -> Result<TimeSeries, String> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('t')) {
            continue;
        }
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `t,value`", i + 1))?;
        times.push(t.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1))?);
        values.push(v.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    if values.len() < 2 {
        return Err("series needs at least two samples".into());
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err("time column must be strictly increasing".into());
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(format!("non-uniform time grid near row {}", i + 2));
        }
    }
    Ok(TimeSeries::new(times[0], dt, values))
}

/// Point-cloud CSV: header `x0,x1,...`, one point per row.
pub fn cloud_csv(cloud: &crate::embedding::PointCloud) -> String {
    let header: Vec<String> = (0..cloud.dim()).map(|j| format!("x{j}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for p in cloud.iter() {
        let row: Vec<String> = p.iter().map(|&v| format_float(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a point-cloud CSV written by [`cloud_csv`] (the header row is
/// optional).
pub fn parse_cloud_csv(text: &str) -> Result<crate::embedding::PointCloud, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    crate::embedding::PointCloud::from_rows(rows).map_err(|e| e.to_string())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Five-stop approximation of a perceptually uniform colormap, linearly
/// interpolated.
fn colormap(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (0.267, 0.005, 0.329),
        (0.229, 0.322, 0.545),
        (0.127, 0.566, 0.551),
        (0.369, 0.789, 0.383),
        (0.993, 0.906, 0.144),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let lerp = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    (
        lerp(STOPS[i].0, STOPS[i + 1].0),
        lerp(STOPS[i].1, STOPS[i + 1].1),
        lerp(STOPS[i].2, STOPS[i + 1].2),
    )
}

/// Heatmap of a phase-diagram grid: one `class="cell"` rect per grid cell,
/// linear color scale, axes labeled `A` and `T` (T increases upward).
/// Flagged cells render gray with their status in a `<title>`.
pub fn heatmap_svg(grid: &PhaseDiagramGrid) -> String {
    let (width, height) = (720.0, 540.0);
    let (left, right, top, bottom) = (80.0, 110.0, 30.0, 70.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let n_a = grid.a_values.len();
    let n_t = grid.t_values.len();
    let cell_w = plot_w / n_a as f64;
    let cell_h = plot_h / n_t as f64;

    let finite: Vec<f64> = grid.values().iter().flatten().copied().collect();
    let (lo, hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        s,
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );
    for (ti, _) in grid.t_values.iter().enumerate() {
        for (ai, _) in grid.a_values.iter().enumerate() {
            let x = left + ai as f64 * cell_w;
            let y = top + plot_h - (ti + 1) as f64 * cell_h;
            let (fill, title) = match grid.value(ti, ai) {
                Some(v) => {
                    let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
                    let (r, g, b) = colormap(t);
                    (format!("rgb({r},{g},{b})"), format!("L_avg = {v:.6}")
                    )
                }
                None => (
                    "rgb(136,136,136)".to_string(),
                    grid.status(ti, ai).as_str().to_string(),
                ),
            };
            let _ = writeln!(
                s,
                "  <rect class=\"cell\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cell_w:.2}\" height=\"{cell_h:.2}\" fill=\"{fill}\"><title>{}</title></rect>",
                xml_escape(&title)
            );
        }
    }
    // Axes.
    let axis_y = top + plot_h;
    let _ = writeln!(
        s,
        "  <line x1=\"{left}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"black\"/>",
        left + plot_w
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{axis_y}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\">A</text>",
        left + plot_w / 2.0,
        height - 16.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\" transform=\"rotate(-90 {} {})\">T</text>",
        24.0,
        top + plot_h / 2.0,
        24.0,
        top + plot_h / 2.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        left + cell_w / 2.0,
        axis_y + 18.0,
        grid.a_values[0]
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        left + plot_w - cell_w / 2.0,
        axis_y + 18.0,
        grid.a_values[n_a - 1]
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{}</text>",
        left - 6.0,
        top + plot_h - cell_h / 2.0 + 4.0,
        grid.t_values[0]
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{}</text>",
        left - 6.0,
        top + cell_h / 2.0 + 4.0,
        grid.t_values[n_t - 1]
    );
    // Color bar.
    if !finite.is_empty() {
        let bar_x = left + plot_w + 24.0;
        let bar_h = plot_h;
        let steps = 24;
        for k in 0..steps {
            let t = (k as f64 + 0.5) / steps as f64;
            let (r, g, b) = colormap(t);
            let y = top + bar_h - (k + 1) as f64 * bar_h / steps as f64;
            let _ = writeln!(
                s,
                "  <rect class=\"cbar\" x=\"{bar_x:.2}\" y=\"{y:.2}\" width=\"16\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>",
                bar_h / steps as f64 + 0.5
            );
        }
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{:.4}</text>",
            bar_x + 20.0,
            top + bar_h,
            lo
        );
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{:.4}</text>",
            bar_x + 20.0,
            top + 10.0,
            hi
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Scatter plot of a persistence diagram with the birth = death diagonal.
/// Dimension-0 features render blue, dimension-1 orange; essential features
/// sit on the dashed top line.
pub fn diagram_svg(diagram: &PersistenceDiagram) -> String {
    let (width, height) = (480.0, 480.0);
    let (left, right, top, bottom) = (70.0, 30.0, 30.0, 60.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let mut max_value = diagram
        .features()
        .iter()
        .flat_map(|f| [f.birth, if f.is_essential() { f.birth } else { f.death }])
        .fold(0.0f64, f64::max);
    if max_value <= 0.0 {
        max_value = 1.0;
    }
    let scale = max_value * 1.1;
    let sx = |v: f64| left + v / scale * plot_w;
    let sy = |v: f64| top + plot_h - v / scale * plot_h;
    let essential_y = top + 8.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        s,
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>",
        sx(0.0),
        sy(0.0),
        sx(scale),
        sy(scale)
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{left}\" y1=\"{essential_y}\" x2=\"{}\" y2=\"{essential_y}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
        left + plot_w
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"11\">inf</text>",
        left + plot_w + 2.0,
        essential_y + 4.0
    );
    for f in diagram.features() {
        let color = if f.dim == 0 { "steelblue" } else { "darkorange" };
        let cy = if f.is_essential() { essential_y } else { sy(f.death) };
        let _ = writeln!(
            s,
            "  <circle class=\"feature\" cx=\"{:.2}\" cy=\"{cy:.2}\" r=\"3.5\" fill=\"{color}\" fill-opacity=\"0.8\"><title>dim {} ({}, {})</title></circle>",
            sx(f.birth),
            f.dim,
            format_float(f.birth),
            if f.is_essential() { "inf".to_string() } else { format_float(f.death) }
        );
    }
    let axis_y = top + plot_h;
    let _ = writeln!(
        s,
        "  <line x1=\"{left}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"black\"/>",
        left + plot_w
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{axis_y}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">birth</text>",
        left + plot_w / 2.0,
        height - 14.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 {} {})\">death</text>",
        20.0,
        top + plot_h / 2.0,
        20.0,
        top + plot_h / 2.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{left}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">0</text>",
        axis_y + 16.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.4}</text>",
        left + plot_w,
        axis_y + 16.0,
        scale
    );
    s.push_str("</svg>\n");
    s
}

fn write_artifact(
    root: &Path,
    files: &mut Vec<PathBuf>,
    rel: impl Into<PathBuf>,
    content: &str,
) -> io::Result<()> {
    let rel = rel.into();
    let path = root.join(&rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, content)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    files.push(rel);
    Ok(())
}

fn finish_manifest(root: PathBuf, mut files: Vec<PathBuf>) -> io::Result<Manifest> {
    files.sort();
    let mut listing = String::new();
    for f in &files {
        let _ = writeln!(listing, "{}", f.display());
    }
    let path = root.join("manifest.txt");
    fs::write(&path, listing)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    files.push(PathBuf::from("manifest.txt"));
    Ok(Manifest { root, files })
}

/// Writes a sweep's grid CSV, per-cell diagnostics and diagram files, and
/// the heatmap, under `out_dir/sweep-<hash>/`.
pub fn export_sweep(
    out_dir: &Path,
    config: &SweepConfig,
    output: &SweepOutput,
    formats: ExportFormats,
) -> io::Result<Manifest> {
    let root = out_dir.join(format!("sweep-{}", &config_hash(config)[..12]));
    fs::create_dir_all(&root)?;
    let mut files = Vec::new();
    write_artifact(&root, &mut files, "config.txt", &canonical_config_string(config))?;
    if formats.csv {
        write_artifact(&root, &mut files, "grid.csv", &grid_csv(&output.grid))?;
        let mut diag = String::from(
            "A,T,seed,status,l_avg,tau,dim,series_len,landmarks,h1_features,jumps,mean_n,error\n",
        );
        for c in &output.cells {
            let d = c.diagnostics.as_ref();
            let _ = writeln!(
                diag,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                format_float(c.amplitude),
                format_float(c.period),
                c.seed,
                c.status.as_str(),
                c.l_avg.map(format_float).unwrap_or_default(),
                d.map(|d| d.tau.to_string()).unwrap_or_default(),
                d.map(|d| d.dim.to_string()).unwrap_or_default(),
                d.map(|d| d.series_len.to_string()).unwrap_or_default(),
                d.map(|d| d.landmarks.to_string()).unwrap_or_default(),
                d.map(|d| d.h1_features.to_string()).unwrap_or_default(),
                d.and_then(|d| d.jump_count).map(|j| j.to_string()).unwrap_or_default(),
                d.and_then(|d| d.mean_photon_number).map(format_float).unwrap_or_default(),
                c.error.clone().map(|e| e.replace(',', ";")).unwrap_or_default()
            );
        }
        write_artifact(&root, &mut files, "diagnostics.csv", &diag)?;
        for c in &output.cells {
            if let Some(diagram) = &c.diagram {
                write_artifact(
                    &root,
                    &mut files,
                    format!("cells/c{:03}_{:03}.diagram.csv", c.t_index, c.a_index),
                    &diagram.to_csv(),
                )?;
            }
        }
    }
    if formats.svg {
        write_artifact(&root, &mut files, "heatmap.svg", &heatmap_svg(&output.grid))?;
        for c in &output.cells {
            if let Some(diagram) = &c.diagram {
                write_artifact(
                    &root,
                    &mut files,
                    format!("cells/c{:03}_{:03}.diagram.svg", c.t_index, c.a_index),
                    &diagram_svg(diagram),
                )?;
            }
        }
    }
    finish_manifest(root, files)
}

/// Writes one cell's series, diagram, and diagnostics under
/// `out_dir/cell-<hash>/`.
pub fn export_cell(
    out_dir: &Path,
    config: &SweepConfig,
    amplitude: f64,
    period: f64,
    result: &CellResult,
    formats: ExportFormats,
) -> io::Result<Manifest> {
    let root = out_dir.join(format!("cell-{}", &config_hash(config)[..12]));
    fs::create_dir_all(&root)?;
    let mut files = Vec::new();
    write_artifact(&root, &mut files, "config.txt", &canonical_config_string(config))?;
    let d = &result.diagnostics;
    let mut info = String::new();
    let _ = writeln!(info, "amplitude = {}", format_float(amplitude));
    let _ = writeln!(info, "period = {}", format_float(period));
    let _ = writeln!(info, "l_avg = {}", format_float(result.l_avg));
    let _ = writeln!(info, "tau = {}", d.tau);
    let _ = writeln!(info, "dim = {}", d.dim);
    let _ = writeln!(info, "series_len = {}", d.series_len);
    let _ = writeln!(info, "cloud_points = {}", d.cloud_points);
    let _ = writeln!(info, "landmarks = {}", d.landmarks);
    let _ = writeln!(info, "h1_features = {}", d.h1_features);
    let _ = writeln!(info, "dt = {}", format_float(d.dt));
    if let Some(j) = d.jump_count {
        let _ = writeln!(info, "jumps = {j}");
    }
    if let Some(n) = d.mean_photon_number {
        let _ = writeln!(info, "mean_photon_number = {}", format_float(n));
    }
    write_artifact(&root, &mut files, "diagnostics.txt", &info)?;
    if formats.csv {
        write_artifact(&root, &mut files, "series.csv", &series_csv(&result.series))?;
        write_artifact(&root, &mut files, "diagram.csv", &result.diagram.to_csv())?;
    }
    if formats.svg {
        write_artifact(&root, &mut files, "diagram.svg", &diagram_svg(&result.diagram))?;
    }
    finish_manifest(root, files)
}

/// Writes a robustness table under `out_dir/robustness-<hash>/`.
pub fn export_robustness(
    out_dir: &Path,
    config: &SweepConfig,
    rows: &[RobustnessRow],
) -> io::Result<Manifest> {
    let root = out_dir.join(format!("robustness-{}", &config_hash(config)[..12]));
    fs::create_dir_all(&root)?;
    let mut files = Vec::new();
    write_artifact(&root, &mut files, "config.txt", &canonical_config_string(config))?;
    write_artifact(&root, &mut files, "robustness.csv", &robustness_csv(rows))?;
    finish_manifest(root, files)
}
