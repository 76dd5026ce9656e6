// Temporary dev probe; deleted before shipping.

fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut rank = vec![0usize; values.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn mi(x: &[f64], tau: usize, n_bins: usize) -> f64 {
    let n = x.len() - tau;
    let lead: Vec<f64> = x[tau..].to_vec();
    let lag: Vec<f64> = x[..n].to_vec();
    let bins_of = |v: &[f64]| -> Vec<usize> { ranks(v).iter().map(|&r| r * n_bins / v.len()).collect() };
    let bx = bins_of(&lead);
    let by = bins_of(&lag);
    let mut joint = vec![0u32; n_bins * n_bins];
    let mut px = vec![0u32; n_bins];
    let mut py = vec![0u32; n_bins];
    for (&i, &j) in bx.iter().zip(&by) {
        joint[i * n_bins + j] += 1;
        px[i] += 1;
        py[j] += 1;
    }
    let total = n as f64;
    let mut out = 0.0;
    for i in 0..n_bins {
        for j in 0..n_bins {
            let c = joint[i * n_bins + j];
            if c > 0 {
                let pxy = c as f64 / total;
                out += pxy * (pxy * total * total / (px[i] as f64 * py[j] as f64)).ln();
            }
        }
    }
    out
}

#[test]
#[ignore]
fn probe_mi_sequence() {
    let x: Vec<f64> = (0..2000)
        .map(|i| (i as f64 * 0.02 * std::f64::consts::PI).sin())
        .collect();
    for nb in [8usize, 16, 32] {
        let vals: Vec<f64> = (1..=40).map(|t| mi(&x, t, nb)).collect();
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.3}")).collect();
        println!("bins={nb}: {}", row.join(" "));
    }
}

fn mi_width(x: &[f64], tau: usize, n_bins: usize) -> f64 {
    let n = x.len() - tau;
    let lead = &x[tau..];
    let lag = &x[..n];
    let bin = |v: f64, lo: f64, hi: f64| -> usize {
        if hi <= lo { return 0; }
        (((v - lo) / (hi - lo) * n_bins as f64) as usize).min(n_bins - 1)
    };
    let (lo1, hi1) = lead.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (lo2, hi2) = lag.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut joint = vec![0u32; n_bins * n_bins];
    let mut px = vec![0u32; n_bins];
    let mut py = vec![0u32; n_bins];
    for k in 0..n {
        let i = bin(lead[k], lo1, hi1);
        let j = bin(lag[k], lo2, hi2);
        joint[i * n_bins + j] += 1;
        px[i] += 1;
        py[j] += 1;
    }
    let total = n as f64;
    let mut out = 0.0;
    for i in 0..n_bins {
        for j in 0..n_bins {
            let c = joint[i * n_bins + j];
            if c > 0 {
                let pxy = c as f64 / total;
                out += pxy * (pxy * total * total / (px[i] as f64 * py[j] as f64)).ln();
            }
        }
    }
    out
}

#[test]
#[ignore]
fn probe_mi_width_sequence() {
    let x: Vec<f64> = (0..2000)
        .map(|i| (i as f64 * 0.02 * std::f64::consts::PI).sin())
        .collect();
    for nb in [8usize, 16, 32] {
        let vals: Vec<f64> = (1..=40).map(|t| mi_width(&x, t, nb)).collect();
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.3}")).collect();
        println!("width bins={nb}: {}", row.join(" "));
    }
}

#[test]
#[ignore]
fn probe_mi_noisy_sine() {
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for amp in [0.02f64, 0.05, 0.1] {
        let x: Vec<f64> = (0..2000)
            .map(|i| (i as f64 * 0.02 * std::f64::consts::PI).sin() + amp * next())
            .collect();
        let vals: Vec<f64> = (1..=40).map(|t| mi(&x, t, 16)).collect();
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.3}")).collect();
        println!("quantile noisy amp={amp}: {}", row.join(" "));
        // first strict local min
        let mut first = None;
        for i in 1..vals.len() - 1 {
            if vals[i] < vals[i - 1] && vals[i] < vals[i + 1] {
                first = Some(i + 1);
                break;
            }
        }
        println!("  -> first strict local min at tau={first:?}");
    }
}

use kerr_tda::classical::{bifurcation_scan, integrate_classical, ClassicalParams, DriveProfile};
use kerr_tda::embedding::{delay_embed, estimate_delay_mi as mi_est, estimate_dimension_fnn};
use kerr_tda::homology::{average_lifetime, maxmin_subsample, rips_persistence, DistanceMatrix};
use kerr_tda::Complex64;

#[test]
#[ignore]
fn probe_classical_cells() {
    for (a, label) in [(1.0, "regular"), (4.5, "chaotic")] {
        let t = 8.0;
        let params = ClassicalParams::standard_kerr(0.008, 0.05);
        let drive = DriveProfile::new(a, t).unwrap();
        let dt = t / 2000.0;
        let start = std::time::Instant::now();
        let (re, _) = integrate_classical(Complex64::new(0.0, 0.0), &params, &drive, 1000.0 * t, dt, t / 20.0).unwrap();
        let series = re.since(400.0 * t);
        println!("[{label}] sim {:?}, series len {}", start.elapsed(), series.len());
        let prefix = kerr_tda::series::TimeSeries::new(0.0, series.dt, series.values[..2000].to_vec());
        let tau = mi_est(&prefix, 60, 16).unwrap();
        let dim = estimate_dimension_fnn(&prefix, tau, 4, 15.0, 0.01).unwrap();
        println!("[{label}] auto tau={tau} dim={dim}");
        for (tt, dd) in [(tau, dim), (20, 2)] {
            let cloud = delay_embed(&series, tt, dd).unwrap();
            let lm = maxmin_subsample(&cloud, 400, 0).unwrap();
            let dm = DistanceMatrix::from_cloud(&lm).unwrap();
            let start = std::time::Instant::now();
            let diag = rips_persistence(&dm, 1, dm.max_distance()).unwrap();
            let elapsed = start.elapsed();
            let mut lifetimes: Vec<f64> = diag.finite(1).map(|f| f.death - f.birth).collect();
            lifetimes.sort_by(|x, y| y.total_cmp(x));
            let l_avg = average_lifetime(&diag, 1);
            println!(
                "[{label}] tau={tt} d={dd}: rips {elapsed:?}, h1 count={}, L_avg={l_avg:.4}, top5={:?}",
                lifetimes.len(),
                &lifetimes[..lifetimes.len().min(5)]
            );
        }
    }
}

#[test]
#[ignore]
fn probe_bifurcation_t10() {
    let params = ClassicalParams::standard_kerr(0.008, 0.05);
    let a_values: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
    let cols = bifurcation_scan(&a_values, 10.0, &params, 40, 100, 10.0 / 2000.0).unwrap();
    for c in &cols {
        let s = c.samples.as_ref().unwrap();
        let (mn, mx) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        println!("A={:.1} spread={:.4}", c.amplitude, mx - mn);
    }
}

use kerr_tda::pipeline::{run_cell, EmbeddingPolicy, Mode, SweepConfig};

#[test]
#[ignore]
fn probe_desk_cells() {
    let mut config = SweepConfig::desk();
    config.subsample = 256;
    for mode in [Mode::Classical, Mode::QuantumX] {
        config.mode = mode;
        for (a, label) in [(1.0, "regular"), (4.5, "chaotic")] {
            let start = std::time::Instant::now();
            match run_cell(a, 8.0, &config) {
                Ok(r) => {
                    let mut lifetimes: Vec<f64> =
                        r.diagram.finite(1).map(|f| f.death - f.birth).collect();
                    lifetimes.sort_by(|x, y| y.total_cmp(x));
                    println!(
                        "{:?} [{label}] {:?}: L_avg={:.4} tau={} dim={} h1={} jumps={:?} mean_n={:?} top3={:?}",
                        mode,
                        start.elapsed(),
                        r.l_avg,
                        r.diagnostics.tau,
                        r.diagnostics.dim,
                        r.diagnostics.h1_features,
                        r.diagnostics.jump_count,
                        r.diagnostics.mean_photon_number,
                        &lifetimes[..lifetimes.len().min(3)]
                    );
                }
                Err(e) => println!("{mode:?} [{label}] FAILED: {e}"),
            }
        }
    }
}

#[test]
#[ignore]
fn probe_truncation_requirement() {
    for n in [180usize, 200, 230] {
        let mut config = SweepConfig::desk();
        config.mode = Mode::QuantumX;
        config.n_trunc = n;
        config.total_periods = 120.0;
        config.transient_periods = 100.0;
        let start = std::time::Instant::now();
        match run_cell(5.0, 8.0, &config) {
            Ok(r) => println!(
                "N={n}: ok ({:?}) mean_n={:?}",
                start.elapsed(),
                r.diagnostics.mean_photon_number
            ),
            Err(e) => println!("N={n}: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_quantum_direction() {
    let mut config = SweepConfig::desk();
    config.mode = Mode::QuantumX;
    for (a, label) in [(1.0, "regular"), (4.5, "chaotic")] {
        let start = std::time::Instant::now();
        match run_cell(a, 8.0, &config) {
            Ok(r) => {
                let mut lifetimes: Vec<f64> =
                    r.diagram.finite(1).map(|f| f.death - f.birth).collect();
                lifetimes.sort_by(|x, y| y.total_cmp(x));
                println!(
                    "quantum [{label}] {:?}: L_avg={:.4} tau={} dim={} h1={} mean_n={:.1} top3={:?}",
                    start.elapsed(),
                    r.l_avg,
                    r.diagnostics.tau,
                    r.diagnostics.dim,
                    r.diagnostics.h1_features,
                    r.diagnostics.mean_photon_number.unwrap(),
                    &lifetimes[..lifetimes.len().min(3)]
                );
            }
            Err(e) => println!("quantum [{label}] FAILED: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_classical_photon_scale() {
    use kerr_tda::classical as cl;
    for chi in [0.008f64, 0.016] {
        let params = cl::ClassicalParams::standard_kerr(chi, 0.05);
        let drive = cl::DriveProfile::new(4.5, 8.0).unwrap();
        let dt = 8.0 / 2000.0;
        let (re, im) = cl::integrate_classical(
            kerr_tda::Complex64::new(0.0, 0.0),
            &params,
            &drive,
            8000.0,
            dt,
            0.4,
        )
        .unwrap();
        let tail_re = re.since(3200.0);
        let tail_im = im.since(3200.0);
        let mean_n: f64 = tail_re
            .values
            .iter()
            .zip(&tail_im.values)
            .map(|(&x, &y)| x * x + y * y)
            .sum::<f64>()
            / tail_re.len() as f64;
        println!("chi={chi}: classical time-avg |xi|^2 = {mean_n:.1}");
    }
}

#[test]
#[ignore]
fn probe_sweep_correlation() {
    use kerr_tda::pipeline::sweep_phase_diagram;
    use kerr_tda::stats::spearman;
    let mut classical = SweepConfig::desk();
    classical.mode = Mode::Classical;
    let mut quantum = classical.clone();
    quantum.mode = Mode::QuantumX;
    let t0 = std::time::Instant::now();
    let c = sweep_phase_diagram(&classical).unwrap();
    println!("classical sweep: {:?}, failures={}", t0.elapsed(), c.failed_cells());
    let t0 = std::time::Instant::now();
    let q = sweep_phase_diagram(&quantum).unwrap();
    println!("quantum sweep: {:?}, failures={}", t0.elapsed(), q.failed_cells());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b) in c.grid.values().iter().zip(q.grid.values()) {
        if let (Some(x), Some(y)) = (a, b) {
            xs.push(*x);
            ys.push(*y);
        }
    }
    println!("paired cells: {}", xs.len());
    println!("spearman = {:?}", spearman(&xs, &ys));
    for (ti, t) in c.grid.t_values.iter().enumerate() {
        let row_c: Vec<String> = (0..8).map(|ai| c.grid.value(ti, ai).map(|v| format!("{v:.2}")).unwrap_or("--".into())).collect();
        let row_q: Vec<String> = (0..8).map(|ai| q.grid.value(ti, ai).map(|v| format!("{v:.2}")).unwrap_or("--".into())).collect();
        println!("T={t:5.2} C: {}   Q: {}", row_c.join(" "), row_q.join(" "));
    }
}

#[test]
#[ignore]
fn probe_quantum_grid_save() {
    use kerr_tda::export::{export_sweep, ExportFormats};
    use kerr_tda::pipeline::sweep_phase_diagram;
    let mut quantum = SweepConfig::desk();
    quantum.mode = Mode::QuantumX;
    let q = sweep_phase_diagram(&quantum).unwrap();
    let m = export_sweep(
        std::path::Path::new("/tmp/probe_grids"),
        &quantum,
        &q,
        ExportFormats { csv: true, svg: false },
    )
    .unwrap();
    println!("saved {}", m.root.display());
}

#[test]
#[ignore]
fn probe_classical_variants() {
    use kerr_tda::pipeline::sweep_phase_diagram;
    use kerr_tda::stats::spearman;
    // Load the saved quantum grid values (row-major).
    let dir = std::fs::read_dir("/tmp/probe_grids").unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(dir.join("grid.csv")).unwrap();
    let qvals: Vec<Option<f64>> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            if c[2].is_empty() { None } else { Some(c[2].parse().unwrap()) }
        })
        .collect();

    let mut base = SweepConfig::desk();
    base.mode = Mode::Classical;
    let mut v_fine = base.clone();
    v_fine.samples_per_period = 100;
    let mut v_fixed = base.clone();
    v_fixed.embedding = EmbeddingPolicy::Fixed { tau: 7, dim: 2 };
    let mut v_fine_fixed = v_fine.clone();
    v_fine_fixed.embedding = EmbeddingPolicy::Fixed { tau: 35, dim: 2 };
    for (name, cfg) in [
        ("auto-20spp", base),
        ("auto-100spp", v_fine),
        ("fixed(7,2)-20spp", v_fixed),
        ("fixed(35,2)-100spp", v_fine_fixed),
    ] {
        let t0 = std::time::Instant::now();
        let c = sweep_phase_diagram(&cfg).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (a, b) in c.grid.values().iter().zip(&qvals) {
            if let (Some(x), Some(y)) = (a, b) {
                xs.push(*x);
                ys.push(*y);
            }
        }
        println!(
            "{name}: spearman={:?} ({} cells, {:?})",
            spearman(&xs, &ys),
            xs.len(),
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn probe_fixed_fixed_correlation() {
    use kerr_tda::pipeline::sweep_phase_diagram;
    use kerr_tda::stats::spearman;
    let mut classical = SweepConfig::desk();
    classical.mode = Mode::Classical;
    classical.embedding = EmbeddingPolicy::Fixed { tau: 7, dim: 2 };
    let mut quantum = classical.clone();
    quantum.mode = Mode::QuantumX;
    let t0 = std::time::Instant::now();
    let c = sweep_phase_diagram(&classical).unwrap();
    let q = sweep_phase_diagram(&quantum).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b) in c.grid.values().iter().zip(q.grid.values()) {
        if let (Some(x), Some(y)) = (a, b) {
            xs.push(*x);
            ys.push(*y);
        }
    }
    println!(
        "fixed(7,2) both: spearman={:?} ({} cells, {:?}, qfail={})",
        spearman(&xs, &ys),
        xs.len(),
        t0.elapsed(),
        q.failed_cells()
    );
    for (ti, t) in c.grid.t_values.iter().enumerate() {
        let row_c: Vec<String> = (0..8).map(|ai| c.grid.value(ti, ai).map(|v| format!("{v:.2}")).unwrap_or("--".into())).collect();
        let row_q: Vec<String> = (0..8).map(|ai| q.grid.value(ti, ai).map(|v| format!("{v:.2}")).unwrap_or("--".into())).collect();
        println!("T={t:5.2} C: {}   Q: {}", row_c.join(" "), row_q.join(" "));
    }
    // Also correlate with a second quantum seed for stability.
    let mut quantum2 = quantum.clone();
    quantum2.seed = 42;
    let q2 = sweep_phase_diagram(&quantum2).unwrap();
    let mut xs2 = Vec::new();
    let mut ys2 = Vec::new();
    for (a, b) in c.grid.values().iter().zip(q2.grid.values()) {
        if let (Some(x), Some(y)) = (a, b) {
            xs2.push(*x);
            ys2.push(*y);
        }
    }
    println!("fixed(7,2) both seed42: spearman={:?}", spearman(&xs2, &ys2));
}
