//! Takens time-delay embedding and hyperparameter heuristics.
//!
//! A scalar series `x` is embedded as points
//! `(x[i], x[i - tau], ..., x[i - (d-1) tau])`, reconstructing the attractor
//! of the underlying flow up to topology. The delay `tau` is estimated from
//! the first local minimum of the lagged mutual information and the
//! dimension `d` from the false-nearest-neighbor criterion.

use thiserror::Error;

use crate::series::TimeSeries;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("series too short: {needed} samples needed, have {have}")]
    SeriesTooShort { needed: usize, have: usize },
    #[error("invalid embedding parameters: {0}")]
    InvalidParams(String),
}

/// An ordered cloud of `dim`-dimensional points, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, EmbeddingError> {
        let dim = rows.first().map_or(0, |r| r.len());
        if dim == 0 {
            return Err(EmbeddingError::InvalidParams(
                "point cloud needs at least one point of dimension >= 1".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(EmbeddingError::InvalidParams(
                "all points must share the same dimension".into(),
            ));
        }
        Ok(Self {
            dim,
            coords: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim >= 1 && coords.len() % dim == 0);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Time-delay embedding of `series` with delay `tau` (in samples) and
/// dimension `d`. Point `i` of the output corresponds to sample
/// `(d-1)*tau + i` of the input, so the cloud is in time order and has
/// exactly `len - (d-1)*tau` points.
pub fn delay_embed(series: &TimeSeries, tau: usize, d: usize) -> Result<PointCloud, EmbeddingError> {
    if tau < 1 || d < 1 {
        return Err(EmbeddingError::InvalidParams(format!(
            "need tau >= 1 and d >= 1, got tau={tau}, d={d}"
        )));
    }
    let x = &series.values;
    let span = (d - 1) * tau;
    if x.len() <= span {
        return Err(EmbeddingError::SeriesTooShort {
            needed: span + 1,
            have: x.len(),
        });
    }
    let n_points = x.len() - span;
    let mut coords = Vec::with_capacity(n_points * d);
    for i in span..x.len() {
        for j in 0..d {
            coords.push(x[i - j * tau]);
        }
    }
    Ok(PointCloud::from_flat(d, coords))
}

/// Ranks of `values` (0-based, ties broken by index), used for
/// equal-count binning.
fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut rank = vec![0usize; values.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// Histogram mutual information between a series and its `tau`-lagged copy,
/// with equal-count (quantile) bins so the estimate only depends on ranks.
fn lagged_mutual_information(x: &[f64], tau: usize, n_bins: usize) -> f64 {
    let n = x.len() - tau;
    let lead: Vec<f64> = x[tau..].to_vec();
    let lag: Vec<f64> = x[..n].to_vec();
    let bins_of = |v: &[f64]| -> Vec<usize> {
        ranks(v).iter().map(|&r| r * n_bins / v.len()).collect()
    };
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
    let mut mi = 0.0;
    for i in 0..n_bins {
        for j in 0..n_bins {
            let c = joint[i * n_bins + j];
            if c > 0 {
                let pxy = c as f64 / total;
                mi += pxy * (pxy * total * total / (px[i] as f64 * py[j] as f64)).ln();
            }
        }
    }
    mi
}

/// Estimates the embedding delay as the first local minimum of the lagged
/// mutual information over `tau in 1..=max_tau`.
///
/// A local minimum must beat both neighbors strictly; a flat plateau counts
/// as a minimum at its smallest `tau`. If no interior minimum exists the
/// global argmin over the scanned range is returned.
pub fn estimate_delay_mi(
    series: &TimeSeries,
    max_tau: usize,
    n_bins: usize,
) -> Result<usize, EmbeddingError> {
    if max_tau < 2 || n_bins < 2 {
        return Err(EmbeddingError::InvalidParams(format!(
            "need max_tau >= 2 and n_bins >= 2, got max_tau={max_tau}, n_bins={n_bins}"
        )));
    }
    if series.len() < 4 * max_tau {
        return Err(EmbeddingError::SeriesTooShort {
            needed: 4 * max_tau,
            have: series.len(),
        });
    }
    let mi: Vec<f64> = (1..=max_tau)
        .map(|tau| lagged_mutual_information(&series.values, tau, n_bins))
        .collect();
    Ok(first_local_minimum(&mi).unwrap_or_else(|| argmin(&mi)) + 1)
}

/// Index of the first strict local minimum of `v` (plateaus resolve to their
/// left edge), or `None` when `v` has no interior minimum.
fn first_local_minimum(v: &[f64]) -> Option<usize> {
    let mut i = 1;
    while i < v.len() {
        if v[i] < v[i - 1] {
            // Walk over an exact plateau.
            let start = i;
            let mut j = i + 1;
            while j < v.len() && v[j] == v[start] {
                j += 1;
            }
            if j < v.len() && v[j] > v[start] {
                return Some(start);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    None
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Estimates the embedding dimension with the false-nearest-neighbor
/// criterion: the smallest `d <= max_d` for which the fraction of neighbors
/// whose distance ratio jumps by more than `r_tol` when adding the next
/// delay coordinate falls below `threshold`. Returns `max_d` when the
/// fraction never drops below the threshold.
pub fn estimate_dimension_fnn(
    series: &TimeSeries,
    tau: usize,
    max_d: usize,
    r_tol: f64,
    threshold: f64,
) -> Result<usize, EmbeddingError> {
    if max_d < 2 || tau < 1 {
        return Err(EmbeddingError::InvalidParams(format!(
            "need max_d >= 2 and tau >= 1, got max_d={max_d}, tau={tau}"
        )));
    }
    let x = &series.values;
    // Embedding at max_d needs one extra delayed coordinate for the test.
    if x.len() <= max_d * tau + 1 {
        return Err(EmbeddingError::SeriesTooShort {
            needed: max_d * tau + 2,
            have: x.len(),
        });
    }
    for d in 1..=max_d {
        if false_neighbor_fraction(x, tau, d, r_tol) < threshold {
            return Ok(d);
        }
    }
    Ok(max_d)
}

/// Fraction of nearest neighbors in the `d`-dimensional embedding that are
/// false: the extra coordinate of dimension `d + 1` separates them by more
/// than `r_tol` times their `d`-dimensional distance.
fn false_neighbor_fraction(x: &[f64], tau: usize, d: usize, r_tol: f64) -> f64 {
    let span = d * tau; // indices valid for the (d+1)-dimensional embedding
    let n = x.len() - span;
    if n < 2 {
        return 0.0;
    }
    // Exactly periodic signals produce near-duplicate delay vectors whose
    // separation is pure rounding noise; such duplicates are excluded from
    // the neighbor search (they say nothing about folding) and count as
    // true neighbors when they are all a point has.
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let noise_floor = 1e-6 * (hi - lo);
    let dist_d = |a: usize, b: usize| -> f64 {
        let (ia, ib) = (span + a, span + b);
        (0..d)
            .map(|j| {
                let diff = x[ia - j * tau] - x[ib - j * tau];
                diff * diff
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut false_count = 0usize;
    let mut counted = 0usize;
    for i in 0..n {
        let mut nn = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..n {
            if j != i {
                let dist = dist_d(i, j);
                if dist > noise_floor && dist < best {
                    best = dist;
                    nn = j;
                }
            }
        }
        if nn == usize::MAX {
            continue; // only duplicates available
        }
        counted += 1;
        // Coordinate added at dimension d+1: x[(span + i) - d*tau] = x[i].
        let extra = (x[i] - x[nn]).abs();
        if extra > noise_floor && extra > r_tol * best {
            false_count += 1;
        }
    }
    if counted == 0 {
        0.0
    } else {
        false_count as f64 / counted as f64
    }
}
