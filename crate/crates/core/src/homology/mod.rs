//! Vietoris-Rips persistent homology over Z/2 for low dimensions (H0, H1),
//! with greedy maxmin landmark subsampling and the average-lifetime summary.
//!
//! The filtration assigns vertices value 0, edges their pairwise distance,
//! and triangles the maximum of their edge values, truncated at a radius.
//! Simplices are ordered by (value, dimension, lexicographic vertex order)
//! and the Z/2 boundary matrix is reduced column-by-column with the clearing
//! optimization (dimension 2 first, then the surviving dimension-1 columns).

mod rips;

pub use rips::{rips_persistence, rips_persistence_budgeted, DEFAULT_SIMPLEX_BUDGET};

use rayon::prelude::*;
use thiserror::Error;

use crate::embedding::PointCloud;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HomologyError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("subsample size k must be >= 1")]
    InvalidK,
    #[error("start index {start} out of range for cloud of {len} points")]
    InvalidStart { start: usize, len: usize },
    #[error("filtration radius must be positive, got {0}")]
    RadiusNonPositive(f64),
    #[error("homology dimension cap must be 0 or 1, got {0}")]
    InvalidMaxDim(usize),
    #[error("filtration would hold {simplices} simplices, over the budget of {budget}; subsample the cloud first")]
    SizeCap { simplices: usize, budget: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
}

/// Symmetric matrix of pairwise Euclidean distances with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Pairwise distances of `cloud`, assembled in parallel row blocks.
    pub fn from_cloud(cloud: &PointCloud) -> Result<Self, HomologyError> {
        let n = cloud.len();
        if n == 0 {
            return Err(HomologyError::EmptyCloud);
        }
        let mut entries = vec![0.0; n * n];
        entries
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = cloud.distance(i, j);
                }
            });
        Ok(Self { n, entries })
    }

    /// Wraps a full matrix, validating symmetry, non-negativity, and the
    /// zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, HomologyError> {
        let n = rows.len();
        if n == 0 {
            return Err(HomologyError::EmptyCloud);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(HomologyError::InvalidMatrix("matrix is not square".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(HomologyError::InvalidMatrix(format!(
                    "nonzero diagonal at {i}"
                )));
            }
            for j in 0..n {
                let d = entries[i * n + j];
                if !(d >= 0.0) {
                    return Err(HomologyError::InvalidMatrix(format!(
                        "negative or NaN distance at ({i},{j})"
                    )));
                }
                if d != entries[j * n + i] {
                    return Err(HomologyError::InvalidMatrix(format!(
                        "asymmetry at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Largest pairwise distance; the default filtration radius.
    pub fn max_distance(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }
}

/// A persistence feature; `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl Feature {
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

/// Multiset of persistence features, canonically sorted by
/// (dimension, birth, death). Zero-persistence pairs are never emitted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    features: Vec<Feature>,
}

impl PersistenceDiagram {
    pub fn from_features(mut features: Vec<Feature>) -> Self {
        features.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self { features }
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn dim(&self, dim: usize) -> impl Iterator<Item = &Feature> {
        self.features.iter().filter(move |f| f.dim == dim)
    }

    /// Finite features of one dimension, i.e. the set entering the
    /// average-lifetime summary.
    pub fn finite(&self, dim: usize) -> impl Iterator<Item = &Feature> {
        self.dim(dim).filter(|f| !f.is_essential())
    }

    /// Betti number at scale `epsilon`: features alive satisfy
    /// `birth <= epsilon < death`.
    pub fn betti(&self, dim: usize, epsilon: f64) -> usize {
        self.dim(dim)
            .filter(|f| f.birth <= epsilon && epsilon < f.death)
            .count()
    }

    /// CSV serialization: header `dim,birth,death`, one feature per row,
    /// `inf` literal for essential features.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for f in &self.features {
            let death = if f.is_essential() {
                "inf".to_string()
            } else {
                format!("{:?}", f.death)
            };
            out.push_str(&format!("{},{:?},{}\n", f.dim, f.birth, death));
        }
        out
    }

    /// Parses the CSV form written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, HomologyError> {
        let mut features = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("dim")) {
                continue;
            }
            let mut parts = line.split(',');
            let parse_err =
                |e: String| HomologyError::InvalidMatrix(format!("diagram CSV line {}: {e}", i + 1));
            let mut next = |name: &str| {
                parts
                    .next()
                    .ok_or_else(|| parse_err(format!("missing {name}")))
            };
            let dim: usize = next("dim")?
                .parse()
                .map_err(|e| parse_err(format!("{e}")))?;
            let birth: f64 = next("birth")?
                .parse()
                .map_err(|e| parse_err(format!("{e}")))?;
            let death_raw = next("death")?;
            let death = if death_raw == "inf" {
                f64::INFINITY
            } else {
                death_raw.parse().map_err(|e| parse_err(format!("{e}")))?
            };
            features.push(Feature { dim, birth, death });
        }
        Ok(Self::from_features(features))
    }
}

/// Mean lifetime of the finite features of `dim`; 0 when there are none.
/// Essential (infinite) features are excluded.
pub fn average_lifetime(diagram: &PersistenceDiagram, dim: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for f in diagram.finite(dim) {
        sum += f.lifetime();
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Greedy farthest-point (maxmin) subsample of `min(k, n)` points.
///
/// Starts from `start_index` and repeatedly adds the point with the largest
/// distance to the selected set, breaking ties toward the lowest index, so
/// the result is fully deterministic.
pub fn maxmin_subsample(
    cloud: &PointCloud,
    k: usize,
    start_index: usize,
) -> Result<PointCloud, HomologyError> {
    let n = cloud.len();
    if n == 0 {
        return Err(HomologyError::EmptyCloud);
    }
    if k == 0 {
        return Err(HomologyError::InvalidK);
    }
    if start_index >= n {
        return Err(HomologyError::InvalidStart {
            start: start_index,
            len: n,
        });
    }
    let k = k.min(n);
    let mut selected = Vec::with_capacity(k);
    let mut min_dist = vec![f64::INFINITY; n];
    let mut current = start_index;
    selected.push(current);
    for _ in 1..k {
        let mut best = 0usize;
        let mut best_dist = -1.0;
        for i in 0..n {
            let d = cloud.distance(i, current).min(min_dist[i]);
            min_dist[i] = d;
            // Strict comparison keeps the lowest index on ties.
            if d > best_dist {
                best_dist = d;
                best = i;
            }
        }
        current = best;
        selected.push(current);
    }
    let dim = cloud.dim();
    let mut coords = Vec::with_capacity(k * dim);
    for &i in &selected {
        coords.extend_from_slice(cloud.point(i));
    }
    Ok(PointCloud::from_flat(dim, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cloud(rows: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn maxmin_unit_square() {
        let c = cloud(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ]);
        let sub = maxmin_subsample(&c, 2, 0).unwrap();
        assert_eq!(sub.point(0), &[0.0, 0.0]);
        assert_eq!(sub.point(1), &[1.0, 1.0]);
    }

    #[test]
    fn maxmin_k_one_and_k_large() {
        let c = cloud(vec![vec![0.0], vec![3.0], vec![7.0]]);
        let one = maxmin_subsample(&c, 1, 2).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.point(0), &[7.0]);
        let all = maxmin_subsample(&c, 10, 0).unwrap();
        assert_eq!(all.len(), 3);
        // Selection order: start, farthest, remaining.
        assert_eq!(all.point(0), &[0.0]);
        assert_eq!(all.point(1), &[7.0]);
        assert_eq!(all.point(2), &[3.0]);
    }

    #[test]
    fn maxmin_tie_breaks_to_lowest_index() {
        let c = cloud(vec![vec![0.0], vec![1.0], vec![-1.0], vec![1.0]]);
        let sub = maxmin_subsample(&c, 2, 0).unwrap();
        // Points 1, 2, 3 are all at distance 1; index 1 wins.
        assert_eq!(sub.point(1), &[1.0]);
    }

    #[test]
    fn maxmin_rejects_bad_input() {
        let c = cloud(vec![vec![0.0]]);
        assert!(matches!(
            maxmin_subsample(&c, 0, 0),
            Err(HomologyError::InvalidK)
        ));
        assert!(matches!(
            maxmin_subsample(&c, 1, 5),
            Err(HomologyError::InvalidStart { .. })
        ));
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.5, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        let dm = DistanceMatrix::from_rows(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(dm.max_distance(), 2.0);
    }

    #[test]
    fn average_lifetime_examples() {
        let empty = PersistenceDiagram::default();
        assert_eq!(average_lifetime(&empty, 1), 0.0);

        let d = PersistenceDiagram::from_features(vec![Feature {
            dim: 1,
            birth: 1.0,
            death: 2f64.sqrt(),
        }]);
        assert_abs_diff_eq!(average_lifetime(&d, 1), 2f64.sqrt() - 1.0, epsilon = 1e-12);
        assert_eq!(average_lifetime(&d, 0), 0.0);

        let d = PersistenceDiagram::from_features(vec![
            Feature { dim: 1, birth: 0.0, death: 2.0 },
            Feature { dim: 1, birth: 1.0, death: 3.0 },
            Feature { dim: 1, birth: 0.5, death: f64::INFINITY },
        ]);
        assert_abs_diff_eq!(average_lifetime(&d, 1), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn diagram_csv_format() {
        let d = PersistenceDiagram::from_features(vec![
            Feature { dim: 0, birth: 0.0, death: f64::INFINITY },
            Feature { dim: 1, birth: 1.0, death: 2f64.sqrt() },
        ]);
        assert_eq!(
            d.to_csv(),
            "dim,birth,death\n0,0.0,inf\n1,1.0,1.4142135623730951\n"
        );
    }
}
