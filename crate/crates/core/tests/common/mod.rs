//! Shared test-side oracles, independent of the library's reduction path:
//! a naive full-boundary-matrix Vietoris-Rips reduction and brute-force
//! Betti numbers.

use std::collections::HashMap;

use kerr_tda::homology::{DistanceMatrix, Feature, PersistenceDiagram};

/// splitmix64; deterministic test-data generator without extra deps.
pub fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn uniform(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Random cloud with coordinates in [0, 1)^dim.
pub fn random_cloud(state: &mut u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| uniform(state)).collect())
        .collect()
}

/// Naive persistence of the Vietoris-Rips filtration: every simplex up to
/// dimension 2 is materialized, sorted by (value, dimension, lexicographic
/// vertex order), and the full Z/2 boundary matrix is reduced column by
/// column with no clearing or other shortcuts. Conventions match the
/// library: zero-persistence pairs dropped, essentials at death = inf.
pub fn brute_force_rips(
    dm: &DistanceMatrix,
    max_dim: usize,
    max_radius: f64,
) -> PersistenceDiagram {
    let n = dm.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = Vec::new();
    for v in 0..n {
        simplices.push((0.0, vec![v]));
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = dm.get(i, j);
            if d <= max_radius {
                simplices.push((d, vec![i, j]));
            }
        }
    }
    if max_dim >= 1 {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let v = dm.get(i, j).max(dm.get(i, k)).max(dm.get(j, k));
                    if v <= max_radius {
                        simplices.push((v, vec![i, j, k]));
                    }
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });

    let index: HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.1.clone(), i))
        .collect();
    let boundaries: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, verts)| {
            let mut b: Vec<usize> = match verts.len() {
                1 => Vec::new(),
                _ => (0..verts.len())
                    .map(|drop| {
                        let face: Vec<usize> = verts
                            .iter()
                            .enumerate()
                            .filter(|(p, _)| *p != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        index[&face]
                    })
                    .collect(),
            };
            b.sort_unstable();
            b
        })
        .collect();

    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(boundaries.len());
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (j, boundary) in boundaries.iter().enumerate() {
        let mut col = boundary.clone();
        while let Some(&low) = col.last() {
            match pivot_owner.get(&low) {
                Some(&owner) => {
                    col = xor(&col, &reduced[owner]);
                }
                None => {
                    pivot_owner.insert(low, j);
                    pairs.push((low, j));
                    break;
                }
            }
        }
        reduced.push(col);
    }

    let mut killed = vec![false; simplices.len()];
    let mut features = Vec::new();
    for &(birth_idx, death_idx) in &pairs {
        killed[birth_idx] = true;
        let dim = simplices[birth_idx].1.len() - 1;
        let (birth, death) = (simplices[birth_idx].0, simplices[death_idx].0);
        if dim <= max_dim && death > birth {
            features.push(Feature { dim, birth, death });
        }
    }
    for (s, col) in reduced.iter().enumerate() {
        let dim = simplices[s].1.len() - 1;
        if col.is_empty() && !killed[s] && dim <= max_dim {
            features.push(Feature {
                dim,
                birth: simplices[s].0,
                death: f64::INFINITY,
            });
        }
    }
    PersistenceDiagram::from_features(features)
}

fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Brute-force Betti numbers (beta0, beta1) of the Rips complex at scale
/// `epsilon`: union-find for components, Z/2 Gaussian elimination for the
/// rank of the triangle boundary.
pub fn brute_force_betti(dm: &DistanceMatrix, epsilon: f64) -> (usize, usize) {
    let n = dm.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if dm.get(i, j) <= epsilon {
                edges.push((i, j));
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let beta0 = (0..n).filter(|&v| find(&mut parent, v) == v).count();

    let edge_id: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let words = edges.len().div_ceil(64);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = dm.get(i, j).max(dm.get(i, k)).max(dm.get(j, k));
                if v <= epsilon {
                    let mut row = vec![0u64; words];
                    for e in [(i, j), (i, k), (j, k)] {
                        let id = edge_id[&e];
                        row[id / 64] ^= 1 << (id % 64);
                    }
                    rows.push(row);
                }
            }
        }
    }
    // Gaussian elimination over Z/2 for rank of the triangle boundary.
    let mut rank = 0usize;
    let mut pivots: Vec<(usize, u64, usize)> = Vec::new(); // (word, mask, row idx)
    let mut mat = rows;
    for r in 0..mat.len() {
        loop {
            let Some((w, bit)) = leading_bit(&mat[r]) else {
                break;
            };
            if let Some(&(_, _, owner)) = pivots.iter().find(|&&(pw, pm, _)| pw == w && pm == bit) {
                let other = mat[owner].clone();
                for (a, b) in mat[r].iter_mut().zip(&other) {
                    *a ^= b;
                }
            } else {
                pivots.push((w, bit, r));
                rank += 1;
                break;
            }
        }
    }
    // beta1 = dim ker d1 - rank d2 = (E - (V - beta0)) - rank.
    let beta1 = edges.len() + beta0 - n - rank;
    (beta0, beta1)
}

fn leading_bit(row: &[u64]) -> Option<(usize, u64)> {
    for (w, &word) in row.iter().enumerate().rev() {
        if word != 0 {
            let bit = 63 - word.leading_zeros();
            return Some((w, 1u64 << bit));
        }
    }
    None
}

/// Exact multiset equality of diagrams (canonical sort is part of the
/// library type).
pub fn diagrams_equal(a: &PersistenceDiagram, b: &PersistenceDiagram) -> bool {
    let fa = a.features();
    let fb = b.features();
    fa.len() == fb.len()
        && fa.iter().zip(fb).all(|(x, y)| {
            x.dim == y.dim
                && x.birth == y.birth
                && (x.death == y.death || (x.death.is_infinite() && y.death.is_infinite()))
        })
}
