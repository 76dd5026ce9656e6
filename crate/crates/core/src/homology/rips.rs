//! Vietoris-Rips filtration enumeration and Z/2 boundary-matrix reduction.
//!
//! The boundary matrix is never materialized: columns are generated on the
//! fly from the sorted edge and triangle lists. Reduction runs dimension 2
//! first; its pivots clear the corresponding dimension-1 columns, so only
//! the component-merging edges do real work afterwards.

use super::{DistanceMatrix, Feature, HomologyError, PersistenceDiagram};

/// Default cap on the total simplex count of a filtration (~770 MB of
/// triangle keys). A 600-point cloud at full radius fits with headroom.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 48_000_000;

const NONE: u32 = u32::MAX;

/// Persistent homology of the Vietoris-Rips filtration of `dm`, truncated
/// at `max_radius`, for homology dimensions `0..=max_dim` (`max_dim <= 1`).
///
/// Vertices enter at value 0, an edge at its distance, a triangle at the
/// maximum of its edge values; simplices with value `<= max_radius` are
/// kept. Zero-persistence pairs are dropped; classes alive at `max_radius`
/// are emitted with death `inf`.
pub fn rips_persistence(
    dm: &DistanceMatrix,
    max_dim: usize,
    max_radius: f64,
) -> Result<PersistenceDiagram, HomologyError> {
    rips_persistence_budgeted(dm, max_dim, max_radius, DEFAULT_SIMPLEX_BUDGET)
}

/// [`rips_persistence`] with an explicit simplex budget; exceeding it
/// returns [`HomologyError::SizeCap`] instead of exhausting memory.
pub fn rips_persistence_budgeted(
    dm: &DistanceMatrix,
    max_dim: usize,
    max_radius: f64,
    budget: usize,
) -> Result<PersistenceDiagram, HomologyError> {
    if max_dim > 1 {
        return Err(HomologyError::InvalidMaxDim(max_dim));
    }
    if !(max_radius > 0.0) {
        return Err(HomologyError::RadiusNonPositive(max_radius));
    }
    let n = dm.len();
    if n > 1 << 16 {
        return Err(HomologyError::InvalidMatrix(format!(
            "{n} points exceed the 65536-point limit; subsample first"
        )));
    }

    // Edges sorted by (value, lexicographic key); the key packs (i, j) with
    // i < j, so integer order on keys is lexicographic vertex order.
    let mut edges: Vec<(f64, u32)> = Vec::new();
    for i in 0..n {
        let row = dm.row(i);
        for (j, &d) in row.iter().enumerate().skip(i + 1) {
            if d <= max_radius {
                edges.push((d, ((i as u32) << 16) | j as u32));
            }
        }
    }
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if n + edges.len() > budget {
        return Err(HomologyError::SizeCap {
            simplices: n + edges.len(),
            budget,
        });
    }

    // Filtration index of each kept edge, dense over vertex pairs.
    let mut edge_index = vec![NONE; n * n];
    for (idx, &(_, key)) in edges.iter().enumerate() {
        let (i, j) = ((key >> 16) as usize, (key & 0xFFFF) as usize);
        edge_index[i * n + j] = idx as u32;
    }

    let mut features: Vec<Feature> = Vec::new();
    let mut edge_cleared = vec![false; edges.len()];

    if max_dim >= 1 {
        reduce_triangles(
            dm,
            max_radius,
            budget,
            &edges,
            &edge_index,
            &mut edge_cleared,
            &mut features,
        )?;
    }

    // Dimension-1 columns: only edges not cleared by the dimension-2 pass.
    let mut vertex_owner = vec![NONE; n];
    let mut store: Vec<Box<[u32]>> = Vec::new();
    let mut col: Vec<u32> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();
    for (e, &(value, key)) in edges.iter().enumerate() {
        if edge_cleared[e] {
            continue;
        }
        col.clear();
        col.push(key >> 16);
        col.push(key & 0xFFFF);
        let mut claimed = false;
        while let Some(&pivot) = col.last() {
            let owner = vertex_owner[pivot as usize];
            if owner == NONE {
                vertex_owner[pivot as usize] = store.len() as u32;
                store.push(col.clone().into_boxed_slice());
                if value > 0.0 {
                    features.push(Feature {
                        dim: 0,
                        birth: 0.0,
                        death: value,
                    });
                }
                claimed = true;
                break;
            }
            xor_merge(&col, &store[owner as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
        if !claimed && max_dim >= 1 {
            // A cycle-creating edge no triangle ever kills within the radius.
            features.push(Feature {
                dim: 1,
                birth: value,
                death: f64::INFINITY,
            });
        }
    }
    // Vertices never claimed as pivots carry the essential components.
    for v in 0..n {
        if vertex_owner[v] == NONE {
            features.push(Feature {
                dim: 0,
                birth: 0.0,
                death: f64::INFINITY,
            });
        }
    }

    Ok(PersistenceDiagram::from_features(features))
}

/// Reduces the dimension-2 boundary columns in filtration order, recording
/// positive-persistence (edge, triangle) pairs and marking claimed edges
/// for clearing.
fn reduce_triangles(
    dm: &DistanceMatrix,
    max_radius: f64,
    budget: usize,
    edges: &[(f64, u32)],
    edge_index: &[u32],
    edge_cleared: &mut [bool],
    features: &mut Vec<Feature>,
) -> Result<(), HomologyError> {
    let n = dm.len();
    // A triangle packs as (value bits | i | j | k); non-negative IEEE doubles
    // sort correctly by their bit patterns, so plain u128 order is
    // (value, lexicographic) order.
    let mut triangles: Vec<u128> = Vec::new();
    for i in 0..n {
        let row_i = dm.row(i);
        for j in (i + 1)..n {
            let d_ij = row_i[j];
            if d_ij > max_radius {
                continue;
            }
            let row_j = dm.row(j);
            for k in (j + 1)..n {
                let value = d_ij.max(row_i[k]).max(row_j[k]);
                if value <= max_radius {
                    triangles.push(
                        ((value.to_bits() as u128) << 64)
                            | ((i as u128) << 32)
                            | ((j as u128) << 16)
                            | k as u128,
                    );
                }
            }
            if n + edges.len() + triangles.len() > budget {
                return Err(HomologyError::SizeCap {
                    simplices: n + edges.len() + triangles.len(),
                    budget,
                });
            }
        }
    }
    triangles.sort_unstable();

    // The working column lives in a bitset over edge indices: a column
    // addition flips only the stored column's entries instead of copying
    // the whole working column, and the pivot scan telescopes downward.
    let mut column = BitColumn::new(edges.len());
    let mut edge_owner = vec![NONE; edges.len()];
    let mut store: Vec<Box<[u32]>> = Vec::new();
    for &t in &triangles {
        let value = f64::from_bits((t >> 64) as u64);
        let i = ((t >> 32) & 0xFFFF) as usize;
        let j = ((t >> 16) & 0xFFFF) as usize;
        let k = (t & 0xFFFF) as usize;
        let e0 = edge_index[i * n + j];
        let e1 = edge_index[i * n + k];
        let e2 = edge_index[j * n + k];
        column.insert(e0);
        column.insert(e1);
        column.insert(e2);
        let mut pivot = e0.max(e1).max(e2);
        loop {
            let owner = edge_owner[pivot as usize];
            if owner == NONE {
                edge_owner[pivot as usize] = store.len() as u32;
                store.push(column.extract_up_to(pivot));
                let birth = edges[pivot as usize].0;
                if value > birth {
                    features.push(Feature {
                        dim: 1,
                        birth,
                        death: value,
                    });
                }
                break;
            }
            // The owner column shares this pivot, so the XOR clears it.
            for &e in store[owner as usize].iter() {
                column.flip(e);
            }
            match column.highest_below(pivot) {
                Some(p) => pivot = p,
                None => break, // column reduced to zero
            }
        }
        column.reset();
    }
    for (e, &owner) in edge_owner.iter().enumerate() {
        if owner != NONE {
            edge_cleared[e] = true;
        }
    }
    Ok(())
}

/// Dense Z/2 working column with touched-word tracking for O(flips) reset.
struct BitColumn {
    words: Vec<u64>,
    touched: Vec<u32>,
}

impl BitColumn {
    fn new(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64)],
            touched: Vec::with_capacity(256),
        }
    }

    #[inline]
    fn insert(&mut self, bit: u32) {
        // Boundary edges of a triangle are distinct, so insert == flip.
        self.flip(bit);
    }

    #[inline]
    fn flip(&mut self, bit: u32) {
        let w = (bit >> 6) as usize;
        self.words[w] ^= 1u64 << (bit & 63);
        self.touched.push(w as u32);
    }

    /// Highest set bit strictly below `from`, scanning downward.
    fn highest_below(&self, from: u32) -> Option<u32> {
        let mut w = (from >> 6) as usize;
        let within = from & 63;
        if within > 0 {
            let masked = self.words[w] & ((1u64 << within) - 1);
            if masked != 0 {
                return Some((w as u32) << 6 | (63 - masked.leading_zeros()));
            }
        }
        while w > 0 {
            w -= 1;
            if self.words[w] != 0 {
                return Some((w as u32) << 6 | (63 - self.words[w].leading_zeros()));
            }
        }
        None
    }

    /// Sorted entries of the column, whose maximum is `pivot`.
    fn extract_up_to(&self, pivot: u32) -> Box<[u32]> {
        let mut out = Vec::with_capacity(8);
        for w in 0..=(pivot >> 6) as usize {
            let mut bits = self.words[w];
            while bits != 0 {
                let b = bits.trailing_zeros();
                out.push((w as u32) << 6 | b);
                bits &= bits - 1;
            }
        }
        out.into_boxed_slice()
    }

    fn reset(&mut self) {
        for &w in &self.touched {
            self.words[w as usize] = 0;
        }
        self.touched.clear();
    }
}

/// Symmetric difference of two sorted index lists (Z/2 column addition).
fn xor_merge(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0usize, 0usize);
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
}
