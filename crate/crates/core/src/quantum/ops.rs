//! Sparse (banded) ladder operators on the truncated Fock basis and the
//! tridiagonal generator driving the non-Hermitian trajectory evolution.

use num_complex::Complex64;

use super::{QuantumError, QuantumParams};

/// Real operator with at most three bands: `out[m] = sub[m] v[m-1] +
/// diag[m] v[m] + sup[m] v[m+1]`. Every operator of the model (`a`, `a†`,
/// `n`, `a†²a²`, `x`) fits this shape, so nothing denser is ever stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOp {
    dim: usize,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl BandedOp {
    fn new(dim: usize, sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        debug_assert!(sub.len() == dim && diag.len() == dim && sup.len() == dim);
        debug_assert!(sub[0] == 0.0 && sup[dim - 1] == 0.0);
        Self { dim, sub, diag, sup }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        debug_assert!(v.len() == n && out.len() == n);
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.sub[i] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    /// Unnormalized expectation value `<v|O|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = self.diag[i] * v[i];
            if i > 0 {
                row += self.sub[i] * v[i - 1];
            }
            if i + 1 < n {
                row += self.sup[i] * v[i + 1];
            }
            acc += v[i].conj() * row;
        }
        acc
    }

    /// Dense realization, mostly for cross-checks against the banded form.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i > 0 {
                m[i][i - 1] = self.sub[i];
            }
            if i + 1 < n {
                m[i][i + 1] = self.sup[i];
            }
        }
        m
    }

    /// Subdiagonal band (`out[m] += sub[m] v[m-1]`).
    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    /// Main diagonal.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Superdiagonal band (`out[m] += sup[m] v[m+1]`).
    pub fn sup(&self) -> &[f64] {
        &self.sup
    }
}

/// The standard operator set on an `N`-dimensional Fock space.
#[derive(Debug, Clone)]
pub struct FockOperators {
    dim: usize,
    /// Annihilation `a`: `a|m> = sqrt(m) |m-1>`.
    pub annihilation: BandedOp,
    /// Creation `a†`.
    pub creation: BandedOp,
    /// Number operator `n = a†a`.
    pub number: BandedOp,
    /// Kerr kernel `a†²a²`, diagonal `m(m-1)`.
    pub kerr: BandedOp,
    /// Position quadrature `x = (a + a†)/sqrt(2)`.
    pub position: BandedOp,
}

impl FockOperators {
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Builds the sparse operator set for an `n`-dimensional truncation.
pub fn build_operators(n: usize) -> Result<FockOperators, QuantumError> {
    if n < 2 {
        return Err(QuantumError::InvalidDimension(n));
    }
    let zeros = vec![0.0; n];
    let root_up: Vec<f64> = (0..n)
        .map(|m| if m + 1 < n { ((m + 1) as f64).sqrt() } else { 0.0 })
        .collect();
    let root_down: Vec<f64> = (0..n).map(|m| (m as f64).sqrt()).collect();
    let annihilation = BandedOp::new(n, zeros.clone(), zeros.clone(), root_up.clone());
    let creation = BandedOp::new(n, root_down.clone(), zeros.clone(), zeros.clone());
    let number = BandedOp::new(n, zeros.clone(), (0..n).map(|m| m as f64).collect(), zeros.clone());
    let kerr = BandedOp::new(
        n,
        zeros.clone(),
        (0..n).map(|m| (m * (m - m.min(1))) as f64).collect(),
        zeros.clone(),
    );
    let inv_root2 = std::f64::consts::FRAC_1_SQRT_2;
    let position = BandedOp::new(
        n,
        root_down.iter().map(|v| v * inv_root2).collect(),
        zeros,
        root_up.iter().map(|v| v * inv_root2).collect(),
    );
    Ok(FockOperators {
        dim: n,
        annihilation,
        creation,
        number,
        kerr,
        position,
    })
}

/// Tridiagonal generator `M = -i H_mc` with
/// `H_mc = (chi/2) a†²a² + i F (a† - a) - (i/2) gamma n`, so that the
/// drift evolution is `dpsi/dt = M psi`. Off-diagonals are real.
#[derive(Debug, Clone)]
pub(crate) struct DriftGenerator {
    pub diag: Vec<Complex64>,
    pub sub: Vec<f64>,
    pub sup: Vec<f64>,
}

impl DriftGenerator {
    pub fn build(params: &QuantumParams, drive_value: f64) -> Self {
        let n = params.n_trunc;
        let diag = (0..n)
            .map(|m| {
                let kerr = 0.5 * params.chi * (m * (m - m.min(1))) as f64;
                Complex64::new(-0.5 * params.gamma * m as f64, -kerr)
            })
            .collect();
        let sub = (0..n).map(|m| drive_value * (m as f64).sqrt()).collect();
        let sup = (0..n)
            .map(|m| {
                if m + 1 < n {
                    -drive_value * ((m + 1) as f64).sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        Self { diag, sub, sup }
    }

    #[inline]
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = v.len();
        out[0] = self.diag[0] * v[0] + self.sup[0] * v[1];
        for i in 1..n - 1 {
            out[i] = self.diag[i] * v[i] + self.sub[i] * v[i - 1] + self.sup[i] * v[i + 1];
        }
        out[n - 1] = self.diag[n - 1] * v[n - 1] + self.sub[n - 1] * v[n - 2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ladder_action_on_fock_states() {
        let ops = build_operators(6).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 6];
        v[2] = Complex64::new(1.0, 0.0);
        let mut out = v.clone();
        ops.annihilation.apply(&v, &mut out);
        assert_abs_diff_eq!(out[1].re, 2f64.sqrt(), epsilon = 1e-15);
        assert!(out.iter().enumerate().all(|(i, a)| i == 1 || a.norm() == 0.0));

        ops.creation.apply(&v, &mut out);
        assert_abs_diff_eq!(out[3].re, 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn diagonal_operators() {
        let ops = build_operators(5).unwrap();
        assert_eq!(ops.number.diag(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ops.kerr.diag(), &[0.0, 0.0, 2.0, 6.0, 12.0]);
    }

    #[test]
    fn creation_is_conjugate_transpose_of_annihilation() {
        let ops = build_operators(7).unwrap();
        let a = ops.annihilation.to_dense();
        let adag = ops.creation.to_dense();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(a[i][j], adag[j][i]);
            }
        }
    }

    #[test]
    fn number_equals_creation_times_annihilation() {
        let ops = build_operators(6).unwrap();
        let psi: Vec<Complex64> = (0..6)
            .map(|m| Complex64::new(0.3 + m as f64 * 0.1, -0.2))
            .collect();
        let mut tmp = psi.clone();
        let mut out = psi.clone();
        ops.annihilation.apply(&psi, &mut tmp);
        ops.creation.apply(&tmp, &mut out);
        let mut n_psi = psi.clone();
        ops.number.apply(&psi, &mut n_psi);
        for (x, y) in out.iter().zip(&n_psi) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, y.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_too_small_dimension() {
        assert!(matches!(
            build_operators(1),
            Err(QuantumError::InvalidDimension(1))
        ));
    }

    #[test]
    fn drift_generator_antihermitian_part() {
        // M = -i H_mc, so the damping shows up as a real diagonal -gamma m/2:
        // <1| -(i/2) gamma n |1> = -0.025i for gamma = 0.05.
        let params = QuantumParams::new(0.0, 0.05, 4);
        let gen = DriftGenerator::build(&params, 0.0);
        assert_abs_diff_eq!(gen.diag[1].re, -0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(gen.diag[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_damping_antihermitian() {
        // Reassemble H_mc = i M and split into Hermitian/anti-Hermitian
        // parts; the anti-Hermitian part must be exactly -(i/2) gamma n.
        let params = QuantumParams::new(0.008, 0.05, 8);
        for f in [0.0, 4.5] {
            let gen = DriftGenerator::build(&params, f);
            let n = params.n_trunc;
            let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            let i_unit = Complex64::i();
            for m in 0..n {
                h[m][m] = i_unit * gen.diag[m];
                if m > 0 {
                    h[m][m - 1] = i_unit * gen.sub[m];
                }
                if m + 1 < n {
                    h[m][m + 1] = i_unit * gen.sup[m];
                }
            }
            for r in 0..n {
                for c in 0..n {
                    let herm = 0.5 * (h[r][c] + h[c][r].conj());
                    let anti = 0.5 * (h[r][c] - h[c][r].conj());
                    // Hermitian part must be symmetric under conjugation.
                    assert_abs_diff_eq!((herm - 0.5 * (h[c][r] + h[r][c].conj()).conj()).norm(), 0.0, epsilon = 1e-15);
                    let expected = if r == c {
                        Complex64::new(0.0, -0.5 * params.gamma * r as f64)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    assert_abs_diff_eq!((anti - expected).norm(), 0.0, epsilon = 1e-15);
                }
            }
        }
    }
}
