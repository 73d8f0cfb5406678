use alloc::vec::Vec;

use super::{fmath, MatrixValue, Scalar, Tolerance, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Unitary Jacobi rotation acting on coordinates `p < q`:
/// `G_pp = c, G_pq = s, G_qp = −s·ē, G_qq = c·ē`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    c: f64,
    s: f64,
    phase: Scalar,
}

impl Rotation {
    /// Rotation annihilating the `(p, q)` entry of the Hermitian 2×2 block
    /// `[[app, apq], [conj(apq), aqq]]`. `None` when the entry is already zero.
    pub(crate) fn annihilating(app: f64, aqq: f64, apq: Scalar) -> Option<Rotation> {
        let mag = apq.norm();
        if mag == 0.0 {
            return None;
        }
        let phase = apq / mag;
        let theta = (aqq - app) / (2.0 * mag);
        let t = if theta.is_finite() {
            let t = 1.0 / (theta.abs() + fmath::sqrt(theta * theta + 1.0));
            if theta < 0.0 {
                -t
            } else {
                t
            }
        } else {
            0.0
        };
        if t == 0.0 {
            return None;
        }
        let c = 1.0 / fmath::sqrt(t * t + 1.0);
        Some(Rotation { c, s: t * c, phase })
    }

    /// `M ← M·G` restricted to columns `p`, `q`.
    pub(crate) fn apply_right(&self, m: &mut [Scalar], rows: usize, cols: usize, p: usize, q: usize) {
        let e_bar = self.phase.conj();
        for k in 0..rows {
            let mp = m[k * cols + p];
            let mq = m[k * cols + q];
            m[k * cols + p] = mp * self.c - e_bar * mq * self.s;
            m[k * cols + q] = mp * self.s + e_bar * mq * self.c;
        }
    }

    /// `M ← Gᴴ·M` restricted to rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut [Scalar], cols: usize, p: usize, q: usize) {
        let e = self.phase;
        for k in 0..cols {
            let mp = m[p * cols + k];
            let mq = m[q * cols + k];
            m[p * cols + k] = mp * self.c - e * mq * self.s;
            m[q * cols + k] = mp * self.s + e * mq * self.c;
        }
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: MatrixValue,
}

fn off_diagonal_norm(a: &[Scalar], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    fmath::sqrt(s)
}

/// Cyclic Jacobi on an already symmetrized matrix.
fn jacobi(m: &MatrixValue) -> Result<HermitianEigen> {
    let n = m.rows();
    let mut a: Vec<Scalar> = m.entries().to_vec();
    let mut v: Vec<Scalar> = MatrixValue::identity(n).entries().to_vec();
    let scale = m.frobenius_norm();
    let target = f64::EPSILON * scale;
    let mut converged = scale == 0.0 || n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                if let Some(rot) = Rotation::annihilating(a[p * n + p].re, a[q * n + q].re, apq) {
                    rot.apply_right(&mut a, n, n, p, q);
                    rot.apply_left_adjoint(&mut a, n, p, q);
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    a[p * n + p].im = 0.0;
                    a[q * n + q].im = 0.0;
                    rot.apply_right(&mut v, n, n, p, q);
                }
            }
        }
        converged = off_diagonal_norm(&a, n) <= target;
    }
    if !converged {
        return Err(Error::NumericalFailure("Jacobi eigenvalue iteration did not converge"));
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let vecs = MatrixValue::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: vecs,
    })
}

fn symmetrized(m: &MatrixValue) -> MatrixValue {
    let sym = m.add(&m.adjoint()).scale(Scalar::new(0.5, 0.0));
    let n = m.rows();
    // Exact real diagonal.
    MatrixValue::from_fn(n, n, |i, j| {
        let z = sym.get(i, j);
        if i == j {
            Scalar::new(z.re, 0.0)
        } else {
            z
        }
    })
}

/// Eigendecomposition `M = V·diag(λ)·Vᴴ` of a Hermitian matrix.
pub fn hermitian_eig(m: &MatrixValue, tol: Tolerance) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("eigendecomposition needs a square matrix"));
    }
    if !m.is_hermitian(tol.eps()) {
        return Err(Error::NotHermitian);
    }
    jacobi(&symmetrized(m))
}

/// `A = U·D·Uᴴ` for a normal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDiagonalization {
    pub unitary: MatrixValue,
    pub diagonal: MatrixValue,
}

impl UnitaryDiagonalization {
    pub fn eigenvalues(&self) -> Vec<Scalar> {
        self.diagonal.diagonal_entries()
    }
}

// Generic mixing weights for the commuting Hermitian parts. Any pair of
// eigenvalues that collide under both combinations is a genuine multiple
// eigenvalue of A.
const FIRST_MIX: f64 = 0.618_033_988_749_894_8;
const SECOND_MIX: f64 = -1.414_213_562_373_095_1;
const CLUSTER_REL: f64 = 1e-6;

fn mixed(h: &MatrixValue, k: &MatrixValue, phi: f64) -> MatrixValue {
    symmetrized(&h.add(&k.scale(Scalar::new(phi, 0.0))))
}

/// Unitary diagonalization of a normal matrix.
///
/// The Hermitian part `H = (A+Aᴴ)/2` and skew part `K = (A−Aᴴ)/2i` commute, so
/// an eigenbasis of a generic combination `H + φK` diagonalizes `A`; clusters
/// of nearly equal eigenvalues are re-split with a second combination.
pub fn unitary_diagonalize(a: &MatrixValue, tol: Tolerance) -> Result<UnitaryDiagonalization> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("diagonalization needs a square matrix"));
    }
    if !a.is_normal(tol.eps()) {
        return Err(Error::NotNormal);
    }
    let n = a.rows();
    let adj = a.adjoint();
    let h = a.add(&adj).scale(Scalar::new(0.5, 0.0));
    let k = a.sub(&adj).scale(Scalar::new(0.0, -0.5));
    let first = jacobi(&mixed(&h, &k, FIRST_MIX))?;
    let mut u = first.eigenvectors.clone();

    let scale = f64::max(1.0, a.frobenius_norm());
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && first.eigenvalues[end - 1] - first.eigenvalues[end] <= CLUSTER_REL * scale
        {
            end += 1;
        }
        if end - start > 1 {
            let w = MatrixValue::from_fn(n, end - start, |r, c| u.get(r, start + c));
            let restricted = w.adjoint().mul(&mixed(&h, &k, SECOND_MIX)).mul(&w);
            let inner = jacobi(&symmetrized(&restricted))?;
            let rotated = w.mul(&inner.eigenvectors);
            for c in 0..end - start {
                for r in 0..n {
                    u.set(r, start + c, rotated.get(r, c));
                }
            }
        }
        start = end;
    }

    let projected = u.adjoint().mul(a).mul(&u);
    let diagonal = MatrixValue::diagonal(&projected.diagonal_entries());
    let residual = a.sub(&u.mul(&diagonal).mul(&u.adjoint())).frobenius_norm();
    if residual > 10.0 * tol.eps() * scale {
        return Err(Error::NumericalFailure("normal diagonalization residual too large"));
    }
    Ok(UnitaryDiagonalization {
        unitary: u,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn reconstruct(e: &HermitianEigen) -> MatrixValue {
        let lam: Vec<Scalar> = e.eigenvalues.iter().map(|&l| Scalar::new(l, 0.0)).collect();
        let v = &e.eigenvectors;
        v.mul(&MatrixValue::diagonal(&lam)).mul(&v.adjoint())
    }

    #[test]
    fn diagonal_input() {
        let m = MatrixValue::real_diagonal(&[2.0, 1.0]);
        let e = hermitian_eig(&m, tol()).unwrap();
        assert_eq!(e.eigenvalues, alloc::vec![2.0, 1.0]);
        assert_eq!(e.eigenvectors, MatrixValue::identity(2));
    }

    #[test]
    fn swap_matrix() {
        let m = MatrixValue::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&m, tol()).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        // columns (1,1)/√2 and (1,−1)/√2 up to sign
        let v0 = e.eigenvectors.column(0);
        let v1 = e.eigenvectors.column(1);
        assert!((v0.get(0).re.abs() - r).abs() < 1e-15 && (v0.get(0).re - v0.get(1).re).abs() < 1e-15);
        assert!((v1.get(0).re + v1.get(1).re).abs() < 1e-15);
        assert!(reconstruct(&e).sub(&m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn identity_three() {
        let e = hermitian_eig(&MatrixValue::identity(3), tol()).unwrap();
        assert_eq!(e.eigenvalues, alloc::vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = MatrixValue::from_complex(
            3,
            3,
            alloc::vec![
                Scalar::new(2.0, 0.0),
                Scalar::new(1.0, -1.0),
                Scalar::new(0.0, 0.5),
                Scalar::new(1.0, 1.0),
                Scalar::new(-1.0, 0.0),
                Scalar::new(0.3, 0.2),
                Scalar::new(0.0, -0.5),
                Scalar::new(0.3, -0.2),
                Scalar::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eig(&m, tol()).unwrap();
        assert!(reconstruct(&e).sub(&m).frobenius_norm() < 1e-13);
        assert!(e.eigenvectors.is_unitary(1e-13));
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = MatrixValue::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(hermitian_eig(&m, tol()), Err(Error::NotHermitian));
    }

    #[test]
    fn diagonalize_diagonal() {
        let a = MatrixValue::real_diagonal(&[1.0, -1.0]);
        let d = unitary_diagonalize(&a, tol()).unwrap();
        assert_eq!(d.diagonal, a);
        assert!(d.unitary.sub(&MatrixValue::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonalize_rotation() {
        let w = 2.0 * PI / 3.0;
        let (c, s) = (fmath::cos(w), fmath::sin(w));
        let a = MatrixValue::from_real_rows(&[&[c, -s], &[s, c]]).unwrap();
        let d = unitary_diagonalize(&a, tol()).unwrap();
        let ev = d.eigenvalues();
        let expected = Scalar::from_polar(1.0, w);
        assert!((ev[0] - expected).norm() < 1e-14);
        assert!((ev[1] - expected.conj()).norm() < 1e-14);
        // first column ∝ (1, −i)/√2
        let u0 = d.unitary.column(0);
        let ratio = u0.get(1) / u0.get(0);
        assert!((ratio - Scalar::new(0.0, -1.0)).norm() < 1e-14);
        assert!((u0.get(0).norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert_eq!(d.unitary.field(), crate::FieldTag::Complex);
    }

    #[test]
    fn diagonalize_rejects_nilpotent() {
        let a = MatrixValue::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(unitary_diagonalize(&a, tol()), Err(Error::NotNormal));
    }

    #[test]
    fn diagonalize_repeated_eigenvalues() {
        let a = MatrixValue::real_diagonal(&[2.0, 2.0, -1.0]);
        let d = unitary_diagonalize(&a, tol()).unwrap();
        let back = d.unitary.mul(&d.diagonal).mul(&d.unitary.adjoint());
        assert!(back.sub(&a).frobenius_norm() < 1e-14);
    }
}
