//! Scaling equations for iterates of a diagonal operator.
//!
//! For `D = diag(a_1, …, a_n)` and generators `x_s`, the scaled system
//! `{w_{s,j} D^j x_s}` is Parseval iff for all `i` and all `i < k`
//!
//! ```text
//! Σ_s |x_s(i)|² Σ_j w²_{s,j} |a_i|^{2j}                 = 1
//! Σ_s x_s(i) conj(x_s(k)) Σ_j w²_{s,j} (a_i conj(a_k))^j = 0
//! ```
//!
//! which is linear in the unknowns `w²_{s,j}`.

use alloc::vec::Vec;

use super::{hermitian_rows, AssembledSystem, ScalingOutcome};
use crate::error::{Error, Result};
use crate::numkernel::{unitary_diagonalize, FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalScalingSystem {
    pub diagonal: Vec<Scalar>,
    pub generators: Vec<VectorValue>,
    pub iterations: Vec<usize>,
    /// Unknowns ordered by generator, then `j` ascending.
    pub system: AssembledSystem,
}

impl DiagonalScalingSystem {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn unknowns(&self) -> usize {
        self.iterations.iter().map(|l| l + 1).sum()
    }

    /// `n + n(n−1)/2` complex equations before the real split.
    pub fn complex_rows(&self) -> usize {
        let n = self.dim();
        n + n * (n - 1) / 2
    }

    pub fn solve(&self, strict: bool, tol: Tolerance) -> Result<ScalingOutcome> {
        self.system.solve(strict, tol)
    }
}

pub fn build_diagonal_system(a: &[Scalar], generators: &[VectorValue], iterations: &[usize]) -> Result<DiagonalScalingSystem> {
    let n = a.len();
    if n == 0 || generators.is_empty() {
        return Err(Error::ShapeMismatch("diagonal system needs entries and generators"));
    }
    if generators.len() != iterations.len() {
        return Err(Error::ShapeMismatch("one iteration count per generator"));
    }
    if generators.iter().any(|g| g.dim() != n) {
        return Err(Error::ShapeMismatch("generator dimension differs from the diagonal"));
    }
    let complex = a.iter().any(|z| z.im != 0.0) || generators.iter().any(|g| g.field() == FieldTag::Complex);
    let field = if complex { FieldTag::Complex } else { FieldTag::Real };

    let mut columns = Vec::new();
    for (g, &l) in generators.iter().zip(iterations) {
        let x = g.entries();
        // powers[p][q] holds (a_p conj(a_q))^j for the current j.
        let mut powers = alloc::vec![Scalar::new(1.0, 0.0); n * n];
        for _ in 0..=l {
            let m = MatrixValue::from_complex(n, n, (0..n * n).map(|pq| x[pq / n] * x[pq % n].conj() * powers[pq]).collect())?;
            columns.push(hermitian_rows(&m, field));
            for (pq, z) in powers.iter_mut().enumerate() {
                *z *= a[pq / n] * a[pq % n].conj();
            }
        }
    }
    Ok(DiagonalScalingSystem {
        diagonal: a.to_vec(),
        generators: generators.to_vec(),
        iterations: iterations.to_vec(),
        system: AssembledSystem::from_columns(&columns, n, field),
    })
}

/// Scalability of `{A^j f_s}` for normal `A`, decided on the diagonalized
/// system `(D, U*f_s)`; weights are ordered like the iterates.
pub fn normal_scalability(
    a: &MatrixValue,
    generators: &[VectorValue],
    iterations: &[usize],
    strict: bool,
    tol: Tolerance,
) -> Result<ScalingOutcome> {
    let diag = unitary_diagonalize(a, tol)?;
    let u_adj = diag.unitary.adjoint();
    let v: Vec<VectorValue> = generators.iter().map(|f| u_adj.mul_vec(f)).collect();
    build_diagonal_system(&diag.eigenvalues(), &v, iterations)?.solve(strict, tol)
}

/// A single real generator under a real diagonal operator never yields a
/// strictly scalable frame once `n ≥ 3`: every off-diagonal equation needs
/// `a_i a_k < 0`, impossible for three indices at once.
pub fn real_one_vector_obstruction(a: &[f64]) -> bool {
    a.len() >= 3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn re(v: &[f64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::new(x, 0.0)).collect()
    }

    #[test]
    fn two_dim_sign_example() {
        let v = VectorValue::from_real(&[0.5, 0.5]).unwrap();
        let sys = build_diagonal_system(&re(&[1.0, -1.0]), &[v], &[3]).unwrap();
        assert_eq!(sys.unknowns(), 4);
        assert_eq!(sys.complex_rows(), 3);
        assert!(sys.system.residual(&[1.0; 4]) < 1e-15);
        let c = sys.solve(true, tol()).unwrap().certificate().cloned().unwrap();
        assert!(c.strict);
    }

    #[test]
    fn real_three_dim_single_generator_is_obstructed() {
        let v = VectorValue::from_real(&[0.6, -0.3, 0.74]).unwrap();
        let sys = build_diagonal_system(&re(&[1.3, -0.4, 0.8]), &[v], &[8]).unwrap();
        assert!(!sys.solve(true, tol()).unwrap().is_scalable());
        assert!(real_one_vector_obstruction(&[1.0, -1.0, 2.0]));
        assert!(!real_one_vector_obstruction(&[1.0, -1.0]));
        assert!(!real_one_vector_obstruction(&[5.0]));
    }

    #[test]
    fn harmonic_diagonal_is_uniform() {
        let k = 5;
        let n = 3;
        let gamma = Scalar::from_polar(1.0, 2.0 * core::f64::consts::PI / k as f64);
        let a: Vec<Scalar> = (0..n).map(|i| gamma.powu(i as u32)).collect();
        let v = VectorValue::from_complex(alloc::vec![Scalar::new(1.0 / (k as f64).sqrt(), 0.0); n]).unwrap();
        let sys = build_diagonal_system(&a, &[v], &[k - 1]).unwrap();
        assert_eq!(sys.system.matrix.rows(), n * n);
        assert!(sys.system.residual(&alloc::vec![1.0; k]) < 1e-14);
        assert!(sys.solve(true, tol()).unwrap().is_scalable());
    }

    #[test]
    fn normal_path_matches_diagonal() {
        let a = MatrixValue::real_diagonal(&[1.0, -1.0]);
        let f = VectorValue::from_real(&[0.5, 0.5]).unwrap();
        let out = normal_scalability(&a, &[f], &[3], true, tol()).unwrap();
        assert!(out.certificate().unwrap().strict);
        let nil = MatrixValue::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let f = VectorValue::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(normal_scalability(&nil, &[f], &[1], false, tol()), Err(Error::NotNormal));
    }

    #[test]
    fn shape_errors() {
        let v = VectorValue::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(build_diagonal_system(&re(&[1.0, 2.0]), &[v.clone()], &[1]), Err(Error::ShapeMismatch(_))));
        assert!(matches!(build_diagonal_system(&re(&[1.0, 2.0, 3.0]), &[v], &[]), Err(Error::ShapeMismatch(_))));
    }
}
