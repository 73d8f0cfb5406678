use alloc::vec::Vec;

use super::eigen::Rotation;
use super::{fmath, MatrixValue, Scalar, Tolerance, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `M·V = U·Σ` (one-sided Jacobi).
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// `min(rows, cols)` values, descending.
    pub singular_values: Vec<f64>,
    /// `rows × min(rows, cols)`; columns belonging to zero singular values are zero.
    pub u: MatrixValue,
    /// Full `cols × cols` unitary right basis, ordered to match; trailing columns
    /// span the null space when `cols > rows`.
    pub v: MatrixValue,
}

impl Svd {
    /// Right null-space columns: singular value `≤ threshold`, plus the
    /// trailing columns when the matrix is wide.
    pub fn null_space(&self, threshold: f64) -> Vec<super::VectorValue> {
        let n = self.v.cols();
        (0..n)
            .filter(|&j| j >= self.singular_values.len() || self.singular_values[j] <= threshold)
            .map(|j| self.v.column(j))
            .collect()
    }
}

pub fn svd(m: &MatrixValue) -> Result<Svd> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Scalar> = m.entries().to_vec();
    let mut v: Vec<Scalar> = MatrixValue::identity(cols).entries().to_vec();
    let column_norm_sqr = |a: &[Scalar], j: usize| -> f64 { (0..rows).map(|k| a[k * cols + j].norm_sqr()).sum() };

    let mut converged = cols == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = column_norm_sqr(&a, p);
                let beta = column_norm_sqr(&a, q);
                let gamma: Scalar = (0..rows).map(|k| a[k * cols + p].conj() * a[k * cols + q]).sum();
                if gamma.norm() <= f64::EPSILON * fmath::sqrt(alpha * beta) || gamma.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                if let Some(rot) = Rotation::annihilating(alpha, beta, gamma) {
                    rot.apply_right(&mut a, rows, cols, p, q);
                    rot.apply_right(&mut v, cols, cols, p, q);
                    rotated = true;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NumericalFailure("one-sided Jacobi SVD did not converge"));
    }

    let norms: Vec<f64> = (0..cols).map(|j| fmath::sqrt(column_norm_sqr(&a, j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let p = rows.min(cols);
    let singular_values: Vec<f64> = order[..p].iter().map(|&j| norms[j]).collect();
    let u = MatrixValue::from_fn(rows, p, |r, c| {
        let j = order[c];
        if norms[j] > 0.0 {
            a[r * cols + j] / norms[j]
        } else {
            ZERO
        }
    });
    let v = MatrixValue::from_fn(cols, cols, |r, c| v[r * cols + order[c]]);
    Ok(Svd {
        singular_values,
        u,
        v,
    })
}

/// Numerical rank and an orthonormal basis of the column space.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdRank {
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `rows × rank` with orthonormal columns; `None` when the rank is zero.
    pub column_basis: Option<MatrixValue>,
}

/// Rank counts singular values `> tol·σ_max`.
pub fn svd_rank(m: &MatrixValue, tol: Tolerance) -> Result<SvdRank> {
    let d = svd(m)?;
    let sigma_max = d.singular_values.first().copied().unwrap_or(0.0);
    let rank = d
        .singular_values
        .iter()
        .filter(|&&s| sigma_max > 0.0 && s > tol.eps() * sigma_max)
        .count();
    let column_basis = (rank > 0).then(|| MatrixValue::from_fn(m.rows(), rank, |r, c| d.u.get(r, c)));
    Ok(SvdRank {
        singular_values: d.singular_values,
        rank,
        column_basis,
    })
}
