use alloc::vec::Vec;

use super::{MatrixValue, Scalar, ZERO};
use crate::error::{Error, Result};

/// Solves `A·X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &MatrixValue, b: &MatrixValue) -> Result<MatrixValue> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("linear solve needs a square matrix"));
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let n = a.rows();
    let m = b.cols();
    let mut lu: Vec<Scalar> = a.entries().to_vec();
    let mut x: Vec<Scalar> = b.entries().to_vec();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let singular_below = scale * f64::EPSILON * n as f64;

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag <= singular_below {
            return Err(Error::SingularMatrix);
        }
        if pivot_row != col {
            for k in 0..n {
                lu.swap(col * n + k, pivot_row * n + k);
            }
            for k in 0..m {
                x.swap(col * m + k, pivot_row * m + k);
            }
        }
        let pivot = lu[col * n + col];
        for r in col + 1..n {
            let factor = lu[r * n + col] / pivot;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = lu[col * n + k];
                lu[r * n + k] -= factor * v;
            }
            for k in 0..m {
                let v = x[col * m + k];
                x[r * m + k] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[col * n + col];
        for k in 0..m {
            let mut acc = x[col * m + k];
            for j in col + 1..n {
                acc -= lu[col * n + j] * x[j * m + k];
            }
            x[col * m + k] = acc / pivot;
        }
    }
    Ok(MatrixValue::from_parts(n, m, x))
}

pub fn inverse(a: &MatrixValue) -> Result<MatrixValue> {
    solve(a, &MatrixValue::identity(a.rows()))
}
