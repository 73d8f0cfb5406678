//! Finite frames: frame operator, bounds, canonical duals, fusion checks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eig, solve, svd_rank, FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};

/// Ordered list of nonzero vectors of a common dimension; the columns of the
/// synthesis matrix `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    dim: usize,
    field: FieldTag,
    vectors: Vec<VectorValue>,
}

impl Frame {
    pub fn new(vectors: Vec<VectorValue>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyFrame)?;
        let dim = first.dim();
        let mut field = FieldTag::Real;
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            field = field.join(v.field());
        }
        Ok(Frame { dim, field, vectors })
    }

    /// Frame made of the columns of `m`.
    pub fn from_synthesis(m: &MatrixValue) -> Result<Self> {
        Frame::new(m.columns())
    }

    pub fn from_real_columns(columns: &[&[f64]]) -> Result<Self> {
        Frame::new(columns.iter().map(|c| VectorValue::from_real(c)).collect::<Result<Vec<_>>>()?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Always `false`; frames are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[VectorValue] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<VectorValue> {
        self.vectors
    }

    pub fn synthesis(&self) -> MatrixValue {
        // Nonempty and equal dims, so this cannot fail.
        MatrixValue::from_columns(&self.vectors).expect("frame vectors share one dimension")
    }

    pub fn frame_operator(&self) -> MatrixValue {
        frame_operator(self)
    }

    /// `Σ x_i f_i f_iᴴ` for real coefficients `x`.
    pub fn weighted_operator(&self, x: &[f64]) -> Result<MatrixValue> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: x.len(),
            });
        }
        let mut s = MatrixValue::zeros(self.dim, self.dim);
        for (v, &xi) in self.vectors.iter().zip(x) {
            s = s.add(&v.outer_self().scale(Scalar::new(xi, 0.0)));
        }
        Ok(s)
    }

    /// `{M f_i}`; fails if some image vanishes.
    pub fn mapped(&self, m: &MatrixValue) -> Result<Frame> {
        if m.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.cols(),
            });
        }
        Frame::new(self.vectors.iter().map(|v| m.mul_vec(v)).collect())
    }

    /// Entrywise, order-sensitive comparison.
    pub fn approx_eq(&self, other: &Frame, tol: f64) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self.vectors.iter().zip(&other.vectors).all(|(a, b)| a.distance(b) <= tol)
    }
}

pub fn frame_operator(f: &Frame) -> MatrixValue {
    let m = f.synthesis();
    m.mul(&m.adjoint())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_tight: bool,
    pub tight_constant: Option<f64>,
    pub parseval: bool,
}

/// Optimal frame bounds are the extreme eigenvalues of `S`.
pub fn analyze(f: &Frame, tol: Tolerance) -> Result<FrameReport> {
    let s = f.frame_operator();
    let eig = hermitian_eig(&s, tol)?;
    let upper = eig.eigenvalues[0];
    let lower = *eig.eigenvalues.last().expect("nonempty spectrum");
    let eps = tol.eps();
    // Relative: a uniformly rescaled frame classifies the same way.
    let is_frame = lower > eps * upper;
    let is_tight = is_frame && upper - lower <= eps * upper;
    let tight_constant = is_tight.then(|| eig.eigenvalues.iter().sum::<f64>() / eig.eigenvalues.len() as f64);
    let parseval = is_tight && (lower - 1.0).abs() <= eps && (upper - 1.0).abs() <= eps;
    Ok(FrameReport {
        lower_bound: lower,
        upper_bound: upper,
        is_frame,
        is_tight,
        tight_constant,
        parseval,
    })
}

/// `{S⁻¹ f_i}`.
pub fn canonical_dual(f: &Frame, tol: Tolerance) -> Result<Frame> {
    if !analyze(f, tol)?.is_frame {
        return Err(Error::NotAFrame);
    }
    let dual = solve(&f.frame_operator(), &f.synthesis()).map_err(|_| Error::NotAFrame)?;
    Frame::from_synthesis(&dual)
}

/// `‖F·Gᴴ − I‖_F ≤ tol`.
pub fn verify_duality(f: &Frame, g: &Frame, tol: Tolerance) -> Result<bool> {
    if f.dim() != g.dim() || f.len() != g.len() {
        return Err(Error::ShapeMismatch("dual pair needs equal dimension and cardinality"));
    }
    let prod = f.synthesis().mul(&g.synthesis().adjoint());
    Ok(prod.sub(&MatrixValue::identity(f.dim())).frobenius_norm() <= tol.eps())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionDecomposition {
    /// Orthonormal bases of the spans `W_s`, one per subframe.
    pub subspaces: Vec<MatrixValue>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_fusion_frame: bool,
}

/// Fusion bounds of the spans of `subframes`: extreme eigenvalues of `Σ P_s`.
pub fn fusion_check(subframes: &[Frame], tol: Tolerance) -> Result<FusionDecomposition> {
    let first = subframes.first().ok_or(Error::EmptyFrame)?;
    let n = first.dim();
    let mut subspaces = Vec::with_capacity(subframes.len());
    let mut sum = MatrixValue::zeros(n, n);
    for sub in subframes {
        if sub.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: sub.dim(),
            });
        }
        let basis = svd_rank(&sub.synthesis(), tol)?
            .column_basis
            .ok_or(Error::NumericalFailure("subframe has numerically zero span"))?;
        sum = sum.add(&basis.mul(&basis.adjoint()));
        subspaces.push(basis);
    }
    let eig = hermitian_eig(&sum, tol)?;
    let upper = eig.eigenvalues[0];
    let lower = *eig.eigenvalues.last().expect("nonempty spectrum");
    Ok(FusionDecomposition {
        subspaces,
        lower_bound: lower,
        upper_bound: upper,
        is_fusion_frame: lower > tol.eps(),
    })
}
