//! Tightness and (strict) scalability with certificates.
//!
//! The primary decision procedure is the linear system `Σ x_i f_i f_iᴴ = I` in
//! the unknowns `x = w² ≥ 0`, written over the real and imaginary parts of the
//! upper triangle. The diagram-vector Gramian gives an independent oracle.

mod diagonal;
mod diagram;

pub use diagonal::{build_diagonal_system, normal_scalability, real_one_vector_obstruction, DiagonalScalingSystem};
pub use diagram::{diagram_vector, diagram_vector_in, tight_via_diagram, DiagramVector};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::numkernel::{fmath, nonneg_feasible, svd, FarkasWitness, Feasibility, FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};

pub type InfeasibleWitness = FarkasWitness;

/// Weights making `{w_i f_i}` tight.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCertificate {
    pub weights: Vec<f64>,
    /// `x_i = w_i²`, as returned by the solver.
    pub squared_weights: Vec<f64>,
    pub tight_constant: f64,
    /// `‖Σ w_i² f_i f_iᴴ − λI‖_F`.
    pub residual: f64,
    pub strict: bool,
    /// `min_i w_i²`.
    pub margin: f64,
}

impl ScalingCertificate {
    /// Certificate for given squared weights; the tight constant is
    /// `tr(S_w)/n` and the residual is measured against it.
    pub fn from_squared_weights(frame: &Frame, x: Vec<f64>, tol: Tolerance) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let s = frame.weighted_operator(&x)?;
        let n = frame.dim();
        let lambda = s.diagonal_entries().iter().map(|z| z.re).sum::<f64>() / n as f64;
        let residual = s
            .sub(&MatrixValue::identity(n).scale(Scalar::new(lambda, 0.0)))
            .frobenius_norm();
        let margin = x.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(ScalingCertificate {
            weights: x.iter().map(|&v| fmath::sqrt(v.max(0.0))).collect(),
            squared_weights: x,
            tight_constant: lambda,
            residual,
            strict: margin > tol.eps(),
            margin,
        })
    }

    pub fn from_weights(frame: &Frame, w: &[f64], tol: Tolerance) -> Result<Self> {
        let mut cert = Self::from_squared_weights(frame, w.iter().map(|v| v * v).collect(), tol)?;
        cert.weights = w.to_vec();
        Ok(cert)
    }

    /// Re-checks the certificate against `frame` from scratch.
    pub fn verify(&self, frame: &Frame, tol: Tolerance) -> bool {
        if self.weights.len() != frame.len() || self.squared_weights.len() != frame.len() {
            return false;
        }
        if self.squared_weights.iter().any(|&x| x < -tol.eps()) || !(self.tight_constant > 0.0) {
            return false;
        }
        let consistent = self
            .weights
            .iter()
            .zip(&self.squared_weights)
            .all(|(w, x)| (w * w - x).abs() <= 10.0 * tol.eps() * (1.0 + x.abs()));
        let Ok(s) = frame.weighted_operator(&self.squared_weights) else {
            return false;
        };
        let residual = s
            .sub(&MatrixValue::identity(frame.dim()).scale(Scalar::new(self.tight_constant, 0.0)))
            .frobenius_norm();
        let min_x = self.squared_weights.iter().copied().fold(f64::INFINITY, f64::min);
        consistent
            && residual <= 10.0 * tol.eps() * self.tight_constant
            && (!self.strict || (self.margin > tol.eps() && min_x > tol.eps()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalingOutcome {
    Scalable(ScalingCertificate),
    NotScalable(InfeasibleWitness),
}

impl ScalingOutcome {
    pub fn is_scalable(&self) -> bool {
        matches!(self, ScalingOutcome::Scalable(_))
    }

    pub fn certificate(&self) -> Option<&ScalingCertificate> {
        match self {
            ScalingOutcome::Scalable(c) => Some(c),
            ScalingOutcome::NotScalable(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&InfeasibleWitness> {
        match self {
            ScalingOutcome::Scalable(_) => None,
            ScalingOutcome::NotScalable(w) => Some(w),
        }
    }
}

/// Real equations for `Σ x_i H_i = I` with Hermitian `H_i`.
///
/// Rows: the `n` diagonal entries, then for each pair `p < q` the real part
/// and (complex field only) the imaginary part of entry `(p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub matrix: MatrixValue,
    pub rhs: VectorValue,
    dim: usize,
}

pub(crate) fn hermitian_rows(m: &MatrixValue, field: FieldTag) -> Vec<f64> {
    let n = m.rows();
    let mut out: Vec<f64> = (0..n).map(|p| m.get(p, p).re).collect();
    for p in 0..n {
        for q in p + 1..n {
            let z = m.get(p, q);
            out.push(z.re);
            if field == FieldTag::Complex {
                out.push(z.im);
            }
        }
    }
    out
}

impl AssembledSystem {
    pub(crate) fn from_columns(columns: &[Vec<f64>], dim: usize, field: FieldTag) -> Self {
        let rhs = hermitian_rows(&MatrixValue::identity(dim), field);
        let rows = rhs.len();
        let cols = columns.len();
        let mut data = alloc::vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                data[i * cols + j] = *v;
            }
        }
        AssembledSystem {
            matrix: MatrixValue::from_real(rows, cols, &data).expect("finite assembled system"),
            rhs: VectorValue::from_real(&rhs).expect("finite rhs"),
            dim,
        }
    }

    /// `‖Σ x_i H_i − I‖_F` reconstructed from the row residuals.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let r = self.matrix.mul_vec(&VectorValue::from_parts(x.iter().map(|&v| Scalar::new(v, 0.0)).collect()));
        let mut acc = 0.0;
        for (i, (ri, bi)) in r.entries().iter().zip(self.rhs.entries()).enumerate() {
            let d = ri.re - bi.re;
            acc += if i < self.dim { d * d } else { 2.0 * d * d };
        }
        fmath::sqrt(acc)
    }

    /// Solves the system; in strict mode the minimum weight is maximized and a
    /// margin `≤ tol` yields a witness for the shifted system `x ≥ tol·1`.
    pub fn solve(&self, strict: bool, tol: Tolerance) -> Result<ScalingOutcome> {
        match nonneg_feasible(&self.matrix, &self.rhs, strict, tol)? {
            Feasibility::Infeasible(w) => Ok(ScalingOutcome::NotScalable(w)),
            Feasibility::Feasible(p) => {
                let x = p.x.to_real_vec()?;
                if strict && p.margin <= tol.eps() {
                    let y = p
                        .margin_certificate
                        .ok_or(Error::NumericalFailure("strict solve returned no margin dual"))?;
                    let w = FarkasWitness::new(y, tol.eps(), &self.matrix, &self.rhs)?;
                    return Ok(ScalingOutcome::NotScalable(w));
                }
                let residual = self.residual(&x);
                if residual > 10.0 * tol.eps() {
                    return Err(Error::NumericalFailure("scaling certificate residual too large"));
                }
                let margin = x.iter().copied().fold(f64::INFINITY, f64::min);
                Ok(ScalingOutcome::Scalable(ScalingCertificate {
                    weights: x.iter().map(|&v| fmath::sqrt(v.max(0.0))).collect(),
                    squared_weights: x,
                    tight_constant: 1.0,
                    residual,
                    strict: margin > tol.eps(),
                    margin,
                }))
            }
        }
    }
}

/// The equality system `Σ x_i f_i f_iᴴ = I` behind [`solve_scaling`].
pub fn scaling_system(frame: &Frame) -> AssembledSystem {
    let columns: Vec<Vec<f64>> = frame
        .vectors()
        .iter()
        .map(|v| hermitian_rows(&v.outer_self(), frame.field()))
        .collect();
    AssembledSystem::from_columns(&columns, frame.dim(), frame.field())
}

/// Parseval scaling (`λ = 1`) of `frame`, or a witness that none exists.
pub fn solve_scaling(frame: &Frame, strict: bool, tol: Tolerance) -> Result<ScalingOutcome> {
    scaling_system(frame).solve(strict, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramianCheck {
    /// Gramian of the diagram vectors of the normalized frame.
    pub gramian: MatrixValue,
    pub nullspace_basis: Vec<VectorValue>,
    pub nonneg_null_found: bool,
    /// Some null vector has every entry positive (strict scalability).
    pub positive_null_found: bool,
    /// A nonnegative null vector with entries summing to one, when found.
    pub null_vector: Option<VectorValue>,
}

/// Scalability through a nonnegative null vector of the diagram Gramian of
/// the unit-normalized frame.
pub fn gramian_scaling_check(frame: &Frame, tol: Tolerance) -> Result<GramianCheck> {
    let diagrams = diagram::frame_diagrams(frame, true)?;
    let k = diagrams.len();
    let mut g = alloc::vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = diagrams[i].dot(&diagrams[j]);
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    let gramian = MatrixValue::from_real(k, k, &g)?;
    let d = svd(&gramian)?;
    let sigma_max = d.singular_values.first().copied().unwrap_or(0.0);
    let nullspace_basis = d.null_space(tol.eps() * sigma_max.max(1.0));

    // G̃x = 0, Σx = 1, x ≥ 0.
    let mut rows = g.clone();
    rows.extend(core::iter::repeat(1.0).take(k));
    let mut rhs = alloc::vec![0.0; k];
    rhs.push(1.0);
    let a = MatrixValue::from_real(k + 1, k, &rows)?;
    let b = VectorValue::from_real(&rhs)?;
    let feas = nonneg_feasible(&a, &b, true, tol)?;
    let null_vector = feas.point().map(|p| p.x.clone());
    // Σx = 1 normalizes, so the margin threshold is relative to 1/k.
    let positive = feas.point().is_some_and(|p| p.margin * k as f64 > tol.eps());
    Ok(GramianCheck {
        gramian,
        nullspace_basis,
        nonneg_null_found: null_vector.is_some(),
        positive_null_found: positive,
        null_vector,
    })
}

/// Verdicts of the two independent scalability procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleAgreement {
    pub solver_scalable: bool,
    pub gramian_scalable: bool,
}

impl OracleAgreement {
    pub fn agree(&self) -> bool {
        self.solver_scalable == self.gramian_scalable
    }
}

pub fn oracle_agreement(frame: &Frame, tol: Tolerance) -> Result<OracleAgreement> {
    Ok(OracleAgreement {
        solver_scalable: solve_scaling(frame, false, tol)?.is_scalable(),
        gramian_scalable: gramian_scaling_check(frame, tol)?.nonneg_null_found,
    })
}

/// Necessary condition for scaling a standard basis (or all but its last
/// vector) extended by `f, g`: both extra vectors are supported on exactly the
/// same two coordinates.
///
/// The frame must be `e_1, …, e_n, f, g` or `e_1, …, e_{n−1}, f, g`.
pub fn support_pattern_check(frame: &Frame, tol: Tolerance) -> Result<bool> {
    let n = frame.dim();
    let k = frame.len();
    if n < 2 || (k != n + 2 && k != n + 1) {
        return Err(Error::TemplateMismatch);
    }
    let basis_len = k - 2;
    for (i, v) in frame.vectors()[..basis_len].iter().enumerate() {
        if v.distance(&VectorValue::basis(n, i)) > tol.eps() {
            return Err(Error::TemplateMismatch);
        }
    }
    let support = |v: &VectorValue| -> Vec<usize> { (0..n).filter(|&i| v.get(i).norm() > tol.eps()).collect() };
    let f = support(&frame.vectors()[k - 2]);
    let g = support(&frame.vectors()[k - 1]);
    Ok(f.len() == 2 && f == g)
}
