//! Dense small-scale numeric substrate.
//!
//! Every value is stored as complex entries with a [`FieldTag`]; real-tagged
//! values carry exact zero imaginary parts. The decompositions are Jacobi-type
//! and fully deterministic, which keeps certificates reproducible bit for bit.

mod eigen;
mod lp;
mod matrix;
mod solve;
mod svd;

pub use eigen::{hermitian_eig, unitary_diagonalize, HermitianEigen, UnitaryDiagonalization};
pub use lp::{nonneg_feasible, FarkasWitness, Feasibility, FeasiblePoint};
pub use matrix::{MatrixValue, VectorValue};
pub use solve::{inverse, solve};
pub use svd::{svd, svd_rank, Svd, SvdRank};

use crate::error::{Error, Result};

pub type Scalar = num_complex::Complex64;

/// `f64` math that also works without `std`.
pub(crate) mod fmath {
    use num_traits::Float;

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        Float::sqrt(x)
    }

    #[inline]
    pub fn cos(x: f64) -> f64 {
        Float::cos(x)
    }

    #[inline]
    pub fn sin(x: f64) -> f64 {
        Float::sin(x)
    }
}

pub(crate) const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub(crate) const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Number field of a vector or matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Real,
    Complex,
}

impl FieldTag {
    /// The smallest field containing both.
    pub fn join(self, other: FieldTag) -> FieldTag {
        if self == FieldTag::Complex || other == FieldTag::Complex {
            FieldTag::Complex
        } else {
            FieldTag::Real
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        }
    }
}

/// Relative numerical tolerance, `1e-9` unless overridden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Tolerance(eps))
        } else {
            Err(Error::InvalidTolerance)
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    /// The same tolerance multiplied by `factor` (used for the `10·tol` checks).
    pub fn scaled(self, factor: f64) -> Tolerance {
        Tolerance(self.0 * factor)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(Self::DEFAULT_EPS)
    }
}
