//! Diagram vectors: a linear image of `f fᴴ` whose kernel is the multiples of `I`,
//! so `Σ c_i f̃_i = 0` exactly when `Σ c_i f_i f_iᴴ` is a multiple of the identity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::numkernel::{fmath, FieldTag, Tolerance, VectorValue};

/// Real-equivalent diagram vector.
///
/// Entry layout, all scaled by `1/√(n−1)`: first the `n(n−1)/2` differences
/// `|f(i)|² − |f(j)|²` over pairs `i < j`, then per pair `√(2n)·f(i)f(j)` (real
/// field) or `√(2n)·Re` and `√(2n)·Im` of `f(i)·conj(f(j))` (complex field).
/// Storing only `i < j` with the `√2` folded in keeps the Euclidean inner
/// product equal to that of the full conjugate-pair layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramVector {
    pub dim: usize,
    pub field: FieldTag,
    pub entries: Vec<f64>,
}

impl DiagramVector {
    pub fn expected_len(dim: usize, field: FieldTag) -> usize {
        let pairs = dim * dim.saturating_sub(1) / 2;
        match field {
            FieldTag::Real => 2 * pairs,
            FieldTag::Complex => 3 * pairs,
        }
    }

    pub fn dot(&self, other: &DiagramVector) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }
}

/// Diagram vector in the layout of `f`'s own field.
pub fn diagram_vector(f: &VectorValue) -> Result<DiagramVector> {
    diagram_vector_in(f, f.field())
}

/// Diagram vector in the layout of `field`; a real vector in the complex
/// layout gets zero imaginary product entries.
pub fn diagram_vector_in(f: &VectorValue, field: FieldTag) -> Result<DiagramVector> {
    if f.is_zero() {
        return Err(Error::ZeroVector);
    }
    let field = field.join(f.field());
    let n = f.dim();
    let mut entries = Vec::with_capacity(DiagramVector::expected_len(n, field));
    if n >= 2 {
        let scale = 1.0 / fmath::sqrt((n - 1) as f64);
        let prod = fmath::sqrt(2.0 * n as f64) * scale;
        let x = f.entries();
        for i in 0..n {
            for j in i + 1..n {
                entries.push((x[i].norm_sqr() - x[j].norm_sqr()) * scale);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let z = x[i] * x[j].conj();
                entries.push(prod * z.re);
                if field == FieldTag::Complex {
                    entries.push(prod * z.im);
                }
            }
        }
    }
    Ok(DiagramVector { dim: n, field, entries })
}

/// Diagram vectors of every frame element, in the frame's field.
pub(crate) fn frame_diagrams(f: &Frame, normalize: bool) -> Result<Vec<DiagramVector>> {
    f.vectors()
        .iter()
        .map(|v| {
            let v = if normalize {
                v.scale(crate::Scalar::new(1.0 / v.norm(), 0.0))
            } else {
                v.clone()
            };
            diagram_vector_in(&v, f.field())
        })
        .collect()
}

/// Tightness through `‖Σ f̃_i‖ ≤ tol·Σ‖f_i‖²`.
pub fn tight_via_diagram(f: &Frame, tol: Tolerance) -> Result<bool> {
    let diagrams = frame_diagrams(f, false)?;
    let len = DiagramVector::expected_len(f.dim(), f.field());
    let mut sum = alloc::vec![0.0; len];
    for d in &diagrams {
        for (s, e) in sum.iter_mut().zip(&d.entries) {
            *s += e;
        }
    }
    let norm = fmath::sqrt(sum.iter().map(|x| x * x).sum());
    let energy: f64 = f.vectors().iter().map(|v| v.norm_sqr()).sum();
    Ok(norm <= tol.eps() * energy)
}
