use alloc::vec::Vec;

use super::{fmath, FieldTag, Scalar, ONE, ZERO};
use crate::error::{Error, Result};

fn check_entries(field: FieldTag, data: &[Scalar]) -> Result<()> {
    for z in data {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if field == FieldTag::Real && z.im != 0.0 {
            return Err(Error::ImaginaryInReal);
        }
    }
    Ok(())
}

fn detect_field(data: &[Scalar]) -> FieldTag {
    if data.iter().all(|z| z.im == 0.0) {
        FieldTag::Real
    } else {
        FieldTag::Complex
    }
}

/// Dense row-major matrix over ℝ or ℂ.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixValue {
    rows: usize,
    cols: usize,
    field: FieldTag,
    data: Vec<Scalar>,
}

impl MatrixValue {
    pub fn new(rows: usize, cols: usize, field: FieldTag, data: Vec<Scalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::BadEntryCount {
                expected: rows * cols,
                found: data.len(),
            });
        }
        check_entries(field, &data)?;
        Ok(MatrixValue {
            rows,
            cols,
            field,
            data,
        })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data = data.iter().map(|&x| Scalar::new(x, 0.0)).collect();
        Self::new(rows, cols, FieldTag::Real, data)
    }

    /// Real matrix from a list of rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows"));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self::from_real(r, c, &flat)
    }

    pub fn from_complex(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        Self::new(rows, cols, FieldTag::Complex, data)
    }

    /// Internal constructor for results of trusted arithmetic; the field is
    /// detected from the entries.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        let field = detect_field(&data);
        MatrixValue {
            rows,
            cols,
            field,
            data,
        }
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_parts(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_parts(rows, cols, alloc::vec![ZERO; rows * cols])
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Scalar::new(entries[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Synthesis-style matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[VectorValue]) -> Result<Self> {
        let first = columns.first().ok_or(Error::EmptyFrame)?;
        let n = first.dim();
        for c in columns {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        let k = columns.len();
        Ok(Self::from_fn(n, k, |i, j| columns[j].get(i)))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> FieldTag {
        self.field
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> VectorValue {
        VectorValue::from_parts((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn columns(&self) -> Vec<VectorValue> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Real entries, row-major. Fails for complex-tagged matrices.
    pub fn to_real_vec(&self) -> Result<Vec<f64>> {
        if self.field == FieldTag::Complex {
            return Err(Error::RealRequired);
        }
        Ok(self.data.iter().map(|z| z.re).collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj());
        m.field = self.field;
        m
    }

    /// Matrix product. Panics when the inner dimensions disagree.
    pub fn mul(&self, rhs: &MatrixValue) -> MatrixValue {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut data = alloc::vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out = &mut data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        let mut m = Self::from_parts(self.rows, rhs.cols, data);
        if self.field.join(rhs.field) == FieldTag::Complex {
            m.field = FieldTag::Complex;
        }
        m
    }

    /// Matrix-vector product. Panics when dimensions disagree.
    pub fn mul_vec(&self, v: &VectorValue) -> VectorValue {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let data = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.entries())
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect();
        let mut out = VectorValue::from_parts(data);
        if self.field.join(v.field()) == FieldTag::Complex {
            out.field = FieldTag::Complex;
        }
        out
    }

    fn zip_with(&self, rhs: &MatrixValue, f: impl Fn(Scalar, Scalar) -> Scalar) -> MatrixValue {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "elementwise shape mismatch"
        );
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Self::from_parts(self.rows, self.cols, data)
    }

    pub fn add(&self, rhs: &MatrixValue) -> MatrixValue {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &MatrixValue) -> MatrixValue {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: Scalar) -> MatrixValue {
        Self::from_parts(self.rows, self.cols, self.data.iter().map(|&a| a * s).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `self^k` by repeated multiplication.
    pub fn power(&self, k: usize) -> MatrixValue {
        assert!(self.is_square());
        let mut out = MatrixValue::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `‖self − selfᴴ‖_F ≤ tol·‖self‖_F`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.adjoint()).frobenius_norm() <= tol * self.frobenius_norm()
    }

    /// `‖self·selfᴴ − selfᴴ·self‖_F ≤ tol·max(1, ‖self‖²)`.
    pub fn is_normal(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let adj = self.adjoint();
        let commutator = self.mul(&adj).sub(&adj.mul(self)).frobenius_norm();
        let scale = self.frobenius_norm();
        commutator <= tol * f64::max(1.0, scale * scale)
    }

    /// `‖self·selfᴴ − I‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self.adjoint().mul(self).sub(&MatrixValue::identity(self.rows)).frobenius_norm() <= tol
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: Scalar) {
        self.data[i * self.cols + j] = z;
        if z.im != 0.0 {
            self.field = FieldTag::Complex;
        }
    }
}

/// Dense vector over ℝ or ℂ.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorValue {
    field: FieldTag,
    data: Vec<Scalar>,
}

impl VectorValue {
    pub fn new(field: FieldTag, data: Vec<Scalar>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::ShapeMismatch("vector dimension must be positive"));
        }
        check_entries(field, &data)?;
        Ok(VectorValue { field, data })
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(FieldTag::Real, data.iter().map(|&x| Scalar::new(x, 0.0)).collect())
    }

    pub fn from_complex(data: Vec<Scalar>) -> Result<Self> {
        Self::new(FieldTag::Complex, data)
    }

    pub(crate) fn from_parts(data: Vec<Scalar>) -> Self {
        let field = detect_field(&data);
        VectorValue { field, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_parts(alloc::vec![ZERO; n])
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut data = alloc::vec![ZERO; n];
        data[i] = ONE;
        Self::from_parts(data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn field(&self) -> FieldTag {
        self.field
    }

    /// Same entries, tagged complex.
    pub fn into_complex(mut self) -> Self {
        self.field = FieldTag::Complex;
        self
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> Scalar {
        self.data[i]
    }

    pub fn to_real_vec(&self) -> Result<Vec<f64>> {
        if self.field == FieldTag::Complex {
            return Err(Error::RealRequired);
        }
        Ok(self.data.iter().map(|z| z.re).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.norm_sqr())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&z| z == ZERO)
    }

    /// Inner product `⟨self, other⟩ = Σ self_i · conj(other_i)`.
    pub fn dot(&self, other: &VectorValue) -> Scalar {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b.conj()).sum()
    }

    pub fn scale(&self, s: Scalar) -> VectorValue {
        let mut out = Self::from_parts(self.data.iter().map(|&a| a * s).collect());
        if self.field == FieldTag::Complex {
            out.field = FieldTag::Complex;
        }
        out
    }

    pub fn add(&self, other: &VectorValue) -> VectorValue {
        assert_eq!(self.dim(), other.dim());
        Self::from_parts(self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, other: &VectorValue) -> VectorValue {
        assert_eq!(self.dim(), other.dim());
        Self::from_parts(self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect())
    }

    pub fn distance(&self, other: &VectorValue) -> f64 {
        self.sub(other).norm()
    }

    /// Rank-one matrix `self · selfᴴ`.
    pub fn outer_self(&self) -> MatrixValue {
        let n = self.dim();
        MatrixValue::from_fn(n, n, |i, j| self.data[i] * self.data[j].conj())
    }

    /// Copy of `self` placed at `offset` inside a zero vector of dimension `n`.
    pub fn embedded(&self, n: usize, offset: usize) -> VectorValue {
        let mut data = alloc::vec![ZERO; n];
        data[offset..offset + self.dim()].copy_from_slice(&self.data);
        let mut out = Self::from_parts(data);
        out.field = self.field;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(
            MatrixValue::from_real(2, 2, &[1.0, 2.0, 3.0]),
            Err(Error::BadEntryCount { expected: 4, found: 3 })
        ));
        assert_eq!(MatrixValue::from_real(1, 1, &[f64::NAN]), Err(Error::NonFinite));
        assert_eq!(
            MatrixValue::new(1, 1, FieldTag::Real, alloc::vec![Scalar::new(0.0, 1.0)]),
            Err(Error::ImaginaryInReal)
        );
        assert!(VectorValue::from_real(&[]).is_err());
    }

    #[test]
    fn products_and_adjoint() {
        let a = MatrixValue::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = a.mul(&MatrixValue::identity(2));
        assert_eq!(a, b);
        let z = MatrixValue::from_complex(1, 2, alloc::vec![Scalar::new(1.0, 1.0), Scalar::new(0.0, -2.0)]).unwrap();
        let adj = z.adjoint();
        assert_eq!(adj.rows(), 2);
        assert_eq!(adj.get(0, 0), Scalar::new(1.0, -1.0));
        assert_eq!(adj.get(1, 0), Scalar::new(0.0, 2.0));
        let v = VectorValue::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(a.mul_vec(&v).to_real_vec().unwrap(), alloc::vec![3.0, 7.0]);
        assert_eq!(a.power(0), MatrixValue::identity(2));
        assert_eq!(a.power(2), a.mul(&a));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_second_slot() {
        let x = VectorValue::from_complex(alloc::vec![Scalar::new(0.0, 1.0)]).unwrap();
        let y = VectorValue::from_complex(alloc::vec![Scalar::new(0.0, 1.0)]).unwrap();
        assert_eq!(x.dot(&y), Scalar::new(1.0, 0.0));
        let one = VectorValue::from_real(&[1.0]).unwrap();
        assert_eq!(x.dot(&one), Scalar::new(0.0, 1.0));
    }

    #[test]
    fn embedding_places_block() {
        let v = VectorValue::from_real(&[2.0, 3.0]).unwrap();
        let e = v.embedded(5, 2);
        assert_eq!(e.to_real_vec().unwrap(), alloc::vec![0.0, 0.0, 2.0, 3.0, 0.0]);
    }
}
