//! Generator families with known (strict) scalability: companion operators,
//! block-diagonal stacks, 2×2 parameter blocks, rotations, harmonic frames,
//! and several operators acting on coordinate planes.
//!
//! Indices are 0-based throughout; the 2×2 block `(a, b, c, d)` is the
//! operator `[[a, c], [b, d]]`, so `F_{e1}` starts `e1, (a, b)`.

use alloc::vec::Vec;

use crate::dynamics::{iterate, DynamicalSystemSpec, Triple};
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::numkernel::{fmath, FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};
use crate::scalability::{solve_scaling, ScalingCertificate, ScalingOutcome};

/// Coefficients of `[[0 | a_1], [I_{n−1} | a_2..a_n]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSpec {
    pub coefficients: Vec<f64>,
}

pub fn companion(spec: &CompanionSpec) -> Result<MatrixValue> {
    let a = &spec.coefficients;
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidSpec("companion operator needs n >= 2"));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if a.iter().all(|&x| x == 0.0) {
        return Err(Error::AllZeroCoefficients);
    }
    let mut data = alloc::vec![0.0; n * n];
    for i in 1..n {
        data[i * n + (i - 1)] = 1.0;
    }
    for (i, &x) in a.iter().enumerate() {
        data[i * n + (n - 1)] = x;
    }
    MatrixValue::from_real(n, n, &data)
}

/// The cyclic shift `e_i ↦ e_{i+1}` (companion with `a = e_1`).
pub fn shift(n: usize) -> Result<MatrixValue> {
    let mut a = alloc::vec![0.0; n];
    if let Some(first) = a.first_mut() {
        *first = 1.0;
    }
    companion(&CompanionSpec { coefficients: a })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagSpec {
    blocks: Vec<MatrixValue>,
}

impl BlockDiagSpec {
    pub fn new(blocks: Vec<MatrixValue>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidSpec("block-diagonal operator needs a block"));
        }
        if blocks.iter().any(|b| !b.is_square()) {
            return Err(Error::ShapeMismatch("blocks must be square"));
        }
        Ok(BlockDiagSpec { blocks })
    }

    pub fn blocks(&self) -> &[MatrixValue] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.rows()).sum()
    }

    pub fn offset(&self, s: usize) -> usize {
        self.blocks[..s].iter().map(|b| b.rows()).sum()
    }

    pub fn matrix(&self) -> MatrixValue {
        let n = self.dim();
        let mut m = MatrixValue::zeros(n, n);
        for (s, b) in self.blocks.iter().enumerate() {
            let off = self.offset(s);
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m.set(off + i, off + j, b.get(i, j));
                }
            }
        }
        m
    }

    /// `v` placed in the coordinates of block `s`, zeros elsewhere.
    pub fn embed(&self, v: &VectorValue, s: usize) -> Result<VectorValue> {
        let block = self.blocks.get(s).ok_or(Error::IndexOutOfRange {
            index: s,
            bound: self.blocks.len(),
        })?;
        if v.dim() != block.rows() {
            return Err(Error::DimensionMismatch {
                expected: block.rows(),
                found: v.dim(),
            });
        }
        Ok(v.embedded(self.dim(), self.offset(s)))
    }

    /// Stacked system `{A^j embed(v, s)}` for `(block, v, L)` generators.
    pub fn system(&self, generators: &[(usize, VectorValue, usize)]) -> Result<DynamicalSystemSpec> {
        let gens = generators
            .iter()
            .map(|(s, v, _)| self.embed(v, *s))
            .collect::<Result<Vec<_>>>()?;
        let iterations: Vec<usize> = generators.iter().map(|g| g.2).collect();
        DynamicalSystemSpec::multi_generator(self.matrix(), gens, &iterations)
    }

    /// The per-block system `{A_s^j v}` for the generators living in block `s`.
    pub fn block_system(&self, s: usize, generators: &[(usize, VectorValue, usize)]) -> Result<DynamicalSystemSpec> {
        let block = self.blocks.get(s).ok_or(Error::IndexOutOfRange {
            index: s,
            bound: self.blocks.len(),
        })?;
        let (gens, iterations): (Vec<VectorValue>, Vec<usize>) = generators
            .iter()
            .filter(|g| g.0 == s)
            .map(|g| (g.1.clone(), g.2))
            .unzip();
        if gens.is_empty() {
            return Err(Error::InvalidSpec("block has no generator"));
        }
        DynamicalSystemSpec::multi_generator(block.clone(), gens, &iterations)
    }
}

/// Real parameters of the 2×2 operator `[[a, c], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParamBlock {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TwoParamBlock {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        TwoParamBlock { a, b, c, d }
    }

    pub fn matrix(&self) -> MatrixValue {
        real_matrix(2, |i, j| [[self.a, self.c], [self.b, self.d]][i][j])
    }

    /// Columns `(1, 0), (a, b), (c, d)`.
    pub fn three_vector_frame(&self) -> Result<Frame> {
        Frame::from_real_columns(&[&[1.0, 0.0], &[self.a, self.b], &[self.c, self.d]])
    }

    /// Columns `e1, e2, (a, b), (c, d)`.
    pub fn four_vector_frame(&self) -> Result<Frame> {
        Frame::from_real_columns(&[&[1.0, 0.0], &[0.0, 1.0], &[self.a, self.b], &[self.c, self.d]])
    }

    /// `−ac/(bd)`.
    pub fn ratio(&self) -> f64 {
        -(self.a * self.c) / (self.b * self.d)
    }

    /// Columns of `F_{e1}^2` for the operator: `(a, b, a²+bc, ab+bd)`.
    pub fn orbit_block(&self) -> TwoParamBlock {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        TwoParamBlock::new(a, b, a * a + b * c, b * (a + d))
    }

    /// `a > 0` and `0 < −a(a²+bc)/(b²(a+d)) < 1`.
    pub fn orbit_criterion(&self) -> bool {
        let r = self.orbit_block().ratio();
        self.a > 0.0 && r.is_finite() && r > 0.0 && r < 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoScaleVerdict {
    /// Strictly scalable.
    pub scalable: bool,
    /// `(x, y, z)` making `[[x, ya, zc], [0, yb, zd]]` Parseval.
    pub weights: Option<[f64; 3]>,
    /// `a > 0` and `abcd ≠ 0`: decided by the closed form, otherwise by the solver.
    pub closed_form: bool,
    pub certificate: Option<ScalingCertificate>,
}

/// Strict scalability of `{(1,0), (a,b), (c,d)}`: `0 < −ac/(bd) < 1` when
/// `a > 0, abcd ≠ 0`, with explicit weights.
pub fn check_2scale(p: TwoParamBlock, tol: Tolerance) -> Result<TwoScaleVerdict> {
    let frame = p.three_vector_frame()?;
    let (a, b, c, d) = (p.a, p.b, p.c, p.d);
    if !(a > 0.0 && a * b * c * d != 0.0) {
        let out = solve_scaling(&frame, true, tol)?;
        let certificate = out.certificate().cloned();
        return Ok(TwoScaleVerdict {
            scalable: out.is_scalable(),
            weights: certificate.as_ref().map(|c| [c.weights[0], c.weights[1], c.weights[2]]),
            closed_form: false,
            certificate,
        });
    }
    let r = p.ratio();
    if !(r > 0.0 && r < 1.0) {
        return Ok(TwoScaleVerdict {
            scalable: false,
            weights: None,
            closed_form: true,
            certificate: None,
        });
    }
    let det = a * d - b * c;
    let w = [
        fmath::sqrt(a * c / (b * d) + 1.0),
        fmath::sqrt(c / (-b * det)),
        fmath::sqrt(a / (d * det)),
    ];
    let certificate = ScalingCertificate::from_weights(&frame, &w, tol)?;
    Ok(TwoScaleVerdict {
        scalable: true,
        weights: Some(w),
        closed_form: true,
        certificate: Some(certificate),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `(a, b, c, d)` whose operator makes `F_{e1}^2` tight.
pub fn tight_2x3(a: f64, d: f64, sign: Sign) -> Result<TwoParamBlock> {
    let t = a + d;
    if t == 0.0 || !t.is_finite() {
        return Err(Error::DegenerateTrace);
    }
    let num = a * a * t * t + t * t + a * a;
    let den = 1.0 + t * t;
    let s = sign.value();
    let b = s / t * fmath::sqrt(num / den);
    let c = -s * a * (a * d + a * a + 1.0) * fmath::sqrt(den / num);
    Ok(TwoParamBlock::new(a, b, c, d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoByFour {
    /// `abcd < 0`.
    pub criterion: bool,
    /// Strict solve of `{e1, e2, (a,b), (c,d)}`.
    pub outcome: ScalingOutcome,
}

pub fn check_2x4(p: TwoParamBlock, tol: Tolerance) -> Result<TwoByFour> {
    Ok(TwoByFour {
        criterion: p.a * p.b * p.c * p.d < 0.0,
        outcome: solve_scaling(&p.four_vector_frame()?, true, tol)?,
    })
}

/// Where the rotation block `[[cos ω, −sin ω], [sin ω, cos ω]]` sits.
#[derive(Debug, Clone, PartialEq)]
pub enum RotationPlacement {
    /// Shift on the leading coordinates feeding the block; generator `e_1`, `L = n`.
    Shift,
    /// `diag(signs) ⊕ rotation`; generators `e_{n−1}` with `L = 2`, then each
    /// leading `e_l` with `L = 1`. Needs `n − 2` signs.
    Schur { signs: Vec<f64> },
}

fn real_matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> MatrixValue {
    let data: Vec<f64> = (0..n * n).map(|ij| f(ij / n, ij % n)).collect();
    MatrixValue::from_real(n, n, &data).expect("finite operator")
}

/// Subdiagonal shift into a trailing 2×2 block `[[a, c], [b, d]]`.
pub fn shift_into_block(n: usize, p: TwoParamBlock) -> Result<MatrixValue> {
    if n < 2 {
        return Err(Error::InvalidSpec("n must be at least 2"));
    }
    let k = n - 2;
    Ok(real_matrix(n, |i, j| {
        if i >= k && j >= k {
            [[p.a, p.c], [p.b, p.d]][i - k][j - k]
        } else if j + 1 == i && j < k {
            1.0
        } else {
            0.0
        }
    }))
}

pub fn rotation_system(omega: f64, n: usize, placement: RotationPlacement) -> Result<DynamicalSystemSpec> {
    if n < 2 {
        return Err(Error::InvalidSpec("n must be at least 2"));
    }
    let (c, s) = (fmath::cos(omega), fmath::sin(omega));
    let rot = TwoParamBlock::new(c, s, -s, c);
    match placement {
        RotationPlacement::Shift => DynamicalSystemSpec::single(shift_into_block(n, rot)?, VectorValue::basis(n, 0), n),
        RotationPlacement::Schur { signs } => {
            if signs.len() != n - 2 {
                return Err(Error::DimensionMismatch {
                    expected: n - 2,
                    found: signs.len(),
                });
            }
            if signs.iter().any(|&x| x != 1.0 && x != -1.0) {
                return Err(Error::InvalidSpec("Schur signs must be +1 or -1"));
            }
            let k = n - 2;
            let a = real_matrix(n, |i, j| {
                if i >= k && j >= k {
                    [[c, -s], [s, c]][i - k][j - k]
                } else if i == j {
                    signs[i]
                } else {
                    0.0
                }
            });
            let mut generators = alloc::vec![VectorValue::basis(n, n - 2)];
            let mut iterations = alloc::vec![2];
            for l in 0..k {
                generators.push(VectorValue::basis(n, l));
                iterations.push(1);
            }
            DynamicalSystemSpec::multi_generator(a, generators, &iterations)
        }
    }
}

/// `A = diag(1, γ, …, γ^{n−1})`, `γ = e^{2πi/k}`, `v = (1, …, 1)/√k`, `L = k − 1`.
pub fn harmonic(n: usize, k: usize) -> Result<DynamicalSystemSpec> {
    if n == 0 {
        return Err(Error::InvalidSpec("n must be positive"));
    }
    if k < n {
        return Err(Error::KTooSmall);
    }
    let theta = 2.0 * core::f64::consts::PI / k as f64;
    let diag: Vec<Scalar> = (0..n)
        .map(|i| {
            let t = theta * i as f64;
            Scalar::new(fmath::cos(t), fmath::sin(t))
        })
        .collect();
    let v = VectorValue::new(FieldTag::Complex, alloc::vec![Scalar::new(1.0 / fmath::sqrt(k as f64), 0.0); n])?;
    DynamicalSystemSpec::single(MatrixValue::diagonal(&diag), v, k - 1)
}

/// Operator supported on rows `{p, k}` and columns `{q, l}` with entries
/// `A[p][q] = a`, `A[p][l] = b`, `A[k][q] = c`, `A[k][l] = d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneBlock {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub l: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PlaneBlock {
    /// Rotation by `alpha` in the coordinate plane `(p, k)`.
    pub fn rotation(p: usize, k: usize, alpha: f64) -> Self {
        let (c, s) = (fmath::cos(alpha), fmath::sin(alpha));
        PlaneBlock {
            p,
            q: p,
            k,
            l: k,
            a: c,
            b: -s,
            c: s,
            d: c,
        }
    }

    pub fn matrix(&self, n: usize) -> Result<MatrixValue> {
        for &idx in &[self.p, self.q, self.k, self.l] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, bound: n });
            }
        }
        if self.p >= self.k {
            return Err(Error::IndexOutOfRange { index: self.p, bound: self.k });
        }
        if self.q >= self.l {
            return Err(Error::IndexOutOfRange { index: self.q, bound: self.l });
        }
        Ok(real_matrix(n, |i, j| match (i, j) {
            (i, j) if i == self.p && j == self.q => self.a,
            (i, j) if i == self.p && j == self.l => self.b,
            (i, j) if i == self.k && j == self.q => self.c,
            (i, j) if i == self.k && j == self.l => self.d,
            _ => 0.0,
        }))
    }
}

/// `{e1} ∪ ⋃_m {A_m e1, A_m² e1}`.
pub fn multigen_rotation(n: usize, planes: &[PlaneBlock]) -> Result<DynamicalSystemSpec> {
    if n == 0 || planes.is_empty() {
        return Err(Error::InvalidSpec("need a dimension and at least one plane"));
    }
    let operators = planes.iter().map(|pl| pl.matrix(n)).collect::<Result<Vec<_>>>()?;
    let triples = (0..planes.len()).map(|m| Triple::new(m, 0, 2)).collect();
    DynamicalSystemSpec::new(n, operators, alloc::vec![VectorValue::basis(n, 0)], triples)
}

/// A structured system together with the certificate its construction implies.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredSystem {
    pub spec: DynamicalSystemSpec,
    pub certificate: ScalingCertificate,
}

fn check_orbit_shape(spec: &DynamicalSystemSpec, expected: &[Vec<f64>], tol: Tolerance) -> Result<Frame> {
    let frame = iterate(spec)?;
    let want = Frame::from_real_columns(&expected.iter().map(|v| v.as_slice()).collect::<Vec<_>>())?;
    let scale = want.vectors().iter().map(|v| v.norm()).fold(1.0, f64::max);
    if !frame.approx_eq(&want, 10.0 * tol.eps() * scale) {
        return Err(Error::NumericalFailure("iterates do not match the block form"));
    }
    Ok(frame)
}

/// Iterates `e1..e_m` in the leading coordinates followed by a 2-D block
/// frame in the last two, with the block weights stacked onto unit weights.
fn stacked(spec: DynamicalSystemSpec, leading: usize, block: &[[f64; 2]], block_weights: &[f64], tol: Tolerance) -> Result<StructuredSystem> {
    let n = spec.dim();
    let mut expected = Vec::new();
    for i in 0..leading {
        let mut e = alloc::vec![0.0; n];
        e[i] = 1.0;
        expected.push(e);
    }
    for v in block {
        let mut e = alloc::vec![0.0; n];
        e[n - 2] = v[0];
        e[n - 1] = v[1];
        expected.push(e);
    }
    let frame = check_orbit_shape(&spec, &expected, tol)?;
    let mut w = alloc::vec![1.0; leading];
    w.extend_from_slice(block_weights);
    let certificate = ScalingCertificate::from_weights(&frame, &w, tol)?;
    Ok(StructuredSystem { spec, certificate })
}

/// `A = [[0,0,0],[1,a,c],[0,b,d]]` with `F_{e1}^3 = {e1} ⊕ {(1,0), (a,b), (a²+bc, ab+bd)}`.
pub fn r3_structured(p: TwoParamBlock, tol: Tolerance) -> Result<StructuredSystem> {
    if !p.orbit_criterion() {
        return Err(Error::CriterionFailed);
    }
    let block = p.orbit_block();
    let verdict = check_2scale(block, tol)?;
    let w = verdict.weights.filter(|_| verdict.scalable).ok_or(Error::CriterionFailed)?;
    let a = real_matrix(3, |i, j| match (i, j) {
        (1, 0) => 1.0,
        (1, 1) => p.a,
        (1, 2) => p.c,
        (2, 1) => p.b,
        (2, 2) => p.d,
        _ => 0.0,
    });
    let spec = DynamicalSystemSpec::single(a, VectorValue::basis(3, 0), 3)?;
    stacked(spec, 1, &[[1.0, 0.0], [block.a, block.b], [block.c, block.d]], &w, tol)
}

/// Shift into a trailing `[[a, c], [b, d]]` block generating `F_{e1}^n`; the
/// orbit criterion on the block gives strictness.
pub fn shifted_block(n: usize, p: TwoParamBlock, tol: Tolerance) -> Result<StructuredSystem> {
    if !p.orbit_criterion() {
        return Err(Error::CriterionFailed);
    }
    let block = p.orbit_block();
    let verdict = check_2scale(block, tol)?;
    let w = verdict.weights.filter(|_| verdict.scalable).ok_or(Error::CriterionFailed)?;
    let spec = DynamicalSystemSpec::single(shift_into_block(n, p)?, VectorValue::basis(n, 0), n)?;
    stacked(spec, n - 2, &[[1.0, 0.0], [block.a, block.b], [block.c, block.d]], &w, tol)
}

/// Companion with coefficients `(0, …, 0, a, b)` generating `F_{e1}^{n+1}`;
/// strict exactly when `a + b² < 0` and `ab ≠ 0`, through the 2×4 block
/// `{e1, e2, (a, b), (ab, a+b²)}` whose `abcd = a²b²(a+b²)`.
pub fn companion_extension(n: usize, a: f64, b: f64, tol: Tolerance) -> Result<StructuredSystem> {
    if n < 2 {
        return Err(Error::InvalidSpec("n must be at least 2"));
    }
    if !(a + b * b < 0.0 && a * b != 0.0) {
        return Err(Error::CriterionFailed);
    }
    let mut coefficients = alloc::vec![0.0; n];
    coefficients[n - 2] = a;
    coefficients[n - 1] = b;
    let m = companion(&CompanionSpec { coefficients })?;
    let spec = DynamicalSystemSpec::single(m, VectorValue::basis(n, 0), n + 1)?;
    let block = TwoParamBlock::new(a, b, a * b, a + b * b);
    let check = check_2x4(block, tol)?;
    let cert = match (&check.criterion, &check.outcome) {
        (true, ScalingOutcome::Scalable(c)) if c.strict => c.clone(),
        _ => return Err(Error::NumericalFailure("2x4 block did not certify")),
    };
    stacked(
        spec,
        n - 2,
        &[[1.0, 0.0], [0.0, 1.0], [block.a, block.b], [block.c, block.d]],
        &cert.weights,
        tol,
    )
}
