//! Iterated systems `∪_s {A_s^j f_s : 0 ≤ j ≤ L_s}`: construction, canonical
//! duals, transport, diagonal reduction and dynamical sampling.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frames::{analyze, Frame};
use crate::numkernel::{inverse, svd, unitary_diagonalize, MatrixValue, Tolerance, VectorValue};
use crate::scalability::ScalingCertificate;

/// One `(operator, generator, L)` pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub operator: usize,
    pub generator: usize,
    pub iterations: usize,
}

impl Triple {
    pub fn new(operator: usize, generator: usize, iterations: usize) -> Self {
        Triple {
            operator,
            generator,
            iterations,
        }
    }
}

/// Position of one iterate `A_s^j f_s`: triple index and power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub triple: usize,
    pub power: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalSystemSpec {
    dim: usize,
    operators: Vec<MatrixValue>,
    generators: Vec<VectorValue>,
    triples: Vec<Triple>,
}

impl DynamicalSystemSpec {
    pub fn new(dim: usize, operators: Vec<MatrixValue>, generators: Vec<VectorValue>, triples: Vec<Triple>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive"));
        }
        if triples.is_empty() {
            return Err(Error::InvalidSpec("at least one triple is required"));
        }
        for a in &operators {
            if !a.is_square() {
                return Err(Error::ShapeMismatch("operators must be square"));
            }
            if a.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.rows(),
                });
            }
        }
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            if g.is_zero() {
                return Err(Error::ZeroVector);
            }
        }
        for t in &triples {
            if t.operator >= operators.len() {
                return Err(Error::IndexOutOfRange {
                    index: t.operator,
                    bound: operators.len(),
                });
            }
            if t.generator >= generators.len() {
                return Err(Error::IndexOutOfRange {
                    index: t.generator,
                    bound: generators.len(),
                });
            }
        }
        Ok(DynamicalSystemSpec {
            dim,
            operators,
            generators,
            triples,
        })
    }

    /// `{A^j f : 0 ≤ j ≤ L}`.
    pub fn single(a: MatrixValue, f: VectorValue, iterations: usize) -> Result<Self> {
        let n = f.dim();
        Self::new(n, alloc::vec![a], alloc::vec![f], alloc::vec![Triple::new(0, 0, iterations)])
    }

    /// One operator, several generators with their own counts.
    pub fn multi_generator(a: MatrixValue, generators: Vec<VectorValue>, iterations: &[usize]) -> Result<Self> {
        if generators.len() != iterations.len() {
            return Err(Error::ShapeMismatch("one iteration count per generator"));
        }
        let n = generators.first().map(|g| g.dim()).ok_or(Error::InvalidSpec("no generators"))?;
        let triples = iterations.iter().enumerate().map(|(s, &l)| Triple::new(0, s, l)).collect();
        Self::new(n, alloc::vec![a], generators, triples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[MatrixValue] {
        &self.operators
    }

    pub fn generators(&self) -> &[VectorValue] {
        &self.generators
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Index set of the iterated system in output order: triples in order,
    /// `j` ascending. When several triples share a generator, its `j = 0`
    /// vector (the generator itself) appears only at the first of them.
    pub fn lattice(&self) -> Vec<LatticePoint> {
        let mut seen = alloc::vec![false; self.generators.len()];
        let mut out = Vec::new();
        for (t, triple) in self.triples.iter().enumerate() {
            let start = if seen[triple.generator] { 1 } else { 0 };
            seen[triple.generator] = true;
            out.extend((start..=triple.iterations).map(|power| LatticePoint { triple: t, power }));
        }
        out
    }

    /// Iterates in lattice order; zero vectors are kept.
    pub fn iterate_vectors(&self) -> Vec<VectorValue> {
        let mut out = Vec::new();
        let lattice = self.lattice();
        for (t, triple) in self.triples.iter().enumerate() {
            let a = &self.operators[triple.operator];
            let mut v = self.generators[triple.generator].clone();
            for j in 0..=triple.iterations {
                if j > 0 {
                    v = a.mul_vec(&v);
                }
                if lattice.binary_search(&LatticePoint { triple: t, power: j }).is_ok() {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// The iterated system as a frame candidate (fails on a zero iterate).
pub fn iterate(spec: &DynamicalSystemSpec) -> Result<Frame> {
    Frame::new(spec.iterate_vectors())
}

/// Canonical dual of an iterated frame, itself a dynamical system:
/// `B_s = S⁻¹A_sS`, `g_s = S⁻¹f_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSystem {
    pub operators: Vec<MatrixValue>,
    pub generators: Vec<VectorValue>,
    pub source: DynamicalSystemSpec,
    pub frame_operator: MatrixValue,
}

impl DualSystem {
    /// The dual as a spec with the source's triples.
    pub fn to_spec(&self) -> Result<DynamicalSystemSpec> {
        DynamicalSystemSpec::new(
            self.source.dim,
            self.operators.clone(),
            self.generators.clone(),
            self.source.triples.clone(),
        )
    }

    /// Re-derives `S B_s = A_s S` and `S g_s = f_s` from the provenance.
    pub fn verify(&self, tol: Tolerance) -> bool {
        let s = &self.frame_operator;
        let scale = s.frobenius_norm().max(1.0);
        let ops = self.operators.iter().zip(&self.source.operators).all(|(b, a)| {
            s.mul(b).sub(&a.mul(s)).frobenius_norm() <= 10.0 * tol.eps() * scale * a.frobenius_norm().max(1.0)
        });
        let gens = self
            .generators
            .iter()
            .zip(&self.source.generators)
            .all(|(g, f)| s.mul_vec(g).distance(f) <= 10.0 * tol.eps() * scale * f.norm());
        ops && gens
    }
}

pub fn dynamical_dual(spec: &DynamicalSystemSpec, tol: Tolerance) -> Result<DualSystem> {
    let frame = iterate(spec).map_err(|_| Error::NotAFrame)?;
    if !analyze(&frame, tol)?.is_frame {
        return Err(Error::NotAFrame);
    }
    let s = frame.frame_operator();
    let s_inv = inverse(&s).map_err(|_| Error::NotAFrame)?;
    Ok(DualSystem {
        operators: spec.operators.iter().map(|a| s_inv.mul(a).mul(&s)).collect(),
        generators: spec.generators.iter().map(|f| s_inv.mul_vec(f)).collect(),
        source: spec.clone(),
        frame_operator: s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transported {
    /// Operators `B A_s B⁻¹`, generators `B f_s`.
    pub spec: DynamicalSystemSpec,
    /// Unitary transports also carry scalability and frame bounds over.
    pub unitary: bool,
}

pub fn transport(spec: &DynamicalSystemSpec, b: &MatrixValue, tol: Tolerance) -> Result<Transported> {
    if !b.is_square() || b.rows() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: b.rows(),
        });
    }
    let sv = svd(b)?.singular_values;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    if max == 0.0 || min <= tol.eps() * max {
        return Err(Error::SingularTransport);
    }
    let b_inv = inverse(b).map_err(|_| Error::SingularTransport)?;
    let transported = DynamicalSystemSpec {
        dim: spec.dim,
        operators: spec.operators.iter().map(|a| b.mul(a).mul(&b_inv)).collect(),
        generators: spec.generators.iter().map(|f| b.mul_vec(f)).collect(),
        triples: spec.triples.clone(),
    };
    Ok(Transported {
        spec: transported,
        unitary: b.is_unitary(tol.eps()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalReduction {
    pub unitary: MatrixValue,
    pub diagonal: MatrixValue,
    /// `D` with generators `v_s = U*f_s`; iterates are `U*` times the originals.
    pub spec: DynamicalSystemSpec,
}

/// `A = UDU*` applied to a single-operator spec.
pub fn diagonal_reduce(spec: &DynamicalSystemSpec, tol: Tolerance) -> Result<DiagonalReduction> {
    if spec.operators.len() != 1 {
        return Err(Error::InvalidSpec("diagonal reduction needs exactly one operator"));
    }
    let d = unitary_diagonalize(&spec.operators[0], tol)?;
    let u_adj = d.unitary.adjoint();
    let reduced = DynamicalSystemSpec {
        dim: spec.dim,
        operators: alloc::vec![d.diagonal.clone()],
        generators: spec.generators.iter().map(|f| u_adj.mul_vec(f)).collect(),
        triples: spec.triples.clone(),
    };
    Ok(DiagonalReduction {
        unitary: d.unitary,
        diagonal: d.diagonal,
        spec: reduced,
    })
}

/// Space-time samples `⟨f, A_s^j f_s⟩` indexed by the system's (triple, j) lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub entries: Vec<(LatticePoint, crate::Scalar)>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: LatticePoint) -> Option<crate::Scalar> {
        self.entries.iter().find(|(q, _)| *q == p).map(|(_, z)| *z)
    }

    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|(_, z)| z.norm_sqr()).sum()
    }

    /// Values reordered to `lattice`; `IndexMismatch` unless the index sets agree.
    fn aligned(&self, lattice: &[LatticePoint]) -> Result<Vec<crate::Scalar>> {
        if self.entries.len() != lattice.len() {
            return Err(Error::IndexMismatch);
        }
        let mut sorted: Vec<(LatticePoint, crate::Scalar)> = self.entries.clone();
        sorted.sort_by_key(|(p, _)| *p);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::IndexMismatch);
        }
        lattice
            .iter()
            .map(|p| {
                sorted
                    .binary_search_by_key(p, |(q, _)| *q)
                    .map(|i| sorted[i].1)
                    .map_err(|_| Error::IndexMismatch)
            })
            .collect()
    }
}

/// Samples `⟨f, A_s^j f_s⟩`, cross-checked against `⟨(A_s*)^j f, f_s⟩`.
pub fn take_samples(spec: &DynamicalSystemSpec, f: &VectorValue) -> Result<SampleSet> {
    if f.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: f.dim(),
        });
    }
    let lattice = spec.lattice();
    let vectors = spec.iterate_vectors();
    let mut entries = Vec::with_capacity(lattice.len());
    for (p, v) in lattice.iter().zip(&vectors) {
        let triple = spec.triples[p.triple];
        let a_adj = spec.operators[triple.operator].adjoint();
        let mut h = f.clone();
        for _ in 0..p.power {
            h = a_adj.mul_vec(&h);
        }
        let forward = f.dot(v);
        let backward = h.dot(&spec.generators[triple.generator]);
        let scale = f.norm() * v.norm() + h.norm() * spec.generators[triple.generator].norm();
        if (forward - backward).norm() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NumericalFailure("forward and adjoint samples disagree"));
        }
        entries.push((*p, forward));
    }
    Ok(SampleSet { entries })
}

/// Recovers `f` from its samples: through the dynamical dual, or, given a
/// Parseval scaling certificate, as `Σ w² ⟨f, A^j f_s⟩ A^j f_s`.
pub fn reconstruct(
    spec: &DynamicalSystemSpec,
    samples: &SampleSet,
    certificate: Option<&ScalingCertificate>,
    tol: Tolerance,
) -> Result<VectorValue> {
    let lattice = spec.lattice();
    let values = samples.aligned(&lattice)?;
    let n = spec.dim;
    let mut out = VectorValue::zeros(n);
    match certificate {
        Some(cert) => {
            if cert.squared_weights.len() != lattice.len() {
                return Err(Error::IndexMismatch);
            }
            let lambda = cert.tight_constant;
            for ((v, z), x) in spec.iterate_vectors().iter().zip(&values).zip(&cert.squared_weights) {
                out = out.add(&v.scale(*z * (*x / lambda)));
            }
        }
        None => {
            let dual = dynamical_dual(spec, tol)?;
            for (h, z) in dual.to_spec()?.iterate_vectors().iter().zip(&values) {
                out = out.add(&h.scale(*z));
            }
        }
    }
    Ok(out)
}
