//! Seeded random instances for the verification suites.

use dynframe_core::constructions::{
    companion_extension, multigen_rotation, r3_structured, rotation_system, PlaneBlock, RotationPlacement, TwoParamBlock,
};
use dynframe_core::dynamics::{iterate, DynamicalSystemSpec, Triple};
use dynframe_core::frames::{analyze, Frame};
use dynframe_core::numkernel::hermitian_eig;
use dynframe_core::scalability::solve_scaling;
use dynframe_core::{FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Seed of trial `trial` of `suite`, independent of execution order.
pub fn derive_seed(root: u64, suite: &str, trial: u64) -> u64 {
    // FNV-1a over the suite name, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = root ^ h ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_rng(root: u64, suite: &str, trial: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, suite, trial))
}

fn field(complex: bool) -> FieldTag {
    if complex {
        FieldTag::Complex
    } else {
        FieldTag::Real
    }
}

fn entry(rng: &mut TrialRng, complex: bool) -> Scalar {
    let re = rng.gen_range(-1.0..1.0);
    let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
    Scalar::new(re, im)
}

/// Uniform entries in `[-1, 1]`, resampled until the norm is at least `0.1`.
pub fn vector(rng: &mut TrialRng, n: usize, complex: bool) -> VectorValue {
    loop {
        let v = VectorValue::new(field(complex), (0..n).map(|_| entry(rng, complex)).collect()).expect("finite");
        if v.norm() >= 0.1 {
            return v;
        }
    }
}

pub fn matrix(rng: &mut TrialRng, n: usize, complex: bool) -> MatrixValue {
    MatrixValue::new(n, n, field(complex), (0..n * n).map(|_| entry(rng, complex)).collect()).expect("finite")
}

/// Gram–Schmidt on random columns.
pub fn unitary(rng: &mut TrialRng, n: usize, complex: bool) -> MatrixValue {
    'retry: loop {
        let mut cols: Vec<VectorValue> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = vector(rng, n, complex);
            for q in &cols {
                v = v.sub(&q.scale(v.dot(q)));
            }
            let norm = v.norm();
            if norm < 1e-3 {
                continue 'retry;
            }
            cols.push(v.scale(Scalar::new(1.0 / norm, 0.0)));
        }
        return MatrixValue::from_columns(&cols).expect("square");
    }
}

pub fn frame(rng: &mut TrialRng, n: usize, k: usize, complex: bool) -> Frame {
    Frame::new((0..k).map(|_| vector(rng, n, complex)).collect()).expect("nonzero vectors")
}

/// `S^{-1/2} F` for a random frame `F`: Parseval.
pub fn parseval_frame(rng: &mut TrialRng, n: usize, k: usize, complex: bool) -> Frame {
    let tol = Tolerance::default();
    loop {
        let f = frame(rng, n, k, complex);
        let r = analyze(&f, tol).expect("analysis");
        if !(r.lower_bound > 1e-3 * r.upper_bound) {
            continue;
        }
        let e = hermitian_eig(&f.frame_operator(), tol).expect("eigendecomposition");
        let inv_sqrt: Vec<f64> = e.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect();
        let root = e
            .eigenvectors
            .mul(&MatrixValue::real_diagonal(&inv_sqrt))
            .mul(&e.eigenvectors.adjoint());
        if let Ok(p) = f.mapped(&root) {
            return p;
        }
    }
}

/// A Parseval frame with each vector divided by a weight in `[0.3, 3]`: strictly scalable.
pub fn scalable_frame(rng: &mut TrialRng, n: usize, k: usize, complex: bool) -> Frame {
    let p = parseval_frame(rng, n, k, complex);
    Frame::new(
        p.vectors()
            .iter()
            .map(|v| v.scale(Scalar::new(1.0 / rng.gen_range(0.3..3.0), 0.0)))
            .collect(),
    )
    .expect("nonzero vectors")
}

/// Random frames of dimension `≤ max_n` and size `≤ max_k`, one third each
/// generic, tight, and scaled-tight.
pub fn mixed_frame(rng: &mut TrialRng, max_n: usize, max_k: usize) -> Frame {
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(n..=max_k.max(n));
    let complex = rng.gen_bool(0.5);
    match rng.gen_range(0..3) {
        0 => frame(rng, n, k, complex),
        1 => {
            let c = rng.gen_range(0.5..2.0);
            let p = parseval_frame(rng, n, k, complex);
            Frame::new(p.vectors().iter().map(|v| v.scale(Scalar::new(c, 0.0))).collect()).expect("nonzero")
        }
        _ => scalable_frame(rng, n, k, complex),
    }
}

/// Random spec whose iterates form a frame with `λmin > 1e-4·λmax`; with
/// `operators > 1` every operator gets its own generator and `L = n`.
pub fn frame_spec(rng: &mut TrialRng, n: usize, operators: usize, complex: bool) -> DynamicalSystemSpec {
    let tol = Tolerance::default();
    loop {
        let ops: Vec<MatrixValue> = (0..operators).map(|_| matrix(rng, n, complex)).collect();
        let mut gens: Vec<VectorValue> = (0..operators).map(|_| vector(rng, n, complex)).collect();
        let mut triples: Vec<Triple> = (0..operators).map(|s| Triple::new(s, s, n)).collect();
        if rng.gen_bool(0.5) {
            gens.push(vector(rng, n, complex));
            triples.push(Triple::new(rng.gen_range(0..operators), operators, rng.gen_range(0..=2)));
        }
        let spec = DynamicalSystemSpec::new(n, ops, gens, triples).expect("consistent spec");
        let Ok(f) = iterate(&spec) else { continue };
        let r = analyze(&f, tol).expect("analysis");
        if r.is_frame && r.lower_bound > 1e-4 * r.upper_bound {
            return spec;
        }
    }
}

/// A strictly scalable system from one of the structured families.
pub fn scalable_spec(rng: &mut TrialRng) -> DynamicalSystemSpec {
    let tol = Tolerance::default();
    loop {
        let spec = match rng.gen_range(0..4) {
            0 => {
                // ω with a strictly scalable Mercedes-type orbit: |cos ω| < 1/√2.
                let omega = rng.gen_range(0.9..2.2);
                rotation_system(omega, rng.gen_range(2..=4), RotationPlacement::Shift).ok()
            }
            1 => {
                let b = rng.gen_range(-1.5..1.5);
                let a = -(b * b) - rng.gen_range(0.2..2.0);
                companion_extension(rng.gen_range(2..=4), a, b, tol).ok().map(|s| s.spec)
            }
            2 => {
                let p = TwoParamBlock::new(
                    rng.gen_range(0.2..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                );
                r3_structured(p, tol).ok().map(|s| s.spec)
            }
            _ => {
                let alpha = rng.gen_range(1.8..2.4);
                multigen_rotation(3, &[PlaneBlock::rotation(0, 1, alpha), PlaneBlock::rotation(0, 2, alpha)]).ok()
            }
        };
        // The rotation families are only claimed for part of the parameter
        // range, so every draw is confirmed by the solver.
        let Some(spec) = spec else { continue };
        let strict = iterate(&spec)
            .ok()
            .and_then(|f| solve_scaling(&f, true, tol).ok())
            .is_some_and(|o| o.certificate().is_some_and(|c| c.strict));
        if strict {
            return spec;
        }
    }
}
