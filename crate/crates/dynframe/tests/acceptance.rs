//! One PASS/FAIL line per acceptance criterion. Criteria listed in
//! `KNOWN_RED` are reported but do not fail the target.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use dynframe::random::{self, trial_rng};
use dynframe_core::constructions::{check_2scale, companion, harmonic, CompanionSpec, multigen_rotation, shift, PlaneBlock, TwoParamBlock};
use dynframe_core::dynamics::{dynamical_dual, iterate, transport, DynamicalSystemSpec};
use dynframe_core::frames::{analyze, Frame};
use dynframe_core::numkernel::inverse;
use dynframe_core::scalability::{
    build_diagonal_system, gramian_scaling_check, scaling_system, solve_scaling, tight_via_diagram, ScalingCertificate,
    ScalingOutcome,
};
use dynframe_core::{MatrixValue, Scalar, Tolerance, VectorValue};
use rand::Rng;

const KNOWN_RED: &[&str] = &["AC2"];
const SEED: u64 = 20_261_014;

fn tol() -> Tolerance {
    Tolerance::default()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

/// `‖Σ v v* − I‖_F` straight from the vectors.
fn parseval_residual(vectors: &[VectorValue]) -> f64 {
    let n = vectors[0].dim();
    let mut s = vec![Scalar::new(0.0, 0.0); n * n];
    for v in vectors {
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] += v.get(i) * v.get(j).conj();
            }
        }
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (s[i * n + j] - target).norm_sqr();
        }
    }
    acc.sqrt()
}

fn ac1() -> Verdict {
    let t = Instant::now();
    let spec = DynamicalSystemSpec::single(
        MatrixValue::real_diagonal(&[1.0, -1.0]),
        VectorValue::from_real(&[0.5, 0.5]).unwrap(),
        3,
    )
    .unwrap();
    let f = iterate(&spec).unwrap();
    let res = f.frame_operator().sub(&MatrixValue::identity(2)).frobenius_norm();
    // Hand iterates: (½,½), (½,−½), (½,½), (½,−½).
    let hand: Vec<VectorValue> = [[0.5, 0.5], [0.5, -0.5], [0.5, 0.5], [0.5, -0.5]]
        .iter()
        .map(|v| VectorValue::from_real(v).unwrap())
        .collect();
    let ok = res <= 1e-9 && parseval_residual(&hand) <= 1e-9 && f.vectors() == hand.as_slice();
    verdict(ok && within(t, Duration::from_secs(1)), format!("‖S−I‖ = {res:.2e}, {:?}", t.elapsed()))
}

fn ac2() -> Verdict {
    let t = Instant::now();
    let frame = |l| iterate(&DynamicalSystemSpec::single(shift(3).unwrap(), VectorValue::basis(3, 0), l).unwrap()).unwrap();
    let f3 = frame(3);
    let out3 = solve_scaling(&f3, false, tol()).unwrap();
    let h = FRAC_1_SQRT_2;
    let expected = ScalingCertificate::from_weights(&f3, &[h, 1.0, 1.0, h], tol()).unwrap();
    let l3 = out3.certificate().is_some_and(|c| c.residual <= 1e-9) && expected.residual <= 1e-9;
    let out2 = solve_scaling(&frame(2), false, tol()).unwrap();
    let l2 = out2.witness().is_some();
    verdict(
        l3 && l2 && within(t, Duration::from_secs(1)),
        format!(
            "L=3 certificate: {l3} (reference weights residual {:.2e}); L=2 witness: {l2} (F_e1^2 is the standard basis, which the solver certifies)",
            expected.residual
        ),
    )
}

fn ac3() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, k) in [(2, 3), (3, 4), (3, 7)] {
        let f = iterate(&harmonic(n, k).unwrap()).unwrap();
        worst = worst.max(parseval_residual(f.vectors()));
    }
    verdict(worst <= 1e-9, format!("max residual {worst:.2e}"))
}

fn ac4() -> Verdict {
    let t = Instant::now();
    let ratios = [-1.0, -0.5, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 2.0];
    let bases = [(1.0, 1.0, 1.0), (2.0, -0.5, 1.5), (0.3, 2.0, -1.0), (1.5, -1.0, -2.0)];
    let scales = [1.0, 0.5, 2.0, 3.0];
    let (mut points, mut agree, mut min_margin) = (0, 0, f64::INFINITY);
    for &(a0, b, d) in &bases {
        for &s in &scales {
            let a = a0 * s;
            for &r in &ratios {
                let c = -r * b * d / a;
                let f = Frame::from_real_columns(&[&[1.0, 0.0], &[a, b], &[c, d]]).unwrap();
                let out = solve_scaling(&f, true, tol()).unwrap();
                let expected = r > 0.0 && r < 1.0;
                points += 1;
                if out.is_scalable() == expected {
                    agree += 1;
                }
                if let Some(c) = out.certificate() {
                    min_margin = min_margin.min(c.margin);
                }
            }
        }
    }
    verdict(
        points >= 200 && agree == points && min_margin > 1e-9 && within(t, Duration::from_secs(30)),
        format!("{agree}/{points} agree, min strict margin {min_margin:.2e}, {:?}", t.elapsed()),
    )
}

fn ac5() -> Verdict {
    let mut rng = trial_rng(SEED, "ac5", 0);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    while draws < 50 {
        let (a, b, c, d) = (
            rng.gen_range(0.05..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let r = -a * c / (b * d);
        if !(r > 0.0 && r < 1.0) {
            continue;
        }
        draws += 1;
        let v = check_2scale(TwoParamBlock::new(a, b, c, d), tol()).unwrap();
        let Some([x, y, z]) = v.weights else {
            worst = f64::INFINITY;
            continue;
        };
        // Rows of F_w: (x, ya, zc) and (0, yb, zd).
        let (r0, r1) = ([x, y * a, z * c], [0.0, y * b, z * d]);
        let dot = |u: &[f64; 3], w: &[f64; 3]| u.iter().zip(w).map(|(p, q)| p * q).sum::<f64>();
        let res = ((dot(&r0, &r0) - 1.0).powi(2) + 2.0 * dot(&r0, &r1).powi(2) + (dot(&r1, &r1) - 1.0).powi(2)).sqrt();
        worst = worst.max(res);
    }
    verdict(worst <= 1e-9, format!("50 draws, max residual {worst:.2e}"))
}

fn ac6() -> Verdict {
    let (mut worst_rec, mut worst_dual, mut multi): (f64, f64, usize) = (0.0, 0.0, 0);
    for t in 0..100u64 {
        let mut rng = trial_rng(SEED, "ac6", t);
        let n = rng.gen_range(1..=4);
        let m = if t % 4 == 0 { rng.gen_range(2..=3) } else { 1 };
        let complex = rng.gen_bool(0.3);
        let spec = random::frame_spec(&mut rng, n, m, complex);
        if spec.operators().len() > 1 {
            multi += 1;
        }
        let primal = spec.iterate_vectors();
        let dual = dynamical_dual(&spec, tol()).unwrap();
        let dual_vectors = dual.to_spec().unwrap().iterate_vectors();
        // f = Σ ⟨f, A^j f_s⟩ B^j g_s with samples taken directly from the iterates.
        let f = random::vector(&mut rng, n, complex);
        let mut rec = VectorValue::zeros(n);
        for (v, h) in primal.iter().zip(&dual_vectors) {
            rec = rec.add(&h.scale(f.dot(v)));
        }
        worst_rec = worst_rec.max(rec.distance(&f) / f.norm());
        let s_inv = inverse(&iterate(&spec).unwrap().frame_operator()).unwrap();
        for (v, h) in primal.iter().zip(&dual_vectors) {
            let expected = s_inv.mul_vec(v);
            worst_dual = worst_dual.max(h.distance(&expected) / expected.norm().max(1.0));
        }
    }
    verdict(
        worst_rec <= 1e-8 && worst_dual <= 1e-8 && multi >= 20,
        format!("100 specs ({multi} multi-operator), rec err {worst_rec:.2e}, dual err {worst_dual:.2e}"),
    )
}

fn ac7() -> Verdict {
    let (mut tight_bad, mut scale_bad, mut tight_count, mut scalable_count) = (0, 0, 0, 0);
    for t in 0..500u64 {
        let mut rng = trial_rng(SEED, "ac7", t);
        let f = random::mixed_frame(&mut rng, 4, 10);
        let spectral = analyze(&f, tol()).unwrap().is_tight;
        tight_count += spectral as usize;
        if tight_via_diagram(&f, tol()).unwrap() != spectral {
            tight_bad += 1;
        }
        let solver = solve_scaling(&f, false, tol()).unwrap().is_scalable();
        scalable_count += solver as usize;
        if gramian_scaling_check(&f, tol()).unwrap().nonneg_null_found != solver {
            scale_bad += 1;
        }
    }
    verdict(
        tight_bad == 0 && scale_bad == 0,
        format!("500 frames ({tight_count} tight, {scalable_count} scalable): {tight_bad} tightness and {scale_bad} scalability disagreements"),
    )
}

fn ac8() -> Verdict {
    let (mut instances, mut bad, mut scalable, mut t) = (0, 0, 0, 0u64);
    while instances < 50 {
        let mut rng = trial_rng(SEED, "ac8", t);
        t += 1;
        // Rotation blocks and companions with a + b² < 0 make scalable
        // pieces likely; random blocks make non-scalable ones likely.
        let structured = rng.gen_bool(0.6);
        let (a1, v1) = if structured {
            let w: f64 = rng.gen_range(0.9..2.2);
            (MatrixValue::from_real_rows(&[&[w.cos(), -w.sin()], &[w.sin(), w.cos()]]).unwrap(), random::vector(&mut rng, 2, false))
        } else {
            (random::matrix(&mut rng, 2, false), random::vector(&mut rng, 2, false))
        };
        let (a2, v2, l2) = if rng.gen_bool(0.6) {
            let b: f64 = rng.gen_range(-1.5..1.5);
            let a = -(b * b) - rng.gen_range(0.2..2.0);
            (companion(&CompanionSpec { coefficients: vec![0.0, a, b] }).unwrap(), VectorValue::basis(3, 0), 4)
        } else {
            (random::matrix(&mut rng, 3, false), random::vector(&mut rng, 3, false), rng.gen_range(2..=5))
        };
        let l1 = rng.gen_range(1..=3);
        // Stacked operator and embedded generators, built by hand.
        let mut big = vec![0.0; 25];
        for i in 0..2 {
            for j in 0..2 {
                big[i * 5 + j] = a1.get(i, j).re;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                big[(i + 2) * 5 + j + 2] = a2.get(i, j).re;
            }
        }
        let a = MatrixValue::from_real(5, 5, &big).unwrap();
        let (e1, e2) = (v1.embedded(5, 0), v2.embedded(5, 2));
        let whole = DynamicalSystemSpec::multi_generator(a, vec![e1, e2], &[l1, l2]).unwrap();
        let (Ok(fw), Ok(f1), Ok(f2)) = (
            iterate(&whole),
            iterate(&DynamicalSystemSpec::single(a1, v1, l1).unwrap()),
            iterate(&DynamicalSystemSpec::single(a2, v2, l2).unwrap()),
        ) else {
            continue;
        };
        instances += 1;
        let stacked = solve_scaling(&fw, false, tol()).unwrap().is_scalable();
        let parts = solve_scaling(&f1, false, tol()).unwrap().is_scalable() && solve_scaling(&f2, false, tol()).unwrap().is_scalable();
        scalable += stacked as usize;
        if stacked != parts {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("50 instances ({scalable} scalable), {bad} disagreements"))
}

fn ac9() -> Verdict {
    let mut certified = 0;
    for t in 0..100u64 {
        let mut rng = trial_rng(SEED, "ac9", t);
        let d: Vec<Scalar> = (0..3).map(|_| Scalar::new(rng.gen_range(-2.0..2.0), 0.0)).collect();
        let v = random::vector(&mut rng, 3, false);
        let l = rng.gen_range(0..=12);
        let sys = build_diagonal_system(&d, &[v], &[l]).unwrap();
        match sys.solve(true, tol()).unwrap() {
            ScalingOutcome::NotScalable(w) if w.verify(&sys.system.matrix, &sys.system.rhs, tol()) => {}
            _ => certified += 1,
        }
    }
    let two = build_diagonal_system(
        &[Scalar::new(1.0, 0.0), Scalar::new(-1.0, 0.0)],
        &[VectorValue::from_real(&[0.5, 0.5]).unwrap()],
        &[3],
    )
    .unwrap()
    .solve(true, tol())
    .unwrap();
    let two_ok = two.certificate().is_some_and(|c| c.strict);
    verdict(
        certified == 0 && two_ok,
        format!("ℝ³: {} of 100 witnessed; ℝ² example certified: {two_ok}", 100 - certified),
    )
}

fn ac10() -> Verdict {
    let alpha = 2.0 * PI / 3.0;
    let spec = multigen_rotation(3, &[PlaneBlock::rotation(0, 1, alpha), PlaneBlock::rotation(0, 2, alpha)]).unwrap();
    let f = iterate(&spec).unwrap();
    match solve_scaling(&f, true, tol()).unwrap() {
        ScalingOutcome::Scalable(c) => {
            let res = scaling_system(&f).residual(&c.squared_weights);
            verdict(c.strict && res <= 1e-9 && f.len() == 5, format!("strict, residual {res:.2e}, margin {:.3}", c.margin))
        }
        ScalingOutcome::NotScalable(_) => verdict(false, "witness returned"),
    }
}

fn ac11() -> Verdict {
    let (mut worst, mut status_bad) = (0.0f64, 0);
    for t in 0..50u64 {
        let mut rng = trial_rng(SEED, "ac11", t);
        let spec = random::scalable_spec(&mut rng);
        let complex = rng.gen_bool(0.5);
        let u = random::unitary(&mut rng, spec.dim(), complex);
        let moved = transport(&spec, &u, tol()).unwrap().spec;
        let a = solve_scaling(&iterate(&spec).unwrap(), true, tol()).unwrap();
        let b = solve_scaling(&iterate(&moved).unwrap(), true, tol()).unwrap();
        match (a.certificate(), b.certificate()) {
            (Some(x), Some(y)) => worst = worst.max((x.margin - y.margin).abs()),
            (None, None) => {}
            _ => status_bad += 1,
        }
    }
    verdict(status_bad == 0 && worst <= 1e-8, format!("50 transports, {status_bad} status changes, max margin drift {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
        ("AC11", ac11),
    ];
    let mut unexpected = Vec::new();
    for (name, run) in criteria {
        let v = run();
        println!("{name} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass && !KNOWN_RED.contains(&name) {
            unexpected.push(name);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
