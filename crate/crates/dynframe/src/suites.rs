//! Property suites behind `dynframe verify`.

use dynframe_core::constructions::{
    check_2scale, companion, companion_extension, CompanionSpec, multigen_rotation, r3_structured, rotation_system, BlockDiagSpec, PlaneBlock,
    RotationPlacement, TwoParamBlock,
};
use dynframe_core::dynamics::{dynamical_dual, iterate, reconstruct, take_samples, transport};
use dynframe_core::frames::{analyze, canonical_dual, verify_duality, Frame};
use dynframe_core::numkernel::{inverse, unitary_diagonalize};
use dynframe_core::scalability::{
    build_diagonal_system, gramian_scaling_check, normal_scalability, scaling_system, solve_scaling, tight_via_diagram,
    ScalingOutcome,
};
use dynframe_core::{MatrixValue, Scalar, Tolerance, VectorValue};
use rand::Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::random::{self, trial_rng, TrialRng};

pub type TrialFn = fn(&mut TrialRng, Tolerance) -> Result<(), String>;

#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub trial: TrialFn,
}

#[derive(Clone)]
pub struct Registry {
    suites: Vec<Suite>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { suites: Vec::new() }
    }

    pub fn with(mut self, name: &'static str, trial: TrialFn) -> Self {
        self.suites.push(Suite { name, trial });
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name).collect()
    }

    fn select(&self, name: &str) -> CliResult<Vec<Suite>> {
        if name == "all" {
            return Ok(self.suites.clone());
        }
        self.suites
            .iter()
            .find(|s| s.name == name)
            .map(|s| vec![*s])
            .ok_or_else(|| CliError::Input(format!("unknown suite {name:?}; known: all, {}", self.names().join(", "))))
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::empty()
            .with("frame-bounds", frame_bounds)
            .with("double-dual", double_dual)
            .with("dual-identity", dual_identity)
            .with("transport-naturality", transport_naturality)
            .with("transport-invariance", transport_invariance)
            .with("oracle-equivalence", oracle_equivalence)
            .with("certificate-soundness", certificate_soundness)
            .with("diagonal-equivalence", diagonal_equivalence)
            .with("one-vector-obstruction", one_vector_obstruction)
            .with("block-theorem", block_theorem)
            .with("2scale-boundary", two_scale_boundary)
            .with("2scale-closed-form", two_scale_closed_form)
            .with("construction-certificates", construction_certificates)
            .with("normal-diagonalization", normal_diagonalization)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub passed: usize,
    /// `(trial, message)` for each failed trial.
    pub failures: Vec<(usize, String)>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `trials` trials of the selected suites; trial `t` of suite `s` sees
/// an RNG seeded from `(seed, s, t)` only.
pub fn run(registry: &Registry, name: &str, trials: usize, seed: u64, tol: Tolerance) -> CliResult<Vec<SuiteReport>> {
    let mut out = Vec::new();
    for suite in registry.select(name)? {
        let mut failures = Vec::new();
        for t in 0..trials {
            let mut rng = trial_rng(seed, suite.name, t as u64);
            if let Err(msg) = (suite.trial)(&mut rng, tol) {
                failures.push((t, msg));
            }
        }
        out.push(SuiteReport {
            suite: suite.name.to_string(),
            trials,
            passed: trials - failures.len(),
            failures,
        });
    }
    Ok(out)
}

pub fn render_table(reports: &[SuiteReport]) -> String {
    let width = reports.iter().map(|r| r.suite.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:>6}  {:>6}  status\n", "suite", "trials", "passed");
    for r in reports {
        let status = if r.ok() { "PASS" } else { "FAIL" };
        s.push_str(&format!("{:<width$}  {:>6}  {:>6}  {status}\n", r.suite, r.trials, r.passed));
        for (t, msg) in r.failures.iter().take(3) {
            s.push_str(&format!("    trial {t}: {msg}\n"));
        }
    }
    s
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail(e: dynframe_core::Error) -> String {
    e.to_string()
}

fn max_norm(f: &Frame) -> f64 {
    f.vectors().iter().map(|v| v.norm()).fold(1.0, f64::max)
}

fn frame_bounds(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let f = random::mixed_frame(rng, 4, 10);
    let r = analyze(&f, tol).map_err(fail)?;
    let x = random::vector(rng, f.dim(), f.field() == dynframe_core::FieldTag::Complex);
    let energy: f64 = f.vectors().iter().map(|v| x.dot(v).norm_sqr()).sum();
    let slack = 1e-10 * r.upper_bound * x.norm_sqr();
    check(
        energy >= r.lower_bound * x.norm_sqr() - slack && energy <= r.upper_bound * x.norm_sqr() + slack,
        || format!("energy {energy} outside [{}, {}]·‖x‖²", r.lower_bound, r.upper_bound),
    )
}

fn double_dual(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(n..=8);
    let complex = rng.gen_bool(0.5);
    let f = random::frame(rng, n, k, complex);
    let r = analyze(&f, tol).map_err(fail)?;
    if !(r.is_frame && r.lower_bound > 1e-4 * r.upper_bound) {
        return Ok(());
    }
    let g = canonical_dual(&f, tol).map_err(fail)?;
    check(verify_duality(&f, &g, Tolerance::new(1e-7).unwrap()).map_err(fail)?, || "FG* ≠ I".into())?;
    let back = canonical_dual(&g, tol).map_err(fail)?;
    check(back.approx_eq(&f, 1e-7 * max_norm(&f)), || "dual of the dual differs".into())
}

fn random_frame_spec(rng: &mut TrialRng) -> dynframe_core::dynamics::DynamicalSystemSpec {
    let n = rng.gen_range(1..=4);
    let m = if rng.gen_bool(0.3) { rng.gen_range(2..=3) } else { 1 };
    let complex = rng.gen_bool(0.3);
    random::frame_spec(rng, n, m, complex)
}

fn dual_identity(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let spec = random_frame_spec(rng);
    let complex = spec.operators().iter().any(|a| a.field() == dynframe_core::FieldTag::Complex);
    let x = random::vector(rng, spec.dim(), complex);
    let samples = take_samples(&spec, &x).map_err(fail)?;
    let y = reconstruct(&spec, &samples, None, tol).map_err(fail)?;
    check(y.distance(&x) <= 1e-8 * x.norm(), || format!("reconstruction error {}", y.distance(&x)))?;
    let dual = dynamical_dual(&spec, tol).map_err(fail)?;
    let primal = iterate(&spec).map_err(fail)?;
    let s_inv = inverse(&primal.frame_operator()).map_err(fail)?;
    let expected = primal.mapped(&s_inv).map_err(fail)?;
    let got = iterate(&dual.to_spec().map_err(fail)?).map_err(fail)?;
    check(got.approx_eq(&expected, 1e-8 * max_norm(&expected)), || "dual iterates ≠ S⁻¹·primal".into())
}

fn transport_naturality(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let spec = random_frame_spec(rng);
    let n = spec.dim();
    let b = MatrixValue::identity(n).add(&random::matrix(rng, n, false).scale(Scalar::new(0.3, 0.0)));
    let Ok(t) = transport(&spec, &b, tol) else { return Ok(()) };
    let moved = iterate(&spec).map_err(fail)?.mapped(&b).map_err(fail)?;
    let got = iterate(&t.spec).map_err(fail)?;
    check(got.approx_eq(&moved, 1e-9 * max_norm(&moved)), || "iterates of BAB⁻¹ on Bf ≠ B·iterates".into())
}

fn transport_invariance(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let spec = random::scalable_spec(rng);
    let complex = rng.gen_bool(0.5);
    let u = random::unitary(rng, spec.dim(), complex);
    let t = transport(&spec, &u, tol).map_err(fail)?;
    if !t.unitary {
        return Err("unitary transport not recognized".into());
    }
    let a = solve_scaling(&iterate(&spec).map_err(fail)?, true, tol).map_err(fail)?;
    let b = solve_scaling(&iterate(&t.spec).map_err(fail)?, true, tol).map_err(fail)?;
    match (a.certificate(), b.certificate()) {
        (Some(x), Some(y)) => check((x.margin - y.margin).abs() <= 1e-8, || format!("margins {} vs {}", x.margin, y.margin)),
        _ => Err("strict status changed under a unitary transport".into()),
    }
}

fn oracle_equivalence(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let f = random::mixed_frame(rng, 4, 10);
    let tight = analyze(&f, tol).map_err(fail)?.is_tight;
    check(tight_via_diagram(&f, tol).map_err(fail)? == tight, || "diagram tightness disagrees".into())?;
    let solver = solve_scaling(&f, false, tol).map_err(fail)?.is_scalable();
    let gram = gramian_scaling_check(&f, tol).map_err(fail)?.nonneg_null_found;
    check(solver == gram, || format!("solver {solver}, gramian {gram}"))
}

fn outcome_sound(f: &Frame, out: &ScalingOutcome, tol: Tolerance) -> bool {
    match out {
        ScalingOutcome::Scalable(c) => c.verify(f, tol),
        ScalingOutcome::NotScalable(w) => {
            let sys = scaling_system(f);
            w.verify(&sys.matrix, &sys.rhs, tol)
        }
    }
}

fn certificate_soundness(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let f = random::mixed_frame(rng, 4, 10);
    for strict in [false, true] {
        let out = solve_scaling(&f, strict, tol).map_err(fail)?;
        check(outcome_sound(&f, &out, tol), || format!("unsound outcome (strict = {strict})"))?;
    }
    Ok(())
}

fn diagonal_equivalence(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let n = rng.gen_range(1..=3);
    let u = random::unitary(rng, n, true);
    let d: Vec<Scalar> = (0..n)
        .map(|_| Scalar::from_polar(rng.gen_range(0.2..1.5), rng.gen_range(-3.1..3.1)))
        .collect();
    let a = u.mul(&MatrixValue::diagonal(&d)).mul(&u.adjoint());
    let complex = rng.gen_bool(0.5);
    let f = random::vector(rng, n, complex);
    let l = rng.gen_range(0..=6);
    let spec = dynframe_core::dynamics::DynamicalSystemSpec::single(a.clone(), f.clone(), l).map_err(fail)?;
    let direct = solve_scaling(&iterate(&spec).map_err(fail)?, false, tol).map_err(fail)?.is_scalable();
    let reduced = normal_scalability(&a, &[f], &[l], false, tol).map_err(fail)?.is_scalable();
    check(direct == reduced, || format!("direct {direct}, diagonal {reduced}"))
}

fn one_vector_obstruction(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let d: Vec<Scalar> = (0..3).map(|_| Scalar::new(rng.gen_range(-2.0..2.0), 0.0)).collect();
    let v = random::vector(rng, 3, false);
    let l = rng.gen_range(0..=12);
    let sys = build_diagonal_system(&d, &[v], &[l]).map_err(fail)?;
    check(!sys.solve(true, tol).map_err(fail)?.is_scalable(), || "strictly scalable one-vector system in ℝ³".into())
}

fn block_theorem(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    // Rotations and companions with a + b² < 0 give scalable pieces, random
    // operators mostly non-scalable ones.
    let (a1, v1) = if rng.gen_bool(0.6) {
        let w: f64 = rng.gen_range(0.9..2.2);
        (MatrixValue::from_real_rows(&[&[w.cos(), -w.sin()], &[w.sin(), w.cos()]]).unwrap(), random::vector(rng, 2, false))
    } else {
        (random::matrix(rng, 2, false), random::vector(rng, 2, false))
    };
    let (a2, v2, l2) = if rng.gen_bool(0.6) {
        let b: f64 = rng.gen_range(-1.5..1.5);
        let a = -(b * b) - rng.gen_range(0.2..2.0);
        (companion(&CompanionSpec { coefficients: vec![0.0, a, b] }).map_err(fail)?, VectorValue::basis(3, 0), 4)
    } else {
        (random::matrix(rng, 3, false), random::vector(rng, 3, false), rng.gen_range(2..=5))
    };
    let blocks = BlockDiagSpec::new(vec![a1, a2]).map_err(fail)?;
    let g = vec![(0, v1, rng.gen_range(1..=3)), (1, v2, l2)];
    let (Ok(whole), Ok(a), Ok(b)) = (
        iterate(&blocks.system(&g).map_err(fail)?),
        iterate(&blocks.block_system(0, &g).map_err(fail)?),
        iterate(&blocks.block_system(1, &g).map_err(fail)?),
    ) else {
        return Ok(());
    };
    let stacked = solve_scaling(&whole, false, tol).map_err(fail)?.is_scalable();
    let parts = solve_scaling(&a, false, tol).map_err(fail)?.is_scalable() && solve_scaling(&b, false, tol).map_err(fail)?.is_scalable();
    check(stacked == parts, || format!("stacked {stacked}, blocks {parts}"))
}

fn two_scale_boundary(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let a = rng.gen_range(0.2..2.0);
    let b: f64 = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let d: f64 = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    for r in [-0.5, 0.0, 0.5, 1.0, 1.5] {
        let c = -r * b * d / a;
        let f = Frame::from_real_columns(&[&[1.0, 0.0], &[a, b], &[c, d]]).map_err(fail)?;
        let strict = solve_scaling(&f, true, tol).map_err(fail)?.is_scalable();
        check(strict == (r == 0.5), || format!("ratio {r}: strict = {strict}"))?;
    }
    Ok(())
}

fn two_scale_closed_form(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let a = rng.gen_range(0.1..3.0);
    let b: f64 = rng.gen_range(0.1..3.0);
    let d: f64 = -rng.gen_range(0.1..3.0);
    let (b, d) = if rng.gen_bool(0.5) { (b, d) } else { (-b, -d) };
    let r = rng.gen_range(0.01..0.99);
    let c = -r * b * d / a;
    let v = check_2scale(TwoParamBlock::new(a, b, c, d), tol).map_err(fail)?;
    let [x, y, z] = v.weights.ok_or("no closed-form weights")?;
    let fw = MatrixValue::from_real_rows(&[&[x, y * a, z * c], &[0.0, y * b, z * d]]).map_err(fail)?;
    let res = fw.mul(&fw.adjoint()).sub(&MatrixValue::identity(2)).frobenius_norm();
    check(res <= 1e-9, || format!("closed-form residual {res}"))
}

fn construction_certificates(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let p = TwoParamBlock::new(rng.gen_range(0.2..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let b = rng.gen_range(-1.5..1.5);
    let systems = [
        r3_structured(p, tol).ok(),
        companion_extension(rng.gen_range(2..=5), -(b * b) - rng.gen_range(0.1..2.0), b, tol).ok(),
    ];
    for s in systems.into_iter().flatten() {
        let f = iterate(&s.spec).map_err(fail)?;
        check(s.certificate.verify(&f, tol), || "construction certificate does not verify".into())?;
        let c = solve_scaling(&f, true, tol).map_err(fail)?;
        check(c.certificate().is_some_and(|c| c.strict && c.residual <= 10.0 * tol.eps()), || "solver does not confirm".into())?;
    }
    let alpha = 2.0 * std::f64::consts::PI / 3.0;
    for spec in [
        rotation_system(alpha, rng.gen_range(2..=4), RotationPlacement::Shift).map_err(fail)?,
        multigen_rotation(3, &[PlaneBlock::rotation(0, 1, alpha), PlaneBlock::rotation(0, 2, alpha)]).map_err(fail)?,
    ] {
        let c = solve_scaling(&iterate(&spec).map_err(fail)?, true, tol).map_err(fail)?;
        check(c.certificate().is_some_and(|c| c.strict), || "rotation family not strict".into())?;
    }
    Ok(())
}

fn normal_diagonalization(rng: &mut TrialRng, tol: Tolerance) -> Result<(), String> {
    let n = rng.gen_range(1..=5);
    let u = random::unitary(rng, n, true);
    let d: Vec<Scalar> = (0..n).map(|_| Scalar::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    let a = u.mul(&MatrixValue::diagonal(&d)).mul(&u.adjoint());
    let r = unitary_diagonalize(&a, tol).map_err(fail)?;
    let back = r.unitary.mul(&r.diagonal).mul(&r.unitary.adjoint());
    check(
        r.unitary.is_unitary(1e-9) && back.sub(&a).frobenius_norm() <= 1e-9 * a.frobenius_norm().max(1.0),
        || "UDU* ≠ A".into(),
    )?;
    let x = VectorValue::basis(n, 0);
    check(r.unitary.mul_vec(&r.unitary.adjoint().mul_vec(&x)).distance(&x) <= 1e-12, || "U not invertible".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_few_trials() {
        let reports = run(&Registry::default(), "all", 5, 11, Tolerance::default()).unwrap();
        for r in &reports {
            assert!(r.ok(), "{}: {:?}", r.suite, r.failures);
        }
    }

    #[test]
    fn results_do_not_depend_on_selection() {
        let reg = Registry::default();
        let one = run(&reg, "2scale-boundary", 3, 5, Tolerance::default()).unwrap();
        let all = run(&reg, "all", 3, 5, Tolerance::default()).unwrap();
        assert_eq!(one[0], *all.iter().find(|r| r.suite == "2scale-boundary").unwrap());
        assert!(run(&reg, "nope", 1, 0, Tolerance::default()).is_err());
    }
}
