use std::path::{Path, PathBuf};
use std::process::Command;

use dynframe::cli::{run, Env};
use dynframe::json::{frame_from_json, JsonCertificate, JsonMatrix, JsonSystem};
use dynframe::suites::Registry;
use dynframe_core::frames::Frame;
use dynframe_core::scalability::GramianCheck;
use dynframe_core::{MatrixValue, Tolerance};
use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: u8,
    stdout: String,
    stderr: String,
}

fn dynframe_with(env: &Env, args: &[&str]) -> Out {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("dynframe").chain(args.iter().copied());
    let code = run(argv, env, &mut stdout, &mut stderr);
    Out {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn dynframe(args: &[&str]) -> Out {
    dynframe_with(&Env::default(), args)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn real_frame(dir: &TempDir, name: &str, cols: &[&[f64]]) -> PathBuf {
    let m = MatrixValue::from_columns(
        &cols
            .iter()
            .map(|c| dynframe_core::VectorValue::from_real(c).unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    write(dir, name, &serde_json::to_string(&JsonMatrix::from_matrix(&m)).unwrap())
}

fn construct(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = dynframe(&[&["construct"], args].concat());
    assert_eq!(out.code, 0, "{}", out.stderr);
    write(dir, name, &out.stdout)
}

const SHIFT3: &str = r#"{"dim":3,"operators":[{"rows":3,"cols":3,"field":"real",
  "data":[[0,0,1],[1,0,0],[0,1,0]]}],"generators":[[1,0,0]],"triples":[[0,0,3]]}"#;

#[test]
fn gen_shift_system() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", SHIFT3);
    let out = dynframe(&["gen", s(&sys)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let m: JsonMatrix = serde_json::from_str(&out.stdout).unwrap();
    let cols = m.to_matrix().unwrap().to_real_vec().unwrap();
    assert_eq!(cols, vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn gen_harmonic_is_complex() {
    let dir = TempDir::new().unwrap();
    let sys = construct(&dir, "h.json", &["harmonic", "--n", "2", "--k", "3"]);
    let out = dynframe(&["gen", s(&sys)]);
    let v = json(&out.stdout);
    assert_eq!(v["cols"], 3);
    assert_eq!(v["field"], "complex");
    assert!(v["data"][1][1].is_array());
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"dim":3,"operators":[{"rows":2,"cols":2,"field":"real","data":[[1,0],[0,1]]}],"generators":[[1,0,0]],"triples":[[0,0,1]]}"#,
    );
    assert_eq!(dynframe(&["gen", s(&bad)]).code, 2);
    let junk = write(&dir, "junk.json", "{ not json");
    assert_eq!(dynframe(&["gen", s(&junk)]).code, 2);
    assert_eq!(dynframe(&["gen", "/nonexistent/file.json"]).code, 2);
    assert_eq!(dynframe(&["analyze"]).code, 2);
}

#[test]
fn analyze_reports() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let parseval = real_frame(&dir, "p.json", &[&[h, h], &[h, -h]]);
    let out = dynframe(&["analyze", s(&parseval)]);
    assert_eq!(out.code, 0);
    let v = json(&out.stdout);
    assert_eq!(v["is_frame"], true);
    assert_eq!(v["is_tight"], true);
    assert_eq!(v["diagram_tight"], true);
    assert!((num(&v["tight_constant"]) - 1.0).abs() < 1e-12);

    let f = real_frame(&dir, "b.json", &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
    let v = json(&dynframe(&["analyze", s(&f)]).stdout);
    assert!((num(&v["lower_bound"]) - 1.0).abs() < 1e-12 && (num(&v["upper_bound"]) - 2.0).abs() < 1e-12);
    assert_eq!(v["diagram_tight"], false);

    let flat = real_frame(&dir, "r.json", &[&[1.0, 0.0], &[2.0, 0.0]]);
    let out = dynframe(&["analyze", s(&flat)]);
    assert_eq!(out.code, 1);
    assert_eq!(json(&out.stdout)["is_frame"], false);
}

#[test]
fn scale_shift_frame() {
    let dir = TempDir::new().unwrap();
    let f = real_frame(&dir, "f.json", &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
    let out = dynframe(&["scale", "--strict", s(&f)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    let w: Vec<f64> = v["weights"].as_array().unwrap().iter().map(num).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (a, b) in w.iter().zip([h, 1.0, 1.0, h]) {
        assert!((a - b).abs() < 1e-9, "{w:?}");
    }
    assert_eq!(v["strict"], true);
}

#[test]
fn scale_basis_plus_vector_gives_witness() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = real_frame(&dir, "f.json", &[&[1.0, 0.0], &[0.0, 1.0], &[h, h]]);
    let out = dynframe(&["scale", "--strict", s(&f)]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    let cert: JsonCertificate = serde_json::from_str(&out.stdout).unwrap();
    let frame = frame_from_json(&serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap()).unwrap();
    assert!(matches!(cert, JsonCertificate::Witness { witness_check, .. } if witness_check > 0.0));
    assert!(cert.verifies(&frame, Tolerance::default()));
    // Without strictness the frame is scalable (weight 0 on the extra vector).
    assert_eq!(dynframe(&["scale", s(&f)]).code, 0);
}

fn lying_oracle(f: &Frame, tol: Tolerance) -> dynframe_core::Result<GramianCheck> {
    let mut g = dynframe_core::scalability::gramian_scaling_check(f, tol)?;
    g.nonneg_null_found = !g.nonneg_null_found;
    Ok(g)
}

#[test]
fn oracle_disagreement_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = real_frame(&dir, "f.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let env = Env {
        oracle: lying_oracle,
        ..Env::default()
    };
    let out = dynframe_with(&env, &["scale", s(&f)]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("disagreement"));
}

#[test]
fn certificates_round_trip() {
    let dir = TempDir::new().unwrap();
    let sys = construct(&dir, "m.json", &["multigen", "--alpha", "2.0943951023931957", "--planes", "0:1,0:2"]);
    let frame_out = dynframe(&["gen", s(&sys)]);
    let fpath = write(&dir, "f.json", &frame_out.stdout);
    let out = dynframe(&["scale", "--strict", s(&fpath)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let cert: JsonCertificate = serde_json::from_str(&out.stdout).unwrap();
    let frame = frame_from_json(&serde_json::from_str(&frame_out.stdout).unwrap()).unwrap();
    let loaded = cert.load_certificate(&frame, Tolerance::default()).unwrap();
    assert!(loaded.strict);
    // Tampering with a weight is caught on reload.
    if let JsonCertificate::Scalable { mut weights, tight_constant, residual, strict, margin } = cert {
        weights[0] *= 1.1;
        let bad = JsonCertificate::Scalable { weights, tight_constant, residual, strict, margin };
        assert!(bad.load_certificate(&frame, Tolerance::default()).is_err());
    } else {
        panic!("expected a certificate");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let sys = construct(&dir, "r.json", &["rotation", "--n", "4", "--omega", "2.0944"]);
    let gen = dynframe(&["gen", s(&sys)]);
    let f = write(&dir, "f.json", &gen.stdout);
    let a = dynframe(&["scale", "--strict", s(&f)]).stdout;
    let b = dynframe(&["scale", "--strict", s(&f)]).stdout;
    assert_eq!(a, b);
    assert!(a.starts_with("{\"margin\":"), "keys are sorted: {a}");
    let out = dir.path().join("cert.json");
    assert_eq!(dynframe(&["scale", "--strict", s(&f), "--out", s(&out)]).code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a);
}

#[test]
fn dual_commands() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", SHIFT3);
    let out = dynframe(&["dual", s(&sys)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let d: JsonSystem = serde_json::from_str(&out.stdout).unwrap();
    let spec = d.to_spec().unwrap();
    assert_eq!(spec.generators()[0].to_real_vec().unwrap(), vec![0.5, 0.0, 0.0]);
    let s_op = MatrixValue::real_diagonal(&[2.0, 1.0, 1.0]);
    let a = MatrixValue::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
    let s_inv = MatrixValue::real_diagonal(&[0.5, 1.0, 1.0]);
    assert!(spec.operators()[0].sub(&s_inv.mul(&a).mul(&s_op)).frobenius_norm() < 1e-12);

    // Parseval system: the dual is the system itself.
    let basis = construct(&dir, "c.json", &["companion", "--coeffs", "0,0,1", "--l", "2"]);
    let dual: JsonSystem = serde_json::from_str(&dynframe(&["dual", s(&basis)]).stdout).unwrap();
    let orig: JsonSystem = serde_json::from_str(&std::fs::read_to_string(&basis).unwrap()).unwrap();
    let (d, o) = (dual.to_spec().unwrap(), orig.to_spec().unwrap());
    assert!(d.operators()[0].sub(&o.operators()[0]).frobenius_norm() < 1e-12);
    assert_eq!(d.generators(), o.generators());

    let short = write(&dir, "short.json", &SHIFT3.replace("[[0,0,3]]", "[[0,0,1]]"));
    assert_eq!(dynframe(&["dual", s(&short)]).code, 1);
}

#[test]
fn reconstruct_paths() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", SHIFT3);
    let f = write(&dir, "f.json", "[0.3, -1.25, 2.0]");
    let out = dynframe(&["reconstruct", s(&sys), "--simulate", s(&f)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert!(num(&v["error"]) < 1e-9);
    assert_eq!(v["method"], "dual");

    let gen = write(&dir, "frame.json", &dynframe(&["gen", s(&sys)]).stdout);
    let cert = write(&dir, "cert.json", &dynframe(&["scale", "--strict", s(&gen)]).stdout);
    let out = dynframe(&["reconstruct", s(&sys), "--simulate", s(&f), "--certificate", s(&cert)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let w = json(&out.stdout);
    assert_eq!(w["method"], "certificate");
    assert!(num(&w["error"]) < 1e-9);

    let samples = dynframe(&["sample", s(&sys), s(&f)]);
    assert_eq!(samples.code, 0);
    let sp = write(&dir, "samples.json", &samples.stdout);
    let out = dynframe(&["reconstruct", s(&sys), "--samples", s(&sp)]);
    assert_eq!(json(&out.stdout)["recovered"], v["recovered"]);

    let mut dropped = json(&samples.stdout);
    dropped["samples"].as_array_mut().unwrap().remove(2);
    let dp = write(&dir, "dropped.json", &dropped.to_string());
    assert_eq!(dynframe(&["reconstruct", s(&sys), "--samples", s(&dp)]).code, 2);
}

#[test]
fn construct_presets() {
    let dir = TempDir::new().unwrap();
    let strict_frame = |sys: &Path| {
        let m = dynframe(&["gen", s(sys)]).stdout;
        let f = write(&dir, "tmp.json", &m);
        dynframe(&["scale", "--strict", s(&f)]).code
    };
    let r = construct(&dir, "rot.json", &["rotation", "--n", "2", "--omega", "2.0944"]);
    assert_eq!(strict_frame(&r), 0);
    let c = construct(&dir, "comp.json", &["companion", "--coeffs", "0,0,-2,1", "--l", "5"]);
    assert_eq!(strict_frame(&c), 0);
    let b = construct(&dir, "block.json", &["block", "--omegas", "2.0944,-2.0944"]);
    assert_eq!(strict_frame(&b), 0);
    let sc = construct(&dir, "schur.json", &["schur", "--n", "3", "--phi", "2.0944", "--signs", "-1"]);
    assert_eq!(strict_frame(&sc), 0);
    let r3 = construct(&dir, "r3.json", &["r3", "--a", "1", "--b", "1", "--c", "-2", "--d", "1"]);
    assert_eq!(strict_frame(&r3), 0);
    let tp = construct(&dir, "tp.json", &["twoparam", "--a", "1", "--b", "1", "--c", "-2", "--d", "1"]);
    assert_eq!(strict_frame(&tp), 0);
    assert_eq!(dynframe(&["construct", "r3", "--a", "1", "--b", "1", "--c", "1", "--d", "1"]).code, 2);
    assert_eq!(dynframe(&["construct", "harmonic", "--n", "3", "--k", "2"]).code, 2);
    assert_eq!(dynframe(&["construct", "multigen", "--alpha", "1", "--planes", "0-1"]).code, 2);
}

#[test]
fn verify_suites() {
    let out = dynframe(&["verify", "--suite", "2scale-boundary", "--trials", "5"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("2scale-boundary") && out.stdout.contains("PASS"));
    let out = dynframe(&["verify", "--suite", "dual-identity", "--trials", "100", "--seed", "7", "--json"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(json(&out.stdout)[0]["passed"], 100);
    assert_eq!(dynframe(&["verify", "--suite", "no-such-suite"]).code, 2);
}

#[test]
fn broken_suite_fails_verify() {
    fn broken(_: &mut dynframe::random::TrialRng, _: Tolerance) -> Result<(), String> {
        Err("deliberately broken".into())
    }
    let env = Env {
        registry: Registry::default().with("broken", broken),
        ..Env::default()
    };
    let out = dynframe_with(&env, &["verify", "--suite", "all", "--trials", "2"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("deliberately broken"));
}

#[test]
fn tolerance_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    let f = real_frame(&dir, "f.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let bin = env!("CARGO_BIN_EXE_dynframe");
    let code = |args: &[&str], tol: &str| {
        Command::new(bin)
            .args(args)
            .env("DYNFRAME_TOL", tol)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(code(&["analyze", s(&f)], "-1"), 2);
    assert_eq!(code(&["analyze", s(&f), "--tol", "1e-9"], "-1"), 0);
    assert_eq!(code(&["analyze", s(&f)], "1e-6"), 0);
}
