//! `dynframe` command line. Exit codes: 0 success or property true, 1
//! property false, 2 input error, 3 numerical failure or oracle disagreement.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dynframe_core::constructions::{
    companion, multigen_rotation, r3_structured, rotation_system, BlockDiagSpec, CompanionSpec, PlaneBlock,
    RotationPlacement, TwoParamBlock,
};
use dynframe_core::dynamics::{dynamical_dual, iterate, reconstruct, take_samples, DynamicalSystemSpec};
use dynframe_core::frames::{analyze, Frame};
use dynframe_core::scalability::{gramian_scaling_check, solve_scaling, tight_via_diagram, GramianCheck};
use dynframe_core::{Error, MatrixValue, Tolerance, VectorValue};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::json::{
    frame_from_json, from_json_str, to_json_string, vector_from_json, vector_to_json, JsonCertificate, JsonEntry,
    JsonMatrix, JsonSamples, JsonSystem,
};
use crate::suites::{self, Registry};

#[derive(Debug, Parser)]
#[command(name = "dynframe", version, about = "Dynamical frames: iterate, analyze, scale, dualize, reconstruct")]
pub struct Cli {
    /// Relative tolerance (default 1e-9).
    #[arg(long, global = true, env = "DYNFRAME_TOL")]
    pub tol: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate a system file into a frame file (vectors as columns).
    Gen { system: PathBuf },
    /// Frame bounds and tightness; exit 1 if the input is not a frame.
    Analyze { frame: PathBuf },
    /// Scaling certificate or infeasibility witness, cross-checked against the diagram Gramian.
    Scale {
        frame: PathBuf,
        /// Require every weight to be positive.
        #[arg(long)]
        strict: bool,
    },
    /// Canonical dual of a system, itself a system file.
    Dual { system: PathBuf },
    /// Space-time samples of a signal (a JSON vector).
    Sample { system: PathBuf, signal: PathBuf },
    /// Recover a signal from samples, or from a simulated signal.
    Reconstruct {
        system: PathBuf,
        #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
        samples: Option<PathBuf>,
        /// Sample this signal first and report the recovery error.
        #[arg(long)]
        simulate: Option<PathBuf>,
        /// Reconstruct with the weights of a scaling certificate instead of the dual.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Build a system from one of the structured families.
    Construct {
        #[command(subcommand)]
        preset: Preset,
    },
    /// Run property suites; exit 0 iff every trial passes.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the reports as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

/// Construction presets. Indices are 0-based; angles are in radians.
#[derive(Debug, Subcommand)]
pub enum Preset {
    /// Companion operator with the given last column, generator e1.
    Companion {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
        /// Iterations (default n).
        #[arg(long)]
        l: Option<usize>,
    },
    /// Block-diagonal stack of plane rotations, e1 of each block iterated L times.
    Block {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        omegas: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
    /// Shift feeding a trailing rotation block, e1 iterated n times.
    Rotation {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
    },
    /// diag(signs) ⊕ rotation(phi).
    Schur {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        /// n−2 entries of ±1 (default all +1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        signs: Vec<f64>,
    },
    /// diag(γ^i) with γ = e^{2πi/k}, generator (1,…,1)/√k, L = k−1.
    Harmonic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Rotations by alpha in the planes p:k, all applied to e1 twice.
    Multigen {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Comma-separated `p:k` coordinate pairs, e.g. `0:1,0:2`.
        #[arg(long, value_delimiter = ',', required = true)]
        planes: Vec<String>,
    },
    /// [[0,0,0],[1,a,c],[0,b,d]] with e1, L = 3.
    R3 {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        d: f64,
    },
    /// [[a,c],[b,d]] with e1.
    Twoparam {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        d: f64,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
}

pub type Oracle = fn(&Frame, Tolerance) -> dynframe_core::Result<GramianCheck>;

/// Replaceable collaborators, for exercising failure paths.
#[derive(Clone)]
pub struct Env {
    pub registry: Registry,
    pub oracle: Oracle,
}

impl Default for Env {
    fn default() -> Self {
        Env {
            registry: Registry::default(),
            oracle: gramian_scaling_check,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, env: &Env, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    match execute(&cli, env) {
        Ok(done) => {
            if let Some(text) = done.output {
                if let Err(e) = emit(cli.out.as_deref(), &text, stdout) {
                    let _ = writeln!(stderr, "error: {e}");
                    return e.exit_code();
                }
            }
            if let Some(note) = done.note {
                let _ = writeln!(stderr, "{note}");
            }
            done.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

struct Done {
    code: u8,
    output: Option<String>,
    note: Option<String>,
}

impl Done {
    fn ok(output: String) -> Self {
        Done {
            code: 0,
            output: Some(output),
            note: None,
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> CliResult<T> {
    from_json_str(&read(path)?, &path.display().to_string())
}

fn load_spec(path: &Path) -> CliResult<DynamicalSystemSpec> {
    load::<JsonSystem>(path)?.to_spec()
}

fn load_vector(path: &Path) -> CliResult<VectorValue> {
    vector_from_json(&load::<Vec<JsonEntry>>(path)?)
}

fn tolerance(cli: &Cli) -> CliResult<Tolerance> {
    match cli.tol {
        None => Ok(Tolerance::default()),
        Some(t) => Tolerance::new(t).map_err(|_| CliError::Input(format!("tolerance must be positive, got {t}"))),
    }
}

fn execute(cli: &Cli, env: &Env) -> CliResult<Done> {
    let tol = tolerance(cli)?;
    match &cli.command {
        Command::Gen { system } => {
            let spec = load_spec(system)?;
            let m = MatrixValue::from_columns(&spec.iterate_vectors())?;
            Ok(Done::ok(to_json_string(&JsonMatrix::from_matrix(&m))?))
        }
        Command::Analyze { frame } => cmd_analyze(&load(frame)?, tol),
        Command::Scale { frame, strict } => {
            let f = frame_from_json(&load(frame)?)?;
            cmd_scale(&f, *strict, tol, env.oracle)
        }
        Command::Dual { system } => match dynamical_dual(&load_spec(system)?, tol) {
            Ok(d) => Ok(Done::ok(to_json_string(&JsonSystem::from_spec(&d.to_spec()?))?)),
            Err(Error::NotAFrame) => Ok(Done {
                code: 1,
                output: None,
                note: Some("not a frame: the system has no canonical dual".into()),
            }),
            Err(e) => Err(e.into()),
        },
        Command::Sample { system, signal } => {
            let s = take_samples(&load_spec(system)?, &load_vector(signal)?)?;
            Ok(Done::ok(to_json_string(&JsonSamples::from_samples(&s))?))
        }
        Command::Reconstruct {
            system,
            samples,
            simulate,
            certificate,
        } => cmd_reconstruct(&load_spec(system)?, samples.as_deref(), simulate.as_deref(), certificate.as_deref(), tol),
        Command::Construct { preset } => Ok(Done::ok(to_json_string(&JsonSystem::from_spec(&construct(preset, tol)?))?)),
        Command::Verify {
            suite,
            trials,
            seed,
            json,
        } => {
            let reports = suites::run(&env.registry, suite, *trials, *seed, tol)?;
            let code = if reports.iter().all(|r| r.ok()) { 0 } else { 1 };
            let output = if *json {
                to_json_string(&reports)?
            } else {
                suites::render_table(&reports)
            };
            Ok(Done {
                code,
                output: Some(output),
                note: None,
            })
        }
    }
}

fn cmd_analyze(m: &JsonMatrix, tol: Tolerance) -> CliResult<Done> {
    let synthesis = m.to_matrix()?;
    // Zero vectors do not change the frame operator.
    let nonzero: Vec<VectorValue> = synthesis.columns().into_iter().filter(|v| !v.is_zero()).collect();
    let report = match Frame::new(nonzero) {
        Ok(f) => {
            let r = analyze(&f, tol)?;
            json!({
                "dim": f.dim(),
                "len": synthesis.cols(),
                "lower_bound": r.lower_bound,
                "upper_bound": r.upper_bound,
                "is_frame": r.is_frame,
                "is_tight": r.is_tight,
                "tight_constant": r.tight_constant,
                "parseval": r.parseval,
                "diagram_tight": tight_via_diagram(&f, tol)?,
            })
        }
        Err(Error::EmptyFrame) => json!({
            "dim": synthesis.rows(),
            "len": synthesis.cols(),
            "lower_bound": 0.0,
            "upper_bound": 0.0,
            "is_frame": false,
            "is_tight": false,
            "tight_constant": null,
            "parseval": false,
            "diagram_tight": false,
        }),
        Err(e) => return Err(e.into()),
    };
    let code = if report["is_frame"] == json!(true) { 0 } else { 1 };
    Ok(Done {
        code,
        output: Some(to_json_string(&report)?),
        note: None,
    })
}

/// Solver outcome cross-checked against the Gramian oracle.
pub fn cmd_scale_outcome(
    f: &Frame,
    strict: bool,
    tol: Tolerance,
    oracle: Oracle,
) -> CliResult<dynframe_core::scalability::ScalingOutcome> {
    let out = solve_scaling(f, strict, tol)?;
    let gram = oracle(f, tol)?;
    let feasible = if strict {
        solve_scaling(f, false, tol)?.is_scalable()
    } else {
        out.is_scalable()
    };
    if feasible != gram.nonneg_null_found {
        return Err(CliError::Disagreement(format!(
            "solver says scalable = {feasible}, Gramian null vector found = {}",
            gram.nonneg_null_found
        )));
    }
    if strict && out.is_scalable() != gram.positive_null_found {
        return Err(CliError::Disagreement(format!(
            "solver says strictly scalable = {}, positive Gramian null vector found = {}",
            out.is_scalable(),
            gram.positive_null_found
        )));
    }
    Ok(out)
}

fn cmd_scale(f: &Frame, strict: bool, tol: Tolerance, oracle: Oracle) -> CliResult<Done> {
    let out = cmd_scale_outcome(f, strict, tol, oracle)?;
    Ok(Done {
        code: if out.is_scalable() { 0 } else { 1 },
        output: Some(to_json_string(&JsonCertificate::from_outcome(&out))?),
        note: None,
    })
}

fn cmd_reconstruct(
    spec: &DynamicalSystemSpec,
    samples: Option<&Path>,
    simulate: Option<&Path>,
    certificate: Option<&Path>,
    tol: Tolerance,
) -> CliResult<Done> {
    let (set, truth) = match (samples, simulate) {
        (Some(p), _) => (load::<JsonSamples>(p)?.to_samples(), None),
        (None, Some(p)) => {
            let f = load_vector(p)?;
            (take_samples(spec, &f)?, Some(f))
        }
        (None, None) => return Err(CliError::Input("need --samples or --simulate".into())),
    };
    let cert = match certificate {
        Some(p) => {
            let frame = iterate(spec)?;
            Some(load::<JsonCertificate>(p)?.load_certificate(&frame, tol)?)
        }
        None => None,
    };
    let recovered = match reconstruct(spec, &set, cert.as_ref(), tol) {
        Err(Error::NotAFrame) => {
            return Ok(Done {
                code: 1,
                output: None,
                note: Some("not a frame: the signal cannot be recovered".into()),
            })
        }
        r => r?,
    };
    let error = truth.as_ref().map(|f| recovered.distance(f));
    let report = json!({
        "method": if cert.is_some() { "certificate" } else { "dual" },
        "recovered": vector_to_json(&recovered),
        "error": error,
    });
    Ok(Done::ok(to_json_string(&report)?))
}

fn parse_plane(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Input(format!("plane {s:?} is not of the form p:k"));
    let (p, k) = s.split_once(':').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

pub fn construct(preset: &Preset, tol: Tolerance) -> CliResult<DynamicalSystemSpec> {
    let spec = match preset {
        Preset::Companion { coeffs, l } => {
            let m = companion(&CompanionSpec {
                coefficients: coeffs.clone(),
            })?;
            let n = coeffs.len();
            DynamicalSystemSpec::single(m, VectorValue::basis(n, 0), l.unwrap_or(n))?
        }
        Preset::Block { omegas, l } => {
            let blocks = BlockDiagSpec::new(
                omegas
                    .iter()
                    .map(|w| MatrixValue::from_real_rows(&[&[w.cos(), -w.sin()], &[w.sin(), w.cos()]]))
                    .collect::<dynframe_core::Result<Vec<_>>>()?,
            )?;
            let gens: Vec<_> = (0..omegas.len()).map(|s| (s, VectorValue::basis(2, 0), *l)).collect();
            blocks.system(&gens)?
        }
        Preset::Rotation { n, omega } => rotation_system(*omega, *n, RotationPlacement::Shift)?,
        Preset::Schur { n, phi, signs } => {
            let signs = if signs.is_empty() {
                vec![1.0; n.saturating_sub(2)]
            } else {
                signs.clone()
            };
            rotation_system(*phi, *n, RotationPlacement::Schur { signs })?
        }
        Preset::Harmonic { n, k } => dynframe_core::constructions::harmonic(*n, *k)?,
        Preset::Multigen { n, alpha, planes } => {
            let planes = planes
                .iter()
                .map(|s| parse_plane(s).map(|(p, k)| PlaneBlock::rotation(p, k, *alpha)))
                .collect::<CliResult<Vec<_>>>()?;
            multigen_rotation(*n, &planes)?
        }
        Preset::R3 { a, b, c, d } => r3_structured(TwoParamBlock::new(*a, *b, *c, *d), tol)?.spec,
        Preset::Twoparam { a, b, c, d, l } => {
            DynamicalSystemSpec::single(TwoParamBlock::new(*a, *b, *c, *d).matrix(), VectorValue::basis(2, 0), *l)?
        }
    };
    Ok(spec)
}
