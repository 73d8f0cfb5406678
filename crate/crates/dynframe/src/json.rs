//! On-disk formats. Complex entries are `[re, im]` pairs; output keys are
//! sorted and every float is written with 17 significant digits.

use std::io;

use dynframe_core::dynamics::{DynamicalSystemSpec, LatticePoint, SampleSet, Triple};
use dynframe_core::frames::Frame;
use dynframe_core::numkernel::FarkasWitness;
use dynframe_core::scalability::{scaling_system, ScalingCertificate, ScalingOutcome};
use dynframe_core::{FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonEntry {
    Real(f64),
    Complex([f64; 2]),
}

impl JsonEntry {
    fn scalar(self) -> Scalar {
        match self {
            JsonEntry::Real(x) => Scalar::new(x, 0.0),
            JsonEntry::Complex([re, im]) => Scalar::new(re, im),
        }
    }

    fn from_scalar(z: Scalar, field: FieldTag) -> Self {
        match field {
            FieldTag::Real => JsonEntry::Real(z.re),
            FieldTag::Complex => JsonEntry::Complex([z.re, z.im]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsonField {
    Real,
    Complex,
}

impl From<FieldTag> for JsonField {
    fn from(f: FieldTag) -> Self {
        match f {
            FieldTag::Real => JsonField::Real,
            FieldTag::Complex => JsonField::Complex,
        }
    }
}

impl From<JsonField> for FieldTag {
    fn from(f: JsonField) -> Self {
        match f {
            JsonField::Real => FieldTag::Real,
            JsonField::Complex => FieldTag::Complex,
        }
    }
}

/// Row-major matrix; frame files store the frame vectors as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: JsonField,
    pub data: Vec<Vec<JsonEntry>>,
}

impl JsonMatrix {
    pub fn from_matrix(m: &MatrixValue) -> Self {
        let field = m.field();
        JsonMatrix {
            rows: m.rows(),
            cols: m.cols(),
            field: field.into(),
            data: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| JsonEntry::from_scalar(m.get(i, j), field)).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> CliResult<MatrixValue> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(CliError::Input(format!(
                "matrix data does not have {} rows of {} entries",
                self.rows, self.cols
            )));
        }
        if self.field == JsonField::Real && self.data.iter().flatten().any(|e| matches!(e, JsonEntry::Complex(_))) {
            return Err(CliError::Input("real matrix with [re, im] entries".into()));
        }
        let data = self.data.iter().flatten().map(|e| e.scalar()).collect();
        Ok(MatrixValue::new(self.rows, self.cols, self.field.into(), data)?)
    }
}

pub fn vector_to_json(v: &VectorValue) -> Vec<JsonEntry> {
    v.entries().iter().map(|&z| JsonEntry::from_scalar(z, v.field())).collect()
}

/// A vector is complex as soon as one entry is a pair.
pub fn vector_from_json(entries: &[JsonEntry]) -> CliResult<VectorValue> {
    let field = if entries.iter().any(|e| matches!(e, JsonEntry::Complex(_))) {
        FieldTag::Complex
    } else {
        FieldTag::Real
    };
    Ok(VectorValue::new(field, entries.iter().map(|e| e.scalar()).collect())?)
}

pub fn frame_to_json(f: &Frame) -> JsonMatrix {
    JsonMatrix::from_matrix(&f.synthesis())
}

pub fn frame_from_json(m: &JsonMatrix) -> CliResult<Frame> {
    Ok(Frame::from_synthesis(&m.to_matrix()?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonSystem {
    pub dim: usize,
    pub operators: Vec<JsonMatrix>,
    pub generators: Vec<Vec<JsonEntry>>,
    /// `[operator, generator, L]`.
    pub triples: Vec<[usize; 3]>,
}

impl JsonSystem {
    pub fn from_spec(spec: &DynamicalSystemSpec) -> Self {
        JsonSystem {
            dim: spec.dim(),
            operators: spec.operators().iter().map(JsonMatrix::from_matrix).collect(),
            generators: spec.generators().iter().map(vector_to_json).collect(),
            triples: spec.triples().iter().map(|t| [t.operator, t.generator, t.iterations]).collect(),
        }
    }

    pub fn to_spec(&self) -> CliResult<DynamicalSystemSpec> {
        let operators = self.operators.iter().map(|m| m.to_matrix()).collect::<CliResult<Vec<_>>>()?;
        let generators = self.generators.iter().map(|g| vector_from_json(g)).collect::<CliResult<Vec<_>>>()?;
        let triples = self.triples.iter().map(|t| Triple::new(t[0], t[1], t[2])).collect();
        Ok(DynamicalSystemSpec::new(self.dim, operators, generators, triples)?)
    }
}

/// Either a scaling certificate or an infeasibility witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonCertificate {
    Scalable {
        weights: Vec<f64>,
        tight_constant: f64,
        residual: f64,
        strict: bool,
        margin: f64,
    },
    Witness {
        witness: Vec<f64>,
        /// `yᵀ(b − shift·A·1)`, positive for a valid witness.
        witness_check: f64,
        shift: f64,
    },
}

impl JsonCertificate {
    pub fn from_outcome(out: &ScalingOutcome) -> Self {
        match out {
            ScalingOutcome::Scalable(c) => JsonCertificate::Scalable {
                weights: c.weights.clone(),
                tight_constant: c.tight_constant,
                residual: c.residual,
                strict: c.strict,
                margin: c.margin,
            },
            ScalingOutcome::NotScalable(w) => JsonCertificate::Witness {
                witness: w.y.clone(),
                witness_check: w.rhs_product,
                shift: w.shift,
            },
        }
    }

    /// Rebuilds the certificate against `frame` and re-verifies it; the stored
    /// residual and margin are recomputed rather than trusted.
    pub fn load_certificate(&self, frame: &Frame, tol: Tolerance) -> CliResult<ScalingCertificate> {
        let JsonCertificate::Scalable {
            weights, tight_constant, strict, ..
        } = self
        else {
            return Err(CliError::Input("file holds a witness, not a scaling certificate".into()));
        };
        if weights.len() != frame.len() {
            return Err(CliError::Input(format!(
                "certificate has {} weights for {} frame vectors",
                weights.len(),
                frame.len()
            )));
        }
        let mut cert = ScalingCertificate::from_weights(frame, weights, tol)?;
        let drift = (cert.tight_constant - tight_constant).abs();
        if drift > 10.0 * tol.eps() * tight_constant.abs().max(1.0) {
            return Err(CliError::Input("stored tight constant does not match the weights".into()));
        }
        cert.strict = *strict && cert.strict;
        if !cert.verify(frame, tol) || cert.strict != *strict {
            return Err(CliError::Input("certificate does not verify against the frame".into()));
        }
        Ok(cert)
    }

    /// Re-checks either form against `frame`.
    pub fn verifies(&self, frame: &Frame, tol: Tolerance) -> bool {
        match self {
            JsonCertificate::Scalable { .. } => self.load_certificate(frame, tol).is_ok(),
            JsonCertificate::Witness { witness, shift, .. } => {
                let sys = scaling_system(frame);
                FarkasWitness {
                    y: witness.clone(),
                    shift: *shift,
                    max_column_product: 0.0,
                    rhs_product: 0.0,
                }
                .verify(&sys.matrix, &sys.rhs, tol)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonSample {
    pub triple: usize,
    pub power: usize,
    pub value: JsonEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonSamples {
    pub samples: Vec<JsonSample>,
}

impl JsonSamples {
    pub fn from_samples(s: &SampleSet) -> Self {
        JsonSamples {
            samples: s
                .entries
                .iter()
                .map(|(p, z)| JsonSample {
                    triple: p.triple,
                    power: p.power,
                    value: JsonEntry::Complex([z.re, z.im]),
                })
                .collect(),
        }
    }

    pub fn to_samples(&self) -> SampleSet {
        SampleSet {
            entries: self
                .samples
                .iter()
                .map(|s| {
                    (
                        LatticePoint {
                            triple: s.triple,
                            power: s.power,
                        },
                        s.value.scalar(),
                    )
                })
                .collect(),
        }
    }
}

/// Floats as `{:.16e}`: 17 significant digits, identical bytes on every run.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Deterministic JSON text: keys sorted (via `serde_json::Value`), fixed float digits.
pub fn to_json_string<T: Serialize>(value: &T) -> CliResult<String> {
    let tree = serde_json::to_value(value).map_err(|source| CliError::Json {
        context: "output".into(),
        source,
    })?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    tree.serialize(&mut ser).map_err(|source| CliError::Json {
        context: "output".into(),
        source,
    })?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("JSON output is UTF-8"))
}

pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str, context: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json {
        context: context.into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"b": 0.5, "a": [1, 2.0]})).unwrap();
        assert_eq!(s, "{\"a\":[1,2.0000000000000000e0],\"b\":5.0000000000000000e-1}\n");
        let x = 0.1f64 + 0.2;
        let back: f64 = from_json_str(to_json_string(&x).unwrap().trim(), "t").unwrap();
        assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn matrix_round_trip_and_validation() {
        let m = MatrixValue::from_complex(1, 2, vec![Scalar::new(1.0, -2.0), Scalar::new(0.0, 0.5)]).unwrap();
        let j = JsonMatrix::from_matrix(&m);
        assert_eq!(j.to_matrix().unwrap(), m);
        let text = r#"{"rows":1,"cols":2,"field":"real","data":[[1.0,[0.0,1.0]]]}"#;
        let bad: JsonMatrix = from_json_str(text, "t").unwrap();
        assert!(bad.to_matrix().is_err());
        let short: JsonMatrix = from_json_str(r#"{"rows":2,"cols":1,"field":"real","data":[[1.0]]}"#, "t").unwrap();
        assert!(short.to_matrix().is_err());
    }
}
