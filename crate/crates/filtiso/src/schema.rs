//! JSON document types for every public object.
//!
//! Every top-level document carries `"schema": 1`; unknown fields are
//! rejected. All rationals travel as exact strings "a/b" (or "a" when the
//! denominator is 1), valuations additionally allow "inf". A coefficient
//! element is an array of m rational strings, lowest pi-power first. A
//! matrix or subspace basis is an array of column vectors, each an array of
//! coefficient elements. No floats appear anywhere.

use crate::adjoint::AdjointPoint;
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, CoeffElem, FieldSpec, Val};
use crate::filtered::{
    FilteredIsocrystal, Flag, HnStep, WaCertificate, WaDetailRow, WaVerdict,
};
use crate::filtype::FiltrationType;
use crate::isocrystal::{FrobeniusSpec, IsotypicPiece, PieceMode, SlopePiece};
use crate::linalg::MatrixF;
use crate::theorem::{CellOutcome, Obstruction, SweepRecord, SweepSummary};
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u64 = 1;

/// Parse a top-level document: require `"schema": 1`, then deserialize the
/// remaining fields strictly.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let serde_json::Value::Object(mut map) = value else {
        return Err(Error::Parse("expected a JSON object".into()));
    };
    match map.remove("schema") {
        Some(serde_json::Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(Error::Parse(format!(
                "unsupported schema version {other}, expected {SCHEMA_VERSION}"
            )));
        }
        None => return Err(Error::Parse("missing \"schema\" field".into())),
    }
    serde_json::from_value(serde_json::Value::Object(map))
        .map_err(|e| Error::Parse(format!("document does not match schema: {e}")))
}

/// Emit a top-level document with the `"schema": 1` stamp, pretty-printed.
pub fn emit_document<T: Serialize>(body: &T) -> String {
    let value = serde_json::to_value(body).expect("document types serialize");
    let serde_json::Value::Object(mut map) = value else {
        panic!("document types serialize to objects");
    };
    map.insert("schema".into(), SCHEMA_VERSION.into());
    serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("serializable")
}

pub fn rationals_to_strings(qs: &[BigRational]) -> Vec<String> {
    qs.iter().map(format_rational).collect()
}

pub fn rationals_from_strings(ss: &[String]) -> Result<Vec<BigRational>> {
    ss.iter().map(|s| parse_rational(s)).collect()
}

pub fn val_to_string(v: &Val) -> String {
    v.to_string()
}

pub fn val_from_string(s: &str) -> Result<Val> {
    if s.trim() == "inf" {
        Ok(Val::Infinite)
    } else {
        Ok(Val::Finite(parse_rational(s)?))
    }
}

pub fn point_to_strings(pt: &AdjointPoint) -> Vec<String> {
    pt.vals().iter().map(val_to_string).collect()
}

pub fn point_from_strings(ss: &[String]) -> Result<AdjointPoint> {
    AdjointPoint::new(ss.iter().map(|s| val_from_string(s)).collect::<Result<_>>()?)
}

fn coeff_to_strings(c: &CoeffElem) -> Vec<String> {
    c.coeffs().iter().map(format_rational).collect()
}

fn coeff_from_strings(field: FieldSpec, ss: &[String]) -> Result<CoeffElem> {
    field.from_coeffs(rationals_from_strings(ss)?)
}

/// Matrix as an array of column vectors of coefficient elements.
pub fn columns_to_json(m: &MatrixF) -> Vec<Vec<Vec<String>>> {
    (0..m.cols())
        .map(|j| m.column(j).iter().map(coeff_to_strings).collect())
        .collect()
}

pub fn columns_from_json(
    field: FieldSpec,
    rows: usize,
    data: &[Vec<Vec<String>>],
) -> Result<MatrixF> {
    let columns = data
        .iter()
        .map(|col| {
            if col.len() != rows {
                return Err(Error::Parse(format!(
                    "column has {} entries, ambient dimension is {rows}",
                    col.len()
                )));
            }
            col.iter().map(|c| coeff_from_strings(field, c)).collect()
        })
        .collect::<Result<Vec<Vec<CoeffElem>>>>()?;
    if columns.is_empty() {
        return Ok(MatrixF::zero(field, rows, 0));
    }
    MatrixF::from_columns(field, columns)
}

/// Filtration type: {d, e, f, embeddings: [[[jump, rank], ...], ...]}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeBody {
    pub d: usize,
    pub e: u32,
    pub f: u32,
    pub embeddings: Vec<Vec<(i64, usize)>>,
}

impl TypeBody {
    pub fn from_type(t: &FiltrationType) -> TypeBody {
        TypeBody {
            d: t.d(),
            e: t.e(),
            f: t.f(),
            embeddings: t.embeddings().to_vec(),
        }
    }

    pub fn to_type(&self) -> Result<FiltrationType> {
        FiltrationType::new(self.d, self.e, self.f, self.embeddings.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockBody {
    pub block: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemisimpleBody {
    pub ss: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeBody {
    Block(BlockBody),
    Semisimple(SemisimpleBody),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceBody {
    pub lambda: Vec<String>,
    pub mode: ModeBody,
}

/// Frobenius data: {p, m, d, f, pieces: [{lambda, mode}], basis_change?}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrobeniusBody {
    pub p: u64,
    pub m: u32,
    pub d: usize,
    pub f: u32,
    pub pieces: Vec<PieceBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_change: Option<Vec<Vec<Vec<String>>>>,
}

impl FrobeniusBody {
    pub fn from_spec(spec: &FrobeniusSpec) -> FrobeniusBody {
        FrobeniusBody {
            p: spec.field().p(),
            m: spec.field().m(),
            d: spec.d(),
            f: spec.f(),
            pieces: spec
                .pieces()
                .iter()
                .map(|p| PieceBody {
                    lambda: coeff_to_strings(&p.eigenvalue),
                    mode: match p.mode {
                        PieceMode::Block(s) => ModeBody::Block(BlockBody { block: s }),
                        PieceMode::Semisimple(n) => {
                            ModeBody::Semisimple(SemisimpleBody { ss: n })
                        }
                    },
                })
                .collect(),
            basis_change: spec.basis_change().map(columns_to_json),
        }
    }

    pub fn to_spec(&self) -> Result<FrobeniusSpec> {
        let field = FieldSpec::new(self.p, self.m)?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(IsotypicPiece {
                    eigenvalue: coeff_from_strings(field, &p.lambda)?,
                    mode: match &p.mode {
                        ModeBody::Block(b) => PieceMode::Block(b.block),
                        ModeBody::Semisimple(s) => PieceMode::Semisimple(s.ss),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let total: usize = pieces.iter().map(|p| p.mode.size()).sum();
        if total != self.d {
            return Err(Error::Validation(format!(
                "piece sizes sum to {total}, document says d = {}",
                self.d
            )));
        }
        let basis_change = self
            .basis_change
            .as_ref()
            .map(|data| columns_from_json(field, self.d, data))
            .transpose()?;
        FrobeniusSpec::new(field, self.f, pieces, basis_change)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepBody {
    pub jump: i64,
    pub basis: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagBody {
    pub steps: Vec<StepBody>,
}

impl FlagBody {
    pub fn from_flag(flag: &Flag) -> FlagBody {
        FlagBody {
            steps: flag
                .steps()
                .iter()
                .map(|(jump, space)| StepBody {
                    jump: *jump,
                    basis: columns_to_json(space.basis()),
                })
                .collect(),
        }
    }

    pub fn to_flag(&self, field: FieldSpec, ambient: usize) -> Result<Flag> {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let m = columns_from_json(field, ambient, &s.basis)?;
                Ok((s.jump, crate::linalg::Subspace::from_columns(&m)))
            })
            .collect::<Result<Vec<_>>>()?;
        Flag::new(steps)
    }
}

/// A filtered isocrystal: Frobenius data, its filtration type, and one flag
/// per embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectBody {
    pub frobenius: FrobeniusBody,
    pub filtration_type: TypeBody,
    pub flags: Vec<FlagBody>,
}

impl ObjectBody {
    pub fn from_object(obj: &FilteredIsocrystal) -> ObjectBody {
        ObjectBody {
            frobenius: FrobeniusBody::from_spec(obj.frob()),
            filtration_type: TypeBody::from_type(obj.filtration_type()),
            flags: obj.flags().iter().map(FlagBody::from_flag).collect(),
        }
    }

    pub fn to_object(&self) -> Result<FilteredIsocrystal> {
        let frob = self.frobenius.to_spec()?;
        let ftype = self.filtration_type.to_type()?;
        let flags = self
            .flags
            .iter()
            .map(|f| f.to_flag(frob.field(), frob.d()))
            .collect::<Result<Vec<_>>>()?;
        FilteredIsocrystal::new(frob, ftype, flags)
    }
}

/// Adjoint point: {vals: ["a/b" | "inf", ...]}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointBody {
    pub vals: Vec<String>,
}

impl PointBody {
    pub fn from_point(pt: &AdjointPoint) -> PointBody {
        PointBody {
            vals: point_to_strings(pt),
        }
    }

    pub fn to_point(&self) -> Result<AdjointPoint> {
        point_from_strings(&self.vals)
    }
}

/// Stratum membership query: a point plus either a filtration type or an
/// explicit coweight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumQuery {
    pub point: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration_type: Option<TypeBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coweight: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuOutput {
    pub coweight: Vec<String>,
    pub generic_degrees: Vec<String>,
    pub thresholds: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonOutput {
    pub point: Vec<String>,
    pub retraction: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumOutput {
    pub point: Vec<String>,
    pub coweight: Vec<String>,
    pub closed: bool,
    pub member: bool,
    pub retraction: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjointOutput {
    pub point: Vec<String>,
    pub retraction: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopePieceOutput {
    pub slope: String,
    pub dim: usize,
    pub basis: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeOutput {
    pub pieces: Vec<SlopePieceOutput>,
}

impl SlopeOutput {
    pub fn from_pieces(pieces: &[SlopePiece]) -> SlopeOutput {
        SlopeOutput {
            pieces: pieces
                .iter()
                .map(|p| SlopePieceOutput {
                    slope: format_rational(&p.slope),
                    dim: p.space.rank(),
                    basis: columns_to_json(p.space.space().basis()),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateOutput {
    pub kind: String,
    pub degree: String,
    pub newton_number: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_dims: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetailRowOutput {
    pub piece_dims: Vec<usize>,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<String>,
    pub newton_number: String,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaOutput {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateOutput>,
    pub detail: Vec<DetailRowOutput>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl WaOutput {
    pub fn from_verdict(v: &WaVerdict, warnings: Vec<String>) -> WaOutput {
        WaOutput {
            status: v.status.to_string(),
            certificate: v.certificate.as_ref().map(|c| match c {
                WaCertificate::DeterminantMismatch {
                    degree,
                    newton_number,
                } => CertificateOutput {
                    kind: "determinant-mismatch".into(),
                    degree: format_rational(degree),
                    newton_number: format_rational(newton_number),
                    basis: None,
                    piece_dims: None,
                },
                WaCertificate::ViolatingSubspace {
                    subspace,
                    degree,
                    newton_number,
                } => CertificateOutput {
                    kind: "violating-subspace".into(),
                    degree: format_rational(degree),
                    newton_number: format_rational(newton_number),
                    basis: Some(columns_to_json(subspace.space().basis())),
                    piece_dims: Some(subspace.piece_dims().to_vec()),
                },
            }),
            detail: v.detail.iter().map(DetailRowOutput::from_row).collect(),
            undecided: v.undecided.clone(),
            warnings,
        }
    }
}

impl DetailRowOutput {
    fn from_row(r: &WaDetailRow) -> DetailRowOutput {
        DetailRowOutput {
            piece_dims: r.piece_dims.clone(),
            rank: r.rank,
            degree_bound: r.degree_bound.as_ref().map(format_rational),
            newton_number: format_rational(&r.newton_number),
            exact: r.exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnStepOutput {
    pub rank: usize,
    pub slope: String,
    pub degree: String,
    pub newton_number: String,
    pub basis: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnOutput {
    pub steps: Vec<HnStepOutput>,
    pub semistable: bool,
}

impl HnOutput {
    pub fn from_steps(steps: &[HnStep]) -> HnOutput {
        HnOutput {
            steps: steps
                .iter()
                .map(|s| HnStepOutput {
                    rank: s.rank,
                    slope: format_rational(&s.slope),
                    degree: format_rational(&s.degree),
                    newton_number: format_rational(&s.newton_number),
                    basis: columns_to_json(s.subspace.space().basis()),
                })
                .collect(),
            semistable: steps.len() == 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructionOutput {
    pub kind: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
}

impl ObstructionOutput {
    pub fn from_obstruction(o: &Obstruction) -> ObstructionOutput {
        match o {
            Obstruction::Determinant { lhs, rhs } => ObstructionOutput {
                kind: "determinant".into(),
                lhs: format_rational(lhs),
                rhs: format_rational(rhs),
                indices: None,
            },
            Obstruction::SubsetSum {
                indices,
                sum,
                bound,
            } => ObstructionOutput {
                kind: "subset-sum".into(),
                lhs: format_rational(sum),
                rhs: format_rational(bound),
                indices: Some(indices.clone()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessOutput {
    pub seeds_tried: u32,
}

/// One sweep cell, as a JSON-lines record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRecordOutput {
    pub cell: String,
    pub profiles: Vec<Vec<(i64, usize)>>,
    pub roots: Vec<String>,
    pub predicted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anomaly: Option<String>,
    pub samples: usize,
    pub elapsed_ms: u64,
}

impl SweepRecordOutput {
    pub fn from_record(r: &SweepRecord) -> SweepRecordOutput {
        let roots = rationals_to_strings(&r.roots);
        let cell = format!(
            "{}|{}",
            serde_json::to_string(&r.profiles).expect("profiles serialize"),
            roots.join(",")
        );
        let (witness, obstruction, anomaly, samples) = match &r.outcome {
            CellOutcome::Witness { seeds_tried } => (
                Some(WitnessOutput {
                    seeds_tried: *seeds_tried,
                }),
                None,
                None,
                *seeds_tried as usize,
            ),
            CellOutcome::Obstruction {
                obstruction,
                samples_inadmissible,
            } => (
                None,
                Some(ObstructionOutput::from_obstruction(obstruction)),
                None,
                *samples_inadmissible,
            ),
            CellOutcome::Anomaly { reason } => (None, None, Some(reason.clone()), 0),
        };
        SweepRecordOutput {
            cell,
            profiles: r.profiles.clone(),
            roots,
            predicted: r.predicted,
            witness,
            obstruction,
            anomaly,
            samples,
            elapsed_ms: r.elapsed_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSummaryOutput {
    pub total: usize,
    pub predicted_true: usize,
    pub predicted_false: usize,
    pub anomalies: usize,
    pub records: Vec<SweepRecordOutput>,
}

impl SweepSummaryOutput {
    pub fn from_summary(s: &SweepSummary) -> SweepSummaryOutput {
        SweepSummaryOutput {
            total: s.total,
            predicted_true: s.predicted_true,
            predicted_false: s.predicted_false,
            anomalies: s.anomalies,
            records: s.records.iter().map(SweepRecordOutput::from_record).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOutput {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseOutput {
    pub name: String,
    pub checks: Vec<CheckOutput>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamplesOutput {
    pub cases: Vec<CaseOutput>,
    pub pass: bool,
}
