//! JSON documents for states and state sets, and the sweep CSV layout.
//!
//! A state is either `{"dim": d, "coeffs": [..]}` or
//! `{"dim": d, "matrix": [[{"re": .., "im": ..}, ..], ..]}`; `dim` is
//! optional when it can be inferred. A set is
//! `{"dim": d, "states": [..], "labels": [..]}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::{vectorize, CMatrix, HermitianBasis, C64};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::search::SweepRecord;
use crate::state::{CoefficientVector, StateSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateBody {
    Coeffs { coeffs: Vec<f64> },
    Matrix { matrix: Vec<Vec<ComplexEntry>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(flatten)]
    pub body: StateBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSetDoc {
    pub dim: usize,
    pub states: Vec<StateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A fixture dump: a valid set document plus named targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureDoc {
    pub name: String,
    pub dim: usize,
    pub states: Vec<StateDoc>,
    pub labels: Option<Vec<String>>,
    /// Endpoint targets keyed `<variant>/k=1` and `k=0`.
    pub targets: BTreeMap<String, StateDoc>,
    pub notes: Vec<String>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

impl StateDoc {
    pub fn from_state(r: &CoefficientVector) -> Self {
        Self {
            dim: Some(r.dim()),
            body: StateBody::Coeffs {
                coeffs: r.coeffs().to_vec(),
            },
        }
    }

    pub fn to_state(&self, dim_hint: Option<usize>) -> Result<CoefficientVector> {
        let declared = match (self.dim, dim_hint) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::DimensionMismatch {
                    expected: b,
                    found: a,
                })
            }
            (a, b) => a.or(b),
        };
        match &self.body {
            StateBody::Coeffs { coeffs } => match declared {
                Some(d) => CoefficientVector::new(d, coeffs.clone()),
                None => CoefficientVector::from_coeffs(coeffs.clone()),
            },
            StateBody::Matrix { matrix } => {
                let d = matrix.len();
                if let Some(row) = matrix.iter().find(|row| row.len() != d) {
                    return Err(Error::Format(format!(
                        "matrix is not square: {d} rows but a row of length {}",
                        row.len()
                    )));
                }
                if let Some(want) = declared {
                    if want != d {
                        return Err(Error::DimensionMismatch {
                            expected: want,
                            found: d,
                        });
                    }
                }
                let basis = HermitianBasis::new(d)?;
                let m = CMatrix::from_fn(d, d, |i, j| C64::new(matrix[i][j].re, matrix[i][j].im));
                vectorize(&m, &basis)
            }
        }
    }
}

impl StateSetDoc {
    pub fn from_set(set: &StateSet) -> Self {
        Self {
            dim: set.dim(),
            states: set.members().iter().map(StateDoc::from_state).collect(),
            labels: set.labels().map(<[String]>::to_vec),
        }
    }

    pub fn to_set(&self) -> Result<StateSet> {
        let members = self
            .states
            .iter()
            .map(|s| s.to_state(Some(self.dim)))
            .collect::<Result<Vec<_>>>()?;
        let set = StateSet::new(members)?;
        match &self.labels {
            Some(l) => set.with_labels(l.clone()),
            None => Ok(set),
        }
    }
}

impl FixtureDoc {
    pub fn from_fixture(f: &Fixture) -> Self {
        let mut targets = BTreeMap::new();
        for (name, fam) in &f.variants {
            targets.insert(format!("{name}/k=1"), StateDoc::from_state(&fam.at_one));
            targets
                .entry(format!("{name}/k=0"))
                .or_insert_with(|| StateDoc::from_state(&fam.at_zero));
        }
        let set = StateSetDoc::from_set(&f.set);
        Self {
            name: f.name.to_string(),
            dim: set.dim,
            states: set.states,
            labels: set.labels,
            targets,
            notes: f.notes.clone(),
        }
    }
}

pub fn parse_state(json: &str) -> Result<CoefficientVector> {
    let doc: StateDoc = serde_json::from_str(json).map_err(json_err)?;
    doc.to_state(None)
}

pub fn parse_state_set(json: &str) -> Result<StateSet> {
    let doc: StateSetDoc = serde_json::from_str(json).map_err(json_err)?;
    doc.to_set()
}

pub fn state_to_json(r: &CoefficientVector) -> String {
    serde_json::to_string_pretty(&StateDoc::from_state(r)).expect("state serializes")
}

pub fn state_set_to_json(set: &StateSet) -> String {
    serde_json::to_string_pretty(&StateSetDoc::from_set(set)).expect("set serializes")
}

/// Formats like C's `%.{sig}g`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SWEEP_HEADER: &str = "k,distance,minimal_n,support,weights";
const SIG: usize = 12;

fn split_list(s: &str) -> Vec<&str> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(';').collect()
    }
}

fn join(xs: impl Iterator<Item = String>) -> String {
    xs.collect::<Vec<_>>().join(";")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Sweep rows as CSV; `support` and `weights` are `;`-joined lists.
pub fn sweep_to_csv(records: &[SweepRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER.split(','))
        .expect("in-memory write");
    for r in records {
        w.write_record([
            fmt_sig(r.k, SIG),
            fmt_sig(r.distance, SIG),
            r.minimal_n.to_string(),
            join(r.support.iter().map(|i| i.to_string())),
            join(r.weights.iter().map(|w| fmt_sig(*w, SIG))),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().collect::<Vec<_>>().join(",") != SWEEP_HEADER {
        return Err(Error::Format(format!("unexpected sweep header {header:?}")));
    }
    let bad = |what: &str, row: usize| Error::Format(format!("bad {what} in sweep row {row}"));
    rdr.records()
        .enumerate()
        .map(|(row, rec)| {
            let rec = rec.map_err(csv_err)?;
            let col = |i: usize| rec.get(i).unwrap_or("");
            Ok(SweepRecord {
                k: col(0).parse().map_err(|_| bad("k", row))?,
                distance: col(1).parse().map_err(|_| bad("distance", row))?,
                minimal_n: col(2).parse().map_err(|_| bad("minimal_n", row))?,
                support: split_list(col(3))
                    .into_iter()
                    .map(|s| s.parse().map_err(|_| bad("support", row)))
                    .collect::<Result<_>>()?,
                weights: split_list(col(4))
                    .into_iter()
                    .map(|s| s.parse().map_err(|_| bad("weights", row)))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting_matches_printf_g() {
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(0.33, 12), "0.33");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(0.0019201, 12), "0.0019201");
        assert_eq!(fmt_sig(1.25e-9, 12), "1.25e-09");
        assert_eq!(fmt_sig(-2.5e-5, 3), "-2.5e-05");
        assert_eq!(fmt_sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(fmt_sig(0.0001, 12), "0.0001");
        assert_eq!(fmt_sig(-0.0, 12), "0");
    }

    #[test]
    fn parses_coefficient_and_matrix_states() {
        let r = parse_state(r#"{"dim": 2, "coeffs": [0.7071067811865476, 0, 0, 0]}"#).unwrap();
        assert_eq!(r.dim(), 2);
        let m = parse_state(
            r#"{"matrix": [[{"re": 0.5, "im": 0}, {"re": 0, "im": 0}],
                           [{"re": 0, "im": 0}, {"re": 0.5, "im": 0}]]}"#,
        )
        .unwrap();
        for (a, b) in m.coeffs().iter().zip(r.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_state("{"), Err(Error::Format(_))));
        assert!(matches!(
            parse_state(r#"{"coeffs": [1, 2, 3]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_state(r#"{"dim": 3, "coeffs": [1, 0, 0, 0]}"#),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            parse_state(r#"{"matrix": [[{"re": 1}], [{"re": 0}]]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_state_set(r#"{"dim": 2, "states": []}"#),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn set_document_roundtrip() {
        let set = crate::fixtures::fixture("example-ii").unwrap().set;
        let back = parse_state_set(&state_set_to_json(&set)).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn fixture_dump_is_a_set_document() {
        let f = crate::fixtures::fixture("example-i").unwrap();
        let json = serde_json::to_string(&FixtureDoc::from_fixture(&f)).unwrap();
        let set = parse_state_set(&json).unwrap();
        assert_eq!(set, f.set);
        let doc: FixtureDoc = serde_json::from_str(&json).unwrap();
        assert!(doc.targets.contains_key("r02^2/k=1"));
        assert!(doc.targets.contains_key("r02^3/k=0"));
    }

    #[test]
    fn csv_roundtrip_and_header_check() {
        let rows = vec![
            SweepRecord {
                k: 0.0,
                distance: 0.0123456789012345,
                minimal_n: 2,
                support: vec![0, 3],
                weights: vec![0.25, 0.75],
            },
            SweepRecord {
                k: 1.0,
                distance: 0.0,
                minimal_n: 1,
                support: vec![4],
                weights: vec![1.0],
            },
        ];
        let csv = sweep_to_csv(&rows);
        assert!(csv.starts_with(
            "k,distance,minimal_n,support,weights\n0,0.0123456789012,2,0;3,0.25;0.75\n"
        ));
        let back = parse_sweep_csv(&csv).unwrap();
        assert_eq!(back[1], rows[1]);
        assert!((back[0].distance - rows[0].distance).abs() < 1e-13);
        assert!(parse_sweep_csv("a,b\n").is_err());
    }
}
