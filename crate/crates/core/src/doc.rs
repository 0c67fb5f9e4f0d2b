//! JSON documents for states, operator expressions and Hamiltonians.
//!
//! State amplitudes refer to the raw basis vectors (see [`FockVector`]). A
//! term gives its state either as a dense occupation vector `occ` or as an
//! ordered mode list `seq`, which is canonicalized with its fermionic sign.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{QSpaceError, Result};
use crate::fock::{FockSpace, FockVector, MadeState, ModeIndex, Statistics};
use crate::ladder::{Action, LadderOp, OperatorExpr};
use crate::second_quant::{CMatrix, MatrixElements};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsDoc {
    Boson,
    Fermion,
}

impl From<StatisticsDoc> for Statistics {
    fn from(s: StatisticsDoc) -> Self {
        match s {
            StatisticsDoc::Boson => Statistics::Boson,
            StatisticsDoc::Fermion => Statistics::Fermion,
        }
    }
}

impl From<Statistics> for StatisticsDoc {
    fn from(s: Statistics) -> Self {
        match s {
            Statistics::Boson => StatisticsDoc::Boson,
            Statistics::Fermion => StatisticsDoc::Fermion,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateTermDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occ: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<Vec<usize>>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub statistics: StatisticsDoc,
    pub modes: usize,
    pub terms: Vec<StateTermDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionDoc {
    Create,
    Annihilate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderOpDoc {
    pub act: ActionDoc,
    pub mode: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTermDoc {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub ops: Vec<LadderOpDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub statistics: StatisticsDoc,
    pub terms: Vec<OperatorTermDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBodyDoc {
    pub k: usize,
    pub l: usize,
    pub p: usize,
    pub q: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianDoc {
    pub modes: usize,
    pub statistics: StatisticsDoc,
    #[serde(rename = "T")]
    pub t: Vec<Vec<ComplexDoc>>,
    #[serde(rename = "V", default)]
    pub v: Vec<TwoBodyDoc>,
}

/// Parses JSON, mapping syntax and schema errors to a byte offset.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QSpaceError::Json {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

impl StateDoc {
    pub fn into_vector(self) -> Result<FockVector> {
        let space = FockSpace::new(self.statistics.into(), self.modes);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.into_iter().enumerate() {
            let amp = Complex64::new(t.re, t.im);
            match (t.occ, t.seq) {
                (Some(occ), None) => terms.push((space.state_from_dense(&occ)?, amp)),
                (None, Some(seq)) => {
                    let seq: Vec<ModeIndex> = seq.into_iter().map(ModeIndex).collect();
                    if let MadeState::Occupied(state, sign) = space.make_state(&seq)? {
                        terms.push((state, amp * sign.as_f64()));
                    }
                }
                _ => {
                    return Err(QSpaceError::InvalidDocument(format!(
                        "term {i} must give exactly one of \"occ\" or \"seq\""
                    )))
                }
            }
        }
        FockVector::from_terms(space, terms)
    }

    pub fn from_vector(v: &FockVector) -> Self {
        let space = v.space();
        StateDoc {
            statistics: space.stats.into(),
            modes: space.modes,
            terms: v
                .terms()
                .map(|(s, a)| StateTermDoc {
                    occ: Some(s.dense(space.modes)),
                    seq: None,
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

pub fn parse_state(text: &str) -> Result<FockVector> {
    parse_json::<StateDoc>(text)?.into_vector()
}

pub fn state_to_json(v: &FockVector) -> String {
    serde_json::to_string(&StateDoc::from_vector(v)).expect("state serializes")
}

impl OperatorDoc {
    pub fn into_expr(self) -> (Statistics, OperatorExpr) {
        let mut e = OperatorExpr::zero();
        for t in self.terms {
            let factors = t
                .ops
                .iter()
                .map(|o| LadderOp {
                    action: match o.act {
                        ActionDoc::Create => Action::Create,
                        ActionDoc::Annihilate => Action::Annihilate,
                    },
                    mode: ModeIndex(o.mode),
                })
                .collect();
            e.push(Complex64::new(t.re, t.im), factors);
        }
        (self.statistics.into(), e)
    }

    pub fn from_expr(stats: Statistics, e: &OperatorExpr) -> Self {
        OperatorDoc {
            statistics: stats.into(),
            terms: e
                .terms
                .iter()
                .map(|t| OperatorTermDoc {
                    re: t.coeff.re,
                    im: t.coeff.im,
                    ops: t
                        .factors
                        .iter()
                        .map(|f| LadderOpDoc {
                            act: match f.action {
                                Action::Create => ActionDoc::Create,
                                Action::Annihilate => ActionDoc::Annihilate,
                            },
                            mode: f.mode.0,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_operator(text: &str) -> Result<(Statistics, OperatorExpr)> {
    Ok(parse_json::<OperatorDoc>(text)?.into_expr())
}

impl HamiltonianDoc {
    pub fn into_matrix_elements(self) -> Result<(Statistics, MatrixElements)> {
        let m = self.modes;
        if self.t.len() != m {
            return Err(QSpaceError::InvalidDocument(format!(
                "T has {} rows, expected {m}",
                self.t.len()
            )));
        }
        let mut t = CMatrix::zeros(m, m);
        for (k, row) in self.t.iter().enumerate() {
            if row.len() != m {
                return Err(QSpaceError::InvalidDocument(format!(
                    "T row {k} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (l, x) in row.iter().enumerate() {
                t[(k, l)] = Complex64::new(x.re, x.im);
            }
        }
        let mut v = BTreeMap::new();
        for e in &self.v {
            let key = (e.k, e.l, e.p, e.q);
            if v.insert(key, Complex64::new(e.re, e.im)).is_some() {
                return Err(QSpaceError::InvalidDocument(format!(
                    "duplicate V entry {key:?}"
                )));
            }
        }
        Ok((self.statistics.into(), MatrixElements::new(t, v)?))
    }

    pub fn from_matrix_elements(stats: Statistics, me: &MatrixElements) -> Self {
        let m = me.modes();
        HamiltonianDoc {
            modes: m,
            statistics: stats.into(),
            t: (0..m)
                .map(|k| {
                    (0..m)
                        .map(|l| {
                            let x = me.t(k, l);
                            ComplexDoc { re: x.re, im: x.im }
                        })
                        .collect()
                })
                .collect(),
            v: me
                .two_body()
                .iter()
                .map(|(&(k, l, p, q), x)| TwoBodyDoc {
                    k,
                    l,
                    p,
                    q,
                    re: x.re,
                    im: x.im,
                })
                .collect(),
        }
    }
}

pub fn parse_hamiltonian(text: &str) -> Result<(Statistics, MatrixElements)> {
    parse_json::<HamiltonianDoc>(text)?.into_matrix_elements()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::modes;
    use proptest::prelude::*;

    #[test]
    fn state_document_forms() {
        let v = parse_state(
            r#"{"statistics":"boson","modes":3,"terms":[{"occ":[0,2,1],"re":1.5,"im":-0.5}]}"#,
        )
        .unwrap();
        let s = FockSpace::bosonic(3).state_from_dense(&[0, 2, 1]).unwrap();
        assert_eq!(v.amplitude(&s), Complex64::new(1.5, -0.5));

        let f21 =
            parse_state(r#"{"statistics":"fermion","modes":3,"terms":[{"seq":[2,1],"re":1}]}"#)
                .unwrap();
        assert_eq!(
            f21,
            FockSpace::fermionic(3)
                .product_state(&modes(&[2, 1]))
                .unwrap()
        );
    }

    #[test]
    fn fermion_document_rejects_double_occupation() {
        let err =
            parse_state(r#"{"statistics":"fermion","modes":2,"terms":[{"occ":[2,0],"re":1}]}"#)
                .unwrap_err();
        assert!(matches!(
            err,
            QSpaceError::PauliViolation { mode: 0, count: 2 }
        ));
    }

    #[test]
    fn occ_length_must_match_modes() {
        let err = parse_state(r#"{"statistics":"boson","modes":3,"terms":[{"occ":[1],"re":1}]}"#)
            .unwrap_err();
        assert!(matches!(err, QSpaceError::DimensionMismatch { .. }));
    }

    #[test]
    fn malformed_json_reports_byte_offset() {
        let text = "{\"statistics\":\"boson\",\n \"modes\": 2,\n \"terms\": [ ,]}";
        match parse_state(text).unwrap_err() {
            QSpaceError::Json { offset, .. } => assert_eq!(&text[offset..offset + 1], ","),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn operator_document() {
        let (stats, e) = parse_operator(
            r#"{"statistics":"boson","terms":[{"re":2,"im":0,"ops":[{"act":"create","mode":0},{"act":"annihilate","mode":1}]}]}"#,
        )
        .unwrap();
        assert_eq!(stats, Statistics::Boson);
        assert_eq!(
            e,
            OperatorExpr::term(
                Complex64::new(2.0, 0.0),
                vec![LadderOp::create(0), LadderOp::annihilate(1)]
            )
        );
        let back = OperatorDoc::from_expr(stats, &e);
        assert_eq!(back.into_expr(), (stats, e));
    }

    #[test]
    fn hamiltonian_document() {
        let text = r#"{"modes":2,"statistics":"boson",
            "T":[[{"re":0,"im":0},{"re":-1,"im":0}],[{"re":-1,"im":0},{"re":0,"im":0}]],
            "V":[{"k":0,"l":0,"p":0,"q":0,"re":4,"im":0}]}"#;
        let (stats, me) = parse_hamiltonian(text).unwrap();
        assert_eq!(stats, Statistics::Boson);
        assert_eq!(me.t(0, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(me.v(0, 0, 0, 0), Complex64::new(4.0, 0.0));

        let bad = r#"{"modes":2,"statistics":"boson",
            "T":[[{"re":0},{"re":1}],[{"re":2},{"re":0}]]}"#;
        assert!(matches!(
            parse_hamiltonian(bad),
            Err(QSpaceError::NonHermitian { .. })
        ));
    }

    proptest! {
        #[test]
        fn state_json_round_trip(
            terms in proptest::collection::vec((proptest::collection::vec(0u32..3, 3), -2.0f64..2.0, -2.0f64..2.0), 0..5),
            fermion in any::<bool>(),
        ) {
            let stats = if fermion { Statistics::Fermion } else { Statistics::Boson };
            let space = FockSpace::new(stats, 3);
            let v = FockVector::from_terms(
                space,
                terms.iter().filter_map(|(occ, re, im)| {
                    let occ: Vec<u32> = if fermion { occ.iter().map(|&n| n.min(1)).collect() } else { occ.clone() };
                    space.state_from_dense(&occ).ok().map(|s| (s, Complex64::new(*re, *im)))
                }),
            ).unwrap();
            prop_assert_eq!(parse_state(&state_to_json(&v)).unwrap(), v);
        }
    }
}
