//! JSON interchange formats for boxes and realizations.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{lhv_box, LhvModel};
use crate::error::{Error, Result};
use crate::quantum::{
    born_box, hybrid_box, qubit_box_analytic, Branch, CMat, GeneralRealization, HybridRealization,
    QubitRealization,
};
use crate::scenario::{
    correlators_from_probs, probs_from_correlators, BellScenario, CorrelatorBox, ProbBox,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxFormat {
    /// Full table, row-major over input tuples then output tuples.
    Prob,
    /// `[<A0>, <A1>, <B0>, <B1>, <A0B0>, <A1B0>, <A0B1>, <A1B1>]`, (2,2,2) only.
    Correlator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub scenario: BellScenario,
    pub format: BoxFormat,
    pub data: Vec<f64>,
}

impl BoxSpec {
    pub fn from_prob_box(b: &ProbBox) -> Self {
        Self {
            scenario: b.scenario(),
            format: BoxFormat::Prob,
            data: b.table().to_vec(),
        }
    }

    pub fn from_correlators(b: &CorrelatorBox) -> Self {
        Self {
            scenario: BellScenario::CHSH,
            format: BoxFormat::Correlator,
            data: b.to_array().to_vec(),
        }
    }

    pub fn to_prob_box(&self) -> Result<ProbBox> {
        match self.format {
            BoxFormat::Prob => ProbBox::new(self.scenario, self.data.clone()),
            BoxFormat::Correlator => {
                if !self.scenario.is_chsh() {
                    return Err(Error::WrongScenario(self.scenario));
                }
                probs_from_correlators(&CorrelatorBox::from_slice(&self.data)?)
            }
        }
    }
}

pub fn read_box(path: &Path) -> Result<ProbBox> {
    let text = std::fs::read_to_string(path)?;
    let spec: BoxSpec = serde_json::from_str(&text)?;
    spec.to_prob_box()
}

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn matrix_from_spec(s: &MatrixSpec) -> Result<CMat> {
    let rows = s.len();
    let cols = s.first().map_or(0, Vec::len);
    if s.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidModel("ragged matrix".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        Complex64::new(s[i][j][0], s[i][j][1])
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralSpec {
    pub dims: Vec<usize>,
    pub state: MatrixSpec,
    /// `[party][input][output]`.
    pub effects: Vec<Vec<Vec<MatrixSpec>>>,
}

impl GeneralSpec {
    pub fn from_realization(g: &GeneralRealization) -> Self {
        Self {
            dims: g.dims().to_vec(),
            state: matrix_to_spec(g.state()),
            effects: g
                .effects()
                .iter()
                .map(|party| {
                    party
                        .iter()
                        .map(|povm| povm.iter().map(matrix_to_spec).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_realization(&self) -> Result<GeneralRealization> {
        let effects = self
            .effects
            .iter()
            .map(|party| {
                party
                    .iter()
                    .map(|povm| {
                        povm.iter()
                            .map(matrix_from_spec)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GeneralRealization::with_dims(self.dims.clone(), matrix_from_spec(&self.state)?, effects)
    }
}

/// Anything that produces a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Realization {
    Qubit(QubitRealization),
    General(GeneralSpec),
    Lhv(LhvModel),
    Hybrid {
        weights: Vec<f64>,
        branches: Vec<Realization>,
    },
}

impl Realization {
    pub fn from_hybrid(h: &HybridRealization) -> Self {
        Realization::Hybrid {
            weights: h.weights().to_vec(),
            branches: h
                .branches()
                .iter()
                .map(|b| match b {
                    Branch::Qubit(q) => Realization::Qubit(*q),
                    Branch::General(g) => Realization::General(GeneralSpec::from_realization(g)),
                })
                .collect(),
        }
    }

    pub fn to_hybrid(&self) -> Result<HybridRealization> {
        match self {
            Realization::Hybrid { weights, branches } => {
                let branches = branches
                    .iter()
                    .map(|b| match b {
                        Realization::Qubit(q) => {
                            q.validate()?;
                            Ok(Branch::Qubit(*q))
                        }
                        Realization::General(g) => Ok(Branch::General(g.to_realization()?)),
                        _ => Err(Error::InvalidModel(
                            "hybrid branches must be quantum".into(),
                        )),
                    })
                    .collect::<Result<Vec<_>>>()?;
                HybridRealization::new(weights.clone(), branches)
            }
            _ => Err(Error::InvalidModel("not a hybrid realization".into())),
        }
    }

    /// Evaluates the realization from scratch, validating it on the way.
    pub fn prob_box(&self) -> Result<ProbBox> {
        match self {
            Realization::Qubit(q) => probs_from_correlators(&qubit_box_analytic(q)?),
            Realization::General(g) => born_box(&g.to_realization()?),
            Realization::Lhv(m) => {
                let m = LhvModel::new(
                    m.scenario(),
                    m.lambda_dist().to_vec(),
                    m.responses().to_vec(),
                )?;
                lhv_box(&m)
            }
            Realization::Hybrid { .. } => hybrid_box(&self.to_hybrid()?),
        }
    }

    pub fn correlators(&self) -> Result<CorrelatorBox> {
        correlators_from_probs(&self.prob_box()?)
    }
}

pub fn read_realization(path: &Path) -> Result<Realization> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, BoxLabel};

    #[test]
    fn box_spec_round_trip() {
        let b = probs_from_correlators(&canonical_box(BoxLabel::Tsirelson)).unwrap();
        let json = serde_json::to_string(&BoxSpec::from_prob_box(&b)).unwrap();
        let back: BoxSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_prob_box().unwrap(), b);

        let c = BoxSpec::from_correlators(&canonical_box(BoxLabel::P1to4));
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.starts_with(r#"{"scenario":[2,2,2],"format":"correlator","data":["#));
        let back: BoxSpec = serde_json::from_str(&json).unwrap();
        assert!(
            correlators_from_probs(&back.to_prob_box().unwrap())
                .unwrap()
                .distance(&canonical_box(BoxLabel::P1to4))
                < 1e-15
        );
    }

    #[test]
    fn correlator_format_needs_chsh() {
        let spec = BoxSpec {
            scenario: BellScenario::new(2, 3, 2).unwrap(),
            format: BoxFormat::Correlator,
            data: vec![0.0; 8],
        };
        assert!(spec.to_prob_box().is_err());
    }

    #[test]
    fn realizations_round_trip() {
        let q = QubitRealization::tsirelson();
        let h =
            HybridRealization::new(vec![0.5, 0.5], vec![q.into(), q.to_general().into()]).unwrap();
        for r in [
            Realization::Qubit(q),
            Realization::General(GeneralSpec::from_realization(&q.to_general())),
            Realization::from_hybrid(&h),
        ] {
            let json = serde_json::to_string(&r).unwrap();
            let back: Realization = serde_json::from_str(&json).unwrap();
            let d = back
                .correlators()
                .unwrap()
                .distance(&canonical_box(BoxLabel::Tsirelson));
            assert!(d < 1e-12, "{json}");
        }
    }

    #[test]
    fn invalid_qubit_json_is_rejected() {
        let mut q = QubitRealization::tsirelson();
        q.alice[0].kappa = 0.5;
        let json = serde_json::to_string(&Realization::Qubit(q)).unwrap();
        let back: Realization = serde_json::from_str(&json).unwrap();
        assert!(back.prob_box().is_err());
    }
}
