//! Classical boxes built from limited shared randomness, the local
//! polytope, and counting bounds on the randomness needed to span it.

pub mod export;
mod lp;
mod projection;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{decode, ns_dimension, BellScenario, ProbBox};

pub use lp::{
    greedy_reduce, local_critical_weight, local_membership_lp, BellWitness, LocalMembership, LP_TOL,
};
pub use projection::{local_distance, nearest_in_hull};

/// Default limit on `v^(mn)` for vertex enumeration.
pub const DEFAULT_VERTEX_CAP: u128 = 1_000_000;

/// `p[a...|x...] = Σ_λ p[λ] Π_party p[a|x,λ]`.
///
/// `responses[party][λ][x][a]` holds `p[a|x,λ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    scenario: BellScenario,
    lambda_dist: Vec<f64>,
    responses: Vec<Vec<Vec<Vec<f64>>>>,
}

const MODEL_TOL: f64 = 1e-12;

impl LhvModel {
    pub fn new(
        scenario: BellScenario,
        lambda_dist: Vec<f64>,
        responses: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> Result<Self> {
        let card = lambda_dist.len();
        if card == 0 {
            return Err(Error::InvalidModel("empty hidden-variable alphabet".into()));
        }
        if lambda_dist
            .iter()
            .any(|p| !p.is_finite() || *p < -MODEL_TOL)
        {
            return Err(Error::InvalidModel(
                "negative hidden-variable probability".into(),
            ));
        }
        let total: f64 = lambda_dist.iter().sum();
        if (total - 1.0).abs() > MODEL_TOL {
            return Err(Error::InvalidModel(format!("p[λ] sums to {total}")));
        }
        if responses.len() != scenario.n_parties() {
            return Err(Error::InvalidModel(format!(
                "{} response tables for {} parties",
                responses.len(),
                scenario.n_parties()
            )));
        }
        for (p, per_party) in responses.iter().enumerate() {
            if per_party.len() != card {
                return Err(Error::InvalidModel(format!(
                    "party {p}: wrong number of λ values"
                )));
            }
            for per_lambda in per_party {
                if per_lambda.len() != scenario.n_inputs() {
                    return Err(Error::InvalidModel(format!(
                        "party {p}: wrong number of inputs"
                    )));
                }
                for col in per_lambda {
                    if col.len() != scenario.n_outputs()
                        || col.iter().any(|q| !q.is_finite() || *q < -MODEL_TOL)
                        || (col.iter().sum::<f64>() - 1.0).abs() > MODEL_TOL
                    {
                        return Err(Error::InvalidModel(format!(
                            "party {p}: response {col:?} is not a distribution"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            scenario,
            lambda_dist,
            responses,
        })
    }

    pub fn scenario(&self) -> BellScenario {
        self.scenario
    }

    pub fn cardinality(&self) -> usize {
        self.lambda_dist.len()
    }

    pub fn lambda_dist(&self) -> &[f64] {
        &self.lambda_dist
    }

    pub fn responses(&self) -> &[Vec<Vec<Vec<f64>>>] {
        &self.responses
    }
}

pub(crate) fn lhv_table(
    scenario: BellScenario,
    lambda_dist: &[f64],
    responses: &[Vec<Vec<Vec<f64>>>],
) -> Vec<f64> {
    let n = scenario.n_parties();
    let mut table = vec![0.0; scenario.table_len()];
    for xi in 0..scenario.input_tuples() {
        let xs = decode(xi, scenario.n_inputs(), n);
        for oi in 0..scenario.output_tuples() {
            let os = decode(oi, scenario.n_outputs(), n);
            let mut p = 0.0;
            for (l, pl) in lambda_dist.iter().enumerate() {
                let mut term = *pl;
                for q in 0..n {
                    term *= responses[q][l][xs[q]][os[q]];
                }
                p += term;
            }
            table[xi * scenario.output_tuples() + oi] = p;
        }
    }
    table
}

pub fn lhv_box(model: &LhvModel) -> Result<ProbBox> {
    let table = lhv_table(model.scenario, &model.lambda_dist, &model.responses);
    ProbBox::new(model.scenario, table).map_err(|e| Error::InvalidModel(e.to_string()))
}

/// One deterministic response function per party, encoded as an integer in
/// `[0, v^m)` whose base-`v` digit `x` (least significant first) is the
/// output for input `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    scenario: BellScenario,
    codes: Vec<u64>,
}

impl DeterministicStrategy {
    pub fn new(scenario: BellScenario, codes: Vec<u64>) -> Result<Self> {
        let per_party = (scenario.n_outputs() as u128).pow(scenario.n_inputs() as u32);
        if codes.len() != scenario.n_parties() || codes.iter().any(|&c| c as u128 >= per_party) {
            return Err(Error::InvalidModel(format!("bad strategy codes {codes:?}")));
        }
        Ok(Self { scenario, codes })
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn output(&self, party: usize, input: usize) -> usize {
        let v = self.scenario.n_outputs() as u64;
        ((self.codes[party] / v.pow(input as u32)) % v) as usize
    }

    pub fn prob_box(&self) -> ProbBox {
        let s = self.scenario;
        let n = s.n_parties();
        let mut table = vec![0.0; s.table_len()];
        for xi in 0..s.input_tuples() {
            let xs = decode(xi, s.n_inputs(), n);
            let outs: Vec<usize> = (0..n).map(|p| self.output(p, xs[p])).collect();
            table[s.index(&xs, &outs)] = 1.0;
        }
        ProbBox::new(s, table).expect("deterministic boxes are valid")
    }
}

/// All deterministic product boxes of a scenario, deduplicated.
pub fn enumerate_local_vertices(scenario: &BellScenario, cap: u128) -> Result<Vec<ProbBox>> {
    Ok(enumerate_strategies(scenario, cap)?
        .into_iter()
        .map(|(_, b)| b)
        .collect())
}

pub fn enumerate_strategies(
    scenario: &BellScenario,
    cap: u128,
) -> Result<Vec<(DeterministicStrategy, ProbBox)>> {
    let per_party = saturating_pow(scenario.n_outputs() as u128, scenario.n_inputs() as u32);
    let count = saturating_pow(per_party, scenario.n_parties() as u32);
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    let n = scenario.n_parties();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..count as usize {
        let codes: Vec<u64> = decode(k, per_party as usize, n)
            .into_iter()
            .map(|c| c as u64)
            .collect();
        let strategy = DeterministicStrategy::new(*scenario, codes)?;
        let b = strategy.prob_box();
        let key: Vec<i64> = b
            .table()
            .iter()
            .map(|p| (p * 1e12).round() as i64)
            .collect();
        if seen.insert(key) {
            out.push((strategy, b));
        }
    }
    Ok(out)
}

pub(crate) fn saturating_pow(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn factorial(n: u128) -> u128 {
    (1..=n).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Stirling numbers of the second kind up to `max_k`, `table[k][j]`.
pub fn stirling2_table(max_k: usize) -> Vec<Vec<u128>> {
    let mut s = vec![vec![0u128; max_k + 1]; max_k + 1];
    s[0][0] = 1;
    for k in 1..=max_k {
        for j in 1..=k {
            s[k][j] = (j as u128)
                .saturating_mul(s[k - 1][j])
                .saturating_add(s[k - 1][j - 1]);
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaStarBounds {
    pub lower: u128,
    pub upper: u128,
    /// `v^(m(n-1))`: all but one party respond deterministically.
    pub deterministic_parties_bound: u128,
    /// `(m(v-1)+1)^n - 1`: the statistical dimension.
    pub dimension_bound: u128,
    /// `(m(v-1)+1)^(n-1)`: the lower bound before the Stirling correction.
    pub loose_lower: u128,
}

/// Bounds on the shared randomness needed to span the local polytope.
pub fn lambda_star_bounds(scenario: &BellScenario) -> LambdaStarBounds {
    let n = scenario.n_parties() as u128;
    let m = scenario.n_inputs() as u128;
    let v = scenario.n_outputs() as u128;
    let deterministic_parties_bound = saturating_pow(v, (m * (n - 1)) as u32);
    let dimension_bound = ns_dimension(scenario);
    let loose_lower = saturating_pow(m * (v - 1) + 1, (n - 1) as u32);

    let stirling = stirling2_table(n as usize);
    let mut lower = loose_lower;
    for k in 2..=n {
        for j in 2..=k {
            let term = binomial(n - 1, k - 1)
                .saturating_mul(binomial(m, j))
                .saturating_mul(stirling[k as usize][j as usize])
                .saturating_mul(factorial(j - 1))
                .saturating_mul(saturating_pow(v - 1, k as u32));
            lower = lower.saturating_add(term);
        }
    }
    LambdaStarBounds {
        lower,
        upper: deterministic_parties_bound.min(dimension_bound),
        deterministic_parties_bound,
        dimension_bound,
        loose_lower,
    }
}

/// Closed form of the lower bound for two parties:
/// `m(m-1)(v-1)^2/2 + m(v-1) + 1`.
pub fn bipartite_lambda_star_lower(m: u128, v: u128) -> u128 {
    m * (m - 1) * (v - 1) * (v - 1) / 2 + m * (v - 1) + 1
}

/// Shared randomness sufficient to simulate any separable state of local
/// dimension `d` shared by `n` parties: `d^n`.
pub fn separable_lambda_bound(d: u128, n: u32) -> u128 {
    saturating_pow(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, correlators_from_probs, is_product_box, BoxLabel};

    fn chsh() -> BellScenario {
        BellScenario::CHSH
    }

    fn det(bit: usize) -> Vec<f64> {
        if bit == 1 {
            vec![0.0, 1.0]
        } else {
            vec![1.0, 0.0]
        }
    }

    #[test]
    fn single_deterministic_lambda_is_product() {
        let resp = vec![vec![vec![det(1), det(1)]], vec![vec![det(1), det(1)]]];
        let m = LhvModel::new(chsh(), vec![1.0], resp).unwrap();
        let b = correlators_from_probs(&lhv_box(&m).unwrap()).unwrap();
        assert_eq!(b, canonical_box(BoxLabel::P1));
    }

    #[test]
    fn perfectly_correlated_box() {
        for v in 2..=4 {
            let s = BellScenario::new(2, 2, v).unwrap();
            let resp_party: Vec<Vec<Vec<f64>>> = (0..v)
                .map(|l| {
                    let col: Vec<f64> = (0..v).map(|a| if a == l { 1.0 } else { 0.0 }).collect();
                    vec![col.clone(), col]
                })
                .collect();
            let m = LhvModel::new(
                s,
                vec![1.0 / v as f64; v],
                vec![resp_party.clone(), resp_party],
            )
            .unwrap();
            let b = lhv_box(&m).unwrap();
            for x in 0..2 {
                for y in 0..2 {
                    for l in 0..v {
                        assert!((b.prob(&[x, y], &[l, l]) - 1.0 / v as f64).abs() < 1e-15);
                    }
                }
            }
            assert!(!is_product_box(&b, 1e-9));
        }
    }

    #[test]
    fn two_coin_model_gives_p14() {
        // λ = (coin0, coin1); input x reads coin x for both parties.
        let mut per_party = Vec::new();
        for l in 0..4 {
            per_party.push(vec![det(l & 1), det(l >> 1)]);
        }
        let m = LhvModel::new(chsh(), vec![0.25; 4], vec![per_party.clone(), per_party]).unwrap();
        let b = correlators_from_probs(&lhv_box(&m).unwrap()).unwrap();
        assert!(b.distance(&canonical_box(BoxLabel::P1to4)) < 1e-15);
    }

    #[test]
    fn invalid_models() {
        let resp = vec![vec![vec![det(1), det(1)]], vec![vec![det(1), det(1)]]];
        assert!(LhvModel::new(chsh(), vec![0.9], resp.clone()).is_err());
        let bad = vec![
            vec![vec![vec![0.5, 0.6], det(1)]],
            vec![vec![det(1), det(1)]],
        ];
        assert!(LhvModel::new(chsh(), vec![1.0], bad).is_err());
    }

    #[test]
    fn vertex_counts() {
        // Independent count: v^m strategies per party, product over parties.
        for (n, m, v, expected) in [(2, 2, 2, 16usize), (1, 1, 2, 2), (2, 2, 3, 81)] {
            let s = BellScenario::new(n, m, v).unwrap();
            let per_party = v.pow(m as u32);
            assert_eq!(per_party.pow(n as u32), expected);
            let verts = enumerate_local_vertices(&s, DEFAULT_VERTEX_CAP).unwrap();
            assert_eq!(verts.len(), expected);
            assert!(verts.iter().all(|b| is_product_box(b, 1e-12)));
        }
    }

    #[test]
    fn vertex_cap() {
        let s = BellScenario::new(3, 4, 4).unwrap();
        assert!(matches!(
            enumerate_local_vertices(&s, DEFAULT_VERTEX_CAP),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn lambda_star_values() {
        let b = lambda_star_bounds(&chsh());
        assert_eq!((b.lower, b.upper), (4, 4));
        assert_eq!(
            lambda_star_bounds(&BellScenario::new(2, 3, 2).unwrap()).lower,
            7
        );
        // S2[2,2] = 1, S2[3,2] = 3: 3^2 + C(2,1)C(2,2)·1·1 + C(2,2)C(2,2)·3·1 = 14
        let b = lambda_star_bounds(&BellScenario::new(3, 2, 2).unwrap());
        assert_eq!((b.lower, b.upper), (14, 16));
        assert_eq!(b.deterministic_parties_bound, 16);
        assert_eq!(b.dimension_bound, 26);
    }

    #[test]
    fn bipartite_closed_form_agrees() {
        for m in 1..=6u128 {
            for v in 2..=6u128 {
                let s = BellScenario::new(2, m as usize, v as usize).unwrap();
                assert_eq!(
                    lambda_star_bounds(&s).lower,
                    bipartite_lambda_star_lower(m, v),
                    "m={m} v={v}"
                );
            }
        }
    }

    #[test]
    fn stirling_values() {
        let s = stirling2_table(5);
        assert_eq!(s[2][2], 1);
        assert_eq!(s[3][2], 3);
        assert_eq!(s[4][2], 7);
        assert_eq!(s[5][3], 25);
    }

    #[test]
    fn separable_bound() {
        assert_eq!(separable_lambda_bound(2, 2), 4);
        assert_eq!(separable_lambda_bound(3, 2), 9);
        assert_eq!(separable_lambda_bound(7, 1), 7);
    }
}
