//! Quantum realizations that co-depend on a shared classical variable.

use num_complex::Complex64;

use super::general::{born_box, Effects, GeneralRealization};
use super::linalg::CMat;
use super::qubit::{qubit_box_analytic, QubitRealization};
use crate::error::{Error, Result};
use crate::scenario::{mix_boxes, probs_from_correlators, BellScenario, ProbBox};

#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    Qubit(QubitRealization),
    General(GeneralRealization),
}

impl Branch {
    pub fn scenario(&self) -> BellScenario {
        match self {
            Branch::Qubit(_) => BellScenario::CHSH,
            Branch::General(g) => g.scenario(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Branch::Qubit(_) => vec![2, 2],
            Branch::General(g) => g.dims().to_vec(),
        }
    }

    pub fn to_general(&self) -> GeneralRealization {
        match self {
            Branch::Qubit(q) => q.to_general(),
            Branch::General(g) => g.clone(),
        }
    }

    pub fn prob_box(&self) -> Result<ProbBox> {
        match self {
            Branch::Qubit(q) => probs_from_correlators(&qubit_box_analytic(q)?),
            Branch::General(g) => born_box(g),
        }
    }
}

impl From<QubitRealization> for Branch {
    fn from(q: QubitRealization) -> Self {
        Branch::Qubit(q)
    }
}

impl From<GeneralRealization> for Branch {
    fn from(g: GeneralRealization) -> Self {
        Branch::General(g)
    }
}

/// Branch `λ` is used with probability `weights[λ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridRealization {
    weights: Vec<f64>,
    branches: Vec<Branch>,
}

impl HybridRealization {
    pub fn new(weights: Vec<f64>, branches: Vec<Branch>) -> Result<Self> {
        crate::scenario::check_weights(&weights, branches.len())?;
        let scenario = branches[0].scenario();
        let dims = branches[0].dims();
        for b in &branches[1..] {
            if b.scenario() != scenario {
                return Err(Error::ScenarioMismatch(scenario, b.scenario()));
            }
            if b.dims() != dims {
                return Err(Error::DimensionMismatch(format!(
                    "{:?} vs {:?}",
                    dims,
                    b.dims()
                )));
            }
        }
        Ok(Self { weights, branches })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn cardinality(&self) -> usize {
        self.branches.len()
    }

    pub fn scenario(&self) -> BellScenario {
        self.branches[0].scenario()
    }
}

pub fn hybrid_box(h: &HybridRealization) -> Result<ProbBox> {
    let boxes = h
        .branches
        .iter()
        .map(Branch::prob_box)
        .collect::<Result<Vec<_>>>()?;
    mix_boxes(&boxes, &h.weights)
}

/// Embeds the classical variable into every party's Hilbert space: party
/// `p` gets local dimension `d_p · N`, the state becomes the block-diagonal
/// `Σ_i c_i ρ_i ⊗ |i><i| ⊗ |i><i| ⊗ ...` and each effect the block sum of
/// the branch effects. Local index `i·d_p + k` is branch `i`, level `k`.
pub fn direct_sum(h: &HybridRealization) -> Result<GeneralRealization> {
    let branches: Vec<GeneralRealization> = h.branches.iter().map(Branch::to_general).collect();
    let dims = branches[0].dims().to_vec();
    if let Some(b) = branches.iter().find(|b| b.dims() != dims.as_slice()) {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            dims,
            b.dims()
        )));
    }
    let count = branches.len();
    let n = dims.len();
    let new_dims: Vec<usize> = dims.iter().map(|d| d * count).collect();
    let old_total: usize = dims.iter().product();
    let new_total: usize = new_dims.iter().product();

    // composite index of (branch i, old composite index k) in the new space
    let embed = |i: usize, mut k: usize| -> usize {
        let mut local = vec![0; n];
        for p in (0..n).rev() {
            local[p] = i * dims[p] + k % dims[p];
            k /= dims[p];
        }
        local
            .iter()
            .zip(&new_dims)
            .fold(0, |acc, (&l, &d)| acc * d + l)
    };

    let mut state = CMat::zeros(new_total, new_total);
    for (i, (b, &c)) in branches.iter().zip(&h.weights).enumerate() {
        for r in 0..old_total {
            for s in 0..old_total {
                state[(embed(i, r), embed(i, s))] = b.state()[(r, s)] * Complex64::new(c, 0.0);
            }
        }
    }

    let scenario = branches[0].scenario();
    let mut effects: Effects = Vec::with_capacity(n);
    for p in 0..n {
        let d = dims[p];
        let mut per_input = Vec::with_capacity(scenario.n_inputs());
        for x in 0..scenario.n_inputs() {
            let mut povm = Vec::with_capacity(scenario.n_outputs());
            for a in 0..scenario.n_outputs() {
                let mut e = CMat::zeros(d * count, d * count);
                for (i, b) in branches.iter().enumerate() {
                    e.view_mut((i * d, i * d), (d, d))
                        .copy_from(&b.effects()[p][x][a]);
                }
                povm.push(e);
            }
            per_input.push(povm);
        }
        effects.push(per_input);
    }
    GeneralRealization::with_dims(new_dims, state, effects)
}
