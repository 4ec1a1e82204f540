//! Unconstrained parameterizations of each set, as least-squares problems
//! against a target in coordinate space.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::classical::{lhv_table, LhvModel};
use crate::error::Result;
use crate::optim::LeastSquares;
use crate::quantum::general::born_table_pure;
use crate::quantum::linalg::inv_sqrt_psd;
use crate::quantum::{
    analytic_correlators, BinaryMeasurement, Branch, CMat, Effects, GeneralRealization,
    HybridRealization, QubitRealization, SchmidtState,
};
use crate::scenario::{BellScenario, ProbBox};
use crate::schema::{GeneralSpec, Realization};

pub(crate) trait Chart: LeastSquares + Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    fn realization(&self, x: &[f64]) -> Result<Realization>;
}

/// `y_i² / Σ y²`, uniform when every `y` vanishes.
pub(crate) fn squared_simplex(y: &[f64]) -> Vec<f64> {
    let total: f64 = y.iter().map(|v| v * v).sum();
    if total <= 0.0 || !total.is_finite() {
        return vec![1.0 / y.len() as f64; y.len()];
    }
    y.iter().map(|v| v * v / total).collect()
}

pub(crate) fn qubit_dim(pvm: bool) -> usize {
    if pvm {
        9
    } else {
        17
    }
}

/// Raw Schmidt angle and `[κ, η, θ, φ]` rows. POVM coordinates are
/// `(s, r, θ, φ)` with `η = sin² s` and `κ = sin r · (1 - η)`, so the
/// POVM conditions hold for every real input.
pub(crate) fn decode_qubit(x: &[f64], pvm: bool) -> (f64, [[f64; 4]; 4]) {
    let mut m = [[0.0; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        *row = if pvm {
            [0.0, 1.0, x[1 + 2 * k], x[2 + 2 * k]]
        } else {
            let eta = x[1 + 4 * k].sin().powi(2);
            let kappa = x[2 + 4 * k].sin() * (1.0 - eta);
            [kappa, eta, x[3 + 4 * k], x[4 + 4 * k]]
        };
    }
    (x[0], m)
}

pub(crate) fn qubit_from_raw(x: &[f64], pvm: bool) -> Result<QubitRealization> {
    let (alpha, mut m) = decode_qubit(x, pvm);
    // cos(α/2)|00> + sin(α/2)|11> is unchanged up to sign by α → α + 2π;
    // α → -α equals a σ_Z on Bob, i.e. φ_B → φ_B + π.
    let mut a = alpha.rem_euclid(TAU);
    if a > PI {
        a = TAU - a;
        m[2][3] += PI;
        m[3][3] += PI;
    }
    let bm = |r: [f64; 4]| BinaryMeasurement::new(r[0], r[1], r[2], r[3]);
    QubitRealization::new(
        SchmidtState::new(a.min(PI))?,
        [bm(m[0]), bm(m[1])],
        [bm(m[2]), bm(m[3])],
    )
}

fn sample_qubit(rng: &mut ChaCha8Rng, pvm: bool, out: &mut Vec<f64>) {
    out.push(rng.gen_range(0.0..PI));
    for _ in 0..4 {
        if !pvm {
            out.push(rng.gen_range(0.0..FRAC_PI_2));
            out.push(rng.gen_range(-FRAC_PI_2..FRAC_PI_2));
        }
        out.push(rng.gen_range(0.0..PI));
        out.push(rng.gen_range(0.0..TAU));
    }
}

pub(crate) struct QubitChart {
    pub target: [f64; 8],
    pub pvm: bool,
}

impl LeastSquares for QubitChart {
    fn n_params(&self) -> usize {
        qubit_dim(self.pvm)
    }
    fn n_residuals(&self) -> usize {
        8
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let (alpha, m) = decode_qubit(x, self.pvm);
        let c = analytic_correlators(alpha, &m);
        for i in 0..8 {
            out[i] = c[i] - self.target[i];
        }
    }
}

impl Chart for QubitChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n_params());
        sample_qubit(rng, self.pvm, &mut x);
        x
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        Ok(Realization::Qubit(qubit_from_raw(x, self.pvm)?))
    }
}

/// Maximizes CHSH by driving the single residual `4 - S` down.
pub(crate) struct ChshChart {
    pub pvm: bool,
}

pub(crate) fn chsh_of(c: &[f64; 8]) -> f64 {
    c[4] + c[5] + c[6] - c[7]
}

impl LeastSquares for ChshChart {
    fn n_params(&self) -> usize {
        qubit_dim(self.pvm)
    }
    fn n_residuals(&self) -> usize {
        1
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let (alpha, m) = decode_qubit(x, self.pvm);
        out[0] = 4.0 - chsh_of(&analytic_correlators(alpha, &m));
    }
}

impl Chart for ChshChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n_params());
        sample_qubit(rng, self.pvm, &mut x);
        x
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        Ok(Realization::Qubit(qubit_from_raw(x, self.pvm)?))
    }
}

/// `cardinality` qubit branches mixed with squared-simplex weights.
pub(crate) struct HybridQubitChart {
    pub target: [f64; 8],
    pub cardinality: usize,
    pub pvm: bool,
}

impl LeastSquares for HybridQubitChart {
    fn n_params(&self) -> usize {
        self.cardinality * (1 + qubit_dim(self.pvm))
    }
    fn n_residuals(&self) -> usize {
        8
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let n = self.cardinality;
        let w = squared_simplex(&x[..n]);
        let dim = qubit_dim(self.pvm);
        let mut acc = [0.0; 8];
        for (i, wi) in w.iter().enumerate() {
            let (alpha, m) = decode_qubit(&x[n + i * dim..n + (i + 1) * dim], self.pvm);
            let c = analytic_correlators(alpha, &m);
            for k in 0..8 {
                acc[k] += wi * c[k];
            }
        }
        for k in 0..8 {
            out[k] = acc[k] - self.target[k];
        }
    }
}

impl Chart for HybridQubitChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.cardinality)
            .map(|_| rng.gen_range(0.2..1.0))
            .collect();
        for _ in 0..self.cardinality {
            sample_qubit(rng, self.pvm, &mut x);
        }
        x
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        let n = self.cardinality;
        let dim = qubit_dim(self.pvm);
        let branches = (0..n)
            .map(|i| {
                qubit_from_raw(&x[n + i * dim..n + (i + 1) * dim], self.pvm).map(Branch::Qubit)
            })
            .collect::<Result<Vec<_>>>()?;
        let h = HybridRealization::new(squared_simplex(&x[..n]), branches)?;
        Ok(Realization::from_hybrid(&h))
    }
}

/// Binary-output, two-party, two-input models in bias form:
/// `<A_x>_λ = sin u`, correlators factorize per `λ`.
pub(crate) struct ChshLhvChart {
    pub target: [f64; 8],
    pub cardinality: usize,
}

impl ChshLhvChart {
    fn biases(&self, x: &[f64]) -> (Vec<f64>, Vec<[f64; 4]>) {
        let n = self.cardinality;
        let w = squared_simplex(&x[..n]);
        let b = (0..n)
            .map(|l| std::array::from_fn(|k| x[n + 4 * l + k].sin()))
            .collect();
        (w, b)
    }
}

impl LeastSquares for ChshLhvChart {
    fn n_params(&self) -> usize {
        5 * self.cardinality
    }
    fn n_residuals(&self) -> usize {
        8
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let (w, biases) = self.biases(x);
        let mut acc = [0.0; 8];
        for (wl, b) in w.iter().zip(&biases) {
            for k in 0..4 {
                acc[k] += wl * b[k];
            }
            for xa in 0..2 {
                for yb in 0..2 {
                    acc[4 + xa + 2 * yb] += wl * b[xa] * b[2 + yb];
                }
            }
        }
        for k in 0..8 {
            out[k] = acc[k] - self.target[k];
        }
    }
}

impl Chart for ChshLhvChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.cardinality)
            .map(|_| rng.gen_range(0.2..1.0))
            .collect();
        for _ in 0..4 * self.cardinality {
            x.push(rng.gen_range(-PI..PI));
        }
        x
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        let (w, biases) = self.biases(x);
        let col = |bias: f64| {
            let p1 = ((1.0 + bias) / 2.0).clamp(0.0, 1.0);
            vec![1.0 - p1, p1]
        };
        let party = |offset: usize| -> Vec<Vec<Vec<f64>>> {
            biases
                .iter()
                .map(|b| vec![col(b[offset]), col(b[offset + 1])])
                .collect()
        };
        let model = LhvModel::new(BellScenario::CHSH, w, vec![party(0), party(2)])?;
        Ok(Realization::Lhv(model))
    }
}

/// Any scenario: responses `p[a|x,λ]` on squared simplices.
pub(crate) struct LhvChart {
    pub scenario: BellScenario,
    pub target: Vec<f64>,
    pub cardinality: usize,
}

impl LhvChart {
    fn model_parts(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<Vec<Vec<f64>>>>) {
        let s = self.scenario;
        let (n, m, v) = (s.n_parties(), s.n_inputs(), s.n_outputs());
        let card = self.cardinality;
        let w = squared_simplex(&x[..card]);
        let mut off = card;
        let mut responses = Vec::with_capacity(n);
        for _ in 0..n {
            let mut per_lambda = Vec::with_capacity(card);
            for _ in 0..card {
                let mut per_input = Vec::with_capacity(m);
                for _ in 0..m {
                    per_input.push(squared_simplex(&x[off..off + v]));
                    off += v;
                }
                per_lambda.push(per_input);
            }
            responses.push(per_lambda);
        }
        (w, responses)
    }
}

impl LeastSquares for LhvChart {
    fn n_params(&self) -> usize {
        let s = self.scenario;
        self.cardinality * (1 + s.n_parties() * s.n_inputs() * s.n_outputs())
    }
    fn n_residuals(&self) -> usize {
        self.target.len()
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let (w, responses) = self.model_parts(x);
        let table = lhv_table(self.scenario, &w, &responses);
        let coords = ProbBox::new_unchecked(self.scenario, table)
            .expect("table length fixed by scenario")
            .coordinates();
        for (o, (c, t)) in out.iter_mut().zip(coords.iter().zip(&self.target)) {
            *o = c - t;
        }
    }
}

impl Chart for LhvChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.n_params())
            .map(|_| rng.gen_range(0.05..1.0))
            .collect()
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        let (w, responses) = self.model_parts(x);
        Ok(Realization::Lhv(LhvModel::new(
            self.scenario,
            w,
            responses,
        )?))
    }
}

/// Pure states on `(C^d)^{⊗n}` with POVMs `E_a = S^{-1/2} M_a† M_a S^{-1/2}`,
/// `S = Σ_a M_a† M_a`, mixed over `cardinality` branches.
pub(crate) struct GeneralChart {
    pub scenario: BellScenario,
    pub d: usize,
    pub cardinality: usize,
    pub target: Vec<f64>,
}

impl GeneralChart {
    fn total_dim(&self) -> usize {
        self.d.pow(self.scenario.n_parties() as u32)
    }

    fn branch_len(&self) -> usize {
        let s = self.scenario;
        2 * self.total_dim() + s.n_parties() * s.n_inputs() * s.n_outputs() * 2 * self.d * self.d
    }

    fn branch(&self, x: &[f64]) -> (Vec<Complex64>, Effects) {
        let s = self.scenario;
        let d = self.d;
        let total = self.total_dim();
        let mut psi: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new(x[2 * i], x[2 * i + 1]))
            .collect();
        let norm = psi
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            .max(1e-300);
        psi.iter_mut().for_each(|z| *z /= norm);
        let mut off = 2 * total;
        let mut effects: Effects = Vec::with_capacity(s.n_parties());
        for _ in 0..s.n_parties() {
            let mut per_input = Vec::with_capacity(s.n_inputs());
            for _ in 0..s.n_inputs() {
                let mut grams = Vec::with_capacity(s.n_outputs());
                for _ in 0..s.n_outputs() {
                    let m = CMat::from_fn(d, d, |i, j| {
                        let k = off + 2 * (i * d + j);
                        Complex64::new(x[k], x[k + 1])
                    });
                    off += 2 * d * d;
                    grams.push(m.adjoint() * m);
                }
                let total_gram = grams.iter().fold(CMat::zeros(d, d), |acc, g| acc + g);
                let t = inv_sqrt_psd(&total_gram);
                per_input.push(grams.iter().map(|g| &t * g * &t).collect());
            }
            effects.push(per_input);
        }
        (psi, effects)
    }
}

impl LeastSquares for GeneralChart {
    fn n_params(&self) -> usize {
        self.cardinality * (1 + self.branch_len())
    }
    fn n_residuals(&self) -> usize {
        self.target.len()
    }
    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let n = self.cardinality;
        let w = squared_simplex(&x[..n]);
        let len = self.branch_len();
        let dims = vec![self.d; self.scenario.n_parties()];
        let mut table = vec![0.0; self.scenario.table_len()];
        for (i, wi) in w.iter().enumerate() {
            let (psi, effects) = self.branch(&x[n + i * len..n + (i + 1) * len]);
            let t = born_table_pure(&dims, &psi, &effects, self.scenario);
            for (a, b) in table.iter_mut().zip(t) {
                *a += wi * b;
            }
        }
        let coords = ProbBox::new_unchecked(self.scenario, table)
            .expect("table length fixed by scenario")
            .coordinates();
        for (o, (c, t)) in out.iter_mut().zip(coords.iter().zip(&self.target)) {
            *o = c - t;
        }
    }
}

impl Chart for GeneralChart {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.cardinality;
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        for _ in 0..n * self.branch_len() {
            x.push(rng.gen_range(-1.0..1.0));
        }
        x
    }
    fn realization(&self, x: &[f64]) -> Result<Realization> {
        let n = self.cardinality;
        let len = self.branch_len();
        let dims = vec![self.d; self.scenario.n_parties()];
        let branches = (0..n)
            .map(|i| {
                let (psi, effects) = self.branch(&x[n + i * len..n + (i + 1) * len]);
                GeneralRealization::from_pure_state(dims.clone(), &psi, effects)
            })
            .collect::<Result<Vec<_>>>()?;
        if n == 1 {
            return Ok(Realization::General(GeneralSpec::from_realization(
                &branches[0],
            )));
        }
        let h = HybridRealization::new(
            squared_simplex(&x[..n]),
            branches.into_iter().map(Branch::General).collect(),
        )?;
        Ok(Realization::from_hybrid(&h))
    }
}
