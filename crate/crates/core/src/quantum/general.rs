//! Arbitrary finite-dimensional realizations evaluated by the Born rule.

use num_complex::Complex64;

use super::linalg::{self, CMat};
use crate::error::{Error, Result};
use crate::scenario::{decode, BellScenario, ProbBox};

pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Effects indexed `[party][input][output]`.
pub type Effects = Vec<Vec<Vec<CMat>>>;

/// A density operator on `⊗_p C^{d_p}` plus local POVMs.
///
/// Parties normally share one local dimension; per-party dimensions are
/// kept so asymmetric bipartite systems can be represented too.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralRealization {
    dims: Vec<usize>,
    state: CMat,
    effects: Effects,
    scenario: BellScenario,
}

impl GeneralRealization {
    /// Every party has local dimension `d`; the party count is taken from
    /// `effects`.
    pub fn new(d: usize, state: CMat, effects: Effects) -> Result<Self> {
        let n = effects.len();
        Self::with_dims(vec![d; n], state, effects)
    }

    pub fn with_dims(dims: Vec<usize>, state: CMat, effects: Effects) -> Result<Self> {
        let scenario = check_effects(&dims, &effects)?;
        check_state(&dims, &state)?;
        Ok(Self {
            dims,
            state,
            effects,
            scenario,
        })
    }

    pub fn from_pure_state(dims: Vec<usize>, psi: &[Complex64], effects: Effects) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::with_dims(dims, linalg::outer(&psi), effects)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The shared local dimension, if all parties agree.
    pub fn local_dimension(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn state(&self) -> &CMat {
        &self.state
    }

    pub fn effects(&self) -> &Effects {
        &self.effects
    }

    pub fn scenario(&self) -> BellScenario {
        self.scenario
    }
}

fn check_effects(dims: &[usize], effects: &Effects) -> Result<BellScenario> {
    if dims.is_empty() || dims.len() != effects.len() {
        return Err(Error::InvalidPovm(format!(
            "{} local dimensions for {} parties",
            dims.len(),
            effects.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidState("zero local dimension".into()));
    }
    let m = effects[0].len();
    let v = effects[0].first().map_or(0, Vec::len);
    let scenario =
        BellScenario::new(effects.len(), m, v).map_err(|e| Error::InvalidPovm(e.to_string()))?;
    for (p, per_party) in effects.iter().enumerate() {
        let d = dims[p];
        if per_party.len() != m {
            return Err(Error::InvalidPovm(format!(
                "party {p} has {} inputs, expected {m}",
                per_party.len()
            )));
        }
        for (x, povm) in per_party.iter().enumerate() {
            if povm.len() != v {
                return Err(Error::InvalidPovm(format!(
                    "party {p} input {x} has {} outcomes, expected {v}",
                    povm.len()
                )));
            }
            let mut sum = CMat::zeros(d, d);
            for (a, e) in povm.iter().enumerate() {
                if e.shape() != (d, d) {
                    return Err(Error::InvalidPovm(format!(
                        "effect {a} of party {p} input {x} has shape {:?}, expected {d}x{d}",
                        e.shape()
                    )));
                }
                if linalg::hermiticity_defect(e) > PSD_TOL {
                    return Err(Error::InvalidPovm(format!(
                        "effect {a} of party {p} input {x} is not Hermitian"
                    )));
                }
                let low = linalg::min_eigenvalue(e);
                if low < -PSD_TOL {
                    return Err(Error::InvalidPovm(format!(
                        "effect {a} of party {p} input {x} has eigenvalue {low:e}"
                    )));
                }
                sum += e;
            }
            let defect = linalg::max_abs(&(sum - linalg::identity(d)));
            if defect > COMPLETENESS_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effects of party {p} input {x} miss the identity by {defect:e}"
                )));
            }
        }
    }
    Ok(scenario)
}

fn check_state(dims: &[usize], state: &CMat) -> Result<()> {
    let total: usize = dims.iter().product();
    if state.shape() != (total, total) {
        return Err(Error::InvalidState(format!(
            "state has shape {:?}, expected {total}x{total}",
            state.shape()
        )));
    }
    if linalg::hermiticity_defect(state) > PSD_TOL {
        return Err(Error::InvalidState("state is not Hermitian".into()));
    }
    let tr = linalg::trace(state);
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}")));
    }
    let low = linalg::min_eigenvalue(state);
    if low < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "eigenvalue {low:e} is negative"
        )));
    }
    Ok(())
}

/// Per-index local digits of the composite basis, party 0 most significant.
fn digit_table(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut digits = vec![0; dims.len()];
            for p in (0..dims.len()).rev() {
                digits[p] = idx % dims[p];
                idx /= dims[p];
            }
            digits
        })
        .collect()
}

/// `Tr(ρ ⊗_p E_p)` for every input/output tuple, without validation.
pub(crate) fn born_table(
    dims: &[usize],
    state: &CMat,
    effects: &Effects,
    scenario: BellScenario,
) -> Vec<f64> {
    let digits = digit_table(dims);
    let n = dims.len();
    let total = digits.len();
    let mut table = vec![0.0; scenario.table_len()];
    for xi in 0..scenario.input_tuples() {
        let xs = decode(xi, scenario.n_inputs(), n);
        for oi in 0..scenario.output_tuples() {
            let os = decode(oi, scenario.n_outputs(), n);
            let ops: Vec<&CMat> = (0..n).map(|p| &effects[p][xs[p]][os[p]]).collect();
            // Tr(ρK) = Σ_{I,J} ρ[I,J] K[J,I], K[J,I] = Π_p E_p[J_p, I_p]
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..total {
                for j in 0..total {
                    let r = state[(i, j)];
                    if r == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut k = Complex64::new(1.0, 0.0);
                    for p in 0..n {
                        k *= ops[p][(digits[j][p], digits[i][p])];
                    }
                    acc += r * k;
                }
            }
            table[xi * scenario.output_tuples() + oi] = acc.re;
        }
    }
    table
}

/// `<ψ| ⊗_p E_p |ψ>` for every input/output tuple, without validation.
pub(crate) fn born_table_pure(
    dims: &[usize],
    psi: &[Complex64],
    effects: &Effects,
    scenario: BellScenario,
) -> Vec<f64> {
    let digits = digit_table(dims);
    let n = dims.len();
    let total = digits.len();
    let mut table = vec![0.0; scenario.table_len()];
    for xi in 0..scenario.input_tuples() {
        let xs = decode(xi, scenario.n_inputs(), n);
        for oi in 0..scenario.output_tuples() {
            let os = decode(oi, scenario.n_outputs(), n);
            let ops: Vec<&CMat> = (0..n).map(|p| &effects[p][xs[p]][os[p]]).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..total {
                let bra = psi[i].conj();
                if bra == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..total {
                    let mut k = psi[j];
                    for p in 0..n {
                        k *= ops[p][(digits[i][p], digits[j][p])];
                    }
                    acc += bra * k;
                }
            }
            table[xi * scenario.output_tuples() + oi] = acc.re;
        }
    }
    table
}

/// Born-rule box of a realization.
pub fn born_box(r: &GeneralRealization) -> Result<ProbBox> {
    let table = born_table(&r.dims, &r.state, &r.effects, r.scenario);
    ProbBox::new(r.scenario, table)
}

/// For bipartite systems only the smaller local dimension matters: the
/// Schmidt decomposition of a pure state has at most `min(dA, dB)` terms.
pub fn effective_bipartite_dimension(d_a: usize, d_b: usize) -> usize {
    d_a.min(d_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{ONE, ZERO};
    use crate::scenario::check_no_signalling;

    fn proj(k: usize) -> CMat {
        let mut m = CMat::zeros(2, 2);
        m[(k, k)] = ONE;
        m
    }

    fn z_povm() -> Vec<CMat> {
        vec![proj(0), proj(1)]
    }

    #[test]
    fn orthogonal_outcome_never_fires() {
        let psi = [ONE, ZERO, ZERO, ZERO];
        let effects = vec![vec![z_povm(), z_povm()], vec![z_povm(), z_povm()]];
        let r = GeneralRealization::from_pure_state(vec![2, 2], &psi, effects).unwrap();
        let b = born_box(&r).unwrap();
        for x in 0..2 {
            assert_eq!(b.marginal(0, x, 1), 0.0);
        }
    }

    #[test]
    fn bell_state_z_measurements_correlate() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ONE * h, ZERO, ZERO, ONE * h];
        let effects = vec![vec![z_povm()], vec![z_povm()]];
        let r = GeneralRealization::from_pure_state(vec![2, 2], &psi, effects).unwrap();
        let b = born_box(&r).unwrap();
        let same = b.prob(&[0, 0], &[0, 0]) + b.prob(&[0, 0], &[1, 1]);
        assert!((same - 1.0).abs() < 1e-15);
        assert!(check_no_signalling(&b, 1e-12).is_empty());
    }

    #[test]
    fn pure_and_density_routes_agree() {
        let r = crate::quantum::QubitRealization::tsirelson().to_general();
        let psi = crate::quantum::SchmidtState::maximally_entangled().vector();
        let a = born_table(r.dims(), r.state(), r.effects(), r.scenario());
        let b = born_table_pure(r.dims(), &psi, r.effects(), r.scenario());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_incomplete_povm() {
        let effects = vec![vec![vec![proj(0), proj(0)]], vec![z_povm()]];
        let state = linalg::outer(&[ONE, ZERO, ZERO, ZERO]);
        assert!(matches!(
            GeneralRealization::new(2, state, effects),
            Err(Error::InvalidPovm(_))
        ));
    }

    #[test]
    fn rejects_bad_state() {
        let effects = vec![vec![z_povm()], vec![z_povm()]];
        let state = CMat::identity(4, 4);
        assert!(matches!(
            GeneralRealization::new(2, state, effects.clone()),
            Err(Error::InvalidState(_))
        ));
        let mut neg = CMat::zeros(4, 4);
        neg[(0, 0)] = ONE * 1.5;
        neg[(1, 1)] = -ONE * 0.5;
        assert!(matches!(
            GeneralRealization::new(2, neg, effects),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn bipartite_dimension() {
        assert_eq!(effective_bipartite_dimension(2, 3), 2);
        assert_eq!(effective_bipartite_dimension(5, 5), 5);
        assert_eq!(effective_bipartite_dimension(1, 7), 1);
    }
}
