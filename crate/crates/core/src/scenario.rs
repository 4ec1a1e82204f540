//! Bell scenarios and the two box representations.
//!
//! A [`ProbBox`] is the full conditional table `p[outputs | inputs]` stored
//! row-major: input tuples in lexicographic order (party 0 most significant)
//! on the outside, output tuples in the same order inside. A
//! [`CorrelatorBox`] is the 8-number bias form available only in the
//! (2,2,2) scenario.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack used by validity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct BellScenario {
    n_parties: usize,
    n_inputs: usize,
    n_outputs: usize,
}

impl BellScenario {
    /// The CHSH scenario: two parties, two inputs, two outputs.
    pub const CHSH: BellScenario = BellScenario {
        n_parties: 2,
        n_inputs: 2,
        n_outputs: 2,
    };

    pub fn new(n_parties: usize, n_inputs: usize, n_outputs: usize) -> Result<Self> {
        if n_parties == 0 || n_inputs == 0 || n_outputs < 2 {
            return Err(Error::InvalidScenario {
                n: n_parties,
                m: n_inputs,
                v: n_outputs,
            });
        }
        Ok(Self {
            n_parties,
            n_inputs,
            n_outputs,
        })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn is_chsh(&self) -> bool {
        *self == Self::CHSH
    }

    /// Number of joint input tuples, `m^n`.
    pub fn input_tuples(&self) -> usize {
        self.n_inputs.pow(self.n_parties as u32)
    }

    /// Number of joint output tuples, `v^n`.
    pub fn output_tuples(&self) -> usize {
        self.n_outputs.pow(self.n_parties as u32)
    }

    pub fn table_len(&self) -> usize {
        self.input_tuples() * self.output_tuples()
    }

    pub fn index(&self, inputs: &[usize], outputs: &[usize]) -> usize {
        debug_assert_eq!(inputs.len(), self.n_parties);
        debug_assert_eq!(outputs.len(), self.n_parties);
        encode(inputs, self.n_inputs) * self.output_tuples() + encode(outputs, self.n_outputs)
    }

    pub fn input_tuple(&self, index: usize) -> Vec<usize> {
        decode(index, self.n_inputs, self.n_parties)
    }

    pub fn output_tuple(&self, index: usize) -> Vec<usize> {
        decode(index, self.n_outputs, self.n_parties)
    }
}

impl TryFrom<[usize; 3]> for BellScenario {
    type Error = Error;

    fn try_from([n, m, v]: [usize; 3]) -> Result<Self> {
        Self::new(n, m, v)
    }
}

impl From<BellScenario> for [usize; 3] {
    fn from(s: BellScenario) -> Self {
        [s.n_parties, s.n_inputs, s.n_outputs]
    }
}

impl fmt::Display for BellScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            self.n_parties, self.n_inputs, self.n_outputs
        )
    }
}

/// Mixed-radix encoding with the first digit most significant.
pub(crate) fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

pub(crate) fn decode(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    digits
}

/// Number of free parameters of a no-signalling box, `(m(v-1)+1)^n - 1`.
///
/// Saturates at `u128::MAX` for absurdly large scenarios.
pub fn ns_dimension(scenario: &BellScenario) -> u128 {
    let base = (scenario.n_inputs as u128) * (scenario.n_outputs as u128 - 1) + 1;
    crate::classical::saturating_pow(base, scenario.n_parties as u32) - 1
}

/// Full conditional probability table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbBox {
    scenario: BellScenario,
    table: Vec<f64>,
}

impl ProbBox {
    /// Builds a box, checking normalization, non-negativity and
    /// no-signalling at [`DEFAULT_TOL`].
    pub fn new(scenario: BellScenario, table: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(scenario, table, DEFAULT_TOL)
    }

    pub fn with_tolerance(scenario: BellScenario, table: Vec<f64>, tol: f64) -> Result<Self> {
        let b = Self::new_unchecked(scenario, table)?;
        b.validate(tol)?;
        Ok(b)
    }

    /// Only checks the table length. Used for deliberately invalid tables
    /// (e.g. signalling test inputs).
    pub fn new_unchecked(scenario: BellScenario, table: Vec<f64>) -> Result<Self> {
        if table.len() != scenario.table_len() {
            return Err(Error::InvalidBox(format!(
                "table has {} entries, scenario {} needs {}",
                table.len(),
                scenario,
                scenario.table_len()
            )));
        }
        Ok(Self { scenario, table })
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let outs = self.scenario.output_tuples();
        for (i, row) in self.table.chunks(outs).enumerate() {
            if let Some(p) = row
                .iter()
                .find(|p| !p.is_finite() || **p < -tol || **p > 1.0 + tol)
            {
                return Err(Error::InvalidBox(format!(
                    "entry {p} for input tuple {:?} is not a probability",
                    self.scenario.input_tuple(i)
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::InvalidBox(format!(
                    "input tuple {:?} sums to {sum}",
                    self.scenario.input_tuple(i)
                )));
            }
        }
        if let Some(v) = check_no_signalling(self, tol).first() {
            return Err(Error::InvalidBox(format!("signalling: {v}")));
        }
        Ok(())
    }

    /// Uniform distribution over outputs for every input tuple.
    pub fn uniform(scenario: BellScenario) -> Self {
        let p = 1.0 / scenario.output_tuples() as f64;
        Self {
            scenario,
            table: vec![p; scenario.table_len()],
        }
    }

    pub fn scenario(&self) -> BellScenario {
        self.scenario
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn prob(&self, inputs: &[usize], outputs: &[usize]) -> f64 {
        self.table[self.scenario.index(inputs, outputs)]
    }

    /// Marginal of the parties in `subset` (ascending order), with every
    /// other party's input held at `context`.
    pub fn subset_marginal(
        &self,
        subset: &[usize],
        sub_inputs: &[usize],
        sub_outputs: &[usize],
        context: &[usize],
    ) -> f64 {
        let s = &self.scenario;
        let n = s.n_parties;
        let mut inputs = context.to_vec();
        for (&p, &x) in subset.iter().zip(sub_inputs) {
            inputs[p] = x;
        }
        let row = encode(&inputs, s.n_inputs) * s.output_tuples();
        let mut total = 0.0;
        for o in 0..s.output_tuples() {
            let outs = decode(o, s.n_outputs, n);
            if subset.iter().zip(sub_outputs).all(|(&p, &a)| outs[p] == a) {
                total += self.table[row + o];
            }
        }
        total
    }

    /// Single-party marginal `p[a|x]` with the other inputs at 0.
    pub fn marginal(&self, party: usize, input: usize, output: usize) -> f64 {
        let ctx = vec![0; self.scenario.n_parties];
        self.subset_marginal(&[party], &[input], &[output], &ctx)
    }

    /// Free coordinates under the outcome-0-implicit parameterization:
    /// for every non-empty party subset (by size, then lexicographic), every
    /// input tuple of that subset, and every output tuple with all outputs
    /// nonzero, the subset marginal.
    pub fn free_coordinates(&self) -> Vec<f64> {
        let s = &self.scenario;
        let n = s.n_parties;
        let ctx = vec![0; n];
        let mut coords = Vec::new();
        for subset in subsets_by_size(n) {
            let k = subset.len();
            for xi in 0..s.n_inputs.pow(k as u32) {
                let xs = decode(xi, s.n_inputs, k);
                for ai in 0..(s.n_outputs - 1).pow(k as u32) {
                    let outs: Vec<usize> = decode(ai, s.n_outputs - 1, k)
                        .into_iter()
                        .map(|a| a + 1)
                        .collect();
                    coords.push(self.subset_marginal(&subset, &xs, &outs, &ctx));
                }
            }
        }
        coords
    }

    /// Coordinates used for distances: correlators in (2,2,2), free
    /// coordinates elsewhere.
    pub fn coordinates(&self) -> Vec<f64> {
        if self.scenario.is_chsh() {
            correlators_from_probs(self)
                .expect("scenario checked")
                .to_array()
                .to_vec()
        } else {
            self.free_coordinates()
        }
    }

    pub fn max_abs_diff(&self, other: &ProbBox) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Non-empty subsets of `0..n`, ordered by size then lexicographically.
pub(crate) fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            out.push(combo.clone());
            let mut i = k;
            while i > 0 && combo[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

/// A (2,2,2) box as four biases and four joint correlators.
///
/// Marginals are ordered `<A0>, <A1>, <B0>, <B1>`; correlators
/// `<A0B0>, <A1B0>, <A0B1>, <A1B1>`, i.e. index `x + 2y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorBox {
    pub marginals: [f64; 4],
    pub correlators: [f64; 4],
}

impl CorrelatorBox {
    pub fn new(marginals: [f64; 4], correlators: [f64; 4]) -> Self {
        Self {
            marginals,
            correlators,
        }
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            marginals: [v[0], v[1], v[2], v[3]],
            correlators: [v[4], v[5], v[6], v[7]],
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = v.try_into().map_err(|_| {
            Error::InvalidBox(format!("expected 8 correlator values, got {}", v.len()))
        })?;
        Ok(Self::from_array(arr))
    }

    pub fn to_array(&self) -> [f64; 8] {
        let m = self.marginals;
        let c = self.correlators;
        [m[0], m[1], m[2], m[3], c[0], c[1], c[2], c[3]]
    }

    pub fn alice(&self, x: usize) -> f64 {
        self.marginals[x]
    }

    pub fn bob(&self, y: usize) -> f64 {
        self.marginals[2 + y]
    }

    pub fn joint(&self, x: usize, y: usize) -> f64 {
        self.correlators[x + 2 * y]
    }

    /// Reconstructed `p[ab|xy]`.
    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        let sa = if a == 1 { 1.0 } else { -1.0 };
        let sb = if b == 1 { 1.0 } else { -1.0 };
        (1.0 + sa * self.alice(x) + sb * self.bob(y) + sa * sb * self.joint(x, y)) / 4.0
    }

    pub fn distance(&self, other: &CorrelatorBox) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Affine combination `(1-c)·self + c·other`.
    pub fn lerp(&self, other: &CorrelatorBox, c: f64) -> CorrelatorBox {
        let a = self.to_array();
        let b = other.to_array();
        CorrelatorBox::from_array(std::array::from_fn(|i| (1.0 - c) * a[i] + c * b[i]))
    }

    /// Convex combination; weights are checked like [`mix_boxes`].
    pub fn mix(boxes: &[CorrelatorBox], weights: &[f64]) -> Result<CorrelatorBox> {
        check_weights(weights, boxes.len())?;
        let mut acc = [0.0; 8];
        for (b, w) in boxes.iter().zip(weights) {
            for (s, v) in acc.iter_mut().zip(b.to_array()) {
                *s += w * v;
            }
        }
        Ok(CorrelatorBox::from_array(acc))
    }
}

/// Rebuilds the (2,2,2) table from biases.
pub fn probs_from_correlators(b: &CorrelatorBox) -> Result<ProbBox> {
    let s = BellScenario::CHSH;
    let mut table = vec![0.0; s.table_len()];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for bb in 0..2 {
                    let p = b.prob(a, bb, x, y);
                    if !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&p) || !p.is_finite() {
                        return Err(Error::CorrelatorInfeasible {
                            a,
                            b: bb,
                            x,
                            y,
                            value: p,
                        });
                    }
                    table[s.index(&[x, y], &[a, bb])] = p;
                }
            }
        }
    }
    ProbBox::new(s, table)
}

pub fn correlators_from_probs(p: &ProbBox) -> Result<CorrelatorBox> {
    if !p.scenario.is_chsh() {
        return Err(Error::WrongScenario(p.scenario));
    }
    let mut marginals = [0.0; 4];
    for x in 0..2 {
        marginals[x] = p.marginal(0, x, 1) - p.marginal(0, x, 0);
        marginals[2 + x] = p.marginal(1, x, 1) - p.marginal(1, x, 0);
    }
    let mut correlators = [0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let same = p.prob(&[x, y], &[0, 0]) + p.prob(&[x, y], &[1, 1]);
            let diff = p.prob(&[x, y], &[0, 1]) + p.prob(&[x, y], &[1, 0]);
            correlators[x + 2 * y] = same - diff;
        }
    }
    Ok(CorrelatorBox::new(marginals, correlators))
}

/// One failed no-signalling constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignallingViolation {
    pub parties: Vec<usize>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    /// Inputs of the remaining parties where the marginal deviates from the
    /// all-zero reference context.
    pub context: Vec<usize>,
    pub magnitude: f64,
}

impl fmt::Display for SignallingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "marginal of parties {:?} (inputs {:?}, outputs {:?}) shifts by {:.3e} in context {:?}",
            self.parties, self.inputs, self.outputs, self.magnitude, self.context
        )
    }
}

/// Lists every subset marginal (nonzero outputs only; outcome 0 follows by
/// normalization) that moves by more than `tol` when the inputs of the
/// parties outside the subset change.
pub fn check_no_signalling(b: &ProbBox, tol: f64) -> Vec<SignallingViolation> {
    let s = b.scenario;
    let n = s.n_parties;
    let mut report = Vec::new();
    for subset in subsets_by_size(n) {
        let k = subset.len();
        if k == n {
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|p| !subset.contains(p)).collect();
        let reference = vec![0; n];
        for xi in 0..s.n_inputs.pow(k as u32) {
            let xs = decode(xi, s.n_inputs, k);
            for ai in 0..(s.n_outputs - 1).pow(k as u32) {
                let outs: Vec<usize> = decode(ai, s.n_outputs - 1, k)
                    .into_iter()
                    .map(|a| a + 1)
                    .collect();
                let base = b.subset_marginal(&subset, &xs, &outs, &reference);
                for ci in 1..s.n_inputs.pow(others.len() as u32) {
                    let cs = decode(ci, s.n_inputs, others.len());
                    let mut ctx = vec![0; n];
                    for (&p, &x) in others.iter().zip(&cs) {
                        ctx[p] = x;
                    }
                    let m = b.subset_marginal(&subset, &xs, &outs, &ctx);
                    let diff = (m - base).abs();
                    if diff > tol {
                        report.push(SignallingViolation {
                            parties: subset.clone(),
                            inputs: xs.clone(),
                            outputs: outs.clone(),
                            context: cs,
                            magnitude: diff,
                        });
                    }
                }
            }
        }
    }
    report
}

pub(crate) fn check_weights(weights: &[f64], count: usize) -> Result<()> {
    if weights.len() != count {
        return Err(Error::WeightError(format!(
            "{} weights for {} boxes",
            weights.len(),
            count
        )));
    }
    if count == 0 {
        return Err(Error::WeightError("nothing to mix".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::WeightError(format!(
            "negative or non-finite weight {w}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightError(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// Entrywise convex combination of boxes from one scenario.
pub fn mix_boxes(boxes: &[ProbBox], weights: &[f64]) -> Result<ProbBox> {
    check_weights(weights, boxes.len())?;
    let scenario = boxes[0].scenario;
    if let Some(b) = boxes.iter().find(|b| b.scenario != scenario) {
        return Err(Error::ScenarioMismatch(scenario, b.scenario));
    }
    let mut table = vec![0.0; scenario.table_len()];
    for (b, w) in boxes.iter().zip(weights) {
        for (t, p) in table.iter_mut().zip(&b.table) {
            *t += w * p;
        }
    }
    Ok(ProbBox { scenario, table })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoxLabel {
    P0,
    P1,
    P2,
    P3,
    P4,
    #[serde(rename = "P3:4")]
    P3to4,
    #[serde(rename = "P1:4")]
    P1to4,
    #[serde(rename = "PTB")]
    Tsirelson,
    #[serde(rename = "scarani")]
    Scarani,
}

impl BoxLabel {
    pub const ALL: [BoxLabel; 9] = [
        BoxLabel::P0,
        BoxLabel::P1,
        BoxLabel::P2,
        BoxLabel::P3,
        BoxLabel::P4,
        BoxLabel::P3to4,
        BoxLabel::P1to4,
        BoxLabel::Tsirelson,
        BoxLabel::Scarani,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoxLabel::P0 => "P0",
            BoxLabel::P1 => "P1",
            BoxLabel::P2 => "P2",
            BoxLabel::P3 => "P3",
            BoxLabel::P4 => "P4",
            BoxLabel::P3to4 => "P3:4",
            BoxLabel::P1to4 => "P1:4",
            BoxLabel::Tsirelson => "PTB",
            BoxLabel::Scarani => "scarani",
        }
    }
}

impl fmt::Display for BoxLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoxLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "");
        Ok(match key.as_str() {
            "p0" => BoxLabel::P0,
            "p1" => BoxLabel::P1,
            "p2" => BoxLabel::P2,
            "p3" => BoxLabel::P3,
            "p4" => BoxLabel::P4,
            "p3:4" | "p34" => BoxLabel::P3to4,
            "p1:4" | "p14" => BoxLabel::P1to4,
            "ptb" => BoxLabel::Tsirelson,
            "scarani" => BoxLabel::Scarani,
            _ => return Err(Error::UnknownLabel(s.to_string())),
        })
    }
}

/// The named (2,2,2) boxes.
pub fn canonical_box(label: BoxLabel) -> CorrelatorBox {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match label {
        BoxLabel::P0 => CorrelatorBox::new([0.0; 4], [0.0; 4]),
        BoxLabel::P1 => CorrelatorBox::new([1.0; 4], [1.0; 4]),
        BoxLabel::P2 => CorrelatorBox::new([-1.0; 4], [1.0; 4]),
        BoxLabel::P3 => CorrelatorBox::new([1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]),
        BoxLabel::P4 => CorrelatorBox::new([-1.0, 1.0, -1.0, 1.0], [1.0, -1.0, -1.0, 1.0]),
        BoxLabel::P3to4 => CorrelatorBox::new([0.0; 4], [1.0, -1.0, -1.0, 1.0]),
        BoxLabel::P1to4 => CorrelatorBox::new([0.0; 4], [1.0, 0.0, 0.0, 1.0]),
        BoxLabel::Tsirelson => CorrelatorBox::new([0.0; 4], [r, r, r, -r]),
        BoxLabel::Scarani => correlators_from_probs(&scarani_probs()).expect("(2,2,2) table"),
    }
}

/// `p[ab|xy] = (2 + (-1)^(a+b+xy) sqrt 2) / 8`.
pub fn scarani_probs() -> ProbBox {
    let s = BellScenario::CHSH;
    let mut table = vec![0.0; s.table_len()];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let sign = if (a + b + x * y) % 2 == 0 { 1.0 } else { -1.0 };
                    table[s.index(&[x, y], &[a, b])] = (2.0 + sign * 2f64.sqrt()) / 8.0;
                }
            }
        }
    }
    ProbBox::new(s, table).expect("valid by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshValue {
    /// `<A0B0> + <A0B1> + <A1B0> - <A1B1>`.
    pub standard: f64,
    /// Largest `|S|` over the eight relabelled CHSH functionals.
    pub max_relabelled: f64,
}

/// Evaluates the relabelled CHSH functional with input flips `fx`, `fy`.
pub fn chsh_variant(b: &CorrelatorBox, fx: usize, fy: usize, negate: bool) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let parity = ((x ^ fx) * (y ^ fy)) % 2;
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            s += sign * b.joint(x, y);
        }
    }
    if negate {
        -s
    } else {
        s
    }
}

pub fn chsh_value(b: &CorrelatorBox) -> ChshValue {
    let mut best = f64::NEG_INFINITY;
    for fx in 0..2 {
        for fy in 0..2 {
            for negate in [false, true] {
                best = best.max(chsh_variant(b, fx, fy, negate).abs());
            }
        }
    }
    ChshValue {
        standard: chsh_variant(b, 0, 0, false),
        max_relabelled: best,
    }
}

/// True iff the box equals the product of its single-party marginals
/// entrywise within `tol`.
pub fn is_product_box(b: &ProbBox, tol: f64) -> bool {
    let s = b.scenario;
    let n = s.n_parties;
    // marg[party][x][a]
    let marg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|p| {
            (0..s.n_inputs)
                .map(|x| (0..s.n_outputs).map(|a| b.marginal(p, x, a)).collect())
                .collect()
        })
        .collect();
    for xi in 0..s.input_tuples() {
        let xs = s.input_tuple(xi);
        for oi in 0..s.output_tuples() {
            let os = s.output_tuple(oi);
            let prod: f64 = (0..n).map(|p| marg[p][xs[p]][os[p]]).product();
            if (prod - b.table[xi * s.output_tuples() + oi]).abs() > tol {
                return false;
            }
        }
    }
    true
}
