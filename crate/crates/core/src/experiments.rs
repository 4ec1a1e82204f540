//! Triangle scans, the claim verification suite and dataset export.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{lambda_star_bounds, lhv_box, separable_lambda_bound, LhvModel};
use crate::error::{Error, Result};
use crate::membership::{
    caratheodory_quantum, critical_weight_in, max_chsh_q2, nearest_in_l_lambda,
    nearest_in_l_lambda_search, nearest_in_q2, CriticalWeight, SetDescriptor, SolverConfig,
    Verdict,
};
use crate::quantum::linalg::identity;
use crate::quantum::{
    born_box, direct_sum, hybrid_box, qubit_box_analytic, BinaryMeasurement, Branch, CMat,
    GeneralRealization, HybridRealization, QubitRealization, SchmidtState,
};
use crate::scenario::{
    canonical_box, chsh_value, correlators_from_probs, is_product_box, mix_boxes, ns_dimension,
    probs_from_correlators, scarani_probs, BellScenario, BoxLabel, CorrelatorBox, ProbBox,
};

pub const DEFAULT_SLICES: usize = 21;
/// Bisection tolerance for heuristic scans.
pub const DEFAULT_SCAN_TOL: f64 = 1e-3;

/// Three vertex boxes; labels are kept when known so reference curves can
/// be attached.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub names: [String; 3],
    pub boxes: [ProbBox; 3],
    pub labels: Option<[BoxLabel; 3]>,
}

impl Triangle {
    pub fn from_labels(labels: [BoxLabel; 3]) -> Self {
        Self {
            names: labels.map(|l| l.name().to_string()),
            boxes: labels.map(|l| {
                probs_from_correlators(&canonical_box(l)).expect("canonical boxes are valid")
            }),
            labels: Some(labels),
        }
    }

    pub fn new(names: [String; 3], boxes: [ProbBox; 3]) -> Result<Self> {
        let s = boxes[0].scenario();
        if let Some(b) = boxes.iter().find(|b| b.scenario() != s) {
            return Err(Error::ScenarioMismatch(s, b.scenario()));
        }
        let labels = names
            .iter()
            .map(|n| n.parse::<BoxLabel>().ok())
            .collect::<Option<Vec<_>>>()
            .map(|v| [v[0], v[1], v[2]]);
        Ok(Self {
            names,
            boxes,
            labels,
        })
    }
}

/// Known closed-form boundaries for the `v3` weight at fixed `v2` weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceCurve {
    /// `(1 - c)^{3/2}`
    ThreeHalves,
    /// `(1 - c)^{5/4}`
    FiveQuarters,
    /// `(1 - c) / √2`
    Linear,
    /// The whole edge at `c = 0`, nothing elsewhere.
    EdgesOnly,
}

impl ReferenceCurve {
    pub fn eval(&self, c: f64) -> f64 {
        match self {
            ReferenceCurve::ThreeHalves => (1.0 - c).powf(1.5),
            ReferenceCurve::FiveQuarters => (1.0 - c).powf(1.25),
            ReferenceCurve::Linear => (1.0 - c) / SQRT_2,
            ReferenceCurve::EdgesOnly => {
                if c == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn for_triangle(labels: [BoxLabel; 3], set: SetDescriptor, pvm_only: bool) -> Option<Self> {
        use BoxLabel::*;
        let pvm = pvm_only || set == SetDescriptor::QubitPvm;
        let quantum = matches!(set, SetDescriptor::Qubit | SetDescriptor::QubitPvm);
        match labels {
            [P0, P1, P3to4] if quantum && !pvm => Some(ReferenceCurve::ThreeHalves),
            [P0, P1, Tsirelson] if set == SetDescriptor::Local => Some(ReferenceCurve::Linear),
            [P0, P1, Tsirelson] if quantum && pvm => Some(ReferenceCurve::ThreeHalves),
            [P0, P1, Tsirelson] if quantum => Some(ReferenceCurve::FiveQuarters),
            [P1, P3, P4] if quantum => Some(ReferenceCurve::EdgesOnly),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    /// Weight of the second vertex.
    pub slice: f64,
    /// Largest weight of the third vertex found inside the set.
    pub critical: f64,
    pub analytic: Option<f64>,
    pub abs_error: Option<f64>,
    /// `exact`, `heuristic`, `heuristic-non-monotone` or `degenerate`.
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub vertices: [String; 3],
    pub set: SetDescriptor,
    pub pvm_only: bool,
    pub seed: u64,
    pub reference: Option<ReferenceCurve>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn max_abs_error(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.abs_error)
            .fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
    }
}

/// One slice: the `v2` weight `c` is fixed and the `v3` weight scanned.
/// Returns `c3* = t*(1 - c)` with `t*` the critical weight along the ray
/// from `(1-c)·v1 + c·v2` towards `c·v2 + (1-c)·v3`.
pub fn slice_critical(
    triangle: &Triangle,
    c: f64,
    set: SetDescriptor,
    config: &SolverConfig,
    tol: f64,
) -> Result<Option<CriticalWeight>> {
    if c >= 1.0 {
        return Ok(None);
    }
    let [v1, v2, v3] = &triangle.boxes;
    let anchor = mix_boxes(&[v1.clone(), v2.clone()], &[1.0 - c, c])?;
    let direction = mix_boxes(&[v2.clone(), v3.clone()], &[c, 1.0 - c])?;
    critical_weight_in(&anchor, &direction, set, config, tol).map(Some)
}

pub fn scan_triangle(
    triangle: &Triangle,
    n_slices: usize,
    set: SetDescriptor,
    config: &SolverConfig,
    tol: f64,
) -> Result<ScanTable> {
    if n_slices < 2 {
        return Err(Error::InvalidConfig(
            "a scan needs at least two slices".into(),
        ));
    }
    config.validate()?;
    let reference = triangle
        .labels
        .and_then(|l| ReferenceCurve::for_triangle(l, set, config.pvm_only));
    let slices: Vec<f64> = (0..n_slices)
        .map(|k| k as f64 / (n_slices - 1) as f64)
        .collect();
    let rows = slices
        .par_iter()
        .map(|&c| {
            let (critical, verdict) = match slice_critical(triangle, c, set, config, tol)? {
                None => (0.0, "degenerate".to_string()),
                Some(cw) => {
                    let label = if cw.exact {
                        "exact"
                    } else if cw.non_monotone {
                        "heuristic-non-monotone"
                    } else {
                        "heuristic"
                    };
                    ((cw.value * (1.0 - c)).clamp(0.0, 1.0), label.to_string())
                }
            };
            let analytic = reference.map(|r| r.eval(c));
            Ok(ScanRow {
                slice: c,
                critical,
                analytic,
                abs_error: analytic.map(|a| (critical - a).abs()),
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        vertices: triangle.names.clone(),
        set,
        pvm_only: config.pvm_only,
        seed: config.seed,
        reference,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::InvalidConfig(format!(
                "format '{s}' (expected csv or json)"
            ))),
        }
    }
}

pub const SCAN_COLUMNS: [&str; 5] = ["slice", "critical", "analytic", "abs_error", "verdict"];

pub fn export_scan(table: &ScanTable, format: ExportFormat, destination: &Path) -> Result<()> {
    match format {
        ExportFormat::Json => {
            let text = serde_json::to_string_pretty(table)?;
            std::fs::write(destination, text + "\n")?;
        }
        ExportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(destination)?;
            w.write_record(SCAN_COLUMNS)?;
            for row in &table.rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn import_scan(path: &Path) -> Result<ScanTable> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_scan_csv(path: &Path) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Uniformly drawn chart coordinates for a two-qubit realization with
/// general binary POVMs.
pub fn random_qubit_realization<R: Rng>(rng: &mut R) -> QubitRealization {
    let mut m = || {
        let eta: f64 = rng.gen_range(0.0..=1.0);
        let kappa = rng.gen_range(-1.0..=1.0) * (1.0 - eta);
        BinaryMeasurement::new(kappa, eta, rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU))
    };
    let alice = [m(), m()];
    let bob = [m(), m()];
    let state = SchmidtState::new(rng.gen_range(0.0..=PI)).expect("in range");
    QubitRealization::new(state, alice, bob).expect("valid by construction")
}

fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMat {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    g.qr().q()
}

/// Qubit for Alice, qutrit for Bob, random pure state and random binary
/// POVMs.
pub fn random_qubit_qutrit<R: Rng>(rng: &mut R) -> Result<GeneralRealization> {
    let psi: Vec<Complex64> = (0..6)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let binary = |rng: &mut R, d: usize| -> Vec<CMat> {
        let u = random_unitary(rng, d);
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| {
            Complex64::new(rng.gen_range(0.0..=1.0), 0.0)
        }));
        let e1 = &u * diag * u.adjoint();
        let e1 = (&e1 + e1.adjoint()).scale(0.5);
        vec![identity(d) - &e1, e1]
    };
    let alice = vec![binary(rng, 2), binary(rng, 2)];
    let bob = vec![binary(rng, 3), binary(rng, 3)];
    GeneralRealization::from_pure_state(vec![2, 3], &psi, vec![alice, bob])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    Inconclusive,
    ReportOnly,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimStatus::Pass => "PASS",
            ClaimStatus::Fail => "FAIL",
            ClaimStatus::Inconclusive => "INCONCLUSIVE",
            ClaimStatus::ReportOnly => "REPORT",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub anchor: String,
    pub status: ClaimStatus,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// The verdict rests on a finite search rather than a certificate.
    pub heuristic: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub restarts: usize,
    pub claims: Vec<ClaimResult>,
}

impl VerificationReport {
    /// True when no assertive claim failed or came out inconclusive.
    pub fn all_passed(&self) -> bool {
        self.claims
            .iter()
            .all(|c| matches!(c.status, ClaimStatus::Pass | ClaimStatus::ReportOnly))
    }

    pub fn get(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }
}

struct Outcome {
    status: ClaimStatus,
    measured: f64,
    expected: f64,
    tolerance: f64,
    heuristic: bool,
    detail: String,
}

fn pass_if(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

type ClaimFn = fn(&SolverConfig) -> Result<Outcome>;

/// `(id, anchor, check)` in report order.
const CLAIMS: [(&str, &str, ClaimFn); 22] = [
    (
        "tsirelson-bound",
        "two-qubit CHSH maximum equals 2√2",
        claim_tsirelson,
    ),
    (
        "qubit-closed-form-oracle",
        "closed-form qubit biases agree with explicit traces",
        claim_oracle,
    ),
    (
        "prop1-perfect-correlation",
        "perfectly correlated binary box: not product, but in L_2",
        claim_prop1,
    ),
    (
        "prop1-product-boxes-in-q2",
        "product boxes are reached by product qubit states",
        claim_product_boxes,
    ),
    (
        "prop3-p14-in-q2",
        "P1:4 from σ_Z/σ_X on a maximally entangled pair",
        claim_p14_q2,
    ),
    (
        "prop3-p14-in-l4",
        "P1:4 as an equal mixture of four product boxes",
        claim_p14_l4,
    ),
    (
        "prop3-superlocality",
        "P1:4 needs more than three shared random values",
        claim_p14_not_l3,
    ),
    (
        "fig3a-nonconvexity",
        "centroid of the P1,P3,P4 triangle is not a qubit box",
        claim_centroid,
    ),
    (
        "fig3a-edges",
        "edge midpoints of the P1,P3,P4 triangle are qubit boxes",
        claim_edges,
    ),
    (
        "fig3a-interior",
        "interior points of the P1,P3,P4 triangle are not qubit boxes",
        claim_interior,
    ),
    (
        "fig3a-local-tautology",
        "local condition c4 ≤ 1 - c3 holds on the whole simplex",
        claim_tautology,
    ),
    (
        "fig3b-boundary",
        "qubit boundary towards P3:4 is (1 - c1)^{3/2}",
        claim_fig3b,
    ),
    (
        "fig3c-local-boundary",
        "local boundary towards PTB is (1 - c1)/√2",
        claim_fig3c_local,
    ),
    (
        "fig3c-q2-boundary",
        "qubit boundary towards PTB is close to (1 - c1)^{5/4}",
        claim_fig3c_q2,
    ),
    (
        "fig3c-pvm-boundary",
        "projective-only boundary towards PTB roughly (1 - c1)^{3/2}",
        claim_fig3c_pvm,
    ),
    (
        "axiom6-direct-sum",
        "block-diagonal embedding reproduces hybrid mixtures",
        claim_direct_sum,
    ),
    (
        "formula-ns-dimension",
        "statistical dimension of (2,2,2) is 8",
        claim_ns_dimension,
    ),
    (
        "formula-lambda-star",
        "shared-randomness spanning bounds for small scenarios",
        claim_lambda_star,
    ),
    (
        "formula-quantum-caratheodory",
        "qubit-box count spanning CH(Q_d) and convexity dimension",
        claim_quantum_caratheodory,
    ),
    (
        "formula-separable",
        "separable states need d^n shared random values",
        claim_separable,
    ),
    (
        "propA1-asymmetric-dimension",
        "qubit-qutrit boxes are two-qubit boxes",
        claim_asymmetric,
    ),
    (
        "appC-scarani-discrepancy",
        "CHSH of the box listed as separable",
        claim_scarani,
    ),
];

pub fn claim_ids() -> Vec<&'static str> {
    CLAIMS.iter().map(|c| c.0).collect()
}

/// Runs the claim list, or only the ids in `only`.
pub fn verify_claims(config: &SolverConfig, only: Option<&[String]>) -> Result<VerificationReport> {
    config.validate()?;
    if let Some(ids) = only {
        if let Some(bad) = ids
            .iter()
            .find(|id| !CLAIMS.iter().any(|c| c.0 == id.as_str()))
        {
            return Err(Error::UnknownClaim(bad.clone()));
        }
    }
    let mut claims = Vec::new();
    for (id, anchor, check) in CLAIMS {
        if only.is_some_and(|ids| !ids.iter().any(|i| i == id)) {
            continue;
        }
        let result = match check(config) {
            Ok(o) => ClaimResult {
                id: id.to_string(),
                anchor: anchor.to_string(),
                status: o.status,
                measured: o.measured,
                expected: o.expected,
                tolerance: o.tolerance,
                heuristic: o.heuristic,
                detail: o.detail,
            },
            Err(e) => ClaimResult {
                id: id.to_string(),
                anchor: anchor.to_string(),
                status: ClaimStatus::Fail,
                measured: f64::NAN,
                expected: f64::NAN,
                tolerance: f64::NAN,
                heuristic: false,
                detail: format!("error: {e}"),
            },
        };
        claims.push(result);
    }
    Ok(VerificationReport {
        seed: config.seed,
        restarts: config.restarts,
        claims,
    })
}

fn pb(l: BoxLabel) -> ProbBox {
    probs_from_correlators(&canonical_box(l)).expect("canonical boxes are valid")
}

fn claim_tsirelson(config: &SolverConfig) -> Result<Outcome> {
    let m = max_chsh_q2(config)?;
    let expected = 2.0 * SQRT_2;
    Ok(Outcome {
        status: pass_if((m.value - expected).abs() <= 1e-4),
        measured: m.value,
        expected,
        tolerance: 1e-4,
        heuristic: true,
        detail: format!("{} restarts", m.restarts_used),
    })
}

/// Largest difference between the closed form and explicit traces over
/// `count` random realizations.
pub fn oracle_discrepancy(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let q = random_qubit_realization(&mut rng);
        let a = probs_from_correlators(&qubit_box_analytic(&q)?)?;
        let b = born_box(&q.to_general())?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    Ok(worst)
}

fn claim_oracle(config: &SolverConfig) -> Result<Outcome> {
    let worst = oracle_discrepancy(1000, config.seed)?;
    Ok(Outcome {
        status: pass_if(worst <= 1e-10),
        measured: worst,
        expected: 0.0,
        tolerance: 1e-10,
        heuristic: false,
        detail: "1000 random realizations, max entrywise difference".into(),
    })
}

/// `p[λλ|xy] = 1/v` from a uniform shared variable.
pub fn perfectly_correlated_model(v: usize) -> Result<LhvModel> {
    let s = BellScenario::new(2, 2, v)?;
    let party: Vec<Vec<Vec<f64>>> = (0..v)
        .map(|l| {
            let col: Vec<f64> = (0..v).map(|a| if a == l { 1.0 } else { 0.0 }).collect();
            vec![col.clone(), col]
        })
        .collect();
    LhvModel::new(s, vec![1.0 / v as f64; v], vec![party.clone(), party])
}

fn claim_prop1(config: &SolverConfig) -> Result<Outcome> {
    let b = lhv_box(&perfectly_correlated_model(2)?)?;
    let product = is_product_box(&b, 1e-9);
    let r = nearest_in_l_lambda_search(&b, 2, config)?;
    Ok(Outcome {
        status: pass_if(!product && r.best_distance < 1e-8),
        measured: r.best_distance,
        expected: 0.0,
        tolerance: 1e-8,
        heuristic: true,
        detail: format!("product: {product}; distance to L_2 by search"),
    })
}

/// `|00>` with `κ` set to the marginal bias and `η = 0`.
pub fn product_state_realization(b: &CorrelatorBox) -> Result<QubitRealization> {
    let m = |bias: f64| BinaryMeasurement::new(bias, 0.0, 0.0, 0.0);
    QubitRealization::new(
        SchmidtState::new(0.0)?,
        [m(b.alice(0)), m(b.alice(1))],
        [m(b.bob(0)), m(b.bob(1))],
    )
}

fn product_boxes(seed: u64) -> Vec<CorrelatorBox> {
    let mut out: Vec<CorrelatorBox> = Vec::new();
    for code in 0..16usize {
        let bias = |bit: usize| if (code >> bit) & 1 == 1 { 1.0 } else { -1.0 };
        out.push(product_from_marginals([bias(0), bias(1), bias(2), bias(3)]));
    }
    out.push(canonical_box(BoxLabel::P0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        out.push(product_from_marginals(std::array::from_fn(|_| {
            rng.gen_range(-1.0..=1.0)
        })));
    }
    out
}

fn product_from_marginals(m: [f64; 4]) -> CorrelatorBox {
    CorrelatorBox::new(m, [m[0] * m[2], m[1] * m[2], m[0] * m[3], m[1] * m[3]])
}

fn claim_product_boxes(config: &SolverConfig) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut worst_explicit = 0.0f64;
    for b in product_boxes(config.seed) {
        let explicit = qubit_box_analytic(&product_state_realization(&b)?)?;
        worst_explicit = worst_explicit.max(explicit.distance(&b));
        worst = worst.max(nearest_in_q2(&b, config)?.best_distance);
    }
    Ok(Outcome {
        status: pass_if(worst < 1e-6 && worst_explicit < 1e-12),
        measured: worst,
        expected: 0.0,
        tolerance: 1e-6,
        heuristic: true,
        detail: format!("explicit product-state construction error {worst_explicit:.1e}"),
    })
}

fn claim_p14_q2(config: &SolverConfig) -> Result<Outcome> {
    let target = canonical_box(BoxLabel::P1to4);
    let explicit = qubit_box_analytic(&QubitRealization::bell_pair_zx())?.distance(&target);
    let searched = nearest_in_q2(&target, config)?.best_distance;
    Ok(Outcome {
        status: pass_if(explicit < 1e-8 && searched < 1e-8),
        measured: explicit,
        expected: 0.0,
        tolerance: 1e-8,
        heuristic: false,
        detail: format!("search distance {searched:.1e}"),
    })
}

fn claim_p14_l4(config: &SolverConfig) -> Result<Outcome> {
    let b = pb(BoxLabel::P1to4);
    let exact = nearest_in_l_lambda(&b, 4, config)?;
    let searched = nearest_in_l_lambda_search(&b, 4, config)?;
    Ok(Outcome {
        status: pass_if(exact.best_distance < 1e-6 && searched.best_distance < 1e-6),
        measured: exact.best_distance,
        expected: 0.0,
        tolerance: 1e-6,
        heuristic: false,
        detail: format!(
            "LP decomposition; heuristic search distance {:.1e}",
            searched.best_distance
        ),
    })
}

/// Restarts used by the L_3 exclusion: 1000 at the default 64.
pub fn superlocality_restarts(config: &SolverConfig) -> usize {
    (config.restarts * 1000).div_ceil(64)
}

fn heuristic_exclusion(verdict: Verdict) -> ClaimStatus {
    match verdict {
        Verdict::Infeasible => ClaimStatus::Pass,
        Verdict::Inconclusive => ClaimStatus::Inconclusive,
        Verdict::Feasible => ClaimStatus::Fail,
    }
}

fn claim_p14_not_l3(config: &SolverConfig) -> Result<Outcome> {
    let cfg = SolverConfig {
        restarts: superlocality_restarts(config),
        ..config.clone()
    };
    let r = nearest_in_l_lambda_search(&pb(BoxLabel::P1to4), 3, &cfg)?;
    Ok(Outcome {
        status: heuristic_exclusion(r.verdict),
        measured: r.best_distance,
        expected: cfg.infeasibility_threshold,
        tolerance: 0.0,
        heuristic: true,
        detail: format!(
            "best distance over {} restarts (no certificate)",
            r.restarts_used
        ),
    })
}

fn triangle_point(labels: [BoxLabel; 3], w: [f64; 3]) -> CorrelatorBox {
    CorrelatorBox::mix(&labels.map(canonical_box), &w).expect("weights sum to one")
}

const TRI_A: [BoxLabel; 3] = [BoxLabel::P1, BoxLabel::P3, BoxLabel::P4];

fn claim_centroid(config: &SolverConfig) -> Result<Outcome> {
    let cfg = SolverConfig {
        restarts: config.restarts * 4,
        ..config.clone()
    };
    let r = nearest_in_q2(&triangle_point(TRI_A, [1.0 / 3.0; 3]), &cfg)?;
    Ok(Outcome {
        status: heuristic_exclusion(r.verdict),
        measured: r.best_distance,
        expected: cfg.infeasibility_threshold,
        tolerance: 0.0,
        heuristic: true,
        detail: format!(
            "best distance over {} restarts (no certificate)",
            r.restarts_used
        ),
    })
}

fn claim_edges(config: &SolverConfig) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for w in [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]] {
        worst = worst.max(nearest_in_q2(&triangle_point(TRI_A, w), config)?.best_distance);
    }
    Ok(Outcome {
        status: pass_if(worst < config.feasibility_threshold),
        measured: worst,
        expected: 0.0,
        tolerance: config.feasibility_threshold,
        heuristic: true,
        detail: "largest distance among the three midpoints".into(),
    })
}

/// Ten strictly interior points with every weight at least 0.05.
pub fn interior_samples() -> Vec<[f64; 3]> {
    vec![
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [0.05, 0.05, 0.9],
        [0.05, 0.9, 0.05],
        [0.9, 0.05, 0.05],
        [0.5, 0.25, 0.25],
        [0.25, 0.5, 0.25],
        [0.25, 0.25, 0.5],
        [0.1, 0.3, 0.6],
        [0.6, 0.1, 0.3],
        [0.3, 0.6, 0.1],
    ]
}

fn claim_interior(config: &SolverConfig) -> Result<Outcome> {
    let mut smallest = f64::INFINITY;
    let mut status = ClaimStatus::Pass;
    for w in interior_samples() {
        let r = nearest_in_q2(&triangle_point(TRI_A, w), config)?;
        smallest = smallest.min(r.best_distance);
        status = match (status, heuristic_exclusion(r.verdict)) {
            (ClaimStatus::Fail, _) | (_, ClaimStatus::Fail) => ClaimStatus::Fail,
            (ClaimStatus::Inconclusive, _) | (_, ClaimStatus::Inconclusive) => {
                ClaimStatus::Inconclusive
            }
            _ => ClaimStatus::Pass,
        };
    }
    Ok(Outcome {
        status,
        measured: smallest,
        expected: config.infeasibility_threshold,
        tolerance: 0.0,
        heuristic: true,
        detail: "smallest distance among ten interior points".into(),
    })
}

fn claim_tautology(_config: &SolverConfig) -> Result<Outcome> {
    let n = 200;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let c3 = j as f64 / n as f64;
            let c4 = (n - i - j) as f64 / n as f64;
            worst = worst.max(c4 - (1.0 - c3));
        }
    }
    Ok(Outcome {
        status: pass_if(worst <= 1e-12),
        measured: worst,
        expected: 0.0,
        tolerance: 1e-12,
        heuristic: false,
        detail: "max of c4 - (1 - c3) over a simplex grid (tautology)".into(),
    })
}

/// The slice values the boundary claims are checked at.
pub const BOUNDARY_SLICES: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// Largest deviation from `reference` at [`BOUNDARY_SLICES`], and whether
/// any probe on the way was inconclusive or non-monotone.
pub fn boundary_error(
    labels: [BoxLabel; 3],
    set: SetDescriptor,
    config: &SolverConfig,
    reference: ReferenceCurve,
    tol: f64,
) -> Result<(f64, bool, Vec<(f64, f64)>)> {
    let triangle = Triangle::from_labels(labels);
    let results = BOUNDARY_SLICES
        .par_iter()
        .map(|&c| {
            let cw = slice_critical(&triangle, c, set, config, tol)?.expect("slices below one");
            Ok((c, cw.value * (1.0 - c), cw))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    let mut shaky = false;
    let mut points = Vec::new();
    for (c, c3, cw) in results {
        worst = worst.max((c3 - reference.eval(c)).abs());
        shaky |= cw.non_monotone || cw.grid.iter().any(|(_, v)| *v == Verdict::Inconclusive);
        points.push((c, c3));
    }
    Ok((worst, shaky, points))
}

fn boundary_claim(
    labels: [BoxLabel; 3],
    set: SetDescriptor,
    config: &SolverConfig,
    reference: ReferenceCurve,
    tolerance: f64,
    report_only: bool,
) -> Result<Outcome> {
    let tol = if set == SetDescriptor::Local {
        1e-9
    } else {
        DEFAULT_SCAN_TOL
    };
    let (worst, shaky, points) = boundary_error(labels, set, config, reference, tol)?;
    let status = if report_only {
        ClaimStatus::ReportOnly
    } else if worst <= tolerance {
        ClaimStatus::Pass
    } else if shaky {
        ClaimStatus::Inconclusive
    } else {
        ClaimStatus::Fail
    };
    let detail = points
        .iter()
        .map(|(c, v)| format!("c1={c}: {v:.4} (ref {:.4})", reference.eval(*c)))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        status,
        measured: worst,
        expected: 0.0,
        tolerance,
        heuristic: set != SetDescriptor::Local,
        detail,
    })
}

fn claim_fig3b(config: &SolverConfig) -> Result<Outcome> {
    use BoxLabel::*;
    boundary_claim(
        [P0, P1, P3to4],
        SetDescriptor::Qubit,
        config,
        ReferenceCurve::ThreeHalves,
        0.01,
        false,
    )
}

fn claim_fig3c_local(config: &SolverConfig) -> Result<Outcome> {
    use BoxLabel::*;
    boundary_claim(
        [P0, P1, Tsirelson],
        SetDescriptor::Local,
        config,
        ReferenceCurve::Linear,
        1e-6,
        false,
    )
}

fn claim_fig3c_q2(config: &SolverConfig) -> Result<Outcome> {
    use BoxLabel::*;
    boundary_claim(
        [P0, P1, Tsirelson],
        SetDescriptor::Qubit,
        config,
        ReferenceCurve::FiveQuarters,
        0.01,
        false,
    )
}

fn claim_fig3c_pvm(config: &SolverConfig) -> Result<Outcome> {
    use BoxLabel::*;
    boundary_claim(
        [P0, P1, Tsirelson],
        SetDescriptor::QubitPvm,
        config,
        ReferenceCurve::ThreeHalves,
        0.02,
        true,
    )
}

/// Largest entrywise gap between `born_box(direct_sum(h))` and
/// `hybrid_box(h)` over random two-branch qubit hybrids, and whether every
/// embedding had local dimension 4.
pub fn direct_sum_discrepancy(count: usize, seed: u64) -> Result<(f64, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut dims_ok = true;
    for _ in 0..count {
        let a = random_qubit_realization(&mut rng);
        let b = random_qubit_realization(&mut rng);
        let w: f64 = rng.gen_range(0.0..=1.0);
        let h = HybridRealization::new(vec![w, 1.0 - w], vec![Branch::Qubit(a), Branch::Qubit(b)])?;
        let g = direct_sum(&h)?;
        dims_ok &= g.local_dimension() == Some(4);
        worst = worst.max(born_box(&g)?.max_abs_diff(&hybrid_box(&h)?));
    }
    Ok((worst, dims_ok))
}

fn claim_direct_sum(config: &SolverConfig) -> Result<Outcome> {
    let (worst, dims_ok) = direct_sum_discrepancy(50, config.seed)?;
    Ok(Outcome {
        status: pass_if(worst <= 1e-12 && dims_ok),
        measured: worst,
        expected: 0.0,
        tolerance: 1e-12,
        heuristic: false,
        detail: format!("50 random pairs; local dimension 4 throughout: {dims_ok}"),
    })
}

fn exact_claim(measured: &[u128], expected: &[u128], detail: String) -> Outcome {
    Outcome {
        status: pass_if(measured == expected),
        measured: measured.first().copied().unwrap_or(0) as f64,
        expected: expected.first().copied().unwrap_or(0) as f64,
        tolerance: 0.0,
        heuristic: false,
        detail,
    }
}

fn claim_ns_dimension(_config: &SolverConfig) -> Result<Outcome> {
    let d = ns_dimension(&BellScenario::CHSH);
    Ok(exact_claim(&[d], &[8], format!("F(2,2,2) = {d}")))
}

fn claim_lambda_star(_config: &SolverConfig) -> Result<Outcome> {
    let b222 = lambda_star_bounds(&BellScenario::CHSH);
    let b232 = lambda_star_bounds(&BellScenario::new(2, 3, 2)?);
    let b322 = lambda_star_bounds(&BellScenario::new(3, 2, 2)?);
    let got = [b222.lower, b222.upper, b232.lower, b322.lower, b322.upper];
    Ok(exact_claim(
        &got,
        &[4, 4, 7, 14, 16],
        format!(
            "(2,2,2): [{}, {}]; (2,3,2) lower {}; (3,2,2): [{}, {}]",
            got[0], got[1], got[2], got[3], got[4]
        ),
    ))
}

fn claim_quantum_caratheodory(_config: &SolverConfig) -> Result<Outcome> {
    let q = caratheodory_quantum(&BellScenario::CHSH);
    let masanes = q.masanes_dim.unwrap_or(0);
    Ok(exact_claim(
        &[q.upper, masanes],
        &[8, 16],
        format!("upper {}, convex from d = {masanes}", q.upper),
    ))
}

fn claim_separable(_config: &SolverConfig) -> Result<Outcome> {
    let got = [
        separable_lambda_bound(2, 2),
        separable_lambda_bound(3, 2),
        separable_lambda_bound(5, 1),
    ];
    Ok(exact_claim(&got, &[4, 9, 5], format!("{got:?}")))
}

fn claim_asymmetric(config: &SolverConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa1);
    let mut worst = 0.0f64;
    let mut status = ClaimStatus::Pass;
    for _ in 0..5 {
        let g = random_qubit_qutrit(&mut rng)?;
        let target = correlators_from_probs(&born_box(&g)?)?;
        let r = nearest_in_q2(&target, config)?;
        worst = worst.max(r.best_distance);
        status = match (status, r.verdict) {
            (ClaimStatus::Fail, _) | (_, Verdict::Infeasible) => ClaimStatus::Fail,
            (ClaimStatus::Inconclusive, _) | (_, Verdict::Inconclusive) => {
                ClaimStatus::Inconclusive
            }
            _ => ClaimStatus::Pass,
        };
    }
    Ok(Outcome {
        status,
        measured: worst,
        expected: 0.0,
        tolerance: config.feasibility_threshold,
        heuristic: true,
        detail: "five random pure qubit-qutrit realizations".into(),
    })
}

fn claim_scarani(_config: &SolverConfig) -> Result<Outcome> {
    let c = correlators_from_probs(&scarani_probs())?;
    let v = chsh_value(&c);
    Ok(Outcome {
        status: ClaimStatus::ReportOnly,
        measured: v.standard,
        expected: 2.0 * SQRT_2,
        tolerance: 1e-12,
        heuristic: false,
        detail: format!(
            "box listed as separable evaluates to CHSH {:.6} (max over relabellings {:.6}); \
             under the table's conventions it coincides with PTB, so the separability \
             statement is not reproduced",
            v.standard, v.max_relabelled
        ),
    })
}
