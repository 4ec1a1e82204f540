//! Heuristic set membership by multi-start distance minimization, plus
//! critical weights along rays.

mod charts;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use charts::{
    chsh_of, Chart, ChshChart, ChshLhvChart, GeneralChart, HybridQubitChart, LhvChart, QubitChart,
};

use crate::classical::{
    enumerate_strategies, lambda_star_bounds, local_critical_weight, local_distance,
    local_membership_lp, BellWitness, LhvModel, DEFAULT_VERTEX_CAP,
};
use crate::error::{Error, Result};
use crate::optim::{minimize, Optimizer};
use crate::quantum::{analytic_correlators, QubitRealization};
use crate::scenario::{
    mix_boxes, ns_dimension, probs_from_correlators, BellScenario, CorrelatorBox, ProbBox,
};
use crate::schema::Realization;

/// Restarts are dispatched in chunks of this size; early stopping is only
/// checked between chunks so results do not depend on the thread count.
pub const RESTART_CHUNK: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub feasibility_threshold: f64,
    pub infeasibility_threshold: f64,
    pub seed: u64,
    pub pvm_only: bool,
    pub optimizer: Optimizer,
    /// Stop launching restarts once a feasible point is found.
    pub early_stop: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 2000,
            feasibility_threshold: 1e-6,
            infeasibility_threshold: 1e-3,
            seed: 0x5eed,
            pvm_only: false,
            optimizer: Optimizer::default(),
            early_stop: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !(self.feasibility_threshold > 0.0
            && self.feasibility_threshold < self.infeasibility_threshold
            && self.infeasibility_threshold.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 < feasibility ({}) < infeasibility ({})",
                self.feasibility_threshold, self.infeasibility_threshold
            )));
        }
        Ok(())
    }

    pub fn verdict(&self, distance: f64) -> Verdict {
        if distance <= self.feasibility_threshold {
            Verdict::Feasible
        } else if distance >= self.infeasibility_threshold {
            Verdict::Infeasible
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(Verdict::Feasible),
            "infeasible" => Ok(Verdict::Infeasible),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

/// The set a membership query is asked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "set")]
pub enum SetDescriptor {
    /// Two qubits, general binary POVMs (PVMs only if the config says so).
    Qubit,
    /// Two qubits, projective measurements.
    QubitPvm,
    /// The local polytope, decided exactly by LP.
    Local,
    /// Classical models with `cardinality` shared random values.
    Lhv { cardinality: usize },
    /// `cardinality` branches of dimension-`dimension` quantum systems.
    Hybrid {
        dimension: usize,
        cardinality: usize,
    },
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescriptor::Qubit => write!(f, "q2"),
            SetDescriptor::QubitPvm => write!(f, "q2-pvm"),
            SetDescriptor::Local => write!(f, "local"),
            SetDescriptor::Lhv { cardinality } => write!(f, "lhv:{cardinality}"),
            SetDescriptor::Hybrid {
                dimension,
                cardinality,
            } => write!(f, "hybrid:{dimension}:{cardinality}"),
        }
    }
}

impl FromStr for SetDescriptor {
    type Err = Error;

    /// `q2`, `q2-pvm`, `local`, `lhv:N`, `hybrid:D:N`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parts: Vec<&str> = lower.split(':').collect();
        let num = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(Error::UnknownLabel(format!(
                    "{s}: '{t}' is not a positive integer"
                ))),
            }
        };
        match parts.as_slice() {
            ["q2"] => Ok(SetDescriptor::Qubit),
            ["q2-pvm"] => Ok(SetDescriptor::QubitPvm),
            ["local"] => Ok(SetDescriptor::Local),
            ["lhv", n] => Ok(SetDescriptor::Lhv {
                cardinality: num(n)?,
            }),
            ["hybrid", d, n] => Ok(SetDescriptor::Hybrid {
                dimension: num(d)?,
                cardinality: num(n)?,
            }),
            _ => Err(Error::UnknownLabel(format!(
                "unknown set '{s}' (expected q2, q2-pvm, local, lhv:N or hybrid:D:N)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub set: SetDescriptor,
    pub verdict: Verdict,
    /// Distance from the target to the box re-evaluated from
    /// `best_parameters`.
    pub best_distance: f64,
    /// Distance as seen by the optimizer.
    pub optimizer_distance: f64,
    pub best_parameters: Option<Realization>,
    pub best_restart: Option<usize>,
    pub restarts_used: usize,
    /// Final distance of every restart that ran, by restart index.
    pub trace: Vec<f64>,
    /// True when the verdict is backed by an LP certificate rather than a
    /// finite search.
    pub exact: bool,
    pub witness: Option<BellWitness>,
}

struct Search {
    best_x: Vec<f64>,
    best_value: f64,
    best_index: usize,
    trace: Vec<f64>,
}

fn multistart<C: Chart>(chart: &C, config: &SolverConfig, stop_below: Option<f64>) -> Search {
    let target = stop_below.map_or(0.0, |t| t * 1e-3);
    let mut trace = Vec::with_capacity(config.restarts);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    let mut start = 0;
    while start < config.restarts {
        let end = (start + RESTART_CHUNK).min(config.restarts);
        let runs: Vec<(Vec<f64>, f64)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i as u64);
                let x0 = chart.sample(&mut rng);
                let m = minimize(chart, &x0, config.optimizer, config.max_iterations, target);
                (m.x, m.value)
            })
            .collect();
        for (offset, (x, v)) in runs.into_iter().enumerate() {
            let i = start + offset;
            trace.push(v);
            let better = match &best {
                None => true,
                Some((_, _, b)) => v < *b || (b.is_nan() && !v.is_nan()),
            };
            if better {
                best = Some((i, x, v));
            }
        }
        start = end;
        if let (Some(stop), Some((_, _, b))) = (stop_below, &best) {
            if config.early_stop && *b <= stop {
                break;
            }
        }
    }
    let (best_index, best_x, best_value) = best.expect("at least one restart");
    Search {
        best_x,
        best_value,
        best_index,
        trace,
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn solve_chart<C: Chart>(
    chart: &C,
    target: &[f64],
    set: SetDescriptor,
    config: &SolverConfig,
) -> Result<MembershipResult> {
    config.validate()?;
    let search = multistart(chart, config, Some(config.feasibility_threshold));
    let realization = chart.realization(&search.best_x)?;
    // independent recheck through the public evaluation path
    let best_distance = euclid(&realization.prob_box()?.coordinates(), target);
    Ok(MembershipResult {
        set,
        verdict: config.verdict(best_distance),
        best_distance,
        optimizer_distance: search.best_value,
        best_parameters: Some(realization),
        best_restart: Some(search.best_index),
        restarts_used: search.trace.len(),
        trace: search.trace,
        exact: false,
        witness: None,
    })
}

fn effective_pvm(set: SetDescriptor, config: &SolverConfig) -> bool {
    config.pvm_only || set == SetDescriptor::QubitPvm
}

/// Nearest two-qubit box in correlator space.
pub fn nearest_in_q2(target: &CorrelatorBox, config: &SolverConfig) -> Result<MembershipResult> {
    let set = if config.pvm_only {
        SetDescriptor::QubitPvm
    } else {
        SetDescriptor::Qubit
    };
    let chart = QubitChart {
        target: target.to_array(),
        pvm: config.pvm_only,
    };
    solve_chart(&chart, &target.to_array(), set, config)
}

fn lhv_from_decomposition(b: &ProbBox, weights: &[(usize, f64)]) -> Result<LhvModel> {
    let s = b.scenario();
    let strategies = enumerate_strategies(&s, DEFAULT_VERTEX_CAP)?;
    let mut lambda = Vec::new();
    let mut responses = vec![Vec::new(); s.n_parties()];
    for &(k, w) in weights.iter().filter(|(_, w)| *w > 0.0) {
        lambda.push(w);
        let strat = &strategies[k].0;
        for (p, resp) in responses.iter_mut().enumerate() {
            let per_input: Vec<Vec<f64>> = (0..s.n_inputs())
                .map(|x| {
                    let mut col = vec![0.0; s.n_outputs()];
                    col[strat.output(p, x)] = 1.0;
                    col
                })
                .collect();
            resp.push(per_input);
        }
    }
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|w| *w /= total);
    LhvModel::new(s, lambda, responses)
}

/// Exact local-polytope membership wrapped as a [`MembershipResult`].
pub fn nearest_in_local(target: &ProbBox, _config: &SolverConfig) -> Result<MembershipResult> {
    let lp = local_membership_lp(target)?;
    let (distance, weights) = if lp.inside {
        (0.0, lp.decomposition.clone())
    } else {
        let (d, w) = local_distance(target)?;
        (
            d,
            w.into_iter()
                .enumerate()
                .filter(|(_, x)| *x > 1e-15)
                .collect(),
        )
    };
    let model = lhv_from_decomposition(target, &weights)?;
    let realization = Realization::Lhv(model);
    let rechecked = euclid(
        &realization.prob_box()?.coordinates(),
        &target.coordinates(),
    );
    Ok(MembershipResult {
        set: SetDescriptor::Local,
        verdict: if lp.inside {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
        best_distance: if lp.inside { rechecked } else { distance },
        optimizer_distance: distance,
        best_parameters: Some(realization),
        best_restart: None,
        restarts_used: 0,
        trace: Vec::new(),
        exact: true,
        witness: lp.witness,
    })
}

/// Nearest box reachable with `cardinality` shared random values. From the
/// spanning cardinality upward this is the local polytope, decided by LP.
pub fn nearest_in_l_lambda(
    target: &ProbBox,
    cardinality: usize,
    config: &SolverConfig,
) -> Result<MembershipResult> {
    let upper = lambda_star_bounds(&target.scenario()).upper;
    if cardinality as u128 >= upper {
        let mut r = nearest_in_local(target, config)?;
        r.set = SetDescriptor::Lhv { cardinality };
        return Ok(r);
    }
    nearest_in_l_lambda_search(target, cardinality, config)
}

/// The heuristic search behind [`nearest_in_l_lambda`], never delegating
/// to the LP.
pub fn nearest_in_l_lambda_search(
    target: &ProbBox,
    cardinality: usize,
    config: &SolverConfig,
) -> Result<MembershipResult> {
    if cardinality == 0 {
        return Err(Error::InvalidConfig("cardinality must be positive".into()));
    }
    let set = SetDescriptor::Lhv { cardinality };
    let coords = target.coordinates();
    if target.scenario().is_chsh() {
        let chart = ChshLhvChart {
            target: coords.clone().try_into().expect("eight coordinates"),
            cardinality,
        };
        solve_chart(&chart, &coords, set, config)
    } else {
        let chart = LhvChart {
            scenario: target.scenario(),
            target: coords.clone(),
            cardinality,
        };
        solve_chart(&chart, &coords, set, config)
    }
}

/// Nearest box reachable by `cardinality` branches of local dimension `d`
/// mixed by shared randomness.
pub fn nearest_in_hybrid(
    target: &ProbBox,
    d: usize,
    cardinality: usize,
    config: &SolverConfig,
) -> Result<MembershipResult> {
    if d == 0 || cardinality == 0 {
        return Err(Error::InvalidConfig(
            "dimension and cardinality must be positive".into(),
        ));
    }
    let set = SetDescriptor::Hybrid {
        dimension: d,
        cardinality,
    };
    let coords = target.coordinates();
    if d == 2 && target.scenario().is_chsh() {
        if cardinality == 1 {
            let mut r = nearest_in_q2(&CorrelatorBox::from_slice(&coords)?, config)?;
            r.set = set;
            return Ok(r);
        }
        let chart = HybridQubitChart {
            target: coords.clone().try_into().expect("eight coordinates"),
            cardinality,
            pvm: config.pvm_only,
        };
        return solve_chart(&chart, &coords, set, config);
    }
    let chart = GeneralChart {
        scenario: target.scenario(),
        d,
        cardinality,
        target: coords.clone(),
    };
    solve_chart(&chart, &coords, set, config)
}

/// Dispatches on the set descriptor.
pub fn membership(
    target: &ProbBox,
    set: SetDescriptor,
    config: &SolverConfig,
) -> Result<MembershipResult> {
    match set {
        SetDescriptor::Qubit | SetDescriptor::QubitPvm => {
            let mut cfg = config.clone();
            cfg.pvm_only = effective_pvm(set, config);
            if target.scenario().is_chsh() {
                let c = crate::scenario::correlators_from_probs(target)?;
                nearest_in_q2(&c, &cfg)
            } else {
                let mut r = nearest_in_hybrid(target, 2, 1, &cfg)?;
                r.set = set;
                Ok(r)
            }
        }
        SetDescriptor::Local => nearest_in_local(target, config),
        SetDescriptor::Lhv { cardinality } => nearest_in_l_lambda(target, cardinality, config),
        SetDescriptor::Hybrid {
            dimension,
            cardinality,
        } => nearest_in_hybrid(target, dimension, cardinality, config),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshMaximum {
    pub value: f64,
    pub realization: QubitRealization,
    pub restarts_used: usize,
    pub trace: Vec<f64>,
}

/// Largest CHSH value over two-qubit realizations, by the same multi-start
/// engine driving `4 - S` towards zero.
pub fn max_chsh_q2(config: &SolverConfig) -> Result<ChshMaximum> {
    config.validate()?;
    let chart = ChshChart {
        pvm: config.pvm_only,
    };
    let search = multistart(&chart, config, None);
    let Realization::Qubit(q) = chart.realization(&search.best_x)? else {
        unreachable!("qubit chart")
    };
    let m = q.measurements().map(|m| m.as_array());
    let value = chsh_of(&analytic_correlators(q.state.alpha, &m));
    Ok(ChshMaximum {
        value,
        realization: q,
        restarts_used: search.trace.len(),
        trace: search.trace.iter().map(|r| 4.0 - r).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalWeight {
    /// Largest weight on the direction box that stays in the set.
    pub value: f64,
    /// Verdicts at the probe points `k/9`, `k = 1..9`.
    pub grid: Vec<(f64, Verdict)>,
    /// A feasible probe beyond an infeasible one was seen.
    pub non_monotone: bool,
    pub exact: bool,
    pub queries: usize,
}

/// Number of grid probes before bisection; the first eight are interior.
pub const GRID_PROBES: usize = 9;

fn ray_point(anchor: &ProbBox, direction: &ProbBox, t: f64) -> Result<ProbBox> {
    mix_boxes(&[anchor.clone(), direction.clone()], &[1.0 - t, t])
}

/// Bisection for the largest `t` with `(1-t)·anchor + t·direction` in the
/// set decided by `member`. Inconclusive counts as outside.
pub fn critical_weight<F>(
    anchor: &ProbBox,
    direction: &ProbBox,
    member: F,
    tol: f64,
) -> Result<CriticalWeight>
where
    F: Fn(&ProbBox) -> Result<MembershipResult> + Sync,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if anchor.scenario() != direction.scenario() {
        return Err(Error::ScenarioMismatch(
            anchor.scenario(),
            direction.scenario(),
        ));
    }
    let a = member(anchor)?;
    if a.verdict != Verdict::Feasible {
        return Err(Error::AnchorInfeasible {
            distance: a.best_distance,
        });
    }
    let ts: Vec<f64> = (1..=GRID_PROBES)
        .map(|k| k as f64 / GRID_PROBES as f64)
        .collect();
    let grid: Vec<(f64, Verdict)> = ts
        .par_iter()
        .map(|&t| Ok((t, member(&ray_point(anchor, direction, t)?)?.verdict)))
        .collect::<Result<Vec<_>>>()?;
    let mut queries = 1 + grid.len();
    let first_out = grid.iter().position(|(_, v)| *v != Verdict::Feasible);
    let non_monotone =
        first_out.is_some_and(|k| grid[k..].iter().any(|(_, v)| *v == Verdict::Feasible));
    let Some(k) = first_out else {
        return Ok(CriticalWeight {
            value: 1.0,
            grid,
            non_monotone,
            exact: false,
            queries,
        });
    };
    let mut lo = if k == 0 { 0.0 } else { grid[k - 1].0 };
    let mut hi = grid[k].0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        queries += 1;
        if member(&ray_point(anchor, direction, mid)?)?.verdict == Verdict::Feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalWeight {
        value: 0.5 * (lo + hi),
        grid,
        non_monotone,
        exact: false,
        queries,
    })
}

/// [`critical_weight`] against a set descriptor; the local set uses the
/// exact LP instead of bisection.
pub fn critical_weight_in(
    anchor: &ProbBox,
    direction: &ProbBox,
    set: SetDescriptor,
    config: &SolverConfig,
    tol: f64,
) -> Result<CriticalWeight> {
    if set == SetDescriptor::Local {
        let value = local_critical_weight(anchor, direction)?;
        return Ok(CriticalWeight {
            value,
            grid: Vec::new(),
            non_monotone: false,
            exact: true,
            queries: 1,
        });
    }
    critical_weight(anchor, direction, |b| membership(b, set, config), tol)
}

/// Convenience wrapper for correlator boxes.
pub fn critical_weight_correlators(
    anchor: &CorrelatorBox,
    direction: &CorrelatorBox,
    set: SetDescriptor,
    config: &SolverConfig,
    tol: f64,
) -> Result<CriticalWeight> {
    critical_weight_in(
        &probs_from_correlators(anchor)?,
        &probs_from_correlators(direction)?,
        set,
        config,
        tol,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumCaratheodory {
    /// Qudit-based boxes needed to span the convex hull of `Q_d`.
    pub upper: u128,
    /// Local dimension at which `Q_d` is guaranteed convex (binary
    /// inputs and outputs only).
    pub masanes_dim: Option<u128>,
}

pub fn caratheodory_quantum(scenario: &BellScenario) -> QuantumCaratheodory {
    let masanes_dim = (scenario.n_inputs() == 2 && scenario.n_outputs() == 2)
        .then(|| 2 * (crate::classical::saturating_pow(3, scenario.n_parties() as u32) - 1));
    QuantumCaratheodory {
        upper: ns_dimension(scenario),
        masanes_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, BoxLabel};

    fn quick() -> SolverConfig {
        SolverConfig {
            restarts: 16,
            ..SolverConfig::default()
        }
    }

    fn pb(l: BoxLabel) -> ProbBox {
        probs_from_correlators(&canonical_box(l)).unwrap()
    }

    #[test]
    fn set_descriptor_round_trip() {
        for s in [
            SetDescriptor::Qubit,
            SetDescriptor::QubitPvm,
            SetDescriptor::Local,
            SetDescriptor::Lhv { cardinality: 3 },
            SetDescriptor::Hybrid {
                dimension: 2,
                cardinality: 4,
            },
        ] {
            assert_eq!(s.to_string().parse::<SetDescriptor>().unwrap(), s);
        }
        assert!("lhv:0".parse::<SetDescriptor>().is_err());
        assert!("q3".parse::<SetDescriptor>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            feasibility_threshold: 1e-2,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let cfg: SolverConfig = serde_json::from_str(r#"{"restarts": 5}"#).unwrap();
        assert_eq!(cfg.restarts, 5);
        assert_eq!(cfg.max_iterations, 2000);
    }

    #[test]
    fn tsirelson_box_is_qubit() {
        let r = nearest_in_q2(&canonical_box(BoxLabel::Tsirelson), &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible, "{}", r.best_distance);
    }

    #[test]
    fn product_box_in_l1() {
        let r = nearest_in_l_lambda(&pb(BoxLabel::P0), 1, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        assert!(r.best_distance < 1e-9);
    }

    #[test]
    fn local_set_gives_certificates() {
        let r = membership(&pb(BoxLabel::Tsirelson), SetDescriptor::Local, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(r.exact);
        assert!(r.witness.is_some());
        let r = membership(&pb(BoxLabel::P1to4), SetDescriptor::Local, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let Some(Realization::Lhv(m)) = r.best_parameters else {
            panic!()
        };
        assert_eq!(m.cardinality(), 4);
    }

    #[test]
    fn deterministic_results() {
        let target = CorrelatorBox::mix(
            &[
                canonical_box(BoxLabel::P1),
                canonical_box(BoxLabel::P3),
                canonical_box(BoxLabel::P4),
            ],
            &[0.4, 0.3, 0.3],
        )
        .unwrap();
        let a = nearest_in_q2(&target, &quick()).unwrap();
        let b = nearest_in_q2(&target, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hybrid_with_one_branch_matches_q2() {
        let target = canonical_box(BoxLabel::P3to4);
        let a = nearest_in_q2(&target, &quick()).unwrap();
        let b =
            nearest_in_hybrid(&probs_from_correlators(&target).unwrap(), 2, 1, &quick()).unwrap();
        assert_eq!(a.best_distance, b.best_distance);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn critical_weight_local_exact() {
        let c = critical_weight_in(
            &pb(BoxLabel::P0),
            &pb(BoxLabel::Tsirelson),
            SetDescriptor::Local,
            &quick(),
            1e-9,
        )
        .unwrap();
        assert!((c.value - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn critical_weight_by_bisection_against_lp() {
        let member = |b: &ProbBox| nearest_in_local(b, &quick());
        let c = critical_weight(&pb(BoxLabel::P0), &pb(BoxLabel::Tsirelson), member, 1e-6).unwrap();
        assert!((c.value - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(!c.non_monotone);
    }

    #[test]
    fn anchor_must_be_feasible() {
        let member = |b: &ProbBox| nearest_in_local(b, &quick());
        let e = critical_weight(&pb(BoxLabel::Tsirelson), &pb(BoxLabel::P0), member, 1e-6);
        assert!(matches!(e, Err(Error::AnchorInfeasible { .. })));
    }

    #[test]
    fn caratheodory_values() {
        let q = |n, m, v| caratheodory_quantum(&BellScenario::new(n, m, v).unwrap());
        assert_eq!(
            q(2, 2, 2),
            QuantumCaratheodory {
                upper: 8,
                masanes_dim: Some(16)
            }
        );
        assert_eq!(
            q(3, 2, 2),
            QuantumCaratheodory {
                upper: 26,
                masanes_dim: Some(52)
            }
        );
        assert_eq!(
            q(2, 3, 2),
            QuantumCaratheodory {
                upper: 15,
                masanes_dim: None
            }
        );
    }

    #[test]
    fn feasible_verdicts_are_sound() {
        let target = canonical_box(BoxLabel::P1to4);
        let r = nearest_in_q2(&target, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let again = r.best_parameters.unwrap().correlators().unwrap();
        assert!(again.distance(&target) <= r.best_distance + 1e-15);
    }
}
