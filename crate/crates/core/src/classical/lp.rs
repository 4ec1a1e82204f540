//! Linear programs over the local polytope, in the coordinates of
//! [`ProbBox::coordinates`].

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use super::{enumerate_local_vertices, DEFAULT_VERTEX_CAP};
use crate::error::{Error, Result};
use crate::scenario::ProbBox;

/// Feasibility tolerance of every LP decision.
pub const LP_TOL: f64 = 1e-9;

/// Bell functional `coefficients · coordinates <= bound` on local boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellWitness {
    pub coefficients: Vec<f64>,
    /// Maximum over local vertices, recomputed by inner product.
    pub bound: f64,
    /// Value on the target box.
    pub value: f64,
}

impl BellWitness {
    pub fn violation(&self) -> f64 {
        self.value - self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMembership {
    pub inside: bool,
    /// Largest `t` with `t·target + (1-t)·uniform` local.
    pub visibility: f64,
    /// `(vertex index, weight)` pairs with positive weight when inside.
    pub decomposition: Vec<(usize, f64)>,
    pub witness: Option<BellWitness>,
    /// Residual of the decomposition in coordinate space (max abs).
    pub residual: Option<f64>,
}

fn lp_err(e: microlp::Error) -> Error {
    Error::Lp(e.to_string())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `c ∈ [0,1]` such that `Σ w_k V_k = origin + c·dir`, `w` on the
/// simplex. Returns `None` when even `c = 0` is infeasible.
fn max_along(
    vertices: &[Vec<f64>],
    origin: &[f64],
    dir: &[f64],
) -> Result<Option<(f64, Vec<f64>)>> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let w: Vec<Variable> = vertices
        .iter()
        .map(|_| p.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let c = p.add_var(1.0, (0.0, 1.0));
    for i in 0..origin.len() {
        let mut row: Vec<(Variable, f64)> = w
            .iter()
            .zip(vertices)
            .filter(|(_, v)| v[i] != 0.0)
            .map(|(&var, v)| (var, v[i]))
            .collect();
        row.push((c, -dir[i]));
        p.add_constraint(row.as_slice(), ComparisonOp::Eq, origin[i]);
    }
    let ones: Vec<(Variable, f64)> = w.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    match p.solve() {
        Ok(outcome) => {
            let sol = outcome
                .into_solution()
                .map_err(|_| Error::Lp("solve interrupted".into()))?;
            let weights = w.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
            Ok(Some((sol.var_value(c), weights)))
        }
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(lp_err(e)),
    }
}

/// Decomposition of `target` over `vertices` restricted to `support`.
fn decompose(vertices: &[Vec<f64>], support: &[usize], target: &[f64]) -> Result<Option<Vec<f64>>> {
    let sub: Vec<Vec<f64>> = support.iter().map(|&k| vertices[k].clone()).collect();
    let zero = vec![0.0; target.len()];
    Ok(max_along(&sub, target, &zero)?.map(|(_, w)| w))
}

fn residual(vertices: &[Vec<f64>], weights: &[(usize, f64)], target: &[f64]) -> f64 {
    let mut acc = vec![0.0; target.len()];
    for &(k, w) in weights {
        for (a, v) in acc.iter_mut().zip(&vertices[k]) {
            *a += w * v;
        }
    }
    acc.iter()
        .zip(target)
        .map(|(a, t)| (a - t).abs())
        .fold(0.0, f64::max)
}

/// Most violated Bell functional with coefficients in `[-1,1]`:
/// maximize `β·T − β0` subject to `β·V_k ≤ β0` for every vertex.
fn dual_witness(vertices: &[Vec<f64>], target: &[f64]) -> Result<BellWitness> {
    let dim = target.len();
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let beta: Vec<Variable> = target.iter().map(|&t| p.add_var(t, (-1.0, 1.0))).collect();
    let beta0 = p.add_var(-1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for v in vertices {
        let mut row: Vec<(Variable, f64)> = (0..dim)
            .filter(|&i| v[i] != 0.0)
            .map(|i| (beta[i], v[i]))
            .collect();
        row.push((beta0, -1.0));
        p.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let sol = p
        .solve()
        .map_err(lp_err)?
        .into_solution()
        .map_err(|_| Error::Lp("solve interrupted".into()))?;
    let mut coefficients: Vec<f64> = beta.iter().map(|&b| sol.var_value(b)).collect();
    let scale = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale > 0.0 {
        for c in &mut coefficients {
            *c /= scale;
            if c.abs() < 1e-12 {
                *c = 0.0;
            }
        }
    }
    let bound = vertices
        .iter()
        .map(|v| dot(&coefficients, v))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BellWitness {
        value: dot(&coefficients, target),
        coefficients,
        bound,
    })
}

pub(crate) fn vertex_coordinates(b: &ProbBox) -> Result<Vec<Vec<f64>>> {
    Ok(enumerate_local_vertices(&b.scenario(), DEFAULT_VERTEX_CAP)?
        .iter()
        .map(ProbBox::coordinates)
        .collect())
}

/// Decides membership in the local polytope. Inside comes with a convex
/// decomposition over [`enumerate_local_vertices`]; outside with a Bell
/// functional separating the box from every vertex.
pub fn local_membership_lp(b: &ProbBox) -> Result<LocalMembership> {
    let vertices = vertex_coordinates(b)?;
    let target = b.coordinates();
    let uniform = ProbBox::uniform(b.scenario()).coordinates();
    let dir: Vec<f64> = target.iter().zip(&uniform).map(|(t, u)| t - u).collect();
    let (visibility, _) = max_along(&vertices, &uniform, &dir)?
        .ok_or_else(|| Error::Lp("uniform box reported non-local".into()))?;

    if visibility >= 1.0 - LP_TOL {
        let all: Vec<usize> = (0..vertices.len()).collect();
        if let Some(w) = decompose(&vertices, &all, &target)? {
            let decomposition: Vec<(usize, f64)> = w
                .into_iter()
                .enumerate()
                .filter(|(_, x)| *x > 0.0)
                .collect();
            let residual = residual(&vertices, &decomposition, &target);
            return Ok(LocalMembership {
                inside: true,
                visibility: visibility.min(1.0),
                decomposition,
                witness: None,
                residual: Some(residual),
            });
        }
    }
    let witness = dual_witness(&vertices, &target)?;
    Ok(LocalMembership {
        inside: false,
        visibility,
        decomposition: Vec::new(),
        witness: Some(witness),
        residual: None,
    })
}

/// Exact largest `c` with `(1-c)·anchor + c·direction` local.
pub fn local_critical_weight(anchor: &ProbBox, direction: &ProbBox) -> Result<f64> {
    if anchor.scenario() != direction.scenario() {
        return Err(Error::ScenarioMismatch(
            anchor.scenario(),
            direction.scenario(),
        ));
    }
    let vertices = vertex_coordinates(anchor)?;
    let a = anchor.coordinates();
    let dir: Vec<f64> = direction
        .coordinates()
        .iter()
        .zip(&a)
        .map(|(d, x)| d - x)
        .collect();
    let all: Vec<usize> = (0..vertices.len()).collect();
    if decompose(&vertices, &all, &a)?.is_none() {
        let (distance, _) = super::local_distance(anchor)?;
        return Err(Error::AnchorInfeasible { distance });
    }
    let (c, _) = max_along(&vertices, &a, &dir)?
        .ok_or_else(|| Error::Lp("feasible anchor reported infeasible".into()))?;
    Ok(c.clamp(0.0, 1.0))
}

/// Greedily drops vertices from a decomposition while the remaining support
/// still reproduces the box. Returns the reduced decomposition.
pub fn greedy_reduce(b: &ProbBox, decomposition: &[(usize, f64)]) -> Result<Vec<(usize, f64)>> {
    let vertices = vertex_coordinates(b)?;
    let target = b.coordinates();
    let mut current: Vec<(usize, f64)> = decomposition.to_vec();
    loop {
        let mut order: Vec<usize> = (0..current.len()).collect();
        order.sort_by(|&i, &j| current[i].1.total_cmp(&current[j].1));
        let mut improved = false;
        for drop in order {
            let support: Vec<usize> = current
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, (k, _))| *k)
                .collect();
            if let Some(w) = decompose(&vertices, &support, &target)? {
                let next: Vec<(usize, f64)> = support
                    .into_iter()
                    .zip(w)
                    .filter(|(_, x)| *x > 0.0)
                    .collect();
                if residual(&vertices, &next, &target) <= 1e-7 {
                    current = next;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return Ok(current);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, mix_boxes, probs_from_correlators, BoxLabel};

    fn pb(label: BoxLabel) -> ProbBox {
        probs_from_correlators(&canonical_box(label)).unwrap()
    }

    #[test]
    fn tsirelson_box_is_nonlocal_with_chsh_witness() {
        let r = local_membership_lp(&pb(BoxLabel::Tsirelson)).unwrap();
        assert!(!r.inside);
        assert!((r.visibility - 0.5f64.sqrt()).abs() < 1e-9);
        let w = r.witness.unwrap();
        assert!((w.bound - 2.0).abs() < 1e-9);
        assert!((w.value - 8f64.sqrt()).abs() < 1e-9);
        let chsh = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0];
        for (c, e) in w.coefficients.iter().zip(chsh) {
            assert!((c - e).abs() < 1e-9, "{:?}", w.coefficients);
        }
    }

    #[test]
    fn p14_decomposes() {
        let b = pb(BoxLabel::P1to4);
        let r = local_membership_lp(&b).unwrap();
        assert!(r.inside);
        assert!(r.residual.unwrap() < 1e-9);
        let reduced = greedy_reduce(&b, &r.decomposition).unwrap();
        assert_eq!(reduced.len(), 4);
        for (_, w) in reduced {
            assert!((w - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_beyond_local_boundary() {
        let b = mix_boxes(
            &[pb(BoxLabel::P0), pb(BoxLabel::P1), pb(BoxLabel::Tsirelson)],
            &[0.0, 0.2, 0.8],
        )
        .unwrap();
        assert!(!local_membership_lp(&b).unwrap().inside);
    }

    #[test]
    fn critical_weight_towards_tsirelson() {
        for c1 in [0.0, 0.3, 0.5, 0.9] {
            let anchor = mix_boxes(&[pb(BoxLabel::P0), pb(BoxLabel::P1)], &[1.0 - c1, c1]).unwrap();
            let dir = mix_boxes(
                &[pb(BoxLabel::P1), pb(BoxLabel::Tsirelson)],
                &[c1, 1.0 - c1],
            )
            .unwrap();
            let t = local_critical_weight(&anchor, &dir).unwrap();
            // the P1 weight stays at c1; c3 = t(1 - c1) must equal 2^{-1/2}(1 - c1)
            assert!((t - 0.5f64.sqrt()).abs() < 1e-9, "c1={c1} t={t}");
        }
    }

    #[test]
    fn nonlocal_anchor_rejected() {
        let e = local_critical_weight(&pb(BoxLabel::Tsirelson), &pb(BoxLabel::P0));
        assert!(matches!(e, Err(Error::AnchorInfeasible { .. })));
    }
}
