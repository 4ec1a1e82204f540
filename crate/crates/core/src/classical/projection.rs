//! Euclidean projection onto a convex hull (Wolfe's min-norm-point method).

use nalgebra::{DMatrix, DVector};

use super::lp::vertex_coordinates;
use crate::error::Result;
use crate::scenario::ProbBox;

const MAX_OUTER: usize = 10_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum-norm point of the affine hull of `pts`, as affine weights.
fn affine_min_norm(pts: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let k = pts.len();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = dot(pts[i], pts[j]);
        }
        m[(i, k)] = 1.0;
        m[(k, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .or_else(|| m.pseudo_inverse(1e-14).ok().map(|pinv| pinv * &rhs))?;
    Some(sol.rows(0, k).iter().copied().collect())
}

/// Nearest point to `target` in the convex hull of `points`.
/// Returns the distance and the convex weights over `points`.
pub fn nearest_in_hull(points: &[Vec<f64>], target: &[f64]) -> (f64, Vec<f64>) {
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(target).map(|(a, b)| a - b).collect())
        .collect();
    let scale = shifted
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-14 * scale;

    let start = (0..shifted.len())
        .min_by(|&i, &j| dot(&shifted[i], &shifted[i]).total_cmp(&dot(&shifted[j], &shifted[j])))
        .expect("at least one point");
    let mut support = vec![start];
    let mut lambda = vec![1.0];
    let mut x = shifted[start].clone();

    let combine = |support: &[usize], lambda: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; target.len()];
        for (&k, &l) in support.iter().zip(lambda) {
            for (xi, p) in x.iter_mut().zip(&shifted[k]) {
                *xi += l * p;
            }
        }
        x
    };

    for _ in 0..MAX_OUTER {
        let xx = dot(&x, &x);
        let (j, xpj) = (0..shifted.len())
            .map(|j| (j, dot(&x, &shifted[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xpj <= eps || xx <= eps || support.contains(&j) {
            break;
        }
        support.push(j);
        lambda.push(0.0);

        loop {
            let pts: Vec<&Vec<f64>> = support.iter().map(|&k| &shifted[k]).collect();
            let Some(mu) = affine_min_norm(&pts) else {
                break;
            };
            if mu.iter().all(|&m| m > 1e-14) {
                lambda = mu;
                x = combine(&support, &lambda);
                break;
            }
            let mut theta = 1.0f64;
            for (&l, &m) in lambda.iter().zip(&mu) {
                if m <= 1e-14 && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-14).collect();
            let mut i = 0;
            support.retain(|_| {
                i += 1;
                keep[i - 1]
            });
            let mut i = 0;
            lambda.retain(|_| {
                i += 1;
                keep[i - 1]
            });
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(&support, &lambda);
            if support.len() <= 1 {
                break;
            }
        }
    }

    let mut weights = vec![0.0; points.len()];
    for (&k, &l) in support.iter().zip(&lambda) {
        weights[k] += l;
    }
    let x = combine(&support, &lambda);
    (dot(&x, &x).sqrt(), weights)
}

/// Euclidean distance from `b` to the local polytope in coordinate space,
/// with the weights over [`super::enumerate_local_vertices`] attaining it.
pub fn local_distance(b: &ProbBox) -> Result<(f64, Vec<f64>)> {
    let vertices = vertex_coordinates(b)?;
    Ok(nearest_in_hull(&vertices, &b.coordinates()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, probs_from_correlators, BoxLabel};
    use proptest::prelude::*;

    #[test]
    fn square_projection() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        let (d, _) = nearest_in_hull(&pts, &[0.5, 0.5]);
        assert!(d < 1e-12);
        let (d, w) = nearest_in_hull(&pts, &[2.0, 0.5]);
        assert!((d - 1.0).abs() < 1e-12);
        assert!((w[1] + w[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_distance_to_local_polytope() {
        // Nearest local point is the CHSH facet point (1/√2)·PTB correlators
        // scaled to CHSH = 2: correlators ±1/√2 → ±1/2, distance 2·(1/√2 − 1/2).
        let b = probs_from_correlators(&canonical_box(BoxLabel::Tsirelson)).unwrap();
        let (d, _) = local_distance(&b).unwrap();
        let expected = 2.0 * (0.5f64.sqrt() - 0.5);
        assert!((d - expected).abs() < 1e-9, "{d} vs {expected}");
    }

    proptest! {
        #[test]
        fn distance_matches_brute_force_on_segments(
            a in prop::collection::vec(-2.0..2.0f64, 3),
            b in prop::collection::vec(-2.0..2.0f64, 3),
            t in prop::collection::vec(-2.0..2.0f64, 3),
        ) {
            let (d, w) = nearest_in_hull(&[a.clone(), b.clone()], &t);
            // segment projection oracle
            let ab: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
            let at: Vec<f64> = t.iter().zip(&a).map(|(x, y)| x - y).collect();
            let len2 = dot(&ab, &ab);
            let s = if len2 > 0.0 { (dot(&at, &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let p: Vec<f64> = a.iter().zip(&ab).map(|(x, y)| x + s * y).collect();
            let want = p.iter().zip(&t).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            prop_assert!((d - want).abs() < 1e-9);
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
