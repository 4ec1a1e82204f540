//! Small unconstrained minimizers for least-squares problems with numeric
//! derivatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// `residuals(x)` is a fixed-length vector; the objective is its norm.
pub trait LeastSquares {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    fn residuals(&self, x: &[f64], out: &mut [f64]);

    fn norm(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.n_residuals()];
        self.residuals(x, &mut r);
        r.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Damped Gauss-Newton with a central-difference Jacobian.
    #[default]
    LevenbergMarquardt,
    /// Derivative-free simplex search on the residual norm.
    NelderMead,
    /// Steepest descent with a central-difference gradient and backtracking.
    GradientDescent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    /// Residual norm at `x`.
    pub value: f64,
    pub iterations: usize,
}

/// Runs `optimizer` from `x0`, stopping early once the residual norm drops
/// below `target`.
pub fn minimize<P: LeastSquares>(
    problem: &P,
    x0: &[f64],
    optimizer: Optimizer,
    max_iterations: usize,
    target: f64,
) -> Minimum {
    match optimizer {
        Optimizer::LevenbergMarquardt => levenberg_marquardt(problem, x0, max_iterations, target),
        Optimizer::NelderMead => nelder_mead(problem, x0, max_iterations, target),
        Optimizer::GradientDescent => gradient_descent(problem, x0, max_iterations, target),
    }
}

fn step_size(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

fn jacobian<P: LeastSquares>(problem: &P, x: &[f64], jac: &mut DMatrix<f64>) {
    let m = problem.n_residuals();
    let mut xp = x.to_vec();
    let mut rp = vec![0.0; m];
    let mut rm = vec![0.0; m];
    for j in 0..x.len() {
        let h = step_size(x[j]);
        xp[j] = x[j] + h;
        problem.residuals(&xp, &mut rp);
        xp[j] = x[j] - h;
        problem.residuals(&xp, &mut rm);
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

pub fn levenberg_marquardt<P: LeastSquares>(
    problem: &P,
    x0: &[f64],
    max_iterations: usize,
    target: f64,
) -> Minimum {
    let n = problem.n_params();
    let m = problem.n_residuals();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; m];
    problem.residuals(&x, &mut r);
    let mut cost = sq_norm(&r);
    let mut jac = DMatrix::<f64>::zeros(m, n);
    let mut mu = 1e-3;
    let mut nu = 2.0;
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; m];
    let mut iterations = 0;
    let target_cost = target * target;

    while iterations < max_iterations && cost > target_cost {
        iterations += 1;
        jacobian(problem, &x, &mut jac);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        if g.amax() < 1e-15 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                mu *= nu;
                nu *= 2.0;
                continue;
            };
            for i in 0..n {
                trial[i] = x[i] + delta[i];
            }
            problem.residuals(&trial, &mut r_trial);
            let c = sq_norm(&r_trial);
            // gain ratio against the linearized model ||r + J δ||²
            let predicted = -2.0 * g.dot(&delta) - (&jac * &delta).norm_squared();
            let rho = (cost - c) / predicted.max(f64::MIN_POSITIVE);
            if c.is_finite() && c < cost && rho > 0.0 {
                let small_step =
                    delta.amax() < 1e-14 * (1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs())));
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                let improvement = cost - c;
                cost = c;
                mu *= (1.0 / 3.0f64).max(1.0 - (2.0 * rho - 1.0).powi(3));
                mu = mu.max(1e-15);
                nu = 2.0;
                accepted = true;
                if small_step || improvement <= 1e-15 * cost {
                    return Minimum {
                        x,
                        value: cost.sqrt(),
                        iterations,
                    };
                }
                break;
            }
            mu *= nu;
            nu *= 2.0;
            if mu > 1e16 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    Minimum {
        x,
        value: cost.sqrt(),
        iterations,
    }
}

pub fn nelder_mead<P: LeastSquares>(
    problem: &P,
    x0: &[f64],
    max_iterations: usize,
    target: f64,
) -> Minimum {
    let n = x0.len();
    let f = |x: &[f64]| problem.norm(x);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += 0.25;
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    while iterations < max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 <= target || (simplex[n].1 - simplex[0].1).abs() < 1e-16 {
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = f(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
    }
}

pub fn gradient_descent<P: LeastSquares>(
    problem: &P,
    x0: &[f64],
    max_iterations: usize,
    target: f64,
) -> Minimum {
    let n = x0.len();
    let cost = |x: &[f64]| {
        let v = problem.norm(x);
        v * v
    };
    let mut x = x0.to_vec();
    let mut fx = cost(&x);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut grad = vec![0.0; n];
    let mut xp = x.clone();
    while iterations < max_iterations && fx.sqrt() > target {
        iterations += 1;
        for j in 0..n {
            let h = step_size(x[j]);
            xp[j] = x[j] + h;
            let fp = cost(&xp);
            xp[j] = x[j] - h;
            let fm = cost(&xp);
            xp[j] = x[j];
            grad[j] = (fp - fm) / (2.0 * h);
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| xi - step * g).collect();
            let ft = cost(&trial);
            if ft <= fx - 0.25 * step * g2 {
                x = trial;
                xp.copy_from_slice(&x);
                fx = ft;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Minimum {
        x,
        value: fx.sqrt(),
        iterations,
    }
}
