//! Exponential-saturation fits of violation curves.
//!
//! Two models are supported:
//!
//! * [`SaturationModel::Anchored`]: `D(n) = C + A' e^{-B n}` with `C` eliminated
//!   through the exact constraint `D(2) = 2 sqrt 2 - 2`, leaving `(A', B)` free;
//! * [`SaturationModel::ThreeParam`]: `y = a + c e^{-b x}`.
//!
//! Both are solved by Levenberg-Marquardt with analytic Jacobians.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationModel {
    Anchored,
    ThreeParam,
}

impl SaturationModel {
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            SaturationModel::Anchored => &["a_prime", "b"],
            SaturationModel::ThreeParam => &["a", "b", "c"],
        }
    }

    fn arity(self) -> usize {
        self.parameter_names().len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least {needed} data points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("data point {index} is not finite")]
    NonFinite { index: usize },
    #[error("the data cannot determine {parameters} parameters ({distinct} distinct abscissae)")]
    SingularJacobian { parameters: usize, distinct: usize },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// The value `D(2)` the anchored model is pinned to.
pub fn anchor_value() -> f64 {
    2.0 * 2f64.sqrt() - 2.0
}

pub const ANCHOR_N: f64 = 2.0;

pub const MIN_POINTS: usize = 4;
const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: SaturationModel,
    /// Free parameters, named by [`SaturationModel::parameter_names`].
    pub parameters: Vec<(String, f64)>,
    /// Parameters fixed by constraints, with their delta-method standard errors
    /// (`C` for the anchored model).
    pub derived: Vec<(String, f64, f64)>,
    /// `sigma^2 (J^T J)^{-1}` over the free parameters, `sigma^2 = SSR / (m - p)`.
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .or_else(|| self.derived.iter().find(|(k, _, _)| k == name).map(|(_, v, _)| *v))
    }

    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|(_, v)| *v).collect()
    }

    pub fn predict(&self, x: f64) -> f64 {
        model_value(self.model, &self.values(), x)
    }
}

fn model_value(model: SaturationModel, p: &[f64], x: f64) -> f64 {
    match model {
        SaturationModel::Anchored => {
            let (a, b) = (p[0], p[1]);
            anchor_value() + a * ((-b * x).exp() - (-b * ANCHOR_N).exp())
        }
        SaturationModel::ThreeParam => p[0] + p[2] * (-p[1] * x).exp(),
    }
}

fn model_gradient(model: SaturationModel, p: &[f64], x: f64) -> Vec<f64> {
    match model {
        SaturationModel::Anchored => {
            let (a, b) = (p[0], p[1]);
            let (ex, e2) = ((-b * x).exp(), (-b * ANCHOR_N).exp());
            vec![ex - e2, a * (-x * ex + ANCHOR_N * e2)]
        }
        SaturationModel::ThreeParam => {
            let (b, c) = (p[1], p[2]);
            let ex = (-b * x).exp();
            vec![1.0, -c * x * ex, ex]
        }
    }
}

fn residuals(model: SaturationModel, p: &[f64], xs: &[f64], ys: &[f64]) -> DVector<f64> {
    DVector::from_iterator(xs.len(), xs.iter().zip(ys).map(|(&x, &y)| model_value(model, p, x) - y))
}

fn jacobian(model: SaturationModel, p: &[f64], xs: &[f64]) -> DMatrix<f64> {
    let k = model.arity();
    let mut j = DMatrix::zeros(xs.len(), k);
    for (row, &x) in xs.iter().enumerate() {
        for (col, g) in model_gradient(model, p, x).into_iter().enumerate() {
            j[(row, col)] = g;
        }
    }
    j
}

/// Decay rate guessed from successive ratios of first differences, which are
/// `e^{-b h}` for exact exponential data.
fn initial_rate(xs: &[f64], ys: &[f64]) -> f64 {
    let mut rates = Vec::new();
    for w in 0..xs.len().saturating_sub(2) {
        let (h1, h2) = (xs[w + 1] - xs[w], xs[w + 2] - xs[w + 1]);
        let (d1, d2) = ((ys[w + 1] - ys[w]) / h1, (ys[w + 2] - ys[w + 1]) / h2);
        if h1 > 0.0 && h2 > 0.0 && d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum() {
            let rate = -(d2 / d1).ln() / (0.5 * (h1 + h2));
            if rate.is_finite() && rate > 0.0 {
                rates.push(rate);
            }
        }
    }
    if rates.is_empty() {
        return 1.0;
    }
    rates.sort_by(f64::total_cmp);
    rates[rates.len() / 2]
}

/// Linear parameters minimizing the residual at fixed rate `b`.
fn linear_start(model: SaturationModel, b: f64, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    match model {
        SaturationModel::Anchored => {
            let e2 = (-b * ANCHOR_N).exp();
            let (mut num, mut den) = (0.0, 0.0);
            for (&x, &y) in xs.iter().zip(ys) {
                let basis = (-b * x).exp() - e2;
                num += basis * (y - anchor_value());
                den += basis * basis;
            }
            vec![if den > 0.0 { num / den } else { 0.0 }, b]
        }
        SaturationModel::ThreeParam => {
            let m = xs.len();
            let design = DMatrix::from_fn(m, 2, |i, j| if j == 0 { 1.0 } else { (-b * xs[i]).exp() });
            let y = DVector::from_column_slice(ys);
            let solved = design
                .clone()
                .svd(true, true)
                .solve(&y, 1e-12)
                .unwrap_or_else(|_| DVector::from_vec(vec![y.mean(), 0.0]));
            vec![solved[0], b, solved[1]]
        }
    }
}

fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eps = 1e-13 * m.norm().max(f64::MIN_POSITIVE);
    m.clone().pseudo_inverse(eps).unwrap_or_else(|_| DMatrix::zeros(m.nrows(), m.ncols()))
}

/// Least-squares fit of `model` to `(x, y)` data. The data order is irrelevant.
pub fn fit_saturation(data: &[(f64, f64)], model: SaturationModel) -> Result<FitResult, FitError> {
    if data.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints {
            needed: MIN_POINTS,
            got: data.len(),
        });
    }
    if let Some(index) = data.iter().position(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(FitError::NonFinite { index });
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let xs: Vec<f64> = sorted.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sorted.iter().map(|p| p.1).collect();

    let k = model.arity();
    let mut distinct = xs.clone();
    distinct.dedup();
    if distinct.len() < k {
        return Err(FitError::SingularJacobian {
            parameters: k,
            distinct: distinct.len(),
        });
    }

    let mut p = linear_start(model, initial_rate(&xs, &ys), &xs, &ys);
    let mut r = residuals(model, &p, &xs, &ys);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    loop {
        let j = jacobian(model, &p, &xs);
        let g = j.transpose() * &r;
        let jtj = j.transpose() * &j;
        if g.norm() <= 1e-10 * (r.norm() * j.norm()).max(f64::MIN_POSITIVE) || cost == 0.0 {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(FitError::NoConvergence { iterations });
        }
        iterations += 1;

        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj.clone();
            for i in 0..k {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
            let trial_r = residuals(model, &trial, &xs, &ys);
            let trial_cost = trial_r.norm_squared();
            if trial_cost.is_finite() && trial_cost <= cost {
                let small_step = step.norm() <= 1e-10 * (1.0 + DVector::from_column_slice(&p).norm());
                let small_gain = cost - trial_cost <= 1e-30 + 1e-14 * cost;
                p = trial;
                r = trial_r;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-12);
                improved = !(small_step && small_gain);
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no descent possible at machine precision: converged
            break;
        }
    }

    let j = jacobian(model, &p, &xs);
    let dof = (xs.len() - k).max(1) as f64;
    let sigma2 = cost / dof;
    let covariance = pseudo_inverse(&(j.transpose() * &j)) * sigma2;
    let covariance_rows: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|c| 0.5 * (covariance[(i, c)] + covariance[(c, i)])).collect())
        .collect();

    let derived = match model {
        SaturationModel::Anchored => {
            let (a, b) = (p[0], p[1]);
            let e2 = (-b * ANCHOR_N).exp();
            let c = anchor_value() - a * e2;
            let grad = DVector::from_vec(vec![-e2, a * ANCHOR_N * e2]);
            let var = (grad.transpose() * &covariance * &grad)[(0, 0)];
            vec![("c".to_string(), c, var.max(0.0).sqrt())]
        }
        SaturationModel::ThreeParam => Vec::new(),
    };

    Ok(FitResult {
        model,
        parameters: model
            .parameter_names()
            .iter()
            .zip(&p)
            .map(|(name, v)| (name.to_string(), *v))
            .collect(),
        derived,
        covariance: covariance_rows,
        residual_norm: cost.sqrt(),
        iterations,
    })
}
