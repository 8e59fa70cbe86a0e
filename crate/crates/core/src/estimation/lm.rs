// Copyright 2026 the Trackmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Levenberg-Marquardt for small dense problems.
//!
//! Minimizes `F(x) = |r(x)|²`. The damping starts at `λ₀ = τ max diag(JᵀJ)`
//! and follows the gain-ratio rule: a step is accepted when the actual
//! reduction of `F` is positive, after which `λ` shrinks by
//! `max(1/3, 1 - (2ρ - 1)³)`; a rejected step multiplies `λ` by `ν` and
//! doubles `ν`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Residual vector of a least-squares problem.
pub trait LeastSquaresProblem<T: Real>: Sync {
    fn parameter_count(&self) -> usize;
    fn residual_count(&self) -> usize;
    fn residuals(&self, x: &[T]) -> Result<Vec<T>>;
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols + j] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `(JᵀJ, Jᵀr)`.
    fn normal_equations(&self, r: &[T]) -> (Matrix<T>, Vec<T>) {
        let n = self.cols;
        let mut a = Matrix::zeros(n, n);
        let mut g = vec![T::zero(); n];
        for (row, &ri) in self.data.chunks_exact(n.max(1)).zip(r) {
            for p in 0..n {
                if row[p] == T::zero() {
                    continue;
                }
                g[p] = g[p] + row[p] * ri;
                for q in p..n {
                    a.data[p * n + q] = a.data[p * n + q] + row[p] * row[q];
                }
            }
        }
        for p in 0..n {
            for q in 0..p {
                a.data[p * n + q] = a.data[q * n + p];
            }
        }
        (a, g)
    }
}

/// Solves `(A + λI) h = b` by Cholesky; `None` when the damped matrix is not
/// numerically positive definite.
fn solve_damped<T: Real>(a: &Matrix<T>, lambda: T, scale: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = a.get(j, j) + lambda * scale[j];
        for k in 0..j {
            d = d - l[j * n + k] * l[j * n + k];
        }
        if !d.is_finite() || d <= T::zero() {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l[i * n + k] * y[k];
        }
        y[i] = y[i] / l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = y[i] - l[k * n + i] * y[k];
        }
        y[i] = y[i] / l[i * n + i];
    }
    y.iter().all(|v| v.is_finite()).then_some(y)
}

/// Running maximum of `diag(JᵀJ)`, floored so that parameters without
/// curvature are still damped.
fn update_scale<T: Real>(scale: &mut [T], a: &Matrix<T>, max_diag: T, reset: bool) {
    let floor = (max_diag * T::lit(1e-12)).max(T::min_positive_value());
    for (j, d) in scale.iter_mut().enumerate() {
        let v = a.get(j, j).max(floor);
        *d = if reset { v } else { d.max(v) };
    }
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt()
}

fn sum_sq<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + *x * *x)
}

/// Forward-difference Jacobian with `h_j = step · max(1, |x_j|)`.
pub fn jacobian_fd<T: Real, P: LeastSquaresProblem<T>>(problem: &P, x: &[T], step: T) -> Result<Matrix<T>> {
    let base = problem.residuals(x)?;
    jacobian_at(problem, x, &base, step)
}

fn jacobian_at<T: Real, P: LeastSquaresProblem<T>>(problem: &P, x: &[T], base: &[T], step: T) -> Result<Matrix<T>> {
    let columns: Result<Vec<Vec<T>>> = (0..x.len())
        .into_par_iter()
        .map(|j| {
            let h = step * x[j].abs().max(T::one());
            let mut probe = x.to_vec();
            probe[j] = x[j] + h;
            // the actual increment, after rounding
            let h = probe[j] - x[j];
            let r = problem.residuals(&probe).map_err(|e| Error::Probe {
                index: j,
                source: Box::new(e),
            })?;
            if r.len() != base.len() {
                return Err(Error::Probe {
                    index: j,
                    source: Box::new(Error::Input("residual length changed".into())),
                });
            }
            Ok(r.iter().zip(base).map(|(a, b)| (*a - *b) / h).collect())
        })
        .collect();
    Ok(Matrix::from_columns(base.len(), &columns?))
}

/// Solver settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmConfig {
    /// Initial damping scale τ.
    pub tau: f64,
    /// Initial damping growth factor ν.
    pub nu: f64,
    /// Stop when `|Δx| <= tol (|x| + tol)`.
    pub relative_step_tolerance: f64,
    /// Stop when `|Jᵀr|∞` falls below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Relative forward-difference step.
    pub fd_step: f64,
    pub damping: Damping,
}

/// Shape of the damping term added to `JᵀJ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    /// `λ I` with `λ₀ = τ max diag(JᵀJ)`.
    #[default]
    Identity,
    /// `λ D` with `D` the running maximum of `diag(JᵀJ)` and `λ₀ = τ`.
    /// Invariant to the units of individual parameters.
    Diagonal,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            tau: 1e-3,
            nu: 2.0,
            relative_step_tolerance: 1e-6,
            gradient_tolerance: 1e-10,
            max_iterations: 100,
            fd_step: 1e-6,
            damping: Damping::Identity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    RelativeStep,
    Gradient,
    MaxIterations,
}

impl Termination {
    pub fn converged(self) -> bool {
        !matches!(self, Termination::MaxIterations)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::RelativeStep => "relative_step",
            Termination::Gradient => "gradient",
            Termination::MaxIterations => "max_iterations",
        }
    }
}

/// One pass of the solver loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `F` at the current iterate after this pass.
    pub cost: f64,
    pub step_norm: f64,
    /// Damping used for the step.
    pub lambda: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmReport<T> {
    pub x: Vec<T>,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub history: Vec<IterationRecord>,
    pub termination: Termination,
    pub iterations: usize,
    pub residual_evaluations: usize,
}

impl<T: Real> LmReport<T> {
    /// Costs after each accepted pass, starting with the initial cost.
    pub fn accepted_costs(&self) -> Vec<f64> {
        std::iter::once(self.initial_cost)
            .chain(self.history.iter().filter(|r| r.accepted).map(|r| r.cost))
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.accepted_costs().windows(2).all(|w| w[1] <= w[0])
    }

    /// Decrease of `F` at each accepted pass.
    pub fn accepted_decreases(&self) -> Vec<f64> {
        self.accepted_costs().windows(2).map(|w| w[0] - w[1]).collect()
    }
}

/// Runs Levenberg-Marquardt from `x0`.
pub fn levenberg_marquardt<T: Real, P: LeastSquaresProblem<T>>(
    problem: &P,
    x0: &[T],
    config: &LmConfig,
) -> Result<LmReport<T>> {
    let mut x = x0.to_vec();
    let mut r = problem
        .residuals(&x)
        .map_err(|e| Error::Initialization(format!("residuals at the start point: {e}")))?;
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::Initialization("non-finite residual at the start point".into()));
    }
    let mut evaluations = 1;
    let mut cost = sum_sq(&r);
    let initial_cost = cost.to_f64_lossy();
    let step = T::lit(config.fd_step);
    let tol = T::lit(config.relative_step_tolerance);

    let mut history = Vec::new();
    let mut termination = Termination::MaxIterations;
    let mut iteration = 0;
    if config.max_iterations > 0 {
        let mut jac = jacobian_at(problem, &x, &r, step)?;
        evaluations += x.len();
        let (mut a, mut g) = jac.normal_equations(&r);
        let max_diag = (0..a.rows()).fold(T::zero(), |m, i| m.max(a.get(i, i)));
        let mut scale = vec![T::one(); a.rows()];
        let mut lambda = T::lit(config.tau);
        match config.damping {
            Damping::Identity => {
                if max_diag > T::zero() {
                    lambda = lambda * max_diag;
                }
            }
            Damping::Diagonal => update_scale(&mut scale, &a, max_diag, true),
        }
        let mut nu = T::lit(config.nu);

        while iteration < config.max_iterations {
            iteration += 1;
            let grad_inf = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if grad_inf < T::lit(config.gradient_tolerance) {
                termination = Termination::Gradient;
                break;
            }
            let neg_g: Vec<T> = g.iter().map(|v| -*v).collect();
            let mut attempts = 0;
            let h = loop {
                if let Some(h) = solve_damped(&a, lambda, &scale, &neg_g) {
                    break h;
                }
                attempts += 1;
                if attempts > 60 {
                    return Err(Error::Solve {
                        lambda: lambda.to_f64_lossy(),
                        nu: nu.to_f64_lossy(),
                    });
                }
                lambda = lambda * nu;
                nu = nu * T::lit(2.0);
            };
            let step_norm = norm(&h);
            if step_norm <= tol * (norm(&x) + tol) {
                termination = Termination::RelativeStep;
                history.push(IterationRecord {
                    iteration,
                    cost: cost.to_f64_lossy(),
                    step_norm: step_norm.to_f64_lossy(),
                    lambda: lambda.to_f64_lossy(),
                    accepted: false,
                });
                break;
            }
            let trial: Vec<T> = x.iter().zip(&h).map(|(a, b)| *a + *b).collect();
            evaluations += 1;
            let trial_r = problem
                .residuals(&trial)
                .ok()
                .filter(|r| r.iter().all(|v| v.is_finite()));
            let predicted = h
                .iter()
                .zip(&g)
                .zip(&scale)
                .fold(T::zero(), |acc, ((hi, gi), di)| acc + *hi * (lambda * *di * *hi - *gi));
            let (accepted, used_lambda) = match trial_r {
                Some(tr) => {
                    let trial_cost = sum_sq(&tr);
                    let rho = (cost - trial_cost) / predicted;
                    if rho > T::zero() && trial_cost <= cost {
                        let used = lambda;
                        x = trial;
                        r = tr;
                        cost = trial_cost;
                        jac = jacobian_at(problem, &x, &r, step)?;
                        evaluations += x.len();
                        let ne = jac.normal_equations(&r);
                        a = ne.0;
                        g = ne.1;
                        if config.damping == Damping::Diagonal {
                            let max_diag = (0..a.rows()).fold(T::zero(), |m, i| m.max(a.get(i, i)));
                            update_scale(&mut scale, &a, max_diag, false);
                        }
                        let two = T::lit(2.0);
                        let t = two * rho - T::one();
                        lambda = lambda * (T::one() - t * t * t).max(T::one() / T::lit(3.0));
                        nu = two;
                        (true, used)
                    } else {
                        (false, lambda)
                    }
                }
                None => (false, lambda),
            };
            if !accepted {
                lambda = lambda * nu;
                nu = nu * T::lit(2.0);
            }
            history.push(IterationRecord {
                iteration,
                cost: cost.to_f64_lossy(),
                step_norm: step_norm.to_f64_lossy(),
                lambda: used_lambda.to_f64_lossy(),
                accepted,
            });
        }
    }

    let report = LmReport {
        x,
        initial_cost,
        final_cost: cost.to_f64_lossy(),
        history,
        termination,
        iterations: iteration,
        residual_evaluations: evaluations,
    };
    debug_assert!(report.is_monotone());
    Ok(report)
}
