//! Step computations for the inner iteration.
//!
//! With `d = P_X(x - grad F~(x, mu)) - x` the inner loop terminates once
//! `||d|| <= mu`; otherwise one of three steps is taken, all of which respect
//! the trust rows
//!
//! ```text
//! (A (x_k - x))_m <= mu                    for residuals below -mu,
//! (A (x_k - x))_m >= -(b - A x_k)_m / 2    for residuals above 2 mu,
//! ```
//!
//! on which the quadratic model majorizes the smoothed objective:
//!
//! - `Proj`: closed-form shrink projection step `x + xi tau d` with the
//!   trust-scaled `tau = mu / ((max_m ||a_m|| + 1) ||d||)` and the clipped
//!   univariate minimizer `xi`;
//! - `Snorm`: minimize the model over `X` intersected with the scaled
//!   infinity-norm trust region `||A (x - x_k)||_inf <= mu`;
//! - `Exact`: minimize the model over `X` and the trust rows themselves.
//!
//! The achieved decrease is ordered `Exact >= Snorm >= Proj`, and in
//! known-Lipschitz mode every step with `||d|| > mu` decreases the smoothed
//! objective by at least `mu^(4-q) / J0`.
//!
//! A Euclidean-ball trust region would satisfy the same decrease guarantee;
//! only the scaled infinity-norm region is implemented (its rows are linear,
//! so the subproblem stays a QP).

use alloc::vec::Vec;

use crate::error::Error;
use crate::geometry::{solve_qp, QpProblem};
use crate::linalg::{axpy, dot, norm2, Mat};
use crate::model::{curvature_quadform, QuadraticModel};
use crate::problems::ProblemSpec;
use crate::smoothing::{check_mu, SmoothedObjective};

/// Which subproblem the inner iteration solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Closed-form shrink projection gradient step.
    Proj,
    /// Scaled infinity-norm trust-region subproblem.
    Snorm,
    /// The exact subproblem on the trust rows.
    Exact,
}

/// Outcome of one inner step.
#[derive(Debug, Clone)]
pub struct StepResult {
    /// The new iterate (feasible to `X` and the trust rows).
    pub next: Vec<f64>,
    /// `F~(x_k, mu) - F~(next, mu)`.
    pub decrease: f64,
    /// `||d||` at the current iterate.
    pub residual_norm: f64,
    /// Trust scaling `tau`.
    pub tau: f64,
    /// Clipped line-search coefficient (`Proj` mode only).
    pub xi: Option<f64>,
}

/// `d = P_X(x - grad F~(x, mu)) - x`; the inner loop terminates when
/// `||d|| <= mu`.
pub fn residual_direction(problem: &ProblemSpec, x: &[f64], mu: f64) -> Result<Vec<f64>, Error> {
    let g = SmoothedObjective::new(problem, mu)?.gradient(x)?;
    let mut shifted = x.to_vec();
    axpy(-1.0, &g, &mut shifted);
    let projected = problem.set().project(&shifted)?;
    Ok(crate::linalg::sub(&projected, x))
}

/// Index sets of the trust rows: rows with residual strictly below `-mu` and
/// rows with residual strictly above `2 mu`. Boundary rows belong to neither.
pub fn index_sets_mu(
    problem: &ProblemSpec,
    x: &[f64],
    mu: f64,
) -> Result<(Vec<usize>, Vec<usize>), Error> {
    check_mu(mu)?;
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "index set point",
            expected: problem.dim(),
            actual: x.len(),
        });
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (m, r) in problem.residuals(x).into_iter().enumerate() {
        if r < -mu {
            low.push(m);
        } else if r > 2.0 * mu {
            high.push(m);
        }
    }
    Ok((low, high))
}

/// Compute one inner step of the requested kind.
///
/// Requires `||d|| > mu` (otherwise the inner loop should have terminated)
/// and a positive-definite model Hessian, i.e. `l_term > 0` or a curvature
/// contribution from the composite term; `l_term = 0` is accepted and only
/// the closed-form step handles it specially.
pub fn step(
    problem: &ProblemSpec,
    x: &[f64],
    mu: f64,
    l_term: f64,
    mode: StepMode,
) -> Result<StepResult, Error> {
    check_mu(mu)?;
    let smoothed = SmoothedObjective::new(problem, mu)?;
    let gradient = smoothed.gradient(x)?;
    let d = {
        let mut shifted = x.to_vec();
        axpy(-1.0, &gradient, &mut shifted);
        let projected = problem.set().project(&shifted)?;
        crate::linalg::sub(&projected, x)
    };
    let dnorm = norm2(&d);
    if dnorm <= mu {
        return Err(Error::Precondition(
            "step requested although the inner termination test holds",
        ));
    }
    let tau = mu / ((problem.max_row_norm() + 1.0) * dnorm);
    let value_here = smoothed.value(x)?;

    let (next, xi) = match mode {
        StepMode::Proj => {
            let quad = curvature_quadform(problem, x, mu, &d)? + l_term * dnorm * dnorm;
            let slope = dot(&d, &gradient);
            let xi = if tau * quad > 0.0 {
                (-slope / (tau * quad)).clamp(0.0, 1.0)
            } else {
                // flat model along d: the univariate minimizer clips at 1
                1.0
            };
            let mut next = x.to_vec();
            axpy(xi * tau, &d, &mut next);
            (next, Some(xi))
        }
        StepMode::Snorm => {
            let model = QuadraticModel::build(problem, x, mu, l_term)?;
            let (h, c) = model.qp_terms();
            let a = problem.matrix();
            let ax = a.matvec(x);
            let mut rhs = Vec::with_capacity(2 * problem.num_rows());
            let mut stacked: Vec<Vec<f64>> = Vec::with_capacity(2 * problem.num_rows());
            for (m, axm) in ax.iter().enumerate() {
                stacked.push(a.row(m).to_vec());
                rhs.push(mu + axm);
            }
            for (m, axm) in ax.iter().enumerate() {
                stacked.push(a.row(m).iter().map(|v| -v).collect());
                rhs.push(mu - axm);
            }
            let set = problem
                .set()
                .with_extra_rows(&Mat::from_rows(&stacked)?, &rhs)?;
            let sol = solve_qp(&QpProblem::new(h, c, set)?)?;
            (sol.x, None)
        }
        StepMode::Exact => {
            let model = QuadraticModel::build(problem, x, mu, l_term)?;
            let (h, c) = model.qp_terms();
            let (low, high) = index_sets_mu(problem, x, mu)?;
            let a = problem.matrix();
            let ax = a.matvec(x);
            let res = problem.residuals(x);
            let mut stacked = Vec::with_capacity(low.len() + high.len());
            let mut rhs = Vec::with_capacity(low.len() + high.len());
            for &m in &low {
                // (A (x_k - x'))_m <= mu  <=>  -a_m' x' <= mu - a_m' x_k
                stacked.push(a.row(m).iter().map(|v| -v).collect::<Vec<f64>>());
                rhs.push(mu - ax[m]);
            }
            for &m in &high {
                // (A (x_k - x'))_m >= -(b - A x_k)_m / 2
                //   <=>  a_m' x' <= a_m' x_k + (b - A x_k)_m / 2
                stacked.push(a.row(m).to_vec());
                rhs.push(ax[m] + res[m] / 2.0);
            }
            let set = if stacked.is_empty() {
                problem.set().clone()
            } else {
                problem
                    .set()
                    .with_extra_rows(&Mat::from_rows(&stacked)?, &rhs)?
            };
            let sol = solve_qp(&QpProblem::new(h, c, set)?)?;
            (sol.x, None)
        }
    };

    let decrease = value_here - smoothed.value(&next)?;
    Ok(StepResult {
        next,
        decrease,
        residual_norm: dnorm,
        tau,
        xi,
    })
}
