//! Dense strictly convex QP solver.
//!
//! Solves `min 1/2 x' H x + c' x` over a [`Polyhedron`] with a dual
//! active-set method in the Goldfarb-Idnani style: start from the
//! unconstrained minimizer, repeatedly add the most violated constraint
//! (taking dual steps that drop blocking constraints along the way), and stop
//! when every constraint holds. Strict convexity of `H` makes every
//! intermediate subproblem uniquely solvable and the iteration finite; an
//! infinite dual step certifies infeasibility.
//!
//! Pivot rule: most violated constraint (violation scaled by `1 + ||row||`)
//! enters; after `3 (n + rows)` pivots the rule falls back to lowest-index
//! selection, and a hard budget of ten times that trips a numerical-failure
//! error. On termination the solution is polished by re-solving the
//! equality-constrained KKT system on the final active set, and the KKT
//! residual is verified against `1e-10 * (1 + ||c||)`.

use alloc::vec;
use alloc::vec::Vec;

use super::{constraint_list, max_violation_scaled, ConstraintList, Polyhedron, FEAS_TOL};
use crate::error::Error;
use crate::linalg::{axpy, dot, norm2, Cholesky, Mat};
use crate::math;

/// Relative KKT residual the solver guarantees on success.
pub const KKT_TOL: f64 = 1e-10;

/// Strictly convex quadratic program `min 1/2 x' H x + c' x, x in set`.
#[derive(Debug, Clone)]
pub struct QpProblem {
    hessian: Mat,
    linear: Vec<f64>,
    set: Polyhedron,
}

impl QpProblem {
    pub fn new(hessian: Mat, linear: Vec<f64>, set: Polyhedron) -> Result<Self, Error> {
        if hessian.rows() != hessian.cols() {
            return Err(Error::DimensionMismatch {
                what: "QP Hessian",
                expected: hessian.rows(),
                actual: hessian.cols(),
            });
        }
        if hessian.rows() != linear.len() {
            return Err(Error::DimensionMismatch {
                what: "QP linear term",
                expected: hessian.rows(),
                actual: linear.len(),
            });
        }
        if set.dim() != linear.len() {
            return Err(Error::DimensionMismatch {
                what: "QP feasible set",
                expected: linear.len(),
                actual: set.dim(),
            });
        }
        if hessian.asymmetry() > 1e-10 {
            return Err(Error::Domain("QP Hessian must be symmetric"));
        }
        Ok(QpProblem {
            hessian,
            linear,
            set,
        })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.hessian.matvec(x)) + dot(&self.linear, x)
    }

    pub fn set(&self) -> &Polyhedron {
        &self.set
    }
}

/// Minimizer plus the active set and its multipliers (indexed into the
/// unified constraint list: general rows, then finite lower bounds, then
/// finite upper bounds).
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub active: Vec<usize>,
    pub multipliers: Vec<f64>,
}

struct DualState {
    x: Vec<f64>,
    active: Vec<usize>,
    lambda: Vec<f64>,
    /// `H^{-1} n_i` cached per active constraint.
    hinv_n: Vec<Vec<f64>>,
}

fn gram_solve(
    state: &DualState,
    list: &ConstraintList,
    rhs: &[f64],
) -> Result<Vec<f64>, Error> {
    let k = state.active.len();
    let mut b = Mat::zeros(k, k);
    for (i, &ci) in state.active.iter().enumerate() {
        for j in 0..k {
            b.set(i, j, dot(&list.normals[ci], &state.hinv_n[j]));
        }
    }
    // Symmetrize against round-off before factoring.
    for i in 0..k {
        for j in (i + 1)..k {
            let v = 0.5 * (b.get(i, j) + b.get(j, i));
            b.set(i, j, v);
            b.set(j, i, v);
        }
    }
    let chol = Cholesky::factor(&b)
        .map_err(|_| Error::NumericalFailure("degenerate active set in QP"))?;
    Ok(chol.solve(rhs))
}

/// Solve a strictly convex QP.
///
/// Fails with [`Error::Infeasible`] when the feasible set is empty, with a
/// numerical-failure error when the Hessian is not positive definite or the
/// pivot budget is exhausted.
pub fn solve_qp(problem: &QpProblem) -> Result<QpSolution, Error> {
    let n = problem.linear.len();
    let chol = Cholesky::factor(&problem.hessian)?;
    let list = constraint_list(&problem.set);
    let m = list.normals.len();

    let neg_c: Vec<f64> = problem.linear.iter().map(|v| -v).collect();
    let mut state = DualState {
        x: chol.solve(&neg_c),
        active: Vec::new(),
        lambda: Vec::new(),
        hinv_n: Vec::new(),
    };
    if m == 0 {
        return Ok(QpSolution {
            x: state.x,
            active: Vec::new(),
            multipliers: Vec::new(),
        });
    }

    let norms: Vec<f64> = list.normals.iter().map(|nrm| norm2(nrm)).collect();
    let bland_after = 3 * (n + m);
    let budget = 10 * bland_after.max(10);
    let mut pivots = 0usize;

    loop {
        // Entering constraint: most violated, Bland beyond the soft budget.
        let mut entering = None;
        let mut worst = 0.0;
        for (i, scale) in norms.iter().enumerate() {
            if state.active.contains(&i) {
                continue;
            }
            let slack = dot(&list.normals[i], &state.x) - list.offsets[i];
            let viol = -slack / (1.0 + scale);
            if viol > 1e-12 {
                if pivots >= bland_after {
                    entering = Some(i);
                    break;
                }
                if viol > worst {
                    worst = viol;
                    entering = Some(i);
                }
            }
        }
        let Some(p) = entering else {
            break;
        };

        let n_p = &list.normals[p];
        let hinv_np = chol.solve(n_p);
        let mut lambda_p = 0.0;

        // Add p, taking dual steps that drop blocking constraints on the way.
        loop {
            pivots += 1;
            if pivots > budget {
                return Err(Error::NumericalFailure("QP pivot budget exceeded"));
            }

            let k = state.active.len();
            let (r, z) = if k == 0 {
                (Vec::new(), hinv_np.clone())
            } else {
                let rhs: Vec<f64> = state
                    .active
                    .iter()
                    .map(|&ci| dot(&list.normals[ci], &hinv_np))
                    .collect();
                let r = gram_solve(&state, &list, &rhs)?;
                let mut z = hinv_np.clone();
                for (rj, u) in r.iter().zip(&state.hinv_n) {
                    axpy(-rj, u, &mut z);
                }
                (r, z)
            };

            // Dual blocking step over active constraints with r_j > 0.
            let mut t1 = f64::INFINITY;
            let mut blocking = None;
            for (j, rj) in r.iter().enumerate() {
                if *rj > 1e-13 {
                    let ratio = state.lambda[j] / rj;
                    if ratio < t1 {
                        t1 = ratio;
                        blocking = Some(j);
                    }
                }
            }

            // Full primal step that makes constraint p tight.
            let slack_p = dot(n_p, &state.x) - list.offsets[p];
            let ztn = dot(&z, n_p);
            let z_is_zero = ztn <= 1e-13 * (1.0 + norms[p] * norm2(&z));
            let t2 = if z_is_zero {
                f64::INFINITY
            } else {
                -slack_p / ztn
            };

            if t1 == f64::INFINITY && t2 == f64::INFINITY {
                return Err(Error::Infeasible);
            }

            if t2 <= t1 {
                // Full step: p becomes active and stays tight.
                axpy(t2, &z, &mut state.x);
                for (lj, rj) in state.lambda.iter_mut().zip(&r) {
                    *lj -= t2 * rj;
                }
                lambda_p += t2;
                state.active.push(p);
                state.lambda.push(lambda_p);
                state.hinv_n.push(hinv_np);
                break;
            }

            // Partial (or pure dual) step: drop the blocking constraint.
            let j = blocking.expect("finite t1 implies a blocking index");
            if t1.is_finite() && !z_is_zero {
                axpy(t1, &z, &mut state.x);
            }
            for (lj, rj) in state.lambda.iter_mut().zip(&r) {
                *lj -= t1 * rj;
            }
            lambda_p += t1;
            state.active.remove(j);
            state.lambda.remove(j);
            state.hinv_n.remove(j);
        }
    }

    polish_and_verify(problem, &chol, &list, state)
}

/// Solve the equality KKT system `H x - N lambda = -c`, `N' x = d_W` on the
/// active set, with iterative refinement to cope with ill-conditioned
/// Hessians (the model curvature grows like `mu^(q-2)` while the damping can
/// sit at its floor).
fn equality_kkt_solve(
    problem: &QpProblem,
    chol: &Cholesky,
    list: &ConstraintList,
    state: &DualState,
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let k = state.active.len();
    let n = problem.linear.len();
    let mut x = vec![0.0; n];
    let mut lambda = vec![0.0; k];
    // start from the zero pair and apply refinement steps; each step solves
    //   H dx - N dl = r1,  N' dx = r2
    // for the current residuals via the Schur complement on the Gram matrix.
    for _ in 0..3 {
        let mut r1: Vec<f64> = problem.linear.iter().map(|v| -v).collect();
        let hx = problem.hessian.matvec(&x);
        for (r, h) in r1.iter_mut().zip(&hx) {
            *r -= h;
        }
        for (l, &ci) in lambda.iter().zip(&state.active) {
            axpy(*l, &list.normals[ci], &mut r1);
        }
        let r2: Vec<f64> = state
            .active
            .iter()
            .map(|&ci| list.offsets[ci] - dot(&list.normals[ci], &x))
            .collect();
        let hinv_r1 = chol.solve(&r1);
        if k == 0 {
            axpy(1.0, &hinv_r1, &mut x);
            continue;
        }
        let rhs: Vec<f64> = state
            .active
            .iter()
            .zip(&r2)
            .map(|(&ci, r2i)| r2i - dot(&list.normals[ci], &hinv_r1))
            .collect();
        let dl = gram_solve(state, list, &rhs)?;
        // dx = H^-1 (r1 + N dl)
        let mut corr = r1;
        for (d, &ci) in dl.iter().zip(&state.active) {
            axpy(*d, &list.normals[ci], &mut corr);
        }
        let dx = chol.solve(&corr);
        axpy(1.0, &dx, &mut x);
        for (l, d) in lambda.iter_mut().zip(&dl) {
            *l += d;
        }
    }
    Ok((x, lambda))
}

/// Re-solve the equality KKT system on the final active set and verify the
/// stationarity, feasibility, complementarity, and sign conditions.
fn polish_and_verify(
    problem: &QpProblem,
    chol: &Cholesky,
    list: &ConstraintList,
    mut state: DualState,
) -> Result<QpSolution, Error> {
    // Polished solve; constraints whose multiplier comes out negative are
    // dropped (degenerate near-ties can park a redundant row in the set).
    for _ in 0..(state.active.len() + 1) {
        if state.active.is_empty() {
            break;
        }
        let (x, lambda) = match equality_kkt_solve(problem, chol, list, &state) {
            Ok(pair) => pair,
            Err(_) => break, // keep the dual iteration's own state
        };
        let scale = 1.0 + lambda.iter().fold(0.0_f64, |a, l| a.max(math::abs(*l)));
        if let Some(worst) = lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| **l < -1e-9 * scale)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| j)
        {
            state.active.remove(worst);
            state.lambda.remove(worst);
            state.hinv_n.remove(worst);
            continue;
        }
        if max_violation_scaled(list, &x) <= FEAS_TOL {
            state.x = x;
            state.lambda = lambda;
        }
        break;
    }
    for l in &mut state.lambda {
        if *l < 0.0 {
            *l = 0.0;
        }
    }

    // Stationarity: H x + c - sum lambda_i n_i.
    let mut grad = problem.hessian.matvec(&state.x);
    axpy(1.0, &problem.linear, &mut grad);
    for (l, &ci) in state.lambda.iter().zip(&state.active) {
        axpy(-l, &list.normals[ci], &mut grad);
    }
    let scale = 1.0 + norm2(&problem.linear);
    if norm2(&grad) > KKT_TOL * scale {
        return Err(Error::NumericalFailure("QP stationarity residual too large"));
    }
    if max_violation_scaled(list, &state.x) > FEAS_TOL {
        return Err(Error::NumericalFailure("QP primal feasibility lost"));
    }
    for (l, &ci) in state.lambda.iter().zip(&state.active) {
        let slack = dot(&list.normals[ci], &state.x) - list.offsets[ci];
        if math::abs(l * slack) > KKT_TOL * scale * (1.0 + math::abs(list.offsets[ci])) {
            return Err(Error::NumericalFailure("QP complementarity violated"));
        }
    }

    let mut multipliers = vec![0.0; list.normals.len()];
    for (l, &ci) in state.lambda.iter().zip(&state.active) {
        multipliers[ci] = *l;
    }
    Ok(QpSolution {
        x: state.x,
        active: state.active,
        multipliers,
    })
}
