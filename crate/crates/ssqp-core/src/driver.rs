//! The two-level solve loop.
//!
//! Outer iterations shrink the smoothing parameter geometrically,
//! `mu_i = mu_0 sigma^i` with `mu_0 = epsilon / sigma^floor(log_sigma eps)`
//! chosen so the schedule lands on `epsilon` exactly. At each level the inner
//! loop runs until the projected-gradient residual of the smoothed problem
//! drops to `mu`:
//!
//! ```text
//! || P_X(x - grad F~(x, mu)) - x || <= mu,
//! ```
//!
//! taking one step per iteration (see [`crate::subproblems`]) and, in
//! adaptive mode, managing the Lipschitz estimate for `h`: steps whose
//! curvature ratio `r_k` exceeds one are re-solved with an inflated estimate,
//! accepted steps refresh it with a secant (BB) quotient clamped to the
//! configured bounds. In known-Lipschitz mode the estimate is pinned to the
//! true constant and the ratio test always passes.
//!
//! One iteration means one QP subproblem solve (re-solves included), and in
//! known-Lipschitz mode the total is bounded a priori by
//! `ceil(J_T^q eps^(q-4))`; see [`complexity_constants`].

use alloc::vec::Vec;

use crate::error::Error;
use crate::kkt::{eps_kkt_check, KktReport};
use crate::linalg::{dot, norm2, sub};
use crate::math;
use crate::problems::ProblemSpec;
use crate::smoothing::SmoothedObjective;
use crate::subproblems::{residual_direction, step, StepMode};

/// Damping floor for the pinned estimate in known-Lipschitz mode. The
/// framework requires strictly positive estimate bounds even when the true
/// constant is zero (zero or linear `h`): the QP subproblems need a strictly
/// convex Hessian. Any value at or above the true constant keeps every
/// one-sided bound valid, so the floor only perturbs the accounting
/// constants, never correctness.
pub const L_DAMPING_FLOOR: f64 = 1e-6;

/// How the Lipschitz constant of `grad h` enters the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMode {
    /// Use the declared constant everywhere; the ratio test is then always
    /// satisfied and the a-priori iteration bound is enforced.
    Known,
    /// Maintain a running estimate between the configured bounds, inflating
    /// on rejected steps.
    Adaptive,
}

/// Solver tunables.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target accuracy, in `(0, 1]`.
    pub epsilon: f64,
    /// Shrink factor for the smoothing parameter, in `(0, 1)`.
    pub sigma: f64,
    /// Inflation factor for rejected steps, `> 1`.
    pub eta: f64,
    /// Lipschitz-estimate bounds, `0 < l_min <= l_0 <= l_max`
    /// (adaptive mode only; known mode pins all three to the declared
    /// constant).
    pub l_min: f64,
    pub l_0: f64,
    pub l_max: f64,
    pub step_mode: StepMode,
    pub lipschitz_mode: LipschitzMode,
    /// Hard cap on QP solves; defaults to ten times the a-priori bound in
    /// known mode and to one million in adaptive mode.
    pub max_qp_solves: Option<u64>,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            sigma: 0.5,
            eta: 2.0,
            l_min: 1e-6,
            l_0: 1.0,
            l_max: 1e8,
            step_mode: StepMode::Proj,
            lipschitz_mode: LipschitzMode::Known,
            max_qp_solves: None,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidConfig("epsilon must lie in (0, 1]"));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidConfig("sigma must lie in (0, 1)"));
        }
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig("eta must be finite and > 1"));
        }
        if !(self.l_min > 0.0 && self.l_min <= self.l_0 && self.l_0 <= self.l_max) {
            return Err(Error::InvalidConfig(
                "Lipschitz bounds require 0 < l_min <= l_0 <= l_max",
            ));
        }
        Ok(())
    }
}

/// One row per QP subproblem solve (rejected steps included).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub qp_solve: u64,
    pub outer_i: u32,
    pub mu: f64,
    /// Smoothed objective at the current center, before the step.
    pub f_tilde: f64,
    /// Decrease achieved by the candidate step.
    pub decrease: f64,
    /// `||d||` at the current center.
    pub residual_norm: f64,
    /// Curvature ratio of the candidate step.
    pub r_k: f64,
    /// Lipschitz estimate used for the step.
    pub l_hk: f64,
}

/// A-priori iteration accounting for a given problem, start point, and
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityConstants {
    /// Max executions of the step computation per inner iterate.
    pub k0: u64,
    /// Per-step decrease constant: decrease is at least `mu^(4-q) / j0`.
    pub j0: f64,
    /// Upper bound on every Lipschitz estimate the loop can produce.
    pub l_bar: f64,
    /// Total-work constant of the `eps^(q-4)` bound.
    pub j_t_q: f64,
    /// `ceil(j_t_q * eps^(q-4))`.
    pub bound: u64,
}

/// Solve outcome.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vec<f64>,
    /// Final smoothing parameter; equals `epsilon` exactly.
    pub mu_final: f64,
    /// Total QP subproblem solves (one per step computation).
    pub qp_solves: u64,
    /// Total inner termination tests.
    pub termination_checks: u64,
    pub trace: Vec<TraceRecord>,
    pub kkt: KktReport,
    /// The a-priori cap on `qp_solves` (valid in known-Lipschitz mode).
    pub bound: u64,
}

/// Ceiling with a relative guard, so values that are integers up to
/// round-off do not get bumped to the next integer.
fn ceil_guard(x: f64) -> f64 {
    let r = math::round(x);
    if math::abs(x - r) <= 1e-9 * math::abs(x).max(1.0) {
        r
    } else {
        math::ceil(x)
    }
}

/// Largest `i` with `sigma^i >= epsilon`, by integer search with a relative
/// guard (floating logarithms misclassify exact powers).
fn outer_levels(epsilon: f64, sigma: f64) -> Result<u32, Error> {
    let guard = 1.0 - 1e-14;
    let mut i: u32 = 0;
    let mut pw = 1.0_f64;
    while pw * sigma >= epsilon * guard {
        pw *= sigma;
        i += 1;
        if i > 2_000_000 {
            return Err(Error::InvalidConfig(
                "mu schedule too long: sigma is too close to 1 for this epsilon",
            ));
        }
    }
    Ok(i)
}

/// Initial smoothing parameter `mu_0 = epsilon / sigma^floor(log_sigma eps)`,
/// always in `(sigma, 1]`, chosen so that the geometric schedule reproduces
/// `epsilon` exactly in floating point.
pub fn mu0(epsilon: f64, sigma: f64) -> Result<f64, Error> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidConfig("epsilon must lie in (0, 1]"));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidConfig("sigma must lie in (0, 1)"));
    }
    let i0 = outer_levels(epsilon, sigma)?;
    // epsilon sitting a round-off below an exact power of sigma is counted
    // as that power by the search guard; the true value there is 1
    Ok((epsilon / math::pow_int(sigma, i0)).min(1.0))
}

/// The smoothing parameter at level `i`: `epsilon / sigma^(i0 - i)`, which
/// makes the last level equal `epsilon` bit-for-bit.
fn mu_at_level(epsilon: f64, sigma: f64, i0: u32, i: u32) -> f64 {
    (epsilon / math::pow_int(sigma, i0 - i)).min(1.0)
}

/// The constants of the worst-case iteration bound.
///
/// `k0 = ceil(log_eta(L_h / l_min)) + 1` caps step re-solves per iterate,
/// `l_bar = max{l_0, l_max, eta L_h}` caps the Lipschitz estimate,
/// `j0 = max{8 q sum ||a_m||^2 + 2 l_bar, 2 max ||a_m|| + 2}` converts the
/// cap into a per-step decrease `mu^(4-q) / j0`, and the total bound is
/// `ceil(j_t_q eps^(q-4))` with
/// `j_t_q = sigma^(q-4) (F~(x0, 1) j0 k0 + 1) / (sigma^(q-4) - 1)`.
///
/// `x0` must be the feasible start point the solve actually uses.
pub fn complexity_constants(
    problem: &ProblemSpec,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<ComplexityConstants, Error> {
    config.validate()?;
    let q = problem.q();
    let l_h = problem.lipschitz().max(0.0).max(L_DAMPING_FLOOR);
    let (l_min_eff, l_0_eff, l_max_eff) = match config.lipschitz_mode {
        LipschitzMode::Known => (l_h, l_h, l_h),
        LipschitzMode::Adaptive => (config.l_min, config.l_0, config.l_max),
    };
    let k0 = if l_h <= l_min_eff {
        1
    } else {
        ceil_guard(math::ln(l_h / l_min_eff) / math::ln(config.eta)).max(0.0) as u64 + 1
    };
    let l_bar = l_0_eff.max(l_max_eff).max(config.eta * l_h);
    let j0 = (8.0 * q * problem.sum_row_norms_sq() + 2.0 * l_bar)
        .max(2.0 * problem.max_row_norm() + 2.0);
    let f0 = SmoothedObjective::new(problem, 1.0)?.value(x0)?;
    let s = math::powf(config.sigma, q - 4.0);
    let j_t_q = s * (f0 * j0 * k0 as f64 + 1.0) / (s - 1.0);
    let bound_f = ceil_guard(j_t_q * math::powf(config.epsilon, q - 4.0));
    let bound = if bound_f >= u64::MAX as f64 {
        u64::MAX
    } else {
        bound_f.max(0.0) as u64
    };
    Ok(ComplexityConstants {
        k0,
        j0,
        l_bar,
        j_t_q,
        bound,
    })
}

/// Curvature ratio of a candidate step:
/// `(h(next) - h(x) - grad h(x)'(next - x)) / (L/2 ||next - x||^2)`.
///
/// Zero-length steps (and linear `h` with a zero estimate) count as accepted:
/// the ratio there is 0/0 and a zero step means the termination test fires
/// next.
pub fn ratio_rk(problem: &ProblemSpec, x: &[f64], next: &[f64], l: f64) -> f64 {
    let s = sub(next, x);
    let ss = dot(&s, &s);
    if ss <= 1e-16 * (1.0 + dot(x, x)) {
        return 0.0;
    }
    let numerator = problem.h_value(next) - problem.h_value(x) - dot(&problem.h_gradient(x), &s);
    let denominator = 0.5 * l * ss;
    if denominator <= 0.0 {
        return if numerator <= 1e-14 * (1.0 + math::abs(problem.h_value(x))) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    numerator / denominator
}

/// Run the solver.
///
/// `x0` is projected onto the feasible set at entry if it is not already a
/// member. The returned point satisfies the inner termination test at
/// `mu = epsilon` and carries an epsilon-KKT certificate.
pub fn solve(
    problem: &ProblemSpec,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveResult, Error> {
    config.validate()?;
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "start point",
            expected: problem.dim(),
            actual: x0.len(),
        });
    }
    let set = problem.set();
    let mut x = if set.contains(x0) {
        x0.to_vec()
    } else {
        set.project(x0)?
    };

    let epsilon = config.epsilon;
    let sigma = config.sigma;
    let i0 = outer_levels(epsilon, sigma)?;
    let constants = complexity_constants(problem, &x, config)?;
    let budget = config.max_qp_solves.unwrap_or(match config.lipschitz_mode {
        LipschitzMode::Known => constants.bound.saturating_mul(10),
        LipschitzMode::Adaptive => 1_000_000,
    });

    let l_known = problem.lipschitz().max(0.0).max(L_DAMPING_FLOOR);
    let mut l_est = match config.lipschitz_mode {
        LipschitzMode::Known => l_known,
        LipschitzMode::Adaptive => config.l_0,
    };

    let mut qp_solves: u64 = 0;
    let mut termination_checks: u64 = 0;
    let mut trace = Vec::new();
    let mut mu = mu_at_level(epsilon, sigma, i0, 0);

    for i in 0..=i0 {
        mu = mu_at_level(epsilon, sigma, i0, i);
        loop {
            termination_checks += 1;
            let d = residual_direction(problem, &x, mu)?;
            if norm2(&d) <= mu {
                break;
            }
            // step computation, re-solved in adaptive mode until accepted
            loop {
                let candidate = step(problem, &x, mu, l_est, config.step_mode)?;
                qp_solves += 1;
                if qp_solves > budget {
                    return Err(Error::BoundViolation {
                        solves: qp_solves,
                        budget,
                    });
                }
                let r = ratio_rk(problem, &x, &candidate.next, l_est);
                let f_here = SmoothedObjective::new(problem, mu)?.value(&x)?;
                trace.push(TraceRecord {
                    qp_solve: qp_solves,
                    outer_i: i,
                    mu,
                    f_tilde: f_here,
                    decrease: candidate.decrease,
                    residual_norm: candidate.residual_norm,
                    r_k: r,
                    l_hk: l_est,
                });
                match config.lipschitz_mode {
                    LipschitzMode::Known => {
                        x = candidate.next;
                        break;
                    }
                    LipschitzMode::Adaptive => {
                        if r <= 1.0 {
                            let s = sub(&candidate.next, &x);
                            let y = sub(
                                &problem.h_gradient(&candidate.next),
                                &problem.h_gradient(&x),
                            );
                            let ss = dot(&s, &s);
                            if ss > 0.0 {
                                l_est = (dot(&s, &y) / ss).min(config.l_max).max(config.l_min);
                            }
                            x = candidate.next;
                            break;
                        }
                        l_est *= config.eta;
                    }
                }
            }
        }
    }

    let kkt = eps_kkt_check(problem, &x, epsilon)?;
    Ok(SolveResult {
        x_final: x,
        mu_final: mu,
        qp_solves,
        termination_checks,
        trace,
        kkt,
        bound: constants.bound,
    })
}
