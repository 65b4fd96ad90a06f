//! Optimality certification.
//!
//! For a tolerance `tau >= 0` the rows split into `I` (residual below
//! `-tau`), `J` (above `tau`), and `K` (inside the closed band). With
//! `tau = 0` these are the exact sets of the first-order conditions; with
//! `tau = epsilon` they drive the epsilon-KKT test: nonnegative multipliers
//! on `K` with
//!
//! ```text
//! |lambda_m (b - A x)_m| <= epsilon^q          (complementarity)
//! ||x - P_X(x - grad L)|| <= epsilon           (projected stationarity)
//! ```
//!
//! where `L` sums the `q`-powers over `J`, the smooth term, and the `K`-row
//! multipliers. The witness multipliers are constructed from the smoothing
//! kernel derivative at width `epsilon`; with that witness the Lagrangian
//! gradient coincides with the smoothed-objective gradient, so solver output
//! passes by construction. A failed check therefore means "no pass with this
//! witness", not a disproof of optimality.
//!
//! The module also provides the `q = 1` Clarke-style test and, for tiny
//! instances with concave smooth term, the instance constant `C` of the
//! residual dichotomy: at any local minimizer each row residual is either
//! nonpositive or at least `C`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::geometry::enumerate_vertices;
use crate::linalg::{axpy, norm2, sub, symmetric_eig_max, Mat};
use crate::math;
use crate::problems::{HSpec, ProblemSpec};
use crate::smoothing::{check_mu, theta_q_d1_raw, SmoothedObjective};

/// Slack added to both certificate thresholds to absorb projection and QP
/// round-off.
pub const CERT_SLACK: f64 = 1e-9;

/// Row partition at threshold `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSets {
    /// Rows with residual `< -tau`.
    pub i: Vec<usize>,
    /// Rows with residual `> tau`.
    pub j: Vec<usize>,
    /// Rows with `|residual| <= tau` (closed band).
    pub k: Vec<usize>,
    pub tau: f64,
}

/// Partition the rows by residual sign at threshold `tau >= 0`.
pub fn index_sets(problem: &ProblemSpec, x: &[f64], tau: f64) -> Result<IndexSets, Error> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Domain("index-set threshold must be finite and >= 0"));
    }
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "index set point",
            expected: problem.dim(),
            actual: x.len(),
        });
    }
    let mut sets = IndexSets {
        i: Vec::new(),
        j: Vec::new(),
        k: Vec::new(),
        tau,
    };
    for (m, r) in problem.residuals(x).into_iter().enumerate() {
        if r < -tau {
            sets.i.push(m);
        } else if r > tau {
            sets.j.push(m);
        } else {
            sets.k.push(m);
        }
    }
    Ok(sets)
}

/// Witness multipliers on the band rows: the kernel derivative at width
/// `epsilon`, which is nonnegative and zero for nonpositive residuals.
/// Returned aligned with the `k` set of `index_sets(problem, x, epsilon)`.
pub fn build_multipliers(
    problem: &ProblemSpec,
    x: &[f64],
    epsilon: f64,
) -> Result<Vec<f64>, Error> {
    check_mu(epsilon)?;
    let sets = index_sets(problem, x, epsilon)?;
    let res = problem.residuals(x);
    let q = problem.q();
    Ok(sets
        .k
        .iter()
        .map(|&m| theta_q_d1_raw(res[m], epsilon, q))
        .collect())
}

/// Epsilon-KKT certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub sets: IndexSets,
    /// Nonnegative witness multipliers, aligned with `sets.k`.
    pub multipliers: Vec<f64>,
    /// `max_m |lambda_m (b - A x)_m|` over the band rows.
    pub complementarity_max: f64,
    /// `||x - P_X(x - grad L)||`.
    pub projected_residual: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// Check the epsilon-KKT conditions at `x` with the constructed witness.
///
/// Requires `x` feasible (within tolerance); passing means the projected
/// Lagrangian residual is at most `epsilon` and the worst complementarity
/// product at most `epsilon^q`, both with a `1e-9` slack.
pub fn eps_kkt_check(problem: &ProblemSpec, x: &[f64], epsilon: f64) -> Result<KktReport, Error> {
    check_mu(epsilon)?;
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "certificate point",
            expected: problem.dim(),
            actual: x.len(),
        });
    }
    if !problem.set().contains(x) {
        return Err(Error::Precondition("certificate point must be feasible"));
    }
    let q = problem.q();
    let res = problem.residuals(x);
    let sets = index_sets(problem, x, epsilon)?;
    let multipliers = build_multipliers(problem, x, epsilon)?;

    // grad L = -sum_J q r^(q-1) a_m + grad h - sum_K lambda_m a_m
    let mut grad = problem.h_gradient(x);
    for &m in &sets.j {
        let w = q * math::powf(res[m], q - 1.0);
        axpy(-w, problem.matrix().row(m), &mut grad);
    }
    for (lm, &m) in multipliers.iter().zip(&sets.k) {
        if *lm != 0.0 {
            axpy(-lm, problem.matrix().row(m), &mut grad);
        }
    }
    let mut shifted = x.to_vec();
    axpy(-1.0, &grad, &mut shifted);
    let projected = problem.set().project(&shifted)?;
    let projected_residual = norm2(&sub(x, &projected));

    let complementarity_max = multipliers
        .iter()
        .zip(&sets.k)
        .fold(0.0_f64, |acc, (lm, &m)| acc.max(math::abs(lm * res[m])));

    let pass = projected_residual <= epsilon + CERT_SLACK
        && complementarity_max <= math::powf(epsilon, q) + CERT_SLACK;
    Ok(KktReport {
        sets,
        multipliers,
        complementarity_max,
        projected_residual,
        epsilon,
        pass,
    })
}

/// Clarke-style certificate for `q = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkeReport {
    /// `||P_X(x - grad F~(x, mu)) - x||`.
    pub residual: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// Check the `q = 1` Clarke conditions: smoothed projected-gradient residual
/// at width `mu` at most `epsilon`, and `mu <= epsilon`.
pub fn clarke_kkt_check(
    problem: &ProblemSpec,
    x: &[f64],
    mu: f64,
    epsilon: f64,
) -> Result<ClarkeReport, Error> {
    if problem.q() != 1.0 {
        return Err(Error::Precondition("Clarke certificate requires q = 1"));
    }
    check_mu(mu)?;
    check_mu(epsilon)?;
    let g = SmoothedObjective::new(problem, mu)?.gradient(x)?;
    let mut shifted = x.to_vec();
    axpy(-1.0, &g, &mut shifted);
    let projected = problem.set().project(&shifted)?;
    let residual = norm2(&sub(&projected, x));
    let pass = residual <= epsilon + CERT_SLACK && mu <= epsilon * (1.0 + 1e-12);
    Ok(ClarkeReport {
        residual,
        mu,
        epsilon,
        pass,
    })
}

/// Residuals below this are treated as "zero" when qualifying vertices for
/// the lower-bound constant.
const QUALIFY_TOL: f64 = 1e-9;

fn require_concave_h(problem: &ProblemSpec) -> Result<(), Error> {
    match problem.h() {
        HSpec::Zero | HSpec::Linear(_) => Ok(()),
        HSpec::Quadratic { p, .. } => {
            if symmetric_eig_max(p)? <= 1e-8 {
                Ok(())
            } else {
                Err(Error::Precondition(
                    "lower-bound constant requires a concave smooth term",
                ))
            }
        }
    }
}

/// Build the sign-pattern polytope rows: residual `<= 0` off `positive_set`,
/// residual `>= 0` on it.
fn sign_polytope_rows(problem: &ProblemSpec, positive: &[bool]) -> (Mat, Vec<f64>) {
    let a = problem.matrix();
    let b = problem.offsets();
    let mut rows = Vec::with_capacity(a.rows());
    let mut rhs = Vec::with_capacity(a.rows());
    for m in 0..a.rows() {
        if positive[m] {
            // (b - A x)_m >= 0  <=>  a_m' x <= b_m
            rows.push(a.row(m).to_vec());
            rhs.push(b[m]);
        } else {
            // (b - A x)_m <= 0  <=>  -a_m' x <= -b_m
            rows.push(a.row(m).iter().map(|v| -v).collect());
            rhs.push(-b[m]);
        }
    }
    (Mat::from_rows(&rows).expect("rows share the problem dimension"), rhs)
}

/// The instance constant of the residual dichotomy.
///
/// Minimum, over all sign patterns of the rows and all vertices of the
/// corresponding polytope whose positive-pattern residuals are strictly
/// positive, of the smallest such residual. `+inf` when no qualifying vertex
/// exists. Requires a concave smooth term and tiny scale (the vertex
/// enumerator's guards apply).
pub fn lower_bound_constant(problem: &ProblemSpec) -> Result<f64, Error> {
    require_concave_h(problem)?;
    let m = problem.num_rows();
    if m > 10 {
        return Err(Error::UnsupportedScale(
            "lower-bound constant enumerates 2^M sign patterns",
        ));
    }
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << m) {
        let positive: Vec<bool> = (0..m).map(|i| mask & (1 << i) != 0).collect();
        if positive.iter().all(|p| !p) {
            continue; // empty positive set contributes no residuals
        }
        let (rows, rhs) = sign_polytope_rows(problem, &positive);
        let vertices = enumerate_vertices(problem.set(), Some((&rows, &rhs)))?;
        for v in vertices {
            let res = problem.residuals(&v);
            let mut qualifies = true;
            let mut smallest = f64::INFINITY;
            for (mm, r) in res.iter().enumerate() {
                if positive[mm] {
                    if *r <= QUALIFY_TOL {
                        qualifies = false;
                        break;
                    }
                    smallest = smallest.min(*r);
                }
            }
            if qualifies {
                best = best.min(smallest);
            }
        }
    }
    Ok(best)
}

/// Snap `x` to the nearest vertex of the polytope carved out by its
/// `tau`-index sets (band rows pushed to the nonpositive side). `None` when
/// that polytope has no vertices. This is the polish step that turns an
/// approximate solver output into an exactly-placed candidate for the
/// residual dichotomy.
pub fn refine_to_vertex(
    problem: &ProblemSpec,
    x: &[f64],
    tau: f64,
) -> Result<Option<Vec<f64>>, Error> {
    let sets = index_sets(problem, x, tau)?;
    let mut positive = alloc::vec![false; problem.num_rows()];
    for &m in &sets.j {
        positive[m] = true;
    }
    let (rows, rhs) = sign_polytope_rows(problem, &positive);
    let vertices = enumerate_vertices(problem.set(), Some((&rows, &rhs)))?;
    Ok(vertices
        .into_iter()
        .map(|v| {
            let d = norm2(&sub(&v, x));
            (v, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(v, _)| v))
}
