//! Polyhedral feasible sets, Euclidean projection, and supporting solvers.
//!
//! A [`Polyhedron`] is stored as per-coordinate bounds (infinities allowed)
//! plus general inequality rows `G x <= g`. Equality rows, when a caller needs
//! them, are encoded as paired inequalities. Projection onto a pure box
//! short-circuits to componentwise clamping; the general case dispatches to
//! the strictly convex QP solver with an identity Hessian.

mod qp;
mod vertices;

pub use qp::{solve_qp, QpProblem, QpSolution};
pub use vertices::enumerate_vertices;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::{dot, norm2, Mat};

/// Absolute feasibility tolerance, scaled per row by `1 + ||row||`.
pub const FEAS_TOL: f64 = 1e-9;

/// Feasible set `{ x : lower <= x <= upper, G x <= g }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Mat,
    rhs: Vec<f64>,
}

impl Polyhedron {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, rows: Mat, rhs: Vec<f64>) -> Result<Self, Error> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "bound vectors",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if rows.rows() != rhs.len() {
            return Err(Error::DimensionMismatch {
                what: "inequality right-hand side",
                expected: rows.rows(),
                actual: rhs.len(),
            });
        }
        if rows.rows() > 0 && rows.cols() != lower.len() {
            return Err(Error::DimensionMismatch {
                what: "inequality columns",
                expected: lower.len(),
                actual: rows.cols(),
            });
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::Domain("bounds require lower <= upper"));
            }
        }
        Ok(Polyhedron {
            lower,
            upper,
            rows,
            rhs,
        })
    }

    /// All of R^n: infinite bounds, no rows.
    pub fn free(n: usize) -> Self {
        Polyhedron {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            rows: Mat::zeros(0, n),
            rhs: Vec::new(),
        }
    }

    /// Pure box `{ lower <= x <= upper }`.
    pub fn bounded_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, Error> {
        let n = lower.len();
        Polyhedron::new(lower, upper, Mat::zeros(0, n), Vec::new())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    #[inline]
    pub fn is_box(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn is_free(&self) -> bool {
        self.rows.rows() == 0
            && self.lower.iter().all(|l| *l == f64::NEG_INFINITY)
            && self.upper.iter().all(|u| *u == f64::INFINITY)
    }

    /// Membership within the scaled feasibility tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let bound_tol = FEAS_TOL * 2.0;
        for ((xj, l), u) in x.iter().zip(&self.lower).zip(&self.upper) {
            if *xj < l - bound_tol || *xj > u + bound_tol {
                return false;
            }
        }
        for i in 0..self.rows.rows() {
            let row = self.rows.row(i);
            let tol = FEAS_TOL * (1.0 + norm2(row));
            if dot(row, x) > self.rhs[i] + tol {
                return false;
            }
        }
        true
    }

    /// New set with extra inequality rows `extra * x <= extra_rhs` appended.
    pub fn with_extra_rows(&self, extra: &Mat, extra_rhs: &[f64]) -> Result<Self, Error> {
        if extra.rows() != extra_rhs.len() {
            return Err(Error::DimensionMismatch {
                what: "extra rows right-hand side",
                expected: extra.rows(),
                actual: extra_rhs.len(),
            });
        }
        let rows = self.rows.vstack(extra)?;
        let mut rhs = self.rhs.clone();
        rhs.extend_from_slice(extra_rhs);
        Polyhedron::new(self.lower.clone(), self.upper.clone(), rows, rhs)
    }

    /// Euclidean projection onto the set.
    ///
    /// The result is the unique nearest feasible point; projection is
    /// idempotent and nonexpansive. An empty set reports infeasibility.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "projection point",
                expected: self.dim(),
                actual: x.len(),
            });
        }
        if self.is_box() {
            return Ok(x
                .iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .map(|((xj, l), u)| xj.max(*l).min(*u))
                .collect());
        }
        let n = self.dim();
        let problem = QpProblem::new(
            Mat::identity(n),
            x.iter().map(|v| -v).collect(),
            self.clone(),
        )?;
        Ok(solve_qp(&problem)?.x)
    }

    /// The largest per-row constraint violation of `x`, scaled like
    /// [`Polyhedron::contains`]. Nonpositive values mean feasible.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for ((xj, l), u) in x.iter().zip(&self.lower).zip(&self.upper) {
            if l.is_finite() {
                worst = worst.max((l - xj) / 2.0);
            }
            if u.is_finite() {
                worst = worst.max((xj - u) / 2.0);
            }
        }
        for i in 0..self.rows.rows() {
            let row = self.rows.row(i);
            let scale = 1.0 + norm2(row);
            worst = worst.max((dot(row, x) - self.rhs[i]) / scale);
        }
        if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        }
    }
}

/// Unified `n' x >= d` constraint list: general rows first (negated), then
/// finite lower bounds, then finite upper bounds (negated). The QP solver and
/// the vertex enumerator share this ordering.
pub(crate) struct ConstraintList {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

pub(crate) fn constraint_list(set: &Polyhedron) -> ConstraintList {
    let n = set.dim();
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for i in 0..set.rows.rows() {
        normals.push(set.rows.row(i).iter().map(|v| -v).collect());
        offsets.push(-set.rhs[i]);
    }
    for (j, l) in set.lower.iter().enumerate() {
        if l.is_finite() {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            normals.push(e);
            offsets.push(*l);
        }
    }
    for (j, u) in set.upper.iter().enumerate() {
        if u.is_finite() {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            normals.push(e);
            offsets.push(-*u);
        }
    }
    ConstraintList { normals, offsets }
}

pub(crate) fn max_violation_scaled(list: &ConstraintList, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (nrm, d) in list.normals.iter().zip(&list.offsets) {
        let slack = dot(nrm, x) - d;
        if slack < 0.0 {
            worst = worst.max(-slack / (1.0 + norm2(nrm)));
        }
    }
    worst
}

pub(crate) fn approx_same_point(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            <= tol * tol
}
