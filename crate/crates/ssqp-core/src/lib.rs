//! Smoothing SQP (SSQP) solver for composite L_q minimization over polyhedra.
//!
//! This crate minimizes objectives of the form
//!
//! ```text
//!     F(x) = sum_m max{ b_m - a_m' x, 0 }^q  +  h(x),    x in X,
//! ```
//!
//! where `0 < q <= 1`, `h` has a Lipschitz-continuous gradient, and `X` is a
//! polyhedron (bounds plus linear inequalities). The objective is nonsmooth,
//! nonconvex, and for `q < 1` not even Lipschitz, so the solver works on a
//! smoothed surrogate: the max kink is capped by a quadratic of width `mu`,
//! a convex quadratic model is minimized at each step, and `mu` is driven down
//! geometrically until it reaches the target accuracy `epsilon`. The returned
//! point carries an epsilon-KKT certificate (nonnegative multipliers, a
//! complementarity residual bounded by `epsilon^q`, and a projected-gradient
//! residual bounded by `epsilon`) together with an a-priori cap on the total
//! number of QP subproblem solves.
//!
//! Module layout:
//!
//! - [`smoothing`]: the scalar kernel `theta(t, mu)`, its q-power derivatives,
//!   the curvature cap, and the smoothed objective/gradient.
//! - [`model`]: the convex quadratic majorant of the smoothed objective.
//! - [`geometry`]: polyhedra, Euclidean projection, a dense strictly convex
//!   QP solver, and tiny-scale vertex enumeration.
//! - [`subproblems`]: the three step computations (closed-form shrink
//!   projection, scaled infinity-norm trust region, exact subproblem).
//! - [`driver`]: the two-level solve loop, Lipschitz-estimate management, and
//!   the worst-case iteration accounting.
//! - [`kkt`]: epsilon-KKT and Clarke-KKT certification, multiplier
//!   construction, and the residual lower-bound constant.
//! - [`problems`]: instance constructors (SVM, power control, linear
//!   decoding, 3-partition hardness reduction, seeded random instances).
//!
//! The crate is `no_std`-compatible (allocation required); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("ssqp-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod driver;
pub mod error;
pub mod geometry;
pub mod kkt;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod smoothing;
pub mod subproblems;

mod math;

pub use driver::{
    complexity_constants, mu0, solve, ComplexityConstants, LipschitzMode, SolveResult,
    SolverConfig, TraceRecord,
};
pub use error::Error;
pub use geometry::{enumerate_vertices, solve_qp, Polyhedron, QpProblem, QpSolution};
pub use kkt::{clarke_kkt_check, eps_kkt_check, lower_bound_constant, ClarkeReport, KktReport};
pub use linalg::Mat;
pub use model::QuadraticModel;
pub use problems::{HSpec, ProblemSpec};
pub use smoothing::SmoothedObjective;
pub use subproblems::{StepMode, StepResult};
