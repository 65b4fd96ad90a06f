//! The scalar smoothing kernel and the smoothed objective.
//!
//! The plus function `max{t, 0}` is replaced by
//!
//! ```text
//!              | t,                  t > mu
//! theta(t,mu)= | t^2/(2 mu) + mu/2,  0 <= t <= mu
//!              | mu/2,               t < 0
//! ```
//!
//! which is continuously differentiable in `t`, equals the plus function for
//! `t >= mu`, and is bounded below by `mu/2`. Raising it to the power `q`
//! keeps differentiability (with second derivative defined away from the two
//! breakpoints `t = 0` and `t = mu`) and yields the smoothed objective
//!
//! ```text
//! F~(x, mu) = sum_m theta^q((b - A x)_m, mu) + h(x),
//! ```
//!
//! which sandwiches the true objective:
//! `F(x) <= F~(x,mu) <= F(x) + sum_{(b-Ax)_m <= mu} (mu/2)^q`.
//!
//! The curvature cap `4 q mu^(q-2)` bounds the Clarke generalized derivative
//! of `[theta^q]'` everywhere and is zero outside the band `[-mu, 2 mu]`;
//! the quadratic model in [`crate::model`] is built from it.
//!
//! Breakpoint convention: `t = 0` and `t = mu` are evaluated via the middle
//! branch. Values coincide with the one-sided limits, so this only fixes the
//! code path, not the result.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::axpy;
use crate::math;
use crate::problems::ProblemSpec;

/// Exponent/width pair for the scalar kernels, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    q: f64,
    mu: f64,
}

impl SmoothingParams {
    pub fn new(q: f64, mu: f64) -> Result<Self, Error> {
        check_exponent(q)?;
        check_mu(mu)?;
        Ok(SmoothingParams { q, mu })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<(), Error> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain("smoothing parameter must be finite and > 0"));
    }
    Ok(())
}

pub(crate) fn check_exponent(q: f64) -> Result<(), Error> {
    if !(q.is_finite() && q > 0.0 && q <= 1.0) {
        return Err(Error::Domain("exponent must lie in (0, 1]"));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<(), Error> {
    if !t.is_finite() {
        return Err(Error::Domain("kernel argument must be finite"));
    }
    Ok(())
}

// Raw kernels: callers have validated (t, mu, q).

#[inline]
pub(crate) fn theta_raw(t: f64, mu: f64) -> f64 {
    if t > mu {
        t
    } else if t >= 0.0 {
        t * t / (2.0 * mu) + 0.5 * mu
    } else {
        0.5 * mu
    }
}

#[inline]
pub(crate) fn theta_q_raw(t: f64, mu: f64, q: f64) -> f64 {
    math::powf(theta_raw(t, mu), q)
}

#[inline]
pub(crate) fn theta_q_d1_raw(t: f64, mu: f64, q: f64) -> f64 {
    if t > mu {
        q * math::powf(t, q - 1.0)
    } else if t >= 0.0 {
        q * math::powf(theta_raw(t, mu), q - 1.0) * t / mu
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn curvature_cap_raw(t: f64, mu: f64, q: f64) -> f64 {
    if (-mu..=2.0 * mu).contains(&t) {
        4.0 * q * math::powf(mu, q - 2.0)
    } else {
        0.0
    }
}

/// Smoothed plus function `theta(t, mu)`.
pub fn theta(t: f64, mu: f64) -> Result<f64, Error> {
    check_t(t)?;
    check_mu(mu)?;
    Ok(theta_raw(t, mu))
}

/// `theta(t, mu)^q`.
pub fn theta_q(t: f64, mu: f64, q: f64) -> Result<f64, Error> {
    check_t(t)?;
    check_mu(mu)?;
    check_exponent(q)?;
    Ok(theta_q_raw(t, mu, q))
}

/// First derivative of `theta^q` with respect to `t`, defined everywhere.
pub fn theta_q_d1(t: f64, mu: f64, q: f64) -> Result<f64, Error> {
    check_t(t)?;
    check_mu(mu)?;
    check_exponent(q)?;
    Ok(theta_q_d1_raw(t, mu, q))
}

/// Classical second derivative of `theta^q`, or `None` at the breakpoints
/// `t = 0` and `t = mu` where it does not exist. On its domain the magnitude
/// is bounded by the curvature cap; downstream code only ever uses the cap.
pub fn theta_q_d2(t: f64, mu: f64, q: f64) -> Result<Option<f64>, Error> {
    check_t(t)?;
    check_mu(mu)?;
    check_exponent(q)?;
    if t == 0.0 || t == mu {
        return Ok(None);
    }
    let v = if t > mu {
        q * (q - 1.0) * math::powf(t, q - 2.0)
    } else if t > 0.0 {
        let th = theta_raw(t, mu);
        q * (q - 1.0) * math::powf(th, q - 2.0) * t * t / (mu * mu)
            + q * math::powf(th, q - 1.0) / mu
    } else {
        0.0
    };
    Ok(Some(v))
}

/// Piecewise-constant curvature cap: `4 q mu^(q-2)` on `[-mu, 2 mu]`
/// (inclusive at both ends), zero outside.
pub fn curvature_cap(t: f64, mu: f64, q: f64) -> Result<f64, Error> {
    check_t(t)?;
    check_mu(mu)?;
    check_exponent(q)?;
    Ok(curvature_cap_raw(t, mu, q))
}

fn check_point(problem: &ProblemSpec, x: &[f64]) -> Result<(), Error> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "point",
            expected: problem.dim(),
            actual: x.len(),
        });
    }
    Ok(())
}

/// The exact objective `F(x) = sum_m max{(b - A x)_m, 0}^q + h(x)`.
pub fn objective(problem: &ProblemSpec, x: &[f64]) -> Result<f64, Error> {
    check_point(problem, x)?;
    let q = problem.q();
    let mut total = problem.h_value(x);
    for r in problem.residuals(x) {
        if r > 0.0 {
            total += math::powf(r, q);
        }
    }
    Ok(total)
}

/// The smoothed objective `F~(., mu)` and its gradient, bound to a problem.
///
/// Both are defined for every `x`: the smoothing removes all kinks of the
/// composite term.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedObjective<'p> {
    problem: &'p ProblemSpec,
    mu: f64,
}

impl<'p> SmoothedObjective<'p> {
    pub fn new(problem: &'p ProblemSpec, mu: f64) -> Result<Self, Error> {
        check_mu(mu)?;
        Ok(SmoothedObjective { problem, mu })
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `F~(x, mu)`.
    pub fn value(&self, x: &[f64]) -> Result<f64, Error> {
        check_point(self.problem, x)?;
        let q = self.problem.q();
        let mut total = self.problem.h_value(x);
        for r in self.problem.residuals(x) {
            total += theta_q_raw(r, self.mu, q);
        }
        Ok(total)
    }

    /// `grad F~(x, mu) = -sum_m [theta^q]'((b-Ax)_m) a_m + grad h(x)`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        check_point(self.problem, x)?;
        let q = self.problem.q();
        let mut g = self.problem.h_gradient(x);
        let res = self.problem.residuals(x);
        for (m, r) in res.into_iter().enumerate() {
            let w = theta_q_d1_raw(r, self.mu, q);
            if w != 0.0 {
                axpy(-w, self.problem.matrix().row(m), &mut g);
            }
        }
        Ok(g)
    }
}
