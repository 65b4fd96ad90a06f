//! Convex quadratic model of the smoothed objective.
//!
//! Around a center `x_k` the smoothed composite term is bounded above by a
//! quadratic whose curvature matrix collects the scalar curvature caps:
//!
//! ```text
//! B~(x, mu) = sum_m cap((b - A x)_m, mu) a_m a_m',
//! ```
//!
//! so rows whose residual lies outside the band `[-mu, 2 mu]` contribute
//! nothing, and `lambda_max(B~) <= 4 q mu^(q-2) sum_m ||a_m||^2`. Adding the
//! damping `L I` (the Lipschitz estimate for `h`) gives the model Hessian.
//! On the trust rows of the step subproblems, and whenever `h` is below its
//! own quadratic expansion, the model is a true upper bound of the smoothed
//! objective, which is what turns model decrease into objective decrease.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::{dot, sub, Mat};
use crate::problems::ProblemSpec;
use crate::smoothing::{check_mu, curvature_cap_raw, SmoothedObjective};

/// `B~(x, mu)`: curvature matrix of the smoothed composite term.
pub fn curvature_matrix(problem: &ProblemSpec, x: &[f64], mu: f64) -> Result<Mat, Error> {
    check_mu(mu)?;
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "curvature center",
            expected: problem.dim(),
            actual: x.len(),
        });
    }
    let q = problem.q();
    let mut b = Mat::zeros(problem.dim(), problem.dim());
    for (m, r) in problem.residuals(x).into_iter().enumerate() {
        let cap = curvature_cap_raw(r, mu, q);
        if cap != 0.0 {
            b.add_outer(cap, problem.matrix().row(m));
        }
    }
    Ok(b)
}

/// `d' B~(x, mu) d` without forming the matrix.
pub fn curvature_quadform(
    problem: &ProblemSpec,
    x: &[f64],
    mu: f64,
    d: &[f64],
) -> Result<f64, Error> {
    check_mu(mu)?;
    if x.len() != problem.dim() || d.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "quadratic form arguments",
            expected: problem.dim(),
            actual: x.len().max(d.len()),
        });
    }
    let q = problem.q();
    let mut total = 0.0;
    for (m, r) in problem.residuals(x).into_iter().enumerate() {
        let cap = curvature_cap_raw(r, mu, q);
        if cap != 0.0 {
            let ad = dot(problem.matrix().row(m), d);
            total += cap * ad * ad;
        }
    }
    Ok(total)
}

/// The quadratic model
/// `Q(x) = F~(x_k, mu) + g'(x - x_k) + 1/2 (x - x_k)' (B~ + L I) (x - x_k)`
/// with `g = grad F~(x_k, mu)`.
///
/// Immutable after construction; the Hessian is positive definite whenever
/// the damping is positive.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    center: Vec<f64>,
    gradient: Vec<f64>,
    curvature: Mat,
    constant: f64,
}

impl QuadraticModel {
    /// Build the model at `center` with damping `l_term` (the current
    /// Lipschitz estimate for `h`).
    pub fn build(
        problem: &ProblemSpec,
        center: &[f64],
        mu: f64,
        l_term: f64,
    ) -> Result<Self, Error> {
        let smoothed = SmoothedObjective::new(problem, mu)?;
        let gradient = smoothed.gradient(center)?;
        let constant = smoothed.value(center)?;
        let mut curvature = curvature_matrix(problem, center, mu)?;
        curvature.add_scaled_identity(l_term);
        Ok(QuadraticModel {
            center: center.to_vec(),
            gradient,
            curvature,
            constant,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn curvature(&self) -> &Mat {
        &self.curvature
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Evaluate the model at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, Error> {
        if x.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                what: "model evaluation point",
                expected: self.center.len(),
                actual: x.len(),
            });
        }
        let s = sub(x, &self.center);
        Ok(self.constant + dot(&self.gradient, &s) + 0.5 * dot(&s, &self.curvature.matvec(&s)))
    }

    /// The model as `min 1/2 x' H x + c' x` data (constant dropped), ready
    /// for the QP solver.
    pub fn qp_terms(&self) -> (Mat, Vec<f64>) {
        let h = self.curvature.clone();
        let mut c: Vec<f64> = self.gradient.clone();
        let hc = h.matvec(&self.center);
        for (ci, hci) in c.iter_mut().zip(hc) {
            *ci -= hci;
        }
        (h, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polyhedron;
    use crate::problems::HSpec;

    fn problem(a: Vec<Vec<f64>>, b: Vec<f64>, q: f64) -> ProblemSpec {
        let n = a[0].len();
        ProblemSpec::new(
            Mat::from_rows(&a).unwrap(),
            b,
            q,
            HSpec::Zero,
            Polyhedron::free(n),
        )
        .unwrap()
    }

    #[test]
    fn rows_outside_band_contribute_nothing() {
        // residual 5 > 2 mu = 2: zero matrix
        let p = problem(vec![vec![1.0, 0.0]], vec![5.0], 0.5);
        let b = curvature_matrix(&p, &[0.0, 0.0], 1.0).unwrap();
        assert!(b.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_row_outer_product() {
        // residual 0, mu = 1, q = 0.5: cap = 2, matrix 2 a a'
        let p = problem(vec![vec![1.0, 0.0]], vec![0.0], 0.5);
        let b = curvature_matrix(&p, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.get(0, 0), 2.0);
        assert_eq!(b.get(0, 1), 0.0);
        assert_eq!(b.get(1, 0), 0.0);
        assert_eq!(b.get(1, 1), 0.0);
    }

    #[test]
    fn quadform_matches_matrix() {
        let p = problem(
            vec![vec![1.0, 2.0], vec![-0.5, 0.3], vec![0.1, -0.7]],
            vec![0.2, -0.1, 0.5],
            0.7,
        );
        let x = [0.3, -0.4];
        let d = [1.0, -2.0];
        let b = curvature_matrix(&p, &x, 0.5).unwrap();
        let direct = dot(&d, &b.matvec(&d));
        let fast = curvature_quadform(&p, &x, 0.5, &d).unwrap();
        assert!((direct - fast).abs() < 1e-12);
    }

    #[test]
    fn model_at_center_equals_smoothed_value() {
        let p = problem(vec![vec![1.0], vec![-2.0]], vec![0.4, 0.3], 0.5);
        let x = [0.2];
        let model = QuadraticModel::build(&p, &x, 0.5, 1.0).unwrap();
        let f = SmoothedObjective::new(&p, 0.5).unwrap().value(&x).unwrap();
        assert!((model.eval(&x).unwrap() - f).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_model_arithmetic() {
        // center 0, gradient 1, curvature 2, constant 0 at x = 1 gives 2
        let model = QuadraticModel {
            center: alloc::vec![0.0],
            gradient: alloc::vec![1.0],
            curvature: Mat::from_rows(&[alloc::vec![2.0]]).unwrap(),
            constant: 0.0,
        };
        assert!((model.eval(&[1.0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn qp_terms_reproduce_model_gradient() {
        let p = problem(vec![vec![1.0, -1.0]], vec![0.1], 0.5);
        let center = [0.3, 0.2];
        let model = QuadraticModel::build(&p, &center, 0.4, 2.0).unwrap();
        let (h, c) = model.qp_terms();
        // grad of 1/2 x'Hx + c'x at center must equal the model gradient
        let mut g = h.matvec(&center);
        for (gi, ci) in g.iter_mut().zip(&c) {
            *gi += ci;
        }
        for (gi, mi) in g.iter().zip(model.gradient()) {
            assert!((gi - mi).abs() < 1e-12);
        }
    }
}
