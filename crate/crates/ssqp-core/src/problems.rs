//! Problem instances: the core data type and the application constructors.
//!
//! A [`ProblemSpec`] is the quadruple `(A, b, q, h)` plus the polyhedral
//! feasible set: minimize `sum_m max{(b - A x)_m, 0}^q + h(x)` over `X`.
//! The smooth part `h` is zero, linear, or convex-storable quadratic
//! `h(x) = 1/2 x' P x + c' x`; a quadratic declares its curvature constant,
//! which is validated against the largest eigenvalue of `P` at construction.
//!
//! Constructors cover the three standard applications (soft-margin SVM
//! classification, joint power and admission control, linear decoding), the
//! 3-partition hardness reduction with its exhaustive reference oracle, and
//! seeded random instances for the test suites.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::geometry::Polyhedron;
use crate::linalg::{dot, norm2, symmetric_eig_max, Mat};
use crate::smoothing::check_exponent;

/// The smooth additive term `h`.
#[derive(Debug, Clone, PartialEq)]
pub enum HSpec {
    Zero,
    /// `h(x) = c' x`
    Linear(Vec<f64>),
    /// `h(x) = 1/2 x' P x + c' x`; `lipschitz` is the declared curvature
    /// constant, equal to the largest eigenvalue of `P`.
    Quadratic {
        p: Mat,
        c: Vec<f64>,
        lipschitz: f64,
    },
}

/// Problem data for composite `L_q` minimization over a polyhedron.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    a: Mat,
    b: Vec<f64>,
    q: f64,
    h: HSpec,
    set: Polyhedron,
    x0: Option<Vec<f64>>,
    max_row_norm: f64,
    sum_row_norms_sq: f64,
}

impl ProblemSpec {
    pub fn new(a: Mat, b: Vec<f64>, q: f64, h: HSpec, set: Polyhedron) -> Result<Self, Error> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                what: "offset vector",
                expected: a.rows(),
                actual: b.len(),
            });
        }
        let n = a.cols();
        if set.dim() != n {
            return Err(Error::DimensionMismatch {
                what: "feasible set",
                expected: n,
                actual: set.dim(),
            });
        }
        check_exponent(q)?;
        match &h {
            HSpec::Zero => {}
            HSpec::Linear(c) => {
                if c.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "linear h coefficients",
                        expected: n,
                        actual: c.len(),
                    });
                }
            }
            HSpec::Quadratic { p, c, lipschitz } => {
                if p.rows() != n || p.cols() != n {
                    return Err(Error::DimensionMismatch {
                        what: "quadratic h matrix",
                        expected: n,
                        actual: p.rows(),
                    });
                }
                if c.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "quadratic h linear term",
                        expected: n,
                        actual: c.len(),
                    });
                }
                if p.asymmetry() > 1e-10 {
                    return Err(Error::Domain("quadratic h matrix must be symmetric"));
                }
                let lam = symmetric_eig_max(p)?;
                if !(lipschitz.is_finite())
                    || crate::math::abs(lipschitz - lam) > 1e-8 * (1.0 + crate::math::abs(lam))
                {
                    return Err(Error::Domain(
                        "declared curvature constant does not match the quadratic",
                    ));
                }
            }
        }
        let max_row_norm = (0..a.rows()).fold(0.0_f64, |acc, m| acc.max(norm2(a.row(m))));
        let sum_row_norms_sq = (0..a.rows()).map(|m| dot(a.row(m), a.row(m))).sum();
        Ok(ProblemSpec {
            a,
            b,
            q,
            h,
            set,
            x0: None,
            max_row_norm,
            sum_row_norms_sq,
        })
    }

    /// The same instance with a different exponent (parameter sweeps).
    pub fn with_exponent(mut self, q: f64) -> Result<Self, Error> {
        check_exponent(q)?;
        self.q = q;
        Ok(self)
    }

    /// Attach a suggested start point (dimension-checked, feasibility is the
    /// solver's business: infeasible starts are projected at entry).
    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self, Error> {
        if x0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "start point",
                expected: self.dim(),
                actual: x0.len(),
            });
        }
        self.x0 = Some(x0);
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn h(&self) -> &HSpec {
        &self.h
    }

    pub fn set(&self) -> &Polyhedron {
        &self.set
    }

    pub fn x0(&self) -> Option<&[f64]> {
        self.x0.as_deref()
    }

    /// `b - A x`.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.matvec(x);
        self.b.iter().zip(ax).map(|(bm, axm)| bm - axm).collect()
    }

    pub fn h_value(&self, x: &[f64]) -> f64 {
        match &self.h {
            HSpec::Zero => 0.0,
            HSpec::Linear(c) => dot(c, x),
            HSpec::Quadratic { p, c, .. } => 0.5 * dot(x, &p.matvec(x)) + dot(c, x),
        }
    }

    pub fn h_gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.h {
            HSpec::Zero => vec![0.0; x.len()],
            HSpec::Linear(c) => c.clone(),
            HSpec::Quadratic { p, c, .. } => {
                let mut g = p.matvec(x);
                for (gi, ci) in g.iter_mut().zip(c) {
                    *gi += ci;
                }
                g
            }
        }
    }

    /// The declared curvature constant of `h` (zero for zero/linear `h`).
    pub fn lipschitz(&self) -> f64 {
        match &self.h {
            HSpec::Zero | HSpec::Linear(_) => 0.0,
            HSpec::Quadratic { lipschitz, .. } => *lipschitz,
        }
    }

    #[inline]
    pub fn max_row_norm(&self) -> f64 {
        self.max_row_norm
    }

    #[inline]
    pub fn sum_row_norms_sq(&self) -> f64 {
        self.sum_row_norms_sq
    }
}

/// Soft-margin SVM classification as a composite `L_q` instance.
///
/// Rows are `y_m [s_m', 1]`, offsets are all ones, and the regularizer
/// `(rho/2) sum_{n < N} x_n^2` leaves the bias coordinate unpenalized (its
/// declared curvature constant is still `rho`).
pub fn make_svm(
    patterns: &[Vec<f64>],
    labels: &[f64],
    rho: f64,
    q: f64,
) -> Result<ProblemSpec, Error> {
    if patterns.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "labels",
            expected: patterns.len(),
            actual: labels.len(),
        });
    }
    if patterns.is_empty() {
        return Err(Error::Domain("at least one pattern required"));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::Domain("rho must be finite and >= 0"));
    }
    let d = patterns[0].len();
    let n = d + 1;
    let mut rows = Vec::with_capacity(patterns.len());
    for (s, y) in patterns.iter().zip(labels) {
        if s.len() != d {
            return Err(Error::DimensionMismatch {
                what: "pattern",
                expected: d,
                actual: s.len(),
            });
        }
        if *y != 1.0 && *y != -1.0 {
            return Err(Error::Domain("labels must be +1 or -1"));
        }
        let mut row: Vec<f64> = s.iter().map(|v| y * v).collect();
        row.push(*y);
        rows.push(row);
    }
    let mut p = Mat::zeros(n, n);
    for i in 0..d {
        p.set(i, i, rho);
    }
    let h = if rho == 0.0 {
        HSpec::Zero
    } else {
        HSpec::Quadratic {
            p,
            c: vec![0.0; n],
            lipschitz: rho,
        }
    };
    ProblemSpec::new(
        Mat::from_rows(&rows)?,
        vec![1.0; patterns.len()],
        q,
        h,
        Polyhedron::free(n),
    )
}

/// Joint power and admission control in normalized form (unit channel gains
/// on the diagonal, unit SINR targets and power budgets).
pub fn make_power_control(
    gains: &Mat,
    noise: &[f64],
    rho: f64,
    q: f64,
) -> Result<ProblemSpec, Error> {
    let k = gains.rows();
    if gains.cols() != k {
        return Err(Error::DimensionMismatch {
            what: "gain matrix",
            expected: k,
            actual: gains.cols(),
        });
    }
    if noise.len() != k {
        return Err(Error::DimensionMismatch {
            what: "noise vector",
            expected: k,
            actual: noise.len(),
        });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain("rho must be finite and > 0"));
    }
    let mut a = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let g = gains.get(i, j);
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Domain("channel gains must be nonnegative"));
            }
            if i == j {
                if crate::math::abs(g - 1.0) > 1e-12 {
                    return Err(Error::Domain("normalized form requires unit diagonal gains"));
                }
                a.set(i, j, 1.0);
            } else {
                a.set(i, j, -g);
            }
        }
    }
    for eta in noise {
        if !(eta.is_finite() && *eta > 0.0) {
            return Err(Error::Domain("noise powers must be positive"));
        }
    }
    ProblemSpec::new(
        a,
        noise.to_vec(),
        q,
        HSpec::Linear(vec![rho; k]),
        Polyhedron::bounded_box(vec![0.0; k], vec![1.0; k])?,
    )
}

/// Linear decoding: recover `x` from a corrupted measurement `c = C x + e`
/// by minimizing `||c - C x||_q^q`, encoded via
/// `|a| = max{a, 0} + max{-a, 0}` as stacked rows `[C; -C]`.
pub fn make_decoding(coding: &Mat, measurement: &[f64], q: f64) -> Result<ProblemSpec, Error> {
    if coding.rows() != measurement.len() {
        return Err(Error::DimensionMismatch {
            what: "measurement",
            expected: coding.rows(),
            actual: measurement.len(),
        });
    }
    let k1 = coding.rows();
    let k2 = coding.cols();
    let mut rows = Vec::with_capacity(2 * k1);
    let mut b = Vec::with_capacity(2 * k1);
    for (i, ci) in measurement.iter().enumerate() {
        rows.push(coding.row(i).to_vec());
        b.push(*ci);
    }
    for (i, ci) in measurement.iter().enumerate() {
        rows.push(coding.row(i).iter().map(|v| -v).collect());
        b.push(-ci);
    }
    ProblemSpec::new(
        Mat::from_rows(&rows)?,
        b,
        q,
        HSpec::Zero,
        Polyhedron::free(k2),
    )
}

fn check_three_partition_inputs(weights: &[u64], target: u64) -> Result<usize, Error> {
    if target == 0 || weights.is_empty() || !weights.len().is_multiple_of(3) {
        return Err(Error::Domain(
            "3-partition requires 3m positive integers and a positive target",
        ));
    }
    let m = weights.len() / 3;
    let total: u64 = weights.iter().sum();
    if total != m as u64 * target {
        return Err(Error::Domain("3-partition weights must sum to m * target"));
    }
    for w in weights {
        // strict bounds target/4 < w < target/2
        if !(4 * w > target && 2 * w < target) {
            return Err(Error::Domain(
                "3-partition weights must lie strictly between target/4 and target/2",
            ));
        }
    }
    Ok(m)
}

/// Unconstrained `L_q` instance encoding a 3-partition decision problem.
///
/// Variables are assignment indicators `x_{ij}` (item `i` in `0..3m`, bin `j`
/// in `0..m`, flattened as `i * m + j`). The objective rows are, in order:
/// for every `(i, j)` the pair `max{x_ij, 0}^q` and `max{1 - x_ij, 0}^q`;
/// for every item the overflow term `max{sum_j x_ij - 1, 0}^q`; for every
/// bin the deficit term `max{target - sum_i w_i x_ij, 0}^q`. The objective
/// is bounded below by `3 m^2`, with equality exactly at indicator points of
/// valid partitions, so the minimum equals `3 m^2` iff the instance is a
/// yes-instance.
pub fn make_three_partition(weights: &[u64], target: u64, q: f64) -> Result<ProblemSpec, Error> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(
            "3-partition reduction requires an exponent strictly inside (0, 1)",
        ));
    }
    let m = check_three_partition_inputs(weights, target)?;
    let items = 3 * m;
    let n = items * m;
    let num_rows = 2 * n + items + m;
    let mut a = Mat::zeros(num_rows, n);
    let mut b = vec![0.0; num_rows];
    let mut r = 0;
    for i in 0..items {
        for j in 0..m {
            let col = i * m + j;
            // max{x_ij, 0}: residual x_ij needs row -e_ij, offset 0
            a.set(r, col, -1.0);
            b[r] = 0.0;
            r += 1;
            // max{1 - x_ij, 0}
            a.set(r, col, 1.0);
            b[r] = 1.0;
            r += 1;
        }
    }
    for i in 0..items {
        for j in 0..m {
            a.set(r, i * m + j, -1.0);
        }
        b[r] = -1.0;
        r += 1;
    }
    for j in 0..m {
        for (i, w) in weights.iter().enumerate() {
            a.set(r, i * m + j, *w as f64);
        }
        b[r] = target as f64;
        r += 1;
    }
    debug_assert_eq!(r, num_rows);
    ProblemSpec::new(a, b, q, HSpec::Zero, Polyhedron::free(n))
}

/// Exhaustive 3-partition decision oracle (guarded to `m <= 3`).
pub fn brute_force_three_partition(weights: &[u64], target: u64) -> Result<bool, Error> {
    let m = check_three_partition_inputs(weights, target)?;
    if m > 3 {
        return Err(Error::UnsupportedScale("3-partition oracle limited to m <= 3"));
    }
    fn assign(weights: &[u64], target: u64, idx: usize, sums: &mut [u64], counts: &mut [u8]) -> bool {
        if idx == weights.len() {
            return sums.iter().all(|s| *s == target);
        }
        for j in 0..sums.len() {
            if counts[j] < 3 && sums[j] + weights[idx] <= target {
                sums[j] += weights[idx];
                counts[j] += 1;
                if assign(weights, target, idx + 1, sums, counts) {
                    return true;
                }
                sums[j] -= weights[idx];
                counts[j] -= 1;
            }
        }
        false
    }
    let mut sums = vec![0u64; m];
    let mut counts = vec![0u8; m];
    Ok(assign(weights, target, 0, &mut sums, &mut counts))
}

/// Shape of the smooth term in generated random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HKind {
    Zero,
    Linear,
    Quadratic,
}

/// Shape of the feasible set in generated random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XKind {
    Box,
    BoxSimplex,
}

/// Deterministic random instance: rows are scaled standard normals, offsets
/// are placed so that roughly half the rows have positive residual at a
/// reference feasible point, `h` is nonnegative on the (nonnegative) box,
/// and a feasible start point is attached.
pub fn make_random(
    seed: u64,
    n: usize,
    m: usize,
    q: f64,
    h_kind: HKind,
    x_kind: XKind,
) -> Result<ProblemSpec, Error> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("dimensions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / crate::math::sqrt(n as f64);
    let mut a = Mat::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            a.set(i, j, z * scale);
        }
    }

    let upper = 2.0;
    let simplex_rhs = 0.75 * upper * n as f64 / 2.0;
    let set = match x_kind {
        XKind::Box => Polyhedron::bounded_box(vec![0.0; n], vec![upper; n])?,
        XKind::BoxSimplex => Polyhedron::new(
            vec![0.0; n],
            vec![upper; n],
            Mat::from_rows(&[vec![1.0; n]])?,
            vec![simplex_rhs],
        )?,
    };

    let sample_point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * upper).collect();
        if x_kind == XKind::BoxSimplex {
            let s: f64 = x.iter().sum();
            if s > 0.9 * simplex_rhs {
                let f = 0.9 * simplex_rhs / s;
                for xi in &mut x {
                    *xi *= f;
                }
            }
        }
        x
    };

    let x_ref = sample_point(&mut rng);
    let ax = a.matvec(&x_ref);
    let b: Vec<f64> = ax
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let pad = 0.1 + 0.9 * rng.gen::<f64>();
            if i % 2 == 0 {
                v + pad
            } else {
                v - pad
            }
        })
        .collect();

    let h = match h_kind {
        HKind::Zero => HSpec::Zero,
        HKind::Linear => {
            let c: Vec<f64> = (0..n)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    crate::math::abs(z)
                })
                .collect();
            HSpec::Linear(c)
        }
        HKind::Quadratic => {
            let mut r = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    r.set(i, j, z);
                }
            }
            let mut p = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += r.get(k, i) * r.get(k, j);
                    }
                    p.set(i, j, s / n as f64);
                }
            }
            let lipschitz = symmetric_eig_max(&p)?;
            HSpec::Quadratic {
                p,
                c: vec![0.0; n],
                lipschitz,
            }
        }
    };

    let x0 = sample_point(&mut rng);
    ProblemSpec::new(a, b, q, h, set)?.with_x0(x0)
}
