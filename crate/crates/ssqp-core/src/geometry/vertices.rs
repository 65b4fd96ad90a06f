//! Tiny-scale vertex enumeration for polyhedra.
//!
//! Every vertex is a basic feasible point: a solution of `n` linearly
//! independent active constraints that satisfies all remaining ones. The
//! enumerator tries every `n`-subset of the unified constraint rows, so it is
//! guarded to dimension <= 6 and row count <= 12 (at most C(12,6) = 924
//! candidate systems). Duplicates are merged at tolerance 1e-8.

use alloc::vec;
use alloc::vec::Vec;

use super::{constraint_list, max_violation_scaled, approx_same_point, Polyhedron, FEAS_TOL};
use crate::error::Error;
use crate::linalg::Mat;
use crate::math;

const MAX_DIM: usize = 6;
const MAX_ROWS: usize = 12;
const MERGE_TOL: f64 = 1e-8;

/// Solve a small square system by Gaussian elimination with partial
/// pivoting; `None` when the system is (numerically) singular.
fn solve_square(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a = vec![0.0; n * (n + 1)];
    for (i, row) in rows.iter().enumerate() {
        a[i * (n + 1)..i * (n + 1) + n].copy_from_slice(row);
        a[i * (n + 1) + n] = rhs[i];
    }
    let w = n + 1;
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, math::abs(a[r * w + col])))
            .fold((col, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if pivot_val < 1e-10 {
            return None;
        }
        if pivot_row != col {
            for j in 0..w {
                a.swap(col * w + j, pivot_row * w + j);
            }
        }
        for r in (col + 1)..n {
            let f = a[r * w + col] / a[col * w + col];
            if f != 0.0 {
                for j in col..w {
                    a[r * w + j] -= f * a[col * w + j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = a[i * w + n];
        for j in (i + 1)..n {
            s -= a[i * w + j] * x[j];
        }
        x[i] = s / a[i * w + i];
    }
    Some(x)
}

/// All vertices of `set` intersected with the extra halfspaces
/// `extra * x <= extra_rhs`.
///
/// Guarded to tiny problems; beyond the guard an unsupported-scale error is
/// returned rather than an attempt at a combinatorial explosion.
pub fn enumerate_vertices(
    set: &Polyhedron,
    extra: Option<(&Mat, &[f64])>,
) -> Result<Vec<Vec<f64>>, Error> {
    let working = match extra {
        Some((rows, rhs)) => set.with_extra_rows(rows, rhs)?,
        None => set.clone(),
    };
    let n = working.dim();
    let list = constraint_list(&working);
    let m = list.normals.len();
    if n > MAX_DIM {
        return Err(Error::UnsupportedScale("vertex enumeration dimension > 6"));
    }
    if m > MAX_ROWS {
        return Err(Error::UnsupportedScale("vertex enumeration rows > 12"));
    }
    if m < n {
        return Ok(Vec::new());
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| list.normals[i].as_slice()).collect();
        let rhs: Vec<f64> = subset.iter().map(|&i| list.offsets[i]).collect();
        if let Some(mut v) = solve_square(&rows, &rhs) {
            for c in &mut v {
                *c += 0.0; // canonicalize -0.0
            }
            if max_violation_scaled(&list, &v) <= FEAS_TOL
                && !vertices.iter().any(|u| approx_same_point(u, &v, MERGE_TOL))
            {
                vertices.push(v);
            }
        }

        // next n-combination of {0..m}
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(vertices);
            }
            i -= 1;
            if subset[i] != i + m - n {
                subset[i] += 1;
                for j in (i + 1)..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
