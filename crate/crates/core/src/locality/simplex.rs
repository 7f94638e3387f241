//! Phase-1 simplex for equality-constrained feasibility.
//!
//! Decides whether `A x = b, x >= 0` has a solution by minimizing the total
//! artificial infeasibility with a dense tableau and Bland's anti-cycling
//! rule. On success the structural solution is returned; on failure the
//! simplex multipliers form a Farkas certificate `y` with `y^T A <= 0`
//! componentwise and `y^T b > 0`, which callers re-verify independently.
//!
//! Dense is deliberate: the local-polytope problems this backs have at most
//! a few dozen rows, and redundant rows (the behavior normalization
//! constraints are linearly dependent) are handled for free by artificials
//! that simply stay basic at level zero.

use crate::error::{Error, Result};

/// Reduced costs this far below zero qualify a column for entering.
const ENTER_EPS: f64 = 1e-10;

/// Pivot elements smaller than this are treated as zero in the ratio test.
const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub(crate) enum Feasibility {
    /// `x >= 0` with `A x = b` up to the phase-1 tolerance.
    Feasible { x: Vec<f64> },
    /// Farkas multipliers, one per constraint row: `y^T A <= 0` columnwise
    /// while `y^T b` equals the positive phase-1 objective.
    Infeasible { y: Vec<f64> },
}

/// Solves the feasibility problem for `rows` equations over `cols`
/// nonnegative variables; `a` is row-major. Infeasibility below `tol` counts
/// as feasible.
pub(crate) fn equality_feasibility(
    rows: usize,
    cols: usize,
    a: &[f64],
    b: &[f64],
    tol: f64,
) -> Result<Feasibility> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);

    // tableau: structural | artificial | rhs, plus the reduced-cost row
    let width = cols + rows + 1;
    let mut t = vec![0.0f64; (rows + 1) * width];
    for i in 0..rows {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i * width + j] = flip * a[i * cols + j];
        }
        t[i * width + cols + i] = 1.0;
        t[i * width + cols + rows] = flip * b[i];
    }
    // minimize the sum of artificials: price out the initial basis
    for j in 0..width {
        let mut acc = 0.0;
        for i in 0..rows {
            acc += t[i * width + j];
        }
        let cost = if (cols..cols + rows).contains(&j) { 1.0 } else { 0.0 };
        t[rows * width + j] = cost - acc;
    }

    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let max_iterations = 1000 + 50 * (rows + cols);

    for _ in 0..max_iterations {
        // Bland: entering column is the lowest-index structural column with
        // a negative reduced cost (artificials never re-enter in phase 1)
        let entering = (0..cols).find(|&j| t[rows * width + j] < -ENTER_EPS);
        let Some(entering) = entering else {
            return Ok(extract(rows, cols, width, &t, &basis, tol));
        };

        // ratio test with Bland tie-breaking on the leaving basis index
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coeff = t[i * width + entering];
            if coeff <= PIVOT_EPS {
                continue;
            }
            let ratio = t[i * width + cols + rows] / coeff;
            match leaving {
                None => leaving = Some((i, ratio)),
                Some((best_row, best_ratio)) => {
                    if ratio < best_ratio - PIVOT_EPS
                        || (ratio <= best_ratio + PIVOT_EPS && basis[i] < basis[best_row])
                    {
                        leaving = Some((i, ratio));
                    }
                }
            }
        }
        let Some((pivot_row, _)) = leaving else {
            // the phase-1 objective is bounded below by zero, so an
            // unbounded ray can only come from numerical breakdown
            return Err(Error::Numeric(
                "phase-1 simplex found an unbounded direction".into(),
            ));
        };

        pivot(rows, width, &mut t, pivot_row, entering);
        basis[pivot_row] = entering;
    }

    Err(Error::Numeric(format!(
        "phase-1 simplex exceeded {max_iterations} iterations"
    )))
}

fn pivot(rows: usize, width: usize, t: &mut [f64], pr: usize, pc: usize) {
    let inv = 1.0 / t[pr * width + pc];
    for j in 0..width {
        t[pr * width + j] *= inv;
    }
    t[pr * width + pc] = 1.0;
    for i in 0..=rows {
        if i == pr {
            continue;
        }
        let factor = t[i * width + pc];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            t[i * width + j] -= factor * t[pr * width + j];
        }
        t[i * width + pc] = 0.0;
    }
}

fn extract(
    rows: usize,
    cols: usize,
    width: usize,
    t: &[f64],
    basis: &[usize],
    tol: f64,
) -> Feasibility {
    let objective = -t[rows * width + width - 1];
    if objective <= tol {
        let mut x = vec![0.0f64; cols];
        for (i, &var) in basis.iter().enumerate() {
            if var < cols {
                x[var] = t[i * width + cols + rows].max(0.0);
            }
        }
        Feasibility::Feasible { x }
    } else {
        // multipliers from the reduced costs of the artificials:
        // r_j = 1 - y_i for the artificial of row i
        let y = (0..rows)
            .map(|i| 1.0 - t[rows * width + cols + i])
            .collect();
        Feasibility::Infeasible { y }
    }
}
