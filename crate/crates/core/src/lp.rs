//! Dense primal simplex for small packing-type linear programs
//!
//! ```text
//! maximize  c·y   subject to  A y ≤ b,  y ≥ 0,   with b ≥ 0.
//! ```
//!
//! Since `b ≥ 0` the origin is a basic feasible solution, so a single phase
//! suffices. Bland's rule makes the pivot sequence finite under degeneracy,
//! which the polyhedral unit balls here produce constantly.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    /// Optimal primal point.
    pub point: Vec<f64>,
    pub pivots: usize,
}

/// Solves `max c·y  s.t.  rows·y ≤ b, y ≥ 0`.
pub fn maximize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = rows.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r.len(),
        });
    }
    if b.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Lp(
            "right-hand side must be finite and nonnegative".into(),
        ));
    }

    // Tableau columns: n structural, m slack, 1 rhs.
    let width = n + m + 1;
    let mut t = vec![0.0; m * width];
    for (i, row) in rows.iter().enumerate() {
        let r = &mut t[i * width..(i + 1) * width];
        r[..n].copy_from_slice(row);
        r[n + i] = 1.0;
        r[width - 1] = b[i];
    }
    // Reduced costs for the maximization, stored as c_j - z_j.
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    while let Some(enter) = (0..n + m).find(|&j| cost[j] > PIVOT_EPS) {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i * width + enter];
            if a > PIVOT_EPS {
                let ratio = t[i * width + width - 1] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_EPS
                            || (ratio <= lr + PIVOT_EPS && basis[i] < basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Lp("objective is unbounded".into()));
        };

        pivot(&mut t, &mut cost, width, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Lp("pivot limit reached".into()));
        }
    }

    let mut point = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            point[var] = t[i * width + width - 1];
        }
    }
    let objective = c.iter().zip(&point).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        objective,
        point,
        pivots,
    })
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, row: usize, col: usize) {
    let m = t.len() / width;
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..m {
        if i == row {
            continue;
        }
        let f = t[i * width + col];
        if f != 0.0 {
            for (v, pr) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for (v, pr) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * pr;
        }
    }
}
