//! Exact overdetermined regression in the l1 and sup norms by active-set
//! enumeration, sized for the per-support minimizations inside `sigma_m`
//! (n <= ~16 rows, m < n columns).
//!
//! l1: some optimal coefficient vector interpolates m rows whose submatrix is
//! invertible, so scanning all C(n, m) interpolation subsets is exact.
//!
//! sup: by LP duality the optimal value is `max |lambda^T f| / ||lambda||_1`
//! over row subsets S of size m+1 whose submatrix has a one-dimensional left
//! null space spanned by `lambda`; a primal vertex sits among the subsets
//! attaining the max, recovered by solving the equalized system and checked
//! for feasibility.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Solve `A x = rhs` for square `A` with partial pivoting; `None` when a
/// pivot collapses.
fn solve_square(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, x| acc.max(math::abs(*x)))
        .max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            math::abs(a[r][col]).total_cmp(&math::abs(a[s][col]))
        })?;
        if math::abs(a[pivot][col]) < 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in (col + 1)..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Left null vector of a k x m matrix given by rows: `lambda` with
/// `lambda^T rows = 0`, returned only when the null space is exactly
/// one-dimensional (rank k-1).
fn left_null_vector(rows: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = rows.len();
    let m = rows.first()?.len();
    // Eliminate the m x k transpose, tracking pivot columns.
    let mut t = vec![vec![0.0f64; k]; m];
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(math::abs(*x)))
        .max(1e-300);
    let mut pivot_cols = Vec::new();
    let mut row_cursor = 0usize;
    for col in 0..k {
        let pivot = (row_cursor..m)
            .max_by(|&r, &s| math::abs(t[r][col]).total_cmp(&math::abs(t[s][col])));
        let Some(pivot) = pivot else { break };
        if math::abs(t[pivot][col]) < 1e-12 * scale {
            continue;
        }
        t.swap(row_cursor, pivot);
        for r in 0..m {
            if r == row_cursor {
                continue;
            }
            let factor = t[r][col] / t[row_cursor][col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..k {
                t[r][c] -= factor * t[row_cursor][c];
            }
        }
        pivot_cols.push((row_cursor, col));
        row_cursor += 1;
    }
    if pivot_cols.len() + 1 != k {
        return None;
    }
    let free_col = (0..k).find(|c| !pivot_cols.iter().any(|(_, pc)| pc == c))?;
    let mut lambda = vec![0.0; k];
    lambda[free_col] = 1.0;
    for &(row, col) in pivot_cols.iter().rev() {
        lambda[col] = -t[row][free_col] / t[row][col];
    }
    Some(lambda)
}

fn residual_linf(columns: &[Vec<f64>], target: &[f64], coeffs: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..target.len() {
        let mut r = target[i];
        for (col, b) in columns.iter().zip(coeffs) {
            r -= b * col[i];
        }
        worst = worst.max(math::abs(r));
    }
    worst
}

fn residual_l1(columns: &[Vec<f64>], target: &[f64], coeffs: &[f64]) -> f64 {
    let mut total = 0.0f64;
    for i in 0..target.len() {
        let mut r = target[i];
        for (col, b) in columns.iter().zip(coeffs) {
            r -= b * col[i];
        }
        total += math::abs(r);
    }
    total
}

/// Exact `min_b ||target - columns * b||_1`. Requires full column rank.
pub fn l1_fit(columns: &[Vec<f64>], target: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = columns.len();
    let n = target.len();
    if m == 0 {
        return Some((Vec::new(), target.iter().map(|x| math::abs(*x)).sum()));
    }
    if m > n {
        return None;
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    crate::sets::for_each_subset_of_size(n, m, |mask| {
        let rows = crate::sets::mask_indices(mask, n);
        let a: Vec<Vec<f64>> = rows
            .iter()
            .map(|&i| columns.iter().map(|col| col[i]).collect())
            .collect();
        let rhs: Vec<f64> = rows.iter().map(|&i| target[i]).collect();
        if let Some(b) = solve_square(a, rhs) {
            let value = residual_l1(columns, target, &b);
            if best.as_ref().is_none_or(|(_, v)| value < *v) {
                best = Some((b, value));
            }
        }
    });
    best
}

/// Exact `min_b ||target - columns * b||_inf`. Requires m < n and full
/// column rank.
pub fn sup_fit(columns: &[Vec<f64>], target: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = columns.len();
    let n = target.len();
    if m == 0 {
        return Some((Vec::new(), math::max_abs(target)));
    }
    if m + 1 > n {
        return None;
    }
    struct Candidate {
        value: f64,
        rows: Vec<usize>,
        lambda: Vec<f64>,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    crate::sets::for_each_subset_of_size(n, m + 1, |mask| {
        let rows = crate::sets::mask_indices(mask, n);
        let sub: Vec<Vec<f64>> = rows
            .iter()
            .map(|&i| columns.iter().map(|col| col[i]).collect())
            .collect();
        let Some(lambda) = left_null_vector(&sub) else {
            return;
        };
        let denom: f64 = lambda.iter().map(|x| math::abs(*x)).sum();
        if denom < 1e-300 {
            return;
        }
        let numer: f64 = lambda
            .iter()
            .zip(&rows)
            .map(|(l, &i)| l * target[i])
            .sum();
        candidates.push(Candidate {
            value: math::abs(numer) / denom,
            rows,
            lambda,
        });
    });
    let optimum = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    if !optimum.is_finite() {
        return None;
    }
    // recover a primal point from the subsets attaining the optimum; ties
    // are scanned in enumeration order until one recovery is feasible
    candidates.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut fallback: Option<(Vec<f64>, f64)> = None;
    for cand in &candidates {
        let in_band = cand.value >= optimum * (1.0 - 1e-9) - 1e-300;
        if !in_band && fallback.is_some() {
            break;
        }
        let orient: f64 = {
            let dot: f64 = cand
                .lambda
                .iter()
                .zip(&cand.rows)
                .map(|(l, &i)| l * target[i])
                .sum();
            if dot < 0.0 {
                -1.0
            } else {
                1.0
            }
        };
        // equalized system: (columns * b)_i = f_i - t * sign(lambda_i)
        let a: Vec<Vec<f64>> = cand
            .rows
            .iter()
            .map(|&i| columns.iter().map(|col| col[i]).collect())
            .collect();
        let rhs: Vec<f64> = cand
            .rows
            .iter()
            .zip(&cand.lambda)
            .map(|(&i, l)| {
                let sigma = if orient * l < 0.0 { -1.0 } else { 1.0 };
                target[i] - optimum * sigma
            })
            .collect();
        // rank-m consistent system with m+1 equations: solve any m
        // independent ones and keep the solution that checks out globally
        let Some(b) = solve_consistent(a, rhs) else {
            continue;
        };
        let actual = residual_linf(columns, target, &b);
        if in_band && actual <= optimum * (1.0 + 1e-9) + 1e-12 {
            return Some((b, actual));
        }
        if fallback.as_ref().is_none_or(|(_, v)| actual < *v) {
            fallback = Some((b, actual));
        }
    }
    fallback
}

/// Solve a consistent (m+1) x m system of rank m; the surplus equation must
/// be satisfied by the unique solution of the independent ones.
fn solve_consistent(a: Vec<Vec<f64>>, rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = a.len();
    let m = a.first()?.len();
    debug_assert_eq!(k, m + 1);
    // try dropping each row until a square solve succeeds
    for drop in 0..k {
        let sub: Vec<Vec<f64>> = (0..k).filter(|r| *r != drop).map(|r| a[r].clone()).collect();
        let sub_rhs: Vec<f64> = (0..k).filter(|r| *r != drop).map(|r| rhs[r]).collect();
        if let Some(b) = solve_square(sub, sub_rhs) {
            return Some(b);
        }
    }
    None
}
