//! Independent oracles for the kernel tests. Everything here is written
//! against the math directly (Gauss-Jordan on the normal equations, grid
//! search on the likelihood, gradient checks from scratch) so it shares
//! no code path with the implementations it checks.

/// Least squares via Gauss-Jordan on the normal equations.
pub fn least_squares_oracle(cols: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let n = y.len();
    let mut aug = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            aug[i][j] = (0..n).map(|r| cols[i][r] * cols[j][r]).sum();
        }
        aug[i][k] = (0..n).map(|r| cols[i][r] * y[r]).sum();
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let d = aug[col][col];
        for j in 0..=k {
            aug[col][j] /= d;
        }
        for row in 0..k {
            if row != col {
                let f = aug[row][col];
                for j in 0..=k {
                    aug[row][j] -= f * aug[col][j];
                }
            }
        }
    }
    (0..k).map(|i| aug[i][k]).collect()
}

/// Treatment coefficient of y ~ 1 + x + a by the oracle solve.
pub fn ols_oracle(x: &[f64], a: &[f64], y: &[f64]) -> f64 {
    let ones = vec![1.0; y.len()];
    least_squares_oracle(&[&ones, x, a], y)[2]
}

fn log_likelihood(alpha0: f64, alpha1: f64, x: &[f64], a: &[f64]) -> f64 {
    let mut ll = 0.0;
    for i in 0..x.len() {
        let eta = alpha0 + alpha1 * x[i];
        ll += a[i] * eta - (eta.max(0.0) + (-eta.abs()).exp().ln_1p());
    }
    ll
}

/// Brute-force 2-D grid refinement of the logistic likelihood: a 41 x 41
/// grid repeatedly zoomed around its best point.
pub fn logistic_grid_oracle(x: &[f64], a: &[f64]) -> (f64, f64) {
    let (mut lo0, mut hi0, mut lo1, mut hi1) = (-10.0, 10.0, -10.0, 10.0);
    let (mut best0, mut best1) = (0.0, 0.0);
    for _ in 0..40 {
        let mut best_ll = f64::NEG_INFINITY;
        for i in 0..41 {
            let a0 = lo0 + (hi0 - lo0) * i as f64 / 40.0;
            for j in 0..41 {
                let a1 = lo1 + (hi1 - lo1) * j as f64 / 40.0;
                let ll = log_likelihood(a0, a1, x, a);
                if ll > best_ll {
                    best_ll = ll;
                    best0 = a0;
                    best1 = a1;
                }
            }
        }
        let span0 = (hi0 - lo0) / 20.0;
        let span1 = (hi1 - lo1) / 20.0;
        lo0 = best0 - span0;
        hi0 = best0 + span0;
        lo1 = best1 - span1;
        hi1 = best1 + span1;
    }
    (best0, best1)
}

/// Largest violation of the lasso optimality conditions, recomputed from
/// the raw data: standardize columns (population sd), map the model's
/// original-scale coefficients onto the standardized problem, and check
/// the gradient of the squared loss column by column.
pub fn lasso_kkt_oracle(
    columns: &[Vec<f64>],
    penalized: &[bool],
    y: &[f64],
    intercept: f64,
    coefficients: &[f64],
    lambda: f64,
) -> f64 {
    let n = y.len();
    let nf = n as f64;
    // Residuals on the original scale (identical to standardized-problem
    // residuals because centering is absorbed by the intercept).
    let mut resid = vec![0.0; n];
    for i in 0..n {
        let mut pred = intercept;
        for (j, col) in columns.iter().enumerate() {
            pred += coefficients[j] * col[i];
        }
        resid[i] = y[i] - pred;
    }
    let mut worst = 0.0_f64;
    for (j, col) in columns.iter().enumerate() {
        let mean = col.iter().sum::<f64>() / nf;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf).sqrt();
        if sd == 0.0 {
            continue;
        }
        let grad: f64 = (0..n)
            .map(|i| (col[i] - mean) / sd * resid[i])
            .sum::<f64>()
            / nf;
        let b_std = coefficients[j] * sd;
        let v = if !penalized[j] {
            grad.abs()
        } else if b_std == 0.0 {
            (grad.abs() - lambda).max(0.0)
        } else {
            (grad - lambda * b_std.signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}
