//! Small dense normal-equations solver. The regression designs in this
//! crate have at most a couple dozen columns, so an explicit Gaussian
//! elimination with partial pivoting plus a reciprocal-condition gate is
//! both exact enough and easy to audit.

use crate::error::{Error, Result};

/// Reciprocal condition numbers below this are treated as rank deficiency.
pub const RCOND_FLOOR: f64 = 1e-12;

/// Solves the least-squares problem min ||y - Z b||^2 for the design whose
/// columns are `cols`, via the normal equations Z'Z b = Z'y.
///
/// Returns `DegenerateDesign` when Z'Z is singular or its reciprocal
/// condition number (1-norm estimate) falls below [`RCOND_FLOOR`].
pub fn least_squares(cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let k = cols.len();
    if k == 0 {
        return Err(Error::invalid_argument("least_squares: empty design"));
    }
    let n = y.len();
    for c in cols {
        if c.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design column has {} rows, response has {}",
                c.len(),
                n
            )));
        }
    }
    if n < k {
        return Err(Error::DegenerateDesign(format!(
            "{} rows cannot identify {} coefficients",
            n, k
        )));
    }

    // Gram matrix and right-hand side.
    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in i..k {
            let s = dot(cols[i], cols[j]);
            gram[i * k + j] = s;
            gram[j * k + i] = s;
        }
        rhs[i] = dot(cols[i], y);
    }

    let inv = invert(&gram, k).ok_or_else(|| {
        Error::DegenerateDesign("normal equations are singular".to_string())
    })?;
    let rc = rcond(&gram, &inv, k);
    if !rc.is_finite() || rc < RCOND_FLOOR {
        return Err(Error::DegenerateDesign(format!(
            "reciprocal condition number {rc:.3e} below {RCOND_FLOOR:.0e}"
        )));
    }

    let mut beta = vec![0.0; k];
    for i in 0..k {
        beta[i] = (0..k).map(|j| inv[i * k + j] * rhs[j]).sum();
    }
    Ok(beta)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss-Jordan inverse with partial pivoting; None when singular.
fn invert(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        // pivot
        let mut pivot = col;
        let mut best = m[col * k + col].abs();
        for r in (col + 1)..k {
            let v = m[r * k + col].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        if pivot != col {
            for c in 0..k {
                m.swap(col * k + c, pivot * k + c);
                inv.swap(col * k + c, pivot * k + c);
            }
        }
        let d = m[col * k + col];
        for c in 0..k {
            m[col * k + c] /= d;
            inv[col * k + c] /= d;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = m[r * k + col];
            if f == 0.0 {
                continue;
            }
            for c in 0..k {
                m[r * k + c] -= f * m[col * k + c];
                inv[r * k + c] -= f * inv[col * k + c];
            }
        }
    }
    Some(inv)
}

/// 1 / (||A||_1 * ||A^-1||_1).
fn rcond(a: &[f64], inv: &[f64], k: usize) -> f64 {
    1.0 / (norm1(a, k) * norm1(inv, k))
}

fn norm1(a: &[f64], k: usize) -> f64 {
    (0..k)
        .map(|c| (0..k).map(|r| a[r * k + c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let x1 = [1.0, 1.0, 1.0, 1.0, 1.0];
        let x2 = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x2.iter().map(|v| 2.0 + 3.0 * v).collect();
        let b = least_squares(&[&x1, &x2], &y).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_degenerate() {
        let x1 = [1.0, 1.0, 1.0, 1.0];
        let x2 = [2.0, 2.0, 2.0, 2.0]; // affine copy of the intercept
        let y = [1.0, 2.0, 3.0, 4.0];
        let err = least_squares(&[&x1, &x2], &y).unwrap_err();
        assert!(matches!(err, Error::DegenerateDesign(_)));
    }

    #[test]
    fn more_columns_than_rows_is_degenerate() {
        let c = [1.0, 2.0];
        let err = least_squares(&[&c, &c, &c], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateDesign(_)));
    }
}
