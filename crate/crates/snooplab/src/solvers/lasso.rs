//! Cross-validated lasso by coordinate descent, used by the blinded
//! analyst to learn an outcome proxy from an independent training draw.
//!
//! Covariates are standardized internally (centered, unit population sd)
//! and coefficients are reported on the original scale. The treatment
//! column rides along unpenalized by default: the analyst knows which
//! column is the exposure, so it is not a shrinkage candidate. The penalty
//! grid runs from `lambda_max = max_j |x_j' y| / n` down four decades, and
//! the fold assignment is round-robin by row index, so a fit is a pure
//! function of its inputs.

use crate::datagen::DesignMatrix;
use crate::error::{Error, Result};

const KKT_TOL: f64 = 1e-7;
/// Sweep budget for intermediate path points, which only shape the
/// cross-validation curve. The overfit tail of the path (penalty far
/// below the CV optimum, active set near the row count) converges very
/// slowly and contributes nothing to penalty selection, so it gets a
/// hard budget instead of a tolerance.
// TODO: sequential strong-rule screening with a KKT backcheck would make
// the cap unnecessary and speed up the p >= n paths further.
const PATH_SWEEP_CAP: usize = 40;
/// Sweep budget for the returned solution, which must meet the KKT
/// contract.
const POLISH_SWEEP_CAP: usize = 200_000;

/// Penalized linear model for the conditional mean of the outcome given
/// covariates and treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoModel {
    pub intercept: f64,
    /// Original-scale coefficients: the `p` covariates followed by the
    /// treatment column.
    pub coefficients: Vec<f64>,
    /// Selected penalty, on the standardized-problem scale.
    pub lambda: f64,
    /// Mean squared error at the selected penalty, from cross-validation.
    pub cv_error: f64,
}

impl LassoModel {
    pub fn treatment_coefficient(&self) -> f64 {
        *self.coefficients.last().expect("coefficients nonempty")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LassoOptions {
    /// Shrink the treatment column like any covariate. Off by default.
    pub penalize_treatment: bool,
}

/// Standardized copy of the design for coordinate descent.
struct Problem {
    cols: Vec<Vec<f64>>,
    included: Vec<bool>,
    penalized: Vec<bool>,
    x_mean: Vec<f64>,
    x_scale: Vec<f64>,
    y_mean: f64,
    y_centered: Vec<f64>,
    n: usize,
}

impl Problem {
    fn build(raw_cols: &[&[f64]], penalized: Vec<bool>, y: &[f64]) -> Problem {
        let n = y.len();
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let y_centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
        let k = raw_cols.len();
        let mut cols = Vec::with_capacity(k);
        let mut included = vec![false; k];
        let mut x_mean = vec![0.0; k];
        let mut x_scale = vec![0.0; k];
        for (j, col) in raw_cols.iter().enumerate() {
            let m = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
            let s = var.sqrt();
            x_mean[j] = m;
            x_scale[j] = s;
            if s > 0.0 {
                included[j] = true;
                cols.push(col.iter().map(|v| (v - m) / s).collect());
            } else {
                cols.push(vec![0.0; n]);
            }
        }
        Problem {
            cols,
            included,
            penalized,
            x_mean,
            x_scale,
            y_mean,
            y_centered,
            n,
        }
    }

    fn lambda_max(&self) -> f64 {
        let n = self.n as f64;
        let mut max = 0.0_f64;
        for j in 0..self.cols.len() {
            if self.included[j] && self.penalized[j] {
                let g = dot(&self.cols[j], &self.y_centered).abs() / n;
                max = max.max(g);
            }
        }
        max
    }

    /// One coordinate-descent pass over `indices`; returns the largest
    /// coefficient change. The residual `r = y_centered - X b` is kept
    /// current in place.
    fn sweep(&self, lambda: f64, b: &mut [f64], r: &mut [f64], indices: &[usize]) -> f64 {
        let n = self.n as f64;
        let mut max_delta = 0.0_f64;
        for &j in indices {
            if !self.included[j] {
                continue;
            }
            let col = &self.cols[j];
            let g = dot(col, r) / n + b[j];
            let new = if self.penalized[j] {
                soft_threshold(g, lambda)
            } else {
                g
            };
            let delta = new - b[j];
            if delta != 0.0 {
                for (ri, &ci) in r.iter_mut().zip(col) {
                    *ri -= delta * ci;
                }
                b[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }

    /// Largest violation of coordinate-wise optimality at `b`.
    fn kkt_violation(&self, lambda: f64, b: &[f64], r: &[f64]) -> f64 {
        let n = self.n as f64;
        let mut worst = 0.0_f64;
        for j in 0..self.cols.len() {
            if !self.included[j] {
                continue;
            }
            let g = dot(&self.cols[j], r) / n;
            let v = if !self.penalized[j] {
                g.abs()
            } else if b[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * b[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Scale-aware coefficient-change tolerance.
    fn coef_tol(&self) -> f64 {
        let n = self.n as f64;
        let sd_y = (self.y_centered.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        1e-9 * sd_y.max(1.0)
    }

    /// Coordinate descent, warm-started at `b`. Path points stop on
    /// coefficient stability; the returned solution (`polish`) additionally
    /// iterates until the KKT conditions hold.
    fn solve(&self, lambda: f64, b: &mut [f64], r: &mut [f64], polish: bool) {
        let all: Vec<usize> = (0..self.cols.len()).collect();
        let coef_tol = self.coef_tol();
        let cap = if polish {
            POLISH_SWEEP_CAP
        } else {
            PATH_SWEEP_CAP
        };
        let mut sweeps = 0;
        loop {
            let d_full = self.sweep(lambda, b, r, &all);
            sweeps += 1;
            let active: Vec<usize> = (0..b.len())
                .filter(|&j| b[j] != 0.0 || !self.penalized[j])
                .collect();
            if active.len() < b.len() {
                loop {
                    let d = self.sweep(lambda, b, r, &active);
                    sweeps += 1;
                    if d < coef_tol || sweeps >= cap {
                        break;
                    }
                }
            }
            if sweeps >= cap {
                break;
            }
            if d_full < coef_tol && (!polish || self.kkt_violation(lambda, b, r) <= KKT_TOL) {
                break;
            }
        }
    }

    /// Map standardized coefficients back to the original scale.
    fn to_original_scale(&self, b: &[f64]) -> (f64, Vec<f64>) {
        let mut coefs = vec![0.0; b.len()];
        let mut intercept = self.y_mean;
        for j in 0..b.len() {
            if self.included[j] {
                coefs[j] = b[j] / self.x_scale[j];
                intercept -= coefs[j] * self.x_mean[j];
            }
        }
        (intercept, coefs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn soft_threshold(g: f64, lambda: f64) -> f64 {
    if g > lambda {
        g - lambda
    } else if g < -lambda {
        g + lambda
    } else {
        0.0
    }
}

fn log_spaced_grid(lambda_max: f64, count: usize) -> Vec<f64> {
    if lambda_max <= 0.0 || !lambda_max.is_finite() {
        return vec![0.0];
    }
    if count == 1 {
        return vec![lambda_max];
    }
    (0..count)
        .map(|i| lambda_max * 10f64.powf(-4.0 * i as f64 / (count - 1) as f64))
        .collect()
}

fn gather(rows: &[usize], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|&i| v[i]).collect()
}

fn check_inputs(x: &DesignMatrix, a: &[f64], y: &[f64]) -> Result<()> {
    if a.len() != x.n_rows() || y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, a has {}, y has {}",
            x.n_rows(),
            a.len(),
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_argument("non-finite value in training data"));
    }
    Ok(())
}

/// Lasso fit at a single penalty on the full data (no cross-validation).
pub fn lasso_fit(
    x: &DesignMatrix,
    a: &[f64],
    y: &[f64],
    lambda: f64,
) -> Result<LassoModel> {
    lasso_fit_with(x, a, y, lambda, LassoOptions::default())
}

pub fn lasso_fit_with(
    x: &DesignMatrix,
    a: &[f64],
    y: &[f64],
    lambda: f64,
    opts: LassoOptions,
) -> Result<LassoModel> {
    check_inputs(x, a, y)?;
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::invalid_argument("lambda must be nonnegative"));
    }
    let p = x.n_cols();
    let mut raw: Vec<&[f64]> = (0..p).map(|j| x.column(j)).collect();
    raw.push(a);
    let mut penalized = vec![true; p];
    penalized.push(opts.penalize_treatment);
    let prob = Problem::build(&raw, penalized, y);
    let mut b = vec![0.0; p + 1];
    let mut r = prob.y_centered.clone();
    prob.solve(lambda, &mut b, &mut r, true);
    let (intercept, coefficients) = prob.to_original_scale(&b);
    Ok(LassoModel {
        intercept,
        coefficients,
        lambda,
        cv_error: f64::NAN,
    })
}

/// Cross-validated lasso: fits a descending penalty path within each fold,
/// selects the penalty minimizing mean validation squared error (largest
/// penalty on ties), and refits on the full training data.
pub fn lasso_cv(
    x: &DesignMatrix,
    a: &[f64],
    y: &[f64],
    folds: usize,
    lambda_count: usize,
) -> Result<LassoModel> {
    lasso_cv_with(x, a, y, folds, lambda_count, LassoOptions::default())
}

pub fn lasso_cv_with(
    x: &DesignMatrix,
    a: &[f64],
    y: &[f64],
    folds: usize,
    lambda_count: usize,
    opts: LassoOptions,
) -> Result<LassoModel> {
    check_inputs(x, a, y)?;
    let n = x.n_rows();
    if folds < 2 {
        return Err(Error::invalid_argument("cross-validation needs >= 2 folds"));
    }
    if n < folds {
        return Err(Error::invalid_argument(format!(
            "{n} training rows cannot fill {folds} folds"
        )));
    }
    if lambda_count == 0 {
        return Err(Error::invalid_argument("lambda_count must be >= 1"));
    }
    let p = x.n_cols();

    // Degenerate training data: nothing to fit beyond the mean.
    let y_mean = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|v| *v == y_mean) {
        return Ok(LassoModel {
            intercept: y_mean,
            coefficients: vec![0.0; p + 1],
            lambda: 0.0,
            cv_error: 0.0,
        });
    }

    let mut raw: Vec<&[f64]> = (0..p).map(|j| x.column(j)).collect();
    raw.push(a);
    let mut penalized = vec![true; p];
    penalized.push(opts.penalize_treatment);

    // The grid is anchored at the full-data lambda_max so that every fold
    // shares one path.
    let full = Problem::build(&raw, penalized.clone(), y);
    let grid = log_spaced_grid(full.lambda_max(), lambda_count);

    let mut sq_err = vec![0.0; grid.len()];
    for fold in 0..folds {
        let train_rows: Vec<usize> = (0..n).filter(|i| i % folds != fold).collect();
        let valid_rows: Vec<usize> = (0..n).filter(|i| i % folds == fold).collect();
        let train_cols: Vec<Vec<f64>> = raw.iter().map(|c| gather(&train_rows, c)).collect();
        let train_refs: Vec<&[f64]> = train_cols.iter().map(|c| c.as_slice()).collect();
        let y_train = gather(&train_rows, y);
        let prob = Problem::build(&train_refs, penalized.clone(), &y_train);

        let mut b = vec![0.0; p + 1];
        let mut r = prob.y_centered.clone();
        for (li, &lambda) in grid.iter().enumerate() {
            prob.solve(lambda, &mut b, &mut r, false);
            let (icpt, coefs) = prob.to_original_scale(&b);
            for &i in &valid_rows {
                let mut pred = icpt;
                for (j, c) in coefs.iter().enumerate().take(p) {
                    pred += c * x.column(j)[i];
                }
                pred += coefs[p] * a[i];
                let e = y[i] - pred;
                sq_err[li] += e * e;
            }
        }
    }

    let mut best = 0;
    for li in 1..grid.len() {
        if sq_err[li] < sq_err[best] {
            best = li;
        }
    }
    let cv_error = sq_err[best] / n as f64;

    // Refit on the full training data down the path to the chosen penalty;
    // only the final point needs the KKT polish.
    let mut b = vec![0.0; p + 1];
    let mut r = full.y_centered.clone();
    for &lambda in grid.iter().take(best) {
        full.solve(lambda, &mut b, &mut r, false);
    }
    full.solve(grid[best], &mut b, &mut r, true);
    let (intercept, coefficients) = full.to_original_scale(&b);
    Ok(LassoModel {
        intercept,
        coefficients,
        lambda: grid[best],
        cv_error,
    })
}

/// Evaluates the learned conditional-mean model on a dataset:
/// `intercept + X coefs + A * treatment_coefficient`, elementwise.
pub fn predict_mu_hat(model: &LassoModel, x: &DesignMatrix, a: &[f64]) -> Result<Vec<f64>> {
    let p = x.n_cols();
    if model.coefficients.len() != p + 1 {
        return Err(Error::invalid_argument(format!(
            "model has {} coefficients, design needs {}",
            model.coefficients.len(),
            p + 1
        )));
    }
    if a.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, a has {}",
            x.n_rows(),
            a.len()
        )));
    }
    let mut out = vec![model.intercept; x.n_rows()];
    for j in 0..p {
        let c = model.coefficients[j];
        if c == 0.0 {
            continue;
        }
        for (o, &xv) in out.iter_mut().zip(x.column(j)) {
            *o += c * xv;
        }
    }
    let ct = model.coefficients[p];
    for (o, &ai) in out.iter_mut().zip(a) {
        *o += ct * ai;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{assign_treatment, gen_design, DesignMatrix};
    use crate::rng::{stream_rng, Lane};

    fn toy_design(n: usize, p: usize, seed: u64) -> (DesignMatrix, Vec<f64>) {
        let mut rng = stream_rng(seed, "lasso/test", 0, Lane::Dataset);
        let x = gen_design(n, p, 0.0, &mut rng).unwrap();
        let a = assign_treatment(n).unwrap();
        (x, a)
    }

    #[test]
    fn full_shrinkage_zeroes_penalized_coefficients() {
        let (x, a) = toy_design(40, 4, 1);
        // y constructed orthogonal to the arms in sample: same values in
        // each half, so the unpenalized treatment coefficient is 0 too.
        let half: Vec<f64> = (0..20).map(|i| (i as f64) * 0.3 - 2.0).collect();
        let y: Vec<f64> = half.iter().chain(half.iter()).copied().collect();
        let y_mean = y.iter().sum::<f64>() / 40.0;

        let prob_lambda_max = {
            let mut raw: Vec<&[f64]> = (0..4).map(|j| x.column(j)).collect();
            raw.push(&a);
            let mut pen = vec![true; 4];
            pen.push(false);
            Problem::build(&raw, pen, &y).lambda_max()
        };
        let model = lasso_fit(&x, &a, &y, prob_lambda_max * 10.0).unwrap();
        for j in 0..4 {
            assert_eq!(model.coefficients[j], 0.0, "coefficient {j}");
        }
        assert!(model.treatment_coefficient().abs() < 1e-10);
        assert!((model.intercept - y_mean).abs() < 1e-10);
    }

    #[test]
    fn recovers_exact_linear_model() {
        let (x, a) = toy_design(500, 3, 7);
        let truth = [1.5, -2.0, 0.5];
        let delta = 1.0;
        let y: Vec<f64> = (0..500)
            .map(|i| {
                truth
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * x.column(j)[i])
                    .sum::<f64>()
                    + delta * a[i]
            })
            .collect();
        let model = lasso_cv(&x, &a, &y, 10, 100).unwrap();
        for j in 0..3 {
            assert!(
                (model.coefficients[j] - truth[j]).abs() < 0.05,
                "coefficient {j}: {} vs {}",
                model.coefficients[j],
                truth[j]
            );
        }
        assert!((model.treatment_coefficient() - delta).abs() < 0.05);
    }

    #[test]
    fn solution_satisfies_internal_kkt_conditions() {
        let (x, a) = toy_design(120, 8, 3);
        let mut rng = stream_rng(3, "lasso/kkt-noise", 0, Lane::Dataset);
        use rand::Rng;
        let y: Vec<f64> = (0..120)
            .map(|i| {
                2.0 * x.column(0)[i] - x.column(5)[i]
                    + 0.5 * a[i]
                    + rng.sample::<f64, _>(rand_distr::StandardNormal)
            })
            .collect();
        let model = lasso_cv(&x, &a, &y, 5, 60).unwrap();

        // Re-derive the standardized gradient from scratch.
        let mut raw: Vec<&[f64]> = (0..8).map(|j| x.column(j)).collect();
        raw.push(&a);
        let mut pen = vec![true; 8];
        pen.push(false);
        let prob = Problem::build(&raw, pen, &y);
        let mut b_std = vec![0.0; 9];
        for j in 0..9 {
            if prob.included[j] {
                b_std[j] = model.coefficients[j] * prob.x_scale[j];
            }
        }
        let mut r = prob.y_centered.clone();
        for j in 0..9 {
            if b_std[j] != 0.0 {
                for (ri, &ci) in r.iter_mut().zip(&prob.cols[j]) {
                    *ri -= b_std[j] * ci;
                }
            }
        }
        let v = prob.kkt_violation(model.lambda, &b_std, &r);
        assert!(v <= 1e-6, "KKT violation {v}");
    }

    #[test]
    fn penalizing_the_treatment_column_shrinks_it_too() {
        let (x, a) = toy_design(60, 2, 8);
        // Strong treatment signal on top of one covariate.
        let y: Vec<f64> = (0..60)
            .map(|i| 1.5 * x.column(0)[i] + 3.0 * a[i])
            .collect();
        let big = 1e6;
        let default = lasso_fit(&x, &a, &y, big).unwrap();
        assert!(
            default.treatment_coefficient().abs() > 1.0,
            "unpenalized treatment must survive full shrinkage"
        );
        let penalized = lasso_fit_with(
            &x,
            &a,
            &y,
            big,
            LassoOptions {
                penalize_treatment: true,
            },
        )
        .unwrap();
        assert_eq!(penalized.treatment_coefficient(), 0.0);
        let cv = lasso_cv_with(
            &x,
            &a,
            &y,
            5,
            30,
            LassoOptions {
                penalize_treatment: true,
            },
        )
        .unwrap();
        // At the CV-selected penalty the signal is strong enough that the
        // treatment column comes back.
        assert!((cv.treatment_coefficient() - 3.0).abs() < 0.3);
    }

    #[test]
    fn zero_variance_response_returns_intercept_only() {
        let (x, a) = toy_design(20, 3, 9);
        let y = vec![4.25; 20];
        let model = lasso_cv(&x, &a, &y, 5, 30).unwrap();
        assert_eq!(model.intercept, 4.25);
        assert!(model.coefficients.iter().all(|c| *c == 0.0));
        assert_eq!(model.cv_error, 0.0);
    }

    #[test]
    fn validation_errors() {
        let (x, a) = toy_design(10, 2, 2);
        let y = vec![1.0; 10];
        assert!(lasso_cv(&x, &a, &y, 1, 10).is_err());
        assert!(lasso_cv(&x, &a, &y, 11, 10).is_err());
        assert!(lasso_cv(&x, &a, &y, 5, 0).is_err());
        assert!(lasso_cv(&x, &a[..8], &y, 5, 10).is_err());
    }

    #[test]
    fn predict_intercept_only_model_is_constant() {
        let (x, a) = toy_design(12, 2, 4);
        let model = LassoModel {
            intercept: 3.0,
            coefficients: vec![0.0, 0.0, 0.0],
            lambda: 1.0,
            cv_error: 0.0,
        };
        let out = predict_mu_hat(&model, &x, &a).unwrap();
        assert!(out.iter().all(|v| *v == 3.0));
    }

    #[test]
    fn predict_with_true_model_reproduces_mu() {
        use crate::datagen::{draw_dataset, SimConfig};
        let cfg = SimConfig::new(30, 4, 0.5, 5)
            .unwrap()
            .with_delta(2.0);
        let mut rng = stream_rng(cfg.seed, "lasso/predict", 0, Lane::Dataset);
        let ds = draw_dataset(&cfg, &mut rng).unwrap();
        let mut coefs = cfg.beta.clone();
        coefs.push(cfg.delta);
        let model = LassoModel {
            intercept: 0.0,
            coefficients: coefs,
            lambda: 0.0,
            cv_error: 0.0,
        };
        let out = predict_mu_hat(&model, &ds.x, &ds.a).unwrap();
        for (o, m) in out.iter().zip(&ds.mu) {
            assert!((o - m).abs() < 1e-10);
        }
    }

    #[test]
    fn predict_rejects_wrong_width() {
        let (x, a) = toy_design(12, 3, 4);
        let model = LassoModel {
            intercept: 0.0,
            coefficients: vec![0.0; 3],
            lambda: 0.0,
            cv_error: 0.0,
        };
        assert!(predict_mu_hat(&model, &x, &a).is_err());
    }
}
