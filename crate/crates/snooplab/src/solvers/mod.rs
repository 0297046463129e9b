//! Estimator kernels: the single-covariate adjustment estimators that the
//! analyst models maximize over, plus the cross-validated lasso used to
//! learn an outcome proxy from an independent training draw.
//!
//! Both core estimators are linear in the outcome vector, which is what
//! makes blinded selection against a proxy equivalent (in expectation) to
//! snooping on the proxy itself.

mod lasso;
mod logistic;

pub use lasso::{lasso_cv, lasso_cv_with, lasso_fit, predict_mu_hat, LassoModel, LassoOptions};
pub use logistic::{fit_logistic, LogisticFit};

use crate::error::{Error, Result};
use crate::linalg;

/// Which adjustment estimator the analyst uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Coefficient on treatment from least squares of y on [1, x_j, a].
    AdjustedOls,
    /// Hajek-normalized inverse propensity weighted contrast.
    HajekIpw,
}

impl EstimatorKind {
    pub fn estimate(&self, x_j: &[f64], a: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            EstimatorKind::AdjustedOls => ols_adjusted(x_j, a, y),
            EstimatorKind::HajekIpw => ipw_estimate(x_j, a, y),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::AdjustedOls => "ols",
            EstimatorKind::HajekIpw => "ipw",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ols" => Ok(EstimatorKind::AdjustedOls),
            "ipw" => Ok(EstimatorKind::HajekIpw),
            other => Err(Error::invalid_config(format!(
                "unknown estimator '{other}' (expected 'ols' or 'ipw')"
            ))),
        }
    }
}

fn check_estimator_input(x_j: &[f64], a: &[f64], y: &[f64]) -> Result<()> {
    if x_j.len() != a.len() || a.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, a has {}, y has {}",
            x_j.len(),
            a.len(),
            y.len()
        )));
    }
    if x_j.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid_argument("non-finite value in input"));
    }
    if a.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(Error::invalid_argument(
            "treatment indicators must be exactly 0 or 1",
        ));
    }
    Ok(())
}

fn arm_counts(a: &[f64]) -> (usize, usize) {
    let treated = a.iter().filter(|v| **v == 1.0).count();
    (a.len() - treated, treated)
}

/// Coefficient on the treatment indicator in the least-squares fit of `y`
/// on an intercept, `x_j`, and `a`, solved through the 3x3 normal
/// equations with partial pivoting.
pub fn ols_adjusted(x_j: &[f64], a: &[f64], y: &[f64]) -> Result<f64> {
    check_estimator_input(x_j, a, y)?;
    if y.len() < 3 {
        return Err(Error::invalid_argument(
            "adjusted OLS needs at least 3 observations",
        ));
    }
    let ones = vec![1.0; y.len()];
    let beta = linalg::least_squares(&[&ones, x_j, a], y)?;
    Ok(beta[2])
}

/// Hajek inverse-propensity-weighted contrast with a univariate logistic
/// propensity model. Returns 0 whenever the propensity fit is degenerate
/// (separation, saturation, or non-convergence), so a failed fit enters
/// a candidate maximization as an ordinary zero.
pub fn ipw_estimate(x_j: &[f64], a: &[f64], y: &[f64]) -> Result<f64> {
    check_estimator_input(x_j, a, y)?;
    let (controls, treated) = arm_counts(a);
    if controls == 0 || treated == 0 {
        return Err(Error::invalid_argument(
            "IPW needs both treatment arms nonempty",
        ));
    }
    let fit = fit_logistic(x_j, a)?;
    if fit.degenerate {
        return Ok(0.0);
    }
    let mut num_t = 0.0;
    let mut den_t = 0.0;
    let mut num_c = 0.0;
    let mut den_c = 0.0;
    for i in 0..y.len() {
        let pi = fit.probability(x_j[i]);
        if a[i] == 1.0 {
            let w = 1.0 / pi;
            num_t += y[i] * w;
            den_t += w;
        } else {
            let w = 1.0 / (1.0 - pi);
            num_c += y[i] * w;
            den_c += w;
        }
    }
    Ok(num_t / den_t - num_c / den_c)
}

/// Treatment coefficient when the covariate slope is frozen at a supplied
/// population value: the difference in arm means of `y - slope * x`.
pub fn d0_fixed_slope(x_j: &[f64], a: &[f64], y: &[f64], pop_slope: f64) -> Result<f64> {
    check_estimator_input(x_j, a, y)?;
    if !pop_slope.is_finite() {
        return Err(Error::invalid_argument("pop_slope must be finite"));
    }
    let (controls, treated) = arm_counts(a);
    if controls == 0 || treated == 0 {
        return Err(Error::invalid_argument(
            "fixed-slope contrast needs both arms nonempty",
        ));
    }
    let mut sum_t = 0.0;
    let mut sum_c = 0.0;
    for i in 0..y.len() {
        let z = y[i] - pop_slope * x_j[i];
        if a[i] == 1.0 {
            sum_t += z;
        } else {
            sum_c += z;
        }
    }
    Ok(sum_t / treated as f64 - sum_c / controls as f64)
}
