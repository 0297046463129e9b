//! Synthetic data generation.
//!
//! A draw consists of a covariate matrix `X`, a deterministic treatment
//! assignment `A` (controls in the first half, treated in the second),
//! outcomes `Y = X b + A delta + eps`, and the conditional mean
//! `mu = E(Y | X, A) = X b + A delta`. Covariates are marginally standard
//! normal with an optional exchangeable pairwise correlation `rho_x`,
//! realized through a single shared factor:
//!
//! ```text
//! X_j = sqrt(rho_x) * Z0 + sqrt(1 - rho_x) * Z_j
//! ```
//!
//! which keeps unit marginal variance exactly and costs O(n p).
//!
//! The residual standard deviation is calibrated so that `rho2` equals the
//! fraction of baseline-outcome variance explained by the covariates:
//! `Var(mu(X,0)) / Var(Y - A delta)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Column-major design matrix; rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let n_cols = columns.len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
            data.extend_from_slice(&col);
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Contiguous view of column `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    /// Matrix-vector product `X v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: {} coefficients for {} columns",
                v.len(),
                self.n_cols
            )));
        }
        let mut out = vec![0.0; self.n_rows];
        for (j, &w) in v.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.column(j)) {
                *o += w * x;
            }
        }
        Ok(out)
    }
}

/// Full generative specification for one simulation setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Sample size; must be even because assignment is fixed at n/2 : n/2.
    pub n: usize,
    /// Number of candidate covariates.
    pub p: usize,
    /// Fraction of baseline-outcome variance explained by the covariates.
    pub rho2: f64,
    /// True treatment effect added to treated outcomes.
    pub delta: f64,
    /// Exchangeable pairwise covariate correlation.
    pub rho_x: f64,
    /// Outcome-model coefficients, length `p`.
    pub beta: Vec<f64>,
    /// Residual standard deviation implied by `rho2`; derived at construction.
    pub sigma_eps: f64,
    /// Master seed for stream derivation.
    pub seed: u64,
    /// Default replication count for experiments that take this config.
    pub replications: usize,
}

impl SimConfig {
    /// Standard setting: coefficients from [`make_beta`], no treatment
    /// effect, independent covariates.
    pub fn new(n: usize, p: usize, rho2: f64, seed: u64) -> Result<Self> {
        Self::with_beta(n, p, rho2, 0.0, 0.0, make_beta(p)?, seed)
    }

    /// Fully specified setting; recalibrates the residual variance.
    pub fn with_beta(
        n: usize,
        p: usize,
        rho2: f64,
        delta: f64,
        rho_x: f64,
        beta: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::invalid_config(format!(
                "n must be even and positive, got {n}"
            )));
        }
        if p == 0 {
            return Err(Error::invalid_config("p must be at least 1"));
        }
        if !(rho2 > 0.0 && rho2 <= 1.0) {
            return Err(Error::invalid_config(format!(
                "rho2 must lie in (0, 1], got {rho2}"
            )));
        }
        if !(0.0..1.0).contains(&rho_x) {
            return Err(Error::invalid_config(format!(
                "rho_x must lie in [0, 1), got {rho_x}"
            )));
        }
        if beta.len() != p {
            return Err(Error::invalid_config(format!(
                "beta has length {}, expected p = {p}",
                beta.len()
            )));
        }
        if beta.iter().all(|b| *b == 0.0) {
            return Err(Error::invalid_config(
                "beta must have at least one nonzero entry to calibrate rho2",
            ));
        }
        if !delta.is_finite() || beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid_config("non-finite model parameters"));
        }
        let var_mu = mu_variance(&beta, rho_x);
        let sigma_eps = (var_mu * (1.0 - rho2) / rho2).sqrt();
        Ok(Self {
            n,
            p,
            rho2,
            delta,
            rho_x,
            beta,
            sigma_eps,
            seed,
            replications: 1,
        })
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    /// Population variance of the baseline conditional mean `mu(X, 0)`.
    pub fn var_mu(&self) -> f64 {
        mu_variance(&self.beta, self.rho_x)
    }

    /// Theoretical sd of the outcome (delta = 0 scale), used to put bias
    /// from different `rho2` settings on a common footing.
    pub fn sd_y(&self) -> f64 {
        (self.var_mu() + self.sigma_eps * self.sigma_eps).sqrt()
    }
}

/// One simulated draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DesignMatrix,
    /// Treatment indicators, exactly 0.0 or 1.0; treated half comes last.
    pub a: Vec<f64>,
    pub y: Vec<f64>,
    /// Conditional mean `E(Y | X, A)`.
    pub mu: Vec<f64>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn p(&self) -> usize {
        self.x.n_cols()
    }

    pub fn treated_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.a[i] == 1.0).collect()
    }

    pub fn control_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.a[i] == 0.0).collect()
    }
}

/// Outcome-model coefficients: 2 for the first five covariates, -1 for the
/// next five, 0 beyond; truncated when `p < 10`.
pub fn make_beta(p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::invalid_argument("make_beta: p must be at least 1"));
    }
    Ok((1..=p)
        .map(|j| match j {
            1..=5 => 2.0,
            6..=10 => -1.0,
            _ => 0.0,
        })
        .collect())
}

/// Residual variance that makes `rho2` the explained-variance fraction for
/// independent standard-normal covariates: `sum(beta^2) * (1 - rho2) / rho2`.
pub fn calibrate_noise_var(beta: &[f64], rho2: f64) -> Result<f64> {
    if !(rho2 > 0.0 && rho2 <= 1.0) {
        return Err(Error::invalid_config(format!(
            "rho2 must lie in (0, 1], got {rho2}"
        )));
    }
    let var_mu: f64 = beta.iter().map(|b| b * b).sum();
    if var_mu == 0.0 {
        return Err(Error::invalid_config(
            "beta must have at least one nonzero entry",
        ));
    }
    Ok(var_mu * (1.0 - rho2) / rho2)
}

/// `Var(mu(X,0))` under the exchangeable covariate law.
pub fn mu_variance(beta: &[f64], rho_x: f64) -> f64 {
    let sum_sq: f64 = beta.iter().map(|b| b * b).sum();
    let sum: f64 = beta.iter().sum();
    (1.0 - rho_x) * sum_sq + rho_x * sum * sum
}

/// Population least-squares slope of the outcome on covariate `j` alone,
/// `Cov(X_j, Y) / Var(X_j)`, under the exchangeable covariate law.
pub fn population_slope(beta: &[f64], rho_x: f64, j: usize) -> f64 {
    let sum: f64 = beta.iter().sum();
    (1.0 - rho_x) * beta[j] + rho_x * sum
}

/// Covariate matrix with standard-normal margins and exchangeable pairwise
/// correlation `rho_x`. Draw order is fixed (shared factor first, then one
/// column at a time) so a stream replays identically.
pub fn gen_design(
    n: usize,
    p: usize,
    rho_x: f64,
    rng: &mut impl Rng,
) -> Result<DesignMatrix> {
    if !(0.0..1.0).contains(&rho_x) {
        return Err(Error::invalid_config(format!(
            "rho_x must lie in [0, 1), got {rho_x}"
        )));
    }
    let shared: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let w_shared = rho_x.sqrt();
    let w_own = (1.0 - rho_x).sqrt();
    let mut columns = Vec::with_capacity(p);
    for _ in 0..p {
        let col: Vec<f64> = shared
            .iter()
            .map(|z0| {
                let z: f64 = rng.sample(StandardNormal);
                w_shared * z0 + w_own * z
            })
            .collect();
        columns.push(col);
    }
    DesignMatrix::from_columns(n, columns)
}

/// Deterministic assignment: controls first, treated second.
pub fn assign_treatment(n: usize) -> Result<Vec<f64>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::invalid_config(format!(
            "fixed assignment needs an even positive n, got {n}"
        )));
    }
    Ok((0..n).map(|i| if i < n / 2 { 0.0 } else { 1.0 }).collect())
}

/// Outcomes and conditional mean: `mu = X beta + A delta`, `y = mu + eps`.
pub fn gen_outcomes(
    x: &DesignMatrix,
    a: &[f64],
    beta: &[f64],
    delta: f64,
    sigma_eps: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} rows, design has {}",
            a.len(),
            x.n_rows()
        )));
    }
    if sigma_eps < 0.0 {
        return Err(Error::invalid_argument("sigma_eps must be nonnegative"));
    }
    let mut mu = x.matvec(beta)?;
    for (m, &ai) in mu.iter_mut().zip(a) {
        *m += delta * ai;
    }
    let y: Vec<f64> = mu
        .iter()
        .map(|&m| {
            if sigma_eps == 0.0 {
                m
            } else {
                let e: f64 = rng.sample(StandardNormal);
                m + sigma_eps * e
            }
        })
        .collect();
    Ok((y, mu))
}

/// Variance-preserving noise blend `mu0 * sqrt(1 - m) + u * sqrt(m)`.
pub fn noise_mixture(mu0: &[f64], u: &[f64], m: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid_argument(format!(
            "mixing weight must lie in [0, 1], got {m}"
        )));
    }
    if mu0.len() != u.len() {
        return Err(Error::invalid_argument(format!(
            "mixture inputs have lengths {} and {}",
            mu0.len(),
            u.len()
        )));
    }
    let w0 = (1.0 - m).sqrt();
    let w1 = m.sqrt();
    Ok(mu0
        .iter()
        .zip(u)
        .map(|(&a, &b)| w0 * a + w1 * b)
        .collect())
}

/// An independent copy of `mu(X, 0)`: a fresh design from the same law,
/// multiplied by the same coefficients, treatment contribution zero.
pub fn gen_independent_mu_copy(config: &SimConfig, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let x = gen_design(config.n, config.p, config.rho_x, rng)?;
    x.matvec(&config.beta)
}

/// One full draw from the configured model.
pub fn draw_dataset(config: &SimConfig, rng: &mut impl Rng) -> Result<Dataset> {
    let x = gen_design(config.n, config.p, config.rho_x, rng)?;
    let a = assign_treatment(config.n)?;
    let (y, mu) = gen_outcomes(&x, &a, &config.beta, config.delta, config.sigma_eps, rng)?;
    Ok(Dataset { x, a, y, mu })
}
