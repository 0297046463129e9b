//! Noise-induced correlation between candidate estimators.
//!
//! Blending the baseline conditional mean `mu(X, 0)` with an independent
//! copy of itself keeps the target's variance fixed while weakening every
//! covariate-target correlation. A fixed-slope approximation of the
//! adjusted estimator predicts that this blending pushes the correlation
//! between any two candidate estimates toward one:
//!
//! ```text
//! cor ~= (1 + (1 - m) b12) / sqrt((1 + (1 - m) b11) (1 + (1 - m) b22))
//! b_jk = r_j r_k rho_jk - r_j^2 - r_k^2
//! ```
//!
//! with `r_j` the correlation of column `j` with `mu(X, 0)` and `rho_jk`
//! the correlation between the columns. As the candidates move together,
//! the expected value of their maximum falls; the study below measures
//! both effects and compares them to the formula.
//!
//! The study fixes three unit-coefficient covariates (`mu = X1 + X2 + X3`)
//! under the exchangeable law, where `Var(mu) = 3 (1 + 2 rho_x)` and
//! `Cov(X_j, mu) = 1 + 2 rho_x`, so `r_j = sqrt((1 + 2 rho_x) / 3)`.

use rayon::prelude::*;

use crate::analysts::candidate_estimates;
use crate::datagen::{draw_dataset, gen_independent_mu_copy, noise_mixture, Dataset, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Lane};
use crate::solvers::EstimatorKind;
use crate::stats;

/// Closed-form approximate correlation between two candidate estimates at
/// noise weight `m`. Exactly 1 at `m = 1`.
pub fn approx_correlation(rho_mu_j: f64, rho_mu_k: f64, rho_jk: f64, m: f64) -> Result<f64> {
    for (name, v) in [
        ("rho_mu_j", rho_mu_j),
        ("rho_mu_k", rho_mu_k),
        ("rho_jk", rho_jk),
    ] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::invalid_argument(format!(
                "{name} must lie in [-1, 1], got {v}"
            )));
        }
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::invalid_argument(format!(
            "m must lie in [0, 1], got {m}"
        )));
    }
    let b = |rj: f64, rk: f64, rjk: f64| rj * rk * rjk - rj * rj - rk * rk;
    let b12 = b(rho_mu_j, rho_mu_k, rho_jk);
    let b11 = b(rho_mu_j, rho_mu_j, 1.0);
    let b22 = b(rho_mu_k, rho_mu_k, 1.0);
    let d1 = 1.0 + (1.0 - m) * b11;
    let d2 = 1.0 + (1.0 - m) * b22;
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(Error::invalid_argument(format!(
            "nonpositive denominator term ({d1}, {d2})"
        )));
    }
    Ok((1.0 + (1.0 - m) * b12) / (d1.sqrt() * d2.sqrt()))
}

/// Setup for the noise-correlation study: three unit-coefficient signal
/// covariates, varying exchangeable correlation and noise weight.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCorSpec {
    pub n: usize,
    pub rho_x_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
}

impl Default for NoiseCorSpec {
    fn default() -> Self {
        Self {
            n: 50,
            rho_x_values: vec![0.0, 0.3, 0.6],
            m_values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            replications: 2000,
            base_seed: 0,
        }
    }
}

/// One (rho_x, m) grid point of the study.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCorRow {
    pub rho_x: f64,
    pub m: f64,
    /// Correlation of the first two candidate estimates across draws.
    pub empirical_cor: f64,
    /// Value of [`approx_correlation`] at the population inputs.
    pub analytic_cor: f64,
    /// Monte Carlo mean of the maximum candidate estimate.
    pub expected_max: f64,
    pub cor_se: f64,
    pub max_se: f64,
    pub replications: usize,
}

/// Runs the study. Within each replication the same design and independent
/// copy feed every noise weight, so the m-profile is measured on common
/// random numbers.
pub fn run_noise_correlation(spec: &NoiseCorSpec) -> Result<Vec<NoiseCorRow>> {
    if spec.replications < 2 {
        return Err(Error::invalid_config("need at least 2 replications"));
    }
    for &m in &spec.m_values {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::invalid_config(format!("m = {m} outside [0, 1]")));
        }
    }
    let mut rows = Vec::new();
    for &rho_x in &spec.rho_x_values {
        // rho2 = 1 gives a noiseless dataset; only X and mu are used.
        let config = SimConfig::with_beta(
            spec.n,
            3,
            1.0,
            0.0,
            rho_x,
            vec![1.0, 1.0, 1.0],
            spec.base_seed,
        )?;
        let tag = format!("noisecor/rhox{rho_x}");

        let per_rep: Vec<Result<Vec<(f64, f64, f64)>>> = (0..spec.replications as u64)
            .into_par_iter()
            .map(|rep| noise_replication(&config, &tag, rep, &spec.m_values))
            .collect();
        let per_rep: Vec<Vec<(f64, f64, f64)>> =
            per_rep.into_iter().collect::<Result<_>>()?;

        let rho_mu = ((1.0 + 2.0 * rho_x) / 3.0).sqrt();
        for (mi, &m) in spec.m_values.iter().enumerate() {
            let d1: Vec<f64> = per_rep.iter().map(|r| r[mi].0).collect();
            let d2: Vec<f64> = per_rep.iter().map(|r| r[mi].1).collect();
            let maxes: Vec<f64> = per_rep.iter().map(|r| r[mi].2).collect();
            let empirical_cor = stats::correlation(&d1, &d2);
            rows.push(NoiseCorRow {
                rho_x,
                m,
                empirical_cor,
                analytic_cor: approx_correlation(rho_mu, rho_mu, rho_x, m)?,
                expected_max: stats::mean(&maxes),
                cor_se: stats::correlation_se(empirical_cor, spec.replications),
                max_se: stats::standard_error(&maxes),
                replications: spec.replications,
            });
        }
    }
    Ok(rows)
}

fn noise_replication(
    config: &SimConfig,
    tag: &str,
    rep: u64,
    m_values: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let mut rng = stream_rng(config.seed, tag, rep, Lane::Dataset);
    let ds = draw_dataset(config, &mut rng)?;
    let mut rng_u = stream_rng(config.seed, tag, rep, Lane::ProxyCopy);
    let u = gen_independent_mu_copy(config, &mut rng_u)?;
    let all: Vec<usize> = (0..config.p).collect();
    m_values
        .iter()
        .map(|&m| {
            let target = noise_mixture(&ds.mu, &u, m)?;
            let values =
                candidate_estimates(&ds, &target, EstimatorKind::AdjustedOls, &all)?;
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok((values[0], values[1], max))
        })
        .collect()
}

/// Monte Carlo check that blending noise into the selection target does
/// not raise the expected maximized estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConditionCheck {
    /// Mean maximized estimate against the clean baseline mean.
    pub mean_plain: f64,
    /// Mean maximized estimate against the blend at weight `1 - rho2`.
    pub mean_noised: f64,
    /// `mean_plain - mean_noised`.
    pub margin: f64,
    pub pooled_se: f64,
    /// `margin >= -2 * pooled_se`.
    pub satisfied: bool,
    pub replications: usize,
}

/// Estimates both sides of the condition for one generative setting and
/// estimator. Both targets are evaluated on the same draws.
pub fn check_noise_condition(
    config: &SimConfig,
    estimator: EstimatorKind,
    replications: usize,
) -> Result<NoiseConditionCheck> {
    if replications < 2 {
        return Err(Error::invalid_argument("need at least 2 replications"));
    }
    let tag = format!(
        "noisecond/{}/n{}/p{}/rho2{}",
        estimator.label(),
        config.n,
        config.p,
        config.rho2
    );
    let m = 1.0 - config.rho2;
    let per_rep: Vec<Result<(f64, f64)>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(config.seed, &tag, rep, Lane::Dataset);
            let ds = draw_dataset(config, &mut rng)?;
            // Baseline mean, treatment contribution removed.
            let mu0: Vec<f64> = ds
                .mu
                .iter()
                .zip(&ds.a)
                .map(|(mu, a)| mu - config.delta * a)
                .collect();
            let mut rng_u = stream_rng(config.seed, &tag, rep, Lane::ProxyCopy);
            let u = gen_independent_mu_copy(config, &mut rng_u)?;
            let noised = noise_mixture(&mu0, &u, m)?;
            Ok((
                max_candidate(&ds, &mu0, estimator)?,
                max_candidate(&ds, &noised, estimator)?,
            ))
        })
        .collect();
    let per_rep: Vec<(f64, f64)> = per_rep.into_iter().collect::<Result<_>>()?;

    let plain: Vec<f64> = per_rep.iter().map(|r| r.0).collect();
    let noised: Vec<f64> = per_rep.iter().map(|r| r.1).collect();
    let mean_plain = stats::mean(&plain);
    let mean_noised = stats::mean(&noised);
    let margin = mean_plain - mean_noised;
    let pooled_se = (stats::standard_error(&plain).powi(2)
        + stats::standard_error(&noised).powi(2))
    .sqrt();
    Ok(NoiseConditionCheck {
        mean_plain,
        mean_noised,
        margin,
        pooled_se,
        satisfied: margin >= -2.0 * pooled_se,
        replications,
    })
}

fn max_candidate(ds: &Dataset, target: &[f64], estimator: EstimatorKind) -> Result<f64> {
    let all: Vec<usize> = (0..ds.p()).collect();
    let values = candidate_estimates(ds, target, estimator, &all)?;
    Ok(values.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}
