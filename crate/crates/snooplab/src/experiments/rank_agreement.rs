//! Decay of preference-rank disagreement between blinded and snooping
//! analysts as the sample grows.
//!
//! Both analysts rank every candidate column by its adjusted estimate, one
//! against the outcomes and one against the conditional-mean proxy. The
//! disagreement event for a column pair (j, k) is a strict order reversal
//! between the two rankings. With signal in both columns, fixed
//! assignment, covariates independent of treatment, and the least-squares
//! estimator, the probability of a reversal vanishes as n grows: the
//! chance covariate-treatment imbalances that drive both rankings are
//! visible to the blinded analyst too.

use rayon::prelude::*;

use crate::analysts::{preference_ranks, rank_disagreement_indicator};
use crate::datagen::{draw_dataset, population_slope, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Lane};
use crate::solvers::{lasso_cv, predict_mu_hat, EstimatorKind};

/// Which proxy the blinded ranking uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankProxy {
    TrueMu,
    /// Lasso fit on an independent training draw of the same size.
    LearnedMu {
        folds: usize,
        lambda_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankAgreementRow {
    pub n: usize,
    /// Fraction of replications with a strict order reversal.
    pub p_disagree: f64,
    /// Binomial standard error.
    pub se: f64,
    pub replications: usize,
}

/// Estimates the disagreement probability for the column pair (j, k) at
/// each sample size. The template config supplies everything but n.
pub fn run_rank_agreement(
    n_values: &[usize],
    template: &SimConfig,
    j: usize,
    k: usize,
    replications: usize,
    proxy: RankProxy,
) -> Result<Vec<RankAgreementRow>> {
    if n_values.is_empty() {
        return Err(Error::invalid_argument("no sample sizes supplied"));
    }
    if replications == 0 {
        return Err(Error::invalid_argument("replications must be positive"));
    }
    if j == k || j >= template.p || k >= template.p {
        return Err(Error::invalid_config(format!(
            "need two distinct columns below p = {}, got ({j}, {k})",
            template.p
        )));
    }
    // Both columns must carry signal: their population correlation with
    // the baseline mean must be nonzero, or the rankings are coin flips.
    for col in [j, k] {
        if population_slope(&template.beta, template.rho_x, col) == 0.0 {
            return Err(Error::invalid_config(format!(
                "column {col} is uncorrelated with the baseline mean"
            )));
        }
    }

    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let config = SimConfig::with_beta(
            n,
            template.p,
            template.rho2,
            template.delta,
            template.rho_x,
            template.beta.clone(),
            template.seed,
        )?;
        let tag = format!("rankagree/n{n}");
        let flags: Vec<Result<bool>> = (0..replications as u64)
            .into_par_iter()
            .map(|rep| disagreement_replication(&config, &tag, rep, j, k, proxy))
            .collect();
        let flags: Vec<bool> = flags.into_iter().collect::<Result<_>>()?;
        let disagreements = flags.iter().filter(|f| **f).count();
        let p_hat = disagreements as f64 / replications as f64;
        rows.push(RankAgreementRow {
            n,
            p_disagree: p_hat,
            se: (p_hat * (1.0 - p_hat) / replications as f64).sqrt(),
            replications,
        });
    }
    Ok(rows)
}

fn disagreement_replication(
    config: &SimConfig,
    tag: &str,
    rep: u64,
    j: usize,
    k: usize,
    proxy: RankProxy,
) -> Result<bool> {
    let mut rng = stream_rng(config.seed, tag, rep, Lane::Dataset);
    let ds = draw_dataset(config, &mut rng)?;
    let ranks_snoop = preference_ranks(&ds, &ds.y, EstimatorKind::AdjustedOls)?;
    let proxy_vec = match proxy {
        RankProxy::TrueMu => ds.mu.clone(),
        RankProxy::LearnedMu {
            folds,
            lambda_count,
        } => {
            let mut rng_t = stream_rng(config.seed, tag, rep, Lane::TrainingSet);
            let train = draw_dataset(config, &mut rng_t)?;
            let model = lasso_cv(&train.x, &train.a, &train.y, folds, lambda_count)?;
            predict_mu_hat(&model, &ds.x, &ds.a)?
        }
    };
    let ranks_blind = preference_ranks(&ds, &proxy_vec, EstimatorKind::AdjustedOls)?;
    rank_disagreement_indicator(&ranks_blind, &ranks_snoop, j, k)
}
