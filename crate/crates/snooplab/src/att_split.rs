//! Sample splitting for the average treatment effect on the treated.
//!
//! The treated rows are partitioned into an exploration part and a fit
//! part. An explorer may study outcomes and covariates of the exploration
//! part however it likes before committing to one candidate estimator of
//! the counterfactual control mean; the estimate is then
//!
//! ```text
//! mean(y over all treated)  -  f(fit-part treated rows + all controls)
//! ```
//!
//! The first term's functional form is fixed up front, and conditional on
//! the selected candidate the second term never reads an exploration row,
//! so every outcome contributes to the final number while the exploration
//! cannot bias it. A no-split contrast arm applies the same selection rule
//! with the exploration view widened to every treated row, which restores
//! the familiar maximization bias and makes the comparison visible.
//!
//! Candidates are regression-imputation estimators indexed by covariate
//! subsets (the empty subset is the unadjusted control mean): fit least
//! squares of the outcome on the selected covariates among controls and
//! average the predictions over the fit-part treated rows.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::datagen::{draw_dataset, population_slope, Dataset, SimConfig};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{stream_rng, Lane};
use crate::stats;

/// Disjoint, exhaustive split of the treated indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreatedPartition {
    /// Exploration rows.
    pub i1: Vec<usize>,
    /// Fit rows: the treated rows the final estimate averages over.
    pub i2: Vec<usize>,
}

/// Regression-imputation estimator of the counterfactual control mean,
/// indexed by the covariate subset it adjusts for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateEstimator {
    pub id: String,
    /// Empty subset = unadjusted control mean.
    pub covariate_subset: Vec<usize>,
}

impl CandidateEstimator {
    pub fn unadjusted() -> Self {
        Self {
            id: "unadjusted".to_string(),
            covariate_subset: Vec::new(),
        }
    }

    pub fn single(j: usize) -> Self {
        Self {
            id: format!("x{j}"),
            covariate_subset: vec![j],
        }
    }
}

/// The unadjusted candidate plus one single-covariate candidate per column.
pub fn singleton_candidates(p: usize) -> Vec<CandidateEstimator> {
    let mut out = vec![CandidateEstimator::unadjusted()];
    out.extend((0..p).map(CandidateEstimator::single));
    out
}

/// Population moments an adversarial explorer is allowed to know: enough
/// to compute population regression coefficients for any covariate subset,
/// and nothing about the realized sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationPrior {
    pub beta: Vec<f64>,
    pub rho_x: f64,
}

impl PopulationPrior {
    pub fn from_config(config: &SimConfig) -> Self {
        Self {
            beta: config.beta.clone(),
            rho_x: config.rho_x,
        }
    }

    /// Population least-squares coefficients of the outcome on the subset.
    /// The exchangeable covariance `(1 - rho) I + rho 11'` inverts in
    /// closed form (Sherman-Morrison), so no sample quantity is touched.
    fn subset_coefficients(&self, subset: &[usize]) -> Vec<f64> {
        let rho = self.rho_x;
        let k = subset.len();
        let cov: Vec<f64> = subset
            .iter()
            .map(|&j| population_slope(&self.beta, rho, j))
            .collect();
        let s: f64 = cov.iter().sum();
        let denom = (1.0 - rho) * (1.0 - rho + k as f64 * rho);
        cov.iter()
            .map(|&c| c / (1.0 - rho) - rho * s / denom)
            .collect()
    }
}

/// How the explorer turns its view of the exploration rows into a choice.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplorerPolicy {
    /// Ignore the data, take the candidate with this id.
    Fixed(String),
    /// Take the single-covariate candidate whose covariate is most
    /// correlated (in absolute value) with the outcome on the
    /// exploration rows.
    GreedyMaxCorrelation,
    /// Predict each candidate's fit-step output from the exploration rows
    /// and population knowledge, and take the candidate whose predicted
    /// final estimate is largest: the worst case the split must survive.
    AdversarialMaxEstimate(PopulationPrior),
}

impl ExplorerPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            ExplorerPolicy::Fixed(_) => "fixed",
            ExplorerPolicy::GreedyMaxCorrelation => "greedy_max_correlation",
            ExplorerPolicy::AdversarialMaxEstimate(_) => "adversarial_max_estimate",
        }
    }
}

/// Uniformly random split of the treated rows with
/// `|i1| = round(fraction * n_treated)`.
pub fn partition_treated(
    dataset: &Dataset,
    fraction: f64,
    rng: &mut impl Rng,
) -> Result<TreatedPartition> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid_argument(format!(
            "explore fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let mut treated = dataset.treated_indices();
    if treated.len() < 2 {
        return Err(Error::invalid_argument(
            "partitioning needs at least 2 treated units",
        ));
    }
    let n1 = (fraction * treated.len() as f64).round() as usize;
    treated.shuffle(rng);
    let mut i1: Vec<usize> = treated[..n1].to_vec();
    let mut i2: Vec<usize> = treated[n1..].to_vec();
    i1.sort_unstable();
    i2.sort_unstable();
    Ok(TreatedPartition { i1, i2 })
}

/// The explorer's view: outcomes and covariate values of the exploration
/// rows only. Policies receive nothing else about the sample.
struct ExplorationView<'a> {
    y: Vec<f64>,
    dataset: &'a Dataset,
    rows: &'a [usize],
}

impl ExplorationView<'_> {
    fn column(&self, j: usize) -> Vec<f64> {
        let col = self.dataset.x.column(j);
        self.rows.iter().map(|&i| col[i]).collect()
    }

    fn column_mean(&self, j: usize) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let col = self.dataset.x.column(j);
        self.rows.iter().map(|&i| col[i]).sum::<f64>() / self.rows.len() as f64
    }
}

/// Runs the explorer on the exploration rows and returns its candidate.
/// Only `{y_i, x_i : i in partition.i1}` (plus, for the adversarial
/// policy, population prior knowledge) can influence the choice.
pub fn explore_select<'c>(
    dataset: &Dataset,
    partition: &TreatedPartition,
    candidates: &'c [CandidateEstimator],
    policy: &ExplorerPolicy,
) -> Result<&'c CandidateEstimator> {
    if candidates.is_empty() {
        return Err(Error::invalid_argument("no candidate estimators"));
    }
    for c in candidates {
        if let Some(&bad) = c.covariate_subset.iter().find(|&&j| j >= dataset.p()) {
            return Err(Error::invalid_argument(format!(
                "candidate '{}' references covariate {bad} out of range",
                c.id
            )));
        }
    }
    let view = ExplorationView {
        y: partition.i1.iter().map(|&i| dataset.y[i]).collect(),
        dataset,
        rows: &partition.i1,
    };
    match policy {
        ExplorerPolicy::Fixed(id) => candidates
            .iter()
            .find(|c| &c.id == id)
            .ok_or_else(|| Error::invalid_argument(format!("no candidate with id '{id}'"))),
        ExplorerPolicy::GreedyMaxCorrelation => {
            let mut best_j = 0;
            let mut best_cor = f64::NEG_INFINITY;
            for j in 0..dataset.p() {
                let cor = if view.rows.len() < 2 {
                    0.0
                } else {
                    let c = stats::correlation(&view.column(j), &view.y).abs();
                    if c.is_finite() {
                        c
                    } else {
                        0.0
                    }
                };
                if cor > best_cor {
                    best_cor = cor;
                    best_j = j;
                }
            }
            candidates
                .iter()
                .find(|c| c.covariate_subset == [best_j])
                .ok_or_else(|| {
                    Error::invalid_argument(format!(
                        "greedy choice x{best_j} has no matching candidate"
                    ))
                })
        }
        ExplorerPolicy::AdversarialMaxEstimate(prior) => {
            // Predicted final estimate = (candidate-independent first term)
            // minus the population regression averaged over the view, so
            // the adversary maximizes the negated average prediction.
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (ci, c) in candidates.iter().enumerate() {
                let coefs = prior.subset_coefficients(&c.covariate_subset);
                let score: f64 = -c
                    .covariate_subset
                    .iter()
                    .zip(&coefs)
                    .map(|(&j, b)| b * view.column_mean(j))
                    .sum::<f64>();
                if score > best_score {
                    best_score = score;
                    best = ci;
                }
            }
            Ok(&candidates[best])
        }
    }
}

/// The candidate's estimate of the counterfactual control mean: least
/// squares of the outcome on the candidate's covariates over the control
/// rows, averaged over `predict_rows`.
pub fn impute_control_mean(
    dataset: &Dataset,
    predict_rows: &[usize],
    f: &CandidateEstimator,
) -> Result<f64> {
    if predict_rows.is_empty() {
        return Err(Error::invalid_argument(
            "no rows to average the imputation over",
        ));
    }
    let controls = dataset.control_indices();
    if controls.is_empty() {
        return Err(Error::invalid_argument("no control rows"));
    }
    let y_ctrl: Vec<f64> = controls.iter().map(|&i| dataset.y[i]).collect();
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; controls.len()]];
    for &j in &f.covariate_subset {
        let col = dataset.x.column(j);
        cols.push(controls.iter().map(|&i| col[i]).collect());
    }
    let col_refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let coefs = linalg::least_squares(&col_refs, &y_ctrl).map_err(|e| match e {
        Error::DegenerateDesign(msg) => {
            Error::DegenerateCandidate(format!("candidate '{}': {msg}", f.id))
        }
        other => other,
    })?;

    let mut total = 0.0;
    for &i in predict_rows {
        let mut pred = coefs[0];
        for (s, &j) in f.covariate_subset.iter().enumerate() {
            pred += coefs[s + 1] * dataset.x.column(j)[i];
        }
        total += pred;
    }
    Ok(total / predict_rows.len() as f64)
}

/// The split estimate: prespecified treated mean minus the candidate's
/// imputation averaged over the fit partition.
pub fn att_estimate(
    dataset: &Dataset,
    partition: &TreatedPartition,
    f: &CandidateEstimator,
) -> Result<f64> {
    Ok(treated_mean(dataset)? - impute_control_mean(dataset, &partition.i2, f)?)
}

/// The no-split contrast: the imputation is averaged over every treated
/// row, the same rows an unrestricted explorer studied.
pub fn att_estimate_nosplit(dataset: &Dataset, f: &CandidateEstimator) -> Result<f64> {
    let treated = dataset.treated_indices();
    Ok(treated_mean(dataset)? - impute_control_mean(dataset, &treated, f)?)
}

fn treated_mean(dataset: &Dataset) -> Result<f64> {
    let treated = dataset.treated_indices();
    if treated.is_empty() {
        return Err(Error::invalid_argument("no treated rows"));
    }
    Ok(treated.iter().map(|&i| dataset.y[i]).sum::<f64>() / treated.len() as f64)
}

/// Study configuration: the generative model, the explore fraction, and
/// the candidate family.
#[derive(Debug, Clone, PartialEq)]
pub struct AttStudyConfig {
    pub sim: SimConfig,
    pub explore_fraction: f64,
    pub candidates: Vec<CandidateEstimator>,
}

impl AttStudyConfig {
    /// Unadjusted-plus-singletons candidates with a half/half split.
    pub fn standard(sim: SimConfig) -> Self {
        let p = sim.p;
        Self {
            sim,
            explore_fraction: 0.5,
            candidates: singleton_candidates(p),
        }
    }
}

/// Monte Carlo summary of the split estimator and its no-split contrast.
#[derive(Debug, Clone, PartialEq)]
pub struct AttCheck {
    pub mean_estimate: f64,
    pub mc_se: f64,
    pub contrast_mean: f64,
    pub contrast_se: f64,
    pub replications: usize,
}

/// Runs both arms under the same explorer policy: split selection sees
/// only the exploration rows, the contrast explores and fits on all data.
pub fn run_unbiasedness_check(
    config: &AttStudyConfig,
    policy: &ExplorerPolicy,
    replications: usize,
) -> Result<AttCheck> {
    if replications < 2 {
        return Err(Error::invalid_argument("need at least 2 replications"));
    }
    let tag = format!("attsplit/n{}/p{}", config.sim.n, config.sim.p);
    let per_rep: Vec<Result<(f64, f64)>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(config.sim.seed, &tag, rep, Lane::Dataset);
            let ds = draw_dataset(&config.sim, &mut rng)?;
            let mut rng_part = stream_rng(config.sim.seed, &tag, rep, Lane::Partition);
            let partition = partition_treated(&ds, config.explore_fraction, &mut rng_part)?;
            let f_split = explore_select(&ds, &partition, &config.candidates, policy)?;
            let split = att_estimate(&ds, &partition, f_split)?;

            let everything = TreatedPartition {
                i1: ds.treated_indices(),
                i2: ds.treated_indices(),
            };
            let f_all = explore_select(&ds, &everything, &config.candidates, policy)?;
            let nosplit = att_estimate_nosplit(&ds, f_all)?;
            Ok((split, nosplit))
        })
        .collect();
    let per_rep: Vec<(f64, f64)> = per_rep.into_iter().collect::<Result<_>>()?;

    let split: Vec<f64> = per_rep.iter().map(|r| r.0).collect();
    let nosplit: Vec<f64> = per_rep.iter().map(|r| r.1).collect();
    Ok(AttCheck {
        mean_estimate: stats::mean(&split),
        mc_se: stats::standard_error(&split),
        contrast_mean: stats::mean(&nosplit),
        contrast_se: stats::standard_error(&nosplit),
        replications,
    })
}
