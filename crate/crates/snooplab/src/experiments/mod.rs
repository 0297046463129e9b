//! The quantitative studies: the bias grid over (estimator, n, p, rho2)
//! cells, the blinded-to-snooping bias ratio, the noise-correlation study,
//! the noise-does-not-increase-bias check, and the rank-agreement decay.
//!
//! Replications run in parallel on pre-derived independent streams and are
//! collected in replication order before aggregation, so results are
//! identical for any worker count.

mod noise;
mod rank_agreement;

pub use noise::{
    approx_correlation, check_noise_condition, run_noise_correlation, NoiseConditionCheck,
    NoiseCorRow, NoiseCorSpec,
};
pub use rank_agreement::{run_rank_agreement, RankAgreementRow, RankProxy};

use rayon::prelude::*;

use crate::analysts::{blind_select, snoop_select, subset_select, SelectionMode};
use crate::datagen::{draw_dataset, Dataset, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Lane};
use crate::solvers::{lasso_cv, predict_mu_hat, EstimatorKind};
use crate::stats;

/// Selection behavior evaluated in a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalystVariant {
    /// Maximize over all columns with the outcomes in hand.
    Snoop,
    /// Maximize against the true conditional mean, then evaluate once on
    /// the outcomes.
    BlindTrueMu,
    /// Like `BlindTrueMu`, but the proxy is a cross-validated lasso fit on
    /// an independent training draw of the same size.
    BlindLearnedMu,
    /// The maximized value against the true conditional mean itself; the
    /// quantity blinded selection chases, recorded for identity checks.
    SnoopTrueMu,
    /// Always adjusts for one prespecified column: an unbiased control arm.
    FixedCovariate(usize),
}

impl AnalystVariant {
    pub fn label(&self) -> String {
        match self {
            AnalystVariant::Snoop => "snoop".to_string(),
            AnalystVariant::BlindTrueMu => "blind_true_mu".to_string(),
            AnalystVariant::BlindLearnedMu => "blind_learned_mu".to_string(),
            AnalystVariant::SnoopTrueMu => "snoop_true_mu".to_string(),
            AnalystVariant::FixedCovariate(j) => format!("fixed_x{j}"),
        }
    }
}

impl std::fmt::Display for AnalystVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for AnalystVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snoop" => Ok(AnalystVariant::Snoop),
            "blind_true_mu" => Ok(AnalystVariant::BlindTrueMu),
            "blind_learned_mu" => Ok(AnalystVariant::BlindLearnedMu),
            "snoop_true_mu" => Ok(AnalystVariant::SnoopTrueMu),
            other => {
                if let Some(idx) = other.strip_prefix("fixed_x") {
                    let j = idx.parse::<usize>().map_err(|_| {
                        Error::invalid_config(format!("bad fixed-covariate analyst '{other}'"))
                    })?;
                    Ok(AnalystVariant::FixedCovariate(j))
                } else {
                    Err(Error::invalid_config(format!(
                        "unknown analyst '{other}' (expected snoop, blind_true_mu, \
                         blind_learned_mu, snoop_true_mu, or fixed_xJ)"
                    )))
                }
            }
        }
    }
}

/// How large the independent training draw is for the learned proxy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainSizeRule {
    /// Training size equals the analysis sample size.
    MatchAnalysisN,
}

impl TrainSizeRule {
    fn n_train(&self, n: usize) -> usize {
        match self {
            TrainSizeRule::MatchAnalysisN => n,
        }
    }
}

/// Full factorial specification for the bias grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub rho2_values: Vec<f64>,
    pub estimator_kinds: Vec<EstimatorKind>,
    pub analyst_variants: Vec<AnalystVariant>,
    pub replications: usize,
    pub n_train_rule: TrainSizeRule,
    pub base_seed: u64,
    /// Cross-validation folds for the learned proxy.
    pub lasso_folds: usize,
    /// Penalty-grid resolution for the learned proxy.
    pub lasso_lambda_count: usize,
}

impl GridSpec {
    /// Reduced grid sized for a laptop run.
    pub fn desk(base_seed: u64) -> Self {
        Self {
            n_values: vec![30, 100],
            p_values: vec![10, 100, 500],
            rho2_values: vec![0.25, 0.5, 0.75],
            estimator_kinds: vec![EstimatorKind::AdjustedOls, EstimatorKind::HajekIpw],
            analyst_variants: vec![
                AnalystVariant::Snoop,
                AnalystVariant::BlindTrueMu,
                AnalystVariant::BlindLearnedMu,
            ],
            replications: 500,
            n_train_rule: TrainSizeRule::MatchAnalysisN,
            base_seed,
            lasso_folds: 10,
            lasso_lambda_count: 100,
        }
    }

    /// The full factorial at 2500 draws per cell.
    pub fn full(base_seed: u64) -> Self {
        Self {
            n_values: vec![30, 100, 250, 500],
            p_values: vec![10, 30, 100, 500],
            replications: 2500,
            ..Self::desk(base_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty()
            || self.p_values.is_empty()
            || self.rho2_values.is_empty()
            || self.estimator_kinds.is_empty()
            || self.analyst_variants.is_empty()
        {
            return Err(Error::invalid_config("grid has an empty axis"));
        }
        for &n in &self.n_values {
            if n == 0 || !n.is_multiple_of(2) {
                return Err(Error::invalid_config(format!(
                    "grid n values must be even and positive, got {n}"
                )));
            }
        }
        for &p in &self.p_values {
            if p == 0 {
                return Err(Error::invalid_config("grid p values must be positive"));
            }
        }
        for &r in &self.rho2_values {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::invalid_config(format!(
                    "grid rho2 values must lie in (0, 1], got {r}"
                )));
            }
        }
        if self.replications == 0 {
            return Err(Error::invalid_config("replications must be positive"));
        }
        if self.lasso_folds < 2 {
            return Err(Error::invalid_config("lasso_folds must be at least 2"));
        }
        if self.lasso_lambda_count == 0 {
            return Err(Error::invalid_config("lasso_lambda_count must be positive"));
        }
        let min_p = *self.p_values.iter().min().expect("nonempty");
        for v in &self.analyst_variants {
            if let AnalystVariant::FixedCovariate(j) = v {
                if *j >= min_p {
                    return Err(Error::invalid_config(format!(
                        "fixed covariate {j} out of range for smallest p = {min_p}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Aggregated Monte Carlo output for one (cell, analyst) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub estimator: EstimatorKind,
    pub n: usize,
    pub p: usize,
    pub rho2: f64,
    pub analyst: AnalystVariant,
    /// Mean estimate minus the true effect.
    pub mean_bias: f64,
    /// `mean_bias` divided by the theoretical sd of the outcome, so cells
    /// with different residual variances share a scale.
    pub scaled_bias: f64,
    pub mc_se: f64,
    /// Replications that produced an estimate.
    pub replications: usize,
    /// Replications lost to degenerate designs; never silently dropped.
    pub failures: usize,
}

impl SummaryRow {
    pub fn same_cell(&self, other: &SummaryRow) -> bool {
        self.estimator == other.estimator
            && self.n == other.n
            && self.p == other.p
            && self.rho2 == other.rho2
    }
}

/// Runs the full grid; rows come out in a fixed cell order (estimator,
/// n, p, rho2, then analyst in the order given).
pub fn run_bias_grid(spec: &GridSpec) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &est in &spec.estimator_kinds {
        for &n in &spec.n_values {
            for &p in &spec.p_values {
                for &rho2 in &spec.rho2_values {
                    rows.extend(run_grid_cell(spec, est, n, p, rho2)?);
                }
            }
        }
    }
    Ok(rows)
}

/// One grid cell: all requested analysts share each replication's draws.
pub fn run_grid_cell(
    spec: &GridSpec,
    estimator: EstimatorKind,
    n: usize,
    p: usize,
    rho2: f64,
) -> Result<Vec<SummaryRow>> {
    let config = SimConfig::new(n, p, rho2, spec.base_seed)?;
    let tag = format!("grid/{}/n{}/p{}/rho2{}", estimator.label(), n, p, rho2);
    let variants = &spec.analyst_variants;

    let per_rep: Vec<Vec<Option<f64>>> = (0..spec.replications as u64)
        .into_par_iter()
        .map(|rep| grid_replication(spec, &config, estimator, &tag, rep, variants))
        .collect();

    let sd_y = config.sd_y();
    let mut rows = Vec::with_capacity(variants.len());
    for (vi, variant) in variants.iter().enumerate() {
        let estimates: Vec<f64> = per_rep.iter().filter_map(|r| r[vi]).collect();
        let failures = spec.replications - estimates.len();
        let (mean_bias, mc_se) = if estimates.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (
                stats::mean(&estimates) - config.delta,
                stats::standard_error(&estimates),
            )
        };
        rows.push(SummaryRow {
            estimator,
            n,
            p,
            rho2,
            analyst: *variant,
            mean_bias,
            scaled_bias: mean_bias / sd_y,
            mc_se,
            replications: estimates.len(),
            failures,
        });
    }
    Ok(rows)
}

/// One replication of one cell; `None` marks a degenerate failure for that
/// analyst. All analysts see the same dataset, and the learned-proxy
/// analyst refits its lasso on a fresh training draw every replication.
fn grid_replication(
    spec: &GridSpec,
    config: &SimConfig,
    estimator: EstimatorKind,
    tag: &str,
    rep: u64,
    variants: &[AnalystVariant],
) -> Vec<Option<f64>> {
    let mut rng = stream_rng(spec.base_seed, tag, rep, Lane::Dataset);
    let ds = match draw_dataset(config, &mut rng) {
        Ok(ds) => ds,
        Err(_) => return vec![None; variants.len()],
    };

    let need_snoop = variants.iter().any(|v| matches!(v, AnalystVariant::Snoop));
    let need_mu = variants.iter().any(|v| {
        matches!(
            v,
            AnalystVariant::BlindTrueMu | AnalystVariant::SnoopTrueMu
        )
    });
    let snoop_sel = if need_snoop {
        Some(snoop_select(&ds, estimator))
    } else {
        None
    };
    let blind_sel = if need_mu {
        Some(blind_select(&ds, &ds.mu, estimator))
    } else {
        None
    };

    variants
        .iter()
        .map(|variant| match variant {
            AnalystVariant::Snoop => snoop_sel
                .as_ref()
                .expect("computed above")
                .as_ref()
                .ok()
                .map(|s| s.estimate),
            AnalystVariant::BlindTrueMu => blind_sel
                .as_ref()
                .expect("computed above")
                .as_ref()
                .ok()
                .map(|s| s.estimate),
            AnalystVariant::SnoopTrueMu => blind_sel
                .as_ref()
                .expect("computed above")
                .as_ref()
                .ok()
                .map(|s| {
                    s.candidate_values
                        .iter()
                        .cloned()
                        .fold(f64::NEG_INFINITY, f64::max)
                }),
            AnalystVariant::BlindLearnedMu => {
                learned_proxy_estimate(spec, config, estimator, tag, rep, &ds).ok()
            }
            AnalystVariant::FixedCovariate(j) => subset_select(
                &ds,
                &[*j],
                estimator,
                SelectionMode::Snoop,
            )
            .ok()
            .map(|s| s.estimate),
        })
        .collect()
}

fn learned_proxy_estimate(
    spec: &GridSpec,
    config: &SimConfig,
    estimator: EstimatorKind,
    tag: &str,
    rep: u64,
    ds: &Dataset,
) -> Result<f64> {
    let n_train = spec.n_train_rule.n_train(config.n);
    let train_config = SimConfig::with_beta(
        n_train,
        config.p,
        config.rho2,
        config.delta,
        config.rho_x,
        config.beta.clone(),
        config.seed,
    )?;
    let mut rng = stream_rng(spec.base_seed, tag, rep, Lane::TrainingSet);
    let train = draw_dataset(&train_config, &mut rng)?;
    let model = lasso_cv(
        &train.x,
        &train.a,
        &train.y,
        spec.lasso_folds,
        spec.lasso_lambda_count,
    )?;
    let mu_hat = predict_mu_hat(&model, &ds.x, &ds.a)?;
    Ok(blind_select(ds, &mu_hat, estimator)?.estimate)
}

/// Blinded-to-snooping mean-bias ratio for one cell, with a delta-method
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRatio {
    pub ratio: f64,
    pub se: f64,
}

/// Computes the bias ratio from a cell's summary rows. Returns `None`
/// (an explicitly undefined ratio, not an error) when the snooping bias is
/// not bounded away from zero: |mean| must exceed five standard errors.
pub fn bias_ratio(rows: &[SummaryRow], blind: AnalystVariant) -> Result<Option<BiasRatio>> {
    let first = rows
        .first()
        .ok_or_else(|| Error::invalid_argument("bias_ratio: no rows"))?;
    if rows.iter().any(|r| !r.same_cell(first)) {
        return Err(Error::invalid_argument(
            "bias_ratio: rows span more than one cell",
        ));
    }
    let snoop = rows
        .iter()
        .find(|r| r.analyst == AnalystVariant::Snoop)
        .ok_or_else(|| Error::invalid_argument("bias_ratio: missing snoop row"))?;
    let blind_row = rows
        .iter()
        .find(|r| r.analyst == blind)
        .ok_or_else(|| Error::invalid_argument(format!("bias_ratio: missing {blind} row")))?;

    let s = snoop.mean_bias;
    if !s.is_finite() || s.abs() <= 5.0 * snoop.mc_se {
        return Ok(None);
    }
    let b = blind_row.mean_bias;
    let ratio = b / s;
    let se = ((blind_row.mc_se / s).powi(2) + (b * snoop.mc_se / (s * s)).powi(2)).sqrt();
    Ok(Some(BiasRatio { ratio, se }))
}
