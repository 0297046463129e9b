//! Run configuration: TOML config file, scale profiles, and command-line
//! overrides, resolved into one fully explicit structure that the manifest
//! records and a rerun can consume verbatim.
//!
//! Precedence: command-line flags override config-file values, which
//! override the selected profile's defaults. Unknown keys anywhere in the
//! file are rejected with the parser's key path and line.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::att_split::{
    singleton_candidates, AttStudyConfig, ExplorerPolicy, PopulationPrior,
};
use crate::datagen::SimConfig;
use crate::error::{Error, Result};
use crate::experiments::{AnalystVariant, GridSpec, NoiseCorSpec, TrainSizeRule};
use crate::solvers::EstimatorKind;

pub const DEFAULT_SEED: u64 = 42;

/// Scale profile: `desk` runs in minutes on a laptop, `paper` is the full
/// factorial at 2500 draws per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Desk,
    Paper,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::invalid_config(format!(
                "unknown profile '{other}' (expected 'desk' or 'paper')"
            ))),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        })
    }
}

/// Fully resolved run configuration. Everything a rerun needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub seed: u64,
    /// Worker threads; 0 keeps the library default.
    pub threads: usize,
    pub profile: Profile,
    pub plots: bool,
    pub grid: GridConfig,
    pub noisecor: NoiseCorConfig,
    pub rankagree: RankAgreeConfig,
    pub attsplit: AttSplitConfig,
    pub noise_condition: NoiseConditionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub rho2: Vec<f64>,
    pub estimators: Vec<String>,
    pub analysts: Vec<String>,
    pub replications: usize,
    pub lasso_folds: usize,
    pub lasso_lambda_count: usize,
}

impl GridConfig {
    fn defaults(profile: Profile) -> Self {
        let (n, p, replications) = match profile {
            Profile::Desk => (vec![30, 100], vec![10, 100, 500], 500),
            Profile::Paper => (vec![30, 100, 250, 500], vec![10, 30, 100, 500], 2500),
        };
        Self {
            n,
            p,
            rho2: vec![0.25, 0.5, 0.75],
            estimators: vec!["ols".into(), "ipw".into()],
            analysts: vec![
                "snoop".into(),
                "blind_true_mu".into(),
                "blind_learned_mu".into(),
            ],
            replications,
            lasso_folds: 10,
            lasso_lambda_count: 100,
        }
    }

    pub fn to_spec(&self, seed: u64) -> Result<GridSpec> {
        let estimator_kinds = self
            .estimators
            .iter()
            .map(|s| EstimatorKind::from_str(s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::invalid_config(format!("grid.estimators: {e}")))?;
        let analyst_variants = self
            .analysts
            .iter()
            .map(|s| AnalystVariant::from_str(s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::invalid_config(format!("grid.analysts: {e}")))?;
        let spec = GridSpec {
            n_values: self.n.clone(),
            p_values: self.p.clone(),
            rho2_values: self.rho2.clone(),
            estimator_kinds,
            analyst_variants,
            replications: self.replications,
            n_train_rule: TrainSizeRule::MatchAnalysisN,
            base_seed: seed,
            lasso_folds: self.lasso_folds,
            lasso_lambda_count: self.lasso_lambda_count,
        };
        spec.validate()
            .map_err(|e| Error::invalid_config(format!("grid: {e}")))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCorConfig {
    pub n: usize,
    pub rho_x: Vec<f64>,
    pub m: Vec<f64>,
    pub replications: usize,
}

impl NoiseCorConfig {
    fn defaults() -> Self {
        Self {
            n: 50,
            rho_x: vec![0.0, 0.3, 0.6],
            m: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            replications: 2000,
        }
    }

    pub fn to_spec(&self, seed: u64) -> Result<NoiseCorSpec> {
        if self.n == 0 || !self.n.is_multiple_of(2) {
            return Err(Error::invalid_config(format!(
                "noisecor.n must be even and positive, got {}",
                self.n
            )));
        }
        for &r in &self.rho_x {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::invalid_config(format!(
                    "noisecor.rho_x value {r} outside [0, 1)"
                )));
            }
        }
        for &m in &self.m {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::invalid_config(format!(
                    "noisecor.m value {m} outside [0, 1]"
                )));
            }
        }
        if self.replications < 2 {
            return Err(Error::invalid_config("noisecor.replications must be >= 2"));
        }
        Ok(NoiseCorSpec {
            n: self.n,
            rho_x_values: self.rho_x.clone(),
            m_values: self.m.clone(),
            replications: self.replications,
            base_seed: seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankAgreeConfig {
    pub n: Vec<usize>,
    pub p: usize,
    pub beta: Vec<f64>,
    pub rho2: f64,
    pub rho_x: f64,
    /// Column pair whose rank order is compared (0-based).
    pub j: usize,
    pub k: usize,
    pub replications: usize,
    /// Rank against a lasso-learned proxy instead of the true mean.
    pub learned_proxy: bool,
}

impl RankAgreeConfig {
    fn defaults() -> Self {
        Self {
            n: vec![50, 200, 1000],
            p: 2,
            beta: vec![2.0, -1.0],
            rho2: 0.5,
            rho_x: 0.0,
            j: 0,
            k: 1,
            replications: 2000,
            learned_proxy: false,
        }
    }

    /// Template config; the n axis is applied per run.
    pub fn template(&self, seed: u64) -> Result<SimConfig> {
        let n0 = *self
            .n
            .first()
            .ok_or_else(|| Error::invalid_config("rankagree.n is empty"))?;
        SimConfig::with_beta(n0, self.p, self.rho2, 0.0, self.rho_x, self.beta.clone(), seed)
            .map_err(|e| Error::invalid_config(format!("rankagree: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttSplitConfig {
    pub n: usize,
    pub p: usize,
    pub rho2: f64,
    pub delta: f64,
    pub explore_fraction: f64,
    /// "adversarial_max_estimate", "greedy_max_correlation", or "fixed:<id>".
    pub policy: String,
    pub replications: usize,
}

impl AttSplitConfig {
    fn defaults() -> Self {
        Self {
            n: 200,
            p: 20,
            rho2: 0.5,
            delta: 0.0,
            explore_fraction: 0.5,
            policy: "adversarial_max_estimate".into(),
            replications: 5000,
        }
    }

    pub fn to_study(&self, seed: u64) -> Result<(AttStudyConfig, ExplorerPolicy)> {
        let sim = SimConfig::new(self.n, self.p, self.rho2, seed)
            .map_err(|e| Error::invalid_config(format!("attsplit: {e}")))?
            .with_delta(self.delta);
        if !(self.explore_fraction > 0.0 && self.explore_fraction < 1.0) {
            return Err(Error::invalid_config(format!(
                "attsplit.explore_fraction must lie in (0, 1), got {}",
                self.explore_fraction
            )));
        }
        if self.replications < 2 {
            return Err(Error::invalid_config("attsplit.replications must be >= 2"));
        }
        let policy = match self.policy.as_str() {
            "adversarial_max_estimate" => {
                ExplorerPolicy::AdversarialMaxEstimate(PopulationPrior::from_config(&sim))
            }
            "greedy_max_correlation" => ExplorerPolicy::GreedyMaxCorrelation,
            other => match other.strip_prefix("fixed:") {
                Some(id) if !id.is_empty() => ExplorerPolicy::Fixed(id.to_string()),
                _ => {
                    return Err(Error::invalid_config(format!(
                        "attsplit.policy '{other}' (expected adversarial_max_estimate, \
                         greedy_max_correlation, or fixed:<id>)"
                    )))
                }
            },
        };
        let study = AttStudyConfig {
            candidates: singleton_candidates(sim.p),
            sim,
            explore_fraction: self.explore_fraction,
        };
        Ok((study, policy))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConditionConfig {
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub rho2: Vec<f64>,
    pub estimators: Vec<String>,
    pub replications: usize,
}

impl NoiseConditionConfig {
    fn defaults(profile: Profile) -> Self {
        let g = GridConfig::defaults(profile);
        Self {
            n: g.n,
            p: g.p,
            rho2: g.rho2,
            estimators: g.estimators,
            replications: 500,
        }
    }

    pub fn estimator_kinds(&self) -> Result<Vec<EstimatorKind>> {
        self.estimators
            .iter()
            .map(|s| EstimatorKind::from_str(s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::invalid_config(format!("noise_condition.estimators: {e}")))
    }
}

/// The config file: every key optional, sections override profile
/// defaults field by field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub profile: Option<String>,
    pub plots: Option<bool>,
    pub grid: Option<GridSection>,
    pub noisecor: Option<NoiseCorSection>,
    pub rankagree: Option<RankAgreeSection>,
    pub attsplit: Option<AttSplitSection>,
    pub noise_condition: Option<NoiseConditionSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<usize>>,
    pub rho2: Option<Vec<f64>>,
    pub estimators: Option<Vec<String>>,
    pub analysts: Option<Vec<String>>,
    pub replications: Option<usize>,
    pub lasso_folds: Option<usize>,
    pub lasso_lambda_count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCorSection {
    pub n: Option<usize>,
    pub rho_x: Option<Vec<f64>>,
    pub m: Option<Vec<f64>>,
    pub replications: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankAgreeSection {
    pub n: Option<Vec<usize>>,
    pub p: Option<usize>,
    pub beta: Option<Vec<f64>>,
    pub rho2: Option<f64>,
    pub rho_x: Option<f64>,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub replications: Option<usize>,
    pub learned_proxy: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttSplitSection {
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub rho2: Option<f64>,
    pub delta: Option<f64>,
    pub explore_fraction: Option<f64>,
    pub policy: Option<String>,
    pub replications: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConditionSection {
    pub n: Option<Vec<usize>>,
    pub p: Option<Vec<usize>>,
    pub rho2: Option<Vec<f64>>,
    pub estimators: Option<Vec<String>>,
    pub replications: Option<usize>,
}

/// Command-line overrides, applied last.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub threads: Option<usize>,
    pub profile: Option<Profile>,
    pub plots: bool,
}

/// Reads and parses the config file. Unknown keys and type errors are
/// reported with the parser's key path and line.
pub fn parse_config_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::ConfigParse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Applies profile defaults, then file values, then overrides, and
/// validates every section.
pub fn resolve(file: FileConfig, overrides: &Overrides) -> Result<ResolvedConfig> {
    let profile = match (&overrides.profile, &file.profile) {
        (Some(p), _) => *p,
        (None, Some(s)) => Profile::from_str(s)?,
        (None, None) => Profile::Paper,
    };

    let mut grid = GridConfig::defaults(profile);
    if let Some(s) = file.grid {
        if let Some(v) = s.n {
            grid.n = v;
        }
        if let Some(v) = s.p {
            grid.p = v;
        }
        if let Some(v) = s.rho2 {
            grid.rho2 = v;
        }
        if let Some(v) = s.estimators {
            grid.estimators = v;
        }
        if let Some(v) = s.analysts {
            grid.analysts = v;
        }
        if let Some(v) = s.replications {
            grid.replications = v;
        }
        if let Some(v) = s.lasso_folds {
            grid.lasso_folds = v;
        }
        if let Some(v) = s.lasso_lambda_count {
            grid.lasso_lambda_count = v;
        }
    }

    let mut noisecor = NoiseCorConfig::defaults();
    if let Some(s) = file.noisecor {
        if let Some(v) = s.n {
            noisecor.n = v;
        }
        if let Some(v) = s.rho_x {
            noisecor.rho_x = v;
        }
        if let Some(v) = s.m {
            noisecor.m = v;
        }
        if let Some(v) = s.replications {
            noisecor.replications = v;
        }
    }

    let mut rankagree = RankAgreeConfig::defaults();
    if let Some(s) = file.rankagree {
        if let Some(v) = s.n {
            rankagree.n = v;
        }
        if let Some(v) = s.p {
            rankagree.p = v;
        }
        if let Some(v) = s.beta {
            rankagree.beta = v;
        }
        if let Some(v) = s.rho2 {
            rankagree.rho2 = v;
        }
        if let Some(v) = s.rho_x {
            rankagree.rho_x = v;
        }
        if let Some(v) = s.j {
            rankagree.j = v;
        }
        if let Some(v) = s.k {
            rankagree.k = v;
        }
        if let Some(v) = s.replications {
            rankagree.replications = v;
        }
        if let Some(v) = s.learned_proxy {
            rankagree.learned_proxy = v;
        }
    }

    let mut attsplit = AttSplitConfig::defaults();
    if let Some(s) = file.attsplit {
        if let Some(v) = s.n {
            attsplit.n = v;
        }
        if let Some(v) = s.p {
            attsplit.p = v;
        }
        if let Some(v) = s.rho2 {
            attsplit.rho2 = v;
        }
        if let Some(v) = s.delta {
            attsplit.delta = v;
        }
        if let Some(v) = s.explore_fraction {
            attsplit.explore_fraction = v;
        }
        if let Some(v) = s.policy {
            attsplit.policy = v;
        }
        if let Some(v) = s.replications {
            attsplit.replications = v;
        }
    }

    let mut noise_condition = NoiseConditionConfig::defaults(profile);
    if let Some(s) = file.noise_condition {
        if let Some(v) = s.n {
            noise_condition.n = v;
        }
        if let Some(v) = s.p {
            noise_condition.p = v;
        }
        if let Some(v) = s.rho2 {
            noise_condition.rho2 = v;
        }
        if let Some(v) = s.estimators {
            noise_condition.estimators = v;
        }
        if let Some(v) = s.replications {
            noise_condition.replications = v;
        }
    }

    let mut resolved = ResolvedConfig {
        seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        threads: overrides.threads.or(file.threads).unwrap_or(0),
        profile,
        plots: overrides.plots || file.plots.unwrap_or(false),
        grid,
        noisecor,
        rankagree,
        attsplit,
        noise_condition,
    };
    if let Some(reps) = overrides.reps {
        resolved.grid.replications = reps;
        resolved.noisecor.replications = reps;
        resolved.rankagree.replications = reps;
        resolved.attsplit.replications = reps;
        resolved.noise_condition.replications = reps;
    }
    validate(&resolved)?;
    Ok(resolved)
}

fn validate(config: &ResolvedConfig) -> Result<()> {
    config.grid.to_spec(config.seed)?;
    config.noisecor.to_spec(config.seed)?;
    config.rankagree.template(config.seed)?;
    if config.rankagree.j == config.rankagree.k
        || config.rankagree.j >= config.rankagree.p
        || config.rankagree.k >= config.rankagree.p
    {
        return Err(Error::invalid_config(format!(
            "rankagree.j/k must be distinct and below p = {}",
            config.rankagree.p
        )));
    }
    config.attsplit.to_study(config.seed)?;
    config.noise_condition.estimator_kinds()?;
    for &n in &config.noise_condition.n {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::invalid_config(format!(
                "noise_condition.n must be even and positive, got {n}"
            )));
        }
    }
    for &r in &config.noise_condition.rho2 {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid_config(format!(
                "noise_condition.rho2 value {r} outside (0, 1]"
            )));
        }
    }
    Ok(())
}
