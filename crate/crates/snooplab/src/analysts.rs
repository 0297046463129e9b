//! Analyst behavior models.
//!
//! A snooping analyst evaluates every candidate adjustment covariate
//! against the outcomes and keeps the largest estimate. An outcome-blinded
//! analyst runs the same maximization against a proxy for the conditional
//! mean of the outcomes (the true conditional mean, or one learned from an
//! independent training draw), then evaluates the chosen covariate against
//! the outcomes exactly once. Relaxations cover analysts who only consider
//! a random subset of covariates or who pick a random preference rank
//! instead of the maximum; both laws are sampled independently of the
//! analyzed data.
//!
//! Ties always break toward the smallest column index, for both modes, so
//! repeated selection on the same draw is deterministic.

use rand::Rng;

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::solvers::EstimatorKind;

/// Outcome of one covariate selection.
///
/// `candidate_values` holds the estimates for the considered columns
/// evaluated against the *selection target* (outcomes while snooping, the
/// proxy when blinded). For snooping selection the reported estimate is
/// the chosen candidate value; blinded selection re-evaluates the chosen
/// column against the outcomes, so its estimate need not appear among the
/// candidate values.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub estimate: f64,
    /// Column index into the dataset (0-based).
    pub chosen_index: usize,
    pub candidate_values: Vec<f64>,
}

/// Whether a selection maximizes against the outcomes or against a proxy.
#[derive(Debug, Clone, Copy)]
pub enum SelectionMode<'a> {
    Snoop,
    Blind { proxy: &'a [f64] },
}

/// The estimate each considered column would produce against `target`.
/// Degenerate propensity fits contribute 0, like any other value;
/// rank-deficient least-squares designs propagate as errors.
pub fn candidate_estimates(
    dataset: &Dataset,
    target: &[f64],
    d: EstimatorKind,
    indices: &[usize],
) -> Result<Vec<f64>> {
    if indices.is_empty() {
        return Err(Error::invalid_argument("empty candidate index set"));
    }
    let p = dataset.p();
    if let Some(&bad) = indices.iter().find(|&&j| j >= p) {
        return Err(Error::invalid_argument(format!(
            "candidate index {bad} out of range for p = {p}"
        )));
    }
    if target.len() != dataset.n() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} rows, dataset has {}",
            target.len(),
            dataset.n()
        )));
    }
    indices
        .iter()
        .map(|&j| d.estimate(dataset.x.column(j), &dataset.a, target))
        .collect()
}

fn argmax_smallest_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Snooping selection: maximize the estimate over all columns with the
/// outcomes in hand.
pub fn snoop_select(dataset: &Dataset, d: EstimatorKind) -> Result<SelectionResult> {
    let all: Vec<usize> = (0..dataset.p()).collect();
    subset_select(dataset, &all, d, SelectionMode::Snoop)
}

/// Blinded selection: pick the column maximizing the estimate against
/// `proxy`, then evaluate that column against the outcomes.
pub fn blind_select(
    dataset: &Dataset,
    proxy: &[f64],
    d: EstimatorKind,
) -> Result<SelectionResult> {
    let all: Vec<usize> = (0..dataset.p()).collect();
    subset_select(dataset, &all, d, SelectionMode::Blind { proxy })
}

/// Selection restricted to a subset of columns (drawn independently of the
/// data by the caller).
pub fn subset_select(
    dataset: &Dataset,
    subset: &[usize],
    d: EstimatorKind,
    mode: SelectionMode<'_>,
) -> Result<SelectionResult> {
    match mode {
        SelectionMode::Snoop => {
            let values = candidate_estimates(dataset, &dataset.y, d, subset)?;
            let pos = argmax_smallest_index(&values);
            Ok(SelectionResult {
                estimate: values[pos],
                chosen_index: subset[pos],
                candidate_values: values,
            })
        }
        SelectionMode::Blind { proxy } => {
            let values = candidate_estimates(dataset, proxy, d, subset)?;
            let pos = argmax_smallest_index(&values);
            let chosen = subset[pos];
            let estimate = d.estimate(dataset.x.column(chosen), &dataset.a, &dataset.y)?;
            Ok(SelectionResult {
                estimate,
                chosen_index: chosen,
                candidate_values: values,
            })
        }
    }
}

/// Selection of the `c`-th lowest candidate (`c` counts from 1; `c = p` is
/// the maximum). Snooping takes the order statistic of the outcome
/// estimates; blinded locates the column holding the `c`-th lowest proxy
/// estimate (smallest qualifying index) and evaluates it on the outcomes.
pub fn rank_choice_select(
    dataset: &Dataset,
    c: usize,
    d: EstimatorKind,
    mode: SelectionMode<'_>,
) -> Result<SelectionResult> {
    let p = dataset.p();
    if c == 0 || c > p {
        return Err(Error::invalid_argument(format!(
            "order-statistic choice must lie in 1..={p}, got {c}"
        )));
    }
    let all: Vec<usize> = (0..p).collect();
    let target_is_outcome = matches!(mode, SelectionMode::Snoop);
    let target: &[f64] = match mode {
        SelectionMode::Snoop => &dataset.y,
        SelectionMode::Blind { proxy } => proxy,
    };
    let values = candidate_estimates(dataset, target, d, &all)?;
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite candidate values"));
    let order_stat = sorted[c - 1];
    let chosen = values
        .iter()
        .position(|v| *v == order_stat)
        .expect("order statistic comes from the same vector");
    let estimate = if target_is_outcome {
        order_stat
    } else {
        d.estimate(dataset.x.column(chosen), &dataset.a, &dataset.y)?
    };
    Ok(SelectionResult {
        estimate,
        chosen_index: chosen,
        candidate_values: values,
    })
}

/// Preference ranks against `target`: rank of column `j` is the number of
/// candidate estimates at least as large as its own (self included), so
/// the favorite column has rank 1 when values are distinct.
pub fn preference_ranks(
    dataset: &Dataset,
    target: &[f64],
    d: EstimatorKind,
) -> Result<Vec<usize>> {
    let all: Vec<usize> = (0..dataset.p()).collect();
    let values = candidate_estimates(dataset, target, d, &all)?;
    Ok(values
        .iter()
        .map(|vj| values.iter().filter(|vk| *vj <= **vk).count())
        .collect())
}

/// True when the two preference orders disagree about columns `j` and `k`:
/// blinded strictly prefers `j`, snooping strictly prefers `k`.
pub fn rank_disagreement_indicator(
    ranks_blind: &[usize],
    ranks_snoop: &[usize],
    j: usize,
    k: usize,
) -> Result<bool> {
    if ranks_blind.len() != ranks_snoop.len() {
        return Err(Error::DimensionMismatch(format!(
            "rank vectors have lengths {} and {}",
            ranks_blind.len(),
            ranks_snoop.len()
        )));
    }
    let p = ranks_blind.len();
    if j == k || j >= p || k >= p {
        return Err(Error::invalid_argument(format!(
            "need two distinct column indices below {p}, got ({j}, {k})"
        )));
    }
    Ok(ranks_blind[j] < ranks_blind[k] && ranks_snoop[j] > ranks_snoop[k])
}

/// Whether the analyst sees the outcomes during selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMode {
    Snoop,
    Blind,
}

/// Which proxy a blinded analyst ranks candidates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxySource {
    /// The true conditional mean carried by the dataset.
    TrueMu,
    /// A learned approximation supplied at selection time.
    LearnedMu,
}

/// Distribution over considered column subsets, independent of the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetLaw {
    Fixed(Vec<usize>),
    /// Uniformly random subset of the given size.
    UniformOfSize(usize),
}

impl SubsetLaw {
    fn draw(&self, p: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
        match self {
            SubsetLaw::Fixed(subset) => {
                if subset.is_empty() {
                    return Err(Error::invalid_argument("fixed subset is empty"));
                }
                Ok(subset.clone())
            }
            SubsetLaw::UniformOfSize(k) => {
                if *k == 0 || *k > p {
                    return Err(Error::invalid_argument(format!(
                        "subset size must lie in 1..={p}, got {k}"
                    )));
                }
                let mut subset = rand::seq::index::sample(rng, p, *k).into_vec();
                subset.sort_unstable();
                Ok(subset)
            }
        }
    }
}

/// Distribution over the chosen preference rank, independent of the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankLaw {
    Fixed(usize),
    Uniform,
}

impl RankLaw {
    fn draw(&self, p: usize, rng: &mut impl Rng) -> usize {
        match self {
            RankLaw::Fixed(c) => *c,
            RankLaw::Uniform => rng.random_range(1..=p),
        }
    }
}

/// A complete selection behavior: snoop or blind, which proxy, and an
/// optional subset or rank relaxation (mutually exclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct AnalystPolicy {
    pub mode: PolicyMode,
    pub proxy: ProxySource,
    subset_law: Option<SubsetLaw>,
    rank_law: Option<RankLaw>,
}

impl AnalystPolicy {
    pub fn snoop() -> Self {
        Self {
            mode: PolicyMode::Snoop,
            proxy: ProxySource::TrueMu,
            subset_law: None,
            rank_law: None,
        }
    }

    pub fn blind_true_mu() -> Self {
        Self {
            mode: PolicyMode::Blind,
            proxy: ProxySource::TrueMu,
            subset_law: None,
            rank_law: None,
        }
    }

    pub fn blind_learned_mu() -> Self {
        Self {
            mode: PolicyMode::Blind,
            proxy: ProxySource::LearnedMu,
            subset_law: None,
            rank_law: None,
        }
    }

    pub fn with_subset_law(mut self, law: SubsetLaw) -> Result<Self> {
        if self.rank_law.is_some() {
            return Err(Error::invalid_config(
                "subset and rank laws are mutually exclusive",
            ));
        }
        self.subset_law = Some(law);
        Ok(self)
    }

    pub fn with_rank_law(mut self, law: RankLaw) -> Result<Self> {
        if self.subset_law.is_some() {
            return Err(Error::invalid_config(
                "subset and rank laws are mutually exclusive",
            ));
        }
        self.rank_law = Some(law);
        Ok(self)
    }

    /// Runs the configured selection on one dataset. `learned_proxy` must
    /// be supplied when the policy ranks against a learned conditional
    /// mean; the policy's own randomness comes from `rng`.
    pub fn select(
        &self,
        dataset: &Dataset,
        d: EstimatorKind,
        learned_proxy: Option<&[f64]>,
        rng: &mut impl Rng,
    ) -> Result<SelectionResult> {
        let proxy_vec: Option<&[f64]> = match (self.mode, self.proxy) {
            (PolicyMode::Snoop, _) => None,
            (PolicyMode::Blind, ProxySource::TrueMu) => Some(&dataset.mu),
            (PolicyMode::Blind, ProxySource::LearnedMu) => Some(learned_proxy.ok_or_else(
                || Error::invalid_argument("policy needs a learned proxy vector"),
            )?),
        };
        let mode = match proxy_vec {
            None => SelectionMode::Snoop,
            Some(proxy) => SelectionMode::Blind { proxy },
        };
        if let Some(law) = &self.subset_law {
            let subset = law.draw(dataset.p(), rng)?;
            return subset_select(dataset, &subset, d, mode);
        }
        if let Some(law) = &self.rank_law {
            let c = law.draw(dataset.p(), rng);
            return rank_choice_select(dataset, c, d, mode);
        }
        match mode {
            SelectionMode::Snoop => snoop_select(dataset, d),
            SelectionMode::Blind { proxy } => blind_select(dataset, proxy, d),
        }
    }
}
