//! Milder analysts: random covariate subsets and random preference ranks.
//!
//! An analyst who only considers a random subset, or who picks a random
//! rank instead of the maximum, interpolates between the honest unbiased
//! estimate and the full fishing bias. Selection laws are drawn
//! independently of the data.
//!
//! Run with: cargo run -p snooplab --example selection_relaxations

use snooplab::analysts::{AnalystPolicy, RankLaw, SubsetLaw};
use snooplab::datagen::{draw_dataset, SimConfig};
use snooplab::rng::{stream_rng, Lane};
use snooplab::solvers::EstimatorKind;
use snooplab::stats;

fn mc_mean(
    config: &SimConfig,
    policy: &AnalystPolicy,
    tag: &str,
    reps: u64,
) -> snooplab::Result<(f64, f64)> {
    let mut estimates = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut rng = stream_rng(config.seed, tag, rep, Lane::Dataset);
        let ds = draw_dataset(config, &mut rng)?;
        let mut rng_policy = stream_rng(config.seed, tag, rep, Lane::Policy);
        let sel = policy.select(&ds, EstimatorKind::AdjustedOls, None, &mut rng_policy)?;
        estimates.push(sel.estimate);
    }
    Ok((stats::mean(&estimates), stats::standard_error(&estimates)))
}

fn main() -> snooplab::Result<()> {
    let config = SimConfig::new(40, 12, 0.5, 515)?;
    let reps = 800;

    println!("n = {}, p = {}, true effect 0, {} reps", config.n, config.p, reps);
    println!();
    let cases: Vec<(&str, AnalystPolicy)> = vec![
        ("snoop, all columns", AnalystPolicy::snoop()),
        (
            "snoop, random 3-subsets",
            AnalystPolicy::snoop().with_subset_law(SubsetLaw::UniformOfSize(3))?,
        ),
        (
            "snoop, single fixed column",
            AnalystPolicy::snoop().with_subset_law(SubsetLaw::Fixed(vec![0]))?,
        ),
        (
            "snoop, uniform random rank",
            AnalystPolicy::snoop().with_rank_law(RankLaw::Uniform)?,
        ),
        ("blind, all columns", AnalystPolicy::blind_true_mu()),
        (
            "blind, random 3-subsets",
            AnalystPolicy::blind_true_mu().with_subset_law(SubsetLaw::UniformOfSize(3))?,
        ),
    ];
    for (label, policy) in &cases {
        let (mean, se) = mc_mean(&config, policy, &format!("example/relax/{label}"), reps)?;
        println!("{label:<28} mean bias {mean:+.4} +- {se:.4}");
    }
    println!();
    println!("a singleton subset or a uniform rank ignores the data and is unbiased;");
    println!("every degree of preference toward the maximum buys back bias.");
    Ok(())
}
