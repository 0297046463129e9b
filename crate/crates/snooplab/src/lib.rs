//! # snooplab
//!
//! A Monte Carlo laboratory for *covariate-fishing bias* in treatment
//! effect estimation. It simulates analysts who choose which covariate to
//! adjust for — after snooping on outcomes, or blinded to outcomes but
//! armed with a proxy for their conditional mean — measures the bias each
//! behavior produces, and implements a sample-splitting estimator of the
//! treatment effect on the treated that survives adversarial exploration.
//!
//! The central quantities:
//!
//! - a snooping analyst reports `max_j d(X_j, Y)`, the largest adjusted
//!   estimate over all candidate covariates;
//! - a blinded analyst picks `argmax_j d(X_j, proxy)` without seeing `Y`
//!   and then evaluates the chosen column on `Y` once, where the proxy is
//!   `E(Y | X, A)` or a lasso fit from an independent training draw;
//! - the ratio of blinded to snooping mean bias is bounded below by
//!   `rho = sqrt(Var(mu(X,0)) / Var(Y - A delta))` when blending noise
//!   into the selection target does not raise the maximized estimate;
//! - splitting the treated rows into explore/fit parts makes the ATT
//!   estimate `mean(y_treated) - f(fit rows + controls)` unbiased for any
//!   exploration of the explore part.
//!
//! Estimators `d` are the treatment coefficient of least squares on
//! `[1, x_j, a]` and a Hajek-normalized inverse propensity weighted
//! contrast with a univariate logistic propensity; both are linear in the
//! outcomes, which is what makes blinded fishing effective.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p snooplab --example snoop_vs_blind        # one draw, both selections
//! cargo run -p snooplab --example bias_grid             # bias and its ratio over cells
//! cargo run -p snooplab --example noise_correlation     # blending study vs closed form
//! cargo run -p snooplab --example rank_agreement        # preference-order convergence
//! cargo run -p snooplab --example learned_proxy         # lasso-learned proxy analyst
//! cargo run -p snooplab --example selection_relaxations # random subsets and ranks
//! cargo run -p snooplab --example noise_condition       # the bound's premise, checked
//! cargo run -p snooplab --example att_split             # unbiased ATT under exploration
//! ```
//!
//! ## Batch runs
//!
//! The `snooplab` binary drives full experiments with CSV/SVG output and
//! a reproducibility manifest:
//!
//! ```bash
//! snooplab --profile desk --plots --out runs/grid grid
//! snooplab --seed 7 --reps 2000 --out runs/fig1 noisecor
//! snooplab --out runs/att attsplit
//! ```
//!
//! ## Module map
//!
//! - [`datagen`]: generative models — exchangeable Gaussian designs,
//!   fixed treatment assignment, calibrated outcome noise, noise blends.
//! - [`solvers`]: estimator kernels — adjusted OLS, logistic propensity
//!   by Newton's method, the Hajek IPW contrast, fixed-slope contrast,
//!   and cross-validated lasso.
//! - [`analysts`]: selection behaviors — snooping, blinded, random
//!   subsets, random ranks, preference ranks.
//! - [`experiments`]: the bias grid, bias ratios, the noise-correlation
//!   study, the noise condition check, rank-agreement decay.
//! - [`att_split`]: explore/fit partitioning of the treated arm,
//!   candidate imputation estimators, explorer policies, and the
//!   unbiasedness study with its no-split contrast arm.
//! - [`runner`]: config files, profiles, CSV/SVG emission, manifests.
//! - [`rng`]: per-replication ChaCha8 stream derivation; results never
//!   depend on thread count or execution order.
//!
//! Every replication is a pure function of `(seed, experiment tag,
//! replication index, lane)`, so any cell of any experiment can be
//! reproduced in isolation.

pub mod analysts;
pub mod att_split;
pub mod datagen;
pub mod error;
pub mod experiments;
mod linalg;
pub mod rng;
pub mod runner;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
