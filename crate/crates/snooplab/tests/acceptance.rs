//! Acceptance suite: every headline result at desk scale, each criterion
//! asserted at its stated tolerance and reported with one line.
//!
//! Run with:
//!   cargo test -p snooplab --test acceptance -- --nocapture --test-threads=1
//!
//! The shared desk-grid fixture (criteria 2, 3, 4, 6) is computed once.

mod common;

use std::sync::OnceLock;

use snooplab::att_split::{
    run_unbiasedness_check, AttStudyConfig, ExplorerPolicy, PopulationPrior,
};
use snooplab::datagen::{
    calibrate_noise_var, draw_dataset, make_beta, SimConfig,
};
use snooplab::experiments::{
    approx_correlation, bias_ratio, check_noise_condition, run_bias_grid,
    run_noise_correlation, run_rank_agreement, AnalystVariant, GridSpec, NoiseCorSpec,
    RankProxy, SummaryRow, TrainSizeRule,
};
use snooplab::rng::{stream_rng, Lane};
use snooplab::runner::{self, resolve, FileConfig, Overrides, Subcommand};
use snooplab::solvers::{
    d0_fixed_slope, fit_logistic, ipw_estimate, lasso_cv, ols_adjusted, EstimatorKind,
};

const SEED: u64 = 20250810;

fn hypot(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

struct Cell {
    estimator: EstimatorKind,
    n: usize,
    p: usize,
    rho2: f64,
    rows: Vec<SummaryRow>,
    condition_satisfied: bool,
}

struct DeskGrid {
    cells: Vec<Cell>,
}

/// Desk grid with known conditional mean, both estimators, 500 draws per
/// cell, plus the noise-condition check for every cell.
fn desk_grid() -> &'static DeskGrid {
    static GRID: OnceLock<DeskGrid> = OnceLock::new();
    GRID.get_or_init(|| {
        let spec = GridSpec {
            n_values: vec![30, 100],
            p_values: vec![10, 100, 500],
            rho2_values: vec![0.25, 0.5, 0.75],
            estimator_kinds: vec![EstimatorKind::AdjustedOls, EstimatorKind::HajekIpw],
            analyst_variants: vec![
                AnalystVariant::Snoop,
                AnalystVariant::BlindTrueMu,
                AnalystVariant::SnoopTrueMu,
            ],
            replications: 500,
            n_train_rule: TrainSizeRule::MatchAnalysisN,
            base_seed: SEED,
            lasso_folds: 10,
            lasso_lambda_count: 100,
        };
        let rows = run_bias_grid(&spec).expect("grid run");
        let mut cells = Vec::new();
        for &estimator in &spec.estimator_kinds {
            for &n in &spec.n_values {
                for &p in &spec.p_values {
                    for &rho2 in &spec.rho2_values {
                        let cell_rows: Vec<SummaryRow> = rows
                            .iter()
                            .filter(|r| {
                                r.estimator == estimator
                                    && r.n == n
                                    && r.p == p
                                    && r.rho2 == rho2
                            })
                            .cloned()
                            .collect();
                        assert_eq!(cell_rows.len(), 3);
                        let config = SimConfig::new(n, p, rho2, SEED).expect("config");
                        let check = check_noise_condition(&config, estimator, 500)
                            .expect("noise condition");
                        cells.push(Cell {
                            estimator,
                            n,
                            p,
                            rho2,
                            rows: cell_rows,
                            condition_satisfied: check.satisfied,
                        });
                    }
                }
            }
        }
        DeskGrid { cells }
    })
}

#[test]
fn acceptance_01_noise_correlation_study() {
    let spec = NoiseCorSpec {
        base_seed: SEED,
        ..NoiseCorSpec::default()
    };
    assert_eq!(spec.replications, 2000);
    let rows = run_noise_correlation(&spec).expect("study run");

    for row in &rows {
        assert!(
            (row.empirical_cor - row.analytic_cor).abs() <= 0.1,
            "rho_x {} m {}: empirical {} vs analytic {}",
            row.rho_x,
            row.m,
            row.empirical_cor,
            row.analytic_cor
        );
        if row.m == 1.0 {
            assert_eq!(row.analytic_cor, 1.0, "analytic value at full noise");
        }
    }
    for &rho_x in &spec.rho_x_values {
        let seq: Vec<_> = rows.iter().filter(|r| r.rho_x == rho_x).collect();
        for w in seq.windows(2) {
            let tol = 2.0 * hypot(w[0].cor_se, w[1].cor_se);
            assert!(
                w[1].empirical_cor >= w[0].empirical_cor - tol,
                "correlation not non-decreasing at rho_x {rho_x}: {} -> {}",
                w[0].empirical_cor,
                w[1].empirical_cor
            );
            let tol_max = 2.0 * hypot(w[0].max_se, w[1].max_se);
            assert!(
                w[1].expected_max <= w[0].expected_max + tol_max,
                "maximized estimate not non-increasing at rho_x {rho_x}: {} -> {}",
                w[0].expected_max,
                w[1].expected_max
            );
        }
    }
    println!("ACCEPTANCE 1 (noise-correlation study, 2000 reps): PASS");
}

#[test]
fn acceptance_02_bias_ratio_lower_bound_on_desk_grid() {
    let grid = desk_grid();
    for cell in &grid.cells {
        if !cell.condition_satisfied {
            continue; // criterion 4 reports these
        }
        let ratio = bias_ratio(&cell.rows, AnalystVariant::BlindTrueMu)
            .expect("cell rows")
            .unwrap_or_else(|| {
                panic!(
                    "snooping bias not separated from zero in cell {} n={} p={} rho2={}",
                    cell.estimator, cell.n, cell.p, cell.rho2
                )
            });
        let bound = cell.rho2.sqrt() - 2.0 * ratio.se;
        assert!(
            ratio.ratio >= bound,
            "cell {} n={} p={} rho2={}: ratio {:.4} below bound {:.4}",
            cell.estimator,
            cell.n,
            cell.p,
            cell.rho2,
            ratio.ratio,
            bound
        );
    }
    println!("ACCEPTANCE 2 (bias-ratio lower bound, desk grid, both estimators): PASS");
}

#[test]
fn acceptance_03_near_equality_when_p_dwarfs_n() {
    let grid = desk_grid();
    for cell in grid
        .cells
        .iter()
        .filter(|c| c.estimator == EstimatorKind::AdjustedOls && c.n == 30 && c.p == 500)
    {
        let ratio = bias_ratio(&cell.rows, AnalystVariant::BlindTrueMu)
            .expect("cell rows")
            .expect("defined ratio");
        assert!(
            (ratio.ratio - cell.rho2.sqrt()).abs() <= 0.15,
            "rho2 {}: ratio {:.4} not within 0.15 of {:.4}",
            cell.rho2,
            ratio.ratio,
            cell.rho2.sqrt()
        );
    }
    println!("ACCEPTANCE 3 (near-equality at n=30, p=500): PASS");
}

#[test]
fn acceptance_04_noise_condition_holds_everywhere() {
    let grid = desk_grid();
    for cell in &grid.cells {
        assert!(
            cell.condition_satisfied,
            "noise condition failed in cell {} n={} p={} rho2={}",
            cell.estimator, cell.n, cell.p, cell.rho2
        );
    }
    println!("ACCEPTANCE 4 (noise condition satisfied in every desk cell): PASS");
}

#[test]
fn acceptance_05_learned_proxy_ratio_exceeds_rho2() {
    let spec = GridSpec {
        n_values: vec![100, 250],
        p_values: vec![10, 100],
        rho2_values: vec![0.5, 0.75],
        estimator_kinds: vec![EstimatorKind::AdjustedOls],
        analyst_variants: vec![AnalystVariant::Snoop, AnalystVariant::BlindLearnedMu],
        replications: 500,
        n_train_rule: TrainSizeRule::MatchAnalysisN,
        base_seed: SEED,
        lasso_folds: 10,
        lasso_lambda_count: 100,
    };
    let rows = run_bias_grid(&spec).expect("grid run");
    for &n in &spec.n_values {
        for &p in &spec.p_values {
            for &rho2 in &spec.rho2_values {
                let cell: Vec<SummaryRow> = rows
                    .iter()
                    .filter(|r| r.n == n && r.p == p && r.rho2 == rho2)
                    .cloned()
                    .collect();
                let ratio = bias_ratio(&cell, AnalystVariant::BlindLearnedMu)
                    .expect("cell rows")
                    .expect("defined ratio");
                let bound = rho2 - 2.0 * ratio.se;
                assert!(
                    ratio.ratio >= bound,
                    "n={n} p={p} rho2={rho2}: learned ratio {:.4} below {:.4}",
                    ratio.ratio,
                    bound
                );
            }
        }
    }
    println!("ACCEPTANCE 5 (learned-proxy bias ratio >= rho2): PASS");
}

#[test]
fn acceptance_06_conditional_mean_identity() {
    let grid = desk_grid();
    for cell in &grid.cells {
        let blind = cell
            .rows
            .iter()
            .find(|r| r.analyst == AnalystVariant::BlindTrueMu)
            .expect("blind row");
        let snoop_mu = cell
            .rows
            .iter()
            .find(|r| r.analyst == AnalystVariant::SnoopTrueMu)
            .expect("snoop-on-mean row");
        let diff = (blind.mean_bias - snoop_mu.mean_bias).abs();
        let tol = 3.0 * hypot(blind.mc_se, snoop_mu.mc_se);
        assert!(
            diff <= tol,
            "cell {} n={} p={} rho2={}: |{} - {}| > {tol}",
            cell.estimator,
            cell.n,
            cell.p,
            cell.rho2,
            blind.mean_bias,
            snoop_mu.mean_bias
        );
    }
    println!("ACCEPTANCE 6 (blinded mean equals snooping-on-the-mean): PASS");
}

#[test]
fn acceptance_07_rank_disagreement_decays() {
    let template =
        SimConfig::with_beta(50, 2, 0.5, 0.0, 0.0, vec![2.0, -1.0], SEED).expect("config");
    let rows = run_rank_agreement(&[50, 200, 1000], &template, 0, 1, 2000, RankProxy::TrueMu)
        .expect("rank agreement");
    for w in rows.windows(2) {
        let tol = 2.0 * hypot(w[0].se, w[1].se);
        assert!(
            w[1].p_disagree <= w[0].p_disagree + tol,
            "disagreement rose: {} (n={}) -> {} (n={})",
            w[0].p_disagree,
            w[0].n,
            w[1].p_disagree,
            w[1].n
        );
    }
    let last = rows.last().unwrap();
    assert!(
        last.p_disagree < 0.15,
        "disagreement at n=1000 is {:.4}",
        last.p_disagree
    );
    println!(
        "ACCEPTANCE 7 (rank disagreement {:.3} -> {:.3} -> {:.3}): PASS",
        rows[0].p_disagree, rows[1].p_disagree, rows[2].p_disagree
    );
}

#[test]
fn acceptance_08_att_split_unbiased_against_adversary() {
    let sim = SimConfig::new(200, 20, 0.5, SEED).expect("config");
    let study = AttStudyConfig::standard(sim);
    let prior = PopulationPrior::from_config(&study.sim);
    let check = run_unbiasedness_check(
        &study,
        &ExplorerPolicy::AdversarialMaxEstimate(prior),
        5000,
    )
    .expect("att study");
    assert!(
        check.mean_estimate.abs() <= 3.0 * check.mc_se,
        "split arm biased: {} +- {}",
        check.mean_estimate,
        check.mc_se
    );
    assert!(
        check.contrast_mean > 5.0 * check.contrast_se,
        "no-split contrast not visibly biased: {} +- {}",
        check.contrast_mean,
        check.contrast_se
    );
    println!(
        "ACCEPTANCE 8 (ATT split {:.4}+-{:.4} unbiased, no-split {:.4}+-{:.4} biased): PASS",
        check.mean_estimate, check.mc_se, check.contrast_mean, check.contrast_se
    );
}

#[test]
fn acceptance_09_kernel_property_suite() {
    // Frozen oracle instances.
    let a4 = [0.0, 0.0, 1.0, 1.0];
    let d = ols_adjusted(&[1.0, 2.0, 3.0, 5.0], &a4, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!((d - 0.5).abs() < 1e-12, "frozen normal-equations value");
    assert!(
        (d - common::ols_oracle(&[1.0, 2.0, 3.0, 5.0], &a4, &[1.0, 2.0, 3.0, 4.0])).abs()
            < 1e-10
    );

    let x_log = [-1.0, 0.0, 1.0, 2.0];
    let a_log = [0.0, 1.0, 0.0, 1.0];
    let fit = fit_logistic(&x_log, &a_log).unwrap();
    let (o0, o1) = common::logistic_grid_oracle(&x_log, &a_log);
    assert!((fit.alpha0 - o0).abs() < 1e-3 && (fit.alpha1 - o1).abs() < 1e-3);
    assert!((fit.alpha0 - -0.454092140).abs() < 1e-6);
    assert!((fit.alpha1 - 0.908184296).abs() < 1e-6);

    let x8 = [0.5, -1.2, 0.3, 2.1, -0.7, 1.5, 0.9, -0.3];
    let a8 = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
    let y8 = [1.0, 0.2, 0.7, 2.5, 1.8, 3.1, 2.2, 0.9];
    let ipw = ipw_estimate(&x8, &a8, &y8).unwrap();
    assert!((ipw - 0.953229391081).abs() < 1e-6, "frozen weighted contrast");

    let beta12 = make_beta(12).unwrap();
    assert_eq!(beta12[..5], [2.0; 5]);
    assert_eq!(beta12[5..10], [-1.0; 5]);
    assert_eq!(beta12[10..], [0.0; 2]);
    assert_eq!(calibrate_noise_var(&make_beta(10).unwrap(), 0.5).unwrap(), 25.0);
    assert_eq!(calibrate_noise_var(&make_beta(10).unwrap(), 0.25).unwrap(), 75.0);

    let r = (1.0f64 / 3.0).sqrt();
    assert!((approx_correlation(r, r, 0.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(approx_correlation(0.3, 0.9, 0.2, 1.0).unwrap(), 1.0);

    // Linearity, shift invariance, and score residuals over a fixed sweep
    // of simulated draws.
    let config = SimConfig::new(16, 2, 0.5, SEED).unwrap();
    let mut checked_ipw = 0;
    for rep in 0..200u64 {
        let mut rng = stream_rng(SEED, "acceptance/kernels", rep, Lane::Dataset);
        let ds = draw_dataset(&config, &mut rng).unwrap();
        let mut rng2 = stream_rng(SEED, "acceptance/kernels-alt", rep, Lane::Dataset);
        let ds2 = draw_dataset(&config, &mut rng2).unwrap();
        let x = ds.x.column(0);
        let (y1, y2) = (&ds.y, &ds2.y);
        let (c1, c2) = (1.25, -0.75);
        let combo: Vec<f64> = y1.iter().zip(y2).map(|(u, v)| c1 * u + c2 * v).collect();
        let shifted: Vec<f64> = y1.iter().map(|v| v + 11.5).collect();
        let scale = |a: f64, b: f64| a.abs().max(b.abs()).max(1.0);

        let lhs = ols_adjusted(x, &ds.a, &combo).unwrap();
        let rhs = c1 * ols_adjusted(x, &ds.a, y1).unwrap()
            + c2 * ols_adjusted(x, &ds.a, y2).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * scale(lhs, rhs), "OLS linearity");
        let s = ols_adjusted(x, &ds.a, &shifted).unwrap();
        let u = ols_adjusted(x, &ds.a, y1).unwrap();
        assert!((s - u).abs() <= 1e-10 * scale(s, u), "OLS shift invariance");

        let fit = fit_logistic(x, &ds.a).unwrap();
        if fit.converged {
            let (mut s0, mut s1) = (0.0, 0.0);
            for i in 0..x.len() {
                let p = 1.0 / (1.0 + (-(fit.alpha0 + fit.alpha1 * x[i])).exp());
                s0 += ds.a[i] - p;
                s1 += x[i] * (ds.a[i] - p);
            }
            assert!(s0.abs() <= 1e-8 && s1.abs() <= 1e-8, "score residual");
        }
        if !fit.degenerate {
            checked_ipw += 1;
            let lhs = ipw_estimate(x, &ds.a, &combo).unwrap();
            let rhs = c1 * ipw_estimate(x, &ds.a, y1).unwrap()
                + c2 * ipw_estimate(x, &ds.a, y2).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * scale(lhs, rhs), "IPW linearity");
            let s = ipw_estimate(x, &ds.a, &shifted).unwrap();
            let u = ipw_estimate(x, &ds.a, y1).unwrap();
            assert!((s - u).abs() <= 1e-10 * scale(s, u), "IPW shift invariance");
        }
    }
    assert!(checked_ipw > 150, "IPW exercised on {checked_ipw} draws");

    // Fixed-slope contrast against direct arithmetic.
    let x6 = [0.4, -0.6, 1.1, 0.0, -0.9, 0.7];
    let a6 = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let y6 = [1.2, 0.1, 2.4, 0.9, -0.5, 1.8];
    let z: Vec<f64> = x6.iter().zip(&y6).map(|(xi, yi)| yi - 0.8 * xi).collect();
    let want = (z[3] + z[4] + z[5]) / 3.0 - (z[0] + z[1] + z[2]) / 3.0;
    assert!((d0_fixed_slope(&x6, &a6, &y6, 0.8).unwrap() - want).abs() < 1e-12);

    // Lasso optimality via the independent checker.
    for seed in [3u64, 11, 27] {
        let cfg = SimConfig::new(60, 6, 0.5, seed).unwrap();
        let mut rng = stream_rng(seed, "acceptance/lasso", 0, Lane::TrainingSet);
        let ds = draw_dataset(&cfg, &mut rng).unwrap();
        let model = lasso_cv(&ds.x, &ds.a, &ds.y, 5, 40).unwrap();
        let mut columns: Vec<Vec<f64>> = (0..6).map(|j| ds.x.column(j).to_vec()).collect();
        columns.push(ds.a.clone());
        let mut penalized = vec![true; 6];
        penalized.push(false);
        let viol = common::lasso_kkt_oracle(
            &columns,
            &penalized,
            &ds.y,
            model.intercept,
            &model.coefficients,
            model.lambda,
        );
        assert!(viol <= 1e-6, "KKT violation {viol} at seed {seed}");
    }
    println!("ACCEPTANCE 9 (kernel property suite): PASS");
}

#[test]
fn acceptance_10_deterministic_output_across_worker_counts() {
    let file: FileConfig = toml::from_str(
        r#"
        seed = 31415
        [grid]
        n = [30]
        p = [8]
        rho2 = [0.5]
        estimators = ["ols", "ipw"]
        analysts = ["snoop", "blind_true_mu", "blind_learned_mu"]
        replications = 60
        lasso_folds = 4
        lasso_lambda_count = 20
    "#,
    )
    .unwrap();
    let base = resolve(file, &Overrides::default()).unwrap();

    let mut outputs = Vec::new();
    for threads in [1usize, 1, 4] {
        let mut config = base.clone();
        config.threads = threads;
        let dir = tempfile::tempdir().unwrap();
        runner::run(Subcommand::Grid, &config, dir.path()).unwrap();
        outputs.push(std::fs::read(dir.path().join("grid.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "rerun changed bytes");
    assert_eq!(outputs[0], outputs[2], "worker count changed bytes");

    // The manifest alone reproduces the run.
    let dir = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &base, dir.path()).unwrap();
    let manifest = runner::load_manifest(&dir.path().join("manifest.toml")).unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &manifest.config, dir2.path()).unwrap();
    assert_eq!(
        std::fs::read(dir.path().join("grid.csv")).unwrap(),
        std::fs::read(dir2.path().join("grid.csv")).unwrap()
    );
    println!("ACCEPTANCE 10 (byte-identical output at 1 and 4 workers): PASS");
}
