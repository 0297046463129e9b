//! End-to-end checks of config parsing, output files, the manifest, and
//! reproducibility of the emitted CSV bytes.

use std::fs;
use std::path::Path;

use snooplab::runner::{
    self, load_manifest, parse_config_file, resolve, FileConfig, Overrides, Profile,
    Subcommand,
};

fn tiny_grid_config(threads: usize) -> runner::ResolvedConfig {
    let file: FileConfig = toml::from_str(
        r#"
        seed = 4242
        [grid]
        n = [30]
        p = [6, 10]
        rho2 = [0.5]
        estimators = ["ols"]
        analysts = ["snoop", "blind_true_mu"]
        replications = 120
        lasso_folds = 4
        lasso_lambda_count = 20
    "#,
    )
    .unwrap();
    let mut cfg = resolve(
        file,
        &Overrides {
            profile: Some(Profile::Desk),
            ..Default::default()
        },
    )
    .unwrap();
    cfg.threads = threads;
    cfg
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn grid_output_is_byte_identical_across_runs_and_worker_counts() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let d3 = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &tiny_grid_config(1), d1.path()).unwrap();
    runner::run(Subcommand::Grid, &tiny_grid_config(1), d2.path()).unwrap();
    runner::run(Subcommand::Grid, &tiny_grid_config(2), d3.path()).unwrap();
    let a = read(&d1.path().join("grid.csv"));
    let b = read(&d2.path().join("grid.csv"));
    let c = read(&d3.path().join("grid.csv"));
    assert_eq!(a, b, "same config, same bytes");
    assert_eq!(a, c, "worker count must not change output");
    assert!(a.starts_with("estimator,n,p,rho2,analyst,mean_bias,scaled_bias,mc_se,reps,seed\n"));
    assert_eq!(a.lines().count(), 1 + 2 * 2, "header plus cells x analysts");
}

#[test]
fn manifest_reproduces_the_run_exactly() {
    let d1 = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &tiny_grid_config(1), d1.path()).unwrap();
    let manifest = load_manifest(&d1.path().join("manifest.toml")).unwrap();
    assert_eq!(manifest.run.subcommand, "grid");
    assert_eq!(manifest.run.seed, 4242);

    let d2 = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &manifest.config, d2.path()).unwrap();
    assert_eq!(
        read(&d1.path().join("grid.csv")),
        read(&d2.path().join("grid.csv"))
    );
}

#[test]
fn every_subcommand_writes_its_table_and_manifest() {
    let file: FileConfig = toml::from_str(
        r#"
        seed = 9
        [noisecor]
        replications = 60
        [rankagree]
        n = [30, 60]
        replications = 60
        [attsplit]
        n = 40
        p = 4
        replications = 60
        [noise_condition]
        n = [30]
        p = [6]
        rho2 = [0.5]
        estimators = ["ols"]
        replications = 60
    "#,
    )
    .unwrap();
    let config = resolve(file, &Overrides::default()).unwrap();

    for (cmd, file_name, header) in [
        (
            Subcommand::NoiseCor,
            "noisecor.csv",
            runner::NOISECOR_HEADER,
        ),
        (
            Subcommand::RankAgree,
            "rankagree.csv",
            runner::RANKAGREE_HEADER,
        ),
        (Subcommand::AttSplit, "att.csv", runner::ATT_HEADER),
        (
            Subcommand::CheckNoiseCondition,
            "noise_condition.csv",
            runner::NOISE_CONDITION_HEADER,
        ),
    ] {
        let dir = tempfile::tempdir().unwrap();
        runner::run(cmd, &config, dir.path()).unwrap();
        let text = read(&dir.path().join(file_name));
        assert!(
            text.starts_with(&format!("{header}\n")),
            "{file_name} header mismatch: {}",
            text.lines().next().unwrap_or("")
        );
        assert!(text.lines().count() > 1, "{file_name} has no data rows");
        assert!(dir.path().join("manifest.toml").exists());

        if cmd == Subcommand::NoiseCor {
            // Default axes: 3 covariate correlations x 5 noise weights.
            assert_eq!(text.lines().count(), 1 + 15, "noisecor row count");
        }
    }
}

#[test]
fn plots_are_emitted_on_request() {
    let mut config = tiny_grid_config(1);
    config.plots = true;
    let dir = tempfile::tempdir().unwrap();
    runner::run(Subcommand::Grid, &config, dir.path()).unwrap();
    let svg = read(&dir.path().join("grid_bias_ols.svg"));
    assert!(svg.starts_with("<svg"));
    assert!(dir.path().join("grid_ratio_ols.svg").exists());
}

#[test]
fn att_table_lists_both_arms() {
    let file: FileConfig = toml::from_str(
        "[attsplit]\nn = 40\np = 4\nreplications = 50",
    )
    .unwrap();
    let config = resolve(file, &Overrides::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    runner::run(Subcommand::AttSplit, &config, dir.path()).unwrap();
    let text = read(&dir.path().join("att.csv"));
    assert!(text.contains("att_split,adversarial_max_estimate"));
    assert!(text.contains("att_nosplit,adversarial_max_estimate"));
}

#[test]
fn unknown_config_keys_are_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[grid]\nn = [30]\nbanna_count = 7\n").unwrap();
    let err = parse_config_file(&path).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("banna_count"), "{msg}");
    assert!(msg.contains("line 3") || msg.contains('3'), "{msg}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn missing_config_file_is_a_config_error() {
    let err = parse_config_file(Path::new("/definitely/not/here.toml")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn invalid_values_name_the_offending_field() {
    let file: FileConfig = toml::from_str("[grid]\nrho2 = [2.0]").unwrap();
    let err = resolve(file, &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("rho2"), "{err}");
    assert_eq!(err.exit_code(), 2);
}
