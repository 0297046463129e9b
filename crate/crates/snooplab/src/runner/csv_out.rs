//! CSV emission. Headers are part of the output contract and real values
//! are written with exactly 12 significant digits, so a rerun at any
//! worker count produces byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::att_split::AttCheck;
use crate::error::{Error, Result};
use crate::experiments::{NoiseConditionCheck, NoiseCorRow, RankAgreementRow, SummaryRow};
use crate::solvers::EstimatorKind;

pub const GRID_HEADER: &str = "estimator,n,p,rho2,analyst,mean_bias,scaled_bias,mc_se,reps,seed";
pub const NOISECOR_HEADER: &str = "rho_x,m,empirical_cor,analytic_cor,expected_max,mc_se,reps";
pub const RANKAGREE_HEADER: &str = "n,p_disagree,se,reps";
pub const ATT_HEADER: &str = "arm,policy,mean_est,mc_se,reps";
pub const NOISE_CONDITION_HEADER: &str =
    "estimator,n,p,rho2,mean_m0,mean_m1,margin,pooled_se,satisfied,reps";

/// 12 significant digits, scientific, '.' decimal separator.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.11e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(contents.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_grid_csv(path: &Path, rows: &[SummaryRow], seed: u64) -> Result<()> {
    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.estimator,
            r.n,
            r.p,
            sig12(r.rho2),
            r.analyst,
            sig12(r.mean_bias),
            sig12(r.scaled_bias),
            sig12(r.mc_se),
            r.replications,
            seed,
        ));
    }
    write_file(path, &out)
}

pub fn write_noisecor_csv(path: &Path, rows: &[NoiseCorRow]) -> Result<()> {
    let mut out = String::from(NOISECOR_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            sig12(r.rho_x),
            sig12(r.m),
            sig12(r.empirical_cor),
            sig12(r.analytic_cor),
            sig12(r.expected_max),
            sig12(r.cor_se),
            r.replications,
        ));
    }
    write_file(path, &out)
}

pub fn write_rankagree_csv(path: &Path, rows: &[RankAgreementRow]) -> Result<()> {
    let mut out = String::from(RANKAGREE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            sig12(r.p_disagree),
            sig12(r.se),
            r.replications,
        ));
    }
    write_file(path, &out)
}

pub fn write_att_csv(path: &Path, check: &AttCheck, policy_label: &str) -> Result<()> {
    let mut out = String::from(ATT_HEADER);
    out.push('\n');
    out.push_str(&format!(
        "att_split,{},{},{},{}\n",
        policy_label,
        sig12(check.mean_estimate),
        sig12(check.mc_se),
        check.replications,
    ));
    out.push_str(&format!(
        "att_nosplit,{},{},{},{}\n",
        policy_label,
        sig12(check.contrast_mean),
        sig12(check.contrast_se),
        check.replications,
    ));
    write_file(path, &out)
}

pub struct NoiseConditionEntry {
    pub estimator: EstimatorKind,
    pub n: usize,
    pub p: usize,
    pub rho2: f64,
    pub check: NoiseConditionCheck,
}

pub fn write_noise_condition_csv(path: &Path, entries: &[NoiseConditionEntry]) -> Result<()> {
    let mut out = String::from(NOISE_CONDITION_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            e.estimator,
            e.n,
            e.p,
            sig12(e.rho2),
            sig12(e.check.mean_plain),
            sig12(e.check.mean_noised),
            sig12(e.check.margin),
            sig12(e.check.pooled_se),
            e.check.satisfied,
            e.check.replications,
        ));
    }
    write_file(path, &out)
}
