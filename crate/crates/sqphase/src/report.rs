//! CSV emission.
//!
//! Every file starts with a `# meta:` line carrying the artifact version
//! and, for config-driven runs, the full configuration as one-line JSON in
//! the config-file schema (so the header can be fed back into the parser).
//! Floats are written with 17 significant digits, which round-trips f64
//! exactly and makes outputs byte-stable across runs.
//!
//! Schemas:
//! * bounds:          `theta,fisher,inv_NF,sql,ocrb,qcrb`
//! * posterior:       `theta,density`
//! * sweep trials:    `theta,rep,map,post_var`
//! * sweep aggregate: `theta,emp_var,mean_post_var,stderr,sql,ocrb,qcrb`
//! * purity scan:     `purity,r,r_prime,delta_theta_theory,delta_theta_empirical`

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bayes::PosteriorGrid;
use crate::bounds;
use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, ExperimentReport, PurityScanRow};
use crate::state::SqueezedThermalState;

/// 17 significant digits: exact decimal round-trip for f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize, Deserialize)]
struct Meta<'a> {
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<serde_json::Value>,
}

/// `# meta:` line embedding the config in the file schema.
pub fn meta_line(cfg: &ExperimentConfig) -> String {
    let config: serde_json::Value =
        serde_json::from_str(&crate::config::config_to_json(cfg)).expect("config json");
    let meta = Meta {
        version: crate::ARTIFACT_VERSION,
        config: Some(config),
    };
    format!("# meta: {}", serde_json::to_string(&meta).expect("meta"))
}

fn bare_meta_line(extra: serde_json::Value) -> String {
    let mut merged = serde_json::Map::new();
    merged.insert("version".into(), crate::ARTIFACT_VERSION.into());
    if let serde_json::Value::Object(obj) = extra {
        merged.extend(obj);
    }
    format!("# meta: {}", serde_json::Value::Object(merged))
}

/// Recovers the embedded config from the first line of an emitted file.
pub fn parse_meta_line(line: &str) -> Result<ExperimentConfig> {
    let json = line
        .strip_prefix("# meta: ")
        .ok_or_else(|| Error::Parse("missing '# meta:' prefix".into()))?;
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("bad meta JSON: {e}")))?;
    let config = value
        .get("config")
        .ok_or_else(|| Error::Parse("meta line has no config".into()))?;
    crate::config::parse_config(&config.to_string())
}

/// Bound-ladder rows, one per phase, in the caller's phase order.
/// `inv_NF` is left empty where the Fisher information vanishes (the
/// Cramér-Rao floor diverges there; an empty cell keeps infinities out of
/// downstream tooling).
pub fn bounds_csv(
    state: &SqueezedThermalState,
    thetas: &[f64],
    n_meas: u64,
) -> Result<String> {
    let mut out = bare_meta_line(serde_json::json!({
        "command": "bounds",
        "state": {"r": state.r(), "r_prime": state.r_prime()},
        "n_meas": n_meas,
    }));
    out.push('\n');
    out.push_str("theta,fisher,inv_NF,sql,ocrb,qcrb\n");
    for &theta in thetas {
        let row = bounds::bounds_report(state, theta, n_meas)?;
        let inv_nf = row.inv_nf().map(fmt_float).unwrap_or_default();
        writeln!(
            out,
            "{},{},{inv_nf},{},{},{}",
            fmt_float(row.theta),
            fmt_float(row.fisher),
            fmt_float(row.sql),
            fmt_float(row.ocrb),
            fmt_float(row.qcrb),
        )
        .unwrap();
    }
    Ok(out)
}

/// Posterior density curve.
pub fn posterior_csv(grid: &PosteriorGrid, cfg: &ExperimentConfig) -> String {
    let mut out = meta_line(cfg);
    out.push('\n');
    out.push_str("theta,density\n");
    for (t, d) in grid.thetas().iter().zip(grid.density()) {
        writeln!(out, "{},{}", fmt_float(*t), fmt_float(*d)).unwrap();
    }
    out
}

/// Per-trial rows of a sweep or single-phase run.
pub fn trials_csv(report: &ExperimentReport, cfg: &ExperimentConfig) -> String {
    let mut out = meta_line(cfg);
    out.push('\n');
    out.push_str("theta,rep,map,post_var\n");
    for agg in &report.aggregates {
        for (rep, trial) in agg.trials.iter().enumerate() {
            writeln!(
                out,
                "{},{rep},{},{}",
                fmt_float(agg.theta),
                fmt_float(trial.map_estimate),
                fmt_float(trial.posterior_variance),
            )
            .unwrap();
        }
    }
    out
}

/// Aggregate rows of a sweep, one per phase, with the bound ladder.
pub fn aggregate_csv(report: &ExperimentReport, cfg: &ExperimentConfig) -> String {
    let mut out = meta_line(cfg);
    out.push('\n');
    out.push_str("theta,emp_var,mean_post_var,stderr,sql,ocrb,qcrb\n");
    for agg in &report.aggregates {
        // stderr cell stays empty when the jackknife is undefined (R < 3)
        let stderr = agg.stderr.map(fmt_float).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{stderr},{},{},{}",
            fmt_float(agg.theta),
            fmt_float(agg.empirical_variance),
            fmt_float(agg.mean_posterior_variance),
            fmt_float(agg.bounds.sql),
            fmt_float(agg.bounds.ocrb),
            fmt_float(agg.bounds.qcrb),
        )
        .unwrap();
    }
    out
}

/// Purity-scan rows in the caller's state order.
pub fn purity_scan_csv(rows: &[PurityScanRow], cfg: &ExperimentConfig) -> String {
    let mut out = meta_line(cfg);
    out.push('\n');
    out.push_str("purity,r,r_prime,delta_theta_theory,delta_theta_empirical\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(row.purity),
            fmt_float(row.r),
            fmt_float(row.r_prime),
            fmt_float(row.delta_theta_theory),
            fmt_float(row.delta_theta_empirical),
        )
        .unwrap();
    }
    out
}
