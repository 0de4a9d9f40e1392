//! Declarative experiment harness: one TOML config in, a directory of CSV
//! figure data plus a JSON manifest out.
//!
//! Every output is a pure function of the config contents (worker count
//! included), so reruns produce byte-identical CSVs and the manifest
//! records a digest of the config for provenance.

use anyhow::{bail, Context, Result};
use chandet::calibration::{
    asymptotic_critical_bayes, asymptotic_critical_map, mc_critical_from_null, CalibrationResult,
    Method,
};
use chandet::detectors::TestKind;
use chandet::power::SignalSpec;
use chandet::priors::{continuous_entropy, discretize_prior, DEFAULT_TAIL_TOL};
use chandet::zeta::{inverse_exponential_cdf, zeta_quantile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

use crate::io;
use crate::par;
use crate::priorspec::parse_prior_spec;
use crate::zcache;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub prior: String,
    pub n: Vec<u32>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub alphas: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub tests: Vec<String>,
    #[serde(default)]
    pub zeta: Option<ZetaSection>,
    #[serde(default)]
    pub power: Option<PowerSection>,
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSection {
    #[serde(default = "default_zeta_samples")]
    pub samples: u64,
    #[serde(default = "default_zeta_terms")]
    pub terms: u32,
    #[serde(default)]
    pub quantiles: Vec<f64>,
    #[serde(default)]
    pub cdf_grid: Option<CdfGrid>,
}

fn default_zeta_samples() -> u64 {
    100_000
}

fn default_zeta_terms() -> u32 {
    2_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdfGrid {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub channels: Vec<u32>,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    pub trials: u64,
}

fn default_scales() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub name: String,
    pub config_digest: String,
    pub library_version: String,
    pub gaussian_transform: String,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}


/// Wrap a library error with context while keeping it downcastable, so the
/// binary can map numerical-domain failures to their own exit code.
fn core_err(e: chandet::Error, msg: String) -> anyhow::Error {
    anyhow::Error::new(e).context(msg)
}

fn parse_tests(names: &[String]) -> Result<Vec<TestKind>> {
    let mut out = Vec::new();
    for name in names {
        match name.as_str() {
            "map" => out.push(TestKind::Map),
            "bayes" => out.push(TestKind::Bayes),
            other => bail!("unknown test '{other}' (expected 'map' or 'bayes')"),
        }
    }
    if out.is_empty() {
        bail!("config must select at least one test");
    }
    Ok(out)
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.n.is_empty() {
        bail!("config needs at least one channel count n");
    }
    if config.alphas.is_empty() || config.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        bail!("all alphas must lie in (0,1)");
    }
    if config.trials < 1_000 {
        bail!("trials must be at least 1000");
    }
    if !(config.sigma > 0.0) {
        bail!("sigma must be positive");
    }
    parse_tests(&config.tests)?;
    Ok(())
}

pub fn load_config(path: &Path) -> Result<(ExperimentConfig, String)> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: ExperimentConfig =
        toml::from_str(&raw).with_context(|| format!("invalid config {}", path.display()))?;
    validate(&config)?;
    let digest = format!("{:x}", Sha256::digest(raw.as_bytes()));
    Ok((config, digest))
}

/// Run a full experiment; writes outputs under `out_dir/<name>/` and always
/// leaves a manifest behind, marked partial if a step failed.
pub fn run_experiment(config_path: &Path, out_dir: &Path) -> Result<RunRecord> {
    let start = Instant::now();
    let (config, digest) = load_config(config_path)?;
    let exp_dir = out_dir.join(&config.name);
    let mut outputs: Vec<String> = Vec::new();

    let result = run_body(&config, &exp_dir, out_dir, &mut outputs);
    let record = RunRecord {
        name: config.name.clone(),
        config_digest: digest,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        gaussian_transform: "box-muller".to_string(),
        seed: config.seed,
        status: if result.is_ok() { "complete" } else { "partial" }.to_string(),
        error: result.as_ref().err().map(|e| format!("{e:#}")),
        outputs: outputs.clone(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest = serde_json::to_string_pretty(&record)? + "\n";
    io::write_text(&exp_dir.join("manifest.json"), &manifest)?;
    result.map(|()| record)
}

fn run_body(
    config: &ExperimentConfig,
    exp_dir: &Path,
    out_dir: &Path,
    outputs: &mut Vec<String>,
) -> Result<()> {
    let shape = parse_prior_spec(&config.prior)?;
    let tests = parse_tests(&config.tests)?;

    // the Bayes closed-form threshold needs the limiting-variable quantile
    // and the shape entropy
    let needs_bayes = tests.contains(&TestKind::Bayes);
    let (zeta_samples, zeta_terms) = config
        .zeta
        .as_ref()
        .map(|z| (z.samples, z.terms))
        .unwrap_or((default_zeta_samples(), default_zeta_terms()));
    let zeta_dist = if needs_bayes || config.zeta.is_some() {
        Some(zcache::load_or_sample(
            &out_dir.join("zeta-cache"),
            zeta_terms,
            zeta_samples,
            config.seed,
        )?)
    } else {
        None
    };
    let entropy = continuous_entropy(&shape)
        .map_err(|e| core_err(e, "shape entropy".into()))?;

    let mut cal_rows: Vec<(CalibrationResult, u64)> = Vec::new();
    let mut map_err_rows: Vec<(f64, u32, f64)> = Vec::new();
    let mut bayes_err_rows: Vec<(f64, u32, f64)> = Vec::new();
    let mut power_reports = Vec::new();

    for &n in &config.n {
        let prior = discretize_prior(&shape, n, DEFAULT_TAIL_TOL)
            .map_err(|e| core_err(e, format!("prior discretization at n = {n}")))?;
        let (null_map, null_bayes) = par::null_statistic_pairs(&prior, config.trials, config.seed);
        for &kind in &tests {
            let null = match kind {
                TestKind::Map => &null_map,
                TestKind::Bayes => &null_bayes,
            };
            for &alpha in &config.alphas {
                let mc = mc_critical_from_null(null, alpha, n)
                    .map_err(|e| core_err(e, format!("calibration at n = {n}, alpha = {alpha}")))?;
                cal_rows.push((mc, config.seed));
                match kind {
                    TestKind::Map => {
                        let asym = asymptotic_critical_map(alpha, n)
                            .map_err(|e| core_err(e, format!("closed form at n = {n}")))?;
                        cal_rows.push((
                            CalibrationResult {
                                log_threshold: asym,
                                alpha,
                                n,
                                method: Method::Asymptotic,
                                trials: 0,
                                ci_halfwidth: 0.0,
                            },
                            config.seed,
                        ));
                        map_err_rows.push((alpha, n, mc.log_threshold - asym));
                    }
                    TestKind::Bayes => {
                        let q = zeta_quantile(zeta_dist.as_ref().unwrap(), alpha)
                            .map_err(|e| core_err(e, format!("limit quantile at alpha = {alpha}")))?;
                        let asym = asymptotic_critical_bayes(alpha, n, entropy, q)
                            .map_err(|e| core_err(e, format!("closed form at n = {n}")))?;
                        cal_rows.push((
                            CalibrationResult {
                                log_threshold: asym.log,
                                alpha,
                                n,
                                method: Method::Asymptotic,
                                trials: 0,
                                ci_halfwidth: 0.0,
                            },
                            config.seed,
                        ));
                        bayes_err_rows
                            .push((alpha, n, mc.log_threshold.exp() - asym.linear));
                    }
                }

                if let Some(power) = &config.power {
                    for &channel in &power.channels {
                        for &scale in &power.scales {
                            let halfside_sq = match kind {
                                TestKind::Map => chandet::power::map_parallelepiped_halfside_sq(
                                    &prior,
                                    alpha,
                                    channel,
                                    config.sigma,
                                ),
                                TestKind::Bayes => {
                                    chandet::power::bayes_parallelepiped_halfside_sq(
                                        &prior,
                                        channel,
                                        config.sigma,
                                    )
                                }
                            }
                            .map_err(|e| core_err(e, format!("box bound in channel {channel}")))?;
                            if halfside_sq < 0.0 {
                                bail!("channel {channel} lies inside the detectable bulk");
                            }
                            let signal = SignalSpec {
                                channel,
                                amplitude: scale * halfside_sq.sqrt(),
                                sigma: config.sigma,
                            };
                            let report = par::second_kind(
                                kind,
                                &prior,
                                signal,
                                mc.log_threshold,
                                alpha,
                                power.trials,
                                config.seed,
                            )
                            .map_err(|e| core_err(e, format!("power at channel {channel}")))?;
                            power_reports.push((kind, n, alpha, report));
                        }
                    }
                }
            }
        }
    }

    let mut emit = |name: String, content: String| -> Result<()> {
        io::write_text(&exp_dir.join(&name), &content)?;
        outputs.push(name);
        Ok(())
    };

    emit("calibration.csv".into(), io::calibration_csv(&cal_rows))?;
    if !map_err_rows.is_empty() {
        emit("map_threshold_error.csv".into(), io::figure_error_csv(&map_err_rows))?;
    }
    if !bayes_err_rows.is_empty() {
        emit("bayes_threshold_error.csv".into(), io::figure_error_csv(&bayes_err_rows))?;
    }
    for (kind, n, alpha, report) in &power_reports {
        let name = format!(
            "power_{}_n{}_a{}.csv",
            match kind {
                TestKind::Map => "map",
                TestKind::Bayes => "bayes",
            },
            n,
            alpha
        );
        emit(name, io::power_csv(std::slice::from_ref(report)))?;
    }

    if let Some(zeta_cfg) = &config.zeta {
        let dist = zeta_dist.as_ref().unwrap();
        if !zeta_cfg.quantiles.is_empty() {
            let mut rows = Vec::new();
            for &q in &zeta_cfg.quantiles {
                if !(q > 0.0 && q < 1.0) {
                    bail!("quantile levels must lie in (0,1)");
                }
                rows.push((q, dist.quantile(q).map_err(|e| core_err(e, "quantile table".into()))?));
            }
            emit("zeta_quantiles.csv".into(), io::quantile_csv(&rows))?;
        }
        if let Some(grid) = &zeta_cfg.cdf_grid {
            if grid.points < 2 || !(grid.stop > grid.start) {
                bail!("cdf grid needs stop > start and at least 2 points");
            }
            let step = (grid.stop - grid.start) / (grid.points - 1) as f64;
            let rows: Vec<(f64, f64, f64)> = (0..grid.points)
                .map(|i| {
                    let x = grid.start + step * i as f64;
                    (x, dist.ecdf(x), inverse_exponential_cdf(x))
                })
                .collect();
            emit("zeta_cdf.csv".into(), io::cdf_grid_csv(&rows))?;
        }
    }

    Ok(())
}
