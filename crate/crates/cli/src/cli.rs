//! Argument parsing and dispatch for the `chandet` binary.
//!
//! Exit codes: 0 on success, 2 on validation failures (bad flags, malformed
//! specs or config files), 3 on numerical-domain failures inside the
//! library (unstable quantiles, out-of-domain parameters, failed oracles).

use anyhow::{bail, Context, Result};
use chandet::calibration::{
    asymptotic_critical_bayes, asymptotic_critical_map, CalibrationResult, Method,
};
use chandet::detectors::TestKind;
use chandet::power::SignalSpec;
use chandet::priors::{continuous_entropy, discretize_prior, DEFAULT_TAIL_TOL};
use chandet::zeta::inverse_exponential_cdf;
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::experiment;
use crate::io;
use crate::par;
use crate::priorspec::parse_prior_spec;
use crate::zcache;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "chandet",
    version,
    about = "Calibrate and evaluate MAP and Bayes multichannel signal detectors"
)]
pub struct Cli {
    /// Worker threads for Monte-Carlo loops; the results are bit-identical
    /// for any value
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output directory; defaults to $CHANDET_OUT_DIR, then the current
    /// directory
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    Map,
    Bayes,
}

impl From<TestArg> for TestKind {
    fn from(t: TestArg) -> TestKind {
        match t {
            TestArg::Map => TestKind::Map,
            TestArg::Bayes => TestKind::Bayes,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mc,
    Asymptotic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute critical thresholds for a target false-alarm level
    Calibrate {
        #[arg(long, value_enum)]
        test: TestArg,
        /// Prior shape: uniform(a,b), exponential(rate), triangular(a,b,c),
        /// or tabulated:<path.csv>
        #[arg(long, default_value = "uniform(0,1)")]
        prior: String,
        /// Channel count; repeatable
        #[arg(long, required = true)]
        n: Vec<u32>,
        /// Target level; repeatable
        #[arg(long, required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Mc)]
        method: MethodArg,
        /// Sample size behind the Bayes closed-form quantile
        #[arg(long, default_value_t = 100_000)]
        zeta_samples: u64,
        /// Series terms behind the Bayes closed-form quantile
        #[arg(long, default_value_t = 2_000)]
        zeta_terms: u32,
        /// Output CSV, relative to the output directory
        #[arg(long, default_value = "calibration.csv")]
        out: PathBuf,
    },
    /// Sample the limiting variable of the Bayes null statistic
    Zeta {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 10_000)]
        terms: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated quantile levels
        #[arg(long, default_value = "0.01,0.05,0.5,0.95,0.99")]
        quantiles: String,
        #[arg(long, default_value = "zeta_quantiles.csv")]
        out: PathBuf,
        /// Emit an empirical-CDF table over start:stop:points
        #[arg(long)]
        cdf_grid: Option<String>,
        #[arg(long, default_value = "zeta_cdf.csv")]
        cdf_out: PathBuf,
    },
    /// Estimate second-kind errors for boundary-scaled signals
    Power {
        #[arg(long, value_enum)]
        test: TestArg,
        #[arg(long, default_value = "uniform(0,1)")]
        prior: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        /// Signal channel; repeatable
        #[arg(long, required = true)]
        signal_channel: Vec<u32>,
        /// Amplitude as a multiple of the per-channel non-detectability
        /// boundary of the selected test
        #[arg(long, default_value_t = 1.0)]
        signal_scale: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "power.csv")]
        out: PathBuf,
    },
    /// Run the independent asymptotics oracles and report pass/fail
    Check {
        /// Gaussian-tail grid points, comma separated
        #[arg(long, default_value = "2,4,8")]
        tail_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        tail_trials: u64,
        /// Channel count for the order-statistic oracle
        #[arg(long, default_value_t = 20_000)]
        pyke_n: u32,
        #[arg(long, default_value_t = 2)]
        pyke_k_max: u32,
        #[arg(long, default_value_t = 4_000)]
        pyke_trials: u64,
        /// Channel count for the limiting-law oracle
        #[arg(long, default_value_t = 10_000)]
        null_n: u32,
        #[arg(long, default_value_t = 4_000)]
        null_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "checks.csv")]
        out: PathBuf,
    },
    /// Run a declarative experiment config (calibrate, power, figure data)
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("CHANDET_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn core_err(e: chandet::Error, msg: String) -> anyhow::Error {
    anyhow::Error::new(e).context(msg)
}

/// Map an error chain to the documented exit code.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<chandet::Error>().is_some() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let out_dir = resolve_out_dir(cli.out_dir);
    par::init_workers(cli.workers)?;
    eprintln!(
        "chandet: out_dir={} workers={}",
        out_dir.display(),
        cli.workers.map_or_else(|| "auto".to_string(), |w| w.to_string())
    );
    match cli.command {
        Command::Calibrate {
            test,
            prior,
            n,
            alpha,
            trials,
            seed,
            method,
            zeta_samples,
            zeta_terms,
            out,
        } => run_calibrate(
            &out_dir,
            test.into(),
            &prior,
            &n,
            &alpha,
            trials,
            seed,
            method,
            zeta_samples,
            zeta_terms,
            &out,
        ),
        Command::Zeta { samples, terms, seed, quantiles, out, cdf_grid, cdf_out } => {
            run_zeta(&out_dir, samples, terms, seed, &quantiles, &out, cdf_grid.as_deref(), &cdf_out)
        }
        Command::Power {
            test,
            prior,
            n,
            alpha,
            signal_channel,
            signal_scale,
            sigma,
            trials,
            seed,
            out,
        } => run_power(
            &out_dir,
            test.into(),
            &prior,
            n,
            alpha,
            &signal_channel,
            signal_scale,
            sigma,
            trials,
            seed,
            &out,
        ),
        Command::Check {
            tail_grid,
            tail_trials,
            pyke_n,
            pyke_k_max,
            pyke_trials,
            null_n,
            null_trials,
            seed,
            out,
        } => run_check(
            &out_dir,
            &tail_grid,
            tail_trials,
            pyke_n,
            pyke_k_max,
            pyke_trials,
            null_n,
            null_trials,
            seed,
            &out,
        ),
        Command::Experiment { config } => {
            let record = experiment::run_experiment(&config, &out_dir)?;
            eprintln!(
                "experiment '{}' complete: {} outputs, digest {}",
                record.name,
                record.outputs.len(),
                record.config_digest
            );
            Ok(())
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad {what} entry '{s}'")))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        bail!("empty {what} list");
    }
    Ok(values)
}

#[allow(clippy::too_many_arguments)]
fn run_calibrate(
    out_dir: &Path,
    kind: TestKind,
    prior_spec: &str,
    ns: &[u32],
    alphas: &[f64],
    trials: u64,
    seed: u64,
    method: MethodArg,
    zeta_samples: u64,
    zeta_terms: u32,
    out: &Path,
) -> Result<()> {
    let shape = parse_prior_spec(prior_spec)?;
    let mut rows = Vec::new();
    // the Bayes closed form needs the limit quantile and the shape entropy
    let zeta_dist = if kind == TestKind::Bayes && method == MethodArg::Asymptotic {
        Some(zcache::load_or_sample(&out_dir.join("zeta-cache"), zeta_terms, zeta_samples, seed)?)
    } else {
        None
    };
    for &n in ns {
        match method {
            MethodArg::Mc => {
                let prior = discretize_prior(&shape, n, DEFAULT_TAIL_TOL)
                    .map_err(|e| core_err(e, format!("prior discretization at n = {n}")))?;
                let null = par::null_statistics(kind, &prior, trials, seed);
                for &alpha in alphas {
                    let r = chandet::calibration::mc_critical_from_null(&null, alpha, n).map_err(
                        |e| core_err(e, format!("calibration at n = {n}, alpha = {alpha}")),
                    )?;
                    rows.push((r, seed));
                }
            }
            MethodArg::Asymptotic => {
                for &alpha in alphas {
                    let log_threshold = match kind {
                        TestKind::Map => asymptotic_critical_map(alpha, n)
                            .map_err(|e| core_err(e, format!("closed form at n = {n}")))?,
                        TestKind::Bayes => {
                            let entropy = continuous_entropy(&shape)
                                .map_err(|e| core_err(e, "shape entropy".into()))?;
                            let q = chandet::zeta::zeta_quantile(zeta_dist.as_ref().unwrap(), alpha)
                                .map_err(|e| {
                                    core_err(e, format!("limit quantile at alpha = {alpha}"))
                                })?;
                            asymptotic_critical_bayes(alpha, n, entropy, q)
                                .map_err(|e| core_err(e, format!("closed form at n = {n}")))?
                                .log
                        }
                    };
                    rows.push((
                        CalibrationResult {
                            log_threshold,
                            alpha,
                            n,
                            method: Method::Asymptotic,
                            trials: 0,
                            ci_halfwidth: 0.0,
                        },
                        seed,
                    ));
                }
            }
        }
    }
    io::write_text(&out_dir.join(out), &io::calibration_csv(&rows))
}

#[allow(clippy::too_many_arguments)]
fn run_zeta(
    out_dir: &Path,
    samples: u64,
    terms: u32,
    seed: u64,
    quantiles: &str,
    out: &Path,
    cdf_grid: Option<&str>,
    cdf_out: &Path,
) -> Result<()> {
    if samples == 0 || terms == 0 {
        bail!("--samples and --terms must be positive");
    }
    let levels = parse_f64_list(quantiles, "quantile")?;
    let dist = zcache::load_or_sample(&out_dir.join("zeta-cache"), terms, samples, seed)?;
    let mut rows = Vec::new();
    for &q in &levels {
        if !(q > 0.0 && q < 1.0) {
            bail!("quantile level {q} outside (0,1)");
        }
        rows.push((q, dist.quantile(q).map_err(|e| core_err(e, format!("quantile {q}")))?));
    }
    io::write_text(&out_dir.join(out), &io::quantile_csv(&rows))?;

    if let Some(grid) = cdf_grid {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            bail!("--cdf-grid must look like start:stop:points");
        }
        let start: f64 = parts[0].trim().parse().context("bad cdf-grid start")?;
        let stop: f64 = parts[1].trim().parse().context("bad cdf-grid stop")?;
        let points: u32 = parts[2].trim().parse().context("bad cdf-grid points")?;
        if points < 2 || !(stop > start) {
            bail!("--cdf-grid needs stop > start and at least 2 points");
        }
        let step = (stop - start) / (points - 1) as f64;
        let rows: Vec<(f64, f64, f64)> = (0..points)
            .map(|i| {
                let x = start + step * i as f64;
                (x, dist.ecdf(x), inverse_exponential_cdf(x))
            })
            .collect();
        io::write_text(&out_dir.join(cdf_out), &io::cdf_grid_csv(&rows))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_power(
    out_dir: &Path,
    kind: TestKind,
    prior_spec: &str,
    n: u32,
    alpha: f64,
    channels: &[u32],
    scale: f64,
    sigma: f64,
    trials: u64,
    seed: u64,
    out: &Path,
) -> Result<()> {
    if !(scale >= 0.0 && scale.is_finite()) {
        bail!("--signal-scale must be a finite non-negative number");
    }
    let shape = parse_prior_spec(prior_spec)?;
    let prior = discretize_prior(&shape, n, DEFAULT_TAIL_TOL)
        .map_err(|e| core_err(e, format!("prior discretization at n = {n}")))?;
    let null = par::null_statistics(kind, &prior, trials, seed);
    let threshold = chandet::calibration::mc_critical_from_null(&null, alpha, n)
        .map_err(|e| core_err(e, format!("calibration at alpha = {alpha}")))?;
    let mut reports = Vec::new();
    for &channel in channels {
        let halfside_sq = match kind {
            TestKind::Map => {
                chandet::power::map_parallelepiped_halfside_sq(&prior, alpha, channel, sigma)
            }
            TestKind::Bayes => {
                chandet::power::bayes_parallelepiped_halfside_sq(&prior, channel, sigma)
            }
        }
        .map_err(|e| core_err(e, format!("box bound in channel {channel}")))?;
        if halfside_sq < 0.0 {
            return Err(core_err(
                chandet::Error::InsideBulk { channel },
                format!("channel {channel} boundary"),
            ));
        }
        let signal = SignalSpec { channel, amplitude: scale * halfside_sq.sqrt(), sigma };
        let report =
            par::second_kind(kind, &prior, signal, threshold.log_threshold, alpha, trials, seed)
                .map_err(|e| core_err(e, format!("power at channel {channel}")))?;
        reports.push(report);
    }
    io::write_text(&out_dir.join(out), &io::power_csv(&reports))
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    out_dir: &Path,
    tail_grid: &str,
    tail_trials: u64,
    pyke_n: u32,
    pyke_k_max: u32,
    pyke_trials: u64,
    null_n: u32,
    null_trials: u64,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let grid = parse_f64_list(tail_grid, "tail grid")?;
    let mut csv = String::from("oracle,statistic,threshold,passed\n");
    let mut all_pass = true;
    let mut record = |name: String, stat: f64, threshold: f64| {
        let passed = stat < threshold;
        all_pass &= passed;
        let _ = writeln!(csv, "{name},{stat},{threshold},{passed}");
        eprintln!("{}: {name} = {stat:.6} (threshold {threshold})", if passed { "ok" } else { "FAIL" });
    };

    let rel = chandet::checks::gaussian_tail_check(&grid, tail_trials, seed)
        .map_err(|e| core_err(e, "tail oracle".into()))?;
    for (&x, &r) in grid.iter().zip(&rel) {
        // the asymptote carries a relative error of about 1/(2x); allow
        // double that plus Monte-Carlo noise headroom
        let exact = chandet::checks::gaussian_tail_exact(x);
        let mc_noise = 3.0 * (exact.max(1e-12) / tail_trials as f64).sqrt() / exact.max(1e-12);
        record(format!("gaussian_tail_x{x}"), r, 1.0 / x + mc_noise);
    }

    let ks = chandet::checks::pyke_oracle_check(pyke_n, pyke_k_max, pyke_trials, seed ^ 0x9e37)
        .map_err(|e| core_err(e, "order-statistic oracle".into()))?;
    record(
        format!("pyke_n{pyke_n}_k{pyke_k_max}"),
        ks,
        0.05 + 1.36 * (2.0 / pyke_trials as f64).sqrt(),
    );

    let prior = chandet::priors::PriorVector::uniform(null_n)
        .map_err(|e| core_err(e, "uniform prior".into()))?;
    let zeta_ref = zcache::load_or_sample(
        &out_dir.join("zeta-cache"),
        2_000,
        null_trials.max(10_000),
        seed ^ 0x7a11,
    )?;
    let ks = chandet::checks::null_limit_check(&prior, null_trials, seed, &zeta_ref)
        .map_err(|e| core_err(e, "limiting-law oracle".into()))?;
    record(
        format!("null_limit_n{null_n}"),
        ks,
        0.05 + 1.36 * (2.0 / null_trials as f64).sqrt(),
    );

    io::write_text(&out_dir.join(out), &csv)?;
    if !all_pass {
        return Err(core_err(
            chandet::Error::Domain("one or more asymptotics oracles failed"),
            "oracle suite".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn out_dir_resolution_prefers_flag() {
        assert_eq!(resolve_out_dir(Some(PathBuf::from("/x"))), PathBuf::from("/x"));
    }

    #[test]
    fn exit_codes_distinguish_error_kinds() {
        let validation = anyhow::anyhow!("bad flag");
        assert_eq!(exit_code_for(&validation), EXIT_VALIDATION);
        let numerical = anyhow::Error::new(chandet::Error::Domain("x")).context("op");
        assert_eq!(exit_code_for(&numerical), EXIT_NUMERICAL);
    }
}
