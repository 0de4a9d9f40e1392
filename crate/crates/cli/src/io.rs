//! CSV emission and ingestion.
//!
//! Output files are written with plain formatted writes (shortest
//! round-trip float formatting), so reruns are byte-identical. Inputs go
//! through the csv reader for robustness to quoting and whitespace.

use anyhow::{bail, Context, Result};
use chandet::calibration::{CalibrationResult, Method};
use chandet::detectors::Observation;
use chandet::power::PowerReport;
use std::fmt::Write as _;
use std::path::Path;

pub fn method_name(method: Method) -> &'static str {
    match method {
        Method::MonteCarlo => "mc",
        Method::Asymptotic => "asymptotic",
    }
}

/// `alpha,n,method,log_threshold,ci_halfwidth,trials,seed`
pub fn calibration_csv(rows: &[(CalibrationResult, u64)]) -> String {
    let mut out = String::from("alpha,n,method,log_threshold,ci_halfwidth,trials,seed\n");
    for (r, seed) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.alpha,
            r.n,
            method_name(r.method),
            r.log_threshold,
            r.ci_halfwidth,
            r.trials,
            seed
        );
    }
    out
}

/// `q,t_q`
pub fn quantile_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("q,t_q\n");
    for (q, t) in rows {
        let _ = writeln!(out, "{q},{t}");
    }
    out
}

/// `x,ecdf_zeta,cdf_inv_exp`
pub fn cdf_grid_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("x,ecdf_zeta,cdf_inv_exp\n");
    for (x, e, c) in rows {
        let _ = writeln!(out, "{x},{e},{c}");
    }
    out
}

/// `channel,amplitude,beta,ci,alpha_achieved`
pub fn power_csv(reports: &[PowerReport]) -> String {
    let mut out = String::from("channel,amplitude,beta,ci,alpha_achieved\n");
    for rep in reports {
        for (sig, beta, ci) in &rep.beta_estimates {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sig.channel, sig.amplitude, beta, ci, rep.alpha_achieved
            );
        }
    }
    out
}

/// `alpha,n,error` figure data (threshold-approximation error curves).
pub fn figure_error_csv(rows: &[(f64, u32, f64)]) -> String {
    let mut out = String::from("alpha,n,error\n");
    for (alpha, n, err) in rows {
        let _ = writeln!(out, "{alpha},{n},{err}");
    }
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

/// Observations from CSV, one row per trial, columns = channels.
pub fn read_observations(path: &Path, sigma: f64) -> Result<Vec<Observation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read observations {}", path.display()))?;
    let mut out = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record?;
        let values: Vec<f64> = record
            .iter()
            .map(|f| f.parse::<f64>().context("bad reading in observations file"))
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                bail!("ragged observations file: {} vs {} columns", w, values.len())
            }
            _ => {}
        }
        out.push(Observation::new(values, sigma).map_err(|e| anyhow::anyhow!("{e}"))?);
    }
    Ok(out)
}
