//! Textual prior-shape specifications.
//!
//! Accepted forms:
//! * `uniform(a,b)`
//! * `exponential(rate)`
//! * `triangular(a,b,c)` with `c` the mode
//! * `tabulated:<path.csv>` with `x,density` rows (linear interpolation;
//!   the table is renormalized to unit mass)

use anyhow::{bail, Context, Result};
use chandet::priors::PriorShape;
use std::path::Path;

pub fn parse_prior_spec(spec: &str) -> Result<PriorShape> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("tabulated:") {
        return load_tabulated(Path::new(path));
    }
    let (name, args) = split_call(spec)?;
    let shape = match (name, args.as_slice()) {
        ("uniform", [a, b]) => PriorShape::uniform(*a, *b),
        ("exponential", [rate]) => PriorShape::exponential(*rate),
        ("triangular", [a, b, c]) => PriorShape::triangular(*a, *b, *c),
        _ => bail!(
            "unrecognized prior spec '{spec}'; expected uniform(a,b), exponential(rate), \
             triangular(a,b,c), or tabulated:<path>"
        ),
    };
    shape.map_err(|e| anyhow::anyhow!("invalid prior spec '{spec}': {e}"))
}

fn split_call(spec: &str) -> Result<(&str, Vec<f64>)> {
    let open = spec.find('(').with_context(|| format!("prior spec '{spec}' has no '('"))?;
    let close =
        spec.rfind(')').with_context(|| format!("prior spec '{spec}' has no closing ')'"))?;
    if close != spec.len() - 1 || close < open {
        bail!("malformed prior spec '{spec}'");
    }
    let name = &spec[..open];
    let args = spec[open + 1..close]
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number in '{spec}'")))
        .collect::<Result<Vec<f64>>>()?;
    Ok((name, args))
}

fn load_tabulated(path: &Path) -> Result<PriorShape> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read tabulated shape {}", path.display()))?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // tolerate a textual header row
        if i == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 2 {
            bail!("tabulated shape rows need exactly two columns (x,density)");
        }
        let x: f64 = record[0].parse().context("bad x value in tabulated shape")?;
        let d: f64 = record[1].parse().context("bad density value in tabulated shape")?;
        points.push((x, d));
    }
    PriorShape::tabulated_normalized(points)
        .map_err(|e| anyhow::anyhow!("invalid tabulated shape {}: {e}", path.display()))
}
