//! Run configuration files.
//!
//! ```toml
//! [function]
//! expr = "exp(alpha*s)*(sin(s/3)+cos(s))"
//! [function.params]
//! alpha = 0.5
//!
//! [[operator]]
//! kind = "shifted_bessel"
//! alpha = 0.5
//!
//! [[operator]]
//! kind = "custom"
//! subdiag = [0.5]
//! bands = [[0.0], [1.0, 0.5]]
//! C = 2.0
//!
//! [run]
//! s = [1.0, 10.0]
//! n_max = 40
//! weights = "ones"      # or "factorial", "geometric:0.5"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use neumann_core::bounds::WeightSequence;
use neumann_core::exprlang::{self, Expr, Params};
use neumann_core::operator::DiagonalSequence;
use neumann_core::pipeline::RunOptions;
use neumann_core::HessenbergOperator;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    function: RawFunction,
    #[serde(default, rename = "operator")]
    operators: Vec<RawOperator>,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    expr: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    kind: String,
    alpha: Option<f64>,
    subdiag: Option<Vec<f64>>,
    bands: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    c: Option<f64>,
    name: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    s: Option<Vec<f64>>,
    n_max: Option<usize>,
    pad: Option<usize>,
    tolerance: Option<f64>,
    weights: Option<String>,
}

#[derive(Debug, Clone)]
pub struct NamedOperator {
    pub label: String,
    pub op: HessenbergOperator,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub expr: Expr,
    pub params: Params,
    pub operators: Vec<NamedOperator>,
    pub s_values: Vec<f64>,
    /// `None` means pick per `s`.
    pub n_max: Option<usize>,
    pub options: RunOptions,
}

pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str) -> anyhow::Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text)?;

    let expr = exprlang::parse(&raw.function.expr)?;
    let params: Params = raw.function.params.into_iter().collect();
    let missing: Vec<String> = expr.parameters().into_iter().filter(|p| !params.contains_key(p)).collect();
    if !missing.is_empty() {
        bail!("parameters without a value in [function.params]: {}", missing.join(", "));
    }

    if raw.operators.is_empty() {
        bail!("at least one [[operator]] section is required");
    }
    let operators = raw.operators.into_iter().map(build_operator).collect::<anyhow::Result<Vec<_>>>()?;

    let s_values = raw.run.s.unwrap_or_else(|| vec![1.0]);
    if s_values.is_empty() || s_values.iter().any(|s| !s.is_finite()) {
        bail!("[run] s must be a non-empty list of finite numbers");
    }
    if raw.run.n_max == Some(0) {
        bail!("[run] n_max must be positive");
    }

    let mut options = RunOptions { pad: raw.run.pad, ..RunOptions::default() };
    if let Some(tol) = raw.run.tolerance {
        if !(tol > 0.0) {
            bail!("[run] tolerance must be positive");
        }
        options.pad_tolerance = tol;
    }
    if let Some(w) = raw.run.weights {
        options.weights = parse_weights(&w)?;
    }

    Ok(RunConfig { expr, params, operators, s_values, n_max: raw.run.n_max, options })
}

pub fn parse_weights(text: &str) -> anyhow::Result<WeightSequence> {
    match text.trim() {
        "ones" => Ok(WeightSequence::Ones),
        "factorial" => Ok(WeightSequence::Factorial),
        other => match other.strip_prefix("geometric:") {
            Some(r) => {
                let r: f64 = r.trim().parse().with_context(|| format!("bad geometric ratio `{r}`"))?;
                Ok(WeightSequence::geometric(r)?)
            }
            None => bail!("unknown weights `{other}` (expected ones, factorial or geometric:<r>)"),
        },
    }
}

fn build_operator(raw: RawOperator) -> anyhow::Result<NamedOperator> {
    let op = if raw.kind == "custom" {
        if raw.alpha.is_some() {
            bail!("custom operator does not take alpha");
        }
        let Some(subdiag) = raw.subdiag else { bail!("custom operator needs `subdiag`") };
        let Some(c) = raw.c else { bail!("custom operator needs `C`") };
        let bands = raw.bands.unwrap_or_default().into_iter().map(DiagonalSequence::new).collect();
        // numerical errors (zero subdiagonal) pass through unwrapped for the exit code
        HessenbergOperator::custom(DiagonalSequence::new(subdiag), bands, c)?
    } else {
        if raw.subdiag.is_some() || raw.bands.is_some() || raw.c.is_some() {
            bail!("`subdiag`, `bands` and `C` only apply to custom operators");
        }
        HessenbergOperator::from_name(&raw.kind, raw.alpha)?
    };
    let label = raw.name.unwrap_or_else(|| op.to_string());
    Ok(NamedOperator { label, op })
}
