//! `neumann`: expansions, sweeps, basis tables and bounds from the command line.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical failure.

mod config;
mod output;
mod selftest;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use neumann_core::basis::{basis_error_bound, eval_basis, eval_basis_auto};
use neumann_core::bounds::{element_tail_profile, TailWeighting};
use neumann_core::pipeline::{convergence_sweep, default_n_max, run_expansion, ExpansionRun};
use neumann_core::HessenbergOperator;

use crate::config::RunConfig;
use crate::output::{real, Table};

#[derive(Parser)]
#[command(name = "neumann", version, about = "Generalized Bessel-Neumann expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand with the first operator at the first s; print W_n and the errors.
    Expand {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every operator at every s; relative error per n.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot of rel_error against n.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Tabulate φ_0(t) … φ_{n-1}(t).
    Basis {
        #[arg(long)]
        operator: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Default: smallest padding that brings the basis error bound below 1e-13.
        #[arg(long)]
        pad: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncation-error bounds per n.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in identity suites.
    Selftest,
}

/// Failure already reported to stderr; carries only the exit code.
#[derive(Debug)]
struct Reported(u8);

impl fmt::Display for Reported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "failed")
    }
}

impl std::error::Error for Reported {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(r) = cause.downcast_ref::<Reported>() {
            return r.0;
        }
        if let Some(e) = cause.downcast_ref::<neumann_core::Error>() {
            return if e.is_numerical() { 2 } else { 1 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Expand { config, out } => expand(&config, out.as_deref()),
        Command::Sweep { config, out, plot } => sweep(&config, out.as_deref(), plot.as_deref()),
        Command::Basis { operator, alpha, n, t, pad, out } => basis(&operator, alpha, n, t, pad, out.as_deref()),
        Command::Bounds { config, out } => bounds(&config, out.as_deref()),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if err.downcast_ref::<Reported>().is_none() {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

fn n_max_for(cfg: &RunConfig, s: f64) -> usize {
    cfg.n_max.unwrap_or_else(|| default_n_max(s))
}

fn warn_conditioning(run: &ExpansionRun) {
    if run.coefficients.is_ill_conditioned() {
        eprintln!(
            "warning: {} at s = {}: Krylov condition estimate {:.3e}, residual {:.3e}",
            run.operator, run.s, run.coefficients.condition_estimate, run.coefficients.residual
        );
    }
    if let Some(r) = run.records.iter().find(|r| !r.theorem1_converged) {
        eprintln!(
            "warning: {} at s = {}: weighted bound not converged in N = {} from n = {}",
            run.operator, run.s, run.bound_dimension, r.n
        );
    }
}

fn expand(path: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let cfg = config::load(path)?;
    let named = &cfg.operators[0];
    let s = cfg.s_values[0];
    if cfg.operators.len() > 1 || cfg.s_values.len() > 1 {
        eprintln!("note: expand uses the first operator and the first s; see `sweep` for all");
    }
    let n_max = n_max_for(&cfg, s);
    let run = run_expansion(&cfg.expr, &cfg.params, &named.op, n_max, s, &cfg.options)?;
    warn_conditioning(&run);

    println!("g(s)      = {}", cfg.expr);
    println!("operator  = {}", named.label);
    println!("s         = {s}");
    println!("n_max     = {n_max}");
    println!("pad       = {}", run.pad_used);
    println!("g_ref     = {}", real(run.g_reference));
    println!("residual  = {:.3e}", run.coefficients.residual);
    println!("condition = {:.3e}", run.coefficients.condition_estimate);
    println!();
    println!("{:>4}  {:>24}  {:>24}  {:>10}  {:>10}  {:>10}", "n", "w_{n-1}", "partial_sum", "rel_error", "simple", "theorem1");
    for (r, w) in run.records.iter().zip(&run.coefficients.values) {
        println!(
            "{:>4}  {:>24}  {:>24}  {:>10.3e}  {:>10.3e}  {:>10.3e}",
            r.n,
            real(*w),
            real(r.partial_sum),
            r.rel_error,
            r.bound_simple,
            r.bound_theorem1
        );
    }

    if let Some(out) = out {
        let mut table = Table::new(&[
            "operator",
            "s",
            "n",
            "w",
            "phi",
            "partial_sum",
            "abs_error",
            "rel_error",
            "bound_simple",
            "bound_theorem1",
        ])?;
        for (k, r) in run.records.iter().enumerate() {
            table.row([
                named.label.clone(),
                real(s),
                r.n.to_string(),
                real(run.coefficients.values[k]),
                real(run.basis_values[k]),
                real(r.partial_sum),
                real(r.abs_error),
                real(r.rel_error),
                real(r.bound_simple),
                real(r.bound_theorem1),
            ])?;
        }
        table.finish(Some(out))?;
    }
    Ok(())
}

fn sweep(path: &Path, out: Option<&Path>, plot: Option<&Path>) -> anyhow::Result<()> {
    let cfg = config::load(path)?;
    let ops: Vec<HessenbergOperator> = cfg.operators.iter().map(|o| o.op.clone()).collect();
    let cells = convergence_sweep(&cfg.expr, &cfg.params, &ops, &cfg.s_values, cfg.n_max, &cfg.options);

    let mut table = Table::new(&["operator", "s", "n", "abs_error", "rel_error", "bound_simple", "bound_theorem1"])?;
    let mut worst = 0u8;
    for cell in &cells {
        let label = &cfg.operators[cell.operator_index].label;
        match &cell.result {
            Ok(run) => {
                warn_conditioning(run);
                for r in &run.records {
                    table.row([
                        label.clone(),
                        real(cell.s),
                        r.n.to_string(),
                        real(r.abs_error),
                        real(r.rel_error),
                        real(r.bound_simple),
                        real(r.bound_theorem1),
                    ])?;
                }
            }
            Err(e) => {
                eprintln!("error: {label} at s = {}: {e}", cell.s);
                worst = worst.max(if e.is_numerical() { 2 } else { 1 });
            }
        }
    }
    table.finish(out)?;

    if let Some(plot) = plot {
        let panels: Vec<svg::Panel> = cfg
            .s_values
            .iter()
            .map(|&s| svg::Panel {
                title: format!("relative error, s = {s}"),
                curves: cells
                    .iter()
                    .filter(|c| c.s.to_bits() == s.to_bits())
                    .filter_map(|c| {
                        let run = c.result.as_ref().ok()?;
                        Some(svg::Curve {
                            label: cfg.operators[c.operator_index].label.clone(),
                            points: run.records.iter().map(|r| (r.n, r.rel_error)).collect(),
                        })
                    })
                    .collect(),
            })
            .collect();
        std::fs::write(plot, svg::render(&panels)).with_context(|| format!("writing {}", plot.display()))?;
    }

    if worst > 0 {
        return Err(Reported(worst).into());
    }
    Ok(())
}

fn basis(kind: &str, alpha: Option<f64>, n: usize, t: f64, pad: Option<usize>, out: Option<&Path>) -> anyhow::Result<()> {
    let op = HessenbergOperator::from_name(kind, alpha)?;
    let (values, pad) = match pad {
        Some(p) => (eval_basis(&op, n, t, p)?, p),
        None => eval_basis_auto(&op, n, t)?,
    };
    let bound = basis_error_bound(op.norm_bound(), t, n + pad);
    let mut table = Table::new(&["ell", "t", "value", "pad", "bound"])?;
    for (ell, v) in values.iter().enumerate() {
        table.row([ell.to_string(), real(t), real(*v), pad.to_string(), real(bound)])?;
    }
    table.finish(out)
}

fn bounds(path: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let cfg = config::load(path)?;
    let mut table = Table::new(&[
        "operator",
        "n",
        "s",
        "bound_simple",
        "bound_theorem1",
        "bound_element_sum",
        "N_used",
    ])?;
    for named in &cfg.operators {
        for &s in &cfg.s_values {
            let n_max = n_max_for(&cfg, s);
            let run = run_expansion(&cfg.expr, &cfg.params, &named.op, n_max, s, &cfg.options)?;
            warn_conditioning(&run);
            let weights = &cfg.options.weights;
            let domination = weights.domination_ratio(&run.coefficients.values);
            let tails = element_tail_profile(&named.op, TailWeighting::Weighted(weights), s, n_max, run.bound_dimension)?;
            for r in &run.records {
                table.row([
                    named.label.clone(),
                    r.n.to_string(),
                    real(s),
                    real(r.bound_simple),
                    real(r.bound_theorem1),
                    real(domination * tails[r.n]),
                    run.bound_dimension.to_string(),
                ])?;
            }
        }
    }
    table.finish(out)
}

fn selftest() -> anyhow::Result<()> {
    let checks = selftest::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status}  [{}] {}  ({})", c.suite, c.identity, c.detail);
    }
    println!("{} of {} identities hold", checks.len() - failed, checks.len());
    if failed > 0 {
        eprintln!("selftest: {failed} identities violated");
        return Err(Reported(2).into());
    }
    Ok(())
}
