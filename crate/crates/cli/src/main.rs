//! `bethe`: a verification harness and small calculator for Bethe state
//! scalar products. `verify` and `report` run seeded defect checks against
//! brute-force oracles; `scalar-product`, `bae`, and `norm` compute single
//! quantities both ways and print the cross-check.
//!
//! Exit codes: 0 when every executed check passes, 1 when one fails or a
//! calculation breaks down, 2 for configuration and usage errors.

mod checks;
mod config;
mod report;

use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use num_complex::Complex64;

use bethe_core::determinant::{
    gaudin_norm, scalar_product_sum, slavnov_determinant, ScalarProductSpec,
};
use bethe_core::error::Error;
use bethe_core::model::{model_a_fn, ModelParams, Variant};
use bethe_core::oracle::{
    all_bethe_roots, brute_force_norm, brute_force_scalar_product, solve_bae_multistart,
};
use bethe_core::sampling::ParameterSampler;

use checks::{regular_count, rel_err, CheckOutcome, Status};
use config::{fmt_complex, CommonArgs, FormatArg, ResolvedConfig};

const SOLVE_ATTEMPTS: usize = 40;
const SOLVE_MAX_ITER: usize = 60;
const SOLVE_TOL: f64 = 1e-11;

/// Substream id of the demo subcommand draws, distinct from every check.
const DEMO_STREAM: u64 = 0x5CA1;

#[derive(Parser)]
#[command(
    name = "bethe",
    version,
    about = "Scalar products of Bethe states: verification checks and demos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Run the verification checks and print one line per check
    Verify(CommonArgs),
    /// Run the verification checks and emit a machine-readable report
    Report(CommonArgs),
    /// One scalar product, brute force against the closed forms
    ScalarProduct(CommonArgs),
    /// Solve the Bethe equations at the configured filling
    Bae(CommonArgs),
    /// Norm of a Bethe state, Gaudin determinant against the oracle
    Norm(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Verify(a)
        | Command::Report(a)
        | Command::ScalarProduct(a)
        | Command::Bae(a)
        | Command::Norm(a) => a,
    };
    let cfg = match config::resolve(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let run = match cli.command {
        Command::Verify(_) => cmd_verify(&cfg),
        Command::Report(_) => cmd_report(&cfg),
        Command::ScalarProduct(_) => finish_demo(demo_scalar_product(&cfg)),
        Command::Bae(_) => finish_demo(demo_bae(&cfg)),
        Command::Norm(_) => finish_demo(demo_norm(&cfg)),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run_suite(cfg: &ResolvedConfig) -> anyhow::Result<Vec<CheckOutcome>> {
    checks::run_suite(cfg).map_err(|e| anyhow::anyhow!("cannot build the model: {e}"))
}

fn exit_for(outcomes: &[CheckOutcome]) -> ExitCode {
    if outcomes.iter().any(|o| o.status == Status::Fail) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_report(
    cfg: &ResolvedConfig,
    outcomes: Vec<CheckOutcome>,
    to_stdout: bool,
) -> anyhow::Result<()> {
    let report = report::assemble(cfg, outcomes);
    let text = match cfg.format {
        FormatArg::Json => report::to_json(&report),
        FormatArg::Tsv => report::to_tsv(&report),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None if to_stdout => print!("{text}"),
        None => {}
    }
    Ok(())
}

fn cmd_verify(cfg: &ResolvedConfig) -> anyhow::Result<ExitCode> {
    let outcomes = run_suite(cfg)?;
    for o in &outcomes {
        let tail = if o.status.executed() {
            format!("{} ({} ms)", o.detail, o.wall_ms)
        } else {
            o.detail.clone()
        };
        println!("check {:<17} {:<16} {tail}", o.name, o.status.as_str());
    }
    let s = report::summarize(&outcomes);
    println!(
        "summary: {} checks, {} passed, {} failed, {} skipped",
        s.total, s.passed, s.failed, s.skipped
    );
    let code = exit_for(&outcomes);
    emit_report(cfg, outcomes, false)?;
    Ok(code)
}

fn cmd_report(cfg: &ResolvedConfig) -> anyhow::Result<ExitCode> {
    let outcomes = run_suite(cfg)?;
    let code = exit_for(&outcomes);
    emit_report(cfg, outcomes, true)?;
    Ok(code)
}

/// Demo subcommands distinguish setup problems from numerical breakdowns:
/// size caps and unusable configurations are usage errors (exit 2), a
/// calculation that fails on valid inputs exits 1.
fn finish_demo(result: anyhow::Result<Result<(), Error>>) -> anyhow::Result<ExitCode> {
    match result? {
        Ok(()) => Ok(ExitCode::SUCCESS),
        Err(e @ Error::CapExceeded { .. }) => Err(anyhow::anyhow!(e)),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn demo_model(cfg: &ResolvedConfig) -> anyhow::Result<ModelParams> {
    if cfg.sites > cfg.cap_sites() {
        anyhow::bail!(
            "sites {} exceeds the oracle cap {} (raise with --unsafe-caps)",
            cfg.sites,
            cfg.cap_sites()
        );
    }
    let model = cfg
        .build_model()
        .map_err(|e| anyhow::anyhow!("cannot build the model: {e}"))?;
    println!(
        "model: {} chain of {} sites, eta {}, xi {}, seed {}",
        cfg.variant.label(),
        cfg.sites,
        fmt_complex(cfg.eta_c()),
        cfg.xi.label(),
        cfg.seed
    );
    Ok(model)
}

fn fmt_value(z: Complex64) -> String {
    format!("{:.9e} {:+.9e}i", z.re, z.im)
}

fn demo_scalar_product(cfg: &ResolvedConfig) -> anyhow::Result<Result<(), Error>> {
    let model = demo_model(cfg)?;
    let eta = cfg.eta_c();
    let m = cfg.magnons;
    if m == 0 {
        println!("zero magnons: the scalar product of empty strings is 1");
        return Ok(Ok(()));
    }
    let mut s = ParameterSampler::substream(cfg.seed, DEMO_STREAM);
    let rational = cfg.variant_core() == Variant::Rational;
    let solved = if rational && 2 * m <= cfg.sites {
        solve_bae_multistart(
            &model,
            m,
            s.random_u64(),
            SOLVE_ATTEMPTS,
            SOLVE_MAX_ITER,
            SOLVE_TOL,
        )
        .ok()
    } else {
        None
    };
    let mut body = || -> Result<(), Error> {
        match &solved {
            Some(roots) => {
                let ts = roots.roots().to_vec();
                println!("Bethe roots (M = {m}, residual {:.2e}):", roots.residual());
                for r in &ts {
                    println!("  {}", fmt_value(*r));
                }
                let mut existing = model.xi().to_vec();
                existing.extend_from_slice(&ts);
                let lambdas = s.separated_points(m, &existing, Variant::Rational, eta)?;
                println!("conjugate parameters:");
                for l in &lambdas {
                    println!("  {}", fmt_value(*l));
                }
                let a = model_a_fn(&model);
                let brute = brute_force_scalar_product(&model, &lambdas, &ts)?;
                let det = slavnov_determinant(&lambdas, &ts, eta, &a)?;
                println!("brute force    {}", fmt_value(brute));
                println!(
                    "determinant    {}  (condition hint {:.1e})",
                    fmt_value(det.value),
                    det.condition_hint
                );
                println!("det vs brute   {:.2e}", rel_err(det.value, brute));
                if m <= cfg.cap_magnons() {
                    let spec = ScalarProductSpec::new(lambdas.clone(), ts.clone())?
                        .with_subset_cap(cfg.cap_magnons());
                    let sum = scalar_product_sum(&spec, eta, &a)?;
                    println!("partition sum  {}", fmt_value(sum));
                    println!("sum vs brute   {:.2e}", rel_err(sum, brute));
                }
            }
            None => {
                if rational {
                    println!(
                        "no regular Bethe root set reachable at this filling; \
                         using arbitrary creation parameters"
                    );
                } else {
                    println!("using arbitrary creation parameters");
                }
                let pts = s.separated_points(2 * m, model.xi(), cfg.variant_core(), eta)?;
                let (lambdas, ts) = (pts[..m].to_vec(), pts[m..].to_vec());
                let brute = brute_force_scalar_product(&model, &lambdas, &ts)?;
                println!("brute force    {}", fmt_value(brute));
                if rational && m <= cfg.cap_magnons() {
                    let spec =
                        ScalarProductSpec::new(lambdas, ts)?.with_subset_cap(cfg.cap_magnons());
                    let sum = scalar_product_sum(&spec, eta, model_a_fn(&model))?;
                    println!("partition sum  {}", fmt_value(sum));
                    println!("sum vs brute   {:.2e}", rel_err(sum, brute));
                } else if !rational {
                    println!("closed forms cover the rational variant only");
                }
            }
        }
        Ok(())
    };
    Ok(body())
}

fn demo_bae(cfg: &ResolvedConfig) -> anyhow::Result<Result<(), Error>> {
    let model = demo_model(cfg)?;
    let m = cfg.magnons;
    let mut s = ParameterSampler::substream(cfg.seed, DEMO_STREAM);
    let mut body = || -> Result<(), Error> {
        match cfg.variant_core() {
            Variant::Rational => {
                let sets = all_bethe_roots(&model, m, s.random_u64(), SOLVE_MAX_ITER, SOLVE_TOL)?;
                println!(
                    "{} regular root sets in sector M = {m} (counting bound {})",
                    sets.len(),
                    regular_count(cfg.sites, m)
                );
                for (i, sol) in sets.iter().enumerate() {
                    println!("set {i} (residual {:.2e}):", sol.residual());
                    for r in sol.roots() {
                        println!("  {}", fmt_value(*r));
                    }
                }
            }
            Variant::Trigonometric => {
                let roots = solve_bae_multistart(
                    &model,
                    m,
                    s.random_u64(),
                    SOLVE_ATTEMPTS,
                    SOLVE_MAX_ITER,
                    SOLVE_TOL,
                )?;
                println!("one root set (residual {:.2e}):", roots.residual());
                for r in roots.roots() {
                    println!("  {}", fmt_value(*r));
                }
            }
        }
        Ok(())
    };
    Ok(body())
}

fn demo_norm(cfg: &ResolvedConfig) -> anyhow::Result<Result<(), Error>> {
    if cfg.variant_core() != Variant::Rational {
        anyhow::bail!("the norm determinant covers the rational variant only");
    }
    if 2 * cfg.magnons > cfg.sites {
        anyhow::bail!(
            "no regular Bethe root sets above half filling (sites {}, magnons {})",
            cfg.sites,
            cfg.magnons
        );
    }
    let model = demo_model(cfg)?;
    let m = cfg.magnons;
    let mut s = ParameterSampler::substream(cfg.seed, DEMO_STREAM);
    let mut body = || -> Result<(), Error> {
        let roots = solve_bae_multistart(
            &model,
            m,
            s.random_u64(),
            SOLVE_ATTEMPTS,
            SOLVE_MAX_ITER,
            SOLVE_TOL,
        )?;
        println!("Bethe roots (M = {m}, residual {:.2e}):", roots.residual());
        for r in roots.roots() {
            println!("  {}", fmt_value(*r));
        }
        let closed = gaudin_norm(&roots)?;
        let brute = brute_force_norm(&roots)?;
        println!(
            "determinant     {}  (condition hint {:.1e})",
            fmt_value(closed.value),
            closed.condition_hint
        );
        println!("brute force     {}", fmt_value(brute));
        println!("relative defect {:.2e}", rel_err(closed.value, brute));
        Ok(())
    };
    Ok(body())
}
