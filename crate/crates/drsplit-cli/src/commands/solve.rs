//! `drsplit solve` — solve `min_x f(x) + g(Lx)` for quadratic `f`, `g` by
//! product-space Douglas–Rachford, writing a solution JSON, an iteration
//! trace CSV, and a run manifest.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use drsplit::engine::{estimate_rate, DRConfig, IterationTrace, Order};
use drsplit::primal_dual::{self, CompositeProblem, ProblemJson, SolutionJson};
use drsplit::Vector;

use crate::errors::CliError;
use crate::manifest::{manifest_path_for, RunManifest};
use crate::numfmt::fmt17;

#[derive(Args)]
pub struct SolveArgs {
    /// Path to the problem JSON: {"P": [[..]], "q": [..], "S": [[..]],
    /// "t": [..], "L": [[..]]}.
    #[arg(long)]
    pub problem: PathBuf,
    /// Which resolvent is applied first inside each iteration.
    #[arg(long, value_enum, default_value_t = OrderArg::Ba)]
    pub order: OrderArg,
    /// Step length gamma > 0.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Relative stopping tolerance on the step norm.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration cap; hitting it exits with code 3 after writing outputs.
    #[arg(long = "max-iter", default_value_t = 100_000)]
    pub max_iter: usize,
    /// Solution JSON path; the trace CSV and manifest are written next to
    /// it with extensions `trace.csv` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Recorded in the run manifest; the solve itself is deterministic
    /// (it starts from the zero vector) and consumes no randomness.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    /// Resolvent of the Lipschitz block first, strongly monotone second.
    Ba,
    /// Swapped order.
    Ab,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::Ba => Order::BAfterA,
            OrderArg::Ab => Order::AAfterB,
        }
    }
}

pub fn run(args: SolveArgs) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(&args.problem).map_err(|e| CliError::io(&args.problem, e))?;
    let dto: ProblemJson = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("{}: malformed problem JSON: {e}", args.problem.display()))
    })?;
    let problem = CompositeProblem::try_from(&dto).map_err(|e| {
        CliError::Usage(format!("{}: invalid problem: {e}", args.problem.display()))
    })?;

    let mut cfg = DRConfig::new(
        args.order.into(),
        args.gamma,
        Vector::zeros(problem.nx() + problem.ny()),
    );
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    let solution = primal_dual::solve(&problem, &cfg)
        .map_err(|e| CliError::Usage(format!("solve failed: {e}")))?;

    // All outputs are written before the convergence status is acted on,
    // so a non-converged run still leaves its partial results on disk.
    let trace_path = args.out.with_extension("trace.csv");
    let sol_json = SolutionJson::from(&solution);
    let mut body = serde_json::to_string_pretty(&sol_json)
        .map_err(|e| CliError::Io(format!("solution serialization: {e}")))?;
    body.push('\n');
    std::fs::write(&args.out, body).map_err(|e| CliError::io(&args.out, e))?;
    write_trace_csv(&trace_path, &solution.trace)?;

    let mut manifest = RunManifest::new("solve", args.seed);
    manifest.param("problem", args.problem.display().to_string());
    manifest.param(
        "order",
        match args.order {
            OrderArg::Ba => "ba",
            OrderArg::Ab => "ab",
        },
    );
    manifest.param("gamma", args.gamma);
    manifest.param("tol", args.tol);
    manifest.param("max_iter", args.max_iter as u64);
    manifest.record_output(&args.out);
    manifest.record_output(&trace_path);
    let manifest_path = manifest_path_for(&args.out);
    manifest.write(&manifest_path)?;

    println!("rate_bound={}", fmt17(solution.rate_bound));
    match estimate_rate(&solution.trace, 0.5) {
        Ok(fit) => println!("r_emp={}", fmt17(fit.r_emp)),
        Err(e) => println!("r_emp=unavailable ({e})"),
    }
    println!("iterations={}", solution.trace.iterations_used);
    println!("kkt_residual={}", fmt17(solution.kkt_residual));
    println!("converged={}", solution.trace.converged);
    println!(
        "wrote {} and {} (manifest: {})",
        args.out.display(),
        trace_path.display(),
        manifest_path.display()
    );

    if !solution.trace.converged {
        return Err(CliError::NonConvergence(format!(
            "stopping test not met within {} iterations (last step norm {:e}); \
             partial outputs were written",
            cfg.max_iter,
            solution.trace.step_norms.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Trace CSV: one row per iteration with the step norm. The shadow
/// residual column equals the step norm by the update identity
/// `x⁺ − x = u − z` (the step IS the gap between the two resolvent
/// outputs, i.e. the scaled inclusion residual), so the trace stores it
/// once and the export writes it to both columns.
fn write_trace_csv(path: &Path, trace: &IterationTrace) -> Result<(), CliError> {
    let mut body = String::from("iter,step_norm,shadow_residual\n");
    for (i, &s) in trace.step_norms.iter().enumerate() {
        let v = fmt17(s);
        body.push_str(&format!("{i},{v},{v}\n"));
    }
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}
