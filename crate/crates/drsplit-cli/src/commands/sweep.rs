//! `drsplit sweep-gamma` — minimize the skew contraction rate
//! `γ ↦ rate(γβ, γμ)` over the step length and print the minimizer,
//! the rate there, and (at beta = mu = 1) the stationarity-quintic
//! residual of the reported minimizer.

use clap::Args;
use drsplit::rates::{optimal_gamma, rate_skew_strong, step_length_quintic_residual};

use crate::errors::CliError;
use crate::numfmt::fmt17;

#[derive(Args)]
pub struct SweepArgs {
    /// Lipschitz constant of the skew part.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Strong-monotonicity modulus of the other operator.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Absolute accuracy requested for the minimizing gamma.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Recorded for symmetry with the other subcommands; the sweep is
    /// deterministic and consumes no randomness.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let sweep = optimal_gamma(args.beta, args.mu, args.tol)
        .map_err(|e| CliError::Usage(format!("sweep-gamma: {e}")))?;
    let rate_at_one = rate_skew_strong(args.beta, args.mu, 1.0)
        .map_err(|e| CliError::Usage(format!("sweep-gamma: {e}")))?
        .value;

    println!("gamma_star={}", fmt17(sweep.gamma_star));
    println!("rate_at_star={}", fmt17(sweep.rate_at_star));
    println!("rate_at_one={}", fmt17(rate_at_one));
    println!(
        "bracket=[{},{}]",
        fmt17(sweep.bracket.0),
        fmt17(sweep.bracket.1)
    );
    println!("evaluations={}", sweep.evaluations);
    if args.beta == 1.0 && args.mu == 1.0 {
        // At beta = mu = 1 the stationary step lengths of the rate curve
        // are roots of a quintic; report how close the minimizer is to one.
        println!(
            "quintic_residual={}",
            fmt17(step_length_quintic_residual(sweep.gamma_star))
        );
    }
    Ok(())
}
