//! `drsplit rates` — tabulate the closed-form contraction factors over
//! (beta, mu) grids, as CSV or JSON rows `case,beta,mu,gamma,rate`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use drsplit::rates::{
    rate_case_a, rate_case_b, rate_case_c, rate_lip_strong, rate_skew_strong, RateError,
    RateReport,
};

use crate::errors::CliError;
use crate::manifest::{manifest_path_for, RunManifest};
use crate::numfmt::fmt17;

#[derive(Args)]
pub struct RatesArgs {
    /// Rate case(s) to tabulate; repeat the flag to select several.
    /// Defaults to all five.
    #[arg(long = "case", value_enum)]
    pub cases: Vec<CaseArg>,
    /// Grid for beta: a single value `1`, a list `0.2,1,5`, or a range
    /// `lo:hi:count`. Omitted: sweeps 0..5 against the mu defaults.
    #[arg(long)]
    pub beta: Option<String>,
    /// Grid for mu; same syntax as --beta.
    #[arg(long)]
    pub mu: Option<String>,
    /// Step length the rates are evaluated at.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Output table path; a run manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Output format for the table.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Recorded in the run manifest; this command is deterministic and does
    /// not consume randomness.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    /// Cocoercive A, strongly monotone B.
    A,
    /// A both cocoercive and strongly monotone.
    B,
    /// A both Lipschitz and strongly monotone.
    C,
    /// Lipschitz monotone A, strongly monotone B (main two-stage bound).
    Lip,
    /// Skew Lipschitz A, strongly monotone B.
    Skew,
}

impl CaseArg {
    const ALL: [CaseArg; 5] = [
        CaseArg::A,
        CaseArg::B,
        CaseArg::C,
        CaseArg::Lip,
        CaseArg::Skew,
    ];

    fn label(self) -> &'static str {
        match self {
            CaseArg::A => "a",
            CaseArg::B => "b",
            CaseArg::C => "c",
            CaseArg::Lip => "lip",
            CaseArg::Skew => "skew",
        }
    }

    fn evaluate(self, beta: f64, mu: f64, gamma: f64) -> Result<RateReport, RateError> {
        match self {
            CaseArg::A => rate_case_a(mu, beta, gamma),
            CaseArg::B => rate_case_b(mu, beta, gamma),
            CaseArg::C => rate_case_c(mu, beta, gamma),
            CaseArg::Lip => rate_lip_strong(beta, mu, gamma),
            CaseArg::Skew => rate_skew_strong(beta, mu, gamma),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

struct Row {
    case: &'static str,
    beta: f64,
    mu: f64,
    gamma: f64,
    rate: f64,
}

pub fn run(args: RatesArgs) -> Result<(), CliError> {
    if !(args.gamma.is_finite() && args.gamma > 0.0) {
        return Err(CliError::Usage(format!(
            "--gamma must be a positive finite number, got {}",
            args.gamma
        )));
    }
    let cases: &[CaseArg] = if args.cases.is_empty() {
        &CaseArg::ALL
    } else {
        &args.cases
    };

    let rows = build_rows(cases, args.beta.as_deref(), args.mu.as_deref(), args.gamma)?;
    if rows.is_empty() {
        return Err(CliError::Usage(
            "the requested grids produced no rows inside any rate's domain".to_string(),
        ));
    }

    let body = match args.format {
        FormatArg::Csv => render_csv(&rows),
        FormatArg::Json => render_json(&rows),
    };
    std::fs::write(&args.out, body).map_err(|e| CliError::io(&args.out, e))?;

    let mut manifest = RunManifest::new("rates", args.seed);
    manifest.param(
        "cases",
        cases.iter().map(|c| c.label()).collect::<Vec<_>>(),
    );
    manifest.param(
        "beta",
        args.beta.clone().unwrap_or_else(|| "default".to_string()),
    );
    manifest.param(
        "mu",
        args.mu.clone().unwrap_or_else(|| "default".to_string()),
    );
    manifest.param("gamma", args.gamma);
    manifest.param(
        "format",
        match args.format {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        },
    );
    manifest.record_output(&args.out);
    let manifest_path = manifest_path_for(&args.out);
    manifest.write(&manifest_path)?;

    println!(
        "wrote {} rows to {} (manifest: {})",
        rows.len(),
        args.out.display(),
        manifest_path.display()
    );
    Ok(())
}

/// Builds the table rows in a fixed deterministic order: cases in their
/// declaration order, then the generated (beta, mu) pairs. Parameter pairs
/// outside a case's domain (e.g. beta < mu for the classical cases, or a
/// zero endpoint of a sweep) are skipped rather than reported as errors.
fn build_rows(
    cases: &[CaseArg],
    beta_spec: Option<&str>,
    mu_spec: Option<&str>,
    gamma: f64,
) -> Result<Vec<Row>, CliError> {
    let pairs = build_pairs(beta_spec, mu_spec)?;
    let mut rows = Vec::new();
    for &case in cases {
        for &(beta, mu) in &pairs {
            if let Ok(report) = case.evaluate(beta, mu, gamma) {
                rows.push(Row {
                    case: case.label(),
                    beta,
                    mu,
                    gamma,
                    rate: report.value,
                });
            }
        }
    }
    Ok(rows)
}

/// The default axis values a grid is pinned at when only the other axis
/// sweeps, and the default sweep: 0 to 5 in steps of 0.1.
const DEFAULT_PINS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];

fn default_sweep() -> Vec<f64> {
    (0..=50).map(|i| f64::from(i) * 0.1).collect()
}

fn build_pairs(
    beta_spec: Option<&str>,
    mu_spec: Option<&str>,
) -> Result<Vec<(f64, f64)>, CliError> {
    let mut pairs = Vec::new();
    match (beta_spec, mu_spec) {
        (Some(b), Some(m)) => {
            for &beta in &parse_grid(b, "--beta")? {
                for &mu in &parse_grid(m, "--mu")? {
                    pairs.push((beta, mu));
                }
            }
        }
        (Some(b), None) => {
            for &beta in &parse_grid(b, "--beta")? {
                for mu in default_sweep() {
                    pairs.push((beta, mu));
                }
            }
        }
        (None, Some(m)) => {
            for &mu in &parse_grid(m, "--mu")? {
                for beta in default_sweep() {
                    pairs.push((beta, mu));
                }
            }
        }
        (None, None) => {
            // Both directions: each pinned beta against a mu sweep, then
            // each pinned mu against a beta sweep.
            for &beta in &DEFAULT_PINS {
                for mu in default_sweep() {
                    pairs.push((beta, mu));
                }
            }
            for &mu in &DEFAULT_PINS {
                for beta in default_sweep() {
                    pairs.push((beta, mu));
                }
            }
        }
    }
    Ok(pairs)
}

/// Grid syntax: `1` (single value), `0.2,0.5,1` (list), `0.1:10:50`
/// (inclusive linear range with the given point count).
fn parse_grid(spec: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("{flag}: {msg}"));
    let parse_one = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{s}` is not a number")))?;
        if !v.is_finite() {
            return Err(bad(format!("`{s}` is not finite")));
        }
        Ok(v)
    };

    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!(
                "range syntax is lo:hi:count, got `{spec}`"
            )));
        }
        let lo = parse_one(parts[0])?;
        let hi = parse_one(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a point count", parts[2])))?;
        if count < 2 {
            return Err(bad("range needs at least 2 points".to_string()));
        }
        if hi <= lo {
            return Err(bad(format!("range needs hi > lo, got {lo}:{hi}")));
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count).map(|i| lo + step * i as f64).collect());
    }
    spec.split(',').map(parse_one).collect()
}

fn render_csv(rows: &[Row]) -> String {
    let mut body = String::from("case,beta,mu,gamma,rate\n");
    for row in rows {
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            row.case,
            fmt17(row.beta),
            fmt17(row.mu),
            fmt17(row.gamma),
            fmt17(row.rate)
        ));
    }
    body
}

fn render_json(rows: &[Row]) -> String {
    let items: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "case": row.case,
                "beta": row.beta,
                "mu": row.mu,
                "gamma": row.gamma,
                "rate": row.rate,
            })
        })
        .collect();
    let mut body = serde_json::to_string_pretty(&items).expect("plain JSON values");
    body.push('\n');
    body
}
