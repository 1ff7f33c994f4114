//! Command line and the run configuration echoed into JSON output.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plancherel::verify::Suite;
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "plancherel", version, about = "Kernels, Fredholm determinants and samplers for the Plancherel measure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a kernel at (x, y), or at each x in --points.
    Kernel,
    /// Correlation function ρ(X) for X = --points, exact at --n or poissonized at --theta.
    Corr,
    /// Gap probability M^θ(λ_1 ≤ s), or F_2(s) without --theta.
    Gap,
    /// Joint law of descent counts on intervals cut at the --a thresholds.
    Counts,
    /// M(λ_i < x_i) for thresholds x = --points, at --n or --theta.
    EdgeCdf,
    /// Draw partitions from M_n (--n) or the poissonized measure (--theta).
    Sample,
    /// Limit shape Ω and density at --points, with an empirical profile when --n is set.
    Shape,
    /// Recover b_n from the poissonized coefficients in --points by contour integration.
    Depoissonize,
    /// Run a verification suite and emit a JSON report.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Reduced grids and sample counts.
        #[arg(long)]
        fast: bool,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| "expected one of exact, kernels, fredholm, bulk, edge, sampling, all".to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum Family {
    J,
    K,
    L,
    /// Discrete sine kernel S(x, a) with a = first --a value.
    S,
    /// Diagonal kernel on half-integers.
    D,
    /// Airy kernel.
    A,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Options {
    #[arg(long, global = true, value_enum, ignore_case = true)]
    pub family: Option<Family>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Comma-separated list.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<f64>>,
    /// Comma-separated thresholds; `inf` closes the last interval as a ray.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub eps: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Worker threads; 0 or unset means available parallelism. Not echoed:
    /// output must not depend on it.
    #[arg(long, global = true, env = "PLANCHEREL_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Everything that determines the output, echoed as JSON `meta`.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a> {
    pub subcommand: &'a Command,
    #[serde(flatten)]
    pub opts: &'a Options,
}
