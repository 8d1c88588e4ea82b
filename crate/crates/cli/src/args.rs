//! Command-line arguments. Every argument struct is serializable so that the
//! report can echo its configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use polyspline_core::DEFAULT_BUDGET;
use serde::Serialize;

use crate::report::Format;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "polyspline",
    version,
    about = "Cube tests, plurality correction and extension of functions on subsets of F_q^n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; CSV is available for `sweep` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Leave the wall-clock field out of the report.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fraction of m-cubes in X on which the alternating sum of f is nonzero.
    CubeTest(CubeTestArgs),
    /// Plurality-correct f on X (or on all of V with --extend).
    Correct(CorrectArgs),
    /// Same as `correct --extend`.
    Extend(CorrectArgs),
    /// Gowers U_m norm of e(f), e(P) or of the balanced indicator of X.
    Gowers(GowersArgs),
    /// Density of X and the U_m norm of its balanced indicator.
    Uniformity(UniformityArgs),
    /// Cauchy-Schwarz complexity of a system of linear forms.
    Csc(CscArgs),
    /// Pattern count of a form system in X against delta^|I|.
    Count(CountArgs),
    /// Rank bounds for a polynomial or a family.
    Rank(RankArgs),
    /// Lines through a point of X, projective zero density and anchored counts.
    Lines(LinesArgs),
    /// Degree of f restricted to affine l-flats inside X.
    Subspace(SubspaceArgs),
    /// Recovery of a planted polynomial across noise rates.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CubeTest(_) => "cube-test",
            Command::Correct(_) => "correct",
            Command::Extend(_) => "extend",
            Command::Gowers(_) => "gowers",
            Command::Uniformity(_) => "uniformity",
            Command::Csc(_) => "csc",
            Command::Count(_) => "count",
            Command::Rank(_) => "rank",
            Command::Lines(_) => "lines",
            Command::Subspace(_) => "subspace",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct SpaceArgs {
    /// Field spec: `p`, `p^l` or `p^l/modulus`, e.g. `3` or `2^3/1011`.
    #[arg(long)]
    pub field: Option<String>,
    /// Dimension n of V = F_q^n.
    #[arg(long)]
    pub dim: Option<u32>,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct DomainArgs {
    /// Variety file (one equation per line); X defaults to all of V.
    #[arg(long)]
    pub variety: Option<PathBuf>,
    /// Inline equation, repeatable, e.g. `--eq "x1*x2 + x3*x4 = 0"`.
    #[arg(long = "eq")]
    pub equations: Vec<String>,
}

impl DomainArgs {
    pub fn is_given(&self) -> bool {
        self.variety.is_some() || !self.equations.is_empty()
    }
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct FunArgs {
    /// Function table file.
    #[arg(long)]
    pub fun: Option<PathBuf>,
    /// Planted polynomial (prime fields; values in Z/p).
    #[arg(long)]
    pub poly: Option<String>,
    /// Fraction of points of X at which the planted polynomial is corrupted.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

impl FunArgs {
    pub fn is_given(&self) -> bool {
        self.fun.is_some() || self.poly.is_some()
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Budget {
    /// Cap on elementary steps of exhaustive work; larger jobs are sampled.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Seed for every sampled quantity (required whenever something is sampled).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample count for Monte-Carlo fallbacks.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { budget: DEFAULT_BUDGET, seed: None, samples: 10_000 }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CubeTestArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub fun: FunArgs,
    #[arg(long = "m")]
    pub m: u32,
    #[command(flatten)]
    pub budget: Budget,
    /// Largest acceptable bad-cube fraction.
    #[arg(long, default_value_t = 0.0)]
    pub max_eps: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CorrectArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub fun: FunArgs,
    #[arg(long = "m")]
    pub m: u32,
    /// Completion votes per anchor.
    #[arg(long, default_value_t = polyspline_core::spline::DEFAULT_VOTES)]
    pub votes: u64,
    #[command(flatten)]
    pub budget: Budget,
    /// Correct on all of V instead of on X.
    #[arg(long)]
    pub extend: bool,
    /// Write the corrected function as a table file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include every anchor's vote tally in the report.
    #[arg(long)]
    pub tallies: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GowersArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub fun: FunArgs,
    #[arg(long = "m")]
    pub m: u32,
    #[command(flatten)]
    pub budget: Budget,
    /// Expected norm; adds a verdict `|value - expect| <= tol`.
    #[arg(long)]
    pub expect: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct UniformityArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long = "m")]
    pub m: u32,
    #[command(flatten)]
    pub budget: Budget,
    /// Adds the verdict `eta < eps`.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CscArgs {
    /// Form system file, one form per line such as `2*v1 - v3 + w1`.
    #[arg(long)]
    pub system: PathBuf,
    /// Only the form with this 1-based index.
    #[arg(long)]
    pub at: Option<usize>,
    /// Span field: `Q` (default) or a prime p.
    #[arg(long)]
    pub field: Option<String>,
    /// Adds the verdict `complexity <= m`.
    #[arg(long = "m")]
    pub m: Option<u32>,
    #[arg(long, default_value_t = polyspline_core::linforms::SEARCH_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long = "m")]
    pub m: u32,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Polynomial, repeatable; several form a family.
    #[arg(long = "poly", required = true)]
    pub polys: Vec<String>,
    /// Factor degree bound d (factors have degree < d); defaults to the degree.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Adds the verdict `lower bound >= min-rank`.
    #[arg(long)]
    pub min_rank: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LinesArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Base point index for the line count.
    #[arg(long, default_value_t = 0)]
    pub point: u64,
    /// Anchor point indices for the anchored solution count, repeatable.
    #[arg(long = "anchor")]
    pub anchors: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SubspaceArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[command(flatten)]
    pub fun: FunArgs,
    #[arg(long = "m")]
    pub m: u32,
    /// Flat dimension; defaults to ceil(m / (q - q/p)).
    #[arg(long = "l")]
    pub l: Option<u32>,
    /// Scan every l-flat inside X instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[command(flatten)]
    pub budget: Budget,
    /// Largest acceptable fraction of failing flats.
    #[arg(long, default_value_t = 0.0)]
    pub max_fraction: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Planted polynomial g.
    #[arg(long)]
    pub poly: String,
    #[arg(long = "m")]
    pub m: u32,
    /// Noise rates, comma separated.
    #[arg(long = "rho", value_delimiter = ',', num_args = 0..)]
    pub rhos: Vec<f64>,
    #[arg(long, default_value_t = polyspline_core::spline::DEFAULT_VOTES)]
    pub votes: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub extend: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}
