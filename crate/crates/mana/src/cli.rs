//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mana_core::chain::{Boundary, ExtendedPottsParams, PottsParams, T_GATE_THETA};
use mana_core::sampler::{ChainConfig, StartPoint};
use mana_core::PrimeDim;

/// Largest chain for exact tables.
pub const EXACT_MAX_SITES: usize = 7;
/// Largest chain for the Monte Carlo paths.
pub const MC_MAX_SITES: usize = 14;

#[derive(Parser, Debug)]
#[command(name = "mana", version, about = "Mana and mutual mana of qudit Potts chains")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ground state of a Potts chain, saved as a QSV1 file.
    Solve(SolveArgs),
    /// Mana of a saved state.
    Mana(ManaArgs),
    /// Solve and measure mana over a list of fields.
    Sweep(SweepArgs),
    /// Mutual mana between the first `ell` sites and the rest.
    Mutual(MutualArgs),
    /// Straight-line fit of mutual mana against the chord coordinate.
    Fit(FitArgs),
    /// Apply T_theta to every site of a saved qutrit state.
    Rotate(RotateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mc => "mc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Chord,
    Ell,
}

/// Model parameters shared by `solve` and `sweep`.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Local dimension.
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    /// Extended model coupling; selects the self-dual extension when given.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
    pub boundary: BoundaryArg,
    /// Lanczos residual target.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    /// Seed of the Lanczos start vector.
    #[arg(long, default_value_t = 0x5eed)]
    pub lanczos_seed: u64,
}

impl ModelArgs {
    pub fn model(&self, n_sites: usize, h: f64) -> anyhow::Result<mana_core::chain::ChainModel> {
        let dim = PrimeDim::new(self.d)?;
        let boundary = match self.boundary {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        };
        Ok(match self.p {
            Some(p) => ExtendedPottsParams {
                n_sites,
                dim,
                p,
                j: self.j,
                boundary,
            }
            .into(),
            None => PottsParams {
                n_sites,
                dim,
                j: self.j,
                h,
                boundary,
            }
            .into(),
        })
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("d".into(), self.d.to_string()),
            ("J".into(), self.j.to_string()),
        ];
        if let Some(p) = self.p {
            v.push(("p".into(), p.to_string()));
        }
        let boundary = match self.boundary {
            BoundaryArg::Periodic => "periodic",
            BoundaryArg::Open => "open",
        };
        v.push(("boundary".into(), boundary.into()));
        v.push(("tol".into(), self.tol.to_string()));
        v.push(("max-iter".into(), self.max_iter.to_string()));
        v.push(("lanczos-seed".into(), self.lanczos_seed.to_string()));
        v
    }
}

/// Monte Carlo settings.
#[derive(Args, Debug, Clone)]
pub struct SamplerArgs {
    /// Recorded samples per chain.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Largest number of sites changed per proposal (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub move_width: usize,
    /// Points of the inverse-temperature grid on [1, 2].
    #[arg(long, default_value_t = 11)]
    pub beta_points: usize,
    /// Keep the grid fixed instead of refining it when the trapezoid rule
    /// looks unconverged.
    #[arg(long)]
    pub no_refine: bool,
    /// Chains accepting fewer proposals during burn-in fail.
    #[arg(long, default_value_t = 0.01)]
    pub min_acceptance: f64,
}

impl SamplerArgs {
    pub fn config(&self) -> ChainConfig {
        ChainConfig {
            beta: 1.0,
            n_samples: self.samples,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.seed,
            move_width: self.move_width,
            start: StartPoint::Auto,
            min_acceptance: self.min_acceptance,
        }
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("samples".into(), self.samples.to_string()),
            ("burn-in".into(), self.burn_in.to_string()),
            ("thin".into(), self.thin.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("move-width".into(), self.move_width.to_string()),
            ("beta-points".into(), self.beta_points.to_string()),
            ("min-acceptance".into(), self.min_acceptance.to_string()),
        ];
        v.push(("no-refine".into(), self.no_refine.to_string()));
        v
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub h: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ManaArgs {
    /// QSV1 state file.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Writes the thermodynamic-integration integrand per beta.
    #[arg(long)]
    pub integrand_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Chain lengths, comma separated.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub l: Vec<usize>,
    /// Field values, comma separated.
    #[arg(long = "h-values", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub h_values: Vec<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MutualArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub ell_min: usize,
    /// Defaults to `L - 1`.
    #[arg(long)]
    pub ell_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Mc)]
    pub method: Method,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// CSV written by `mutual`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Axis::Chord)]
    pub x: Axis,
    #[arg(long, default_value_t = 2)]
    pub ell_min: usize,
    /// Defaults to `L - 2`.
    #[arg(long)]
    pub ell_max: Option<usize>,
    /// Keep only even `ell`. Defaults to on when the coupling is negative.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_parser = clap::builder::BoolishValueParser::new())]
    pub even_only: Option<bool>,
    /// Coupling used for the `--even-only` default; read from the input's
    /// metadata when absent.
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RotateArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Angle in radians, or `tgate`.
    #[arg(long, value_parser = parse_theta, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_theta(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("tgate") {
        return Ok(T_GATE_THETA);
    }
    s.parse::<f64>()
        .map_err(|e| format!("{s:?} is neither a number nor `tgate`: {e}"))
        .and_then(|t| if t.is_finite() { Ok(t) } else { Err("theta must be finite".into()) })
}
