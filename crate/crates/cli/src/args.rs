use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weylsys::{Complex64, ExtendedReal};

use crate::format::parse_complex;

#[derive(Parser, Debug)]
#[command(
    name = "weylsys",
    version,
    about = "Weyl-Titchmarsh m-functions, L-system realizations and sectorial classification"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Potential: bessel:NU, free:ELL or table:PATH (CSV with header x,q)
    #[arg(long, global = true, default_value = "bessel:1.5")]
    pub potential: String,
    /// Tolerance overrides: a number sets abs and rel, or comma-separated
    /// key=value pairs with keys abs, rel, psd_slack, divergence_bound,
    /// boundary_tol
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Truncation radius of the Riccati engine
    #[arg(long, global = true)]
    pub xmax: Option<f64>,
    /// Seed for randomized kernel trials
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// How m is evaluated; auto uses a closed form when one is attached
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Closed,
    Engine,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// −m_∞
    NegMInf,
    /// 1/m_∞
    RecipMInf,
    /// −m_α (needs --alpha or --tan-alpha)
    NegMAlpha,
}

#[derive(Args, Debug, Clone, Default)]
pub struct AlphaSel {
    /// Angle α in radians
    #[arg(long, allow_hyphen_values = true, conflicts_with = "tan_alpha")]
    pub alpha: Option<f64>,
    /// tan α; "inf" selects α = π/2
    #[arg(long, allow_hyphen_values = true, value_parser = parse_extended)]
    pub tan_alpha: Option<ExtendedReal>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate m_∞(z) with an error estimate
    EvalM {
        /// Spectral parameter a+bi (repeatable, or comma-separated)
        #[arg(long = "z", required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
        z: Vec<Complex64>,
    },
    /// Evaluate m_α(z) and −m_α(z)
    EvalMalpha {
        #[command(flatten)]
        alpha: AlphaSel,
        #[arg(long = "z", required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
        z: Vec<Complex64>,
    },
    /// L-system with h = i realizing a target function, with V and W at z
    Realize {
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        alpha: AlphaSel,
        #[arg(long = "z", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
        z: Vec<Complex64>,
    },
    /// Classify Θ_{tan α, i} (--alpha/--tan-alpha) or Θ_{μ,h} (--mu, --h)
    Classify {
        #[command(flatten)]
        alpha: AlphaSel,
        /// μ, a real number or "inf"
        #[arg(long, allow_hyphen_values = true, value_parser = parse_extended, conflicts_with_all = ["alpha", "tan_alpha"])]
        mu: Option<ExtendedReal>,
        /// h with Im h > 0 (default i)
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, requires = "mu")]
        h: Option<Complex64>,
    },
    /// Classes and angles of Θ_{tan α, i} over an α grid
    RegionScan {
        /// Grid α_k = −π/2 + π(k+1)/n, k = 0..n
        #[arg(long, default_value_t = 64, conflicts_with = "alphas")]
        n: usize,
        /// Explicit α values in radians (comma-separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
    },
    /// Representing measure of −m_α on a log-spaced t grid
    Measure {
        #[command(flatten)]
        alpha: AlphaSel,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 201)]
        n_t: usize,
    },
    /// Run the acceptance suite; exit 3 when a criterion fails
    Verify,
}

fn parse_extended(s: &str) -> Result<ExtendedReal, String> {
    ExtendedReal::parse(s).map_err(|e| e.to_string())
}
