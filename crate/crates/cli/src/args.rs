use clap::{Parser, Subcommand, ValueEnum};
use holant::approx::{DerivativeEngine, Mode};

#[derive(Debug, Parser)]
#[command(name = "holant", version, about = "Exact and certified-approximate partition functions of edge-coloring models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Edge-list file, or an inline edge list with ';' as line separator
    /// (e.g. "3 3;0 1;1 2;0 2").
    #[arg(long, global = true, conflicts_with = "family")]
    pub graph: Option<String>,

    /// Generated graph: cycle:N, path:N, complete:N, torus:RxC or
    /// random-regular:N:D:SEED.
    #[arg(long, global = true)]
    pub family: Option<String>,

    /// Model JSON file (edge-coloring or vertex model) or a built-in name:
    /// ones, matching, dregular:D, ones±uniform:R:SEED.
    #[arg(long, global = true)]
    pub model: Option<String>,

    /// Number of colors for built-in models.
    #[arg(long, global = true, default_value_t = 2)]
    pub colors: usize,

    #[arg(long, global = true, default_value_t = 1e-3)]
    pub eps: f64,

    #[arg(long, global = true, default_value = "mult")]
    pub mode: Mode,

    /// Derivative engine for the approximation: auto, subsets or clusters.
    #[arg(long, global = true, default_value = "auto")]
    pub engine: DerivativeEngine,

    /// Maximum number of term evaluations; overrides HOLANT_BUDGET.
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact partition function by full enumeration.
    Exact,
    /// Certified approximation; prints the certificate.
    Approx,
    /// Tutte polynomial Σ_A q^{k(A)} v^{|A|}: its value at --q, or the
    /// coefficients of the exponential-type polynomial in q.
    Tutte {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        v: num_complex::Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        q: Option<num_complex::Complex64>,
    },
    /// Certified evaluation of an exponential-type polynomial at --x.
    Exptype {
        /// tutte:v=RE,IM or chromatic.
        #[arg(long)]
        poly: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        x: num_complex::Complex64,
        /// Proven root radius; estimated from small graphs when absent.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Normalized partition functions along a family, or the log-potential
    /// identity on a single graph.
    Limits {
        /// Comma-separated, strictly increasing family sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Cauchy tolerance on consecutive differences.
        #[arg(long, default_value_t = 1e-2)]
        tolerance: f64,
        /// Check the log-potential identity on --graph instead.
        #[arg(long)]
        log_potential: bool,
    },
    /// Roots of q(z) = p(I + z(h − I)), of its reversal, or of an
    /// exponential-type polynomial.
    Roots {
        /// Roots of k^{-|E|} z^{|V|} q(1/z) instead of q.
        #[arg(long, conflicts_with = "poly")]
        reversed: bool,
        /// tutte:v=RE,IM or chromatic.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Samples the zero-free region and checks p ≠ 0 and the lower bound.
    RegionCheck {
        #[arg(long, default_value_t = 0.9)]
        eta: f64,
        /// Angle of the region; defaults to θ*.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Prints θ*, x* and β*(1..8).
    Constants,
    /// Runs the oracle-equivalence suite.
    Selftest,
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(text: &str) -> Result<num_complex::Complex64, String> {
    let mut parts = text.split(',');
    let re = parts
        .next()
        .unwrap_or_default()
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("'{text}': {e}"))?;
    let im = match parts.next() {
        Some(s) => s.trim().parse::<f64>().map_err(|e| format!("'{text}': {e}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("'{text}': expected RE or RE,IM"));
    }
    Ok(num_complex::Complex64::new(re, im))
}
