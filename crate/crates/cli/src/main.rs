use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;

mod commands;
mod error;
mod render;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "pathmorse",
    version,
    about = "Path homology of digraphs with discrete Morse reduction"
)]
pub struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Coefficients: q (rationals), z (rationals plus integer torsion) or zp:<prime>.
    #[arg(long, global = true, default_value = "q", value_parser = parse_coeffs)]
    coeffs: Coeffs,
    /// Highest homology dimension (default min(|V| - 1, 6)).
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug)]
pub enum Coeffs {
    Q,
    Z,
    Zp(pathmorse::linalg::PrimeField),
}

fn parse_coeffs(s: &str) -> Result<Coeffs, String> {
    match s {
        "q" | "Q" => Ok(Coeffs::Q),
        "z" | "Z" => Ok(Coeffs::Z),
        _ => {
            let p = s
                .strip_prefix("zp:")
                .ok_or_else(|| format!("expected q, z or zp:<prime>, got `{s}`"))?;
            let p: u64 = p.parse().map_err(|_| format!("`{p}` is not an integer"))?;
            pathmorse::linalg::PrimeField::new(p)
                .map(Coeffs::Zp)
                .ok_or_else(|| format!("{p} is not a prime below 2^31"))
        }
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = false, multiple = false)]
pub struct FunctionSource {
    /// Vertex values, one `<label> <rational>` per line.
    #[arg(long)]
    values: Option<PathBuf>,
    /// Single zero at the vertex off all cycles with largest closure degree;
    /// other vertices get 1, 2, 3, ... in index order.
    #[arg(long)]
    auto_zero: bool,
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = false, multiple = false)]
pub struct ModeFlags {
    /// Morse complex only (default).
    #[arg(long)]
    morse: bool,
    /// Direct Ω complex only; no vertex values needed.
    #[arg(long)]
    direct: bool,
    /// Both pipelines with an agreement check.
    #[arg(long)]
    both: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the transitive closure as an edge list.
    Closure { graph: PathBuf },
    /// Dimensions and bases of Ω_n.
    Omega { graph: PathBuf },
    /// Validate a Morse function and report condition (*).
    MorseCheck {
        graph: PathBuf,
        #[command(flatten)]
        source: FunctionSource,
    },
    /// Extend a Morse function to the transitive closure.
    Extend {
        graph: PathBuf,
        #[command(flatten)]
        source: FunctionSource,
    },
    /// Gradient, boundary and flow matrices on the closure.
    Flow {
        graph: PathBuf,
        #[command(flatten)]
        source: FunctionSource,
    },
    /// Betti numbers from the Morse complex and/or Ω directly.
    Homology {
        graph: PathBuf,
        #[command(flatten)]
        source: FunctionSource,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Both pipelines side by side.
    Compare {
        graph: PathBuf,
        #[command(flatten)]
        source: FunctionSource,
    },
    /// Random acyclic digraphs through both pipelines.
    Bench {
        /// Vertex counts, inclusive, as `a..b`.
        #[arg(long, default_value = "4..8", value_parser = parse_range)]
        sizes: (usize, usize),
        /// Edge probability in [0, 1], decimal or p/q.
        #[arg(long, default_value = "0.4", value_parser = parse_density)]
        density: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound `{a}`"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound `{b}`"))?;
    if a == 0 || a > b {
        return Err(format!("empty or invalid range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_density(s: &str) -> Result<f64, String> {
    let x = pathmorse::morse::parse_rational(s)
        .and_then(|q| q.to_f64())
        .ok_or_else(|| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("density {s} is outside [0, 1]"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                println!("{}", e.to_json());
            } else {
                eprintln!("error: {}", e.detail);
                eprintln!("reason: {}", e.reason);
            }
            ExitCode::from(e.exit_code())
        }
    }
}

impl Cli {
    pub fn max_dim_for(&self, g: &pathmorse::digraph::Digraph) -> usize {
        self.max_dim
            .unwrap_or_else(|| pathmorse::homology::default_max_dim(g))
    }
}

pub type CliResult<T> = Result<T, CliError>;
