//! `negtype`: check negative type, estimate generalized roundness, and
//! audit simplex gaps from the command line.
//!
//! Exit codes: 0 when the property holds (or the computation succeeded),
//! 1 when it fails, 2 for usage and input errors. Reports are JSON on
//! stdout; diagnostics go to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Verbosity;

#[derive(Parser)]
#[command(name = "negtype", version, about = "Negative type and generalized roundness of finite metric spaces")]
#[command(after_help = "EXAMPLES:\n\
                  \n  negtype gen cube --n 2 --out cube.json\
                  \n  negtype check --input cube.json --p 3 --strict --json\
                  \n  negtype roundness --input cube.json --p 3\
                  \n  negtype affine --input cube.json\
                  \n  negtype gap --simplex d.json --p 2 --exact\
                  \n\nSet NEGTYPE_VERBOSITY=brief|normal|full to control report detail.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide (strict) p-negative type of a point set or distance matrix
    Check {
        /// Point set (.json) or distance matrix (.csv)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        /// Require strict negative type
        #[arg(long)]
        strict: bool,
        /// Print the JSON report instead of a summary
        #[arg(long)]
        json: bool,
    },
    /// Bracket the generalized roundness by bisection
    Roundness {
        #[arg(long)]
        input: PathBuf,
        /// Target bracket width
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Largest exponent probed
        #[arg(long, default_value_t = 64.0)]
        cap: f64,
        /// Exponent r of the metric d_r the coordinates are measured with
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Evaluate the p-simplex gap of a simplex file
    Gap {
        #[arg(long)]
        simplex: PathBuf,
        #[arg(long)]
        p: f64,
        /// Also evaluate the closed form for {0, beta}-valued sets and compare
        #[arg(long)]
        exact: bool,
    },
    /// Test affine independence and print a dependency certificate
    Affine {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a generated point set
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output path; the point set goes to stdout when omitted
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Sample random simplices and compare their gaps with the eigen verdict
    Crosscheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Family {
    /// The full Hamming cube {0,1}^n
    Cube {
        #[arg(long)]
        n: u32,
    },
    /// A seeded random subset of {0,1}^n
    Subset(SubsetArgs),
    /// The first 2^m Walsh functions on 2^m dyadic atoms
    Walsh {
        #[arg(long)]
        m: u32,
    },
    /// Four planar points, affinely dependent yet strictly negative type below p = 2
    RemarkZ,
    /// {0, 1, 2} on the real line
    Midpoint,
    /// A line with a midpoint, embedded in the plane
    MidpointTriple,
    /// k points at mutual distance 1
    Uniform {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct SubsetArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Family {
    fn spec(&self) -> negtype::generators::GeneratorSpec {
        use negtype::generators::GeneratorSpec as G;
        match *self {
            Family::Cube { n } => G::HammingCube { n },
            Family::Subset(SubsetArgs { n, size, seed }) => G::CubeSubset { n, size, seed },
            Family::Walsh { m } => G::Walsh { m },
            Family::RemarkZ => G::RemarkZ,
            Family::Midpoint => G::MidpointLine,
            Family::MidpointTriple => G::MidpointTriple,
            Family::Uniform { k } => G::UniformSpace { k },
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let verbosity = Verbosity::from_env()?;
    match cli.command {
        Command::Check { input, p, strict, json } => commands::check(&input, p, strict, json, verbosity),
        Command::Roundness { input, tol, cap, p } => commands::roundness(&input, tol, cap, p, verbosity),
        Command::Gap { simplex, p, exact } => commands::gap(&simplex, p, exact),
        Command::Affine { input } => commands::affine(&input),
        Command::Gen { family, out } => commands::gen(&family.spec(), out.as_deref()),
        Command::Crosscheck { input, p, trials, seed } => commands::crosscheck(&input, p, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
