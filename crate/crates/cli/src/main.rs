//! `singval` command-line front end.

mod campaign;
mod commands;
mod envelope;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use envelope::{Cache, Format};

/// Environment variable naming the result cache directory.
pub const CACHE_ENV: &str = "SINGVAL_CACHE_DIR";

/// Lowest accepted working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 38;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_PRECISION: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "singval", version, about = "Singular values, class invariants and radical solutions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit the JSON result envelope (default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit a plain-text summary instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 60)]
    prec: u32,
    /// Cache directory (overrides the environment variable).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore and do not write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced forms and structure of the class group of -N (or -4N).
    Classgroup {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long)]
        disc4: bool,
    },
    /// Weber r, the signature, [f, g], gamma_2 and j for N = 3 mod 8.
    Invariant {
        #[arg(short = 'N')]
        n: u64,
    },
    /// Certified integer polynomials.
    Polys {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, value_enum)]
        which: Which,
    },
    /// The algebraic factor lambda, optionally with the unit test.
    Lambda {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long)]
        unit: bool,
    },
    /// Singular modulus k_N with its AGM residual.
    Kn {
        #[arg(short = 'N')]
        n: u64,
    },
    /// Complete elliptic integral K_N with the eta-product cross-check.
    #[command(name = "KN")]
    BigKn {
        #[arg(short = 'N')]
        n: u64,
    },
    /// Derive the relation between g and j.
    Modrel {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a radical fixture file.
    Radical {
        #[arg(long)]
        fixture: PathBuf,
    },
    /// Run the reference checks for one N.
    Verify {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, value_enum, default_value_t = Suite::Paper)]
        suite: Suite,
    },
    /// Resumable verification campaign over a range of N.
    Campaign {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        conjecture: u8,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        checkpoint: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    #[value(name = "G")]
    G,
    #[value(name = "F")]
    F,
    #[value(name = "weber")]
    Weber,
    #[value(name = "hilbert")]
    Hilbert,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Paper,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.prec < MIN_DIGITS {
        eprintln!("error: --prec must be at least {MIN_DIGITS} digits");
        return ExitCode::from(EXIT_USAGE);
    }
    let format = if cli.global.text { Format::Text } else { Format::Json };
    let cache = if cli.global.no_cache {
        None
    } else {
        cli.global
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .map(Cache::new)
    };
    let prec = cli.global.prec;
    let env = match cli.command {
        Command::Classgroup { n, disc4 } => commands::classgroup(n, disc4, cache.as_ref()),
        Command::Invariant { n } => commands::invariant(n, prec, cache.as_ref()),
        Command::Polys { n, which } => commands::polys(n, which, prec, cache.as_ref()),
        Command::Lambda { n, unit } => commands::lambda(n, unit, prec, cache.as_ref()),
        Command::Kn { n } => commands::kn(n, prec, cache.as_ref()),
        Command::BigKn { n } => commands::big_kn(n, prec, cache.as_ref()),
        Command::Modrel { out } => commands::modrel(out.as_deref()),
        Command::Radical { fixture } => commands::radical(&fixture, prec),
        Command::Verify { n, suite } => commands::verify(n, suite, prec),
        Command::Campaign { conjecture, from, to, checkpoint } => {
            campaign::run(conjecture, from, to, &checkpoint, prec)
        }
    };
    let code = env.exit_code;
    env.emit(format);
    ExitCode::from(code)
}
