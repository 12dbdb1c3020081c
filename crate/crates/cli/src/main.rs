mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

pub use commands::CliError;

#[derive(Parser)]
#[command(name = "pfrob", version, about = "p-adic Frobenius structures on quantum connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Built-in connection name (see `pfrob list`) or path to a connection file
    #[arg(long)]
    pub connection: String,
    /// Odd primes, comma separated or repeated
    #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5])]
    pub prime: Vec<u64>,
    /// Truncation order N
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    /// Fixed working precision G; chosen automatically when absent
    #[arg(long)]
    pub precision: Option<i64>,
    /// Largest precision tried by the automatic search
    #[arg(long, default_value_t = 640)]
    pub precision_cap: i64,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Derivatives of the p-adic Gamma function at 0
    Gamma {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 10)]
        precision: i64,
    },
    /// Valuation profile of the Frobenius series, as CSV, with a growth-rate fit
    Profile {
        #[command(flatten)]
        run: RunArgs,
        /// Fit window `lo,hi`; defaults to `20,N`
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<usize>>,
    },
    /// Characteristic polynomial at q = πθ and its Newton polygon
    Newton {
        #[command(flatten)]
        run: RunArgs,
        /// Also print the valuation of every coefficient
        #[arg(long)]
        theta_report: bool,
    },
    /// Grassmannian: direct solve against the exterior power of the projective one
    Satake {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        prime: u64,
        /// Order of the Newton polygon computation
        #[arg(long, default_value_t = 60)]
        order: usize,
        /// Order of the exact direct/exterior comparison
        #[arg(long, default_value_t = 20)]
        compare_order: usize,
        #[arg(long)]
        precision: Option<i64>,
        #[arg(long, default_value_t = 640)]
        precision_cap: i64,
    },
    /// Built-in connections
    List,
    /// Check a connection file
    Validate { path: PathBuf },
    /// Write a built-in connection in the file format
    Export {
        #[arg(long)]
        connection: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gamma { prime, k_max, precision } => commands::gamma(prime, k_max, precision),
        Command::Profile { run, window } => commands::profile(&run, window.map(|w| (w[0], w[1]))),
        Command::Newton { run, theta_report } => commands::newton(&run, theta_report),
        Command::Satake { k, n, prime, order, compare_order, precision, precision_cap } => {
            commands::satake(k, n, prime, order, compare_order, precision, precision_cap)
        }
        Command::List => commands::list(),
        Command::Validate { path } => commands::validate(&path),
        Command::Export { connection, out } => commands::export(&connection, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
