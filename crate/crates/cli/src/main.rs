use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Format;

/// Optimal error probabilities for detecting a change between two unknown
/// pure states.
#[derive(Parser, Debug)]
#[command(name = "qcp", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format; JSON by default, CSV for `fig`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Largest Hilbert-space dimension the dense oracle may build.
    #[arg(long = "dim-cap", global = true)]
    pub dim_cap: Option<usize>,
    /// Record the wall-clock time of the run (breaks byte-identical replay).
    #[arg(long, global = true)]
    pub timestamp: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SizeArgs {
    /// Copies between the two candidate change points (System 0).
    #[arg(long = "M", default_value_t = 0)]
    pub m: u64,
    /// Copies known to be in the first state (System 1).
    #[arg(long = "N1")]
    pub n1: u64,
    /// Copies known to be in the second state (System 2).
    #[arg(long = "N2")]
    pub n2: u64,
    /// Local dimension.
    #[arg(long = "d", default_value_t = 2)]
    pub d: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvgForm {
    General,
    Qubit,
    Equal,
    EqualQubit,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Q,
    #[value(name = "M")]
    M,
    #[value(name = "N1")]
    N1,
    #[value(name = "N2")]
    N2,
    Alpha,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteArg {
    All,
    Analytic,
    Oracle,
    Recoupling,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Haar-averaged minimum error with its per-block breakdown.
    AvgError {
        #[command(flatten)]
        size: SizeArgs,
        /// Closed form to evaluate.
        #[arg(long, value_enum, default_value_t = AvgForm::General)]
        form: AvgForm,
        /// Also compute the dense Helstrom error (bounded by the dimension cap).
        #[arg(long)]
        dense: bool,
    },
    /// Error of the optimal averaged measurement for a pair with overlap q.
    Error {
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long)]
        q: f64,
    },
    /// Closed-form decay rate at N1 = N2 = alpha M.
    Rate {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        q: f64,
        /// Include the large-alpha approximation and the Chernoff value.
        #[arg(long)]
        with_approx: bool,
    },
    /// Data behind the rate plots: 2 (against q at alpha = 5) or 3 (against alpha at q = 0.5).
    Fig { id: u32 },
    /// One row per point of a one-parameter sweep.
    Sweep {
        #[arg(long, value_enum)]
        variable: SweepVariable,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long = "M")]
        m: Option<u64>,
        #[arg(long = "N1")]
        n1: Option<u64>,
        #[arg(long = "N2")]
        n2: Option<u64>,
        #[arg(long = "d", default_value_t = 2)]
        d: u64,
        /// Fixed overlap; without it, integer sweeps report the averaged error.
        #[arg(long)]
        q: Option<f64>,
        /// Fixed alpha for a q sweep of the rate.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Closed-form large-size limits.
    Limits {
        /// Limit N1 = N2 -> infinity at this M.
        #[arg(long = "M")]
        m: Option<u64>,
        /// Limit M -> infinity at this N2.
        #[arg(long = "N2")]
        n2: Option<u64>,
        #[arg(long = "d", default_value_t = 2)]
        d: u64,
    },
    /// Run the numbered acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.global.dim_cap {
        qcp::dense::set_dim_cap(cap);
    }
    let result = match cli.command {
        Command::AvgError { size, form, dense } => commands::avg_error(&cli.global, size, form, dense),
        Command::Error { size, q } => commands::error(&cli.global, size, q),
        Command::Rate { alpha, q, with_approx } => commands::rate(&cli.global, alpha, q, with_approx),
        Command::Fig { id } => commands::fig(&cli.global, id),
        Command::Sweep { variable, from, to, steps, m, n1, n2, d, q, alpha } => commands::sweep(
            &cli.global,
            commands::SweepSpec { variable, from, to, steps, m, n1, n2, d, q, alpha },
        ),
        Command::Limits { m, n2, d } => commands::limits(&cli.global, m, n2, d),
        Command::Verify { suite } => commands::verify(&cli.global, suite),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qcp: {e}");
            e.exit_code()
        }
    }
}
