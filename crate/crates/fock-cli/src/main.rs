//! `fock`: weighted Fock norms, reproducing kernels, linear complex ODEs and
//! their hypothesis checkers, as a batch tool.

use clap::{Parser, Subcommand};
use fock_cli::{manifest::CommandKind, run, write_artifacts, RunManifest};

#[derive(Parser)]
#[command(
    name = "fock",
    about = "Weighted Fock norms, reproducing kernels and linear complex ODEs",
    version
)]
struct Cli {
    /// Seed for randomized batteries.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Multiplier on the quadrature node counts.
    #[arg(long, global = true, default_value_t = 1.0)]
    grid_scale: f64,
    /// Output path (default depends on the command).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Quadrature configuration JSON.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weight diagnostics.
    Weights {
        #[command(subcommand)]
        sub: WeightsCommand,
    },
    /// Weighted or Sobolev-style norm of an entire function.
    Norm {
        /// Entire function JSON.
        #[arg(long)]
        function: String,
        /// Exponent: a positive number or "inf".
        #[arg(long, default_value = "2")]
        p: String,
        /// Power of phi in the density.
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Derivative-sum order (0 for plain norms).
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Weight JSON; classical Gaussian when absent.
        #[arg(long)]
        weight: Option<String>,
    },
    /// Reproducing-kernel operations.
    Kernel {
        #[command(subcommand)]
        sub: KernelCommand,
    },
    /// Integrate a problem along a ray; emits the trace CSV and series
    /// coefficients.
    Solve {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Weight JSON for the weighted column.
        #[arg(long)]
        weight: Option<String>,
        /// Calibration radius for the envelope column.
        #[arg(long)]
        envelope_r0: Option<f64>,
    },
    /// Growth envelope along a ray.
    Envelope {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Run one hypothesis checker T1.1..T1.8.
    Check {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        problem: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Candidate solution JSON (T1.4 optional, T1.5 required).
        #[arg(long)]
        candidate: Option<String>,
        /// Kernel basis truncation for T1.6-T1.8.
        #[arg(long, default_value_t = 24)]
        degree: usize,
        /// Constants JSON overriding the unit defaults.
        #[arg(long)]
        constants: Option<String>,
    },
    /// Run the seeded invariant battery.
    Battery {},
}

#[derive(Subcommand)]
enum WeightsCommand {
    /// Classify a weight against the rapidly increasing class.
    Check {
        /// Weight JSON.
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 100.0)]
        r_max: f64,
        #[arg(long, default_value_t = 48)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Emit n, log delta_n^2, delta_n^2 as CSV.
    Table {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 40)]
        degree: usize,
    },
    /// Reproduce f(zeta) through the kernel-weighted integral.
    Reproduce {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 40)]
        degree: usize,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 0.0)]
        zeta_re: f64,
        #[arg(long, default_value_t = 0.0)]
        zeta_im: f64,
    },
}

fn to_manifest(cli: Cli) -> RunManifest {
    let command = match cli.command {
        Command::Weights { sub } => match sub {
            WeightsCommand::Check { weight, r_max, samples } => {
                CommandKind::WeightsCheck { weight, r_max, samples }
            }
        },
        Command::Norm { function, p, q, m, weight } => {
            CommandKind::Norm { function, p, q, m, weight }
        }
        Command::Kernel { sub } => match sub {
            KernelCommand::Table { weight, degree } => CommandKind::KernelTable { weight, degree },
            KernelCommand::Reproduce { weight, degree, function, zeta_re, zeta_im } => {
                CommandKind::KernelReproduce { weight, degree, function, zeta_re, zeta_im }
            }
        },
        Command::Solve { problem, theta, r_max, tol, samples, weight, envelope_r0 } => {
            CommandKind::Solve { problem, theta, r_max, tol, samples, weight, envelope_r0 }
        }
        Command::Envelope { problem, theta, r0, r_max, samples } => {
            CommandKind::Envelope { problem, theta, r0, r_max, samples }
        }
        Command::Check { theorem, problem, weight, p, q, candidate, degree, constants } => {
            CommandKind::Check { theorem, problem, weight, p, q, candidate, degree, constants }
        }
        Command::Battery {} => CommandKind::Battery {},
    };
    RunManifest {
        command,
        seed: cli.seed,
        grid_scale: cli.grid_scale,
        out: cli.out,
        config: cli.config,
    }
}

fn main() {
    let manifest = to_manifest(Cli::parse());
    match run(&manifest) {
        Ok(artifacts) => {
            if let Err(e) = write_artifacts(&artifacts) {
                eprintln!("{e}");
                std::process::exit(e.exit_code());
            }
            for a in &artifacts {
                println!("wrote {}", a.name);
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
