//! The `graphcalc` command-line tool.
//!
//! [`run`] drives one invocation against explicit writers so the tool can be
//! exercised in-process; the binary is a thin wrapper around it.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
pub mod format;
pub mod manifest;

pub use manifest::RunManifest;

/// Exit status for success, input validation failures and numerical failures.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Environment variable holding the default laplacian scale.
pub const SCALE_ENV: &str = "GRAPHCALC_SCALE";

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            message: message.into(),
            exit_code: EXIT_VALIDATION,
        }
    }

    pub fn numerical(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            message: message.into(),
            exit_code: EXIT_NUMERICAL,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::validation("io", message)
    }

    fn to_json(&self) -> String {
        format::to_json(&json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "exit_code": self.exit_code,
            }
        }))
    }
}

impl From<graphcalc::Error> for CliError {
    fn from(e: graphcalc::Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION };
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
            exit_code: code,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "graphcalc", version, about = "Calculus, spectra and flows on finite graphs")]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Laplacian scale, 1 or 2/3 (default from GRAPHCALC_SCALE, else 1).
    #[arg(long, global = true)]
    pub scale: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Comma-separated interior vertex ids; the whole graph when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub interior: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degrees, edge count, connectivity, optional window and distance.
    Graph {
        graph: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Two vertex ids `a,b`.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        distance: Option<Vec<String>>,
    },
    /// Eigenvalues and eigenfunctions of −Δ + Q on a window.
    Spectrum {
        graph: String,
        #[command(flatten)]
        window: WindowArgs,
        /// dirichlet, neumann or none (default: none for the whole graph,
        /// dirichlet otherwise).
        #[arg(long)]
        bc: Option<String>,
        /// Potential Q as a `vertex,value` CSV.
        #[arg(long)]
        potential: Option<String>,
        /// Run the min-max check for every eigenvalue.
        #[arg(long)]
        check: bool,
        /// Seed for the min-max sampling.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Test function (`vertex,value` CSV) for the lower bound on λ₁.
        #[arg(long)]
        barta: Option<String>,
    },
    /// Isoperimetric and Poincaré constants.
    Cheeger {
        graph: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Mini-max level and point between two strict local minima.
    Minimax {
        graph: String,
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Spectral solution of the heat equation with balance diagnostics.
    Heat {
        graph: String,
        function: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        bc: Option<String>,
        /// Constant, `const:<v>`, or a `vertex,value` CSV.
        #[arg(long)]
        potential: Option<String>,
        #[arg(long = "T")]
        t_end: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Write `time,vertex,value` rows here.
        #[arg(long)]
        trajectory: Option<String>,
    },
    /// Transport f_t = W·∇f along a vector field.
    Transport {
        graph: String,
        field: String,
        function: String,
        #[arg(long = "T")]
        t_end: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// as-given, symmetrize or antisymmetrize.
        #[arg(long, default_value = "antisymmetrize")]
        symmetry: String,
        #[arg(long)]
        trajectory: Option<String>,
    },
    /// Discrete Morse flow with energy ledger.
    Dmf {
        graph: String,
        function: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long = "T")]
        t_end: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// `const:<v>`, `linear:<a>,<b>`, `sin`, a number, or a CSV path.
        #[arg(long, default_value = "0")]
        potential: String,
        /// Ascending step counts for a convergence study.
        #[arg(long, value_delimiter = ',')]
        study: Option<Vec<usize>>,
        #[arg(long)]
        trajectory: Option<String>,
    },
    /// Sphere-valued Dirichlet problem by projected heat flow.
    Harmonic {
        graph: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Boundary values as a `vertex,x,y,z` CSV.
        #[arg(long)]
        boundary: String,
        /// Starting interior values; seeded from the boundary when omitted.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = graphcalc::harmonic::MINIMIZE_MAX_STEPS)]
        max_steps: usize,
        /// Write the final map as `vertex,x,y,z` here.
        #[arg(long)]
        map: Option<String>,
        /// Write the per-step energy ledger as CSV here.
        #[arg(long)]
        ledger: Option<String>,
    },
    /// Seeded batch of calculus identity checks.
    Identities {
        graph: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Optimal transport cost between equal-size vertex sets.
    Monge {
        graph: String,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        from: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        to: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Number of time steps.
    #[arg(long = "N", conflicts_with = "dt")]
    pub steps: Option<usize>,
    /// Time step; T/dt must be a whole number.
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Run one invocation. `argv` excludes the program name; `env_scale` is the
/// value of [`SCALE_ENV`], if set. Returns the exit status.
pub fn run(argv: &[String], env_scale: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("graphcalc".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let kind = match e.kind() {
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => "unknown_subcommand",
                _ => "usage",
            };
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return report_error(&CliError::validation(kind, first), stderr);
        }
    };
    match commands::dispatch(&cli, argv, env_scale) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| CliError::io(format!("cannot write {path:?}: {e}"))),
                None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string())),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => report_error(&e, stderr),
            }
        }
        Err(e) => report_error(&e, stderr),
    }
}

fn report_error(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = stderr.write_all(e.to_json().as_bytes());
    e.exit_code
}
