//! `curvlab`: batch front end for the curvature toolkit.
//!
//! Exit codes: 0 when everything passes, 1 when a checked bound or
//! assertion fails, 2 for usage and input errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvlab::ollivier::Method;
use curvlab::Mode;

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Ollivier and Bakry-Emery curvature on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Arithmetic: float or exact (rational).
    #[arg(long, default_value = "float", value_parser = parse_mode)]
    pub mode: Mode,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where test functions come from.
#[derive(Args, Debug, Clone)]
pub struct Samples {
    /// Function file `{"values": {"<id>": number}}`.
    #[arg(long, conflicts_with = "count")]
    pub function: Option<PathBuf>,
    /// Seed for random 1-Lipschitz functions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random functions (used when no function file is given).
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature table for a set of vertex pairs.
    Curvature {
        graph: PathBuf,
        /// `edges`, `all`, or pairs like `a,b;c,d`.
        #[arg(long, default_value = "edges")]
        pairs: String,
        #[arg(long, default_value = "both", value_parser = parse_method)]
        method: Method,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal transport plan of one pair as JSON.
    Plan {
        graph: PathBuf,
        /// `x,y` by vertex id.
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rewrite an optimal plan around a strict-progress neighbor and check
    /// the long-range mass bound.
    Surgery {
        graph: PathBuf,
        #[arg(long)]
        pair: String,
        /// Neighbor of x0 one step closer to y0; smallest index when omitted.
        #[arg(long)]
        xprime: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Bakry-Emery curvature of every vertex.
    BakryEmery {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Include the local Γ and Γ₂ matrices (JSON only).
        #[arg(long)]
        dump_forms: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search small graphs for disagreeing curvature signs.
    NoImplication {
        #[arg(long, default_value_t = 7)]
        max_vertices: usize,
        /// Directory for the report and witness graphs; report to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heat semigroup `P_t f`.
    Heat {
        graph: PathBuf,
        #[command(flatten)]
        samples: Samples,
        #[arg(long, value_delimiter = ',', default_values_t = curvlab::spectral_heat::DEFAULT_T_GRID.to_vec())]
        t_grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gradient decay `‖∇P_t f‖ ≤ e^{-Kt}‖∇f‖`.
    Decay {
        graph: PathBuf,
        #[command(flatten)]
        samples: Samples,
        /// `auto` (curvature infimum) or a number.
        #[arg(long = "K", alias = "k", default_value = "auto")]
        k: String,
        #[arg(long, value_delimiter = ',', default_values_t = curvlab::spectral_heat::DEFAULT_T_GRID.to_vec())]
        t_grid: Vec<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Two-column `t ratio` file with the worst ratio per time.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gaussian concentration of centered 1-Lipschitz functions.
    Concentration {
        graph: PathBuf,
        #[command(flatten)]
        samples: Samples,
        #[arg(long = "K", alias = "k", default_value = "auto")]
        k: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0])]
        r_grid: Vec<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Two-column `r tail` file with the worst tail mass per radius.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated graph.
    Gen {
        /// `path:n`, `cycle:n`, `complete:n`, `hypercube:d`, `grid:RxC`, `segment:n`.
        family: String,
        #[arg(long, default_value = "unit")]
        weighting: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz DOT with κ on edges and Bakry-Emery curvature on vertices.
    ExportDot {
        graph: PathBuf,
        /// CSV from `curvature`; edge curvatures are computed when omitted.
        #[arg(long)]
        curvature: Option<PathBuf>,
        /// CSV from `bakry-emery`; computed when omitted.
        #[arg(long)]
        be: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree bound, q_min and curvature sign of a graph.
    CheckHypotheses {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn configure_threads() -> Result<(), commands::CliError> {
    let Ok(value) = std::env::var("CURVLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| commands::CliError::Usage(format!("CURVLAB_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, commands::CliError> {
    configure_threads()?;
    use commands::*;
    match cli.command {
        Command::Curvature {
            graph,
            pairs,
            method,
            format,
            common,
        } => curvature(&graph, &pairs, method, format, &common),
        Command::Plan { graph, pair, common } => plan(&graph, &pair, &common),
        Command::Surgery {
            graph,
            pair,
            xprime,
            common,
        } => surgery(&graph, &pair, xprime.as_deref(), &common),
        Command::BakryEmery {
            graph,
            format,
            dump_forms,
            out,
        } => bakry_emery(&graph, format, dump_forms, out.as_deref()),
        Command::NoImplication { max_vertices, out } => no_implication(max_vertices, out.as_deref()),
        Command::Heat {
            graph,
            samples,
            t_grid,
            out,
        } => heat(&graph, &samples, &t_grid, out.as_deref()),
        Command::Decay {
            graph,
            samples,
            k,
            t_grid,
            format,
            plot,
            out,
        } => decay(&graph, &samples, &k, &t_grid, format, plot.as_deref(), out.as_deref()),
        Command::Concentration {
            graph,
            samples,
            k,
            r_grid,
            format,
            plot,
            out,
        } => concentration(&graph, &samples, &k, &r_grid, format, plot.as_deref(), out.as_deref()),
        Command::Gen { family, weighting, out } => gen(&family, &weighting, out.as_deref()),
        Command::ExportDot {
            graph,
            curvature,
            be,
            out,
        } => export_dot(&graph, curvature.as_deref(), be.as_deref(), out.as_deref()),
        Command::CheckHypotheses { graph, out } => check_hypotheses(&graph, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
