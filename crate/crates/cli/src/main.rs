//! `qlgraph` — construct composite graphs carrying a target two-level state
//! in their top eigenvectors, verify them spectrally, and analyze the
//! associated random walks and gap feasibility. Every command is
//! reproducible bit-for-bit from its `--seed`.

#![allow(clippy::manual_is_multiple_of)]

mod commands;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use qlgraph::qlcore::{Branch, QlError};

#[derive(Parser)]
#[command(name = "qlgraph", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Undirected coupling, detuned subgraph regularities.
    Symmetric,
    /// Directed coupling regularities with equal subgraph degrees.
    Asymmetric,
    /// Real coupling weights hitting the target ratio exactly.
    ContinuousL,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum BranchArg {
    Delta,
    DeltaInv,
    DeltaC,
    DeltaCInv,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Delta => Branch::Delta,
            BranchArg::DeltaInv => Branch::DeltaInv,
            BranchArg::DeltaC => Branch::DeltaC,
            BranchArg::DeltaCInv => Branch::DeltaCInv,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Plan, generate, assemble, and verify a construction end to end.
    /// Exits 0 only when the verified residual is at most 1e-8 and the
    /// fidelity at least 1 - 1e-8; an infeasible plan exits 2.
    #[command(group(ArgGroup::new("target").required(true).args(["a", "ratio"])))]
    Construct {
        /// Target amplitude of |+⟩ (normalized together with --b).
        #[arg(long, allow_hyphen_values = true, requires = "b")]
        a: Option<f64>,
        /// Target amplitude of |−⟩.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Target branch ratio instead of amplitudes (requires --branch).
        #[arg(long, allow_hyphen_values = true, requires = "branch")]
        ratio: Option<f64>,
        #[arg(long, value_enum)]
        branch: Option<BranchArg>,
        #[arg(long, value_enum, default_value = "symmetric")]
        mode: Mode,
        /// Vertices per subgraph.
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// Minimum degree accepted by the rationalizer.
        #[arg(long, default_value_t = 1)]
        floor: usize,
        /// Coupling sign (+1 or -1).
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        sign: i64,
        /// Subgraph degrees for continuous-l mode.
        #[arg(long = "kA", requires = "k_b")]
        k_a: Option<usize>,
        #[arg(long = "kB")]
        k_b: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for plan.json, graph.json, report.json (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a graph JSON against its plan; the report reproduces the
    /// construct output byte-for-byte.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral-gap feasibility: closed-form bounds and optional Monte-Carlo
    /// sampling.
    Gap {
        #[arg(long = "min-gap", default_value_t = 1.0)]
        min_gap: f64,
        /// Edge probability: reports the minimum feasible order.
        #[arg(long)]
        p: Option<f64>,
        /// Graph order: reports the minimum feasible edge probability.
        #[arg(long)]
        n: Option<usize>,
        /// Report the asymptotic minimum regularity only.
        #[arg(long, default_value_t = false)]
        limit: bool,
        /// Monte-Carlo trials at p = min_p + 0.05 (or --p when given).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary distribution of the random walk on a composite.
    Walk {
        /// Detuning for the scale-sweep form (with --x).
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        /// Free scale X = k_A / l.
        #[arg(long = "X")]
        x: Option<f64>,
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, value_enum, default_value = "symmetric")]
        mode: Mode,
        /// Subgraph degree for asymmetric walks.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "lA")]
        l_a: Option<usize>,
        #[arg(long = "lB")]
        l_b: Option<usize>,
        /// Walk on an existing graph JSON instead of generating one.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the feasible amplitude lines of a branch as (a, b, ratio) CSV.
    Curves {
        #[arg(long, value_enum)]
        branch: BranchArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
        min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
        max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble a two-bit composite and verify the proposed product-basis
    /// eigenpairs.
    Twoqubit {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long)]
        j1: usize,
        #[arg(long)]
        j2: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the extended graph JSON here.
        #[arg(long = "graph-out")]
        graph_out: Option<PathBuf>,
    },
    /// Full spectrum of a symmetric composite from its graph JSON.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct {
            a,
            b,
            ratio,
            branch,
            mode,
            n,
            floor,
            sign,
            k_a,
            k_b,
            seed,
            out,
        } => commands::construct(commands::ConstructArgs {
            a,
            b,
            ratio,
            branch: branch.map(Into::into),
            mode,
            n,
            floor,
            sign,
            k_a,
            k_b,
            seed,
            out,
        }),
        Command::Verify { graph, plan, out } => commands::verify(&graph, &plan, out.as_deref()),
        Command::Gap {
            min_gap,
            p,
            n,
            limit,
            trials,
            seed,
            format,
            out,
        } => commands::gap(min_gap, p, n, limit, trials, seed, format, out.as_deref()),
        Command::Walk {
            delta,
            x,
            n,
            mode,
            k,
            l_a,
            l_b,
            graph,
            seed,
            format,
            out,
        } => commands::walk(commands::WalkArgs {
            delta,
            x,
            n,
            mode,
            k,
            l_a,
            l_b,
            graph,
            seed,
            format,
            out,
        }),
        Command::Curves {
            branch,
            min,
            max,
            samples,
            out,
        } => commands::curves(branch.into(), min, max, samples, out.as_deref()),
        Command::Twoqubit {
            n,
            k,
            l,
            j1,
            j2,
            seed,
            out,
            graph_out,
        } => commands::twoqubit(n, k, l, j1, j2, seed, out.as_deref(), graph_out.as_deref()),
        Command::Spectrum { graph, format, out } => {
            commands::spectrum(&graph, format, out.as_deref())
        }
    };

    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let infeasible = err
                .downcast_ref::<QlError>()
                .is_some_and(|e| matches!(e, QlError::Infeasible { .. }));
            if infeasible {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
