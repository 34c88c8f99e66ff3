use clap::{Args, Parser, Subcommand};

use greedylab::config::{Overrides, RunConfig};
use greedylab::runner;
use greedylab::AppError;

/// Greedy-approximation workbench: compute basis parameters, threshold
/// functions, and Lebesgue constants on catalog bases, and verify the
/// inequality suite over the whole catalog.
#[derive(Parser)]
#[command(name = "greedylab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration file (defaults apply when absent)
    #[arg(long)]
    config: Option<String>,
    /// Override catalog dimension
    #[arg(long)]
    dim: Option<usize>,
    /// Override catalog seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override grid ratio s
    #[arg(long = "grid-s")]
    grid_s: Option<f64>,
    /// Override grid size K
    #[arg(long = "grid-k")]
    grid_k: Option<usize>,
    /// Override output directory
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BasisArgs {
    /// Basis id (lp:<p>:<dim> | summing:<dim> | l2blocks:<p>:<s1+s2+...> | fuzz:<dim>)
    #[arg(long, conflicts_with = "basis_file")]
    basis: Option<String>,
    /// Custom basis JSON file
    #[arg(long)]
    basis_file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parameter tables (phi, mu, k, SUCC, quasi-greedy, truncation-qg)
    Params {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        basis: BasisArgs,
        /// Fail with a capacity error instead of degrading to lower bounds
        #[arg(long)]
        exact: bool,
    },
    /// Threshold function tables (lambda, theta, phi on the grid)
    Thresholds {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        basis: BasisArgs,
        /// Fail with a capacity error instead of degrading to probe bounds
        #[arg(long)]
        exact: bool,
    },
    /// Best m-term and Lebesgue constant tables
    Lebesgue {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        basis: BasisArgs,
    },
    /// Run every check over the whole catalog; exit 0 iff nothing fails
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn overrides(common: &CommonArgs) -> Overrides {
    Overrides {
        dim: common.dim,
        seed: common.seed,
        grid_s: common.grid_s,
        grid_k: common.grid_k,
        out: common.out.clone(),
    }
}

fn pick_basis(
    args: &BasisArgs,
    config: &RunConfig,
) -> Result<greedylab_core::basis::CatalogEntry, AppError> {
    match (&args.basis, &args.basis_file) {
        (Some(id), None) => runner::resolve_basis_id(id, config),
        (None, Some(path)) => runner::load_basis_file(path),
        (None, None) => Err(AppError::Usage(
            "one of --basis or --basis-file is required".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn run() -> Result<(), AppError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Params {
            common,
            basis,
            exact,
        } => {
            let config = RunConfig::load(common.config.as_deref(), &overrides(&common))?;
            let entry = pick_basis(&basis, &config)?;
            runner::warn_if_ill_conditioned(&entry);
            runner::cmd_params(&config, &entry, exact)
        }
        Command::Thresholds {
            common,
            basis,
            exact,
        } => {
            let config = RunConfig::load(common.config.as_deref(), &overrides(&common))?;
            let entry = pick_basis(&basis, &config)?;
            runner::warn_if_ill_conditioned(&entry);
            runner::cmd_thresholds(&config, &entry, exact)
        }
        Command::Lebesgue { common, basis } => {
            let config = RunConfig::load(common.config.as_deref(), &overrides(&common))?;
            let entry = pick_basis(&basis, &config)?;
            runner::warn_if_ill_conditioned(&entry);
            runner::cmd_lebesgue(&config, &entry)
        }
        Command::Verify { common } => {
            let config = RunConfig::load(common.config.as_deref(), &overrides(&common))?;
            let (reports, kt) = runner::cmd_verify(&config)?;
            runner::verify_exit(&reports, &kt)
        }
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
