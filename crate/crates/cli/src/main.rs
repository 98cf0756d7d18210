use std::path::PathBuf;
use std::process::ExitCode;

use apapr_cli::{CliError, Format, Options, Outcome};
use clap::{Args, Parser, Subcommand};

/// Evaluate and verify almost paracontact almost paracomplex Riemannian
/// manifolds given by a JSON spec.
#[derive(Parser)]
#[command(name = "apapr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check at the spec points; exits with 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Class decomposition of F.
    Classify {
        #[command(flatten)]
        common: Common,
        /// A single point `t,x,y` instead of the spec points.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Option<[f64; 3]>,
    },
    /// Curvature table: τ, τ*, sectional curvatures and ρ.
    Curvature {
        #[command(flatten)]
        common: Common,
        /// n values of t times an n×n grid on the xy box instead of the spec points.
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    tol_structure: Option<f64>,
    #[arg(long)]
    tol_class: Option<f64>,
    #[arg(long)]
    tol_curvature: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Overrides the sampling seed of the spec.
    #[arg(long)]
    seed: Option<u64>,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options {
            spec: c.spec,
            tol_structure: c.tol_structure,
            tol_class: c.tol_class,
            tol_curvature: c.tol_curvature,
            out: c.out,
            format: c.format,
            seed: c.seed,
        }
    }
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected three numbers t,x,y".to_string())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts: Options;
    let result: Outcome = match cli.command {
        Command::Verify { common } => {
            opts = common.into();
            apapr_cli::verify(&opts)?
        }
        Command::Classify { common, point } => {
            opts = common.into();
            apapr_cli::classify(&opts, point)?
        }
        Command::Curvature { common, grid } => {
            opts = common.into();
            apapr_cli::curvature(&opts, grid)?
        }
    };
    result.write(opts.out.as_ref())?;
    for c in &result.checks {
        eprintln!("{}", c.line());
    }
    Ok(result.pass())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("apapr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
