mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::JobConfig;
use padic_mra::error::MraError;
use padic_mra::function::{grid_cap, set_grid_cap, DEFAULT_GRID_CAP, GRID_CAP_ENV};
use padic_mra::mra::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "padic-mra", version, about = "p-adic multiresolution analysis toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Prime p
    #[arg(long, global = true)]
    p: Option<u32>,

    /// Scale N (support radius exponent)
    #[arg(long = "N", global = true)]
    n: Option<u32>,

    /// Fourier support exponent M
    #[arg(long = "M", global = true, allow_negative_numbers = true)]
    m: Option<i32>,

    /// Tolerance for zero tests
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Seed for randomly generated inputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Print machine-readable JSON
    #[arg(long, global = true)]
    json: bool,

    /// Output file (or directory for `haar`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Maximum number of grid points
    #[arg(long, global = true, env = GRID_CAP_ENV)]
    grid_cap: Option<usize>,

    /// Smallest sphere exponent listed for the density axiom
    #[arg(long, global = true, default_value_t = -6, allow_negative_numbers = true)]
    sphere_min: i32,

    /// Largest sphere exponent listed for the density axiom
    #[arg(long, global = true, default_value_t = 6, allow_negative_numbers = true)]
    sphere_max: i32,
}

#[derive(Subcommand)]
enum Command {
    /// Haar pipeline: mask, scaling function, MRA report, wavelets, frame bounds
    Haar,
    /// Mask construction and inspection
    #[command(subcommand)]
    Mask(MaskCommand),
    /// Refinable function of a mask
    Refine {
        #[arg(long)]
        mask: PathBuf,
        /// Also write |φ̂| on the Fourier grid as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// MRA report for a test function
    Check {
        #[arg(long)]
        phi: PathBuf,
    },
    /// Orthonormality of the shifts of a test function
    Ortho {
        #[arg(long)]
        phi: PathBuf,
    },
    /// Wavelet set of a scaling function
    Wavelets {
        #[arg(long)]
        phi: PathBuf,
        /// Refinement mask; recovered from φ when omitted
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Rescale the wavelets to unit norm
        #[arg(long)]
        normalize: bool,
    },
    /// Frame bounds of a wavelet set
    Frame {
        #[arg(long)]
        wavelets: PathBuf,
    },
    /// Multi-level analysis and synthesis round trip
    Transform {
        /// Wavelet set; the Haar set for --p when omitted
        #[arg(long)]
        wavelets: Option<PathBuf>,
        /// Function to transform; random in V_{j1} when omitted
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        j0: i32,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        j1: i32,
    },
}

#[derive(Subcommand)]
enum MaskCommand {
    /// Minimal mask vanishing at the given points
    NewFromRoots {
        /// Comma-separated rationals such as 1/4,3/8 or 7/2^4
        #[arg(long, value_delimiter = ',')]
        roots: Vec<String>,
    },
    /// Evaluate a mask at points of Q_p
    Eval {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<String>,
    },
    /// Degree, value at 0 and (with --M) the Fourier support test
    Info {
        #[arg(long)]
        mask: PathBuf,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Haar => "haar",
        Command::Mask(MaskCommand::NewFromRoots { .. }) => "mask new-from-roots",
        Command::Mask(MaskCommand::Eval { .. }) => "mask eval",
        Command::Mask(MaskCommand::Info { .. }) => "mask info",
        Command::Refine { .. } => "refine",
        Command::Check { .. } => "check",
        Command::Ortho { .. } => "ortho",
        Command::Wavelets { .. } => "wavelets",
        Command::Frame { .. } => "frame",
        Command::Transform { .. } => "transform",
    }
}

fn inputs(c: &Command) -> Vec<String> {
    let show = |p: &PathBuf| p.display().to_string();
    match c {
        Command::Haar | Command::Mask(MaskCommand::NewFromRoots { .. }) => vec![],
        Command::Mask(MaskCommand::Eval { mask, .. })
        | Command::Mask(MaskCommand::Info { mask })
        | Command::Refine { mask, .. } => vec![show(mask)],
        Command::Check { phi } | Command::Ortho { phi } => vec![show(phi)],
        Command::Wavelets { phi, mask, .. } => {
            std::iter::once(phi).chain(mask.as_ref()).map(show).collect()
        }
        Command::Frame { wavelets } => vec![show(wavelets)],
        Command::Transform { wavelets, f, .. } => wavelets.iter().chain(f.as_ref()).map(show).collect(),
    }
}

fn run(cli: Cli) -> Result<bool, MraError> {
    let g = &cli.global;
    set_grid_cap(g.grid_cap.unwrap_or(DEFAULT_GRID_CAP));
    let cfg = JobConfig {
        command: command_name(&cli.command).to_string(),
        p: g.p,
        n: g.n,
        m: g.m,
        tol: g.tol,
        grid_cap: grid_cap(),
        sphere_range: (g.sphere_min, g.sphere_max),
        inputs: inputs(&cli.command),
        output: g.out.as_ref().map(|p| p.display().to_string()),
        seed: g.seed,
    };
    cfg.validate()?;
    let outcome = match &cli.command {
        Command::Haar => commands::haar(&cfg)?,
        Command::Mask(MaskCommand::NewFromRoots { roots }) => commands::mask_from_roots(&cfg, roots)?,
        Command::Mask(MaskCommand::Eval { mask, xi }) => commands::mask_eval(&cfg, mask, xi)?,
        Command::Mask(MaskCommand::Info { mask }) => commands::mask_info(&cfg, mask)?,
        Command::Refine { mask, csv } => commands::refine(&cfg, mask, csv.as_deref())?,
        Command::Check { phi } => commands::check(&cfg, phi)?,
        Command::Ortho { phi } => commands::ortho(&cfg, phi)?,
        Command::Wavelets {
            phi,
            mask,
            normalize,
        } => commands::wavelets(&cfg, phi, mask.as_deref(), *normalize)?,
        Command::Frame { wavelets } => commands::frame(&cfg, wavelets)?,
        Command::Transform { wavelets, f, j0, j1 } => {
            commands::transform(&cfg, wavelets.as_deref(), f.as_deref(), *j0, *j1)?
        }
    };
    commands::emit(&cfg, &outcome, g.json, g.out.as_deref())?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
