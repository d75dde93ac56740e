//! `kleinlab`: orbits, Poincare series, conformal measures, shadows and
//! end decompositions for explicitly presented Kleinian groups.
//!
//! Every command is deterministic given its inputs, the seed and the
//! parameters; the worker count never changes any output byte.

mod commands;
mod exit;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "kleinlab", version, about = "numerical laboratory for Kleinian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Group definition file (JSON).
    #[arg(long)]
    group: PathBuf,
    /// Ends definition file (JSON), when the command needs one.
    #[arg(long)]
    ends: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Seed for sampled diagnostics.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for enumeration; results are independent of this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Word budget cap for enumerations.
    #[arg(long, default_value_t = kleinlab_core::group::DEFAULT_WORD_CAP)]
    cap: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the orbit table and a limit-set sample.
    Orbit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        depth: usize,
        /// Depth for the limit-set sample (defaults to the orbit depth).
        #[arg(long)]
        sample_depth: Option<usize>,
    },
    /// Estimate the critical exponent.
    Delta {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        depth: usize,
        /// Exponent at which per-shell diagnostics are exported.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Optional growth-fit window `lo,hi`.
        #[arg(long, value_parser = parse_pair)]
        window: Option<(f64, f64)>,
    },
    /// Build the atomic orbit measure and its conformality report.
    Measure {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        depth: usize,
        /// Keep raw weights instead of normalizing to total mass 1.
        #[arg(long, default_value_t = false)]
        raw: bool,
    },
    /// Measure the shadow-lemma constant of the normalized orbit measure.
    ShadowLemma {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        /// Word-length truncation of the scanned shadows.
        #[arg(long)]
        depth: usize,
        /// Truncation of the measured orbit measure.
        #[arg(long)]
        measure_depth: usize,
        /// Hyperbolic radius of the shadow source balls.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Escape mass into thin shells toward the boundary.
    Escape {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        depth: usize,
        /// End whose boundary orbit seeds the sum (by name).
        #[arg(long)]
        end: String,
        /// Decreasing shell widths, comma separated.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// Shadow-lemma constant; measured at --measure-depth when absent.
        #[arg(long)]
        constant: Option<f64>,
        #[arg(long, default_value_t = 8)]
        measure_depth: usize,
    },
    /// Extend an end-supported measure over coset representatives.
    Extend {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        /// Coset enumeration depth.
        #[arg(long)]
        depth: usize,
        /// End whose stabilizer defines the cosets (by name).
        #[arg(long)]
        end: String,
    },
    /// Station run toward an end and decomposition of the deepest station.
    Decompose {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        depth: usize,
        /// Station radii, increasing toward 1.
        #[arg(long, value_delimiter = ',')]
        stations: Vec<f64>,
        #[arg(long, default_value_t = 6)]
        coset_depth: usize,
        /// Euclidean boundary band for endpoint approximants.
        #[arg(long, default_value_t = 1e-4)]
        band: f64,
        /// Test caps: count and angular radius.
        #[arg(long, default_value_t = 256)]
        caps: usize,
        #[arg(long, default_value_t = 0.02)]
        cap_angle: f64,
        /// Write the full per-station measures as CSV.
        #[arg(long, default_value_t = false)]
        write_measures: bool,
    },
    /// Classify boundary points by ray tracing.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeded boundary samples (ignored when --points given).
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// CSV file of boundary points to classify instead of sampling.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 25.0)]
        ray_depth: f64,
        #[arg(long, default_value_t = 8)]
        orbit_depth: usize,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected lo,hi".into());
    }
    let lo = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi = parts[1].parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("kleinlab: {err:#}");
            exit::exit_code(&err)
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Orbit { common, depth, sample_depth } => {
            commands::orbit(&common, depth, sample_depth)
        }
        Command::Delta { common, depth, alpha, window } => {
            commands::delta(&common, depth, alpha, window)
        }
        Command::Measure { common, alpha, depth, raw } => {
            commands::measure(&common, alpha, depth, raw)
        }
        Command::ShadowLemma { common, alpha, depth, measure_depth, radius } => {
            commands::shadow_lemma(&common, alpha, depth, measure_depth, radius)
        }
        Command::Escape { common, alpha, depth, end, grid, constant, measure_depth } => {
            commands::escape(&common, alpha, depth, &end, &grid, constant, measure_depth)
        }
        Command::Extend { common, alpha, depth, end } => {
            commands::extend(&common, alpha, depth, &end)
        }
        Command::Decompose {
            common,
            alpha,
            depth,
            stations,
            coset_depth,
            band,
            caps,
            cap_angle,
            write_measures,
        } => commands::decompose(
            &common,
            alpha,
            depth,
            &stations,
            coset_depth,
            band,
            caps,
            cap_angle,
            write_measures,
        ),
        Command::Classify { common, samples, points, ray_depth, orbit_depth } => {
            commands::classify(&common, samples, points.as_deref(), ray_depth, orbit_depth)
        }
    }
}
