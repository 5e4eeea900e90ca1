use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hoi_forge::commands::{self, render::DepthFormat};
use hoi_forge::{CliError, PipelineConfig};

/// Hand-object interaction toolkit: trajectory synthesis, condition
/// rendering, latent packing, evaluation and candidate filtering.
#[derive(Parser)]
#[command(name = "hoi-forge", version)]
struct Cli {
    /// Worker threads for per-frame and per-clip work.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Replace every configured seed (encoder, masking, tracklets).
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interpolate a pose sequence between endpoint poses and validate it.
    Trajgen {
        #[arg(long)]
        config: PathBuf,
        /// Endpoints JSON; defaults to assets.endpoints from the config.
        #[arg(long)]
        endpoints: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Object mesh OBJ overriding assets.object_mesh.
        #[arg(long)]
        object: Option<PathBuf>,
    },
    /// Render per-frame depth/segmentation/keypoint conditions and tracklets.
    Render {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        object: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        depth_format: DepthFormat,
    },
    /// Pack rendered conditions into per-cue and concatenated latents.
    Pack {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        conditions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a clip manifest into a metrics report.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional per-clip CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Drop the worst candidates by pose error and write the kept manifest.
    Filter {
        #[arg(long)]
        manifest: PathBuf,
        /// Fraction of candidates to discard (largest pose error first).
        #[arg(long, default_value_t = 0.25)]
        fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full run: poses, conditions, latents and a report in one directory.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        endpoints: Option<PathBuf>,
        /// Directory of externally generated artifacts to evaluate.
        #[arg(long)]
        generated: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed_override: Option<u64>) -> Result<PipelineConfig, CliError> {
    let mut config = PipelineConfig::load(path)?;
    if let Some(seed) = seed_override {
        config.override_seeds(seed);
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trajgen { config, endpoints, out, object } => {
            let config = load_config(&config, cli.seed_override)?;
            let endpoints_path = match endpoints {
                Some(p) => p,
                None => config
                    .assets
                    .endpoints
                    .clone()
                    .map(|p| config.resolve(&p))
                    .ok_or_else(|| {
                        CliError::Schema(
                            "no endpoints file: set assets.endpoints or pass --endpoints".into(),
                        )
                    })?,
            };
            let outcome =
                commands::trajgen::run(&config, &endpoints_path, &out, object.as_deref())?;
            println!("wrote {} ({} frames)", out.display(), outcome.sequence.len());
            match &outcome.validation {
                Some(v) => println!(
                    "validation: pass={} max_penetration={:.3}mm max_speed={:.3}m/s",
                    v.pass,
                    v.max_penetration_m * 1e3,
                    v.max_joint_speed_mps
                ),
                None => println!("validation: skipped (no object mesh configured)"),
            }
        }
        Command::Render { config, sequence, out, object, depth_format } => {
            let config = load_config(&config, cli.seed_override)?;
            let outcome =
                commands::render::run(&config, &sequence, &out, object.as_deref(), depth_format)?;
            println!(
                "rendered {} frames and {} tracklets into {}",
                outcome.frames,
                outcome.tracklets,
                out.display()
            );
        }
        Command::Pack { config, conditions, out } => {
            let config = load_config(&config, cli.seed_override)?;
            let outcome = commands::pack::run(&config, &conditions, &out)?;
            println!(
                "packed latents {:?} into {} (dropped cues: {:?})",
                outcome.latent_shape,
                out.display(),
                outcome.dropped
            );
        }
        Command::Eval { config, manifest, out, csv } => {
            let config = load_config(&config, cli.seed_override)?;
            let outcome = commands::eval::run(&config, &manifest, &out, csv.as_deref())?;
            println!(
                "evaluated {} clips -> {} (skipped: {:?})",
                outcome.report.counts.clips,
                out.display(),
                outcome.report.skipped
            );
        }
        Command::Filter { manifest, fraction, out } => {
            let outcome = commands::filter::run(&manifest, fraction, &out)?;
            println!("kept {} candidates, discarded {}", outcome.kept, outcome.discarded);
        }
        Command::Pipeline { config, out, endpoints, generated } => {
            let config = load_config(&config, cli.seed_override)?;
            let outcome =
                commands::pipeline::run(&config, &out, endpoints.as_deref(), generated.as_deref())?;
            match outcome.validation_pass {
                Some(pass) => println!("pipeline done, validation pass={pass}"),
                None => println!("pipeline done (validation skipped)"),
            }
            println!("report: {}", outcome.report_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: failed to build thread pool: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
