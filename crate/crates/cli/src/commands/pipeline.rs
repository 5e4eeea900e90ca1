//! `pipeline`: trajgen -> render -> pack, then an optional evaluation pass
//! when externally generated artifacts are supplied. The output directory is
//! fully reproducible from config and seeds: no timestamps, no machine state.
//!
//! The `--generated DIR` layout is scanned for: `frames/` (RGB frames),
//! `gt_frames/` (reference frames for PSNR/SSIM), `tracklets.json`,
//! `joints.json`, `features.f32` and `gt_features.f32`. Whatever is present is
//! wired into the evaluation manifest against this run's rendered ground
//! truth; everything else lands on the report's skipped list.

use std::path::{Path, PathBuf};

use serde::Serialize;

use hoi_forge_core::metrics::MetricsReport;
use hoi_forge_core::trajectory::ValidationReport;

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{ClipManifest, ClipRecord};

use super::render::DepthFormat;

#[derive(Serialize)]
struct PipelineReport {
    schema: u32,
    validation: Option<ValidationReport>,
    stages: StageSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<MetricsReport>,
}

#[derive(Serialize)]
struct StageSummary {
    pose_sequence: String,
    condition_frames: usize,
    tracklets: usize,
    latent_shape: [usize; 4],
    dropped_cues: [bool; 3],
}

pub struct PipelineOutcome {
    pub report_path: PathBuf,
    pub validation_pass: Option<bool>,
}

pub fn run(
    config: &PipelineConfig,
    out_dir: &Path,
    endpoints_override: Option<&Path>,
    generated: Option<&Path>,
) -> CliResult<PipelineOutcome> {
    let endpoints_path = match endpoints_override {
        Some(p) => p.to_path_buf(),
        None => config
            .assets
            .endpoints
            .as_ref()
            .map(|p| config.resolve(p))
            .ok_or_else(|| {
                CliError::Schema("no endpoints file: set assets.endpoints or pass --endpoints".into())
            })?,
    };

    let poses_dir = out_dir.join("poses");
    let conditions_dir = out_dir.join("conditions");
    let latents_dir = out_dir.join("latents");
    std::fs::create_dir_all(&poses_dir)?;

    let sequence_path = poses_dir.join("sequence.json");
    let traj = super::trajgen::run(config, &endpoints_path, &sequence_path, None)?;
    if let Some(v) = &traj.validation {
        std::fs::write(poses_dir.join("validation.json"), serde_json::to_vec_pretty(v)?)?;
    }

    let rendered =
        super::render::run(config, &sequence_path, &conditions_dir, None, DepthFormat::Png16)?;
    let packed = super::pack::run(config, &conditions_dir, &latents_dir)?;

    let metrics = match generated {
        Some(dir) => Some(evaluate_generated(config, out_dir, &conditions_dir, dir)?),
        None => None,
    };

    let report = PipelineReport {
        schema: 1,
        validation: traj.validation.clone(),
        stages: StageSummary {
            pose_sequence: "poses/sequence.json".into(),
            condition_frames: rendered.frames,
            tracklets: rendered.tracklets,
            latent_shape: packed.latent_shape,
            dropped_cues: packed.dropped,
        },
        metrics,
    };
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_vec_pretty(&report)?)?;

    Ok(PipelineOutcome {
        report_path,
        validation_pass: traj.validation.as_ref().map(|v| v.pass),
    })
}

fn evaluate_generated(
    config: &PipelineConfig,
    out_dir: &Path,
    conditions_dir: &Path,
    generated: &Path,
) -> CliResult<MetricsReport> {
    // Manifest paths resolve against the manifest's own directory, so store
    // absolute paths; --out/--generated may have been given relative to cwd.
    let existing = |p: PathBuf| match p.exists() {
        true => Some(std::path::absolute(&p).unwrap_or(p)),
        false => None,
    };
    let record = ClipRecord {
        id: "pipeline".into(),
        pose_sequence: out_dir.join("poses/sequence.json"),
        object_mesh: config
            .assets
            .object_mesh
            .as_ref()
            .map(|p| config.resolve(p))
            .unwrap_or_default(),
        gt_frames: existing(generated.join("gt_frames")),
        generated_frames: existing(generated.join("frames")),
        gt_tracklets: existing(conditions_dir.join("tracklets.json")),
        gen_tracklets: existing(generated.join("tracklets.json")),
        gt_joints: existing(conditions_dir.join("joints.json")),
        pred_joints: existing(generated.join("joints.json")),
        gt_vertices: None,
        pred_vertices: None,
        gt_features: existing(generated.join("gt_features.f32")),
        pred_features: existing(generated.join("features.f32")),
        pose_error_mm: None,
    };
    let manifest_path = out_dir.join("eval_manifest.jsonl");
    ClipManifest::save(&manifest_path, &[record])?;
    let outcome = super::eval::run(config, &manifest_path, &out_dir.join("metrics.json"), None)?;
    Ok(outcome.report)
}
