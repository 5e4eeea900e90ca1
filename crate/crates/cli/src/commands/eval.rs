//! `eval`: per-clip metric evaluation over a manifest, aggregated into a
//! MetricsReport. Metrics whose inputs are missing land on the skipped list
//! instead of failing the run; the Fréchet core pools feature rows across
//! clips since it compares distributions, not clips.

use std::path::Path;

use nalgebra::Point3;
use rayon::prelude::*;

use hoi_forge_core::metrics::{
    fscore, feature_stats, frechet_distance, load_features, load_point_frames, motion_fidelity_eps,
    mpjpe_root_aligned, pa_mpjpe, pa_mpvpe, pairwise_mean, psnr, save_report, ssim, JointRole,
    JointSet, MetricsReport, ReportCounts, JOINTS_PER_HAND,
};
use hoi_forge_core::raster::{load_tracklets, read_rgb_png};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{ClipManifest, ClipRecord};

#[derive(Debug, Clone)]
pub struct ClipMetrics {
    pub id: String,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub mf: Option<f64>,
    pub mpjpe_mm: Option<f64>,
    pub pa_mpjpe_mm: Option<f64>,
    pub pa_mpvpe_mm: Option<f64>,
    /// One entry per configured threshold.
    pub fscores: Vec<Option<f64>>,
    pub frames: usize,
    pub tracks: usize,
}

pub struct EvalOutcome {
    pub report: MetricsReport,
    pub per_clip: Vec<ClipMetrics>,
}

fn joint_set(points: &[Point3<f64>], role: JointRole, what: &str) -> CliResult<JointSet> {
    let arr: [Point3<f64>; JOINTS_PER_HAND] = points.try_into().map_err(|_| {
        CliError::Shape(format!("{what}: expected {JOINTS_PER_HAND} joints, got {}", points.len()))
    })?;
    Ok(JointSet::new(arr, role)?)
}

fn evaluate_clip(
    config: &PipelineConfig,
    manifest: &ClipManifest,
    record: &ClipRecord,
) -> CliResult<(ClipMetrics, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let thresholds = &config.metrics.fscore_thresholds_mm;
    let mut clip = ClipMetrics {
        id: record.id.clone(),
        psnr: None,
        ssim: None,
        mf: None,
        mpjpe_mm: None,
        pa_mpjpe_mm: None,
        pa_mpvpe_mm: None,
        fscores: vec![None; thresholds.len()],
        frames: 0,
        tracks: 0,
    };

    if let (Some(gt), Some(gen)) = (&record.gt_frames, &record.generated_frames) {
        let gt_files = super::list_files(&manifest.resolve(gt), "png")?;
        let gen_files = super::list_files(&manifest.resolve(gen), "png")?;
        if gt_files.len() != gen_files.len() || gt_files.is_empty() {
            return Err(CliError::Shape(format!(
                "clip {}: {} ground-truth frames vs {} generated",
                record.id,
                gt_files.len(),
                gen_files.len()
            )));
        }
        let mut psnrs = Vec::with_capacity(gt_files.len());
        let mut ssims = Vec::with_capacity(gt_files.len());
        for (g, p) in gt_files.iter().zip(&gen_files) {
            let a = read_rgb_png(g)?;
            let b = read_rgb_png(p)?;
            psnrs.push(psnr(&b, &a)?);
            ssims.push(ssim(&b, &a)?);
        }
        clip.psnr = Some(pairwise_mean(&psnrs));
        clip.ssim = Some(pairwise_mean(&ssims));
        clip.frames = clip.frames.max(gt_files.len());
    }

    if let (Some(gt), Some(gen)) = (&record.gt_tracklets, &record.gen_tracklets) {
        let gt_tracks = load_tracklets(&manifest.resolve(gt))?;
        let gen_tracks = load_tracklets(&manifest.resolve(gen))?;
        clip.mf = Some(motion_fidelity_eps(
            &gt_tracks,
            &gen_tracks,
            config.metrics.correlation_eps,
        )?);
        clip.tracks = gt_tracks.len() + gen_tracks.len();
    }

    if let (Some(gt), Some(pred)) = (&record.gt_joints, &record.pred_joints) {
        let gt_frames = load_point_frames(&manifest.resolve(gt))?;
        let pred_frames = load_point_frames(&manifest.resolve(pred))?;
        if gt_frames.len() != pred_frames.len() || gt_frames.is_empty() {
            return Err(CliError::Shape(format!(
                "clip {}: joint frame counts differ ({} vs {})",
                record.id,
                gt_frames.len(),
                pred_frames.len()
            )));
        }
        let mut mpjpes = Vec::with_capacity(gt_frames.len());
        let mut pa = Vec::with_capacity(gt_frames.len());
        for (g, p) in gt_frames.iter().zip(&pred_frames) {
            let gt_set = joint_set(g, JointRole::GroundTruth, &record.id)?;
            let pred_set = joint_set(p, JointRole::Predicted, &record.id)?;
            mpjpes.push(mpjpe_root_aligned(&pred_set, &gt_set));
            pa.push(pa_mpjpe(&pred_set, &gt_set)?);
        }
        clip.mpjpe_mm = Some(pairwise_mean(&mpjpes));
        clip.pa_mpjpe_mm = Some(pairwise_mean(&pa));
        clip.frames = clip.frames.max(gt_frames.len());
    }

    if let (Some(gt), Some(pred)) = (&record.gt_vertices, &record.pred_vertices) {
        let gt_frames = load_point_frames(&manifest.resolve(gt))?;
        let pred_frames = load_point_frames(&manifest.resolve(pred))?;
        if gt_frames.len() != pred_frames.len() || gt_frames.is_empty() {
            return Err(CliError::Shape(format!(
                "clip {}: vertex frame counts differ ({} vs {})",
                record.id,
                gt_frames.len(),
                pred_frames.len()
            )));
        }
        let mut pa = Vec::with_capacity(gt_frames.len());
        let mut fs = vec![Vec::with_capacity(gt_frames.len()); thresholds.len()];
        for (g, p) in gt_frames.iter().zip(&pred_frames) {
            pa.push(pa_mpvpe(p, g)?);
            for (k, &thr) in thresholds.iter().enumerate() {
                fs[k].push(fscore(p, g, thr));
            }
        }
        clip.pa_mpvpe_mm = Some(pairwise_mean(&pa));
        for (k, values) in fs.iter().enumerate() {
            clip.fscores[k] = Some(pairwise_mean(values));
        }
        clip.frames = clip.frames.max(gt_frames.len());
    }

    let mut gt_feature_rows = Vec::new();
    let mut pred_feature_rows = Vec::new();
    if let (Some(gt), Some(pred)) = (&record.gt_features, &record.pred_features) {
        gt_feature_rows = load_features(&manifest.resolve(gt))?;
        pred_feature_rows = load_features(&manifest.resolve(pred))?;
    }

    Ok((clip, gt_feature_rows, pred_feature_rows))
}

fn aggregate(
    values: impl Iterator<Item = Option<f64>>,
    name: &str,
    skipped: &mut Vec<String>,
) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    if present.is_empty() {
        skipped.push(name.to_string());
        None
    } else {
        Some(pairwise_mean(&present))
    }
}

pub fn run(
    config: &PipelineConfig,
    manifest_path: &Path,
    out: &Path,
    csv: Option<&Path>,
) -> CliResult<EvalOutcome> {
    let manifest = ClipManifest::load(manifest_path)?;
    if manifest.records.is_empty() {
        return Err(CliError::Schema(format!("{}: empty manifest", manifest_path.display())));
    }

    let results: Vec<(ClipMetrics, Vec<Vec<f64>>, Vec<Vec<f64>>)> = manifest
        .records
        .par_iter()
        .map(|record| evaluate_clip(config, &manifest, record))
        .collect::<CliResult<Vec<_>>>()?;

    let per_clip: Vec<ClipMetrics> = results.iter().map(|(c, _, _)| c.clone()).collect();
    let mut skipped = Vec::new();
    let mut report = MetricsReport {
        psnr: aggregate(per_clip.iter().map(|c| c.psnr), "psnr", &mut skipped),
        ssim: aggregate(per_clip.iter().map(|c| c.ssim), "ssim", &mut skipped),
        mf: aggregate(per_clip.iter().map(|c| c.mf), "mf", &mut skipped),
        mpjpe_mm: aggregate(per_clip.iter().map(|c| c.mpjpe_mm), "mpjpe_mm", &mut skipped),
        pa_mpjpe_mm: aggregate(per_clip.iter().map(|c| c.pa_mpjpe_mm), "pa_mpjpe_mm", &mut skipped),
        pa_mpvpe_mm: aggregate(per_clip.iter().map(|c| c.pa_mpvpe_mm), "pa_mpvpe_mm", &mut skipped),
        ..Default::default()
    };
    for (k, &thr) in config.metrics.fscore_thresholds_mm.iter().enumerate() {
        let key = MetricsReport::fscore_key(thr);
        if let Some(v) =
            aggregate(per_clip.iter().map(|c| c.fscores[k]), &format!("fscore_at[{key}]"), &mut skipped)
        {
            report.fscore_at.insert(key, v);
        }
    }

    // Fréchet core over pooled features: one distance for the whole set.
    let gt_rows: Vec<Vec<f64>> = results.iter().flat_map(|(_, g, _)| g.clone()).collect();
    let pred_rows: Vec<Vec<f64>> = results.iter().flat_map(|(_, _, p)| p.clone()).collect();
    if gt_rows.is_empty() && pred_rows.is_empty() {
        skipped.push("fvd_core".into());
    } else {
        let gt_stats = feature_stats(&gt_rows)?;
        let pred_stats = feature_stats(&pred_rows)?;
        report.fvd_core = Some(frechet_distance(&pred_stats, &gt_stats)?);
    }

    report.skipped = skipped;
    report.counts = ReportCounts {
        clips: per_clip.len(),
        frames: per_clip.iter().map(|c| c.frames).sum(),
        tracks: per_clip.iter().map(|c| c.tracks).sum(),
    };

    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    save_report(out, &report)?;
    if let Some(csv_path) = csv {
        write_csv(csv_path, &per_clip, &config.metrics.fscore_thresholds_mm)?;
    }
    Ok(EvalOutcome { report, per_clip })
}

fn write_csv(path: &Path, clips: &[ClipMetrics], thresholds: &[f64]) -> CliResult<()> {
    let mut out = String::from("id,psnr,ssim,mf,mpjpe_mm,pa_mpjpe_mm,pa_mpvpe_mm");
    for &thr in thresholds {
        out.push_str(&format!(",fscore_{}", MetricsReport::fscore_key(thr)));
    }
    out.push('\n');
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for clip in clips {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}",
            clip.id,
            cell(clip.psnr),
            cell(clip.ssim),
            cell(clip.mf),
            cell(clip.mpjpe_mm),
            cell(clip.pa_mpjpe_mm),
            cell(clip.pa_mpvpe_mm),
        ));
        for f in &clip.fscores {
            out.push(',');
            out.push_str(&cell(*f));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
