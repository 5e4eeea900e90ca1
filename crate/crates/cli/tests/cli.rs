//! Integration tests for the command layer: config parsing, file contracts,
//! exit codes and cross-command consistency.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::json;
use tempfile::TempDir;

use hoi_forge::commands::{self, render::DepthFormat};
use hoi_forge::{CliError, ClipManifest, ClipRecord, PipelineConfig};

const CUBE_OBJ: &str = "\
v -0.03 -0.03 -0.03\nv 0.03 -0.03 -0.03\nv 0.03 0.03 -0.03\nv -0.03 0.03 -0.03\n\
v -0.03 -0.03 0.03\nv 0.03 -0.03 0.03\nv 0.03 0.03 0.03\nv -0.03 0.03 0.03\n\
f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\nf 1 2 6\nf 1 6 5\nf 3 4 8\nf 3 8 7\n\
f 2 3 7\nf 2 7 6\nf 4 1 5\nf 4 5 8\n";

fn zero_rots() -> Vec<[f64; 3]> {
    vec![[0.0; 3]; 16]
}

fn write_endpoints(path: &Path, h0: [f64; 3], h_end: [f64; 3]) {
    let value = json!({
        "schema": 1,
        "h0": {"trans": h0, "rots": zero_rots()},
        "hT": {"trans": h_end, "rots": zero_rots()},
        "o0": {"rot": [0.0, 0.0, 0.0], "trans": [0.05, 0.05, 0.7]},
        "oT": {"rot": [0.0, 0.3, 0.0], "trans": [0.07, 0.03, 0.68]},
    });
    std::fs::write(path, serde_json::to_vec_pretty(&value).unwrap()).unwrap();
}

/// Small scene: 96x96 camera, 5 frames, everything else default-ish.
fn setup(mask_probability: f64) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("cube.obj"), CUBE_OBJ).unwrap();
    write_endpoints(&dir.path().join("endpoints.json"), [-0.08, -0.05, 0.55], [0.01, -0.02, 0.6]);
    let config = format!(
        "[camera]\nfx = 120.0\nfy = 120.0\ncx = 48.0\ncy = 48.0\nwidth = 96\nheight = 96\n\
         [trajectory]\nframe_count = 5\nfps = 12.0\n\
         [conditioning]\nmask_probability = {mask_probability}\nencoder_seed = 7\nmask_seed = 11\n\
         [tracklets]\ncount = 20\nseed = 13\n\
         [assets]\nobject_mesh = cube.obj\nendpoints = endpoints.json\n"
    );
    let path = dir.path().join("config.ini");
    std::fs::write(&path, config).unwrap();
    (dir, path)
}

fn dir_digest(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn ini_and_json_configs_are_equivalent() {
    let (dir, ini_path) = setup(0.2);
    let config_ini = PipelineConfig::load(&ini_path).unwrap();

    let json_path = dir.path().join("config.json");
    let value = json!({
        "camera": {"fx": 120.0, "fy": 120.0, "cx": 48.0, "cy": 48.0, "width": 96, "height": 96},
        "trajectory": {"frame_count": 5, "fps": 12.0},
        "conditioning": {"mask_probability": 0.2, "encoder_seed": 7, "mask_seed": 11},
        "tracklets": {"count": 20, "seed": 13},
        "assets": {"object_mesh": "cube.obj", "endpoints": "endpoints.json"},
    });
    std::fs::write(&json_path, serde_json::to_vec(&value).unwrap()).unwrap();
    let config_json = PipelineConfig::load(&json_path).unwrap();

    assert_eq!(config_ini.camera.fx, config_json.camera.fx);
    assert_eq!(config_ini.trajectory.frame_count, config_json.trajectory.frame_count);
    assert_eq!(config_ini.conditioning.mask_seed, config_json.conditioning.mask_seed);
    assert_eq!(config_ini.metrics.fscore_thresholds_mm, vec![5.0, 15.0]);
    assert_eq!(config_ini.trajectory.contact_fraction, 0.5);
}

#[test]
fn config_defaults_apply_when_sections_are_omitted() {
    let dir = TempDir::new().unwrap();
    let minimal = "\
[camera]\nfx = 120.0\nfy = 120.0\ncx = 48.0\ncy = 48.0\nwidth = 96\nheight = 96\n\
[conditioning]\nencoder_seed = 1\nmask_seed = 2\n\
[tracklets]\nseed = 3\n";
    let path = dir.path().join("minimal.ini");
    std::fs::write(&path, minimal).unwrap();
    let config = PipelineConfig::load(&path).unwrap();
    assert_eq!(config.trajectory.frame_count, 49);
    assert_eq!(config.trajectory.contact_fraction, 0.5);
    assert_eq!(config.trajectory.max_penetration_mm, 5.0);
    assert_eq!(config.conditioning.mask_probability, 0.2);
    assert_eq!(config.tracklets.count, 100);

    // Seeds are mandatory: dropping one is a schema error.
    let no_seed = minimal.replace("mask_seed = 2\n", "");
    std::fs::write(&path, no_seed).unwrap();
    assert!(matches!(PipelineConfig::load(&path), Err(CliError::Schema(_))));

    // --seed-override replaces every configured seed.
    std::fs::write(&path, minimal).unwrap();
    let mut config = PipelineConfig::load(&path).unwrap();
    config.override_seeds(42);
    assert_eq!(config.conditioning.encoder_seed, 42);
    assert_eq!(config.conditioning.mask_seed, 42);
    assert_eq!(config.tracklets.seed, 42);
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    let (dir, ini_path) = setup(0.2);
    let mut text = std::fs::read_to_string(&ini_path).unwrap();
    text.push_str("\n[camera]\nzoom = 2.0\n");
    let bad = dir.path().join("bad.ini");
    std::fs::write(&bad, &text).unwrap();
    assert!(matches!(PipelineConfig::load(&bad), Err(CliError::Schema(_))));

    let text = std::fs::read_to_string(&ini_path)
        .unwrap()
        .replace("mask_probability = 0.2", "mask_probability = 1.5");
    std::fs::write(&bad, text).unwrap();
    assert!(matches!(PipelineConfig::load(&bad), Err(CliError::Schema(_))));

    // Divisibility is validated at load: width not a multiple of 8 and a
    // frame count that cannot pack temporally.
    let text =
        std::fs::read_to_string(&ini_path).unwrap().replace("width = 96", "width = 100");
    std::fs::write(&bad, text).unwrap();
    assert!(matches!(PipelineConfig::load(&bad), Err(CliError::Schema(_))));
    let text =
        std::fs::read_to_string(&ini_path).unwrap().replace("frame_count = 5", "frame_count = 6");
    std::fs::write(&bad, text).unwrap();
    assert!(matches!(PipelineConfig::load(&bad), Err(CliError::Schema(_))));
}

#[test]
fn trajgen_constant_endpoints_produce_passing_constant_sequence() {
    let (dir, ini_path) = setup(0.0);
    write_endpoints(&dir.path().join("endpoints.json"), [0.0, -0.05, 0.5], [0.0, -0.05, 0.5]);
    // Matching object endpoints too, so the whole clip is static.
    let ep_path = dir.path().join("endpoints.json");
    let mut value: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&ep_path).unwrap()).unwrap();
    value["oT"] = value["o0"].clone();
    std::fs::write(&ep_path, serde_json::to_vec(&value).unwrap()).unwrap();

    let config = PipelineConfig::load(&ini_path).unwrap();
    let out = dir.path().join("seq.json");
    let outcome = commands::trajgen::run(&config, &ep_path, &out, None).unwrap();
    let v = outcome.validation.expect("object mesh configured");
    assert!(v.pass);
    assert_eq!(v.max_joint_speed_mps, 0.0);
    let frames = outcome.sequence.frames();
    assert!(frames.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn trajgen_rejects_malformed_endpoints_with_exit_2() {
    let (dir, ini_path) = setup(0.0);
    let bad = dir.path().join("bad_endpoints.json");
    std::fs::write(&bad, b"{\"schema\": 1, \"h0\": []").unwrap();

    let config = PipelineConfig::load(&ini_path).unwrap();
    let err = commands::trajgen::run(&config, &bad, &dir.path().join("seq.json"), None)
        .err()
        .expect("must fail");
    assert_eq!(err.exit_code(), 2);

    let status = Command::new(env!("CARGO_BIN_EXE_hoi-forge"))
        .args(["trajgen", "--config"])
        .arg(&ini_path)
        .arg("--endpoints")
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("seq.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

fn run_render(dir: &Path, ini_path: &Path) -> PathBuf {
    let config = PipelineConfig::load(ini_path).unwrap();
    let seq = dir.join("seq.json");
    let ep = dir.join("endpoints.json");
    commands::trajgen::run(&config, &ep, &seq, None).unwrap();
    let conditions = dir.join("conditions");
    commands::render::run(&config, &seq, &conditions, None, DepthFormat::Png16).unwrap();
    conditions
}

#[test]
fn render_writes_full_condition_set_deterministically() {
    let (dir, ini_path) = setup(0.0);
    let conditions = run_render(dir.path(), &ini_path);
    for sub in ["depth", "seg", "keypoints"] {
        let count = std::fs::read_dir(conditions.join(sub)).unwrap().count();
        assert_eq!(count, 5, "{sub} frame count");
    }
    assert!(conditions.join("tracklets.json").exists());
    assert!(conditions.join("joints.json").exists());

    let first = dir_digest(&conditions);
    std::fs::remove_dir_all(&conditions).unwrap();
    let conditions = run_render(dir.path(), &ini_path);
    assert_eq!(dir_digest(&conditions), first, "re-render must be byte-identical");
}

#[test]
fn pack_produces_latents_and_honors_full_masking() {
    let (dir, ini_path) = setup(1.0); // every cue dropped
    let conditions = run_render(dir.path(), &ini_path);
    let config = PipelineConfig::load(&ini_path).unwrap();
    let latents = dir.path().join("latents");
    let outcome = commands::pack::run(&config, &conditions, &latents).unwrap();
    assert_eq!(outcome.latent_shape, [2, 12, 12, 48]);
    assert_eq!(outcome.dropped, [true, true, true]);

    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(latents.join("depth.f32.json")).unwrap()).unwrap();
    assert_eq!(sidecar["dropped"], json!(true));
    // Depth latent of an all-zero cue is identically zero.
    let blob = std::fs::read(latents.join("depth.f32")).unwrap();
    assert!(blob.chunks_exact(4).all(|c| f32::from_le_bytes(c.try_into().unwrap()) == 0.0));
}

#[test]
fn pack_accepts_pfm_depth_conditions() {
    let (dir, ini_path) = setup(0.0);
    let config = PipelineConfig::load(&ini_path).unwrap();
    let seq = dir.path().join("seq.json");
    commands::trajgen::run(&config, &dir.path().join("endpoints.json"), &seq, None).unwrap();
    let conditions = dir.path().join("conditions");
    commands::render::run(&config, &seq, &conditions, None, DepthFormat::Pfm).unwrap();
    assert!(conditions.join("depth/0000.pfm").exists());

    let outcome = commands::pack::run(&config, &conditions, &dir.path().join("latents")).unwrap();
    assert_eq!(outcome.latent_shape, [2, 12, 12, 48]);

    // PFM depth is lossless, so the packed depth latent matches a PNG-based
    // run within the 0.05 mm quantization effect on patch means.
    let png_conditions = dir.path().join("conditions_png");
    commands::render::run(&config, &seq, &png_conditions, None, DepthFormat::Png16).unwrap();
    commands::pack::run(&config, &png_conditions, &dir.path().join("latents_png")).unwrap();
    let (pfm_latent, _) =
        hoi_forge_core::conditioning::load_latent(&dir.path().join("latents/depth.f32")).unwrap();
    let (png_latent, _) =
        hoi_forge_core::conditioning::load_latent(&dir.path().join("latents_png/depth.f32"))
            .unwrap();
    let max_diff = pfm_latent
        .data()
        .iter()
        .zip(png_latent.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f32, f32::max);
    assert!(max_diff < 1e-3, "pfm vs png latents differ by {max_diff}");
}

#[test]
fn pack_rejects_mismatched_frame_counts_with_exit_3() {
    let (dir, ini_path) = setup(0.0);
    let conditions = run_render(dir.path(), &ini_path);
    std::fs::remove_file(conditions.join("seg/0002.png")).unwrap();

    let config = PipelineConfig::load(&ini_path).unwrap();
    let err = commands::pack::run(&config, &conditions, &dir.path().join("latents"))
        .err()
        .expect("must fail");
    assert_eq!(err.exit_code(), 3);

    let status = Command::new(env!("CARGO_BIN_EXE_hoi-forge"))
        .args(["pack", "--config"])
        .arg(&ini_path)
        .arg("--conditions")
        .arg(&conditions)
        .arg("--out")
        .arg(dir.path().join("latents"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

fn self_eval_record(dir: &Path, conditions: &Path, id: &str) -> ClipRecord {
    ClipRecord {
        id: id.into(),
        pose_sequence: dir.join("seq.json"),
        object_mesh: dir.join("cube.obj"),
        gt_frames: Some(conditions.join("keypoints")),
        generated_frames: Some(conditions.join("keypoints")),
        gt_tracklets: Some(conditions.join("tracklets.json")),
        gen_tracklets: Some(conditions.join("tracklets.json")),
        gt_joints: Some(conditions.join("joints.json")),
        pred_joints: Some(conditions.join("joints.json")),
        gt_vertices: None,
        pred_vertices: None,
        gt_features: None,
        pred_features: None,
        pose_error_mm: None,
    }
}

#[test]
fn eval_self_identity_reaches_metric_bounds() {
    let (dir, ini_path) = setup(0.0);
    let conditions = run_render(dir.path(), &ini_path);
    let config = PipelineConfig::load(&ini_path).unwrap();

    let manifest_path = dir.path().join("manifest.jsonl");
    ClipManifest::save(&manifest_path, &[self_eval_record(dir.path(), &conditions, "self")])
        .unwrap();
    let outcome = commands::eval::run(
        &config,
        &manifest_path,
        &dir.path().join("report.json"),
        Some(&dir.path().join("per_clip.csv")),
    )
    .unwrap();
    let r = &outcome.report;
    assert_eq!(r.psnr, Some(100.0));
    assert_eq!(r.ssim, Some(1.0));
    assert!((r.mf.unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(r.mpjpe_mm, Some(0.0));
    assert!(r.pa_mpjpe_mm.unwrap() < 1e-9);
    assert_eq!(r.counts.clips, 1);
    assert_eq!(r.counts.frames, 5);
    assert!(r.skipped.iter().any(|s| s == "fvd_core"));
    assert!(r.skipped.iter().any(|s| s == "pa_mpvpe_mm"));
    assert!(dir.path().join("per_clip.csv").exists());
}

#[test]
fn eval_aggregate_matches_mean_of_per_clip_values() {
    let (dir, ini_path) = setup(0.0);
    let conditions = run_render(dir.path(), &ini_path);
    let config = PipelineConfig::load(&ini_path).unwrap();

    // Second clip: generated joints perturbed by writing a shifted copy.
    let joints_path = conditions.join("joints.json");
    let mut joints: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&joints_path).unwrap()).unwrap();
    for frame in joints["frames"].as_array_mut().unwrap() {
        for point in frame.as_array_mut().unwrap() {
            let x = point[0].as_f64().unwrap();
            point[0] = json!(x + 4.0);
        }
    }
    let shifted_path = dir.path().join("joints_shifted.json");
    std::fs::write(&shifted_path, serde_json::to_vec(&joints).unwrap()).unwrap();

    let mut clip2 = self_eval_record(dir.path(), &conditions, "shifted");
    clip2.pred_joints = Some(shifted_path);
    let manifest_path = dir.path().join("manifest.jsonl");
    ClipManifest::save(
        &manifest_path,
        &[self_eval_record(dir.path(), &conditions, "self"), clip2],
    )
    .unwrap();

    let outcome = commands::eval::run(&config, &manifest_path, &dir.path().join("r.json"), None)
        .unwrap();
    assert_eq!(outcome.report.counts.clips, 2);
    assert_eq!(outcome.per_clip.len(), 2);

    // Cross-check: the aggregate equals the mean of per-clip values.
    let mean = |f: fn(&commands::eval::ClipMetrics) -> Option<f64>| {
        let vals: Vec<f64> = outcome.per_clip.iter().filter_map(f).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    assert!((outcome.report.psnr.unwrap() - mean(|c| c.psnr)).abs() < 1e-9);
    assert!((outcome.report.mf.unwrap() - mean(|c| c.mf)).abs() < 1e-9);
    assert!((outcome.report.mpjpe_mm.unwrap() - mean(|c| c.mpjpe_mm)).abs() < 1e-9);
    // The uniform +4 mm x-shift cancels under root alignment; the mean over
    // both clips therefore stays 0.
    assert!(outcome.report.mpjpe_mm.unwrap() < 1e-9);
}

#[test]
fn eval_computes_fvd_core_from_feature_files() {
    let (dir, ini_path) = setup(0.0);
    let conditions = run_render(dir.path(), &ini_path);
    let config = PipelineConfig::load(&ini_path).unwrap();

    let gt_rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.1, 1.0]).collect();
    let pred_rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.1 + 1.0, 1.0]).collect();
    let gt_path = dir.path().join("gt.f32");
    let pred_path = dir.path().join("pred.f32");
    hoi_forge_core::metrics::save_features(&gt_path, &gt_rows).unwrap();
    hoi_forge_core::metrics::save_features(&pred_path, &pred_rows).unwrap();

    let mut record = self_eval_record(dir.path(), &conditions, "feat");
    record.gt_features = Some(gt_path);
    record.pred_features = Some(pred_path);
    let manifest_path = dir.path().join("manifest.jsonl");
    ClipManifest::save(&manifest_path, &[record]).unwrap();

    let outcome =
        commands::eval::run(&config, &manifest_path, &dir.path().join("r.json"), None).unwrap();
    // Identical covariances, means 1.0 apart: Frechet distance 1.0.
    assert!((outcome.report.fvd_core.unwrap() - 1.0).abs() < 1e-6);
    assert!(!outcome.report.skipped.iter().any(|s| s == "fvd_core"));
}

#[test]
fn filter_keeps_best_candidates_in_manifest_order() {
    let dir = TempDir::new().unwrap();
    let records: Vec<ClipRecord> = (0..30)
        .map(|i| ClipRecord {
            id: format!("clip{i:02}"),
            pose_sequence: PathBuf::from("seq.json"),
            object_mesh: PathBuf::from("cube.obj"),
            gt_frames: None,
            generated_frames: None,
            gt_tracklets: None,
            gen_tracklets: None,
            gt_joints: None,
            pred_joints: None,
            gt_vertices: None,
            pred_vertices: None,
            gt_features: None,
            pred_features: None,
            // Shuffle errors so manifest order differs from error order.
            pose_error_mm: Some(((i * 17) % 30) as f64),
        })
        .collect();
    let manifest_path = dir.path().join("m.jsonl");
    ClipManifest::save(&manifest_path, &records).unwrap();

    let out_path = dir.path().join("kept.jsonl");
    let outcome = commands::filter::run(&manifest_path, 0.25, &out_path).unwrap();
    assert_eq!(outcome.kept, 23);
    assert_eq!(outcome.discarded, 7);

    let kept = ClipManifest::load(&out_path).unwrap();
    // Worst 7 errors (23..=29) are gone, original order is preserved.
    assert!(kept.records.iter().all(|r| r.pose_error_mm.unwrap() < 23.0));
    let ids: Vec<_> = kept.records.iter().map(|r| r.id.clone()).collect();
    let expected: Vec<_> = records
        .iter()
        .filter(|r| r.pose_error_mm.unwrap() < 23.0)
        .map(|r| r.id.clone())
        .collect();
    assert_eq!(ids, expected);

    // Fraction 0 keeps everything.
    let outcome = commands::filter::run(&manifest_path, 0.0, &out_path).unwrap();
    assert_eq!(outcome.kept, 30);

    // A single candidate survives a 0.25 fraction.
    ClipManifest::save(&manifest_path, &records[..1]).unwrap();
    let outcome = commands::filter::run(&manifest_path, 0.25, &out_path).unwrap();
    assert_eq!(outcome.kept, 1);
}

#[test]
fn filter_requires_pose_errors() {
    let dir = TempDir::new().unwrap();
    let mut record = ClipRecord {
        id: "x".into(),
        pose_sequence: PathBuf::from("s"),
        object_mesh: PathBuf::from("o"),
        gt_frames: None,
        generated_frames: None,
        gt_tracklets: None,
        gen_tracklets: None,
        gt_joints: None,
        pred_joints: None,
        gt_vertices: None,
        pred_vertices: None,
        gt_features: None,
        pred_features: None,
        pose_error_mm: None,
    };
    let path = dir.path().join("m.jsonl");
    ClipManifest::save(&path, std::slice::from_ref(&record)).unwrap();
    let err = commands::filter::run(&path, 0.25, &dir.path().join("out.jsonl")).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    record.pose_error_mm = Some(f64::NAN);
    ClipManifest::save(&path, &[record]).unwrap();
    let err = commands::filter::run(&path, 0.25, &dir.path().join("out.jsonl")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn pipeline_evaluates_generated_artifacts_when_supplied() {
    let (dir, ini_path) = setup(0.0);
    let config = PipelineConfig::load(&ini_path).unwrap();
    let first = dir.path().join("first");
    commands::pipeline::run(&config, &first, None, None).unwrap();
    assert!(first.join("report.json").exists());
    assert!(!first.join("metrics.json").exists());

    // Feed the run's own outputs back as the generated artifacts.
    let gen = dir.path().join("generated");
    std::fs::create_dir_all(&gen).unwrap();
    let copy_dir = |from: &Path, to: &Path| {
        std::fs::create_dir_all(to).unwrap();
        for entry in std::fs::read_dir(from).unwrap() {
            let p = entry.unwrap().path();
            std::fs::copy(&p, to.join(p.file_name().unwrap())).unwrap();
        }
    };
    copy_dir(&first.join("conditions/keypoints"), &gen.join("frames"));
    copy_dir(&first.join("conditions/keypoints"), &gen.join("gt_frames"));
    std::fs::copy(first.join("conditions/tracklets.json"), gen.join("tracklets.json")).unwrap();
    std::fs::copy(first.join("conditions/joints.json"), gen.join("joints.json")).unwrap();

    let second = dir.path().join("second");
    commands::pipeline::run(&config, &second, None, Some(&gen)).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(second.join("report.json")).unwrap()).unwrap();
    let metrics = &report["metrics"];
    assert_eq!(metrics["psnr"], json!(100.0));
    assert_eq!(metrics["ssim"], json!(1.0));
    assert_eq!(metrics["mpjpe_mm"], json!(0.0));
    assert!((metrics["mf"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let skipped: Vec<String> =
        serde_json::from_value(metrics["skipped"].clone()).unwrap();
    assert!(skipped.iter().any(|s| s == "fvd_core"));
    assert!(second.join("eval_manifest.jsonl").exists());
    assert!(second.join("metrics.json").exists());
}

#[test]
fn pipeline_failure_keeps_partial_outputs() {
    let (dir, ini_path) = setup(0.0);
    // Break the object mesh after trajgen would have succeeded: point the
    // config at a missing file.
    let text = std::fs::read_to_string(&ini_path)
        .unwrap()
        .replace("object_mesh = cube.obj", "object_mesh = missing.obj");
    std::fs::write(&ini_path, text).unwrap();

    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_hoi-forge"))
        .args(["pipeline", "--config"])
        .arg(&ini_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1)); // missing file -> IO bucket
    assert!(out.join("poses/sequence.json").exists(), "partial outputs retained");
    assert!(!out.join("report.json").exists());
}

#[test]
fn manifest_rejects_duplicate_ids_and_unknown_fields() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.jsonl");
    let line = r#"{"id":"a","pose_sequence":"s.json","object_mesh":"o.obj"}"#;
    std::fs::write(&path, format!("{line}\n{line}\n")).unwrap();
    assert!(matches!(ClipManifest::load(&path), Err(CliError::Schema(_))));

    let bad = r#"{"id":"a","pose_sequence":"s","object_mesh":"o","surprise":1}"#;
    std::fs::write(&path, bad).unwrap();
    assert!(matches!(ClipManifest::load(&path), Err(CliError::Schema(_))));
}
