//! `render`: rasterizes a pose sequence into per-frame depth / segmentation /
//! keypoint files plus ground-truth tracklets and hand joints.

use std::path::Path;

use rayon::prelude::*;

use hoi_forge_core::hand::apply_object_pose;
use hoi_forge_core::metrics::save_point_frames;
use hoi_forge_core::raster::{
    generate_tracklets, rasterize, render_keypoints, save_tracklets, write_depth_pfm,
    write_depth_png, write_rgb_png, write_seg_png,
};
use hoi_forge_core::trajectory::load_pose_sequence;

use crate::config::PipelineConfig;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DepthFormat {
    /// 16-bit grayscale PNG, 0.1 mm units.
    #[default]
    Png16,
    /// Lossless float32 little-endian PFM.
    Pfm,
}

pub struct RenderOutcome {
    pub frames: usize,
    pub tracklets: usize,
}

pub fn run(
    config: &PipelineConfig,
    sequence_path: &Path,
    out_dir: &Path,
    object_override: Option<&Path>,
    depth_format: DepthFormat,
) -> CliResult<RenderOutcome> {
    let sequence = load_pose_sequence(sequence_path)?;
    let hand = super::load_hand(config)?;
    let object = super::require_object(config, object_override)?;
    let cam = config.camera()?;

    let depth_dir = out_dir.join("depth");
    let seg_dir = out_dir.join("seg");
    let kp_dir = out_dir.join("keypoints");
    for dir in [&depth_dir, &seg_dir, &kp_dir] {
        std::fs::create_dir_all(dir)?;
    }

    let posed: Vec<_> = sequence
        .frames()
        .par_iter()
        .map(|(h, o)| vec![hand.skin_mesh(h), apply_object_pose(&object, o)])
        .collect();

    posed.par_iter().enumerate().try_for_each(|(i, meshes)| -> CliResult<()> {
        let (depth, seg) = rasterize(meshes, &cam);
        match depth_format {
            DepthFormat::Png16 => {
                write_depth_png(&depth_dir.join(super::frame_file(i, "png")), &depth)?
            }
            DepthFormat::Pfm => {
                write_depth_pfm(&depth_dir.join(super::frame_file(i, "pfm")), &depth)?
            }
        }
        write_seg_png(&seg_dir.join(super::frame_file(i, "png")), &seg)?;
        let joints = hand.forward_kinematics(&sequence.frames()[i].0);
        let kp = render_keypoints(&joints, &cam);
        write_rgb_png(&kp_dir.join(super::frame_file(i, "png")), &kp)?;
        Ok(())
    })?;

    // Ground-truth hand joints per frame, millimeters.
    let joints_mm: Vec<Vec<nalgebra::Point3<f64>>> = sequence
        .frames()
        .iter()
        .map(|(h, _)| {
            hand.forward_kinematics(h)
                .iter()
                .map(|p| nalgebra::Point3::from(p.coords * 1000.0))
                .collect()
        })
        .collect();
    save_point_frames(&out_dir.join("joints.json"), &joints_mm)?;

    let tracks = generate_tracklets(&posed, &cam, config.tracklets.count, config.tracklets.seed)?;
    save_tracklets(&out_dir.join("tracklets.json"), &tracks)?;

    Ok(RenderOutcome { frames: sequence.len(), tracklets: tracks.len() })
}
