//! `pack`: reads rendered condition files, applies per-cue masking, encodes
//! each cue to a 16-channel latent and writes the 48-channel concatenation
//! plus the projection matrices used.

use std::path::Path;

use rayon::prelude::*;

use hoi_forge_core::conditioning::{
    concat_channels, encode_cue, mask_cues, save_latent, save_projection, CueKind, CueSet,
    LatentTensor,
};
use hoi_forge_core::raster::{read_depth_pfm, read_depth_png, read_rgb_png, read_seg_png};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

pub struct PackOutcome {
    pub latent_shape: [usize; 4],
    pub dropped: [bool; 3],
}

pub fn run(config: &PipelineConfig, conditions_dir: &Path, out_dir: &Path) -> CliResult<PackOutcome> {
    let depth_dir = conditions_dir.join("depth");
    let seg_dir = conditions_dir.join("seg");
    let kp_dir = conditions_dir.join("keypoints");

    let mut depth_files = super::list_files(&depth_dir, "png")?;
    let mut depth_is_pfm = false;
    if depth_files.is_empty() {
        depth_files = super::list_files(&depth_dir, "pfm")?;
        depth_is_pfm = true;
    }
    let seg_files = super::list_files(&seg_dir, "png")?;
    let kp_files = super::list_files(&kp_dir, "png")?;
    if depth_files.len() != seg_files.len() || depth_files.len() != kp_files.len() {
        return Err(CliError::Shape(format!(
            "condition frame counts differ: {} depth, {} seg, {} keypoint",
            depth_files.len(),
            seg_files.len(),
            kp_files.len()
        )));
    }
    if depth_files.is_empty() {
        return Err(CliError::Shape(format!("no condition frames in {}", conditions_dir.display())));
    }

    let depth = depth_files
        .iter()
        .map(|p| if depth_is_pfm { read_depth_pfm(p) } else { read_depth_png(p) })
        .collect::<Result<Vec<_>, _>>()?;
    let seg = seg_files.iter().map(|p| read_seg_png(p)).collect::<Result<Vec<_>, _>>()?;
    let keypoint = kp_files.iter().map(|p| read_rgb_png(p)).collect::<Result<Vec<_>, _>>()?;

    let cues = CueSet::new(depth, seg, keypoint)?;
    let (masked, dropped) =
        mask_cues(&cues, config.conditioning.mask_probability, config.conditioning.mask_seed);

    let seed = config.conditioning.encoder_seed;
    let encoded: Vec<LatentTensor> = CueKind::ALL
        .par_iter()
        .map(|&kind| encode_cue(&masked, kind, seed))
        .collect::<Result<Vec<_>, _>>()?;

    std::fs::create_dir_all(out_dir)?;
    for (kind, latent, flag) in [
        (CueKind::Depth, &encoded[0], dropped[0]),
        (CueKind::Seg, &encoded[1], dropped[1]),
        (CueKind::Keypoint, &encoded[2], dropped[2]),
    ] {
        save_latent(&out_dir.join(format!("{}.f32", kind.as_str())), latent, flag)?;
        save_projection(&out_dir.join(format!("proj_{}.f32", kind.as_str())), kind, seed)?;
    }
    let concat = concat_channels([&encoded[0], &encoded[1], &encoded[2]])?;
    save_latent(&out_dir.join("concat.f32"), &concat, dropped.iter().any(|&d| d))?;

    Ok(PackOutcome { latent_shape: concat.shape(), dropped })
}
