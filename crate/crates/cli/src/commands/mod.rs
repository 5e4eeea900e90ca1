//! Subcommand implementations. Each `run` returns structured data so the
//! binary stays a thin argument/exit-code shell and tests can call straight in.

pub mod eval;
pub mod filter;
pub mod pack;
pub mod pipeline;
pub mod render;
pub mod trajgen;

use std::path::{Path, PathBuf};

use hoi_forge_core::hand::{load_hand_json, load_obj, KinematicHand, TriMesh};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

/// Segmentation label of the hand mesh.
pub const HAND_INSTANCE: u8 = 1;
/// Segmentation label of the (single) object mesh.
pub const OBJECT_INSTANCE: u8 = 2;

pub fn frame_file(index: usize, ext: &str) -> String {
    format!("{index:04}.{ext}")
}

/// Hand asset from config, or the built-in template.
pub fn load_hand(config: &PipelineConfig) -> CliResult<KinematicHand> {
    match &config.assets.hand {
        Some(path) => Ok(load_hand_json(&config.resolve(path))?),
        None => Ok(KinematicHand::template()),
    }
}

/// Object mesh from an explicit override or the config assets section.
pub fn load_object(
    config: &PipelineConfig,
    object_override: Option<&Path>,
) -> CliResult<Option<TriMesh>> {
    let path = match object_override {
        Some(p) => Some(p.to_path_buf()),
        None => config.assets.object_mesh.as_ref().map(|p| config.resolve(p)),
    };
    match path {
        Some(p) => Ok(Some(load_obj(&p, OBJECT_INSTANCE)?)),
        None => Ok(None),
    }
}

pub fn require_object(
    config: &PipelineConfig,
    object_override: Option<&Path>,
) -> CliResult<TriMesh> {
    load_object(config, object_override)?.ok_or_else(|| {
        CliError::Schema("no object mesh: set assets.object_mesh or pass --object".into())
    })
}

/// Sorted file list with one extension inside a directory.
pub fn list_files(dir: &Path, ext: &str) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Internal(format!("{}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext)) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}
