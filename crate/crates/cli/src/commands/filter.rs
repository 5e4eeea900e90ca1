//! `filter`: discards the worst candidates by pose error and writes the
//! surviving manifest, preserving the original record order.

use std::collections::BTreeSet;
use std::path::Path;

use hoi_forge_core::metrics::rank_and_filter;

use crate::error::{CliError, CliResult};
use crate::manifest::ClipManifest;

#[derive(Debug)]
pub struct FilterOutcome {
    pub kept: usize,
    pub discarded: usize,
}

pub fn run(manifest_path: &Path, discard_fraction: f64, out: &Path) -> CliResult<FilterOutcome> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(CliError::Schema(format!(
            "discard fraction {discard_fraction} outside [0, 1)"
        )));
    }
    let manifest = ClipManifest::load(manifest_path)?;
    let mut candidates = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let err = record.pose_error_mm.ok_or_else(|| {
            CliError::Schema(format!("clip {} has no pose_error_mm; cannot filter", record.id))
        })?;
        if !err.is_finite() {
            return Err(CliError::Schema(format!("clip {} has non-finite pose error", record.id)));
        }
        candidates.push((record.id.clone(), err));
    }
    let kept: BTreeSet<String> = rank_and_filter(&candidates, discard_fraction).into_iter().collect();
    let retained: Vec<_> = manifest
        .records
        .iter()
        .filter(|r| kept.contains(&r.id))
        .cloned()
        .collect();
    let outcome =
        FilterOutcome { kept: retained.len(), discarded: manifest.records.len() - retained.len() };
    ClipManifest::save(out, &retained)?;
    Ok(outcome)
}
