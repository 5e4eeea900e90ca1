//! Aggregated metric report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub clips: usize,
    pub frames: usize,
    pub tracks: usize,
}

/// Named scalar results plus evaluation counts and the metrics that were
/// skipped for lack of inputs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fvd_core: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psnr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mpjpe_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pa_mpjpe_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pa_mpvpe_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fscore_at: BTreeMap<String, f64>,
    pub counts: ReportCounts,
    #[serde(default)]
    pub skipped: Vec<String>,
}

impl MetricsReport {
    /// Checks every present metric against its documented range.
    pub fn validate(&self) -> Result<(), MetricError> {
        let bad = |name: &str, v: f64| MetricError::Shape(format!("{name} out of range: {v}"));
        if let Some(v) = self.mf {
            if !(-2.0..=2.0).contains(&v) {
                return Err(bad("mf", v));
            }
        }
        if let Some(v) = self.ssim {
            if !(-1.0..=1.0).contains(&v) {
                return Err(bad("ssim", v));
            }
        }
        for (k, &v) in &self.fscore_at {
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(&format!("fscore_at[{k}]"), v));
            }
        }
        for (name, value) in [
            ("fvd_core", self.fvd_core),
            ("mpjpe_mm", self.mpjpe_mm),
            ("pa_mpjpe_mm", self.pa_mpjpe_mm),
            ("pa_mpvpe_mm", self.pa_mpvpe_mm),
        ] {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(bad(name, v));
                }
            }
        }
        if let Some(v) = self.psnr {
            if !v.is_finite() {
                return Err(bad("psnr", v));
            }
        }
        Ok(())
    }

    /// Map key used for an F-Score threshold, e.g. 5.0 -> "5mm".
    pub fn fscore_key(threshold_mm: f64) -> String {
        if threshold_mm.fract() == 0.0 {
            format!("{}mm", threshold_mm as i64)
        } else {
            format!("{threshold_mm}mm")
        }
    }
}
