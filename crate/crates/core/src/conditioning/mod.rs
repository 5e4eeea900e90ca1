//! Condition latent packing, per-cue masking and zero-initialized injection.
//!
//! Each cue sequence (depth / segmentation / keypoint) is encoded by a
//! deterministic patch encoder: per 8x8 patch a handful of raw channels (mean
//! depth, label histogram, mean RGB) multiplied by a fixed seeded raw-to-16
//! projection. Temporally, latent frame 0 holds input frame 0 alone and every
//! later latent frame averages a group of four inputs, so F frames become
//! 1 + (F - 1) / 4 latent frames. The three 16-channel latents concatenate to
//! 48 channels in the fixed order depth, seg, keypoint.
//!
//! Injection mixes a duplicated-block transform of the control latent into
//! base features through per-layer 1x1 channel matrices that start at exactly
//! zero, so a freshly built operator is an identity on the base features.

mod files;

pub use files::{load_latent, save_latent, save_projection, ConditioningError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::raster::{DepthMap, KeypointImage, SegMap};

/// Spatial downsampling factor of the patch encoder.
pub const SPATIAL_FACTOR: usize = 8;
/// Temporal grouping factor (first frame stays alone).
pub const TEMPORAL_FACTOR: usize = 4;
/// Channels per encoded cue.
pub const LATENT_CHANNELS: usize = 16;
/// Channels after concatenating the three cues.
pub const CONCAT_CHANNELS: usize = 3 * LATENT_CHANNELS;

#[derive(Debug, Error, PartialEq)]
#[error("shape error: {0}")]
pub struct ShapeError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CueKind {
    Depth,
    Seg,
    Keypoint,
}

impl CueKind {
    pub const ALL: [CueKind; 3] = [CueKind::Depth, CueKind::Seg, CueKind::Keypoint];

    pub fn raw_channels(self) -> usize {
        match self {
            CueKind::Depth => 1,   // mean depth in meters
            CueKind::Seg => 4,     // one-hot histogram over {bg, hand, obj, other}
            CueKind::Keypoint => 3, // mean RGB / 255
        }
    }

    fn id(self) -> u8 {
        match self {
            CueKind::Depth => 0,
            CueKind::Seg => 1,
            CueKind::Keypoint => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CueKind::Depth => "depth",
            CueKind::Seg => "seg",
            CueKind::Keypoint => "keypoint",
        }
    }
}

/// Aligned per-frame condition triple; all cues share length and resolution.
#[derive(Debug, Clone)]
pub struct CueSet {
    pub depth: Vec<DepthMap>,
    pub seg: Vec<SegMap>,
    pub keypoint: Vec<KeypointImage>,
}

impl CueSet {
    pub fn new(
        depth: Vec<DepthMap>,
        seg: Vec<SegMap>,
        keypoint: Vec<KeypointImage>,
    ) -> Result<Self, ShapeError> {
        if depth.len() != seg.len() || depth.len() != keypoint.len() || depth.is_empty() {
            return Err(ShapeError(format!(
                "cue lengths differ: depth {}, seg {}, keypoint {}",
                depth.len(),
                seg.len(),
                keypoint.len()
            )));
        }
        let (w, h) = (depth[0].width, depth[0].height);
        let ok = depth.iter().all(|d| d.width == w && d.height == h)
            && seg.iter().all(|s| s.width == w && s.height == h)
            && keypoint.iter().all(|k| k.width == w && k.height == h);
        if !ok {
            return Err(ShapeError("cue frames disagree on resolution".into()));
        }
        Ok(Self { depth, seg, keypoint })
    }

    pub fn frame_count(&self) -> usize {
        self.depth.len()
    }

    pub fn width(&self) -> usize {
        self.depth[0].width
    }

    pub fn height(&self) -> usize {
        self.depth[0].height
    }
}

/// Provenance of a latent tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CueTag {
    Cue(CueKind),
    Concat,
}

/// Packed condition latent, FHWC layout, C in {16, 48}.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTensor {
    shape: [usize; 4],
    data: Vec<f32>,
    cue: CueTag,
}

impl LatentTensor {
    pub fn new(shape: [usize; 4], data: Vec<f32>, cue: CueTag) -> Result<Self, ShapeError> {
        let c = shape[3];
        if c != LATENT_CHANNELS && c != CONCAT_CHANNELS {
            return Err(ShapeError(format!(
                "latent channel count {c} must be {LATENT_CHANNELS} or {CONCAT_CHANNELS}"
            )));
        }
        if data.len() != shape.iter().product::<usize>() {
            return Err(ShapeError(format!(
                "latent data length {} does not match shape {shape:?}",
                data.len()
            )));
        }
        Ok(Self { shape, data, cue })
    }

    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn cue(&self) -> CueTag {
        self.cue
    }

    pub fn at(&self, f: usize, y: usize, x: usize, c: usize) -> f32 {
        let [_, h, w, ch] = self.shape;
        self.data[((f * h + y) * w + x) * ch + c]
    }

    pub fn to_feature_map(&self) -> FeatureMap {
        FeatureMap { shape: self.shape, data: self.data.clone() }
    }
}

/// Latent frame count for `frames` inputs: 1 + (frames - 1) / 4.
pub fn latent_frame_count(frames: usize) -> Result<usize, ShapeError> {
    if frames == 0 || (frames - 1) % TEMPORAL_FACTOR != 0 {
        return Err(ShapeError(format!(
            "frame count {frames} is not 1 mod {TEMPORAL_FACTOR}"
        )));
    }
    Ok(1 + (frames - 1) / TEMPORAL_FACTOR)
}

/// Standard normal via Box-Muller; keeps the seeded stream layout explicit.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Fixed raw-to-16 projection for a cue kind, row-major `[16 x raw_channels]`.
///
/// The RNG seed mixes the encoder seed with the cue id so each kind draws an
/// independent matrix from the same configured seed.
pub fn projection_matrix(kind: CueKind, encoder_seed: u64) -> Vec<f32> {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&encoder_seed.to_le_bytes());
    seed[8] = kind.id();
    let mut rng = ChaCha8Rng::from_seed(seed);
    (0..LATENT_CHANNELS * kind.raw_channels()).map(|_| standard_normal(&mut rng) as f32).collect()
}

fn accumulate_raw(cues: &CueSet, kind: CueKind, frame: usize, raw: &mut [f64]) {
    let (w, h) = (cues.width(), cues.height());
    let (w8, _h8) = (w / SPATIAL_FACTOR, h / SPATIAL_FACTOR);
    let rc = kind.raw_channels();
    let patch_px = (SPATIAL_FACTOR * SPATIAL_FACTOR) as f64;
    for py in 0..h {
        let cell_row = py / SPATIAL_FACTOR;
        for px in 0..w {
            let cell = cell_row * w8 + px / SPATIAL_FACTOR;
            let base = cell * rc;
            match kind {
                CueKind::Depth => {
                    raw[base] += cues.depth[frame].at(py, px) as f64 / patch_px;
                }
                CueKind::Seg => {
                    let label = cues.seg[frame].at(py, px).min(3) as usize;
                    raw[base + label] += 1.0 / patch_px;
                }
                CueKind::Keypoint => {
                    let rgb = cues.keypoint[frame].at(py, px);
                    for (k, &v) in rgb.iter().enumerate() {
                        raw[base + k] += v as f64 / 255.0 / patch_px;
                    }
                }
            }
        }
    }
}

/// Encodes one cue sequence into a 16-channel latent tensor.
pub fn encode_cue(
    cues: &CueSet,
    kind: CueKind,
    encoder_seed: u64,
) -> Result<LatentTensor, ShapeError> {
    let (f, h, w) = (cues.frame_count(), cues.height(), cues.width());
    if h % SPATIAL_FACTOR != 0 || w % SPATIAL_FACTOR != 0 {
        return Err(ShapeError(format!(
            "resolution {h}x{w} is not divisible by {SPATIAL_FACTOR}"
        )));
    }
    let f_lat = latent_frame_count(f)?;
    let (h8, w8) = (h / SPATIAL_FACTOR, w / SPATIAL_FACTOR);
    let rc = kind.raw_channels();
    let proj = projection_matrix(kind, encoder_seed);

    let mut data = vec![0.0f32; f_lat * h8 * w8 * LATENT_CHANNELS];
    let cells = h8 * w8;
    for j in 0..f_lat {
        // Latent frame 0 is input frame 0; frame j >= 1 averages inputs 4j-3..=4j.
        let (start, end) = if j == 0 {
            (0, 1)
        } else {
            (TEMPORAL_FACTOR * j - 3, TEMPORAL_FACTOR * j + 1)
        };
        let mut raw = vec![0.0f64; cells * rc];
        for frame in start..end {
            accumulate_raw(cues, kind, frame, &mut raw);
        }
        let group = (end - start) as f64;
        for cell in 0..cells {
            for c in 0..LATENT_CHANNELS {
                let mut acc = 0.0f64;
                for r in 0..rc {
                    acc += proj[c * rc + r] as f64 * raw[cell * rc + r];
                }
                data[(j * cells + cell) * LATENT_CHANNELS + c] = (acc / group) as f32;
            }
        }
    }
    LatentTensor::new([f_lat, h8, w8, LATENT_CHANNELS], data, CueTag::Cue(kind))
}

/// Concatenates three equally shaped latents along channels in the given order.
pub fn concat_channels(parts: [&LatentTensor; 3]) -> Result<LatentTensor, ShapeError> {
    let shape = parts[0].shape();
    for p in &parts[1..] {
        if p.shape() != shape {
            return Err(ShapeError(format!(
                "latent shapes differ: {:?} vs {:?}",
                shape,
                p.shape()
            )));
        }
    }
    if shape[3] != LATENT_CHANNELS {
        return Err(ShapeError(format!("can only concatenate {LATENT_CHANNELS}-channel latents")));
    }
    let cells = shape[0] * shape[1] * shape[2];
    let mut data = Vec::with_capacity(cells * CONCAT_CHANNELS);
    for cell in 0..cells {
        for part in parts {
            let s = cell * LATENT_CHANNELS;
            data.extend_from_slice(&part.data()[s..s + LATENT_CHANNELS]);
        }
    }
    LatentTensor::new([shape[0], shape[1], shape[2], CONCAT_CHANNELS], data, CueTag::Concat)
}

/// Per-clip cue dropout: each cue is independently replaced by zeros with
/// probability `p`. Returns the masked set and the per-cue drop flags in the
/// order depth, seg, keypoint.
pub fn mask_cues(cues: &CueSet, p: f64, rng_seed: u64) -> (CueSet, [bool; 3]) {
    assert!((0.0..=1.0).contains(&p), "mask probability {p} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dropped =
        [rng.random::<f64>() < p, rng.random::<f64>() < p, rng.random::<f64>() < p];
    let mut out = cues.clone();
    if dropped[0] {
        out.depth.iter_mut().for_each(|d| d.data.fill(0.0));
    }
    if dropped[1] {
        out.seg.iter_mut().for_each(|s| s.data.fill(0));
    }
    if dropped[2] {
        out.keypoint.iter_mut().for_each(|k| k.data.fill(0));
    }
    (out, dropped)
}

/// Plain FHWC float tensor for injection inputs and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub shape: [usize; 4],
    pub data: Vec<f32>,
}

impl FeatureMap {
    pub fn new(shape: [usize; 4], data: Vec<f32>) -> Result<Self, ShapeError> {
        if data.len() != shape.iter().product::<usize>() {
            return Err(ShapeError(format!(
                "feature data length {} does not match shape {shape:?}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: [usize; 4]) -> Self {
        Self { shape, data: vec![0.0; shape.iter().product()] }
    }
}

/// Zero-initialized injection operator.
///
/// Holds one duplicated-block matrix (square over the control channels, the
/// same seeded linear map chained once per layer) and per-layer 1x1 mixing
/// matrices that are exactly zero at construction.
#[derive(Debug, Clone)]
pub struct InjectionOperator {
    layer_count: usize,
    control_channels: usize,
    feature_channels: usize,
    block: Vec<f32>,
    zero_mix: Vec<Vec<f32>>,
}

impl InjectionOperator {
    /// `layer_count` defaults to 2 for the image path; 12 matches the video path.
    pub fn new(
        layer_count: usize,
        control_channels: usize,
        feature_channels: usize,
        block_seed: u64,
    ) -> Self {
        assert!(layer_count >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(block_seed);
        // Entries scaled by 1/sqrt(C) keep the chained map bounded at 12 layers.
        let scale = 1.0 / (control_channels as f64).sqrt();
        let block = (0..control_channels * control_channels)
            .map(|_| (standard_normal(&mut rng) * scale) as f32)
            .collect();
        Self {
            layer_count,
            control_channels,
            feature_channels,
            block,
            zero_mix: vec![vec![0.0; feature_channels * control_channels]; layer_count],
        }
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn mix_is_zero(&self) -> bool {
        self.zero_mix.iter().all(|m| m.iter().all(|&v| v == 0.0))
    }

    /// Replaces one layer's mixing matrix (row-major `[features x controls]`).
    pub fn set_mix(&mut self, layer: usize, matrix: Vec<f32>) -> Result<(), ShapeError> {
        if layer >= self.layer_count {
            return Err(ShapeError(format!("layer {layer} out of range")));
        }
        if matrix.len() != self.feature_channels * self.control_channels {
            return Err(ShapeError("mixing matrix has wrong size".into()));
        }
        self.zero_mix[layer] = matrix;
        Ok(())
    }

    /// Replaces the duplicated-block matrix (row-major `[controls x controls]`).
    pub fn set_block(&mut self, matrix: Vec<f32>) -> Result<(), ShapeError> {
        if matrix.len() != self.control_channels * self.control_channels {
            return Err(ShapeError("block matrix has wrong size".into()));
        }
        self.block = matrix;
        Ok(())
    }

    pub fn identity_mix(&self) -> Vec<f32> {
        let (fc, cc) = (self.feature_channels, self.control_channels);
        let mut m = vec![0.0; fc * cc];
        for i in 0..fc.min(cc) {
            m[i * cc + i] = 1.0;
        }
        m
    }

    pub fn identity_block(&self) -> Vec<f32> {
        let cc = self.control_channels;
        let mut m = vec![0.0; cc * cc];
        for i in 0..cc {
            m[i * cc + i] = 1.0;
        }
        m
    }
}

/// Adds the zero-mixed duplicated-block features to each base feature map.
///
/// Layer `l` receives the control latent passed through `l + 1` applications
/// of the block map; its output is `base[l] + Z_l(chained)`. With the mixing
/// matrices at their zero initialization the bases pass through unchanged.
pub fn inject(
    base: &[FeatureMap],
    control: &FeatureMap,
    op: &InjectionOperator,
) -> Result<Vec<FeatureMap>, ShapeError> {
    if base.len() != op.layer_count {
        return Err(ShapeError(format!(
            "operator has {} layers but {} base maps were given",
            op.layer_count,
            base.len()
        )));
    }
    if control.shape[3] != op.control_channels {
        return Err(ShapeError(format!(
            "control has {} channels, operator expects {}",
            control.shape[3], op.control_channels
        )));
    }
    let cells = control.shape[0] * control.shape[1] * control.shape[2];
    let cc = op.control_channels;
    let fc = op.feature_channels;

    let mut chained = control.data.clone();
    let mut out = Vec::with_capacity(base.len());
    for (l, b) in base.iter().enumerate() {
        if b.shape[..3] != control.shape[..3] || b.shape[3] != fc {
            return Err(ShapeError(format!(
                "base layer {l} shape {:?} incompatible with control {:?} and {fc} feature channels",
                b.shape, control.shape
            )));
        }
        // One more application of the duplicated block.
        let mut next = vec![0.0f32; chained.len()];
        for cell in 0..cells {
            for row in 0..cc {
                let mut acc = 0.0f64;
                for col in 0..cc {
                    acc += op.block[row * cc + col] as f64 * chained[cell * cc + col] as f64;
                }
                next[cell * cc + row] = acc as f32;
            }
        }
        chained = next;

        let mix = &op.zero_mix[l];
        let mut data = b.data.clone();
        for cell in 0..cells {
            for row in 0..fc {
                let mut acc = 0.0f64;
                for col in 0..cc {
                    acc += mix[row * cc + col] as f64 * chained[cell * cc + col] as f64;
                }
                data[cell * fc + row] += acc as f32;
            }
        }
        out.push(FeatureMap { shape: b.shape, data });
    }
    Ok(out)
}
