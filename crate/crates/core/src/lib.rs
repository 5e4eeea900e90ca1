//! Deterministic core for hand-object interaction video conditioning and evaluation.
//!
//! The crate is organised around the stages of a pose/appearance/motion pipeline:
//!
//! - [`hand`]: articulated 21-joint hand model (forward kinematics, linear blend
//!   skinning), rigid object posing, meshes and hand-object proximity queries.
//! - [`trajectory`]: synthesis of temporally coherent hand-object pose sequences
//!   from endpoint poses, plus physical plausibility validation.
//! - [`raster`]: pinhole camera, z-buffered depth/segmentation rasterization,
//!   hand-keypoint image rendering and ground-truth tracklet generation.
//! - [`conditioning`]: packing of condition frames into latent tensors, per-cue
//!   masking, and the zero-initialized feature-injection operator.
//! - [`metrics`]: motion fidelity, MPJPE / Procrustes-aligned errors, F-Score,
//!   PSNR / SSIM, the Gaussian Fréchet distance and candidate filtering.
//!
//! Everything is pure and seeded: identical inputs produce bit-identical outputs,
//! which the file formats (PNG, PFM, raw float32 blobs, JSON) preserve on disk.

pub mod conditioning;
pub mod hand;
pub mod metrics;
pub mod raster;
pub mod trajectory;

pub use hand::{HandPose, KinematicHand, ObjectPose, TriMesh};
pub use raster::{Camera, DepthMap, KeypointImage, SegMap, Tracklet};
