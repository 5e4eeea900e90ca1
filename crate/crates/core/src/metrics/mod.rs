//! Evaluation metrics: motion fidelity over tracklets, joint/vertex errors
//! with and without Procrustes alignment, F-Score, PSNR / SSIM, the Gaussian
//! Fréchet distance over externally supplied feature statistics, and the
//! candidate filtering rule.
//!
//! All functions are pure; means use pairwise summation so batch aggregation
//! stays order-independent to well below 1e-9 relative error.

mod files;
mod report;

pub use files::{
    load_features, load_point_frames, load_report, save_features, save_point_frames, save_report,
    MetricFileError,
};
pub use report::{MetricsReport, ReportCounts};

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Rotation3, Vector3};
use thiserror::Error;

use crate::raster::{RgbImage, Tracklet};

/// Displacements shorter than this (pixels) count as static in correlations.
pub const DISPLACEMENT_EPS: f64 = 1e-6;
/// Default F-Score thresholds in millimeters (the @05 / @15 convention).
pub const FSCORE_THRESHOLDS_MM: [f64; 2] = [5.0, 15.0];

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("empty tracklet set")]
    EmptySet,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("covariance product is not PSD (eigenvalue {0})")]
    NotPsd(f64),
    #[error("need at least 2 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= 8 => values.iter().sum(),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

pub fn pairwise_mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

// ---- motion fidelity ----

/// Mean cosine similarity of per-frame displacement vectors.
///
/// Both tracks must share their length F >= 2; the F - 1 displacement pairs
/// are compared. Frames where both displacements are shorter than `eps`
/// contribute 1, frames where exactly one is static contribute 0.
pub fn track_correlation_eps(a: &Tracklet, b: &Tracklet, eps: f64) -> Result<f64, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch(format!("{} vs {} frames", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(MetricError::LengthMismatch(format!("need >= 2 frames, got {}", a.len())));
    }
    let cosines: Vec<f64> = (0..a.len() - 1)
        .map(|k| {
            let va = [a.points[k + 1][0] - a.points[k][0], a.points[k + 1][1] - a.points[k][1]];
            let vb = [b.points[k + 1][0] - b.points[k][0], b.points[k + 1][1] - b.points[k][1]];
            let na = (va[0] * va[0] + va[1] * va[1]).sqrt();
            let nb = (vb[0] * vb[0] + vb[1] * vb[1]).sqrt();
            match (na < eps, nb < eps) {
                (true, true) => 1.0,
                (true, false) | (false, true) => 0.0,
                (false, false) => ((va[0] * vb[0] + va[1] * vb[1]) / (na * nb)).clamp(-1.0, 1.0),
            }
        })
        .collect();
    Ok(pairwise_mean(&cosines))
}

pub fn track_correlation(a: &Tracklet, b: &Tracklet) -> Result<f64, MetricError> {
    track_correlation_eps(a, b, DISPLACEMENT_EPS)
}

/// Symmetric best-match motion fidelity over two tracklet sets, in [-2, 2]:
/// the mean over generated tracks of their best correlation against any
/// ground-truth track, plus the mirrored term.
pub fn motion_fidelity(gt: &[Tracklet], gen: &[Tracklet]) -> Result<f64, MetricError> {
    motion_fidelity_eps(gt, gen, DISPLACEMENT_EPS)
}

pub fn motion_fidelity_eps(
    gt: &[Tracklet],
    gen: &[Tracklet],
    eps: f64,
) -> Result<f64, MetricError> {
    if gt.is_empty() || gen.is_empty() {
        return Err(MetricError::EmptySet);
    }
    let mut corr = vec![vec![0.0f64; gen.len()]; gt.len()];
    for (i, t) in gt.iter().enumerate() {
        for (j, g) in gen.iter().enumerate() {
            corr[i][j] = track_correlation_eps(t, g, eps)?;
        }
    }
    let gen_best: Vec<f64> = (0..gen.len())
        .map(|j| (0..gt.len()).map(|i| corr[i][j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let gt_best: Vec<f64> =
        corr.iter().map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    Ok(pairwise_mean(&gen_best) + pairwise_mean(&gt_best))
}

// ---- joint errors ----

pub const JOINTS_PER_HAND: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointRole {
    Predicted,
    GroundTruth,
}

/// 21 hand joints in millimeters.
#[derive(Debug, Clone)]
pub struct JointSet {
    pub points: [Point3<f64>; JOINTS_PER_HAND],
    pub role: JointRole,
}

impl JointSet {
    pub fn new(points: [Point3<f64>; JOINTS_PER_HAND], role: JointRole) -> Result<Self, MetricError> {
        if points.iter().any(|p| !p.coords.iter().all(|v| v.is_finite())) {
            return Err(MetricError::Degenerate("non-finite joint position".into()));
        }
        Ok(Self { points, role })
    }
}

/// Mean per-joint position error after root (wrist) alignment, millimeters.
pub fn mpjpe_root_aligned(pred: &JointSet, gt: &JointSet) -> f64 {
    let pr = pred.points[0];
    let gr = gt.points[0];
    let dists: Vec<f64> = pred
        .points
        .iter()
        .zip(&gt.points)
        .map(|(p, g)| ((p - pr) - (g - gr)).norm())
        .collect();
    pairwise_mean(&dists)
}

// ---- Procrustes ----

/// Similarity transform `p -> scale * R * p + t`.
#[derive(Debug, Clone)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

impl Similarity {
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.scale * (self.rotation * p.coords) + self.translation)
    }
}

/// Closed-form (Umeyama) similarity minimizing `sum ||s R x_i + t - y_i||^2`.
///
/// With `with_scale` false the scale is fixed at 1 and the rigid optimum is
/// returned. Errors with [`MetricError::Degenerate`] when the centered source
/// points have no extent.
pub fn procrustes_align(
    x: &[Point3<f64>],
    y: &[Point3<f64>],
    with_scale: bool,
) -> Result<Similarity, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(format!("{} vs {} points", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(MetricError::Degenerate(format!("need at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mean = |pts: &[Point3<f64>]| {
        pts.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / nf
    };
    let mu_x = mean(x);
    let mu_y = mean(y);

    let mut sigma_x = 0.0;
    let mut cov = Matrix3::zeros();
    for (px, py) in x.iter().zip(y) {
        let xc = px.coords - mu_x;
        let yc = py.coords - mu_y;
        sigma_x += xc.norm_squared();
        cov += yc * xc.transpose();
    }
    sigma_x /= nf;
    cov /= nf;
    if sigma_x < 1e-18 {
        return Err(MetricError::Degenerate("source points are coincident".into()));
    }

    let svd = cov.svd(true, true);
    let u = svd.u.ok_or_else(|| MetricError::Degenerate("svd failed".into()))?;
    let v_t = svd.v_t.ok_or_else(|| MetricError::Degenerate("svd failed".into()))?;
    let d = svd.singular_values;
    let sign = if (u.determinant() * v_t.determinant()) < 0.0 { -1.0 } else { 1.0 };
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign));
    let r = u * correction * v_t;

    let scale = if with_scale { (d[0] + d[1] + sign * d[2]) / sigma_x } else { 1.0 };
    let translation = mu_y - scale * (r * mu_x);
    Ok(Similarity { scale, rotation: Rotation3::from_matrix_unchecked(r), translation })
}

/// Mean point distance after optimal similarity alignment (scale enabled).
pub fn pa_aligned_error(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> Result<f64, MetricError> {
    let sim = procrustes_align(pred, gt, true)?;
    let dists: Vec<f64> = pred.iter().zip(gt).map(|(p, g)| (sim.apply(p) - g).norm()).collect();
    Ok(pairwise_mean(&dists))
}

/// PA-MPJPE in millimeters.
pub fn pa_mpjpe(pred: &JointSet, gt: &JointSet) -> Result<f64, MetricError> {
    pa_aligned_error(&pred.points, &gt.points)
}

/// PA-MPVPE in millimeters over matching vertex sets.
pub fn pa_mpvpe(pred: &[Point3<f64>], gt: &[Point3<f64>]) -> Result<f64, MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::LengthMismatch(format!(
            "{} vs {} vertices",
            pred.len(),
            gt.len()
        )));
    }
    pa_aligned_error(pred, gt)
}

// ---- F-Score ----

/// Harmonic mean of nearest-neighbor precision and recall at `threshold_mm`.
pub fn fscore(pred: &[Point3<f64>], gt: &[Point3<f64>], threshold_mm: f64) -> f64 {
    assert!(!pred.is_empty() && !gt.is_empty(), "fscore needs nonempty point sets");
    let within = |from: &[Point3<f64>], to: &[Point3<f64>]| {
        let hits = from
            .iter()
            .filter(|p| {
                to.iter().map(|q| (*p - q).norm()).fold(f64::INFINITY, f64::min) <= threshold_mm
            })
            .count();
        hits as f64 / from.len() as f64
    };
    let precision = within(pred, gt);
    let recall = within(gt, pred);
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

// ---- image quality ----

/// PSNR in dB over raw 8-bit samples; 100 dB when the MSE vanishes.
pub fn psnr_bytes(a: &[u8], b: &[u8]) -> Result<f64, MetricError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(MetricError::Shape(format!("byte lengths {} vs {}", a.len(), b.len())));
    }
    let se: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .collect();
    let mse = pairwise_mean(&se);
    if mse < 1e-10 {
        Ok(100.0)
    } else {
        Ok(10.0 * (255.0 * 255.0 / mse).log10())
    }
}

pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64, MetricError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricError::Shape(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    psnr_bytes(&a.data, &b.data)
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable valid-mode convolution with the 11-tap Gaussian.
fn gaussian_filter(plane: &[f64], w: usize, h: usize, kernel: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut horiz = vec![0.0f64; h * ow];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                acc += kv * plane[y * w + x + k];
            }
            horiz[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0f64; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                acc += kv * horiz[(y + k) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), channel-averaged over
/// all valid window positions.
pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64, MetricError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricError::Shape(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    if a.width < SSIM_WINDOW || a.height < SSIM_WINDOW {
        return Err(MetricError::Shape(format!(
            "image {}x{} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} ssim window",
            a.width, a.height
        )));
    }
    let (w, h) = (a.width, a.height);
    let kernel = gaussian_kernel();
    let mut values = Vec::with_capacity(3 * (w - SSIM_WINDOW + 1) * (h - SSIM_WINDOW + 1));
    for ch in 0..3 {
        let mut ax = vec![0.0f64; w * h];
        let mut bx = vec![0.0f64; w * h];
        let mut axx = vec![0.0f64; w * h];
        let mut bxx = vec![0.0f64; w * h];
        let mut abx = vec![0.0f64; w * h];
        for i in 0..w * h {
            let va = a.data[3 * i + ch] as f64;
            let vb = b.data[3 * i + ch] as f64;
            ax[i] = va;
            bx[i] = vb;
            axx[i] = va * va;
            bxx[i] = vb * vb;
            abx[i] = va * vb;
        }
        let mu_a = gaussian_filter(&ax, w, h, &kernel);
        let mu_b = gaussian_filter(&bx, w, h, &kernel);
        let e_aa = gaussian_filter(&axx, w, h, &kernel);
        let e_bb = gaussian_filter(&bxx, w, h, &kernel);
        let e_ab = gaussian_filter(&abx, w, h, &kernel);
        for i in 0..mu_a.len() {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = e_aa[i] - ma * ma;
            let vb = e_bb[i] - mb * mb;
            let cab = e_ab[i] - ma * mb;
            let num = (2.0 * (ma * mb) + SSIM_C1) * (2.0 * cab + SSIM_C2);
            let den = (ma * ma + mb * mb + SSIM_C1) * (va + vb + SSIM_C2);
            values.push(num / den);
        }
    }
    Ok(pairwise_mean(&values))
}

// ---- Frechet distance ----

/// Gaussian statistics of an externally computed feature matrix.
#[derive(Debug, Clone)]
pub struct FeatureStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl FeatureStats {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, MetricError> {
        let d = mean.len();
        if d == 0 || cov.nrows() != d || cov.ncols() != d {
            return Err(MetricError::Shape(format!(
                "mean has {d} dims, covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(MetricError::Shape(format!("covariance asymmetric by {asym}")));
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sample mean and unbiased covariance of row-major features.
pub fn feature_stats(rows: &[Vec<f64>]) -> Result<FeatureStats, MetricError> {
    let n = rows.len();
    if n < 2 {
        return Err(MetricError::InsufficientSamples(n));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(MetricError::Shape("feature rows disagree on dimension".into()));
    }
    let mut mean = DVector::zeros(d);
    for row in rows {
        for (k, v) in row.iter().enumerate() {
            mean[k] += v;
        }
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(d, d);
    for row in rows {
        let c = DVector::from_iterator(d, row.iter().copied()) - &mean;
        cov += &c * c.transpose();
    }
    cov /= (n - 1) as f64;
    FeatureStats::new(mean, cov)
}

fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricError> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-6 {
            return Err(MetricError::NotPsd(*v));
        }
        *v = v.max(0.0).sqrt();
    }
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose())
}

/// Fréchet distance between two Gaussians:
/// `||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2))`.
///
/// The cross term uses the eigendecomposition of the symmetrized product
/// `S1^(1/2) S2 S1^(1/2)`; eigenvalues below -1e-6 raise [`MetricError::NotPsd`],
/// small negatives are clamped to zero, and the result is clamped at 0.
pub fn frechet_distance(a: &FeatureStats, b: &FeatureStats) -> Result<f64, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::Shape(format!("dims {} vs {}", a.dim(), b.dim())));
    }
    let s1_half = sqrt_psd(&a.cov)?;
    let product = &s1_half * &b.cov * &s1_half;
    let sym = (&product + product.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut tr_sqrt = 0.0;
    for &v in eig.eigenvalues.iter() {
        if v < -1e-6 {
            return Err(MetricError::NotPsd(v));
        }
        tr_sqrt += v.max(0.0).sqrt();
    }
    let dmu = &a.mean - &b.mean;
    let d = dmu.norm_squared() + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
    Ok(d.max(0.0))
}

// ---- candidate filtering ----

/// Keeps candidates after discarding the `floor(n * discard_fraction)` worst
/// (largest error) entries. Sorting is by (error, id) ascending, so the output
/// never depends on the input order; kept ids come back in that sorted order.
pub fn rank_and_filter<I: Ord + Clone>(candidates: &[(I, f64)], discard_fraction: f64) -> Vec<I> {
    assert!(
        (0.0..1.0).contains(&discard_fraction),
        "discard fraction {discard_fraction} outside [0, 1)"
    );
    let mut sorted: Vec<&(I, f64)> = candidates.iter().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let discard = (candidates.len() as f64 * discard_fraction).floor() as usize;
    sorted[..candidates.len() - discard].iter().map(|(id, _)| id.clone()).collect()
}

#[cfg(test)]
mod tests;
