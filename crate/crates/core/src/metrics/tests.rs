use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector, Point3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::raster::RgbImage;

fn track(points: &[[f64; 2]]) -> Tracklet {
    Tracklet { points: points.to_vec(), visibility: vec![true; points.len()] }
}

fn random_track(rng: &mut ChaCha8Rng, frames: usize) -> Tracklet {
    let mut points = vec![[rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)]];
    for _ in 1..frames {
        let last = *points.last().unwrap();
        points.push([
            last[0] + rng.random_range(-3.0..3.0),
            last[1] + rng.random_range(-3.0..3.0),
        ]);
    }
    Tracklet { points, visibility: vec![true; frames] }
}

#[test]
fn correlation_of_moving_track_with_itself_is_one() {
    let t = track(&[[0.0, 0.0], [1.0, 2.0], [3.0, 1.0], [4.0, 4.0]]);
    assert_relative_eq!(track_correlation(&t, &t).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn correlation_of_reversed_displacements_is_minus_one() {
    let t = track(&[[0.0, 0.0], [1.0, 2.0], [3.0, 1.0]]);
    let reversed = Tracklet {
        points: t.points.iter().map(|p| [-p[0], -p[1]]).collect(),
        visibility: t.visibility.clone(),
    };
    assert_relative_eq!(track_correlation(&t, &reversed).unwrap(), -1.0, epsilon = 1e-12);
}

/// Two displacement pairs computed by hand: (1 + cos 45 deg) / 2.
#[test]
fn correlation_matches_hand_computation() {
    let a = track(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
    let b = track(&[[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]]);
    let expected = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
    assert_relative_eq!(track_correlation(&a, &b).unwrap(), expected, epsilon = 1e-12);
}

#[test]
fn correlation_static_rules() {
    let still = track(&[[5.0, 5.0], [5.0, 5.0], [5.0, 5.0]]);
    let moving = track(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
    assert_eq!(track_correlation(&still, &still).unwrap(), 1.0);
    assert_eq!(track_correlation(&still, &moving).unwrap(), 0.0);
}

#[test]
fn correlation_rejects_length_mismatch() {
    let a = track(&[[0.0, 0.0], [1.0, 0.0]]);
    let b = track(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
    assert!(matches!(track_correlation(&a, &b), Err(MetricError::LengthMismatch(_))));
}

#[test]
fn motion_fidelity_identity_and_reversal() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let set: Vec<Tracklet> = (0..6).map(|_| random_track(&mut rng, 17)).collect();
    assert_relative_eq!(motion_fidelity(&set, &set).unwrap(), 2.0, epsilon = 1e-9);

    let single = vec![random_track(&mut rng, 17)];
    let reversed: Vec<Tracklet> = single
        .iter()
        .map(|t| Tracklet {
            points: t.points.iter().map(|p| [-p[0], -p[1]]).collect(),
            visibility: t.visibility.clone(),
        })
        .collect();
    assert_relative_eq!(motion_fidelity(&single, &reversed).unwrap(), -2.0, epsilon = 1e-9);
}

/// Brute-force double-max oracle with its own cosine arithmetic.
#[test]
fn motion_fidelity_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gt: Vec<Tracklet> = (0..5).map(|_| random_track(&mut rng, 12)).collect();
    let gen: Vec<Tracklet> = (0..7).map(|_| random_track(&mut rng, 12)).collect();
    let got = motion_fidelity(&gt, &gen).unwrap();
    assert_relative_eq!(got, oracle_mf(&gt, &gen), epsilon = 1e-12);
}

pub(crate) fn oracle_corr(a: &Tracklet, b: &Tracklet) -> f64 {
    let f = a.points.len();
    let mut sum = 0.0;
    for k in 0..f - 1 {
        let va = (a.points[k + 1][0] - a.points[k][0], a.points[k + 1][1] - a.points[k][1]);
        let vb = (b.points[k + 1][0] - b.points[k][0], b.points[k + 1][1] - b.points[k][1]);
        let na = (va.0 * va.0 + va.1 * va.1).sqrt();
        let nb = (vb.0 * vb.0 + vb.1 * vb.1).sqrt();
        sum += if na < 1e-6 && nb < 1e-6 {
            1.0
        } else if na < 1e-6 || nb < 1e-6 {
            0.0
        } else {
            ((va.0 * vb.0 + va.1 * vb.1) / (na * nb)).clamp(-1.0, 1.0)
        };
    }
    sum / (f - 1) as f64
}

pub(crate) fn oracle_mf(gt: &[Tracklet], gen: &[Tracklet]) -> f64 {
    let mut total = 0.0;
    for g in gen {
        let mut best = f64::NEG_INFINITY;
        for t in gt {
            best = best.max(oracle_corr(t, g));
        }
        total += best / gen.len() as f64;
    }
    for t in gt {
        let mut best = f64::NEG_INFINITY;
        for g in gen {
            best = best.max(oracle_corr(t, g));
        }
        total += best / gt.len() as f64;
    }
    total
}

fn joints_from(points: [Point3<f64>; 21], role: JointRole) -> JointSet {
    JointSet::new(points, role).unwrap()
}

fn random_joints(rng: &mut ChaCha8Rng) -> [Point3<f64>; 21] {
    std::array::from_fn(|_| {
        Point3::new(
            rng.random_range(-100.0..100.0),
            rng.random_range(-100.0..100.0),
            rng.random_range(-100.0..100.0),
        )
    })
}

#[test]
fn mpjpe_zero_for_identical_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts = random_joints(&mut rng);
    let pred = joints_from(pts, JointRole::Predicted);
    let gt = joints_from(pts, JointRole::GroundTruth);
    assert_eq!(mpjpe_root_aligned(&pred, &gt), 0.0);
}

#[test]
fn mpjpe_translation_invariance_is_exact_on_grid_values() {
    // Joints snapped to a 2^-10 grid keep the +(7,-3,2) shift exact in f64,
    // so root alignment cancels bitwise.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = |v: f64| (v * 1024.0).round() / 1024.0;
    let pts: [Point3<f64>; 21] = std::array::from_fn(|_| {
        Point3::new(
            grid(rng.random_range(-100.0..100.0)),
            grid(rng.random_range(-100.0..100.0)),
            grid(rng.random_range(-100.0..100.0)),
        )
    });
    let shifted: [Point3<f64>; 21] =
        std::array::from_fn(|i| pts[i] + Vector3::new(7.0, -3.0, 2.0));
    let pred = joints_from(shifted, JointRole::Predicted);
    let gt = joints_from(pts, JointRole::GroundTruth);
    assert_eq!(mpjpe_root_aligned(&pred, &gt), 0.0);
}

#[test]
fn mpjpe_single_joint_offset_is_mean_over_21() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts = random_joints(&mut rng);
    let mut off = pts;
    off[7] += Vector3::new(0.0, 5.0, 0.0);
    let pred = joints_from(off, JointRole::Predicted);
    let gt = joints_from(pts, JointRole::GroundTruth);
    assert_relative_eq!(mpjpe_root_aligned(&pred, &gt), 5.0 / 21.0, epsilon = 1e-12);
}

#[test]
fn procrustes_identity_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Point3<f64>> = random_joints(&mut rng).to_vec();
    let sim = procrustes_align(&pts, &pts, true).unwrap();
    assert_relative_eq!(sim.scale, 1.0, epsilon = 1e-12);
    assert_relative_eq!(sim.rotation.matrix(), &nalgebra::Matrix3::identity(), epsilon = 1e-9);
    assert_relative_eq!(sim.translation.norm(), 0.0, epsilon = 1e-9);
}

#[test]
fn procrustes_recovers_exact_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pts: Vec<Point3<f64>> = random_joints(&mut rng).to_vec();
    let r0 = Rotation3::from_scaled_axis(Vector3::new(0.3, -1.1, 0.7));
    let t0 = Vector3::new(12.0, -5.0, 30.0);
    let target: Vec<Point3<f64>> =
        pts.iter().map(|p| Point3::from(2.0 * (r0 * p.coords) + t0)).collect();

    let sim = procrustes_align(&pts, &target, true).unwrap();
    assert_relative_eq!(sim.scale, 2.0, epsilon = 1e-9);
    assert_relative_eq!(sim.rotation.matrix(), r0.matrix(), epsilon = 1e-9);
    assert_relative_eq!(sim.translation, t0, epsilon = 1e-7);

    // Rigid-only variant recovers the exact (R, t) on noise-free rigid pairs.
    let rigid: Vec<Point3<f64>> =
        pts.iter().map(|p| Point3::from(r0 * p.coords + t0)).collect();
    let sim = procrustes_align(&pts, &rigid, false).unwrap();
    assert_eq!(sim.scale, 1.0);
    assert_relative_eq!(sim.rotation.matrix(), r0.matrix(), epsilon = 1e-9);
    assert_relative_eq!(sim.translation, t0, epsilon = 1e-9);
}

/// The returned transform beats 1000 random perturbations of itself on the
/// least-squares objective for a noisy correspondence.
#[test]
fn procrustes_is_a_local_minimum_under_perturbation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<Point3<f64>> = random_joints(&mut rng).to_vec();
    let r0 = Rotation3::from_scaled_axis(Vector3::new(-0.4, 0.2, 0.9));
    let noisy: Vec<Point3<f64>> = pts
        .iter()
        .map(|p| {
            Point3::from(
                1.3 * (r0 * p.coords)
                    + Vector3::new(4.0, 1.0, -2.0)
                    + Vector3::new(
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    ),
            )
        })
        .collect();

    let sim = procrustes_align(&pts, &noisy, true).unwrap();
    let objective = |s: f64, r: &Rotation3<f64>, t: &Vector3<f64>| -> f64 {
        pts.iter()
            .zip(&noisy)
            .map(|(x, y)| (s * (r * x.coords) + t - y.coords).norm_squared())
            .sum()
    };
    let best = objective(sim.scale, &sim.rotation, &sim.translation);
    for _ in 0..1000 {
        let ds = 1.0 + rng.random_range(-0.02..0.02);
        let dr = Rotation3::from_scaled_axis(Vector3::new(
            rng.random_range(-0.02..0.02),
            rng.random_range(-0.02..0.02),
            rng.random_range(-0.02..0.02),
        ));
        let dt = Vector3::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        );
        let perturbed =
            objective(sim.scale * ds, &(dr * sim.rotation), &(sim.translation + dt));
        assert!(perturbed + 1e-9 >= best, "perturbation beat the closed form");
    }
}

#[test]
fn pa_mpjpe_invariant_under_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..25 {
        let pts = random_joints(&mut rng);
        let s = rng.random_range(0.5..2.0);
        let r = Rotation3::from_scaled_axis(Vector3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        ));
        let t = Vector3::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
        );
        let moved: [Point3<f64>; 21] =
            std::array::from_fn(|i| Point3::from(s * (r * pts[i].coords) + t));
        let err = pa_mpjpe(
            &joints_from(moved, JointRole::Predicted),
            &joints_from(pts, JointRole::GroundTruth),
        )
        .unwrap();
        assert!(err <= 1e-6, "pa-mpjpe {err} above tolerance");
    }
}

#[test]
fn pa_mpvpe_checks_lengths() {
    let a = vec![Point3::origin(); 5];
    let b = vec![Point3::origin(); 6];
    assert!(matches!(pa_mpvpe(&a, &b), Err(MetricError::LengthMismatch(_))));
}

#[test]
fn procrustes_rejects_coincident_points() {
    let pts = vec![Point3::new(1.0, 2.0, 3.0); 10];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let target: Vec<Point3<f64>> = (0..10)
        .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
        .collect();
    assert!(matches!(
        procrustes_align(&pts, &target, true),
        Err(MetricError::Degenerate(_))
    ));
}

#[test]
fn fscore_basic_cases() {
    let a = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(10.0, 0.0, 0.0)];
    assert_eq!(fscore(&a, &a, 1.0), 1.0);

    let far = vec![Point3::new(100.0, 0.0, 0.0), Point3::new(110.0, 0.0, 0.0)];
    assert_eq!(fscore(&a, &far, 5.0), 0.0);

    // One pair within 3 mm, the other 20 mm apart, threshold 5 mm:
    // P = R = 0.5, F = 0.5.
    let pred = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(50.0, 0.0, 0.0)];
    let gt = vec![Point3::new(3.0, 0.0, 0.0), Point3::new(70.0, 0.0, 0.0)];
    assert_relative_eq!(fscore(&pred, &gt, 5.0), 0.5, epsilon = 1e-12);
}

#[test]
fn fscore_symmetric_under_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a: Vec<Point3<f64>> =
        (0..8).map(|_| Point3::new(rng.random_range(0.0..30.0), 0.0, 0.0)).collect();
    let b: Vec<Point3<f64>> =
        (0..5).map(|_| Point3::new(rng.random_range(0.0..30.0), 0.0, 0.0)).collect();
    for thr in [2.0, 5.0, 15.0] {
        assert_relative_eq!(fscore(&a, &b, thr), fscore(&b, &a, thr), epsilon = 1e-12);
    }
}

#[test]
fn psnr_cap_and_single_pixel_case() {
    let img = RgbImage::black(16, 16);
    assert_eq!(psnr(&img, &img).unwrap(), 100.0);

    // Single-channel 16x16 with one sample off by 255: MSE = 255^2 / 256.
    let a = vec![0u8; 256];
    let mut b = a.clone();
    b[40] = 255;
    let expected = 10.0 * 256.0f64.log10();
    assert_relative_eq!(psnr_bytes(&a, &b).unwrap(), expected, epsilon = 1e-9);
}

#[test]
fn ssim_identity_is_exactly_one() {
    let mut img = RgbImage::black(32, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    rng.fill(img.data.as_mut_slice());
    assert_eq!(ssim(&img, &img).unwrap(), 1.0);
}

/// Constant images 0 vs 255: every window value reduces to the stabilizer
/// expression, evaluated here directly from the formula.
#[test]
fn ssim_constant_shift_matches_formula_oracle() {
    let black = RgbImage::black(20, 20);
    let mut white = RgbImage::black(20, 20);
    white.data.fill(255);
    let c1 = 6.5025;
    let c2 = 58.5225;
    let expected = (c1 * c2) / ((255.0f64 * 255.0 + c1) * c2);
    assert_relative_eq!(ssim(&black, &white).unwrap(), expected, epsilon = 1e-12);
}

#[test]
fn ssim_rejects_small_or_mismatched_images() {
    let a = RgbImage::black(8, 8);
    assert!(matches!(ssim(&a, &a), Err(MetricError::Shape(_))));
    let b = RgbImage::black(32, 24);
    let c = RgbImage::black(24, 32);
    assert!(matches!(ssim(&b, &c), Err(MetricError::Shape(_))));
}

#[test]
fn feature_stats_hand_cases() {
    let stats = feature_stats(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
    assert_eq!(stats.cov.abs().max(), 0.0);

    let stats = feature_stats(&[vec![0.0], vec![2.0]]).unwrap();
    assert_eq!(stats.mean[0], 1.0);
    assert_eq!(stats.cov[(0, 0)], 2.0); // unbiased

    assert!(matches!(
        feature_stats(&[vec![1.0]]),
        Err(MetricError::InsufficientSamples(1))
    ));
}

#[test]
fn feature_stats_matches_two_pass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let rows: Vec<Vec<f64>> =
        (0..100).map(|_| (0..4).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
    let stats = feature_stats(&rows).unwrap();
    for k in 0..4 {
        let mean: f64 = rows.iter().map(|r| r[k]).sum::<f64>() / 100.0;
        assert_relative_eq!(stats.mean[k], mean, epsilon = 1e-9);
        for l in 0..4 {
            let mean_l: f64 = rows.iter().map(|r| r[l]).sum::<f64>() / 100.0;
            let cov: f64 =
                rows.iter().map(|r| (r[k] - mean) * (r[l] - mean_l)).sum::<f64>() / 99.0;
            assert_relative_eq!(stats.cov[(k, l)], cov, epsilon = 1e-9);
        }
    }
}

#[test]
fn frechet_analytic_and_symmetry() {
    let a = FeatureStats::new(DVector::from_vec(vec![0.0]), DMatrix::from_vec(1, 1, vec![1.0]))
        .unwrap();
    let b = FeatureStats::new(DVector::from_vec(vec![1.0]), DMatrix::from_vec(1, 1, vec![1.0]))
        .unwrap();
    assert_relative_eq!(frechet_distance(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
    assert_eq!(frechet_distance(&a, &a).unwrap(), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let d = rng.random_range(1..=6);
        let (sa, sb) = (random_stats(&mut rng, d), random_stats(&mut rng, d));
        let ab = frechet_distance(&sa, &sb).unwrap();
        let ba = frechet_distance(&sb, &sa).unwrap();
        assert!(ab >= 0.0);
        assert_relative_eq!(ab, ba, epsilon = 1e-9, max_relative = 1e-9);
    }
}

/// Simultaneous-diagonalization oracle: commuting covariances built from a
/// shared eigenbasis give tr((S1 S2)^(1/2)) = sum sqrt(d1_i * d2_i) exactly.
#[test]
fn frechet_matches_simultaneous_diagonalization_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..25 {
        let d = rng.random_range(2..=6);
        let m = DMatrix::from_iterator(d, d, (0..d * d).map(|_| rng.random_range(-1.0..1.0)));
        let q = m.qr().q();
        let d1: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..4.0)).collect();
        let d2: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..4.0)).collect();
        let cov = |diag: &[f64]| {
            &q * DMatrix::from_diagonal(&DVector::from_vec(diag.to_vec())) * q.transpose()
        };
        let mean1 = DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-2.0..2.0)));
        let mean2 = DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-2.0..2.0)));
        let a = FeatureStats::new(mean1.clone(), cov(&d1)).unwrap();
        let b = FeatureStats::new(mean2.clone(), cov(&d2)).unwrap();

        let cross: f64 = d1.iter().zip(&d2).map(|(x, y)| (x * y).sqrt()).sum();
        let expected = (mean1 - mean2).norm_squared()
            + d1.iter().sum::<f64>()
            + d2.iter().sum::<f64>()
            - 2.0 * cross;
        let got = frechet_distance(&a, &b).unwrap();
        assert_relative_eq!(got, expected.max(0.0), epsilon = 1e-9, max_relative = 1e-9);
    }
}

#[test]
fn frechet_rejects_indefinite_covariance() {
    let a = FeatureStats::new(
        DVector::from_vec(vec![0.0, 0.0]),
        DMatrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, -1.0]),
    )
    .unwrap();
    assert!(matches!(frechet_distance(&a, &a), Err(MetricError::NotPsd(_))));
}

pub(crate) fn random_stats(rng: &mut ChaCha8Rng, d: usize) -> FeatureStats {
    let mean = DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-2.0..2.0)));
    let m = DMatrix::from_iterator(d, d, (0..d * d).map(|_| rng.random_range(-1.0..1.0)));
    let cov = &m * m.transpose() + DMatrix::identity(d, d) * 1e-6;
    FeatureStats::new(mean, cov).unwrap()
}

#[test]
fn rank_and_filter_cases() {
    // 30 candidates with distinct errors: floor(30 * 0.25) = 7 discarded.
    let cands: Vec<(String, f64)> =
        (0..30).map(|i| (format!("c{i:02}"), i as f64)).collect();
    let kept = rank_and_filter(&cands, 0.25);
    assert_eq!(kept.len(), 23);
    assert!(kept.iter().all(|id| id.as_str() < "c23"));

    assert_eq!(rank_and_filter(&cands, 0.0).len(), 30);

    let four = vec![
        ("a".to_string(), 1.0),
        ("b".to_string(), 2.0),
        ("c".to_string(), 3.0),
        ("d".to_string(), 4.0),
    ];
    assert_eq!(rank_and_filter(&four, 0.25), vec!["a", "b", "c"]);

    // Single candidate: floor(0.25) = 0 discarded.
    let one = vec![("only".to_string(), 9.0)];
    assert_eq!(rank_and_filter(&one, 0.25), vec!["only"]);
}

#[test]
fn rank_and_filter_is_input_order_independent() {
    let mut cands: Vec<(String, f64)> =
        (0..12).map(|i| (format!("id{i}"), ((i * 7) % 12) as f64)).collect();
    let sorted_out = rank_and_filter(&cands, 0.3);
    cands.reverse();
    assert_eq!(rank_and_filter(&cands, 0.3), sorted_out);
}

#[test]
fn report_validation_and_roundtrip() {
    let mut report = MetricsReport {
        mf: Some(1.7),
        psnr: Some(31.0),
        ssim: Some(0.94),
        mpjpe_mm: Some(12.5),
        counts: ReportCounts { clips: 2, frames: 98, tracks: 200 },
        ..Default::default()
    };
    report.fscore_at.insert(MetricsReport::fscore_key(5.0), 0.8);
    report.fscore_at.insert(MetricsReport::fscore_key(15.0), 0.99);
    report.validate().unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    save_report(&path, &report).unwrap();
    let back = load_report(&path).unwrap();
    assert_eq!(back.mf, report.mf);
    assert_eq!(back.fscore_at, report.fscore_at);
    assert_eq!(back.counts, report.counts);

    report.mf = Some(2.5);
    assert!(report.validate().is_err());
}

#[test]
fn point_and_feature_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let joints_path = dir.path().join("joints.json");
    let frames = vec![
        vec![Point3::new(1.0, 2.0, 3.0), Point3::new(-1.0, 0.5, 2.0)],
        vec![Point3::new(0.0, 0.0, 0.0), Point3::new(4.0, 4.0, 4.0)],
    ];
    save_point_frames(&joints_path, &frames).unwrap();
    assert_eq!(load_point_frames(&joints_path).unwrap(), frames);

    let feat_path = dir.path().join("f.f32");
    let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
    save_features(&feat_path, &rows).unwrap();
    assert_eq!(load_features(&feat_path).unwrap(), rows);
}

#[test]
fn pairwise_sum_matches_naive_on_benign_data() {
    let values: Vec<f64> = (0..1000).map(|i| i as f64 * 0.25).collect();
    let naive: f64 = values.iter().sum();
    assert_relative_eq!(pairwise_sum(&values), naive, epsilon = 1e-9);
}
