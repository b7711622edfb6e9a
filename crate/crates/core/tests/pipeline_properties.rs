mod common;

use proptest::prelude::*;
use shapesig::geometry::YawMotion;
use shapesig::{
    canonicalize, centro_symmetrize, compute_signature, convex_hull, project, radial_profile_at,
    Box3D64, Point3, PointCloud3, PointCloud64, SignatureConfig, SymmetryMode, View,
};

fn signature(cloud: &PointCloud64, bbox: &Box3D64) -> Vec<f64> {
    compute_signature(cloud, bbox, &SignatureConfig::default())
        .unwrap()
        .shape()
        .expect("enough points")
        .into_values()
}

fn motion(rotation: f64, tx: f64, ty: f64, tz: f64) -> YawMotion<f64> {
    YawMotion {
        rotation,
        translation: Point3::new(tx, ty, tz),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sorted_bits(cloud: &PointCloud64) -> Vec<[u64; 3]> {
    let mut v: Vec<[u64; 3]> = cloud
        .points()
        .iter()
        .map(|p| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()])
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_coordinates_ignore_scene_motion(
        seed in any::<u64>(),
        rot in -10.0..10.0f64,
        tx in -100.0..100.0f64,
        ty in -100.0..100.0f64,
        tz in -5.0..5.0f64,
    ) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 60);
        let m = motion(rot, tx, ty, tz);
        let a = canonicalize(&cloud, &bbox).unwrap();
        let b = canonicalize(&m.apply_cloud(&cloud), &m.apply_box(&bbox).unwrap()).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            prop_assert!(p.distance(q) < 1e-9, "{p:?} vs {q:?}");
        }
    }

    #[test]
    fn canonicalization_preserves_distances(seed in any::<u64>()) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 40);
        let c = canonicalize(&cloud, &bbox).unwrap();
        let (p, q) = (cloud.points(), c.points());
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                prop_assert!((p[i].distance(&p[j]) - q[i].distance(&q[j])).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetrized_cloud_is_centred_and_closed(seed in any::<u64>(), full in any::<bool>()) {
        let mode = if full { SymmetryMode::Full3d } else { SymmetryMode::Planar };
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 50);
        let canonical = canonicalize(&cloud, &bbox).unwrap();
        let once = centro_symmetrize(&canonical, mode).unwrap();
        prop_assert_eq!(once.len(), 2 * canonical.len());
        let c = once.centroid().unwrap();
        prop_assert!(c.x.abs() < 1e-12 && c.y.abs() < 1e-12);
        if full {
            prop_assert!(c.z.abs() < 1e-12);
        }
        let twice = centro_symmetrize(&once, mode).unwrap();
        prop_assert_eq!(sorted_bits(&once), sorted_bits(&twice));
    }

    #[test]
    fn signature_ignores_scene_motion(
        seed in any::<u64>(),
        rot in -4.0..4.0f64,
        tx in -50.0..50.0f64,
        ty in -50.0..50.0f64,
    ) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 80);
        let m = motion(rot, tx, ty, 0.3);
        let a = signature(&cloud, &bbox);
        let b = signature(&m.apply_cloud(&cloud), &m.apply_box(&bbox).unwrap());
        prop_assert!(max_abs_diff(&a, &b) < 1e-6, "{a:?} vs {b:?}");
    }

    #[test]
    fn interior_points_leave_signature_bit_identical(seed in any::<u64>(), extra in 1usize..40) {
        let mut rng = common::rng(seed);
        let (cloud, bbox) = common::random_instance(&mut rng, 60);
        let mut pts = cloud.points().to_vec();
        pts.extend(common::interior_points(&mut rng, cloud.points(), extra));
        let grown = PointCloud64::sensor(pts).unwrap();
        let a = signature(&cloud, &bbox);
        let b = signature(&grown, &bbox);
        prop_assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn power_of_two_scaling_is_exact(seed in any::<u64>(), exp in -3i32..=4) {
        let s = 2f64.powi(exp);
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 50);
        let scaled_cloud = PointCloud64::sensor(cloud.points().iter().map(|p| p.scale(s)).collect()).unwrap();
        let size = bbox.size();
        let scaled_box = Box3D64::from_parts(bbox.center().scale(s), size.width * s, size.length * s, size.height * s, bbox.yaw()).unwrap();
        let a = signature(&cloud, &bbox);
        let b = signature(&scaled_cloud, &scaled_box);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!((x * s).to_bits(), y.to_bits());
        }
    }

    #[test]
    fn arbitrary_scaling_is_equivariant(seed in any::<u64>(), s in 0.05..20.0f64) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 50);
        let scaled_cloud = PointCloud64::sensor(cloud.points().iter().map(|p| p.scale(s)).collect()).unwrap();
        let size = bbox.size();
        let scaled_box = Box3D64::from_parts(bbox.center().scale(s), size.width * s, size.length * s, size.height * s, bbox.yaw()).unwrap();
        let a = signature(&cloud, &bbox);
        let b = signature(&scaled_cloud, &scaled_box);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())) * s;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * s - y).abs() <= 1e-12 * scale.max(1.0), "{} vs {}", x * s, y);
        }
    }

    #[test]
    fn bird_view_radius_is_pi_periodic(seed in any::<u64>(), theta in 0.0..std::f64::consts::PI) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 40);
        let completed = centro_symmetrize(&canonicalize(&cloud, &bbox).unwrap(), SymmetryMode::Planar).unwrap();
        let hull = convex_hull(&project(&completed, View::Bird).unwrap()).unwrap();
        let a = radial_profile_at(&hull, theta);
        let b = radial_profile_at(&hull, theta + std::f64::consts::PI);
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn radius_grows_with_the_hull(seed in any::<u64>(), keep in 4usize..30, theta in 0.0..std::f64::consts::TAU) {
        let (cloud, bbox) = common::random_instance(&mut common::rng(seed), 40);
        let full = centro_symmetrize(&canonicalize(&cloud, &bbox).unwrap(), SymmetryMode::Planar).unwrap();
        let sub_cloud = PointCloud3::sensor(cloud.points()[..keep].to_vec()).unwrap();
        let sub = centro_symmetrize(&canonicalize(&sub_cloud, &bbox).unwrap(), SymmetryMode::Planar).unwrap();
        for view in View::ALL {
            let small = convex_hull(&project(&sub, view).unwrap()).unwrap();
            let big = convex_hull(&project(&full, view).unwrap()).unwrap();
            let (fs, fb) = (radial_profile_at(&small, theta), radial_profile_at(&big, theta));
            prop_assert!(fs <= fb + 1e-12, "{view:?}: {fs} > {fb}");
        }
    }
}

#[test]
fn single_and_double_precision_agree() {
    let mut rng = common::rng(5);
    for _ in 0..10 {
        let (cloud, bbox) = common::random_instance(&mut rng, 100);
        let a = signature(&cloud, &bbox);
        let cloud32 = PointCloud3::<f32>::sensor(
            cloud
                .points()
                .iter()
                .map(|p| Point3::new(p.x as f32, p.y as f32, p.z as f32))
                .collect(),
        )
        .unwrap();
        let c = bbox.center();
        let s = bbox.size();
        let bbox32 = shapesig::Box3D32::from_parts(
            Point3::new(c.x as f32, c.y as f32, c.z as f32),
            s.width as f32,
            s.length as f32,
            s.height as f32,
            bbox.yaw() as f32,
        )
        .unwrap();
        let b = compute_signature(&cloud32, &bbox32, &SignatureConfig::default())
            .unwrap()
            .shape()
            .unwrap();
        for (x, y) in a.iter().zip(b.values()) {
            assert!((x - *y as f64).abs() < 1e-3 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let (cloud, bbox) = common::random_instance(&mut common::rng(11), 500);
    let first = signature(&cloud, &bbox);
    for _ in 0..5 {
        let again = signature(&cloud, &bbox);
        assert_eq!(
            first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            again.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
