#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::float::FloatCore;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapesig::synth::{lattice_box_points, ObjectDims};
use shapesig::{Box3D64, ConvexPolygon, Point2, Point3, PointCloud64};

/// Car lattice (4.6 x 1.9 x 1.7 m, 0.1 m step) signature from the independent
/// qhull-based reference, canonical input.
pub const CAR_LATTICE_SIGNATURE: [f64; 9] = [
    1.7386687354736423,
    0.0,
    0.45242764849505757,
    1.6519120791748902,
    0.0,
    0.496840900064927,
    1.0018959187023466,
    -7.894919286223336e-17,
    -0.008967721120763722,
];

/// Pose used for the posed variant of the reference.
pub const CAR_POSE_CENTER: [f64; 3] = [12.0, -4.0, 0.85];
pub const CAR_POSE_YAW: f64 = 0.4;

/// Reference 99th percentiles x 3 of the relative signature change on the car
/// lattice over 1000 trials.
pub const NOISE_BOUND_JITTER: f64 = 0.160356;
pub const NOISE_BOUND_JITTER_DROP: f64 = 0.156413;

/// Reference mean silhouette of the default synthetic fleet over 5 seeds.
pub const FLEET_SILHOUETTE: f64 = 0.8926200890238123;

pub fn car_dims() -> ObjectDims {
    ObjectDims::new(4.6, 1.9, 1.7)
}

pub fn car_lattice() -> PointCloud64 {
    PointCloud64::sensor(lattice_box_points(car_dims(), 0.1)).unwrap()
}

/// Unit-pose box matching the lattice, so canonical and sensor frames agree.
pub fn identity_box(dims: ObjectDims) -> Box3D64 {
    Box3D64::from_parts(Point3::new(0.0, 0.0, 0.0), dims.width, dims.length, dims.height, 0.0).unwrap()
}

/// Brute-force hull over distinct points: a directed pair `(a, b)` is an
/// edge when no point lies to its right and every collinear point lies on the
/// closed segment. Returns the edge endpoints, each once.
pub fn brute_force_hull_by<P: Clone>(
    pts: &[P],
    orient: impl Fn(&P, &P, &P) -> i8,
    between: impl Fn(&P, &P, &P) -> bool,
) -> Vec<P> {
    let mut is_vertex = vec![false; pts.len()];
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let edge = pts.iter().all(|c| match orient(a, b, c) {
                1 => true,
                0 => between(a, b, c),
                _ => false,
            });
            if edge {
                is_vertex[i] = true;
                is_vertex[j] = true;
            }
        }
    }
    pts.iter().zip(is_vertex).filter(|(_, v)| *v).map(|(p, _)| p.clone()).collect()
}

/// Exact hull vertices of `f64` points, as sorted `(u, v)` pairs. Every
/// coordinate is rescaled to a big integer over the smallest binary exponent
/// present, so orientations are evaluated without rounding.
pub fn exact_hull(points: &[Point2<f64>]) -> Vec<(f64, f64)> {
    let decoded: Vec<[(i8, u64, i16); 2]> = points
        .iter()
        .map(|p| [p.u, p.v].map(|x| {
            let (m, e, s) = (x + 0.0).integer_decode();
            (s, m, e)
        }))
        .collect();
    let min_exp = decoded.iter().flatten().map(|&(_, _, e)| e).min().unwrap_or(0);
    let to_int = |(s, m, e): (i8, u64, i16)| BigInt::from(s) * (BigInt::from(m) << ((e - min_exp) as usize));
    let exact: Vec<(BigInt, BigInt, usize)> = decoded
        .iter()
        .enumerate()
        .map(|(i, d)| (to_int(d[0]), to_int(d[1]), i))
        .collect();
    let key = |p: &(BigInt, BigInt, usize)| (p.0.clone(), p.1.clone());
    let orient = |a: &(BigInt, BigInt, usize), b: &(BigInt, BigInt, usize), c: &(BigInt, BigInt, usize)| {
        let d = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
        d.signum().to_i8().unwrap()
    };
    let between = |a: &(BigInt, BigInt, usize), b: &(BigInt, BigInt, usize), c: &(BigInt, BigInt, usize)| {
        let dot = (&c.0 - &a.0) * (&b.0 - &a.0) + (&c.1 - &a.1) * (&b.1 - &a.1);
        let len = (&b.0 - &a.0) * (&b.0 - &a.0) + (&b.1 - &a.1) * (&b.1 - &a.1);
        !dot.is_negative() && dot <= len
    };
    let mut unique = exact;
    unique.sort_by_key(key);
    unique.dedup_by_key(|p| key(p));
    let mut verts: Vec<(f64, f64)> = brute_force_hull_by(&unique, orient, between)
        .into_iter()
        .map(|p| (points[p.2].u + 0.0, points[p.2].v + 0.0))
        .collect();
    verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    verts
}

/// Hull vertices as sorted `(u, v)` pairs with signed zeros merged.
pub fn vertex_set(poly: &ConvexPolygon<f64>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = poly.vertices().iter().map(|p| (p.u + 0.0, p.v + 0.0)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Fixed-point scale used by the integer oracle: coordinates are `k * 2^-40`.
pub const FIXED_SCALE: f64 = 1.0 / (1u64 << 40) as f64;

/// Exact hull of integer points with `|k| < 2^44`; orientations fit in `i128`.
pub fn integer_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let orient = |a: &(i64, i64), b: &(i64, i64), c: &(i64, i64)| {
        let d = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
        d.signum() as i8
    };
    let between = |a: &(i64, i64), b: &(i64, i64), c: &(i64, i64)| {
        let dot = (c.0 - a.0) as i128 * (b.0 - a.0) as i128 + (c.1 - a.1) as i128 * (b.1 - a.1) as i128;
        let len = (b.0 - a.0) as i128 * (b.0 - a.0) as i128 + (b.1 - a.1) as i128 * (b.1 - a.1) as i128;
        dot >= 0 && dot <= len
    };
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut verts = brute_force_hull_by(&pts, orient, between);
    verts.sort_unstable();
    verts
}

pub fn fixed_to_point(p: (i64, i64)) -> Point2<f64> {
    Point2::new(p.0 as f64 * FIXED_SCALE, p.1 as f64 * FIXED_SCALE)
}

pub fn point_to_fixed(p: &Point2<f64>) -> (i64, i64) {
    let k = |x: f64| {
        let v = x / FIXED_SCALE;
        assert_eq!(v.fract(), 0.0, "hull vertex {x} is not an input coordinate");
        v as i64
    };
    (k(p.u), k(p.v))
}

/// Random point sets for the hull oracle. Mixes general position, coarse
/// grids with many collinear and repeated points, and near-circular sets.
/// Sets whose hull has fewer than three vertices are redrawn.
pub fn random_fixed_set(rng: &mut ChaCha8Rng, max_points: usize) -> Vec<(i64, i64)> {
    loop {
        let n = rng.gen_range(3..=max_points);
        let kind = rng.gen_range(0..3);
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| match kind {
                0 => {
                    let r = 10i64 << 40;
                    (rng.gen_range(-r..=r), rng.gen_range(-r..=r))
                }
                1 => {
                    let g = 1i64 << 38;
                    (rng.gen_range(-4..=4) * g, rng.gen_range(-4..=4) * g)
                }
                _ => {
                    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let r = (3u64 << 40) as f64;
                    ((r * a.cos()).round() as i64, (r * a.sin()).round() as i64)
                }
            })
            .collect();
        if integer_hull(&pts).len() >= 3 {
            return pts;
        }
    }
}

/// A random box and a cloud of points spread through it, in the sensor frame.
pub fn random_instance(rng: &mut ChaCha8Rng, n_points: usize) -> (PointCloud64, Box3D64) {
    let w = rng.gen_range(0.5..3.0);
    let l = rng.gen_range(0.5..12.0);
    let h = rng.gen_range(0.5..4.0);
    let r = rng.gen_range(3.0..60.0);
    let az: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let center = Point3::new(r * az.cos(), r * az.sin(), rng.gen_range(-2.0..1.0));
    let yaw = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let bbox = Box3D64::from_parts(center, w, l, h, yaw).unwrap();
    let pts = (0..n_points)
        .map(|_| {
            let local = Point3::new(
                rng.gen_range(-0.5..0.5) * l,
                rng.gen_range(-0.5..0.5) * w,
                rng.gen_range(-0.5..0.5) * h,
            );
            local.rotate_z(yaw).add(&center)
        })
        .collect();
    (PointCloud64::sensor(pts).unwrap(), bbox)
}

/// Points that are strictly positive combinations of every input point, hence
/// interior to the hull of any linear projection of a full-dimensional set.
pub fn interior_points(rng: &mut ChaCha8Rng, pts: &[Point3<f64>], count: usize) -> Vec<Point3<f64>> {
    (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..pts.len()).map(|_| rng.gen_range(0.5..1.5)).collect();
            let total: f64 = w.iter().sum();
            let mut q = Point3::new(0.0, 0.0, 0.0);
            for (p, wi) in pts.iter().zip(&w) {
                q = q.add(&p.scale(wi / total));
            }
            q
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
