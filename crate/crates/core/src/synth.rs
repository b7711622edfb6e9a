//! Synthetic box-shaped objects for tests, benchmarks and separation studies.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{Box3D, Point3, PointCloud3};
use crate::scalar::Scalar;
use crate::signature::LabeledObject;

/// Box extents in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectDims {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl ObjectDims {
    pub const fn new(length: f64, width: f64, height: f64) -> Self {
        Self {
            length,
            width,
            height,
        }
    }

    pub fn scaled(&self, s: [f64; 3]) -> Self {
        Self::new(self.length * s[0], self.width * s[1], self.height * s[2])
    }
}

/// Class-mean dimensions (length × width × height) of common road users.
pub const CLASS_DIMS: [(&str, ObjectDims); 4] = [
    ("car", ObjectDims::new(4.6, 1.9, 1.7)),
    ("bus", ObjectDims::new(11.0, 2.9, 3.5)),
    ("pedestrian", ObjectDims::new(0.7, 0.7, 1.7)),
    ("bicycle", ObjectDims::new(1.7, 0.6, 1.3)),
];

pub fn class_dims(label: &str) -> Option<ObjectDims> {
    CLASS_DIMS.iter().find(|(l, _)| *l == label).map(|(_, d)| *d)
}

/// Regular grid on all six faces of an origin-centred box, edges included.
/// Each extent is split into `ceil(extent / step)` equal intervals.
pub fn lattice_box_points<T: Scalar>(dims: ObjectDims, step: f64) -> Vec<Point3<T>> {
    let lin = |ext: f64| -> Vec<f64> {
        let m = (ext / step - 1e-9).ceil().max(1.0) as usize;
        (0..=m).map(|i| -ext / 2.0 + ext * i as f64 / m as f64).collect()
    };
    let ObjectDims {
        length: l,
        width: w,
        height: h,
    } = dims;
    let (xs, ys, zs) = (lin(l), lin(w), lin(h));
    let mut pts = Vec::new();
    let mut push = |x: f64, y: f64, z: f64| pts.push(Point3::new(T::of(x), T::of(y), T::of(z)));
    for sx in [-l / 2.0, l / 2.0] {
        for &y in &ys {
            for &z in &zs {
                push(sx, y, z);
            }
        }
    }
    for sy in [-w / 2.0, w / 2.0] {
        for &x in &xs {
            for &z in &zs {
                push(x, sy, z);
            }
        }
    }
    for sz in [-h / 2.0, h / 2.0] {
        for &x in &xs {
            for &y in &ys {
                push(x, y, sz);
            }
        }
    }
    pts
}

/// `n_points` samples on the faces of a posed box that face a sensor at the
/// origin, chosen area-weighted, with isotropic Gaussian noise `sigma`.
pub fn visible_surface_points<R: Rng + ?Sized>(
    rng: &mut R,
    dims: ObjectDims,
    center: Point3<f64>,
    yaw: f64,
    n_points: usize,
    sigma: f64,
) -> Vec<Point3<f64>> {
    let ObjectDims {
        length: l,
        width: w,
        height: h,
    } = dims;
    // (outward normal, face centre, spanning vectors)
    let faces: [([f64; 3], [f64; 3], [f64; 3], [f64; 3]); 6] = [
        ([1.0, 0.0, 0.0], [l / 2.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, h]),
        ([-1.0, 0.0, 0.0], [-l / 2.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, h]),
        ([0.0, 1.0, 0.0], [0.0, w / 2.0, 0.0], [l, 0.0, 0.0], [0.0, 0.0, h]),
        ([0.0, -1.0, 0.0], [0.0, -w / 2.0, 0.0], [l, 0.0, 0.0], [0.0, 0.0, h]),
        ([0.0, 0.0, 1.0], [0.0, 0.0, h / 2.0], [l, 0.0, 0.0], [0.0, w, 0.0]),
        ([0.0, 0.0, -1.0], [0.0, 0.0, -h / 2.0], [l, 0.0, 0.0], [0.0, w, 0.0]),
    ];
    let v3 = |a: [f64; 3]| Point3::new(a[0], a[1], a[2]);
    let visible: Vec<_> = faces
        .iter()
        .filter(|(n, off, _, _)| {
            let fc = v3(*off).rotate_z(yaw).add(&center);
            let nw = v3(*n).rotate_z(yaw);
            -(nw.x * fc.x + nw.y * fc.y + nw.z * fc.z) > 0.0
        })
        .collect();
    if visible.is_empty() || n_points == 0 {
        return Vec::new();
    }
    let area = |u: &[f64; 3], v: &[f64; 3]| {
        let norm = |a: &[f64; 3]| (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        norm(u) * norm(v)
    };
    let pick = WeightedIndex::new(visible.iter().map(|(_, _, u, v)| area(u, v)))
        .expect("visible faces have positive area");
    (0..n_points)
        .map(|_| {
            let (_, off, u, v) = visible[pick.sample(rng)];
            let a: f64 = rng.gen::<f64>() - 0.5;
            let b: f64 = rng.gen::<f64>() - 0.5;
            let local = Point3::new(
                off[0] + a * u[0] + b * v[0],
                off[1] + a * u[1] + b * v[1],
                off[2] + a * u[2] + b * v[2],
            );
            let p = local.rotate_z(yaw).add(&center);
            let mut noise = || -> f64 { sigma * rng.sample::<f64, _>(StandardNormal) };
            Point3::new(p.x + noise(), p.y + noise(), p.z + noise())
        })
        .collect()
}

/// Protocol for a multi-class fleet of synthetic objects.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSpec {
    pub per_class: usize,
    /// Points sampled per object before dropout.
    pub points: usize,
    pub dropout: f64,
    /// Relative standard deviation applied to each class-mean extent.
    pub dim_jitter: f64,
    pub noise_sigma: f64,
    /// The first half of each class is placed in `near_range`, the rest in `far_range`.
    pub near_range: (f64, f64),
    pub far_range: (f64, f64),
    pub ground_z: f64,
}

impl Default for FleetSpec {
    fn default() -> Self {
        Self {
            per_class: 50,
            points: 300,
            dropout: 0.2,
            dim_jitter: 0.05,
            noise_sigma: 0.02,
            near_range: (5.0, 40.0),
            far_range: (40.0, 70.0),
            ground_z: -1.8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FleetObject {
    pub object: LabeledObject<f64>,
    /// Horizontal range of the box centre from the sensor.
    pub distance: f64,
}

/// One posed object of the given class-mean dimensions.
pub fn random_object<R: Rng + ?Sized>(
    rng: &mut R,
    label: &str,
    mean_dims: ObjectDims,
    range: (f64, f64),
    spec: &FleetSpec,
) -> FleetObject {
    let mut jitter = || (1.0 + spec.dim_jitter * rng.sample::<f64, _>(StandardNormal)).max(0.5);
    let dims = mean_dims.scaled([jitter(), jitter(), jitter()]);
    let r = rng.gen_range(range.0..range.1);
    let az = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let yaw = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let center = Point3::new(r * az.cos(), r * az.sin(), spec.ground_z + dims.height / 2.0);
    let mut pts = visible_surface_points(rng, dims, center, yaw, spec.points, spec.noise_sigma);
    if spec.dropout > 0.0 {
        pts.retain(|_| rng.gen::<f64>() >= spec.dropout);
    }
    let bbox = Box3D::from_parts(center, dims.width, dims.length, dims.height, yaw)
        .expect("synthetic boxes are valid");
    FleetObject {
        object: LabeledObject {
            cloud: PointCloud3::sensor(pts).expect("synthetic points are finite"),
            bbox,
            label: label.to_string(),
        },
        distance: r,
    }
}

/// `per_class` objects for each entry of [`CLASS_DIMS`], reproducible from `seed`.
pub fn synthetic_fleet(spec: &FleetSpec, seed: u64) -> Vec<FleetObject> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.per_class * CLASS_DIMS.len());
    for (label, dims) in CLASS_DIMS {
        for i in 0..spec.per_class {
            let range = if 2 * i < spec.per_class {
                spec.near_range
            } else {
                spec.far_range
            };
            out.push(random_object(&mut rng, label, dims, range, spec));
        }
    }
    out
}
