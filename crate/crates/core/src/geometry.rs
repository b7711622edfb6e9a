//! Object points, ground-truth boxes and the canonical object frame.
//!
//! A cloud is moved into the canonical frame by translating the box centre to
//! the origin and rotating by `-yaw`, so the box's forward direction lies on
//! `+x`. Yaw is measured counterclockwise about `+z` seen from above.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(&self, other: &Self) -> T {
        let d = self.sub(other);
        (d.x * d.x + d.y * d.y + d.z * d.z).sqrt()
    }

    /// Rotates about `+z` by `angle` (counterclockwise seen from above).
    pub fn rotate_z(&self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl<T: fmt::Display> fmt::Display for Point3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Sensor,
    Canonical,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Sensor => "sensor",
            Frame::Canonical => "canonical",
        })
    }
}

/// The points belonging to one object. Every coordinate is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud3<T> {
    points: Vec<Point3<T>>,
    frame: Frame,
}

impl<T: Scalar> PointCloud3<T> {
    pub fn new(points: Vec<Point3<T>>, frame: Frame) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinitePoint { index });
        }
        Ok(Self { points, frame })
    }

    pub fn sensor(points: Vec<Point3<T>>) -> Result<Self> {
        Self::new(points, Frame::Sensor)
    }

    pub fn canonical(points: Vec<Point3<T>>) -> Result<Self> {
        Self::new(points, Frame::Canonical)
    }

    pub fn empty(frame: Frame) -> Self {
        Self {
            points: Vec::new(),
            frame,
        }
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Point3<T>> {
        if self.points.is_empty() {
            return None;
        }
        let n = T::of_usize(self.points.len());
        let sum = self
            .points
            .iter()
            .fold(Point3::default(), |acc: Point3<T>, p| acc.add(p));
        Some(sum.scale(n.recip()))
    }

    pub(crate) fn require(&self, expected: Frame) -> Result<()> {
        if self.frame != expected {
            return Err(Error::Frame {
                expected,
                found: self.frame,
            });
        }
        Ok(())
    }
}

/// Box extents in meters, stored by name to avoid positional confusion.
///
/// `length` runs along the forward (`+x` canonical) axis, `width` along `y`
/// and `height` along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSize<T> {
    pub width: T,
    pub length: T,
    pub height: T,
}

/// Oriented ground-truth box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D<T> {
    center: Point3<T>,
    size: BoxSize<T>,
    yaw: T,
}

impl<T: Scalar> Box3D<T> {
    /// Validates the box and wraps `yaw` into `[-π, π)`.
    pub fn new(center: Point3<T>, size: BoxSize<T>, yaw: T) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidBox(format!("non-finite center {center}")));
        }
        for (name, v) in [
            ("width", size.width),
            ("length", size.length),
            ("height", size.height),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidBox(format!("{name} must be positive, got {v}")));
            }
        }
        if !yaw.is_finite() {
            return Err(Error::InvalidBox(format!("non-finite yaw {yaw}")));
        }
        Ok(Self {
            center,
            size,
            yaw: wrap_angle(yaw),
        })
    }

    /// Shorthand taking `(width, length, height)`.
    pub fn from_parts(center: Point3<T>, width: T, length: T, height: T, yaw: T) -> Result<Self> {
        Self::new(
            center,
            BoxSize {
                width,
                length,
                height,
            },
            yaw,
        )
    }

    pub fn center(&self) -> Point3<T> {
        self.center
    }

    pub fn size(&self) -> BoxSize<T> {
        self.size
    }

    pub fn yaw(&self) -> T {
        self.yaw
    }

    /// Horizontal range of the box centre from the sensor origin.
    pub fn range(&self) -> T {
        self.center.x.hypot(self.center.y)
    }

    /// Whether a canonical-frame point lies inside the box grown by `margin`
    /// (a fraction of each extent, e.g. 0.1 for 10 %).
    pub fn contains_canonical(&self, p: &Point3<T>, margin: T) -> bool {
        let half = T::of(0.5) * (T::one() + margin);
        p.x.abs() <= self.size.length * half
            && p.y.abs() <= self.size.width * half
            && p.z.abs() <= self.size.height * half
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let two_pi = T::TAU();
    let mut a = angle - two_pi * ((angle + T::PI()) / two_pi).floor();
    if a >= T::PI() {
        a -= two_pi;
    }
    if a < -T::PI() {
        a += two_pi;
    }
    a
}

/// How the partial view is completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SymmetryMode {
    /// `(x, y, z) -> (-x, -y, z)`: reflect through the vertical axis.
    #[default]
    Planar,
    /// `(x, y, z) -> (-x, -y, -z)`: reflect through the box centre.
    Full3d,
}

/// Moves sensor-frame points into the box's canonical frame:
/// `p' = R(-yaw) (p - center)`.
pub fn canonicalize<T: Scalar>(cloud: &PointCloud3<T>, bbox: &Box3D<T>) -> Result<PointCloud3<T>> {
    cloud.require(Frame::Sensor)?;
    let (s, c) = bbox.yaw.sin_cos();
    let center = bbox.center;
    let points = cloud
        .points
        .iter()
        .map(|p| {
            let d = p.sub(&center);
            Point3::new(c * d.x + s * d.y, c * d.y - s * d.x, d.z)
        })
        .collect();
    Ok(PointCloud3 {
        points,
        frame: Frame::Canonical,
    })
}

/// Appends the mirror image of every point. Duplicates are kept.
pub fn centro_symmetrize<T: Scalar>(
    cloud: &PointCloud3<T>,
    mode: SymmetryMode,
) -> Result<PointCloud3<T>> {
    cloud.require(Frame::Canonical)?;
    let mut points = Vec::with_capacity(cloud.len() * 2);
    points.extend_from_slice(&cloud.points);
    points.extend(cloud.points.iter().map(|p| match mode {
        SymmetryMode::Planar => Point3::new(-p.x, -p.y, p.z),
        SymmetryMode::Full3d => Point3::new(-p.x, -p.y, -p.z),
    }));
    Ok(PointCloud3 {
        points,
        frame: Frame::Canonical,
    })
}

/// Keeps canonical-frame points inside the box grown by `margin`.
pub fn clip_to_box<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    margin: T,
) -> Result<PointCloud3<T>> {
    cloud.require(Frame::Canonical)?;
    Ok(PointCloud3 {
        points: cloud
            .points
            .iter()
            .filter(|p| bbox.contains_canonical(p, margin))
            .copied()
            .collect(),
        frame: Frame::Canonical,
    })
}

/// A scene motion: rotation about `+z` followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawMotion<T> {
    pub rotation: T,
    pub translation: Point3<T>,
}

impl<T: Scalar> YawMotion<T> {
    pub fn apply_point(&self, p: &Point3<T>) -> Point3<T> {
        p.rotate_z(self.rotation).add(&self.translation)
    }

    pub fn apply_cloud(&self, cloud: &PointCloud3<T>) -> PointCloud3<T> {
        PointCloud3 {
            points: cloud.points.iter().map(|p| self.apply_point(p)).collect(),
            frame: cloud.frame,
        }
    }

    pub fn apply_box(&self, bbox: &Box3D<T>) -> Result<Box3D<T>> {
        Box3D::new(
            self.apply_point(&bbox.center),
            bbox.size,
            bbox.yaw + self.rotation,
        )
    }
}
