//! The angle-radius function of a hull: distance from the canonical origin to
//! the hull boundary along direction θ.

use crate::hull::{ConvexPolygon, Point2};
use crate::scalar::Scalar;

/// Number of angles on the diagnostic grid.
pub const DEFAULT_ANGLES: usize = 360;

/// Slack on the edge parameter so rays through a vertex hit both neighbours.
const EDGE_SLACK: f64 = 1e-12;

/// `f(θ)` sampled on a uniform grid starting at θ = 0 (the forward axis).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile<T> {
    angles: Vec<T>,
    radii: Vec<T>,
    origin: Point2<T>,
}

impl<T: Scalar> RadialProfile<T> {
    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn origin(&self) -> Point2<T> {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Samples `f(θ_i)` at `θ_i = 2πi / n_angles`.
pub fn radial_profile<T: Scalar>(poly: &ConvexPolygon<T>, n_angles: usize) -> RadialProfile<T> {
    let step = T::TAU() / T::of_usize(n_angles.max(1));
    let angles: Vec<T> = (0..n_angles).map(|i| step * T::of_usize(i)).collect();
    let radii = angles.iter().map(|&a| radial_profile_at(poly, a)).collect();
    RadialProfile {
        angles,
        radii,
        origin: Point2::default(),
    }
}

/// `f(θ)` for one direction: the largest `t ≥ 0` with `t·(cos θ, sin θ)` in
/// the polygon, or 0 when the ray misses it.
///
/// With the origin inside the hull this is the distance to the single
/// boundary crossing. From an exterior origin it is the far crossing.
pub fn radial_profile_at<T: Scalar>(poly: &ConvexPolygon<T>, theta: T) -> T {
    let (sin, cos) = theta.sin_cos();
    ray_extent(poly, cos, sin)
}

pub(crate) fn ray_extent<T: Scalar>(poly: &ConvexPolygon<T>, du: T, dv: T) -> T {
    let slack = T::of(EDGE_SLACK);
    let lo = -slack;
    let hi = T::one() + slack;
    let mut best: Option<T> = None;
    let mut consider = |t: T| {
        if t >= T::zero() && best.map_or(true, |b| t > b) {
            best = Some(t);
        }
    };
    for (a, b) in poly.edges() {
        let (eu, ev) = (b.u - a.u, b.v - a.v);
        let den = du * ev - dv * eu;
        let a_cross_d = a.u * dv - a.v * du;
        if den == T::zero() {
            // edge parallel to the ray; it only counts when on the ray's line
            if a_cross_d == T::zero() {
                consider(a.u * du + a.v * dv);
                consider(b.u * du + b.v * dv);
            }
            continue;
        }
        let s = a_cross_d / den;
        if s >= lo && s <= hi {
            consider((a.u * ev - a.v * eu) / den);
        }
    }
    best.unwrap_or_else(T::zero)
}
