//! Tri-view projection and 2D convex hulls.
//!
//! Orientation tests use an adaptive exact predicate, so the hull returned is
//! the exact hull of the input coordinates: interior points never influence
//! the result and output is reproducible bit for bit.


use robust::{orient2d, Coord};

use crate::error::{Error, Result};
use crate::geometry::{Frame, PointCloud3, SymmetryMode};
use crate::scalar::Scalar;

/// Half-thickness, in meters, given to collinear or coincident point sets.
pub const DEGENERATE_INFLATION: f64 = 1e-3;

/// Relative margin of the interior prefilter, about 10^6 ulps.
const INTERIOR_FILTER_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Which pair of canonical axes a view keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    /// `(x, y)`, looking down.
    Bird,
    /// `(x, z)`, looking from the side.
    Side,
    /// `(y, z)`, looking from the front.
    Front,
}

impl View {
    pub const ALL: [View; 3] = [View::Bird, View::Side, View::Front];

    pub fn name(&self) -> &'static str {
        match self {
            View::Bird => "bird",
            View::Side => "side",
            View::Front => "front",
        }
    }

    /// Column prefix used in signature tables.
    pub fn prefix(&self) -> char {
        match self {
            View::Bird => 'b',
            View::Side => 's',
            View::Front => 'f',
        }
    }
}

/// Projects a canonical cloud onto the plane of `view`.
pub fn project<T: Scalar>(cloud: &PointCloud3<T>, view: View) -> Result<Vec<Point2<T>>> {
    cloud.require(Frame::Canonical)?;
    Ok(cloud
        .points()
        .iter()
        .map(|p| match view {
            View::Bird => Point2::new(p.x, p.y),
            View::Side => Point2::new(p.x, p.z),
            View::Front => Point2::new(p.y, p.z),
        })
        .collect())
}

/// Sign of the turn `a -> b -> c`: positive for counterclockwise.
pub(crate) fn orientation<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> f64 {
    let coord = |p: &Point2<T>| Coord {
        x: p.u.to_f64_lossy(),
        y: p.v.to_f64_lossy(),
    };
    orient2d(coord(a), coord(b), coord(c))
}

/// A strictly convex, counterclockwise polygon with at least three vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Point2<T>>,
}

impl<T: Scalar> ConvexPolygon<T> {
    /// Checks the polygon invariant: at least three finite vertices, every
    /// consecutive triple a strict left turn, and every vertex on or left of
    /// every edge (which rules out polygons winding more than once).
    pub fn from_vertices(vertices: Vec<Point2<T>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "a convex polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polygon vertex".into()));
        }
        for i in 0..n {
            let (a, b, c) = (&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if orientation(a, b, c) <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "vertices {i}..{} are not a strict left turn",
                    i + 2
                )));
            }
            if vertices.iter().any(|p| orientation(a, b, p) < 0.0) {
                return Err(Error::InvalidArgument("polygon is not simple".into()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// True when `p` lies strictly inside (not on the boundary).
    pub fn contains_strictly(&self, p: &Point2<T>) -> bool {
        self.edges().all(|(a, b)| orientation(&a, &b, p) > 0.0)
    }

    pub fn area(&self) -> T {
        let twice = self
            .edges()
            .fold(T::zero(), |acc, (a, b)| acc + (a.u * b.v - b.u * a.v));
        twice * T::of(0.5)
    }
}

/// Minimal convex polygon containing `points`.
///
/// Andrew's monotone chain over the de-duplicated, lexicographically sorted
/// input; collinear boundary points are dropped. The first vertex is the
/// lexicographically smallest and the traversal is counterclockwise. When all
/// points are collinear or coincident the segment (or point) is thickened by
/// [`DEGENERATE_INFLATION`] on each side into a thin rectangle (or square).
pub fn convex_hull<T: Scalar>(points: &[Point2<T>]) -> Result<ConvexPolygon<T>> {
    Ok(close_chain(extreme_points(points)?))
}

/// Hull of `points` together with their mirror image under `symmetry` as
/// seen in `view`. Equal to the hull of the symmetrized cloud's projection,
/// but only the extreme points of the input are mirrored.
pub fn symmetric_hull<T: Scalar>(
    points: &[Point2<T>],
    view: View,
    symmetry: SymmetryMode,
) -> Result<ConvexPolygon<T>> {
    let ext = extreme_points(points)?;
    let flip_v = matches!((view, symmetry), (View::Bird, _) | (_, SymmetryMode::Full3d));
    let mut both = ext.clone();
    both.extend(ext.iter().map(|p| Point2::new(-p.u, if flip_v { -p.v } else { p.v })));
    Ok(close_chain(extreme_points(&both)?))
}

/// Hull vertices in counterclockwise order from the lexicographic minimum,
/// without collinear points. One or two vertices for degenerate input.
fn extreme_points<T: Scalar>(points: &[Point2<T>]) -> Result<Vec<Point2<T>>> {
    if points.is_empty() {
        return Err(Error::NoShape);
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinitePoint { index: i });
    }
    let mut keyed: Vec<(u64, u64, Point2<T>)> = extreme_candidates(points)
        .into_iter()
        .map(|p| (order_key(p.u), order_key(p.v), p))
        .collect();
    keyed.sort_unstable_by_key(|&(ku, kv, _)| (ku, kv));
    let mut sorted: Vec<Point2<T>> = keyed.into_iter().map(|(_, _, p)| p).collect();
    sorted.dedup();
    if sorted.len() == 1 {
        return Ok(sorted);
    }

    let mut hull: Vec<Point2<T>> = Vec::with_capacity(sorted.len() + 1);
    // lower chain
    for p in &sorted {
        while hull.len() >= 2 && orientation(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    // upper chain
    let lower_len = hull.len() + 1;
    for p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orientation(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    Ok(hull)
}

fn close_chain<T: Scalar>(chain: Vec<Point2<T>>) -> ConvexPolygon<T> {
    match chain.len() {
        0 => unreachable!("non-empty input has at least one extreme point"),
        1 => inflate_point(chain[0]),
        2 => inflate_segment(chain[0], chain[1]),
        _ => ConvexPolygon { vertices: chain },
    }
}

/// Maps a finite value to an integer with the same ordering; both zeros map
/// to the same key.
fn order_key<T: Scalar>(x: T) -> u64 {
    let bits = (x.to_f64_lossy() + 0.0).to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | 1 << 63
    }
}

/// Drops points strictly inside the polygon spanned by the extremes in eight
/// directions; none of them can be a hull vertex.
fn extreme_candidates<T: Scalar>(points: &[Point2<T>]) -> Vec<Point2<T>> {
    if points.len() < 32 {
        return points.to_vec();
    }
    // support values in eight counterclockwise directions, starting at +u
    let support = |u: f64, v: f64| [u, u + v, v, v - u, -u, -u - v, -v, u - v];
    let first = points[0];
    let mut best = support(first.u.to_f64_lossy(), first.v.to_f64_lossy());
    let mut arg = [0usize; 8];
    for (i, p) in points.iter().enumerate().skip(1) {
        let s = support(p.u.to_f64_lossy(), p.v.to_f64_lossy());
        for k in 0..8 {
            if s[k] > best[k] {
                best[k] = s[k];
                arg[k] = i;
            }
        }
    }
    let mut ring: Vec<Point2<T>> = arg.iter().map(|&i| points[i]).collect();
    ring.dedup();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return points.to_vec();
    }
    // (origin, direction) of each edge in f64
    let edges: Vec<[f64; 4]> = (0..ring.len())
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            let (au, av) = (a.u.to_f64_lossy(), a.v.to_f64_lossy());
            [au, av, b.u.to_f64_lossy() - au, b.v.to_f64_lossy() - av]
        })
        .collect();
    // a point is dropped only when its cross product clears a bound far above
    // the rounding error, so the filter never discards a boundary point
    let strictly_inside = |p: &Point2<T>| {
        let (u, v) = (p.u.to_f64_lossy(), p.v.to_f64_lossy());
        edges.iter().all(|&[au, av, eu, ev]| {
            let (du, dv) = (u - au, v - av);
            let cross = eu * dv - ev * du;
            cross > INTERIOR_FILTER_SLACK * ((eu * dv).abs() + (ev * du).abs())
        })
    };
    points.iter().filter(|p| !strictly_inside(p)).copied().collect()
}

fn inflate_point<T: Scalar>(p: Point2<T>) -> ConvexPolygon<T> {
    let eps = T::of(DEGENERATE_INFLATION);
    ConvexPolygon {
        vertices: vec![
            Point2::new(p.u - eps, p.v - eps),
            Point2::new(p.u + eps, p.v - eps),
            Point2::new(p.u + eps, p.v + eps),
            Point2::new(p.u - eps, p.v + eps),
        ],
    }
}

fn inflate_segment<T: Scalar>(a: Point2<T>, b: Point2<T>) -> ConvexPolygon<T> {
    let eps = T::of(DEGENERATE_INFLATION);
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let len = du.hypot(dv);
    // left normal of a -> b, scaled to eps
    let (nu, nv) = (-dv / len * eps, du / len * eps);
    ConvexPolygon {
        vertices: vec![
            Point2::new(a.u - nu, a.v - nv),
            Point2::new(b.u - nu, b.v - nv),
            Point2::new(b.u + nu, b.v + nv),
            Point2::new(a.u + nu, a.v + nv),
        ],
    }
}
