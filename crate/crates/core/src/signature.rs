//! From an annotated object to its fixed-length shape signature.
//!
//! The pipeline is: canonicalize, complete by symmetry, then for each view
//! project, take the convex hull, evaluate `f(θ)` exactly at the Chebyshev
//! node angles, fit, and keep the leading coefficients. Objects with too few
//! points are reported as degenerate and resolved from per-class prototypes.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::chebyshev::{cheb_fit_leading, cheb_nodes, domain_to_angle, FitConfig};
use crate::error::{Error, Result};
use crate::geometry::{canonicalize, centro_symmetrize, clip_to_box, Box3D, PointCloud3, SymmetryMode};
use crate::hull::{convex_hull, project, symmetric_hull, ConvexPolygon, View};
use crate::radial::{radial_profile, radial_profile_at, RadialProfile, DEFAULT_ANGLES};
use crate::scalar::Scalar;

pub const DEFAULT_MIN_POINTS: usize = 5;

/// Margin used when clipping to the box is enabled.
pub const CLIP_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignatureConfig {
    pub symmetry: SymmetryMode,
    pub fit: FitConfig,
    /// Size of the diagnostic angle grid; the fit itself uses node angles.
    pub n_angles: usize,
    /// Objects with at most this many points (before symmetry) are degenerate.
    pub min_points: usize,
    pub views: [View; 3],
    /// Drop points outside the box grown by [`CLIP_MARGIN`].
    pub clip_to_box: bool,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        Self {
            symmetry: SymmetryMode::Planar,
            fit: FitConfig::default(),
            n_angles: DEFAULT_ANGLES,
            min_points: DEFAULT_MIN_POINTS,
            views: View::ALL,
            clip_to_box: false,
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        if self.fit.keep == 0 {
            return Err(Error::Config("at least one coefficient per view is required".into()));
        }
        let mut seen = self.views.to_vec();
        seen.sort_by_key(|v| v.prefix());
        seen.dedup();
        if seen.len() != 3 {
            return Err(Error::Config("view order must name each view once".into()));
        }
        Ok(())
    }

    /// Column names for a signature in this configuration: `b0.., s0.., f0..`.
    pub fn column_names(&self) -> Vec<String> {
        self.views
            .iter()
            .flat_map(|v| (0..self.fit.keep).map(move |j| format!("{}{j}", v.prefix())))
            .collect()
    }
}

/// Concatenated per-view leading coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature<T> {
    values: Vec<T>,
    per_view: usize,
}

impl<T: Scalar> Signature<T> {
    pub fn new(values: Vec<T>, per_view: usize) -> Result<Self> {
        if per_view == 0 || values.len() != 3 * per_view {
            return Err(Error::LengthMismatch {
                expected: 3 * per_view,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite signature component".into()));
        }
        Ok(Self { values, per_view })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn per_view(&self) -> usize {
        self.per_view
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The coefficients of view slot `i` (0, 1 or 2 in configured order).
    pub fn view(&self, i: usize) -> &[T] {
        &self.values[i * self.per_view..(i + 1) * self.per_view]
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum::<T>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignatureOutcome<T> {
    Shape(Signature<T>),
    /// Too few points to describe a shape.
    Degenerate { points: usize },
}

impl<T> SignatureOutcome<T> {
    pub fn shape(self) -> Option<Signature<T>> {
        match self {
            SignatureOutcome::Shape(s) => Some(s),
            SignatureOutcome::Degenerate { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, SignatureOutcome::Degenerate { .. })
    }
}

fn canonical_cloud<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    cfg: &SignatureConfig,
) -> Result<PointCloud3<T>> {
    let canonical = canonicalize(cloud, bbox)?;
    if cfg.clip_to_box {
        clip_to_box(&canonical, bbox, T::of(CLIP_MARGIN))
    } else {
        Ok(canonical)
    }
}

fn completed_cloud<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    cfg: &SignatureConfig,
) -> Result<PointCloud3<T>> {
    centro_symmetrize(&canonical_cloud(cloud, bbox, cfg)?, cfg.symmetry)
}

/// Leading coefficients of one hull's angle-radius function.
pub fn hull_coefficients<T: Scalar>(
    hull: &ConvexPolygon<T>,
    nodes: &[T],
    fit: &FitConfig,
) -> Result<Vec<T>> {
    let values: Vec<T> = nodes
        .iter()
        .map(|&x| radial_profile_at(hull, domain_to_angle(x)))
        .collect();
    Ok(cheb_fit_leading(&values, fit.degree, fit.keep)?.coefficients().to_vec())
}

/// Runs the full pipeline on one object.
pub fn compute_signature<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    cfg: &SignatureConfig,
) -> Result<SignatureOutcome<T>> {
    cfg.validate()?;
    if cloud.len() <= cfg.min_points {
        // still validate the frame so bad input is not mistaken for sparsity
        canonicalize(cloud, bbox)?;
        return Ok(SignatureOutcome::Degenerate {
            points: cloud.len(),
        });
    }
    let canonical = canonical_cloud(cloud, bbox, cfg)?;
    if canonical.is_empty() {
        return Ok(SignatureOutcome::Degenerate { points: 0 });
    }
    let nodes = cheb_nodes::<T>(cfg.fit.degree);
    let mut values = Vec::with_capacity(3 * cfg.fit.keep);
    for view in cfg.views {
        // same hull as that of the symmetrized cloud, at half the cost
        let hull = symmetric_hull(&project(&canonical, view)?, view, cfg.symmetry)?;
        values.extend(hull_coefficients(&hull, &nodes, &cfg.fit)?);
    }
    Signature::new(values, cfg.fit.keep).map(SignatureOutcome::Shape)
}

/// Intermediate products for one view, for plotting and inspection.
#[derive(Debug, Clone)]
pub struct ViewDiagnostics<T> {
    pub view: View,
    pub hull: ConvexPolygon<T>,
    /// `f(θ)` on the uniform diagnostic grid.
    pub profile: RadialProfile<T>,
    /// Angles of the Chebyshev nodes and the radii sampled there.
    pub node_angles: Vec<T>,
    pub node_radii: Vec<T>,
}

pub fn view_diagnostics<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    cfg: &SignatureConfig,
) -> Result<Vec<ViewDiagnostics<T>>> {
    cfg.validate()?;
    let completed = completed_cloud(cloud, bbox, cfg)?;
    let nodes = cheb_nodes::<T>(cfg.fit.degree);
    cfg.views
        .iter()
        .map(|&view| {
            let hull = convex_hull(&project(&completed, view)?)?;
            let node_angles: Vec<T> = nodes.iter().map(|&x| domain_to_angle(x)).collect();
            let node_radii = node_angles.iter().map(|&a| radial_profile_at(&hull, a)).collect();
            Ok(ViewDiagnostics {
                view,
                profile: radial_profile(&hull, cfg.n_angles),
                hull,
                node_angles,
                node_radii,
            })
        })
        .collect()
}

/// One annotated object of a dataset.
#[derive(Debug, Clone)]
pub struct LabeledObject<T> {
    pub cloud: PointCloud3<T>,
    pub bbox: Box3D<T>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prototype<T> {
    pub signature: Signature<T>,
    /// Number of non-degenerate samples averaged.
    pub count: usize,
}

/// Per-class mean signatures used for degenerate objects.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeTable<T> {
    config: SignatureConfig,
    classes: BTreeMap<String, Prototype<T>>,
    /// Degenerate samples excluded from each class's average.
    degenerate: BTreeMap<String, usize>,
}

impl<T: Scalar> PrototypeTable<T> {
    pub fn from_parts(
        config: SignatureConfig,
        classes: BTreeMap<String, Prototype<T>>,
        degenerate: BTreeMap<String, usize>,
    ) -> Result<Self> {
        for (label, proto) in &classes {
            if proto.count == 0 {
                return Err(Error::InvalidArgument(format!("prototype `{label}` has zero samples")));
            }
            if proto.signature.per_view() != config.fit.keep {
                return Err(Error::LengthMismatch {
                    expected: 3 * config.fit.keep,
                    found: proto.signature.len(),
                });
            }
        }
        Ok(Self {
            config,
            classes,
            degenerate,
        })
    }

    pub fn config(&self) -> &SignatureConfig {
        &self.config
    }

    pub fn get(&self, label: &str) -> Option<&Prototype<T>> {
        self.classes.get(label)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, &Prototype<T>)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn degenerate_counts(&self) -> &BTreeMap<String, usize> {
        &self.degenerate
    }

    /// Classes that appeared only as degenerate samples.
    pub fn omitted_classes(&self) -> Vec<&str> {
        self.degenerate
            .keys()
            .filter(|k| !self.classes.contains_key(*k))
            .map(String::as_str)
            .collect()
    }
}

/// Averages the non-degenerate signatures of each class.
///
/// Signatures are computed in parallel; the sums are accumulated in dataset
/// order so the result does not depend on the thread count.
pub fn build_prototypes<T: Scalar>(
    dataset: &[LabeledObject<T>],
    cfg: &SignatureConfig,
) -> Result<PrototypeTable<T>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    cfg.validate()?;
    let outcomes: Vec<SignatureOutcome<T>> = dataset
        .par_iter()
        .map(|o| compute_signature(&o.cloud, &o.bbox, cfg))
        .collect::<Result<_>>()?;

    let mut groups: BTreeMap<String, Vec<Signature<T>>> = BTreeMap::new();
    let mut degenerate: BTreeMap<String, usize> = BTreeMap::new();
    for (obj, outcome) in dataset.iter().zip(outcomes) {
        match outcome {
            SignatureOutcome::Shape(sig) => groups.entry(obj.label.clone()).or_default().push(sig),
            SignatureOutcome::Degenerate { .. } => {
                *degenerate.entry(obj.label.clone()).or_default() += 1;
            }
        }
    }
    let mut classes = BTreeMap::new();
    for (label, sigs) in groups {
        let signature = mean_signature(&sigs)?;
        classes.insert(label, Prototype { signature, count: sigs.len() });
    }
    for label in degenerate.keys().filter(|l| !classes.contains_key(*l)) {
        log::warn!("class `{label}` has no non-degenerate samples; no prototype");
    }
    Ok(PrototypeTable {
        config: *cfg,
        classes,
        degenerate,
    })
}

/// Component-wise arithmetic mean, summed in slice order.
pub fn mean_signature<T: Scalar>(signatures: &[Signature<T>]) -> Result<Signature<T>> {
    let first = signatures.first().ok_or(Error::EmptyDataset)?;
    let mut sum = vec![T::zero(); first.len()];
    for sig in signatures {
        if sig.per_view != first.per_view {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                found: sig.len(),
            });
        }
        for (acc, v) in sum.iter_mut().zip(&sig.values) {
            *acc += *v;
        }
    }
    let n = T::of_usize(signatures.len());
    Signature::new(sum.into_iter().map(|s| s / n).collect(), first.per_view)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureSource {
    Computed,
    Prototype,
}

impl SignatureSource {
    pub fn name(&self) -> &'static str {
        match self {
            SignatureSource::Computed => "computed",
            SignatureSource::Prototype => "prototype",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved<T> {
    pub signature: Signature<T>,
    pub source: SignatureSource,
}

/// The object's own signature, or its class prototype when degenerate.
pub fn resolve_signature<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    label: &str,
    prototypes: &PrototypeTable<T>,
    cfg: &SignatureConfig,
) -> Result<Resolved<T>> {
    if prototypes.config != *cfg {
        return Err(Error::PrototypeConfigMismatch);
    }
    match compute_signature(cloud, bbox, cfg)? {
        SignatureOutcome::Shape(signature) => Ok(Resolved {
            signature,
            source: SignatureSource::Computed,
        }),
        SignatureOutcome::Degenerate { .. } => prototypes
            .get(label)
            .map(|p| Resolved {
                signature: p.signature.clone(),
                source: SignatureSource::Prototype,
            })
            .ok_or_else(|| Error::Unresolvable(label.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    fn sensor_box_cloud(n: usize) -> (PointCloud3<f64>, Box3D<f64>) {
        let bbox = Box3D::from_parts(Point3::new(5.0, 2.0, 0.0), 1.9, 4.6, 1.7, 0.3).unwrap();
        let pts = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64 * std::f64::consts::TAU;
                let local = Point3::new(2.3 * t.cos(), 0.95 * (3.0 * t).sin(), 0.85 * (5.0 * t).cos());
                local.rotate_z(0.3).add(&Point3::new(5.0, 2.0, 0.0))
            })
            .collect();
        (PointCloud3::sensor(pts).unwrap(), bbox)
    }

    #[test]
    fn three_points_are_degenerate() {
        let (cloud, bbox) = sensor_box_cloud(3);
        let out = compute_signature(&cloud, &bbox, &SignatureConfig::default()).unwrap();
        assert_eq!(out, SignatureOutcome::Degenerate { points: 3 });
        let (cloud, _) = sensor_box_cloud(5);
        assert!(compute_signature(&cloud, &bbox, &SignatureConfig::default()).unwrap().is_degenerate());
        let (cloud, _) = sensor_box_cloud(6);
        assert!(!compute_signature(&cloud, &bbox, &SignatureConfig::default()).unwrap().is_degenerate());
    }

    #[test]
    fn degenerate_check_still_validates_frame() {
        let cloud = PointCloud3::canonical(vec![Point3::new(0.0, 0.0, 0.0)]).unwrap();
        let (_, bbox) = sensor_box_cloud(1);
        assert!(matches!(
            compute_signature(&cloud, &bbox, &SignatureConfig::default()),
            Err(Error::Frame { .. })
        ));
    }

    #[test]
    fn signature_shape_and_columns() {
        let (cloud, bbox) = sensor_box_cloud(400);
        let cfg = SignatureConfig::default();
        let sig = compute_signature(&cloud, &bbox, &cfg).unwrap().shape().unwrap();
        assert_eq!(sig.len(), 9);
        assert_eq!(sig.per_view(), 3);
        assert_eq!(
            cfg.column_names(),
            ["b0", "b1", "b2", "s0", "s1", "s2", "f0", "f1", "f2"]
        );
        assert!(sig.view(0)[0] > 0.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SignatureConfig::default();
        cfg.fit.keep = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SignatureConfig::default();
        cfg.views = [View::Bird, View::Bird, View::Front];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn signature_invariants() {
        assert!(Signature::new(vec![1.0; 8], 3).is_err());
        assert!(Signature::new(vec![f64::NAN; 9], 3).is_err());
        assert!(Signature::<f64>::new(vec![], 0).is_err());
    }

    fn labeled(n: usize, label: &str) -> LabeledObject<f64> {
        let (cloud, bbox) = sensor_box_cloud(n);
        LabeledObject {
            cloud,
            bbox,
            label: label.into(),
        }
    }

    #[test]
    fn prototypes_of_identical_samples() {
        let cfg = SignatureConfig::default();
        let data = vec![labeled(300, "car"), labeled(300, "car")];
        let table = build_prototypes(&data, &cfg).unwrap();
        let expected = compute_signature(&data[0].cloud, &data[0].bbox, &cfg).unwrap().shape().unwrap();
        let proto = table.get("car").unwrap();
        assert_eq!(proto.signature, expected);
        assert_eq!(proto.count, 2);
    }

    #[test]
    fn all_degenerate_class_is_omitted() {
        let cfg = SignatureConfig::default();
        let data = vec![labeled(300, "car"), labeled(200, "car"), labeled(2, "bike"), labeled(0, "bike")];
        let table = build_prototypes(&data, &cfg).unwrap();
        assert_eq!(table.len(), 1);
        assert!(table.get("bike").is_none());
        assert_eq!(table.omitted_classes(), vec!["bike"]);
        assert_eq!(table.degenerate_counts()["bike"], 2);
    }

    #[test]
    fn prototypes_need_data() {
        assert_eq!(
            build_prototypes::<f64>(&[], &SignatureConfig::default()).unwrap_err(),
            Error::EmptyDataset
        );
    }

    #[test]
    fn opposite_signatures_average_to_zero() {
        let s = Signature::new(vec![1.5, -0.25, 3.0, 2.0, 0.5, -1.0, 0.75, 0.125, 4.0], 3).unwrap();
        let neg = Signature::new(s.values().iter().map(|v| -v).collect(), 3).unwrap();
        let mean = mean_signature(&[s.clone(), neg]).unwrap();
        assert!(mean.values().iter().all(|v| *v == 0.0));
        assert_eq!(mean_signature(&[s.clone(), s.clone()]).unwrap(), s);
        assert!(mean_signature::<f64>(&[]).is_err());
    }

    #[test]
    fn resolve_paths() {
        let cfg = SignatureConfig::default();
        let data = vec![labeled(300, "car")];
        let table = build_prototypes(&data, &cfg).unwrap();

        let empty = labeled(0, "car");
        let r = resolve_signature(&empty.cloud, &empty.bbox, "car", &table, &cfg).unwrap();
        assert_eq!(r.source, SignatureSource::Prototype);
        assert_eq!(r.signature, table.get("car").unwrap().signature);

        let dense = labeled(1000, "car");
        let r = resolve_signature(&dense.cloud, &dense.bbox, "car", &table, &cfg).unwrap();
        assert_eq!(r.source, SignatureSource::Computed);
        let direct = compute_signature(&dense.cloud, &dense.bbox, &cfg).unwrap().shape().unwrap();
        assert_eq!(r.signature, direct);

        let sparse = labeled(2, "emu");
        assert_eq!(
            resolve_signature(&sparse.cloud, &sparse.bbox, "emu", &table, &cfg).unwrap_err(),
            Error::Unresolvable("emu".into())
        );

        let mut other = cfg;
        other.fit.degree = 44;
        assert_eq!(
            resolve_signature(&dense.cloud, &dense.bbox, "car", &table, &other).unwrap_err(),
            Error::PrototypeConfigMismatch
        );
    }

    #[test]
    fn clipping_drops_far_points() {
        let (cloud, bbox) = sensor_box_cloud(300);
        let mut pts = cloud.points().to_vec();
        pts.push(Point3::new(50.0, 50.0, 0.0));
        let noisy = PointCloud3::sensor(pts).unwrap();
        let mut cfg = SignatureConfig::default();
        let base = compute_signature(&cloud, &bbox, &cfg).unwrap();
        assert_ne!(compute_signature(&noisy, &bbox, &cfg).unwrap(), base);
        cfg.clip_to_box = true;
        assert_eq!(compute_signature(&noisy, &bbox, &cfg).unwrap(), compute_signature(&cloud, &bbox, &cfg).unwrap());
    }

    #[test]
    fn diagnostics_agree_with_signature_inputs() {
        let (cloud, bbox) = sensor_box_cloud(300);
        let cfg = SignatureConfig::default();
        let diags = view_diagnostics(&cloud, &bbox, &cfg).unwrap();
        assert_eq!(diags.len(), 3);
        let sig = compute_signature(&cloud, &bbox, &cfg).unwrap().shape().unwrap();
        for (i, d) in diags.iter().enumerate() {
            assert_eq!(d.profile.len(), 360);
            let nodes = cheb_nodes::<f64>(cfg.fit.degree);
            let fit = crate::chebyshev::cheb_fit(&d.node_radii, cfg.fit.degree).unwrap();
            assert_eq!(&fit.coefficients()[..3], sig.view(i));
            assert_eq!(nodes.len(), d.node_angles.len());
        }
    }
}
