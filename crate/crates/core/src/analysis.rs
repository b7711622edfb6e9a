//! Class-separation and robustness measurements over signatures, plus the
//! embedding export consumed by external plotting tools.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::geometry::{Box3D, Point3, PointCloud3};
use crate::hull::View;
use crate::scalar::Scalar;
use crate::signature::{compute_signature, Signature, SignatureConfig, SignatureOutcome};

/// Sensor range separating near from far samples, in meters.
pub const NEAR_FAR_BOUNDARY: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceBucket {
    Near,
    Far,
}

impl DistanceBucket {
    pub fn of<T: Scalar>(distance: T) -> Self {
        if distance < T::of(NEAR_FAR_BOUNDARY) {
            DistanceBucket::Near
        } else {
            DistanceBucket::Far
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceBucket::Near => "near",
            DistanceBucket::Far => "far",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "near" => Some(DistanceBucket::Near),
            "far" => Some(DistanceBucket::Far),
            _ => None,
        }
    }
}

/// Signatures with their class labels and, optionally, sensor distances.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSignatureSet<T> {
    signatures: Vec<Signature<T>>,
    labels: Vec<String>,
    distances: Option<Vec<T>>,
}

impl<T: Scalar> LabeledSignatureSet<T> {
    pub fn new(
        signatures: Vec<Signature<T>>,
        labels: Vec<String>,
        distances: Option<Vec<T>>,
    ) -> Result<Self> {
        if signatures.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: signatures.len(),
                found: labels.len(),
            });
        }
        if let Some(d) = &distances {
            if d.len() != signatures.len() {
                return Err(Error::LengthMismatch {
                    expected: signatures.len(),
                    found: d.len(),
                });
            }
        }
        if let Some(first) = signatures.first() {
            if let Some(bad) = signatures.iter().find(|s| s.per_view() != first.per_view()) {
                return Err(Error::LengthMismatch {
                    expected: first.len(),
                    found: bad.len(),
                });
            }
        }
        Ok(Self {
            signatures,
            labels,
            distances,
        })
    }

    pub fn signatures(&self) -> &[Signature<T>] {
        &self.signatures
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distances(&self) -> Option<&[T]> {
        self.distances.as_deref()
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn class_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for l in &self.labels {
            *counts.entry(l.as_str()).or_default() += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation<T> {
    /// Mean silhouette coefficient in `[-1, 1]`.
    pub score: T,
    /// Every sample coincides with every other; the score is 0 by convention.
    pub degenerate: bool,
}

/// Mean silhouette coefficient under Euclidean distance.
///
/// For sample `i` with mean intra-class distance `a` and smallest mean
/// distance to another class `b`, `s_i = (b - a) / max(a, b)`, and 0 when
/// both are 0.
pub fn silhouette_separation<T: Scalar>(set: &LabeledSignatureSet<T>) -> Result<Separation<T>> {
    let counts = set.class_counts();
    if counts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "separation needs at least two classes, got {}",
            counts.len()
        )));
    }
    if let Some((label, _)) = counts.iter().find(|(_, &n)| n < 2) {
        return Err(Error::InvalidArgument(format!(
            "class `{label}` needs at least two samples"
        )));
    }
    let class_index: BTreeMap<&str, usize> = counts.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let classes: Vec<usize> = set.labels.iter().map(|l| class_index[l.as_str()]).collect();
    let sizes: Vec<T> = counts.values().map(|&n| T::of_usize(n)).collect();
    let n = set.len();

    let per_sample: Vec<(T, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sums = vec![T::zero(); sizes.len()];
            for j in 0..n {
                if i != j {
                    sums[classes[j]] += set.signatures[i].distance(&set.signatures[j]);
                }
            }
            let own = classes[i];
            let a = sums[own] / (sizes[own] - T::one());
            let b = sums
                .iter()
                .zip(&sizes)
                .enumerate()
                .filter(|(c, _)| *c != own)
                .map(|(_, (s, m))| *s / *m)
                .fold(T::infinity(), T::min);
            let denom = a.max(b);
            if denom == T::zero() {
                (T::zero(), true)
            } else {
                ((b - a) / denom, false)
            }
        })
        .collect();
    let degenerate = per_sample.iter().all(|(_, d)| *d);
    if degenerate {
        log::warn!("all signatures coincide; silhouette is 0 by convention");
    }
    let score = per_sample.iter().map(|(s, _)| *s).sum::<T>() / T::of_usize(n);
    Ok(Separation { score, degenerate })
}

/// Perturbation applied to an object's points before recomputing its signature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec<T> {
    gaussian_sigma: T,
    drop_fraction: T,
    seed: u64,
}

impl<T: Scalar> PerturbationSpec<T> {
    pub fn new(gaussian_sigma: T, drop_fraction: T, seed: u64) -> Result<Self> {
        if !(gaussian_sigma >= T::zero() && gaussian_sigma.is_finite()) {
            return Err(Error::Domain {
                what: "gaussian sigma",
                value: gaussian_sigma.to_f64_lossy(),
            });
        }
        if !(drop_fraction >= T::zero() && drop_fraction < T::one()) {
            return Err(Error::Domain {
                what: "drop fraction",
                value: drop_fraction.to_f64_lossy(),
            });
        }
        Ok(Self {
            gaussian_sigma,
            drop_fraction,
            seed,
        })
    }

    pub fn gaussian_sigma(&self) -> T {
        self.gaussian_sigma
    }

    pub fn drop_fraction(&self) -> T {
        self.drop_fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Jitters every coordinate, then drops each point independently.
    /// Trial `t` draws from its own stream so results do not depend on
    /// scheduling.
    pub fn apply(&self, cloud: &PointCloud3<T>, trial: u64) -> Result<PointCloud3<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let sigma = self.gaussian_sigma;
        let drop = self.drop_fraction.to_f64_lossy();
        let mut out = Vec::with_capacity(cloud.len());
        for p in cloud.points() {
            let mut noise = || sigma * T::of(rng.sample::<f64, _>(StandardNormal));
            let q = if sigma > T::zero() {
                Point3::new(p.x + noise(), p.y + noise(), p.z + noise())
            } else {
                *p
            };
            if drop == 0.0 || rng.gen::<f64>() >= drop {
                out.push(q);
            }
        }
        PointCloud3::new(out, cloud.frame())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityStats<T> {
    /// Mean of `‖s' - s‖₂ / ‖s‖₂` over trials.
    pub mean: T,
    /// 99th percentile (linear interpolation between order statistics).
    pub p99: T,
    pub trials: usize,
}

/// Relative signature change under repeated random perturbation.
pub fn perturbation_sensitivity<T: Scalar>(
    cloud: &PointCloud3<T>,
    bbox: &Box3D<T>,
    cfg: &SignatureConfig,
    spec: &PerturbationSpec<T>,
    trials: usize,
) -> Result<SensitivityStats<T>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let base = match compute_signature(cloud, bbox, cfg)? {
        SignatureOutcome::Shape(s) => s,
        SignatureOutcome::Degenerate { points } => return Err(Error::Degenerate { points }),
    };
    let base_norm = base.norm();
    let changes: Vec<T> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let perturbed = spec.apply(cloud, t)?;
            match compute_signature(&perturbed, bbox, cfg)? {
                SignatureOutcome::Shape(s) => Ok(s.distance(&base) / base_norm),
                SignatureOutcome::Degenerate { points } => Err(Error::Degenerate { points }),
            }
        })
        .collect::<Result<_>>()?;
    let mean = changes.iter().copied().sum::<T>() / T::of_usize(trials);
    Ok(SensitivityStats {
        mean,
        p99: percentile(&changes, 0.99),
        trials,
    })
}

/// Percentile with linear interpolation at rank `q (n - 1)`.
pub fn percentile<T: Scalar>(values: &[T], q: f64) -> T {
    if values.is_empty() {
        return T::nan();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let rank = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = T::of(rank - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Error)]
#[error("embedding export failed after {written} rows: {source}")]
pub struct ExportError {
    pub written: usize,
    #[source]
    pub source: io::Error,
}

/// Renders a value with 9 significant digits, `%g` style.
pub fn format_sig9<T: Scalar>(value: T) -> String {
    let v = value.to_f64_lossy();
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Header for `per_view` coefficients per view in the given order.
pub fn embedding_header(views: &[View; 3], per_view: usize) -> String {
    let mut cols = vec!["label".to_string(), "dist_bucket".to_string()];
    for v in views {
        cols.extend((0..per_view).map(|j| format!("{}{j}", v.prefix())));
    }
    cols.join(",")
}

/// Writes one CSV row per sample (label, distance bucket, components) after
/// a header row. Returns the number of data rows.
pub fn export_embedding<T: Scalar, W: Write>(
    set: &LabeledSignatureSet<T>,
    views: &[View; 3],
    sink: &mut W,
) -> std::result::Result<usize, ExportError> {
    let per_view = set.signatures.first().map_or(3, |s| s.per_view());
    let mut written = 0;
    let fail = |written, source| ExportError { written, source };
    writeln!(sink, "{}", embedding_header(views, per_view)).map_err(|e| fail(0, e))?;
    for (i, (sig, label)) in set.signatures.iter().zip(&set.labels).enumerate() {
        let bucket = set
            .distances
            .as_ref()
            .map_or("", |d| DistanceBucket::of(d[i]).name());
        let mut row = format!("{label},{bucket}");
        for v in sig.values() {
            row.push(',');
            row.push_str(&format_sig9(*v));
        }
        writeln!(sink, "{row}").map_err(|e| fail(written, e))?;
        written += 1;
    }
    sink.flush().map_err(|e| fail(written, e))?;
    Ok(written)
}
