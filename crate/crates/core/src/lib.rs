//! Compact, noise-robust 3D shape signatures for lidar objects.
//!
//! An object's points are moved into its box frame, completed by symmetry,
//! projected to bird, side and front views, and each view's convex hull is
//! summarised by the leading Chebyshev coefficients of its angle-radius
//! function. The resulting `3k`-vector keeps the object's scale and is
//! stable under point sparsity and small noise.
//!
//! Every numeric routine is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision case.
//!
//! ```
//! use shapesig::{compute_signature, Box3D64, Point3, PointCloud64, SignatureConfig};
//!
//! let bbox = Box3D64::from_parts(Point3::new(10.0, 0.0, 0.0), 1.0, 2.0, 1.0, 0.0).unwrap();
//! let pts = (0..50)
//!     .map(|i| {
//!         let t = i as f64 * 0.4;
//!         Point3::new(10.0 + t.cos(), 0.5 * t.sin(), 0.5 * (2.0 * t).cos())
//!     })
//!     .collect();
//! let cloud = PointCloud64::sensor(pts).unwrap();
//! let sig = compute_signature(&cloud, &bbox, &SignatureConfig::default())
//!     .unwrap()
//!     .shape()
//!     .unwrap();
//! assert_eq!(sig.len(), 9);
//! ```

pub mod analysis;
pub mod chebyshev;
pub mod error;
pub mod geometry;
pub mod hull;
pub mod objectives;
pub mod radial;
pub mod scalar;
pub mod signature;
pub mod synth;

pub use analysis::{
    export_embedding, perturbation_sensitivity, silhouette_separation, DistanceBucket,
    LabeledSignatureSet, PerturbationSpec, Separation, SensitivityStats,
};
pub use chebyshev::{cheb_eval, cheb_fit, cheb_nodes, cheb_reconstruct, truncate, ChebyshevFit, FitConfig};
pub use error::{Error, Result};
pub use geometry::{
    canonicalize, centro_symmetrize, Box3D, BoxSize, Frame, Point3, PointCloud3, SymmetryMode,
};
pub use hull::{convex_hull, project, ConvexPolygon, Point2, View};
pub use objectives::{
    focal_loss, localization_loss, shape_loss, smooth_l1, total_loss, FocalParams, LossWeights,
};
pub use radial::{radial_profile, radial_profile_at, RadialProfile};
pub use scalar::Scalar;
pub use signature::{
    build_prototypes, compute_signature, resolve_signature, LabeledObject, PrototypeTable,
    Resolved, Signature, SignatureConfig, SignatureOutcome, SignatureSource,
};

pub type Point3f64 = Point3<f64>;
pub type PointCloud64 = PointCloud3<f64>;
pub type Box3D64 = Box3D<f64>;
pub type ConvexPolygon64 = ConvexPolygon<f64>;
pub type RadialProfile64 = RadialProfile<f64>;
pub type ChebyshevFit64 = ChebyshevFit<f64>;
pub type Signature64 = Signature<f64>;
pub type PrototypeTable64 = PrototypeTable<f64>;
pub type LabeledSignatureSet64 = LabeledSignatureSet<f64>;

pub type PointCloud32 = PointCloud3<f32>;
pub type Box3D32 = Box3D<f32>;
pub type Signature32 = Signature<f32>;
