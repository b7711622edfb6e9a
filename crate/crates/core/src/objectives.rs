//! Loss arithmetic for training a detector with a shape-regression head.
//!
//! All losses are per-element scalars with analytic gradients; batching and
//! averaging belong to the caller.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signature::Signature;

/// Lower bound applied to `p_t` when clamping is requested.
pub const PROBABILITY_FLOOR: f64 = 1e-7;

/// Number of localization residuals: centre `(x, y, z)`, size `(w, h, l)`, yaw.
pub const BOX_RESIDUALS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalParams<T> {
    alpha_t: T,
    gamma: T,
}

impl<T: Scalar> FocalParams<T> {
    pub fn new(alpha_t: T, gamma: T) -> Result<Self> {
        if !(alpha_t > T::zero() && alpha_t <= T::one()) {
            return Err(Error::Domain {
                what: "focal alpha",
                value: alpha_t.to_f64_lossy(),
            });
        }
        if !(gamma >= T::zero() && gamma.is_finite()) {
            return Err(Error::Domain {
                what: "focal gamma",
                value: gamma.to_f64_lossy(),
            });
        }
        Ok(Self { alpha_t, gamma })
    }

    pub fn alpha_t(&self) -> T {
        self.alpha_t
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

impl<T: Scalar> Default for FocalParams<T> {
    fn default() -> Self {
        Self {
            alpha_t: T::of(0.25),
            gamma: T::of(2.0),
        }
    }
}

/// Weights of the classification, localization and shape terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights<T> {
    pub cls: T,
    pub loc: T,
    pub shape: T,
}

impl<T: Scalar> LossWeights<T> {
    pub fn new(cls: T, loc: T, shape: T) -> Result<Self> {
        for (what, v) in [("cls weight", cls), ("loc weight", loc), ("shape weight", shape)] {
            if !(v >= T::zero() && v.is_finite()) {
                return Err(Error::Domain {
                    what,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(Self { cls, loc, shape })
    }
}

impl<T: Scalar> Default for LossWeights<T> {
    fn default() -> Self {
        Self {
            cls: T::one(),
            loc: T::one(),
            shape: T::of(0.5),
        }
    }
}

/// Loss value and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WithGrad<T> {
    pub value: T,
    pub grad: T,
}

/// `-α_t (1 - p_t)^γ ln p_t` and its derivative in `p_t`.
pub fn focal_loss<T: Scalar>(p_t: T, params: &FocalParams<T>) -> Result<WithGrad<T>> {
    if !(p_t > T::zero() && p_t <= T::one()) {
        return Err(Error::Domain {
            what: "p_t",
            value: p_t.to_f64_lossy(),
        });
    }
    let FocalParams { alpha_t, gamma } = *params;
    let q = T::one() - p_t;
    let ln_p = p_t.ln();
    let weight = q.powf(gamma);
    let value = -alpha_t * weight * ln_p;
    // d/dp [(1-p)^γ] ln p vanishes at p = 1 for γ > 0
    let decay_term = if q == T::zero() {
        T::zero()
    } else {
        gamma * q.powf(gamma - T::one()) * ln_p
    };
    let grad = alpha_t * (decay_term - weight / p_t);
    Ok(WithGrad { value, grad })
}

/// [`focal_loss`] with `p_t` raised to [`PROBABILITY_FLOOR`] first.
/// The gradient is that of the clamped evaluation point.
pub fn focal_loss_clamped<T: Scalar>(p_t: T, params: &FocalParams<T>) -> Result<WithGrad<T>> {
    if p_t.is_nan() {
        return Err(Error::Domain {
            what: "p_t",
            value: f64::NAN,
        });
    }
    focal_loss(p_t.max(T::of(PROBABILITY_FLOOR)), params)
}

/// `0.5 x²` for `|x| < 1`, else `|x| - 0.5`.
pub fn smooth_l1<T: Scalar>(x: T) -> WithGrad<T> {
    let half = T::of(0.5);
    if x.abs() < T::one() {
        WithGrad {
            value: half * x * x,
            grad: x,
        }
    } else {
        WithGrad {
            value: x.abs() - half,
            grad: x.signum(),
        }
    }
}

/// Sum of smooth-L1 over the seven box residuals.
pub fn localization_loss<T: Scalar>(residuals: &[T]) -> Result<T> {
    localization_loss_with_grad(residuals).map(|(v, _)| v)
}

/// Value and per-residual gradient of [`localization_loss`].
pub fn localization_loss_with_grad<T: Scalar>(residuals: &[T]) -> Result<(T, [T; BOX_RESIDUALS])> {
    if residuals.len() != BOX_RESIDUALS {
        return Err(Error::LengthMismatch {
            expected: BOX_RESIDUALS,
            found: residuals.len(),
        });
    }
    let mut grad = [T::zero(); BOX_RESIDUALS];
    let mut total = T::zero();
    for (g, &r) in grad.iter_mut().zip(residuals) {
        let s = smooth_l1(r);
        total += s.value;
        *g = s.grad;
    }
    Ok((total, grad))
}

/// How component losses of the shape term are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapeReduction {
    #[default]
    Sum,
    Mean,
}

/// Smooth-L1 between predicted and target signatures, summed over components.
pub fn shape_loss<T: Scalar>(pred: &Signature<T>, target: &Signature<T>) -> Result<T> {
    shape_loss_with_grad(pred.values(), target.values(), ShapeReduction::Sum).map(|(v, _)| v)
}

/// Shape loss over raw slices with an explicit reduction; the gradient is
/// with respect to `pred`.
pub fn shape_loss_with_grad<T: Scalar>(
    pred: &[T],
    target: &[T],
    reduction: ShapeReduction,
) -> Result<(T, Vec<T>)> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: target.len(),
            found: pred.len(),
        });
    }
    let scale = match reduction {
        ShapeReduction::Sum => T::one(),
        ShapeReduction::Mean if pred.is_empty() => T::one(),
        ShapeReduction::Mean => T::of_usize(pred.len()).recip(),
    };
    let mut total = T::zero();
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let s = smooth_l1(p - t);
            total += s.value;
            s.grad * scale
        })
        .collect();
    Ok((total * scale, grad))
}

/// `β₁·cls + β₂·loc + β₃·shape`. Its gradient is the weight vector.
pub fn total_loss<T: Scalar>(cls: T, loc: T, shape: T, weights: &LossWeights<T>) -> T {
    weights.cls * cls + weights.loc * loc + weights.shape * shape
}
