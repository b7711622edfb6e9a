//! First-kind Chebyshev polynomials and the discrete Chebyshev–Gauss fit.
//!
//! A function sampled at the `N + 1` nodes `x_n = cos(π(n + ½)/(N + 1))` has
//! coefficients
//!
//! ```text
//! α_0 = 1/(N+1) Σ_n f(x_n) T_0(x_n)
//! α_j = 2/(N+1) Σ_n f(x_n) T_j(x_n),   j = 1..N
//! ```
//!
//! and `Σ_j α_j T_j` interpolates `f` at the nodes. Angles in `[0, 2π)` map to
//! the fit domain by `x = (θ - π)/π`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Inputs this far outside `[-1, 1]` are accepted as rounding noise.
const DOMAIN_SLACK: f64 = 1e-12;

pub const DEFAULT_DEGREE: usize = 179;
pub const DEFAULT_KEEP: usize = 3;

/// Fit degree and the number of leading coefficients kept per view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FitConfig {
    pub degree: usize,
    pub keep: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            keep: DEFAULT_KEEP,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.keep > self.degree + 1 {
            return Err(Error::Config(format!(
                "cannot keep {} coefficients from a degree-{} fit",
                self.keep, self.degree
            )));
        }
        Ok(())
    }
}

/// Coefficients `α_0..α_N` of a Chebyshev expansion on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFit<T> {
    coefficients: Vec<T>,
}

impl<T: Scalar> ChebyshevFit<T> {
    pub fn from_coefficients(coefficients: Vec<T>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("a fit needs at least one coefficient".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// Affine map from an angle in `[0, 2π)` to the fit domain.
pub fn angle_to_domain<T: Scalar>(theta: T) -> T {
    (theta - T::PI()) / T::PI()
}

/// Inverse of [`angle_to_domain`].
pub fn domain_to_angle<T: Scalar>(x: T) -> T {
    T::PI() * (x + T::one())
}

/// `T_n(x)` by the three-term recurrence.
pub fn cheb_eval<T: Scalar>(n: i64, x: T) -> Result<T> {
    if n < 0 {
        return Err(Error::Domain {
            what: "chebyshev index",
            value: n as f64,
        });
    }
    if !(x.abs() <= T::one() + T::of(DOMAIN_SLACK)) {
        return Err(Error::Domain {
            what: "chebyshev abscissa",
            value: x.to_f64_lossy(),
        });
    }
    let (mut prev, mut cur) = (T::one(), x);
    if n == 0 {
        return Ok(prev);
    }
    let two_x = x + x;
    for _ in 1..n {
        let next = two_x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The `degree + 1` Chebyshev–Gauss nodes, in decreasing order.
pub fn cheb_nodes<T: Scalar>(degree: usize) -> Vec<T> {
    let m = T::of_usize(degree + 1);
    (0..=degree)
        .map(|n| (T::PI() * (T::of_usize(n) + T::of(0.5)) / m).cos())
        .collect()
}

/// Discrete fit of `values`, which must be `f` sampled at `cheb_nodes(degree)`.
pub fn cheb_fit<T: Scalar>(values: &[T], degree: usize) -> Result<ChebyshevFit<T>> {
    cheb_fit_leading(values, degree, degree + 1)
}

/// Like [`cheb_fit`] but only computes the first `count` coefficients.
/// The values are identical to the corresponding prefix of the full fit.
pub fn cheb_fit_leading<T: Scalar>(
    values: &[T],
    degree: usize,
    count: usize,
) -> Result<ChebyshevFit<T>> {
    if values.len() != degree + 1 {
        return Err(Error::LengthMismatch {
            expected: degree + 1,
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    let count = count.min(degree + 1);
    if count == 0 {
        return Err(Error::InvalidArgument("at least one coefficient is required".into()));
    }
    let nodes = cheb_nodes::<T>(degree);
    let mut sums = vec![T::zero(); count];
    for (&f, &x) in values.iter().zip(&nodes) {
        let two_x = x + x;
        let (mut prev, mut cur) = (T::one(), x);
        sums[0] += f;
        for (j, sum) in sums.iter_mut().enumerate().skip(1) {
            if j > 1 {
                let next = two_x * cur - prev;
                prev = cur;
                cur = next;
            }
            *sum += f * cur;
        }
    }
    let m = T::of_usize(degree + 1);
    let coefficients = sums
        .into_iter()
        .enumerate()
        .map(|(j, s)| if j == 0 { s / m } else { (s + s) / m })
        .collect();
    Ok(ChebyshevFit { coefficients })
}

/// `Σ α_n T_n(x)` by Clenshaw's recurrence.
pub fn cheb_reconstruct<T: Scalar>(fit: &ChebyshevFit<T>, x: T) -> T {
    let two_x = x + x;
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for &a in fit.coefficients.iter().skip(1).rev() {
        let b0 = a + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    fit.coefficients[0] + x * b1 - b2
}

/// The first `k` coefficients `α_0..α_{k-1}`, in index order.
pub fn truncate<T: Scalar>(fit: &ChebyshevFit<T>, k: usize) -> Result<Vec<T>> {
    if k > fit.coefficients.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot keep {k} of {} coefficients",
            fit.coefficients.len()
        )));
    }
    Ok(fit.coefficients[..k].to_vec())
}
