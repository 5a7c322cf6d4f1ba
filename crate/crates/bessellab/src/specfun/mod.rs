//! Special functions needed by the half-line heat and Poisson kernels:
//! Γ, the modified Bessel function I_ν (plain and exponentially scaled),
//! the Bessel function J_ν, and the Gauss hypergeometric ₂F₁ restricted
//! to real parameters and argument in [0, 1).
//!
//! All routines are pure, reentrant and allocation-free. Accuracy targets
//! (relative unless noted): Γ ≤ 1e-13 on (0, 170], I_ν ≤ 1e-11 for z ≤ 700
//! and ν of moderate size, J_ν ≤ 1e-11 absolute for z ≤ 100, ₂F₁ ≤ 1e-10.

mod bessel_i;
mod bessel_j;
mod gamma;
mod hyp2f1;

pub use bessel_i::{bessel_i, bessel_i_scaled};
pub use bessel_j::bessel_j;
pub use gamma::{digamma, gamma_fn, ln_gamma};
pub use hyp2f1::hyp2f1;

pub(crate) use gamma::gamma_real;
pub(crate) use hyp2f1::hyp2f1_with_complement;

use crate::error::{Error, Result};

/// Real order of a Bessel function; the kernels use ν = λ − 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealOrder(f64);

impl RealOrder {
    /// Orders are restricted to ν > −1, where I_ν and J_ν are real and
    /// the z → 0 behaviour is z^ν.
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= -1.0 {
            return Err(Error::domain(format!(
                "bessel order must be finite and > -1, got {nu}"
            )));
        }
        Ok(RealOrder(nu))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Parameters of a real Gauss hypergeometric evaluation with z ∈ [0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
            return Err(Error::domain("hypergeometric parameters must be finite"));
        }
        if c <= 0.0 && (c - c.round()).abs() < 1e-12 {
            return Err(Error::domain(format!(
                "hypergeometric c must not be a nonpositive integer, got {c}"
            )));
        }
        if !(0.0..1.0).contains(&z) {
            return Err(Error::domain(format!(
                "hypergeometric argument must lie in [0, 1), got {z}"
            )));
        }
        Ok(Hyp2F1Params { a, b, c, z })
    }

    /// The parameter triple appearing in the Poisson kernel:
    /// (a, b, c) = ((λ+1)/2, (λ+2)/2, (2λ+1)/2), so that c − a − b = −1.
    pub fn poisson_family(lambda: f64, z: f64) -> Result<Self> {
        Hyp2F1Params::new(
            0.5 * (lambda + 1.0),
            0.5 * (lambda + 2.0),
            0.5 * (2.0 * lambda + 1.0),
            z,
        )
    }
}
