//! Numerical toolkit for the Bessel operator Δ_λ = −d²/dx² − (2λ/x) d/dx
//! on the half-line: heat and Poisson kernels by independent routes,
//! semigroup integrals of initial data with admissibility diagnostics,
//! the weight classes characterizing almost-everywhere convergence to
//! initial data, and local maximal operators with desk-scale boundedness
//! probes.
//!
//! Everything is pure f64 computation; grid sweeps parallelize with
//! rayon and reduce order-independently, so results are deterministic
//! for fixed inputs.

mod dd;

pub mod data;
pub mod error;
pub mod factors;
pub mod grid;
pub mod kernels;
pub mod maximal;
pub mod quad;
pub mod report;
pub mod semigroup;
pub mod specfun;
pub mod weights;

pub use error::{Error, Result};
