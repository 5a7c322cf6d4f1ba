//! The heat kernel W_t^λ and Poisson kernel P_t^λ of the Bessel operator
//! Δ_λ = −d²/dx² − (2λ/x) d/dx on (0, ∞), each evaluated by two
//! independent routes, together with their t-derivatives, the regime
//! approximations, and grid verification of the two-sided and domination
//! estimates.
//!
//! Closed forms:
//!
//!   W_t^λ(x,y) = (xy)^{−λ+1/2}/(2t) · e^{−(x²+y²)/4t} · I_{λ−1/2}(xy/2t)
//!
//! refactored for overflow safety as
//!
//!   (xy)^{−λ+1/2}/(2t) · e^{−(x−y)²/4t} · [e^{−xy/2t} I_{λ−1/2}(xy/2t)],
//!
//! and
//!
//!   P_t^λ(x,y) = 2π^{−1/2} Γ(λ+1)/Γ(λ+1/2) · t/(x²+y²+t²)^{λ+1}
//!                · ₂F₁((λ+1)/2, (λ+2)/2; (2λ+1)/2; (2xy/(x²+y²+t²))²).

use crate::error::{Error, Result};
use crate::factors::{phi_heat, phi_poisson};
use crate::grid::GridSpec;
use crate::quad::{integrate, integrate_power_head, QuadOpts, QuadOutcome};
use crate::report::{EstimateReport, EstimateVerdict};
use crate::specfun::{
    bessel_i_scaled, bessel_j, gamma_fn, hyp2f1_with_complement, RealOrder,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The Bessel index λ > −1/2 with its derived order ν = λ − 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaParam {
    lambda: f64,
    nu: f64,
}

impl LambdaParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= -0.5 {
            return Err(Error::domain(format!(
                "bessel index must be finite and > -1/2, got {lambda}"
            )));
        }
        Ok(LambdaParam { lambda, nu: lambda - 0.5 })
    }

    #[inline]
    pub fn lambda(self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn nu(self) -> f64 {
        self.nu
    }

    /// Estimate verification is stated for λ ≥ 0 only.
    pub fn require_nonnegative(self, what: &str) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::domain(format!(
                "{what} requires lambda >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    fn order(self) -> RealOrder {
        RealOrder::new(self.nu).expect("nu = lambda - 1/2 > -1")
    }
}

/// A strictly positive (t, x, y) evaluation point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl KernelPoint {
    pub fn new(t: f64, x: f64, y: f64) -> Result<Self> {
        for (name, v) in [("t", t), ("x", x), ("y", y)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!(
                    "kernel point requires {name} > 0 and finite, got {v}"
                )));
            }
        }
        Ok(KernelPoint { t, x, y })
    }
}

/// Quadrature policy for the subordination and spectral integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinationQuad {
    /// Initial panel-boundary count (log-spaced); at least 32.
    pub nodes: usize,
    /// Truncation of the subordination variable; the Gamma weight e^{−s}
    /// makes e^{−s_max} the captured-mass defect scale.
    pub s_min: f64,
    pub s_max: f64,
    /// Relative a-posteriori error target.
    pub rel_tol: f64,
}

impl Default for SubordinationQuad {
    fn default() -> Self {
        SubordinationQuad {
            nodes: 64,
            s_min: 1e-8,
            s_max: 45.0,
            rel_tol: 1e-9,
        }
    }
}

impl SubordinationQuad {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 32 {
            return Err(Error::input(format!(
                "subordination quadrature needs >= 32 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.s_min > 0.0 && self.s_min < 1.0 && self.s_max > 30.0) {
            return Err(Error::input(
                "subordination truncation must satisfy 0 < s_min < 1 < 30 < s_max".to_string(),
            ));
        }
        Ok(())
    }
}

/// Classical heat kernel e^{−x²/4t}/√(πt) (the normalization used by the
/// domination estimate).
pub fn classical_heat_kernel(t: f64, d: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (PI * t).sqrt()
}

/// Classical Poisson kernel t/(t² + x²) up to its constant.
pub fn classical_poisson_kernel(t: f64, d: f64) -> f64 {
    t / (t * t + d * d)
}

/// W_t^λ(x,y), overflow-safe. Underflows to exact 0 when (x−y)²/4t
/// exceeds the f64 exponent range (≈745); that is documented behaviour,
/// not an error.
pub fn heat_kernel(lp: LambdaParam, pt: KernelPoint) -> Result<f64> {
    let KernelPoint { t, x, y } = pt;
    let nu = lp.nu();
    let z = x * y / (2.0 * t);
    let d = x - y;
    let gauss = (-d * d / (4.0 * t)).exp();
    if z < 1e-290 {
        // z → 0 limit: I_ν(z) e^{−z} ~ (z/2)^ν/Γ(ν+1), and
        // (xy)^{−ν} (xy/4t)^ν = (4t)^{−ν}
        let limit = (4.0 * t).powf(-nu) / (2.0 * t * crate::specfun::gamma_real(nu + 1.0));
        return Ok(limit * (-(x * x + y * y) / (4.0 * t)).exp());
    }
    let scaled_bessel = bessel_i_scaled(lp.order(), z)?;
    Ok((x * y).powf(-nu) / (2.0 * t) * gauss * scaled_bessel)
}

/// Spectral-integral route: ∫₀^∞ e^{−z²t} φ_z(x) φ_z(y) z^{2λ} dz with
/// φ_z(x) = (zx)^{−λ+1/2} J_{λ−1/2}(zx). Restricted to t ≥ 0.01 because
/// smaller t makes the cosine-like tail too oscillatory for panel
/// quadrature.
pub fn heat_kernel_spectral(
    lp: LambdaParam,
    pt: KernelPoint,
    quad: SubordinationQuad,
) -> Result<f64> {
    quad.validate()?;
    let KernelPoint { t, x, y } = pt;
    if t < 0.01 {
        return Err(Error::UnsupportedRange(format!(
            "spectral route requires t >= 0.01, got {t}"
        )));
    }
    let nu = lp.nu();
    let order = lp.order();
    // integrand: (xy)^{−ν} z J_ν(zx) J_ν(zy) — the measure z^{2λ} and the
    // eigenfunction prefactors combine into a single power z^{2λ−2ν} = z
    let pref = (x * y).powf(-nu);
    let f = |z: f64| {
        if z == 0.0 {
            return 0.0;
        }
        let jx = bessel_j(order, z * x).unwrap_or(f64::NAN);
        let jy = bessel_j(order, z * y).unwrap_or(f64::NAN);
        pref * (-z * z * t).exp() * z * jx * jy
    };
    let z_max = (46.0 / t).sqrt();
    // a panel per beat period of J(zx)J(zy)
    let spacing = (2.0 * PI / (x + y)).min(z_max / (quad.nodes as f64));
    let n = ((z_max / spacing).ceil() as usize).clamp(quad.nodes, 20_000);
    let splits: Vec<f64> = (1..n).map(|i| z_max * i as f64 / n as f64).collect();
    let opts = QuadOpts {
        rel_tol: 1e-10,
        abs_tol: 1e-15 / t,
        max_panels: 60_000,
    };
    let out = integrate(f, 0.0, z_max, &splits, &opts);
    if !out.value.is_finite() {
        return Err(Error::numerical(
            "spectral integrand produced a non-finite value".to_string(),
        ));
    }
    Ok(out.value)
}

/// ∂_t W_t^λ by the order-raising identity
/// ∂_t W^λ = [−(2λ+1)/(2t) + (x²+y²)/(4t²)] W^λ − (xy)²/(2t²) · W^{λ+1},
/// which follows from d/dz(z^{−ν}I_ν) = z^{−ν}I_{ν+1}.
pub fn heat_kernel_dt(lp: LambdaParam, pt: KernelPoint) -> Result<f64> {
    let KernelPoint { t, x, y } = pt;
    let w_lambda = heat_kernel(lp, pt)?;
    let lp_up = LambdaParam::new(lp.lambda() + 1.0)?;
    let w_up = heat_kernel(lp_up, pt)?;
    let coeff = -(2.0 * lp.lambda() + 1.0) / (2.0 * t) + (x * x + y * y) / (4.0 * t * t);
    Ok(coeff * w_lambda - (x * y) * (x * y) / (2.0 * t * t) * w_up)
}

/// The two-regime comparison expression for the heat kernel (divided by
/// x^{2λ}y^{2λ} so it approximates the kernel itself):
/// t^{−λ−1/2} e^{−(x²+y²)/4t} when xy ≤ 2t, else
/// (xy)^{−λ} (2t)^{−1/2} e^{−(x−y)²/4t}.
pub fn heat_regime_approx(lp: LambdaParam, pt: KernelPoint) -> Result<f64> {
    lp.require_nonnegative("heat_regime_approx")?;
    let KernelPoint { t, x, y } = pt;
    let lambda = lp.lambda();
    if x * y <= 2.0 * t {
        Ok(t.powf(-lambda - 0.5) * (-(x * x + y * y) / (4.0 * t)).exp())
    } else {
        Ok((x * y).powf(-lambda) / (2.0 * t).sqrt() * (-(x - y) * (x - y) / (4.0 * t)).exp())
    }
}

/// P_t^λ(x,y) through the hypergeometric closed form.
pub fn poisson_kernel_hyp(lp: LambdaParam, pt: KernelPoint) -> Result<f64> {
    let KernelPoint { t, x, y } = pt;
    let lambda = lp.lambda();
    let s = x * x + y * y + t * t;
    // complement of the ₂F₁ argument in factored form: 1 − (2xy/s)² =
    // ((x−y)²+t²)((x+y)²+t²)/s² — no cancellation
    let dm = (x - y) * (x - y) + t * t;
    let dp = (x + y) * (x + y) + t * t;
    let w = dm * dp / (s * s);
    let z = (2.0 * x * y / s) * (2.0 * x * y / s);
    assert!(z < 1.0, "2F1 argument must stay below 1 for t > 0");
    let f = hyp2f1_with_complement(
        0.5 * (lambda + 1.0),
        0.5 * (lambda + 2.0),
        0.5 * (2.0 * lambda + 1.0),
        z,
        w,
    )?;
    let pref = 2.0 / PI.sqrt() * gamma_fn(lambda + 1.0)? / gamma_fn(lambda + 0.5)?;
    Ok(pref * t / s.powf(lambda + 1.0) * f)
}

/// P_t^λ(x,y) through the subordination integral
/// (t/√(4π)) ∫₀^∞ e^{−t²/4u} W_u^λ(x,y) u^{−3/2} du, rewritten by
/// u = t²/(4s) into the Gamma-weighted form
/// π^{−1/2} ∫₀^∞ e^{−s} s^{−1/2} W_{t²/(4s)}^λ(x,y) ds.
pub fn poisson_kernel_subord(
    lp: LambdaParam,
    pt: KernelPoint,
    quad: SubordinationQuad,
) -> Result<f64> {
    quad.validate()?;
    let KernelPoint { t, .. } = pt;
    let g = |s: f64| -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let u = t * t / (4.0 * s);
        let w = heat_kernel(lp, KernelPoint { t: u, ..pt }).unwrap_or(f64::NAN);
        (-s).exp() / s.sqrt() * w
    };

    // log-spaced panel seeds resolve both the s^λ head and the sharp
    // feature at s* = t²/(x−y)² when x and y are far apart
    let splits: Vec<f64> = (0..=quad.nodes)
        .map(|i| quad.s_min * (quad.s_max / quad.s_min).powf(i as f64 / quad.nodes as f64))
        .collect();
    let opts = QuadOpts {
        rel_tol: quad.rel_tol,
        abs_tol: 0.0,
        max_panels: 20_000,
    };
    // head exponent: e^{−s} s^{−1/2} W_{t²/4s} ~ s^λ as s → 0
    let out: QuadOutcome = integrate_power_head(&g, quad.s_max, lp.lambda().min(0.0), &splits, &opts)?;
    let value = out.value / PI.sqrt();

    if !value.is_finite() {
        return Err(Error::numerical(
            "subordination integrand produced a non-finite value".to_string(),
        ));
    }
    // a-posteriori checks: quadrature error and truncated-mass defect
    let rel_err = out.abs_err / PI.sqrt() / value.abs().max(f64::MIN_POSITIVE);
    if rel_err > 1e-8 {
        return Err(Error::numerical(format!(
            "subordination quadrature error {rel_err:.3e} above 1e-8 \
             (value {value:.6e}, panels {})",
            out.panels
        )));
    }
    let tail_density = g(quad.s_max).abs();
    if tail_density * 2.0 > 1e-12 * value.abs() {
        return Err(Error::numerical(format!(
            "subordination truncation at s_max = {} leaves mass fraction above 1e-12",
            quad.s_max
        )));
    }
    Ok(value)
}

/// The two-sided bound functional
/// P_t^λ(x,y) · [(x−y)² + t²] · (x²+y²+t²)^λ / t; bounded above and below
/// by λ-dependent constants.
pub fn poisson_bound_ratio(lp: LambdaParam, pt: KernelPoint) -> Result<f64> {
    lp.require_nonnegative("poisson_bound_ratio")?;
    let KernelPoint { t, x, y } = pt;
    let p = poisson_kernel_hyp(lp, pt)?;
    let dm = (x - y) * (x - y) + t * t;
    let s = x * x + y * y + t * t;
    Ok(p * dm * s.powf(lp.lambda()) / t)
}

/// Grid supremum of LHS/RHS for the pointwise heat-kernel domination
///
///   y^{2λ} W_t^λ(x,y) ≤ c(λ,M) [ (x∧1)^{−2λ} W^Δ_{Mt}(x−y) χ_{y≤M(x∨1)}
///                                 · y^{2λ}/(y+1)^λ
///                               + (x∧1)^{−λ} φ^λ_{c_M t}(y) ],
///
/// with the time dilations C_M = M and c_M = (M/(M−1))³ read off the
/// splitting that proves the estimate. The report carries the supremum at
/// unit constant and its drift under one 2× grid refinement.
pub fn heat_domination_check(lp: LambdaParam, m: f64, grid: &GridSpec) -> Result<EstimateReport> {
    lp.require_nonnegative("heat_domination_check")?;
    if m <= 1.0 {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    let lambda = lp.lambda();
    let c_big = m;
    let c_small = (m / (m - 1.0)).powi(3);
    let ratio_at = move |t: f64, x: f64, y: f64| -> Result<f64> {
        let lhs = y.powf(2.0 * lambda) * heat_kernel(lp, KernelPoint { t, x, y })?;
        if lhs == 0.0 {
            return Ok(0.0);
        }
        let local = if y <= m * x.max(1.0) {
            x.min(1.0).powf(-2.0 * lambda)
                * classical_heat_kernel(c_big * t, x - y)
                * y.powf(2.0 * lambda)
                / (y + 1.0).powf(lambda)
        } else {
            0.0
        };
        let global = x.min(1.0).powf(-lambda) * phi_heat(lambda, c_small * t, y);
        Ok(lhs / (local + global))
    };
    sweep_ratio(grid, ratio_at)
}

/// Same driver for the Poisson domination
///
///   y^{2λ} P_t^λ(x,y) ≤ c [ (x∧1)^{−2λ} P^Δ_t(x−y) (y∧1)^{2λ} χ_{y≤M(x∨1)}
///                           + t φ^λ(y) ].
pub fn poisson_domination_check(
    lp: LambdaParam,
    m: f64,
    grid: &GridSpec,
) -> Result<EstimateReport> {
    lp.require_nonnegative("poisson_domination_check")?;
    if m <= 1.0 {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    let lambda = lp.lambda();
    let ratio_at = move |t: f64, x: f64, y: f64| -> Result<f64> {
        let lhs = y.powf(2.0 * lambda) * poisson_kernel_hyp(lp, KernelPoint { t, x, y })?;
        if lhs == 0.0 {
            return Ok(0.0);
        }
        let local = if y <= m * x.max(1.0) {
            x.min(1.0).powf(-2.0 * lambda)
                * classical_poisson_kernel(t, x - y)
                * y.min(1.0).powf(2.0 * lambda)
        } else {
            0.0
        };
        let global = t * phi_poisson(lambda, y);
        Ok(lhs / (local + global))
    };
    sweep_ratio(grid, ratio_at)
}

/// Evaluate a pointwise ratio over a grid and its 2× refinement; bounded
/// verdict requires a finite supremum that is stable (≤ 5%) under the
/// refinement.
fn sweep_ratio<F>(grid: &GridSpec, ratio_at: F) -> Result<EstimateReport>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync,
{
    let coarse = sweep_extremes(grid, &ratio_at)?;
    let refined_grid = grid.refined();
    let refined = sweep_extremes(&refined_grid, &ratio_at)?;
    let drift = (refined.1 - coarse.1).abs() / coarse.1.abs().max(f64::MIN_POSITIVE);
    let bounded = coarse.1.is_finite() && refined.1.is_finite() && drift <= 0.05;
    Ok(EstimateReport {
        grid: grid.describe(),
        min_ratio: coarse.0,
        max_ratio: coarse.1,
        verdict: if bounded {
            EstimateVerdict::Bounded
        } else {
            EstimateVerdict::Violated
        },
        witness_min: coarse.2,
        witness_max: coarse.3,
        refined: Some((refined.0, refined.1)),
        refinement_drift: Some(drift),
    })
}

type Extremes = (f64, f64, (f64, f64, f64), (f64, f64, f64));

fn sweep_extremes<F>(grid: &GridSpec, ratio_at: &F) -> Result<Extremes>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync,
{
    let pts = grid.points();
    let values: Vec<(f64, (f64, f64, f64))> = pts
        .par_iter()
        .map(|&(t, x, y)| ratio_at(t, x, y).map(|r| (r, (t, x, y))))
        .collect::<Result<_>>()?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut wmin = (0.0, 0.0, 0.0);
    let mut wmax = (0.0, 0.0, 0.0);
    for &(r, p) in &values {
        if r < min {
            min = r;
            wmin = p;
        }
        if r > max {
            max = r;
            wmax = p;
        }
    }
    Ok((min, max, wmin, wmax))
}

/// Two-sided ratio sweep used for the Poisson bound: returns the observed
/// band of `poisson_bound_ratio` with its refinement drift.
pub fn poisson_bound_band(lp: LambdaParam, grid: &GridSpec) -> Result<EstimateReport> {
    lp.require_nonnegative("poisson_bound_band")?;
    let ratio_at =
        move |t: f64, x: f64, y: f64| poisson_bound_ratio(lp, KernelPoint { t, x, y });
    let coarse = sweep_extremes(grid, &ratio_at)?;
    let refined_grid = grid.refined();
    let refined = sweep_extremes(&refined_grid, &ratio_at)?;
    let drift_max = (refined.1 - coarse.1).abs() / coarse.1.abs().max(f64::MIN_POSITIVE);
    let drift_min = (refined.0 - coarse.0).abs() / coarse.0.abs().max(f64::MIN_POSITIVE);
    let bounded = coarse.0 > 0.0
        && coarse.1.is_finite()
        && drift_max <= 0.05
        && drift_min <= 0.05;
    Ok(EstimateReport {
        grid: grid.describe(),
        min_ratio: coarse.0,
        max_ratio: coarse.1,
        verdict: if bounded {
            EstimateVerdict::Bounded
        } else {
            EstimateVerdict::Violated
        },
        witness_min: coarse.2,
        witness_max: coarse.3,
        refined: Some((refined.0, refined.1)),
        refinement_drift: Some(drift_max.max(drift_min)),
    })
}

/// Relative residual of the eigenfunction identity Δ_λ φ = z² φ for
/// φ(x) = (zx)^{−λ+1/2} J_{λ−1/2}(zx), by 5-point central differences.
/// The default step 1e-4·max(x, 1/z) balances the h⁴ truncation of the
/// stencil against roundoff amplified by h⁻².
pub fn eigenfunction_residual(
    lp: LambdaParam,
    z: f64,
    x: f64,
    h: Option<f64>,
) -> Result<f64> {
    if z <= 0.0 || x <= 0.0 || !z.is_finite() || !x.is_finite() {
        return Err(Error::domain("eigenfunction residual needs z, x > 0".to_string()));
    }
    let nu = lp.nu();
    let order = lp.order();
    let phi = |w: f64| -> Result<f64> {
        Ok((z * w).powf(-nu) * bessel_j(order, z * w)?)
    };
    let h = match h {
        Some(h) if h > 0.0 && 2.0 * h < x => h,
        Some(h) => {
            return Err(Error::input(format!(
                "step must satisfy 0 < 2h < x, got h = {h}"
            )))
        }
        None => (1e-4 * x.max(1.0 / z)).min(0.2 * x),
    };
    let f_m2 = phi(x - 2.0 * h)?;
    let f_m1 = phi(x - h)?;
    let f_0 = phi(x)?;
    let f_p1 = phi(x + h)?;
    let f_p2 = phi(x + 2.0 * h)?;
    let d1 = (-f_p2 + 8.0 * f_p1 - 8.0 * f_m1 + f_m2) / (12.0 * h);
    let d2 = (-f_p2 + 16.0 * f_p1 - 30.0 * f_0 + 16.0 * f_m1 - f_m2) / (12.0 * h * h);
    let applied = -d2 - 2.0 * lp.lambda() / x * d1;
    Ok((applied - z * z * f_0).abs() / (z * z * f_0.abs() + 1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOOSE: f64 = 1e-7;

    fn lp(lambda: f64) -> LambdaParam {
        LambdaParam::new(lambda).unwrap()
    }

    fn pt(t: f64, x: f64, y: f64) -> KernelPoint {
        KernelPoint::new(t, x, y).unwrap()
    }

    /// λ = 0 reflection (Neumann) closed form.
    fn heat0(t: f64, x: f64, y: f64) -> f64 {
        ((-(x - y) * (x - y) / (4.0 * t)).exp() + (-(x + y) * (x + y) / (4.0 * t)).exp())
            / (2.0 * (PI * t).sqrt())
    }

    /// λ = 1 closed form.
    fn heat1(t: f64, x: f64, y: f64) -> f64 {
        ((-(x - y) * (x - y) / (4.0 * t)).exp() - (-(x + y) * (x + y) / (4.0 * t)).exp())
            / (2.0 * x * y * (PI * t).sqrt())
    }

    /// λ = 0 Poisson closed form.
    fn poisson0(t: f64, x: f64, y: f64) -> f64 {
        t / PI * (1.0 / ((x - y) * (x - y) + t * t) + 1.0 / ((x + y) * (x + y) + t * t))
    }

    /// λ = 1 Poisson closed form.
    fn poisson1(t: f64, x: f64, y: f64) -> f64 {
        4.0 * t / PI / (((x - y) * (x - y) + t * t) * ((x + y) * (x + y) + t * t))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn heat_matches_reflection_kernels() {
        let w = heat_kernel(lp(0.0), pt(0.25, 1.0, 1.0)).unwrap();
        assert!(rel(w, heat0(0.25, 1.0, 1.0)) < 1e-12);
        assert!((w - 0.574_523_9).abs() < LOOSE);

        let w = heat_kernel(lp(1.0), pt(0.25, 1.0, 1.0)).unwrap();
        assert!(rel(w, heat1(0.25, 1.0, 1.0)) < 1e-12);
        assert!((w - 0.553_856_2).abs() < LOOSE);
    }

    #[test]
    fn heat_symmetry_is_exact() {
        let a = heat_kernel(lp(2.3), pt(0.37, 1.9, 0.23)).unwrap();
        let b = heat_kernel(lp(2.3), pt(0.37, 0.23, 1.9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heat_underflow_is_zero_not_error() {
        let w = heat_kernel(lp(0.5), pt(1e-3, 0.05, 20.0)).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn spectral_route_agrees() {
        let q = SubordinationQuad::default();
        for &(lambda, t, x, y) in &[
            (0.0, 0.25, 1.0, 1.0),
            (0.5, 1.0, 0.5, 2.0),
            (1.0, 0.5, 1.0, 1.0),
        ] {
            let direct = heat_kernel(lp(lambda), pt(t, x, y)).unwrap();
            let spectral = heat_kernel_spectral(lp(lambda), pt(t, x, y), q).unwrap();
            assert!(
                rel(spectral, direct) <= 1e-6,
                "lambda={lambda} t={t} x={x} y={y}: {spectral} vs {direct}"
            );
        }
    }

    #[test]
    fn spectral_floor_enforced() {
        let q = SubordinationQuad::default();
        assert!(matches!(
            heat_kernel_spectral(lp(0.0), pt(0.005, 1.0, 1.0), q),
            Err(Error::UnsupportedRange(_))
        ));
    }

    #[test]
    fn dt_matches_finite_difference() {
        for &(lambda, t, x, y) in &[
            (0.0, 0.25, 1.0, 1.0),
            (1.0, 0.5, 1.0, 2.0),
            (2.3, 1.0, 0.3, 0.8),
        ] {
            let dt = heat_kernel_dt(lp(lambda), pt(t, x, y)).unwrap();
            let h = t * 1e-4;
            let up = heat_kernel(lp(lambda), pt(t + h, x, y)).unwrap();
            let dn = heat_kernel(lp(lambda), pt(t - h, x, y)).unwrap();
            let fd = (up - dn) / (2.0 * h);
            assert!(
                rel(dt, fd) <= 1e-6,
                "lambda={lambda} t={t}: analytic {dt} vs fd {fd}"
            );
        }
    }

    #[test]
    fn dt_analytic_oracle_at_lambda_zero() {
        // differentiate the reflection kernel analytically
        let (t, x, y) = (0.25, 1.0, 1.0);
        let dm = (x - y) * (x - y);
        let dp = (x + y) * (x + y);
        let term = |d2: f64| {
            (-d2 / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt())
                * (d2 / (4.0 * t * t) - 1.0 / (2.0 * t))
        };
        let oracle = term(dm) + term(dp);
        let got = heat_kernel_dt(lp(0.0), pt(t, x, y)).unwrap();
        assert!(rel(got, oracle) <= 1e-11, "{got} vs {oracle}");
    }

    #[test]
    fn regime_ratio_bands_lambda_zero() {
        // xy ≤ 2t regime: ratio = cosh(xy/2t)/√π ∈ [1/√π, cosh(1)/√π]
        let r = heat_kernel(lp(0.0), pt(0.5, 0.01, 0.1)).unwrap()
            / heat_regime_approx(lp(0.0), pt(0.5, 0.01, 0.1)).unwrap();
        assert!(r > 0.56 && r < 0.88, "small-regime ratio {r}");
        // xy > 2t regime: ratio = (1 + e^{−xy/t})/√(2π) ≈ 0.3989
        let r = heat_kernel(lp(0.0), pt(0.01, 1.0, 1.0)).unwrap()
            / heat_regime_approx(lp(0.0), pt(0.01, 1.0, 1.0)).unwrap();
        assert!(r > 0.39 && r < 0.41, "large-regime ratio {r}");
    }

    #[test]
    fn regime_band_finite_for_lambda_one() {
        let grid = GridSpec {
            t: crate::grid::GridAxis::log(0.05, 5.0, 6).unwrap(),
            x: crate::grid::GridAxis::log(0.05, 10.0, 10).unwrap(),
            y: crate::grid::GridAxis::log(0.05, 10.0, 10).unwrap(),
        };
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for (t, x, y) in grid.points() {
            let w = heat_kernel(lp(1.0), pt(t, x, y)).unwrap();
            if w == 0.0 {
                continue;
            }
            let r = w / heat_regime_approx(lp(1.0), pt(t, x, y)).unwrap();
            min = min.min(r);
            max = max.max(r);
        }
        assert!(min > 0.0 && max.is_finite(), "band [{min}, {max}]");
    }

    #[test]
    fn poisson_hyp_matches_closed_forms() {
        let p = poisson_kernel_hyp(lp(0.0), pt(1.0, 1.0, 1.0)).unwrap();
        assert!(rel(p, poisson0(1.0, 1.0, 1.0)) < 1e-12);
        assert!((p - 0.381_971_9).abs() < LOOSE);

        let p = poisson_kernel_hyp(lp(1.0), pt(1.0, 1.0, 1.0)).unwrap();
        assert!(rel(p, poisson1(1.0, 1.0, 1.0)) < 1e-12);
        assert!((p - 0.254_647_9).abs() < LOOSE);
    }

    #[test]
    fn poisson_symmetry_is_exact() {
        let a = poisson_kernel_hyp(lp(1.7), pt(0.3, 2.0, 0.7)).unwrap();
        let b = poisson_kernel_hyp(lp(1.7), pt(0.3, 0.7, 2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subordination_agrees_with_hyp() {
        let q = SubordinationQuad::default();
        for &(lambda, t, x, y) in &[
            (0.0, 1.0, 1.0, 1.0),
            (1.0, 1.0, 1.0, 1.0),
            (2.3, 0.3, 2.0, 0.7),
            (0.5, 0.05, 0.5, 18.0),
            (5.0, 3.0, 0.1, 0.1),
        ] {
            let a = poisson_kernel_subord(lp(lambda), pt(t, x, y), q).unwrap();
            let b = poisson_kernel_hyp(lp(lambda), pt(t, x, y)).unwrap();
            assert!(
                rel(a, b) <= 1e-6,
                "lambda={lambda} t={t} x={x} y={y}: subord {a} vs hyp {b}"
            );
        }
    }

    #[test]
    fn bound_ratio_lambda_zero_band() {
        // algebra on the closed form: ratio = (1/π)(1 + ((x−y)²+t²)/((x+y)²+t²))
        for &(t, x, y) in &[(1.0, 1.0, 1.0), (0.2, 0.1, 3.0), (5.0, 2.0, 0.3)] {
            let r = poisson_bound_ratio(lp(0.0), pt(t, x, y)).unwrap();
            assert!(r > 1.0 / PI - 1e-12 && r < 2.0 / PI + 1e-12, "ratio {r}");
            let dm = (x - y) * (x - y) + t * t;
            let dp = (x + y) * (x + y) + t * t;
            assert!(rel(r, (1.0 + dm / dp) / PI) < 1e-11);
        }
        let r = poisson_bound_ratio(lp(0.0), pt(1.0, 1.0, 1.0)).unwrap();
        assert!((r - 0.381_971_9).abs() < LOOSE); // (1/π)(1 + 1/5) at this point
    }

    #[test]
    fn domination_checks_bounded() {
        let grid = GridSpec {
            t: crate::grid::GridAxis::log(0.05, 1.0, 4).unwrap(),
            x: crate::grid::GridAxis::log(0.05, 10.0, 8).unwrap(),
            y: crate::grid::GridAxis::log(0.05, 10.0, 8).unwrap(),
        };
        for &lambda in &[0.0, 1.0] {
            let heat = heat_domination_check(lp(lambda), 2.0, &grid).unwrap();
            assert!(heat.is_bounded(), "heat lambda={lambda}: {heat:?}");
            let poisson = poisson_domination_check(lp(lambda), 2.0, &grid).unwrap();
            assert!(poisson.is_bounded(), "poisson lambda={lambda}: {poisson:?}");
        }
    }

    #[test]
    fn poisson_domination_small_constant_at_lambda_zero() {
        // closed forms on both sides keep the ratio at most 2 here
        let grid = GridSpec {
            t: crate::grid::GridAxis::log(0.1, 1.0, 5).unwrap(),
            x: crate::grid::GridAxis::log(0.05, 10.0, 9).unwrap(),
            y: crate::grid::GridAxis::log(0.05, 10.0, 9).unwrap(),
        };
        let rep = poisson_domination_check(lp(0.0), 2.0, &grid).unwrap();
        assert!(rep.max_ratio <= 2.0, "sup {}", rep.max_ratio);
    }

    #[test]
    fn domination_boundary_has_no_blowup() {
        // one-sided limits at y = M(x∨1): RHS jumps, ratio stays finite
        let lambda = lp(1.0);
        for &eps in &[-1e-9, 1e-9] {
            let y = 2.0 * (1.5f64).max(1.0) + eps;
            let r = {
                let lhs = y.powf(2.0) * poisson_kernel_hyp(lambda, pt(0.5, 1.5, y)).unwrap();
                let local = if y <= 2.0 * 1.5 {
                    classical_poisson_kernel(0.5, 1.5 - y) * 1.0
                } else {
                    0.0
                };
                let global = 0.5 * phi_poisson(1.0, y);
                lhs / (local + global)
            };
            assert!(r.is_finite() && r > 0.0);
        }
    }

    #[test]
    fn eigenfunction_residual_small() {
        // λ = 0: φ ∝ cos(zx) satisfies −φ'' = z²φ exactly
        assert!(eigenfunction_residual(lp(0.0), 1.0, 1.0, None).unwrap() <= 1e-5);
        assert!(eigenfunction_residual(lp(1.0), 2.0, 0.5, None).unwrap() <= 1e-5);
        // λ = 1/2: φ ∝ sin(zx)/(zx)
        assert!(eigenfunction_residual(lp(0.5), 1.0, 3.0, None).unwrap() <= 1e-5);
    }

    #[test]
    fn lambda_domain_gate() {
        assert!(LambdaParam::new(-0.6).is_err());
        assert!(LambdaParam::new(-0.5).is_err());
        assert!(LambdaParam::new(-0.49).is_ok());
        assert!(lp(-0.3).require_nonnegative("x").is_err());
    }
}
