//! Gauss hypergeometric ₂F₁(a, b; c; z) for real parameters and z ∈ [0, 1).
//!
//! The Poisson kernel uses the family (a, b, c) = ((λ+1)/2, (λ+2)/2,
//! (2λ+1)/2), for which c − a − b = −1, so the function blows up like
//! (1 − z)^{−1} as z → 1⁻ and the defining series becomes useless there.
//! Evaluation strategy:
//!
//! * z ≤ 0.6 — defining series (geometric convergence).
//! * z > 0.6, c − a − b = −m for integer m ≥ 0 — factor (1−z)^{−m} out by
//!   the Euler transformation, then expand the remaining function around
//!   z = 1 with the logarithmic connection formula (AMS55 15.3.13 /
//!   15.3.14); the expansion variable 1 − z is small so a handful of terms
//!   suffice even at z = 1 − 1e-12.
//! * z > 0.6, c − a − b = +m — AMS55 15.3.14 directly.
//! * z > 0.6, c − a − b nonintegral — the two-series connection formula
//!   (AMS55 15.3.6).

use super::gamma::{digamma, gamma_real, recip_gamma};
use super::Hyp2F1Params;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 2_000;
const INTEGER_TOL: f64 = 1e-9;

/// ₂F₁ at the given parameters; relative error ≤ 1e-10.
pub fn hyp2f1(params: Hyp2F1Params) -> Result<f64> {
    let Hyp2F1Params { a, b, c, z } = params;
    hyp2f1_with_complement(a, b, c, z, 1.0 - z)
}

/// Same, with the complement w = 1 − z supplied by the caller. The kernel
/// evaluation has w available in factored form (a product of positive
/// sums), so passing it through avoids the cancellation that computing
/// `1.0 - z` would incur when z is within a few ulp of 1.
pub(crate) fn hyp2f1_with_complement(a: f64, b: f64, c: f64, z: f64, w: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    // terminating series (a or b a nonpositive integer) is exact at any z
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return direct_series(a, b, c, z);
    }
    if z <= 0.6 {
        return direct_series(a, b, c, z);
    }
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() < INTEGER_TOL {
        if m >= 0.0 {
            near_one_integer(a, b, m as usize, w)
        } else {
            // Euler: F(a,b;c;z) = (1−z)^{c−a−b} F(c−a, c−b; c; z), and the
            // transformed parameters satisfy c − (c−a) − (c−b) = −s = +m
            let g = near_one_integer(c - a, c - b, (-m) as usize, w)?;
            Ok(w.powf(s) * g)
        }
    } else {
        near_one_generic(a, b, c, w)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < INTEGER_TOL
}

/// Defining series Σ (a)_n (b)_n / ((c)_n n!) z^n.
fn direct_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / (c + nf) * z / (nf + 1.0);
        if term == 0.0 {
            break;
        }
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            return Ok(sum);
        }
    }
    if z > 0.9 {
        return Err(Error::numerical(format!(
            "hypergeometric series did not converge at z = {z}"
        )));
    }
    Ok(sum)
}

/// F(a, b; a + b + m; 1 − w) for integer m ≥ 0 via the logarithmic
/// expansion in w (AMS55 15.3.13 for m = 0, 15.3.14 for m ≥ 1).
fn near_one_integer(a: f64, b: f64, m: usize, w: f64) -> Result<f64> {
    let c = a + b + m as f64;
    let ln_w = w.ln();
    let mf = m as f64;
    let gamma_c = gamma_real(c);

    let mut result = 0.0;

    if m >= 1 {
        // finite part: Γ(m)Γ(c)/(Γ(a+m)Γ(b+m)) Σ_{n<m} (a)_n(b)_n/(n!(1−m)_n) w^n
        let pref = gamma_real(mf) * gamma_c * recip_gamma(a + mf) * recip_gamma(b + mf);
        let mut term = 1.0;
        let mut acc = 1.0;
        for n in 1..m {
            let nf = (n - 1) as f64;
            term *= (a + nf) * (b + nf) / ((1.0 - mf + nf) * (nf + 1.0)) * w;
            acc += term;
        }
        result += pref * acc;
    }

    // infinite part:
    // −(−1)^m Γ(c)/(Γ(a)Γ(b)) w^m Σ_n (a+m)_n(b+m)_n/(n!(n+m)!) ×
    //   [ln w − ψ(n+1) − ψ(n+m+1) + ψ(a+m+n) + ψ(b+m+n)] w^n
    let pref = gamma_c * recip_gamma(a) * recip_gamma(b);
    if pref != 0.0 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut coef = 1.0 / gamma_real(mf + 1.0); // (a+m)_0 (b+m)_0 / (0! m!)
        let mut psi_n1 = digamma(1.0);
        let mut psi_nm1 = digamma(mf + 1.0);
        let mut psi_an = digamma(a + mf);
        let mut psi_bn = digamma(b + mf);
        let mut w_pow = w.powi(m as i32);
        let mut acc = 0.0f64;
        let mut scale = 0.0f64;
        for n in 0..MAX_TERMS {
            let nf = n as f64;
            if n > 0 {
                coef *= (a + mf + nf - 1.0) * (b + mf + nf - 1.0) / (nf * (nf + mf));
                psi_n1 += 1.0 / nf;
                psi_nm1 += 1.0 / (nf + mf);
                psi_an += 1.0 / (a + mf + nf - 1.0);
                psi_bn += 1.0 / (b + mf + nf - 1.0);
                w_pow *= w;
            }
            let bracket = ln_w - psi_n1 - psi_nm1 + psi_an + psi_bn;
            let term = coef * w_pow * bracket;
            acc += term;
            scale = scale.max(term.abs());
            if n > 2 && term.abs() < (scale * 1e-17).max(1e-300) {
                break;
            }
        }
        result -= sign * pref * acc;
    }

    if !result.is_finite() {
        return Err(Error::numerical(
            "hypergeometric connection formula produced a non-finite value".to_string(),
        ));
    }
    Ok(result)
}

/// Nonintegral c − a − b: AMS55 15.3.6, two ordinary series in w = 1 − z.
fn near_one_generic(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let s = c - a - b;
    let gamma_c = gamma_real(c);
    let t1 = gamma_c * gamma_real(s) * recip_gamma(c - a) * recip_gamma(c - b)
        * direct_series(a, b, 1.0 - s, w)?;
    let t2 = gamma_c * gamma_real(-s) * recip_gamma(a) * recip_gamma(b)
        * w.powf(s)
        * direct_series(c - a, c - b, 1.0 + s, w)?;
    let result = t1 + t2;
    if !result.is_finite() {
        return Err(Error::numerical(
            "hypergeometric connection formula produced a non-finite value".to_string(),
        ));
    }
    Ok(result)
}
