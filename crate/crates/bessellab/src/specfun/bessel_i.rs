//! Modified Bessel function of the first kind, I_ν, for real order ν > −1
//! and z ≥ 0, plus the exponentially scaled variant e^{−z} I_ν(z).
//!
//! Two branches: the ascending power series (all terms positive, so no
//! cancellation) below the switch point, and the Hankel large-argument
//! expansion (AMS55 9.7.1) above it. The switch point max(35, ν²) is high
//! enough that the asymptotic remainder — of order √(2πz)·e^{−2z} at
//! optimal truncation — is far below 1e-13, so no subdominant e^{−z} term
//! is needed; both branches agree to better than 1e-11 in the overlap
//! band (tested).

use super::gamma::gamma_real;
use super::RealOrder;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const MAX_SERIES_TERMS: usize = 2_000;
const MAX_ASYMPTOTIC_TERMS: usize = 200;

/// Unscaled/scaled toggle shared by the two public entry points.
fn bessel_i_impl(nu: f64, z: f64, scaled: bool) -> Result<f64> {
    if z < 0.0 || !z.is_finite() {
        return Err(Error::domain(format!(
            "bessel_i requires z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        // I_0(0) = 1, I_ν(0) = 0 for ν > 0, +∞ for ν ∈ (−1, 0)
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if !scaled && z > 700.0 {
        return Err(Error::range(format!(
            "bessel_i overflows for z = {z} > 700; use bessel_i_scaled"
        )));
    }
    let switch = 35f64.max(nu * nu);
    if z <= switch {
        let sum = series_sum(nu, z);
        // prefactor (z/2)^ν / Γ(ν+1); for z ≤ switch the sum is ≤ e^z and
        // stays representable
        let pref = (0.5 * z).powf(nu) / gamma_real(nu + 1.0);
        let val = pref * sum;
        Ok(if scaled { val * (-z).exp() } else { val })
    } else {
        let s = hankel_sum(nu, z, -1.0);
        let scaled_val = s / (2.0 * PI * z).sqrt();
        Ok(if scaled { scaled_val } else { scaled_val * z.exp() })
    }
}

/// Σ_k (z²/4)^k / (k! (ν+1)_k); all terms positive.
fn series_sum(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = (k + 1) as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Hankel expansion Σ_k sign^k a_k(ν)/z^k with
/// a_k = ∏_{j=1..k} (4ν² − (2j−1)²) / (k! 8^k); truncated at the smallest
/// term. sign = −1 gives the I series, sign = +1 the K series.
fn hankel_sum(nu: f64, z: f64, sign: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 1..MAX_ASYMPTOTIC_TERMS {
        let kf = k as f64;
        let num = mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0);
        term *= sign * num / (8.0 * kf * z);
        if term.abs() >= prev_abs {
            break; // divergent tail reached
        }
        prev_abs = term.abs();
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// I_ν(z) for z ≥ 0.
///
/// Signals a range error for z > 700 where e^z overflows; callers in the
/// kernel formulas use [`bessel_i_scaled`] there.
pub fn bessel_i(order: RealOrder, z: f64) -> Result<f64> {
    bessel_i_impl(order.get(), z, false)
}

/// e^{−z} I_ν(z), finite for all z ≥ 0; behaves like (2πz)^{−1/2} as z → ∞.
pub fn bessel_i_scaled(order: RealOrder, z: f64) -> Result<f64> {
    bessel_i_impl(order.get(), z, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    fn order(nu: f64) -> RealOrder {
        RealOrder::new(nu).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// Independent oracle: 250-term ascending series summed in
    /// double-double, scaled by e^{−z} at the end (valid for z up to
    /// ~600 since the sum itself stays below e^z < f64::MAX).
    fn oracle_i_scaled(nu: f64, z: f64) -> f64 {
        let q = Dd::from_prod(0.5 * z, 0.5 * z);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for k in 0..250u32 {
            let kf = (k + 1) as f64;
            let denom = Dd::from_sum(nu, kf).mul_f64(kf);
            term = term.mul(q).div(denom);
            sum = sum.add(term);
            if term.hi < sum.hi * 1e-34 {
                break;
            }
        }
        let pref = (0.5 * z).powf(nu) / gamma_real(nu + 1.0);
        pref * sum.to_f64() * (-z).exp()
    }

    #[test]
    fn value_at_zero() {
        assert_eq!(bessel_i(order(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i_scaled(order(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(order(2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_integer_closed_forms() {
        // I_{1/2}(z) = √(2/(πz)) sinh z, I_{−1/2}(z) = √(2/(πz)) cosh z;
        // closed forms live only here, not in the production path.
        let z = 1.0;
        let want = (2.0 / (PI * z)).sqrt() * z.sinh();
        assert!(rel(bessel_i(order(0.5), z).unwrap(), want) <= 1e-12);
        assert!((bessel_i(order(0.5), 1.0).unwrap() - 0.937_674_888_2).abs() < 1e-9);

        let z = 2.0;
        let want = (2.0 / (PI * z)).sqrt() * z.cosh();
        assert!(rel(bessel_i(order(-0.5), z).unwrap(), want) <= 1e-12);
        assert!((bessel_i(order(-0.5), 2.0).unwrap() - 2.122_530_741_3).abs() < 1e-9);
    }

    #[test]
    fn scaled_half_integer_values() {
        assert!(
            (bessel_i_scaled(order(0.5), 1.0).unwrap() - 0.344_963_639_0).abs() < 1e-9
        );
        // e^{−100} I_{1/2}(100) = √(2/(100π)) (1 − e^{−200})/2
        let want = (2.0 / (100.0 * PI)).sqrt() * 0.5 * (1.0 - (-200f64).exp());
        assert!(rel(bessel_i_scaled(order(0.5), 100.0).unwrap(), want) <= 1e-12);
        assert!((want - 0.039_894_228_0).abs() < 1e-9);
    }

    #[test]
    fn series_oracle_sweep() {
        // log grid over [1e-6, 600] for several orders, against the
        // double-double series oracle
        let orders = [-0.4, 0.0, 0.5, 1.0, 2.7];
        for &nu in &orders {
            let mut z = 1e-6;
            while z <= 600.0 {
                let got = bessel_i_scaled(order(nu), z).unwrap();
                let want = oracle_i_scaled(nu, z);
                assert!(
                    rel(got, want) <= 1e-10,
                    "nu={nu} z={z}: got {got}, want {want}"
                );
                z *= 2.3;
            }
        }
    }

    #[test]
    fn small_argument_power_law() {
        // I_ν(z) Γ(ν+1) (z/2)^{−ν} → 1 as z → 0
        for &nu in &[-0.4, 0.0, 0.5, 1.0, 2.7] {
            let z = 1e-4;
            let val = bessel_i(order(nu), z).unwrap();
            let normalized = val * gamma_real(nu + 1.0) * (0.5 * z).powf(-nu);
            assert!(
                (normalized - 1.0).abs() <= 1e-6,
                "nu={nu}: normalized {normalized}"
            );
        }
    }

    #[test]
    fn derivative_recurrence() {
        // d/dz (z^{−ν} I_ν(z)) = z^{−ν} I_{ν+1}(z), checked by central
        // differences on z ∈ [0.1, 50]
        for &nu in &[0.0, 0.5, 1.3] {
            let mut z = 0.1f64;
            while z <= 50.0 {
                let h = z * 1e-5;
                let g = |w: f64| w.powf(-nu) * bessel_i(order(nu), w).unwrap();
                let fd = (g(z + h) - g(z - h)) / (2.0 * h);
                let want = z.powf(-nu) * bessel_i(order(nu + 1.0), z).unwrap();
                assert!(
                    rel(fd, want) <= 1e-6,
                    "nu={nu} z={z}: fd {fd}, want {want}"
                );
                z *= 2.1;
            }
        }
    }

    #[test]
    fn branch_overlap_agreement() {
        // force both branches near the switch and compare to the oracle
        for &nu in &[-0.4, 0.0, 0.9, 2.7, 4.1] {
            for &z in &[30.0, 33.0, 36.0, 40.0, 44.0] {
                let got = bessel_i_scaled(order(nu), z).unwrap();
                let want = oracle_i_scaled(nu, z);
                assert!(
                    rel(got, want) <= 1e-11,
                    "nu={nu} z={z}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn large_z_asymptotic_limit() {
        // e^{−z} I_ν(z) √(2πz) → 1
        let v = bessel_i_scaled(order(1.3), 5e4).unwrap();
        assert!(rel(v, 1.0 / (2.0 * PI * 5e4).sqrt()) <= 1e-4);
    }

    #[test]
    fn overflow_region_signals_range_error() {
        assert!(matches!(
            bessel_i(order(0.0), 701.0),
            Err(Error::Range(_))
        ));
        assert!(bessel_i_scaled(order(0.0), 701.0).is_ok());
    }

    #[test]
    fn positivity() {
        for &nu in &[-0.4, 0.0, 1.5] {
            for &z in &[1e-8, 0.3, 7.0, 120.0] {
                assert!(bessel_i(order(nu), z).unwrap() > 0.0);
            }
        }
    }
}
