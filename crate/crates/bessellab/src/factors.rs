//! Integrability factors: the weights φ_t^λ (heat) and φ^λ (Poisson)
//! against which ∫ φ |f| dy < ∞ characterizes existence of the
//! corresponding kernel integral of f.

/// Heat factor φ_t^λ(y) = y^λ (y/(y+1))^λ e^{−y²/4t}; pointwise
/// nondecreasing in t.
pub fn phi_heat(lambda: f64, t: f64, y: f64) -> f64 {
    let base = y / (y + 1.0);
    y.powf(lambda) * base.powf(lambda) * (-y * y / (4.0 * t)).exp()
}

/// Poisson factor φ^λ(y) = y^{2λ} / (y²+1)^{λ+1}.
pub fn phi_poisson(lambda: f64, y: f64) -> f64 {
    let y2 = y * y;
    y2.powf(lambda) / (y2 + 1.0).powf(lambda + 1.0)
}
