use crate::error::{Error, Result};
use crate::mog::MoGModel;
use crate::policy::SeriesPolicy;
use crate::special::{gaussian_q, kummer_1f1};

/// n-th raw moment of the SNR,
///
/// E[γⁿ] = Σᵢ ωᵢ γ̄ⁿ ηᵢ²ⁿ (2n−1)!! · ₁F₁(−n, ½; −μᵢ²/(2ηᵢ²)),
///
/// where (2n−1)!! = 2ⁿΓ(n+½)/√π. The ₁F₁ is a terminating polynomial whose
/// terms are all positive for negative argument, so there is no cancellation.
/// Like the mixture itself, the moment integral runs over the whole real
/// envelope line; at n = 0 it returns Σωᵢ, which matches the half-line
/// normalization mass only up to the truncated negative-x sliver.
pub fn raw_moment(model: &MoGModel, n: u32) -> Result<f64> {
    let policy = SeriesPolicy::default();
    let gbar = model.avg_snr();
    let mut dfact = 1.0f64;
    for k in 1..=n {
        dfact *= 2.0 * k as f64 - 1.0;
    }
    let mut acc = 0.0;
    for ((&w, &mu), &eta) in model
        .weights()
        .iter()
        .zip(model.means())
        .zip(model.stds())
    {
        let e2 = eta * eta;
        let poly = kummer_1f1(-(n as f64), 0.5, -mu * mu / (2.0 * e2), &policy)?;
        acc += w * (gbar * e2).powi(n as i32) * dfact * poly;
    }
    Ok(acc)
}

/// E[γⁿ] for n ∈ 1..=4 from the derivative ladder of the per-component
/// Laplace transform at s = 0, which reduces to the even moments of a
/// Gaussian envelope: E[x²ⁿ] expanded in μ², η². Independent of the
/// hypergeometric route in [`raw_moment`], so the two cross-check each other.
pub fn raw_moment_via_mgf(model: &MoGModel, n: u32) -> Result<f64> {
    if !(1..=4).contains(&n) {
        return Err(Error::Domain(format!(
            "raw_moment_via_mgf covers n in 1..=4, got {n}"
        )));
    }
    let gbar = model.avg_snr();
    let mut acc = 0.0;
    for ((&w, &mu), &eta) in model
        .weights()
        .iter()
        .zip(model.means())
        .zip(model.stds())
    {
        let m2 = mu * mu;
        let v = eta * eta;
        let even = match n {
            1 => m2 + v,
            2 => m2 * m2 + 6.0 * m2 * v + 3.0 * v * v,
            3 => m2 * m2 * m2 + 15.0 * m2 * m2 * v + 45.0 * m2 * v * v + 15.0 * v * v * v,
            _ => {
                m2 * m2 * m2 * m2
                    + 28.0 * m2 * m2 * m2 * v
                    + 210.0 * m2 * m2 * v * v
                    + 420.0 * m2 * v * v * v
                    + 105.0 * v * v * v * v
            }
        };
        acc += w * even;
    }
    Ok(gbar.powi(n as i32) * acc)
}

/// Amount of fading E[γ²]/E[γ]² − 1, written out so the γ̄ⁿ factors cancel
/// symbolically instead of numerically:
///
/// Σωᵢ(μᵢ⁴ + 6μᵢ²ηᵢ² + 3ηᵢ⁴) / [Σωᵢ(μᵢ² + ηᵢ²)]² − 1.
pub fn amount_of_fading(model: &MoGModel) -> f64 {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for ((&w, &mu), &eta) in model
        .weights()
        .iter()
        .zip(model.means())
        .zip(model.stds())
    {
        let a = mu * mu;
        let v = eta * eta;
        m1 += w * (a + v);
        m2 += w * (a * a + 6.0 * a * v + 3.0 * v * v);
    }
    m2 / (m1 * m1) - 1.0
}

/// P[γ ≤ γ_th] = Σᵢ ωᵢ [Q(−μᵢ/ηᵢ) − Q((√(γ_th/γ̄) − μᵢ)/ηᵢ)].
///
/// Non-decreasing in γ_th, 0 at γ_th = 0, saturating at the normalization
/// mass.
pub fn outage_probability(model: &MoGModel, gamma_th: f64) -> Result<f64> {
    if !gamma_th.is_finite() || gamma_th < 0.0 {
        return Err(Error::Domain(format!(
            "outage_probability needs gamma_th >= 0, got {gamma_th}"
        )));
    }
    let x_th = (gamma_th / model.avg_snr()).sqrt();
    let mut acc = 0.0;
    for ((&w, &mu), &eta) in model
        .weights()
        .iter()
        .zip(model.means())
        .zip(model.stds())
    {
        acc += w * (gaussian_q(-mu / eta) - gaussian_q((x_th - mu) / eta));
    }
    Ok(acc)
}

/// Second-order ergodic capacity approximation in bits/s:
///
/// (B/ln 2) · [ln(1 + E[γ]) − Var[γ] / (2(1 + E[γ])²)].
///
/// Exact for a deterministic channel; the error grows with the SNR variance
/// relative to (1 + E[γ])², which is why heavy-fading models at high γ̄
/// drift from the true average of B·log₂(1+γ).
pub fn ergodic_capacity(model: &MoGModel, bandwidth: f64) -> Result<f64> {
    if !bandwidth.is_finite() || bandwidth <= 0.0 {
        return Err(Error::Domain(format!(
            "ergodic_capacity needs bandwidth > 0, got {bandwidth}"
        )));
    }
    let e1 = raw_moment(model, 1)?;
    let e2 = raw_moment(model, 2)?;
    let var = e2 - e1 * e1;
    let shifted = 1.0 + e1;
    Ok(bandwidth / std::f64::consts::LN_2 * (shifted.ln() - var / (2.0 * shifted * shifted)))
}
