use crate::error::{Error, Result};
use crate::mog::MoGModel;
use crate::special::gaussian_q;

/// E[e^{−sγ}] for the mixture SNR, s ≥ 0:
///
/// Σᵢ ωᵢ/√βᵢ · exp(−μᵢ²γ̄s/βᵢ) · Q(−μᵢ/(ηᵢ√βᵢ)),   βᵢ = 1 + 2ηᵢ²γ̄s.
///
/// The exponent comes from completing the square in ∫₀^∞ e^{−sγ̄x²} φᵢ(x) dx
/// and is necessarily ≤ 0, so mgf is non-increasing with mgf(0) equal to the
/// half-line mass. As s → ∞ the exponent tends to −μᵢ²/(2ηᵢ²), so the SER
/// integrands built on this never overflow.
pub fn mgf(model: &MoGModel, s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!("mgf needs finite s >= 0, got {s}")));
    }
    Ok(mgf_value(model, s))
}

/// MGF after maximal-ratio combining of independent branches, Πₖ mgf(k, s).
/// Branches need not be identically distributed.
pub fn mrc_mgf(models: &[MoGModel], s: f64) -> Result<f64> {
    if models.is_empty() {
        return Err(Error::Validation("mrc_mgf needs at least one branch".into()));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!("mrc_mgf needs finite s >= 0, got {s}")));
    }
    Ok(models.iter().map(|m| mgf_value(m, s)).product())
}

/// Validated-input core shared with the SER quadratures, where s comes from
/// g/sin²θ at interior Gauss nodes and is always positive and finite.
pub(crate) fn mgf_value(model: &MoGModel, s: f64) -> f64 {
    let gs = model.avg_snr() * s;
    let mut acc = 0.0;
    for ((&w, &mu), &eta) in model
        .weights()
        .iter()
        .zip(model.means())
        .zip(model.stds())
    {
        let beta = 1.0 + 2.0 * eta * eta * gs;
        let root = beta.sqrt();
        acc += w / root * (-mu * mu * gs / beta).exp() * gaussian_q(-mu / (eta * root));
    }
    acc
}
