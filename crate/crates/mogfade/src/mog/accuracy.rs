use super::MoGModel;
use crate::channels::{exact_envelope_pdf, ChannelSpec};
use crate::error::Result;
use crate::quad;
use std::cell::RefCell;

/// Density floor: below this the exact side contributes nothing to the KL
/// integrand, and the model side is clamped so a vanished tail shows up as
/// a huge (but finite and integrable) divergence instead of breaking the
/// quadrature.
const DENSITY_FLOOR: f64 = 1e-300;

fn kl_against<F: Fn(f64) -> Result<f64>>(exact: F, model: &MoGModel) -> Result<f64> {
    // Envelope-domain integral; the SNR-domain divergence is the same
    // number because γ = γ̄α² is a monotone reparameterization.
    let failure = RefCell::new(None);
    let integrand = |x: f64| match exact(x) {
        Ok(f) if f.is_finite() && f >= DENSITY_FLOOR => {
            let fhat = model.envelope_pdf(x).unwrap_or(0.0).max(DENSITY_FLOOR);
            f * (f / fhat).ln()
        }
        Ok(_) => 0.0,
        Err(e) => {
            failure.replace(Some(e));
            0.0
        }
    };
    let q = quad::integrate_to_inf(&integrand, 0.0, 1e-8, 1e-12, 400)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q.value)
}

/// ∫₀^∞ f·ln(f/f̂) in nats between an exact channel envelope and a fitted
/// mixture. Non-negative up to quadrature error; not clamped.
pub fn kl_divergence(exact: &ChannelSpec, model: &MoGModel) -> Result<f64> {
    exact.validate()?;
    kl_against(|x| exact_envelope_pdf(exact, x), model)
}

/// Same divergence with another mixture as the reference density.
pub fn kl_divergence_between(reference: &MoGModel, model: &MoGModel) -> Result<f64> {
    kl_against(|x| reference.envelope_pdf(x), model)
}

fn mse_on_grid<F: Fn(f64) -> Result<f64>>(
    exact: F,
    model: &MoGModel,
    x_max: f64,
    points: usize,
) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..points {
        // Midpoints keep origin poles of the exact densities off the grid.
        let x = x_max * (k as f64 + 0.5) / points as f64;
        let d = model.envelope_pdf(x)? - exact(x)?;
        acc += d * d;
    }
    Ok(acc / points as f64)
}

/// Mean squared envelope-density difference over a uniform grid on
/// [0, x_max]. The grid should cover essentially all of the exact mass.
/// (The usual error criterion named alongside KL is the mean of the
/// squared difference; that is what this computes.)
pub fn mse_criterion(
    exact: &ChannelSpec,
    model: &MoGModel,
    x_max: f64,
    points: usize,
) -> Result<f64> {
    exact.validate()?;
    validate_grid(x_max, points)?;
    mse_on_grid(|x| exact_envelope_pdf(exact, x), model, x_max, points)
}

/// Same criterion with another mixture as the reference density.
pub fn mse_criterion_between(
    reference: &MoGModel,
    model: &MoGModel,
    x_max: f64,
    points: usize,
) -> Result<f64> {
    validate_grid(x_max, points)?;
    mse_on_grid(|x| reference.envelope_pdf(x), model, x_max, points)
}

fn validate_grid(x_max: f64, points: usize) -> Result<()> {
    if !(x_max.is_finite() && x_max > 0.0) || points == 0 {
        return Err(crate::error::Error::Validation(format!(
            "grid needs x_max > 0 and points >= 1, got {x_max} and {points}"
        )));
    }
    Ok(())
}
