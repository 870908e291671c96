//! Ground-truth density evaluation for every channel kind.

use std::f64::consts::{LN_2, PI};

use super::{ChannelSpec, Params};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{ln_bessel_i, ln_gamma, ln_kummer_1f1_pos, SQRT_2PI};

/// SNR density f_γ(γ). Closed form for every kind except the lognormal
/// composites, which integrate the conditional Gamma density over the
/// shadow in log space.
pub fn exact_snr_pdf(spec: &ChannelSpec, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Domain(format!(
            "snr must be finite and >= 0, got {gamma}"
        )));
    }
    let p = spec.params()?;
    let gbar = spec.avg_snr;
    if gamma == 0.0 {
        return Ok(snr_pdf_origin(&p, gbar));
    }
    let x = gamma / gbar;
    let ln = match p {
        Params::Nakagami { m } => m * (m / gbar).ln() + (m - 1.0) * gamma.ln() - m * x - ln_gamma(m),
        Params::Lognormal { m, ln_mean, ln_std } => {
            return lognormal_snr_pdf(m, ln_mean, ln_std, gbar, gamma)
        }
        Params::KappaMu { kappa, mu } => {
            mu.ln() + 0.5 * (mu + 1.0) * (1.0 + kappa).ln() - 0.5 * (mu - 1.0) * kappa.ln()
                - mu * kappa
                - gbar.ln()
                + 0.5 * (mu - 1.0) * x.ln()
                - mu * (1.0 + kappa) * x
                + ln_bessel_i(mu - 1.0, 2.0 * mu * (kappa * (1.0 + kappa) * x).sqrt())?
        }
        Params::EtaMu { mu, h, hh } => {
            LN_2 + 0.5 * PI.ln() + (mu + 0.5) * mu.ln() + mu * h.ln()
                - ln_gamma(mu)
                - (mu - 0.5) * hh.ln()
                - gbar.ln()
                + (mu - 0.5) * x.ln()
                - 2.0 * mu * h * x
                + ln_bessel_i(mu - 0.5, 2.0 * mu * hh * x)?
        }
        Params::Shadowed { kappa, mu, m } => {
            let z = mu * mu * kappa * (1.0 + kappa) * x / (mu * kappa + m);
            mu * mu.ln() + m * m.ln() + mu * (1.0 + kappa).ln()
                - ln_gamma(mu)
                - gbar.ln()
                - m * (mu * kappa + m).ln()
                + (mu - 1.0) * x.ln()
                - mu * (1.0 + kappa) * x
                + ln_kummer_1f1_pos(m, mu, z)?
        }
    };
    Ok(ln.exp())
}

/// Envelope density f_α(α) through the change of variables γ = γ̄α².
pub fn exact_envelope_pdf(spec: &ChannelSpec, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "amplitude must be finite and >= 0, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(envelope_pdf_origin(&spec.params()?));
    }
    let gbar = spec.avg_snr;
    Ok(2.0 * gbar * alpha * exact_snr_pdf(spec, gbar * alpha * alpha)?)
}

/// γ → 0 limit: the leading γ exponent decides between 0, a pole, and the
/// boundary constants (the leading series coefficients).
fn snr_pdf_origin(p: &Params, gbar: f64) -> f64 {
    let (e, at_zero) = match *p {
        Params::Nakagami { m } => (m - 1.0, 1.0 / gbar),
        Params::Lognormal { m, ln_mean, ln_std } => {
            (m - 1.0, (0.5 * ln_std * ln_std - ln_mean).exp() / gbar)
        }
        Params::KappaMu { kappa, mu } => (mu - 1.0, (1.0 + kappa) * (-kappa).exp() / gbar),
        Params::EtaMu { mu, h, .. } => (2.0 * mu - 1.0, h.sqrt() / gbar),
        Params::Shadowed { kappa, mu, m } => (
            mu - 1.0,
            m.powf(m) * (1.0 + kappa) / ((kappa + m).powf(m) * gbar),
        ),
    };
    if e > 0.0 {
        0.0
    } else if e < 0.0 {
        f64::INFINITY
    } else {
        at_zero
    }
}

/// α → 0 limit, same structure with the envelope exponent.
fn envelope_pdf_origin(p: &Params) -> f64 {
    let (e, at_zero) = match *p {
        Params::Nakagami { m } => (2.0 * m - 1.0, (2.0 / PI).sqrt()),
        Params::Lognormal { m, ln_mean, ln_std } => (
            2.0 * m - 1.0,
            (2.0 / PI).sqrt() * (ln_std * ln_std / 8.0 - 0.5 * ln_mean).exp(),
        ),
        Params::KappaMu { kappa, mu } => (
            2.0 * mu - 1.0,
            (2.0 * (1.0 + kappa) / PI).sqrt() * (-0.5 * kappa).exp(),
        ),
        Params::EtaMu { mu, h, .. } => (4.0 * mu - 1.0, (2.0 / PI).sqrt() * h.powf(0.25)),
        Params::Shadowed { kappa, mu, m } => (
            2.0 * mu - 1.0,
            (2.0 * (1.0 + kappa) / PI).sqrt() * m.powf(m) / (m + 0.5 * kappa).powf(m),
        ),
    };
    if e > 0.0 {
        0.0
    } else if e < 0.0 {
        f64::INFINITY
    } else {
        at_zero
    }
}

fn lognormal_snr_pdf(m: f64, ln_mean: f64, ln_std: f64, gbar: f64, gamma: f64) -> Result<f64> {
    let lg = ln_gamma(m);
    let ln_g = gamma.ln();
    let norm = -(SQRT_2PI * ln_std).ln();
    let f = |t: f64| {
        let d = (t - ln_mean) / ln_std;
        let ln_cond = m * m.ln() - m * (gbar.ln() + t) + (m - 1.0) * ln_g
            - m * gamma / (gbar * t.exp())
            - lg;
        (ln_cond + norm - 0.5 * d * d).exp()
    };
    // The shadow weight ten of its own standard deviations out is below
    // 1e-21 of the peak; the fixed window keeps the adaptive pass bounded.
    let (lo, hi) = (ln_mean - 10.0 * ln_std, ln_mean + 10.0 * ln_std);
    Ok(quad::integrate(&f, lo, hi, 1e-11, 1e-280, 200)?.value)
}
