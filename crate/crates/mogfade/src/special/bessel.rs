//! Modified Bessel function of the first kind, real order ν > −1.

use super::ln_gamma;
use crate::{Error, Result};

const MAX_SERIES_TERMS: usize = 2000;
const SWITCHOVER: f64 = 30.0;

/// Ascending power series, summed relative to the leading term.
/// Converges for every x but costs O(x) terms, so it is the small-x path.
fn ln_series_from_origin(nu: f64, x: f64) -> Result<f64> {
    let half = 0.5 * x;
    let q = half * half;
    let ln_t0 = nu * half.ln() - ln_gamma(nu + 1.0);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (nu + kf + 1.0));
        sum += term;
        if term <= sum * 1e-16 {
            return Ok(ln_t0 + sum.ln());
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_SERIES_TERMS,
        last_step: term,
    })
}

/// Same series summed outward from its largest term, which keeps every
/// intermediate in range for x where the leading term underflows.
fn ln_series_from_peak(nu: f64, x: f64) -> Result<f64> {
    let half = 0.5 * x;
    let q = half * half;
    // t_{k+1}/t_k = q / ((k+1)(ν+k+1)) crosses 1 near this k.
    let peak = (0.5 * (-(nu + 1.0) + ((nu + 1.0) * (nu + 1.0) + 4.0 * q).sqrt()))
        .floor()
        .max(0.0);
    let kp = peak as usize;
    let ln_tp = (nu + 2.0 * peak) * half.ln()
        - ln_gamma(peak + 1.0)
        - ln_gamma(nu + peak + 1.0);

    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in (kp + 1)..(kp + 1 + MAX_SERIES_TERMS) {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term <= sum * 1e-16 {
            break;
        }
    }
    term = 1.0;
    for k in (1..=kp).rev() {
        let kf = k as f64;
        term *= kf * (nu + kf) / q;
        sum += term;
        if term <= sum * 1e-16 {
            break;
        }
    }
    Ok(ln_tp + sum.ln())
}

/// Large-x asymptotic expansion of e^{−x} I_ν(x). Returns None when the
/// optimal truncation cannot reach 1e-13, which happens for large ν; the
/// caller then falls back to the exact series.
fn ln_asymptotic(nu: f64, x: f64) -> Option<f64> {
    let four_nu2 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let kf = k as f64;
        term *= -(four_nu2 - (2.0 * kf + 1.0) * (2.0 * kf + 1.0))
            / (8.0 * (kf + 1.0) * x);
        if term.abs() >= prev {
            return None;
        }
        sum += term;
        if term.abs() <= sum.abs() * 1e-15 {
            let ln_scaled =
                sum.ln() - 0.5 * (2.0 * std::f64::consts::PI * x).ln();
            return Some(x + ln_scaled);
        }
        prev = term.abs();
    }
    None
}

/// ln Iν(x) for ν > −1, x > 0.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    if x <= SWITCHOVER {
        return ln_series_from_origin(nu, x);
    }
    if let Some(v) = ln_asymptotic(nu, x) {
        return Ok(v);
    }
    ln_series_from_peak(nu, x)
}

fn validate(nu: f64, x: f64) -> Result<()> {
    if !(nu >= -0.999) {
        return Err(Error::Domain(format!(
            "bessel_i implemented for nu >= -0.999, got {nu}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("bessel_i needs x >= 0, got {x}")));
    }
    Ok(())
}

/// Iν(x). Signals overflow where e^x growth exceeds f64 range; use
/// [`bessel_i_scaled`] there.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    validate(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let ln_val = ln_bessel_i(nu, x)?;
    if ln_val > 709.0 {
        return Err(Error::Overflow(format!(
            "bessel_i({nu}, {x}) ~ exp({ln_val:.1})"
        )));
    }
    Ok(ln_val.exp())
}

/// e^{−x} Iν(x), finite for every x in domain.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    validate(nu, x)?;
    if x == 0.0 {
        return bessel_i(nu, x);
    }
    Ok((ln_bessel_i(nu, x)? - x).exp())
}
