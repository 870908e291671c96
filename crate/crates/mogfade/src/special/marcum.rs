//! Generalized Marcum Q-function of integer order.

use super::{ln_gamma, reg_upper_gamma};
use crate::{Error, Result, SeriesPolicy};

/// Q_u(a, b): the canonical series
/// Σ_{n≥0} e^{−a²/2} (a²/2)ⁿ/n! · Γ(u+n, b²/2)/Γ(u+n),
/// summed outward from the Poisson mode so the weights never underflow
/// before the mass has been covered.
///
/// The truncation error is bounded by the uncovered Poisson mass, which is
/// what the stopping rule tests.
pub fn marcum_q(u: u32, a: f64, b: f64, policy: &SeriesPolicy) -> Result<f64> {
    policy.validate()?;
    if u == 0 {
        return Err(Error::Domain("marcum_q order must be >= 1".into()));
    }
    if !(a >= 0.0) || !(b >= 0.0) {
        return Err(Error::Domain(format!(
            "marcum_q needs a >= 0 and b >= 0, got a={a}, b={b}"
        )));
    }
    let x = 0.5 * b * b;
    if b == 0.0 {
        return Ok(1.0);
    }
    let lam = 0.5 * a * a;
    if a == 0.0 {
        return reg_upper_gamma(u as f64, x);
    }

    let mode = lam.floor();
    let ln_w_mode = -lam + mode * lam.ln() - ln_gamma(mode + 1.0);
    let w_mode = ln_w_mode.exp();
    let n0 = mode as usize;

    let mut total = w_mode * reg_upper_gamma(u as f64 + mode, x)?;
    let mut covered = w_mode;
    let mut terms = 1usize;

    // Upward from the mode.
    let mut w = w_mode;
    let mut n = n0;
    loop {
        if terms >= policy.max_terms {
            return Err(Error::NonConvergence {
                terms,
                last_step: 1.0 - covered,
            });
        }
        let uncovered = (1.0 - covered).max(0.0);
        if uncovered <= policy.abs_tol.max(policy.rel_tol * total) {
            break;
        }
        n += 1;
        w *= lam / n as f64;
        total += w * reg_upper_gamma(u as f64 + n as f64, x)?;
        covered += w;
        terms += 1;
        if w < 1e-18 && n > n0 + 3 {
            break;
        }
    }
    // Downward from the mode.
    let mut w = w_mode;
    for n in (0..n0).rev() {
        if terms >= policy.max_terms {
            return Err(Error::NonConvergence {
                terms,
                last_step: 1.0 - covered,
            });
        }
        w *= (n + 1) as f64 / lam;
        total += w * reg_upper_gamma(u as f64 + n as f64, x)?;
        covered += w;
        terms += 1;
        if w < 1e-18 {
            break;
        }
    }

    let uncovered = (1.0 - covered).max(0.0);
    if uncovered > policy.abs_tol.max(policy.rel_tol * total).max(1e-12) {
        return Err(Error::NonConvergence {
            terms,
            last_step: uncovered,
        });
    }
    Ok(total.clamp(0.0, 1.0))
}
