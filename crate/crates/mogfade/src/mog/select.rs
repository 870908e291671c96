use super::em::{em_fit, FitConfig, FitReport};
use super::MoGModel;
use crate::error::{Error, Result};
use serde::Serialize;
use std::ops::RangeInclusive;

/// −2𝕃 + C·ln ℳ on the total (summed, not per-sample) log-likelihood.
/// The penalty scales with the component count itself, not the mixture's
/// free-parameter count 3C−1.
pub fn bic_score(loglik_total: f64, c: usize, n_samples: usize) -> f64 {
    debug_assert!(n_samples >= 1);
    -2.0 * loglik_total + c as f64 * (n_samples as f64).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct BicEntry {
    pub c: usize,
    pub bic: f64,
    /// Total log-likelihood of the fitted C-component model.
    pub loglik: f64,
    pub converged: bool,
}

/// Fits every component count in `c_range` and keeps the minimum-BIC model;
/// ties break toward fewer components.
pub fn select_components(
    samples: &[f64],
    c_range: RangeInclusive<usize>,
    config: &FitConfig,
) -> Result<(MoGModel, FitReport, Vec<BicEntry>)> {
    let (lo, hi) = (*c_range.start(), *c_range.end());
    if lo < 1 || lo > hi || hi > 32 {
        return Err(Error::Validation(format!(
            "component range must satisfy 1 <= c_min <= c_max <= 32, got {lo}..={hi}"
        )));
    }
    let mut table = Vec::with_capacity(hi - lo + 1);
    let mut best: Option<(MoGModel, FitReport)> = None;
    for c in lo..=hi {
        let (model, report) = em_fit(samples, c, config)?;
        table.push(BicEntry {
            c,
            bic: report.bic,
            loglik: report.loglik_trace.last().unwrap() * report.n_samples as f64,
            converged: report.converged,
        });
        if best.as_ref().is_none_or(|(_, b)| report.bic < b.bic) {
            best = Some((model, report));
        }
    }
    let (model, report) = best.unwrap();
    Ok((model, report, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bic_arithmetic() {
        let b = bic_score(-1000.0, 4, 100_000);
        assert!((b - 2046.0517).abs() < 5e-5, "got {b}");
        assert_eq!(bic_score(0.0, 1, 1), 0.0);
        // n = ⌈e¹⁰⌉ gives ln n = 10 to four digits.
        let b = bic_score(-500.0, 3, 22_026);
        assert!((b - 1030.0).abs() < 1e-2, "got {b}");
    }

    #[test]
    fn range_validation() {
        let cfg = FitConfig::default();
        let s = [0.5, 1.0, 1.5, 2.0];
        assert!(select_components(&s, 0..=2, &cfg).is_err());
        assert!(select_components(&s, 3..=2, &cfg).is_err());
        assert!(select_components(&s, 1..=33, &cfg).is_err());
    }
}
