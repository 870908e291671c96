//! Gaussian-mixture envelope model: the fit target, its densities, and the
//! criteria used to grade a fitted mixture against an exact channel.

mod accuracy;
mod em;
mod select;

pub use accuracy::{kl_divergence, kl_divergence_between, mse_criterion, mse_criterion_between};
pub use em::{em_fit, em_refine, FitConfig, FitReport};
pub use select::{bic_score, select_components, BicEntry};

use crate::error::{Error, Result};
use crate::special::gaussian_q;
use serde::{Deserialize, Serialize};

/// Finite mixture of Gaussian kernels on the fading envelope.
///
/// Weights are strictly positive and sum to one (construction renormalizes
/// away rounding up to 1e-3, as published parameter tables carry only five
/// digits); widths are strictly positive. The kernels live on the whole real
/// line, so a small weight fraction sits at negative amplitudes; see
/// [`MoGModel::normalization_mass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub struct MoGModel {
    weights: Vec<f64>,
    means: Vec<f64>,
    stds: Vec<f64>,
    avg_snr: f64,
}

impl MoGModel {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, stds: Vec<f64>, avg_snr: f64) -> Result<Self> {
        let c = weights.len();
        if c == 0 || means.len() != c || stds.len() != c {
            return Err(Error::Validation(format!(
                "component vectors must share a nonzero length, got {}/{}/{}",
                c,
                means.len(),
                stds.len()
            )));
        }
        if !avg_snr.is_finite() || avg_snr <= 0.0 {
            return Err(Error::Validation(format!(
                "avg_snr must be positive and finite, got {avg_snr}"
            )));
        }
        for j in 0..c {
            if !weights[j].is_finite() || weights[j] <= 0.0 {
                return Err(Error::Validation(format!(
                    "weight {j} must be positive and finite, got {}",
                    weights[j]
                )));
            }
            if !stds[j].is_finite() || stds[j] <= 0.0 {
                return Err(Error::Validation(format!(
                    "std {j} must be positive and finite, got {}",
                    stds[j]
                )));
            }
            if !means[j].is_finite() {
                return Err(Error::Validation(format!(
                    "mean {j} must be finite, got {}",
                    means[j]
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-3 {
            return Err(Error::Validation(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        let mut model = MoGModel {
            weights,
            means,
            stds,
            avg_snr,
        };
        if (sum - 1.0).abs() > 1e-12 {
            for w in &mut model.weights {
                *w /= sum;
            }
        }
        Ok(model)
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    /// Same mixture evaluated at a different mean SNR.
    pub fn with_avg_snr(mut self, avg_snr: f64) -> Result<Self> {
        if !avg_snr.is_finite() || avg_snr <= 0.0 {
            return Err(Error::Validation(format!(
                "avg_snr must be positive and finite, got {avg_snr}"
            )));
        }
        self.avg_snr = avg_snr;
        Ok(self)
    }

    /// Σ ωⱼ φ(x; μⱼ, ηⱼ) for amplitudes x ≥ 0.
    pub fn envelope_pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!("amplitude must be >= 0, got {x}")));
        }
        let norm = (2.0 * std::f64::consts::PI).sqrt();
        let mut sum = 0.0;
        for j in 0..self.weights.len() {
            let z = (x - self.means[j]) / self.stds[j];
            sum += self.weights[j] / (norm * self.stds[j]) * (-0.5 * z * z).exp();
        }
        Ok(sum)
    }

    /// SNR density at γ = avg_snr · x². Carries an integrable 1/√γ pole at
    /// the origin, so γ = 0 is signaled rather than evaluated; quadratures
    /// should open the interval at ~1e-12·γ̄.
    pub fn snr_pdf(&self, gamma: f64) -> Result<f64> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Domain(format!("snr must be >= 0, got {gamma}")));
        }
        if gamma == 0.0 {
            return Err(Error::Pole("mixture SNR pdf has a 1/sqrt(gamma) pole at 0".into()));
        }
        let x = (gamma / self.avg_snr).sqrt();
        Ok(self.envelope_pdf(x)? / (2.0 * (gamma * self.avg_snr).sqrt()))
    }

    /// Mixture mass on [0, ∞): Σ ωⱼ Q(−μⱼ/ηⱼ). A good envelope fit leaves
    /// this within ~1e-3 of one; fits below 0.995 get flagged upstream.
    pub fn normalization_mass(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((w, mu), eta)| w * gaussian_q(-mu / eta))
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    avg_snr: f64,
    components: Vec<WireComponent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireComponent {
    w: f64,
    mu: f64,
    eta: f64,
}

impl TryFrom<Wire> for MoGModel {
    type Error = Error;

    fn try_from(wire: Wire) -> Result<Self> {
        let (mut w, mut mu, mut eta) = (Vec::new(), Vec::new(), Vec::new());
        for comp in wire.components {
            w.push(comp.w);
            mu.push(comp.mu);
            eta.push(comp.eta);
        }
        MoGModel::new(w, mu, eta, wire.avg_snr)
    }
}

impl From<MoGModel> for Wire {
    fn from(model: MoGModel) -> Self {
        Wire {
            avg_snr: model.avg_snr,
            components: model
                .weights
                .iter()
                .zip(&model.means)
                .zip(&model.stds)
                .map(|((&w, &mu), &eta)| WireComponent { w, mu, eta })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(mu: f64, eta: f64) -> MoGModel {
        MoGModel::new(vec![1.0], vec![mu], vec![eta], 1.0).unwrap()
    }

    #[test]
    fn envelope_pdf_gaussian_peak() {
        let m = single(0.0, 1.0);
        let want = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((m.envelope_pdf(0.0).unwrap() - want).abs() < 1e-15);
        let m = single(1.3, 0.2);
        let want = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * 0.2);
        assert!((m.envelope_pdf(1.3).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn snr_pdf_signals_the_origin_pole() {
        let m = single(1.0, 0.2);
        assert!(matches!(m.snr_pdf(0.0), Err(Error::Pole(_))));
        assert!(m.snr_pdf(-1.0).is_err());
        assert!(m.snr_pdf(0.5).unwrap() > 0.0);
    }

    #[test]
    fn half_line_mass() {
        assert!((single(0.0, 1.0).normalization_mass() - 0.5).abs() < 1e-15);
        let razor_thin = single(6.0, 1.0).normalization_mass();
        assert!((razor_thin - 0.999999999).abs() < 1e-9);
    }

    #[test]
    fn construction_rejects_and_renormalizes() {
        assert!(MoGModel::new(vec![], vec![], vec![], 1.0).is_err());
        assert!(MoGModel::new(vec![1.0], vec![0.0], vec![1.0], 0.0).is_err());
        assert!(MoGModel::new(vec![0.5, 0.5], vec![0.0], vec![1.0, 1.0], 1.0).is_err());
        assert!(MoGModel::new(vec![1.0], vec![0.0], vec![0.0], 1.0).is_err());
        assert!(MoGModel::new(vec![0.6, 0.6], vec![0.0, 1.0], vec![1.0, 1.0], 1.0).is_err());

        // Five-digit published weights come in slightly off one.
        let m = MoGModel::new(vec![0.49999, 0.50002], vec![0.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let sum: f64 = m.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_wire_format() {
        let m = MoGModel::new(vec![0.25, 0.75], vec![0.5, 1.5], vec![0.1, 0.3], 2.0).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"avg_snr\":2.0"));
        assert!(text.contains("\"components\""));
        assert!(text.contains("\"w\":0.25"));
        assert!(text.contains("\"mu\":0.5"));
        assert!(text.contains("\"eta\":0.1"));
        let back: MoGModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<MoGModel>(
            r#"{"avg_snr":1.0,"components":[{"w":1.0,"mu":0.0,"eta":1.0,"x":1}]}"#
        )
        .is_err());
    }
}
