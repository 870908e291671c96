//! Exact fading-channel models: densities, samplers, and parameter plumbing.
//!
//! These are the ground truth that the mixture fit approximates and that the
//! metric cross-checks integrate against. Densities are evaluated in log
//! space so deep tails underflow to zero instead of tripping overflow in the
//! Bessel and Kummer factors.

mod pdf;
mod sampler;

pub use pdf::{exact_envelope_pdf, exact_snr_pdf};
pub use sampler::sample_envelope;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// ln σ = LAMBDA · (10 log₁₀ σ).
pub(crate) const LAMBDA: f64 = std::f64::consts::LN_10 / 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    NakagamiLognormal,
    RayleighLognormal,
    KappaMu,
    EtaMu,
    KappaMuShadowed,
    NakagamiM,
    Rayleigh,
}

/// Declarative description of a fading channel.
///
/// Which fields are meaningful depends on `kind`; [`ChannelSpec::validate`]
/// rejects missing or out-of-range required fields and reports fields that
/// are present but unused as warnings. Envelopes are normalized so the mean
/// power multiplier is nominally one at `mean_db = 0`, and `avg_snr` carries
/// the whole SNR scale (γ = avg_snr · α²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// Fading figure: Nakagami shape for the multipath kinds, shadowing
    /// severity for `KappaMuShadowed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Lognormal shadow standard deviation in dB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_db: Option<f64>,
    /// Lognormal shadow mean in dB; 0 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_db: Option<f64>,
    /// Dominant-to-scattered power ratio, ≥ 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Cluster number, > 0 (non-integer allowed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Format 1: in-phase/quadrature power ratio in (0, ∞).
    /// Format 2: in-phase/quadrature correlation in (−1, 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// 1 or 2; 1 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_format: Option<u8>,
    /// Linear mean SNR γ̄ the SNR-domain quantities are evaluated at.
    pub avg_snr: f64,
}

impl ChannelSpec {
    fn base(kind: ChannelKind, avg_snr: f64) -> Self {
        ChannelSpec {
            kind,
            m: None,
            zeta_db: None,
            mean_db: None,
            kappa: None,
            mu: None,
            eta: None,
            eta_format: None,
            avg_snr,
        }
    }

    pub fn nakagami_m(m: f64, avg_snr: f64) -> Self {
        Self {
            m: Some(m),
            ..Self::base(ChannelKind::NakagamiM, avg_snr)
        }
    }

    pub fn rayleigh(avg_snr: f64) -> Self {
        Self::base(ChannelKind::Rayleigh, avg_snr)
    }

    pub fn nakagami_lognormal(m: f64, zeta_db: f64, avg_snr: f64) -> Self {
        Self {
            m: Some(m),
            zeta_db: Some(zeta_db),
            ..Self::base(ChannelKind::NakagamiLognormal, avg_snr)
        }
    }

    pub fn rayleigh_lognormal(zeta_db: f64, avg_snr: f64) -> Self {
        Self {
            zeta_db: Some(zeta_db),
            ..Self::base(ChannelKind::RayleighLognormal, avg_snr)
        }
    }

    pub fn kappa_mu(kappa: f64, mu: f64, avg_snr: f64) -> Self {
        Self {
            kappa: Some(kappa),
            mu: Some(mu),
            ..Self::base(ChannelKind::KappaMu, avg_snr)
        }
    }

    /// Format-1 eta; use [`ChannelSpec::with_eta_format`] for format 2.
    pub fn eta_mu(eta: f64, mu: f64, avg_snr: f64) -> Self {
        Self {
            eta: Some(eta),
            mu: Some(mu),
            ..Self::base(ChannelKind::EtaMu, avg_snr)
        }
    }

    pub fn kappa_mu_shadowed(kappa: f64, mu: f64, m: f64, avg_snr: f64) -> Self {
        Self {
            kappa: Some(kappa),
            mu: Some(mu),
            m: Some(m),
            ..Self::base(ChannelKind::KappaMuShadowed, avg_snr)
        }
    }

    pub fn with_mean_db(mut self, mean_db: f64) -> Self {
        self.mean_db = Some(mean_db);
        self
    }

    pub fn with_eta_format(mut self, eta_format: u8) -> Self {
        self.eta_format = Some(eta_format);
        self
    }

    fn req(&self, name: &str) -> Result<f64> {
        let v = match name {
            "m" => self.m,
            "zeta_db" => self.zeta_db,
            "kappa" => self.kappa,
            "mu" => self.mu,
            "eta" => self.eta,
            _ => unreachable!("unknown field {name}"),
        };
        v.ok_or_else(|| {
            Error::Validation(format!(
                "{:?}: required field `{name}` is missing",
                self.kind
            ))
        })
    }

    /// Strict parameter validation; no clamping. On success returns one
    /// warning per field that is set but meaningless for `kind` (such
    /// fields are ignored everywhere else).
    pub fn validate(&self) -> Result<Vec<String>> {
        use ChannelKind::*;
        if !self.avg_snr.is_finite() || self.avg_snr <= 0.0 {
            return Err(Error::Validation(format!(
                "avg_snr must be positive and finite, got {}",
                self.avg_snr
            )));
        }
        for (name, v) in [
            ("m", self.m),
            ("zeta_db", self.zeta_db),
            ("mean_db", self.mean_db),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("eta", self.eta),
        ] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::Validation(format!(
                        "{:?}: field `{name}` must be finite, got {x}",
                        self.kind
                    )));
                }
            }
        }

        let need_m = |m: f64| -> Result<()> {
            if m < 0.5 {
                return Err(Error::Validation(format!(
                    "{:?}: m must be >= 0.5, got {m}",
                    self.kind
                )));
            }
            Ok(())
        };
        let need_zeta = |z: f64| -> Result<()> {
            if z <= 0.0 {
                return Err(Error::Validation(format!(
                    "{:?}: zeta_db must be > 0, got {z}",
                    self.kind
                )));
            }
            Ok(())
        };
        let need_kappa = |k: f64| -> Result<()> {
            if k < 0.0 {
                return Err(Error::Validation(format!(
                    "{:?}: kappa must be >= 0, got {k}",
                    self.kind
                )));
            }
            Ok(())
        };
        let need_mu = |mu: f64| -> Result<()> {
            if mu <= 0.0 {
                return Err(Error::Validation(format!(
                    "{:?}: mu must be > 0, got {mu}",
                    self.kind
                )));
            }
            Ok(())
        };

        match self.kind {
            NakagamiLognormal => {
                need_m(self.req("m")?)?;
                need_zeta(self.req("zeta_db")?)?;
            }
            RayleighLognormal => need_zeta(self.req("zeta_db")?)?,
            KappaMu => {
                need_kappa(self.req("kappa")?)?;
                need_mu(self.req("mu")?)?;
            }
            EtaMu => {
                need_mu(self.req("mu")?)?;
                let eta = self.req("eta")?;
                match self.eta_format.unwrap_or(1) {
                    1 => {
                        if eta <= 0.0 {
                            return Err(Error::Validation(format!(
                                "EtaMu: format-1 eta must lie in (0, inf), got {eta}"
                            )));
                        }
                    }
                    2 => {
                        if eta <= -1.0 || eta >= 1.0 {
                            return Err(Error::Validation(format!(
                                "EtaMu: format-2 eta must lie in (-1, 1), got {eta}"
                            )));
                        }
                    }
                    f => {
                        return Err(Error::Validation(format!(
                            "EtaMu: eta_format must be 1 or 2, got {f}"
                        )))
                    }
                }
            }
            KappaMuShadowed => {
                need_kappa(self.req("kappa")?)?;
                need_mu(self.req("mu")?)?;
                need_m(self.req("m")?)?;
            }
            NakagamiM => need_m(self.req("m")?)?,
            Rayleigh => {}
        }

        let used: &[&str] = match self.kind {
            NakagamiLognormal => &["m", "zeta_db", "mean_db"],
            RayleighLognormal => &["zeta_db", "mean_db"],
            KappaMu => &["kappa", "mu"],
            EtaMu => &["eta", "eta_format", "mu"],
            KappaMuShadowed => &["kappa", "mu", "m"],
            NakagamiM => &["m"],
            Rayleigh => &[],
        };
        let mut warnings = Vec::new();
        for (name, present) in [
            ("m", self.m.is_some()),
            ("zeta_db", self.zeta_db.is_some()),
            ("mean_db", self.mean_db.is_some()),
            ("kappa", self.kappa.is_some()),
            ("mu", self.mu.is_some()),
            ("eta", self.eta.is_some()),
            ("eta_format", self.eta_format.is_some()),
        ] {
            if present && !used.contains(&name) {
                warnings.push(format!(
                    "{:?}: field `{name}` is not used by this kind and was ignored",
                    self.kind
                ));
            }
        }
        Ok(warnings)
    }

    /// Canonical evaluation parameters. Degenerate limits collapse here so
    /// the density and sampler code never meet them: exact κ = 0 and
    /// balanced η become plain Nakagami, format-2 η becomes (h, H), and
    /// mirrored η > 1 folds onto H ≥ 0.
    pub(crate) fn params(&self) -> Result<Params> {
        use ChannelKind::*;
        self.validate()?;
        Ok(match self.kind {
            NakagamiM => Params::Nakagami { m: self.m.unwrap() },
            Rayleigh => Params::Nakagami { m: 1.0 },
            NakagamiLognormal | RayleighLognormal => {
                let m = if self.kind == RayleighLognormal {
                    1.0
                } else {
                    self.m.unwrap()
                };
                // The shadow multiplies the conditional power. zeta_db is
                // its spread on the 20·log₁₀ scale of that multiplier
                // (log-power sigma LAMBDA·zeta/2), while mean_db offsets
                // log-power by LAMBDA·mean, i.e. scales the envelope by
                // 10^(mean/20).
                Params::Lognormal {
                    m,
                    ln_mean: LAMBDA * self.mean_db.unwrap_or(0.0),
                    ln_std: 0.5 * LAMBDA * self.zeta_db.unwrap(),
                }
            }
            KappaMu => {
                let (kappa, mu) = (self.kappa.unwrap(), self.mu.unwrap());
                if kappa == 0.0 {
                    // Exact degenerate limit; dodges the 0/0 of the κ
                    // prefactor against the Bessel series.
                    Params::Nakagami { m: mu }
                } else {
                    Params::KappaMu { kappa, mu }
                }
            }
            EtaMu => {
                let eta = self.eta.unwrap();
                let mu = self.mu.unwrap();
                let (h, hh) = match self.eta_format.unwrap_or(1) {
                    1 => ((2.0 + eta.recip() + eta) / 4.0, (eta.recip() - eta) / 4.0),
                    _ => (1.0 / (1.0 - eta * eta), eta / (1.0 - eta * eta)),
                };
                // The density depends on H only through H², so mirror-image
                // parameterizations fold onto H ≥ 0.
                let hh = hh.abs();
                if hh == 0.0 {
                    // Balanced in-phase/quadrature power: plain Nakagami
                    // with doubled shape.
                    Params::Nakagami { m: 2.0 * mu }
                } else {
                    Params::EtaMu { mu, h, hh }
                }
            }
            KappaMuShadowed => Params::Shadowed {
                kappa: self.kappa.unwrap(),
                mu: self.mu.unwrap(),
                m: self.m.unwrap(),
            },
        })
    }
}

/// Internal canonical form; see [`ChannelSpec::params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Params {
    Nakagami { m: f64 },
    Lognormal { m: f64, ln_mean: f64, ln_std: f64 },
    KappaMu { kappa: f64, mu: f64 },
    EtaMu { mu: f64, h: f64, hh: f64 },
    Shadowed { kappa: f64, mu: f64, m: f64 },
}

/// Maps eta between the two parameterizations. The map x ↦ (1−x)/(1+x) is
/// its own inverse; boundary values have no image and are rejected.
pub fn convert_eta_format(eta: f64, from_format: u8) -> Result<f64> {
    match from_format {
        1 => {
            if !eta.is_finite() || eta <= 0.0 {
                return Err(Error::Domain(format!(
                    "format-1 eta must lie in (0, inf), got {eta}"
                )));
            }
        }
        2 => {
            if !(eta > -1.0 && eta < 1.0) {
                return Err(Error::Domain(format!(
                    "format-2 eta must lie in (-1, 1), got {eta}"
                )));
            }
        }
        f => {
            return Err(Error::Domain(format!(
                "eta format must be 1 or 2, got {f}"
            )))
        }
    }
    Ok((1.0 - eta) / (1.0 + eta))
}

/// κ–μ Shadowed spec that reproduces an η–μ channel (format-1 eta) when its
/// shadowing severity `m_large` equals the η–μ `mu`: κ = (1−η)/(2η) and the
/// cluster number doubles. Requires eta in (0, 1]; larger eta would demand
/// a negative dominant-power ratio, which the shadowed model cannot carry.
pub fn shadowed_reduction_spec(eta: f64, mu: f64, m_large: f64, avg_snr: f64) -> Result<ChannelSpec> {
    if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
        return Err(Error::Domain(format!(
            "shadowed reduction needs eta in (0, 1], got {eta}"
        )));
    }
    let spec = ChannelSpec::kappa_mu_shadowed((1.0 - eta) / (2.0 * eta), 2.0 * mu, m_large, avg_snr);
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_kinds_collapse_to_nakagami() {
        let p = ChannelSpec::rayleigh(2.0).params().unwrap();
        assert_eq!(p, Params::Nakagami { m: 1.0 });
        let p = ChannelSpec::kappa_mu(0.0, 1.75, 1.0).params().unwrap();
        assert_eq!(p, Params::Nakagami { m: 1.75 });
        let p = ChannelSpec::eta_mu(1.0, 1.25, 1.0).params().unwrap();
        assert_eq!(p, Params::Nakagami { m: 2.5 });
        // Format-2 eta = 0 is the same balanced channel.
        let p = ChannelSpec::eta_mu(0.0, 1.25, 1.0)
            .with_eta_format(2)
            .params()
            .unwrap();
        assert_eq!(p, Params::Nakagami { m: 2.5 });
    }

    #[test]
    fn mirrored_eta_gives_identical_params() {
        let a = ChannelSpec::eta_mu(4.0, 0.8, 1.0).params().unwrap();
        let b = ChannelSpec::eta_mu(0.25, 0.8, 1.0).params().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unused_fields_warn_but_pass() {
        let mut spec = ChannelSpec::rayleigh(1.0);
        spec.m = Some(3.0);
        spec.kappa = Some(0.5);
        let warnings = spec.validate().unwrap();
        assert_eq!(warnings.len(), 2);
        assert!(warnings[0].contains("`m`"));
        assert!(warnings[1].contains("`kappa`"));
    }

    #[test]
    fn strict_validation_rejects_bad_parameters() {
        assert!(ChannelSpec::nakagami_m(0.4, 1.0).validate().is_err());
        assert!(ChannelSpec::nakagami_m(1.0, 0.0).validate().is_err());
        assert!(ChannelSpec::nakagami_m(1.0, f64::NAN).validate().is_err());
        assert!(ChannelSpec::kappa_mu(-0.1, 1.0, 1.0).validate().is_err());
        assert!(ChannelSpec::kappa_mu(1.0, 0.0, 1.0).validate().is_err());
        assert!(ChannelSpec::eta_mu(0.0, 1.0, 1.0).validate().is_err());
        assert!(ChannelSpec::eta_mu(1.0, 1.0, 1.0)
            .with_eta_format(2)
            .validate()
            .is_err());
        assert!(ChannelSpec::eta_mu(0.5, 1.0, 1.0)
            .with_eta_format(3)
            .validate()
            .is_err());
        assert!(ChannelSpec::rayleigh_lognormal(0.0, 1.0).validate().is_err());
        // Missing required field.
        let spec = ChannelSpec::base(ChannelKind::KappaMu, 1.0);
        assert!(matches!(spec.validate(), Err(Error::Validation(msg)) if msg.contains("kappa")));
    }
}
