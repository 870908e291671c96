//! Performance metrics over a fitted mixture: MGF, moments, outage,
//! capacity, symbol error rates, and energy-detection probabilities.
//!
//! Everything here consumes a [`MoGModel`](crate::mog::MoGModel) and returns
//! closed-form (or truncated-series) values. Probabilities are returned raw,
//! never clamped, so cross-checks against oracles see the actual computed
//! number; clamping is the caller's reporting concern.

mod detection;
mod mgf;
mod moments;
mod ser;

pub use detection::{
    avg_pd_series, avg_pd_series_renormalized, awgn_pd, false_alarm_prob, pd_truncation_bound,
    pd_truncation_bound_printed, roc_curve, threshold_from_pf, DetectorSpec, DEFAULT_TRUNCATION_P,
};
pub use mgf::{mgf, mrc_mgf};
pub use moments::{
    amount_of_fading, ergodic_capacity, outage_probability, raw_moment, raw_moment_via_mgf,
};
pub use ser::{ser, SerScheme};
