//! Mixture-of-Gaussians models for wireless fading envelopes.
//!
//! The crate fits Gaussian mixtures to fading-envelope densities with
//! expectation-maximization and BIC model selection, then evaluates link
//! metrics in closed form for the fitted model: MGF, raw moments, amount of
//! fading, outage probability, ergodic capacity, symbol error rates for
//! coherent modulations, and energy-detection probabilities. Seeded Monte
//! Carlo counterparts of each metric live in [`sim`] so every analytic
//! result can be cross-checked.

pub mod channels;
pub mod error;
pub mod job;
pub mod metrics;
pub mod mog;
pub mod policy;
pub mod quad;
pub mod report;
mod rng;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
pub use policy::SeriesPolicy;
