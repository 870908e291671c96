//! Envelope sampling for every channel kind.

use super::Params;
use crate::channels::ChannelSpec;
use crate::error::Result;
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};

/// Samples are laid out in fixed-size chunks, each drawn from its own
/// hashed RNG stream, so any prefix of a longer run reproduces exactly and
/// chunks may be generated concurrently without changing the output.
const CHUNK: usize = 1 << 16;

/// Draws n i.i.d. envelope amplitudes; bit-identical for a fixed
/// (spec, n, seed) regardless of how the work is split.
pub fn sample_envelope(spec: &ChannelSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    let p = spec.params()?;
    let mut out = Vec::with_capacity(n);
    let mut chunk = 0u64;
    while out.len() < n {
        let len = CHUNK.min(n - out.len());
        let mut rng = stream_rng(seed, chunk);
        fill_chunk(&p, &mut rng, len, &mut out);
        chunk += 1;
    }
    Ok(out)
}

fn fill_chunk<R: Rng>(p: &Params, rng: &mut R, len: usize, out: &mut Vec<f64>) {
    match *p {
        Params::Nakagami { m } => {
            let g = Gamma::new(m, 1.0 / m).expect("validated shape");
            out.extend((0..len).map(|_| g.sample(rng).sqrt()));
        }
        Params::Lognormal { m, ln_mean, ln_std } => {
            let g = Gamma::new(m, 1.0 / m).expect("validated shape");
            let t = Normal::new(ln_mean, ln_std).expect("validated spread");
            out.extend((0..len).map(|_| (g.sample(rng) * t.sample(rng).exp()).sqrt()));
        }
        Params::KappaMu { kappa, mu } => {
            // Noncentral power realized as a Poisson-mixed Gamma so
            // non-integer cluster numbers work.
            let pois = Poisson::new(mu * kappa).expect("validated rate");
            let scale = 1.0 / (mu * (1.0 + kappa));
            out.extend((0..len).map(|_| {
                let extra = pois.sample(rng);
                let g = Gamma::new(mu + extra, scale).expect("positive shape");
                g.sample(rng).sqrt()
            }));
        }
        Params::EtaMu { mu, h, hh } => {
            // Independent in-phase and quadrature cluster powers.
            let gx = Gamma::new(mu, 1.0 / (2.0 * mu * (h + hh))).expect("validated shape");
            let gy = Gamma::new(mu, 1.0 / (2.0 * mu * (h - hh))).expect("validated shape");
            out.extend((0..len).map(|_| (gx.sample(rng) + gy.sample(rng)).sqrt()));
        }
        Params::Shadowed { kappa, mu, m } => {
            // Dominant power fluctuates with a unit-mean Gamma draw before
            // the conditional noncentral draw.
            let shadow = Gamma::new(m, 1.0 / m).expect("validated shape");
            let scale = 1.0 / (mu * (1.0 + kappa));
            out.extend((0..len).map(|_| {
                let rate = mu * kappa * shadow.sample(rng);
                let extra = if rate > 0.0 {
                    Poisson::new(rate).expect("finite rate").sample(rng)
                } else {
                    0.0
                };
                let g = Gamma::new(mu + extra, scale).expect("positive shape");
                g.sample(rng).sqrt()
            }));
        }
    }
}
