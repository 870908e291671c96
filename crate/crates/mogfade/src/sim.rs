//! Monte Carlo estimation of outage, SER, capacity, and detection
//! probability from channel or mixture samples, for validating the
//! closed-form metrics.
//!
//! Work is split into fixed-size chunks, each drawn from its own hashed RNG
//! stream and reduced in chunk order, so a given [`SimConfig`] produces
//! bit-identical estimates no matter how many worker threads run
//! (`MOGFADE_THREADS` caps the count; the machine's parallelism is the
//! default). SER is estimated semi-analytically: the conditional error
//! probability is averaged over SNR draws instead of simulating symbols,
//! which validates the same expectation at a fraction of the variance.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channels::{sample_envelope, ChannelSpec};
use crate::error::{Error, Result};
use crate::metrics::{DetectorSpec, SerScheme};
use crate::mog::MoGModel;
use crate::policy::SeriesPolicy;
use crate::quad;
use crate::rng::{stream_key, stream_rng};
use crate::special::{gaussian_q, marcum_q};

/// Node count for the per-sample conditional-SER angle integral (MPSK).
const CRAIG_NODES: usize = 64;

/// Where SNR draws come from: an exact channel law or a fitted mixture.
/// Mixture draws are the half-line restriction of the Gaussian mixture
/// (negative amplitudes rejected), i.e. the mixture renormalized by its
/// [`MoGModel::normalization_mass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Channel(ChannelSpec),
    Model(MoGModel),
}

impl SampleSource {
    pub fn avg_snr(&self) -> f64 {
        match self {
            SampleSource::Channel(spec) => spec.avg_snr,
            SampleSource::Model(model) => model.avg_snr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub source: SampleSource,
    pub seed: u64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
}

fn default_n_samples() -> usize {
    1_000_000
}

fn default_chunk_size() -> usize {
    1 << 16
}

impl SimConfig {
    pub fn new(source: SampleSource, seed: u64) -> Self {
        SimConfig {
            source,
            seed,
            n_samples: default_n_samples(),
            chunk_size: default_chunk_size(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::Validation(format!(
                "n_samples must be at least 1000, got {}",
                self.n_samples
            )));
        }
        if self.chunk_size == 0 {
            return Err(Error::Validation("chunk_size must be positive".into()));
        }
        if let SampleSource::Channel(spec) = &self.source {
            spec.validate()?;
        }
        Ok(())
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// P[γ < γ_th] per threshold, with binomial standard errors. The grid must
/// be finite, non-negative, and strictly increasing.
pub fn empirical_outage(cfg: &SimConfig, gamma_th_grid: &[f64]) -> Result<Vec<Estimate>> {
    validate_grid(gamma_th_grid)?;
    let counts = run_chunks(
        cfg,
        1,
        || vec![0u64; gamma_th_grid.len()],
        |snr, acc| {
            for (slot, &th) in acc.iter_mut().zip(gamma_th_grid) {
                if snr[0] < th {
                    *slot += 1;
                }
            }
        },
    )?;
    let n = cfg.n_samples as f64;
    Ok(counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            Estimate {
                value: p,
                std_err: (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect())
}

/// Mean conditional symbol-error probability over `branches`-fold MRC SNR
/// draws (branch SNRs are summed per sample).
pub fn empirical_ser(cfg: &SimConfig, branches: usize, scheme: &SerScheme) -> Result<Estimate> {
    if branches == 0 {
        return Err(Error::Validation("empirical_ser needs branches >= 1".into()));
    }
    let conditional = conditional_ser(scheme)?;
    let sums = run_chunks(
        cfg,
        branches,
        || (0.0, 0.0),
        |snr, acc| {
            let total: f64 = snr.iter().sum();
            let pe = conditional(total);
            acc.0 += pe;
            acc.1 += pe * pe;
        },
    )?;
    Ok(mean_estimate(sums, cfg.n_samples))
}

/// Sample mean of log₂(1 + γ) in bits/s/Hz.
pub fn empirical_capacity(cfg: &SimConfig) -> Result<Estimate> {
    let sums = run_chunks(
        cfg,
        1,
        || (0.0, 0.0),
        |snr, acc| {
            let c = snr[0].ln_1p() / std::f64::consts::LN_2;
            acc.0 += c;
            acc.1 += c * c;
        },
    )?;
    Ok(mean_estimate(sums, cfg.n_samples))
}

/// Sample mean of the AWGN detection probability Q_u(√(2γ), √λ) over SNR
/// draws.
pub fn empirical_pd(cfg: &SimConfig, det: &DetectorSpec) -> Result<Estimate> {
    let lambda = det.resolve_lambda()?;
    let sqrt_lambda = lambda.sqrt();
    let policy = SeriesPolicy::default().with_max_terms(100_000);
    let failed: Mutex<Option<Error>> = Mutex::new(None);
    let sums = run_chunks(
        cfg,
        1,
        || (0.0, 0.0),
        |snr, acc| match marcum_q(det.u, (2.0 * snr[0]).sqrt(), sqrt_lambda, &policy) {
            Ok(pd) => {
                acc.0 += pd;
                acc.1 += pd * pd;
            }
            Err(e) => {
                let mut slot = failed.lock().expect("error slot poisoned");
                slot.get_or_insert(e);
            }
        },
    )?;
    if let Some(e) = failed.into_inner().expect("error slot poisoned") {
        return Err(e);
    }
    Ok(mean_estimate(sums, cfg.n_samples))
}

fn mean_estimate((sum, sumsq): (f64, f64), n: usize) -> Estimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Estimate {
        value: mean,
        std_err: (var / nf).sqrt(),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("threshold grid must be non-empty".into()));
    }
    for (k, &g) in grid.iter().enumerate() {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Validation(format!(
                "thresholds must be finite and >= 0, got {g}"
            )));
        }
        if k > 0 && g <= grid[k - 1] {
            return Err(Error::Validation(
                "threshold grid must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// Conditional symbol-error probability at a given instantaneous SNR.
fn conditional_ser(scheme: &SerScheme) -> Result<Box<dyn Fn(f64) -> f64 + Sync>> {
    scheme.validate()?;
    Ok(match *scheme {
        SerScheme::CoherentBinary { g } => {
            Box::new(move |snr| gaussian_q((2.0 * g * snr).sqrt()))
        }
        SerScheme::Mpsk { m } => {
            let g = (PI / m as f64).sin().powi(2);
            let half = 0.5 * (m - 1) as f64 * PI / m as f64;
            let rule = quad::gauss_legendre_cached(CRAIG_NODES);
            Box::new(move |snr| {
                let mut acc = 0.0;
                for &(x, w) in rule {
                    let s = half.mul_add(x, half).sin();
                    acc += w * (-g * snr / (s * s)).exp();
                }
                acc * half / PI
            })
        }
        SerScheme::SquareMqam { m } => {
            let q = 1.0 - 1.0 / (m as f64).sqrt();
            let g = 1.5 / (m as f64 - 1.0);
            Box::new(move |snr| {
                let tail = gaussian_q((2.0 * g * snr).sqrt());
                4.0 * q * tail * (1.0 - q * tail)
            })
        }
    })
}

/// Runs `accumulate` over every sample's `branches` SNR draws, one fresh
/// accumulator per chunk, and folds the per-chunk accumulators in chunk
/// order. Chunk k's branch b draws from hashed stream k·branches + b, so
/// the result is a pure function of (cfg, branches) and in particular does
/// not depend on the worker count.
fn run_chunks<T, I, F>(cfg: &SimConfig, branches: usize, init: I, accumulate: F) -> Result<T>
where
    T: Merge + Send,
    I: Fn() -> T + Sync,
    F: Fn(&[f64], &mut T) + Sync,
{
    cfg.validate()?;
    let chunks: Vec<(u64, usize)> = {
        let mut v = Vec::new();
        let (mut done, mut k) = (0usize, 0u64);
        while done < cfg.n_samples {
            let len = cfg.chunk_size.min(cfg.n_samples - done);
            v.push((k, len));
            done += len;
            k += 1;
        }
        v
    };
    let run_one = |&(k, len): &(u64, usize)| -> Result<T> {
        let mut draws = Vec::with_capacity(branches);
        for b in 0..branches {
            draws.push(sample_snr_chunk(
                &cfg.source,
                cfg.seed,
                k * branches as u64 + b as u64,
                len,
            )?);
        }
        let mut acc = init();
        let mut snr = vec![0.0; branches];
        for i in 0..len {
            for b in 0..branches {
                snr[b] = draws[b][i];
            }
            accumulate(&snr, &mut acc);
        }
        Ok(acc)
    };

    let workers = worker_count().min(chunks.len()).max(1);
    let partials: Vec<Result<T>> = if workers == 1 {
        chunks.iter().map(run_one).collect()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<T>>>> =
            chunks.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunks.len() {
                        break;
                    }
                    let r = run_one(&chunks[i]);
                    *slots[i].lock().expect("chunk slot poisoned") = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| {
                m.into_inner()
                    .expect("chunk slot poisoned")
                    .expect("worker filled slot")
            })
            .collect()
    };

    let mut iter = partials.into_iter();
    let mut total = iter.next().expect("n_samples >= 1000 yields a chunk")?;
    for partial in iter {
        total.merge(partial?);
    }
    Ok(total)
}

fn worker_count() -> usize {
    if let Ok(raw) = std::env::var("MOGFADE_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// One chunk of SNR draws γ = γ̄·x² from the given stream.
fn sample_snr_chunk(
    source: &SampleSource,
    seed: u64,
    stream: u64,
    len: usize,
) -> Result<Vec<f64>> {
    match source {
        SampleSource::Channel(spec) => {
            let mut draws = sample_envelope(spec, len, stream_key(seed, stream))?;
            for x in &mut draws {
                *x = spec.avg_snr * *x * *x;
            }
            Ok(draws)
        }
        SampleSource::Model(model) => {
            let mut rng = stream_rng(seed, stream);
            let kernels: Vec<Normal<f64>> = model
                .means()
                .iter()
                .zip(model.stds())
                .map(|(&mu, &eta)| Normal::new(mu, eta).expect("model stds positive"))
                .collect();
            let weights = model.weights();
            let gbar = model.avg_snr();
            let mut out = Vec::with_capacity(len);
            while out.len() < len {
                let mut u: f64 = rng.random();
                let mut j = 0;
                while j + 1 < weights.len() {
                    if u < weights[j] {
                        break;
                    }
                    u -= weights[j];
                    j += 1;
                }
                let x = kernels[j].sample(&mut rng);
                if x >= 0.0 {
                    out.push(gbar * x * x);
                }
            }
            Ok(out)
        }
    }
}

/// Chunk-order reduction of per-chunk accumulators.
trait Merge {
    fn merge(&mut self, other: Self);
}

impl Merge for (f64, f64) {
    fn merge(&mut self, other: Self) {
        self.0 += other.0;
        self.1 += other.1;
    }
}

impl Merge for Vec<u64> {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}
