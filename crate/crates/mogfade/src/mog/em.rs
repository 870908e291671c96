use super::{select::bic_score, MoGModel};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// Convergence threshold on the per-sample mean log-likelihood.
    pub delta: f64,
    pub max_iters: usize,
    /// Independent initializations; the best final likelihood wins.
    pub restarts: usize,
    /// Width floor as a fraction of the sample standard deviation, applied
    /// after every variance update. Keeps a component from collapsing onto
    /// a single sample.
    pub min_std: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            delta: 1e-6,
            max_iters: 1000,
            restarts: 5,
            min_std: 1e-6,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Validation(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Validation("restarts must be >= 1".into()));
        }
        if !(self.min_std > 0.0 && self.min_std.is_finite()) {
            return Err(Error::Validation(format!(
                "min_std must be > 0, got {}",
                self.min_std
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    /// Mean log-likelihood of the parameters entering each iteration; the
    /// last entry belongs to the returned model.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub bic: f64,
    pub n_samples: usize,
}

struct State {
    w: Vec<f64>,
    mu: Vec<f64>,
    eta: Vec<f64>,
}

/// Sorted copy plus population std, with the degeneracy checks both fit
/// entry points share.
fn checked_stats(samples: &[f64], c: usize) -> Result<(Vec<f64>, f64)> {
    if c == 0 {
        return Err(Error::Validation("component count must be >= 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::DegenerateData("no samples".into()));
    }
    for &x in samples {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Validation(format!(
                "samples must be finite and >= 0, got {x}"
            )));
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if distinct < c {
        return Err(Error::DegenerateData(format!(
            "{c} components need {c} distinct sample values, have {distinct}"
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::DegenerateData("samples have zero variance".into()));
    }
    Ok((sorted, std))
}

/// Maximum-likelihood mixture fit of envelope samples by EM, best of
/// `config.restarts` initializations. The returned model carries unit mean
/// SNR; re-tag it with [`MoGModel::with_avg_snr`] for SNR-domain use.
pub fn em_fit(samples: &[f64], c: usize, config: &FitConfig) -> Result<(MoGModel, FitReport)> {
    config.validate()?;
    let (sorted, std) = checked_stats(samples, c)?;
    let n = samples.len();
    let floor = config.min_std * std;

    let mut best: Option<(State, Vec<f64>, bool)> = None;
    for restart in 0..config.restarts {
        let init = init_state(&sorted, c, std, floor, config.seed, restart as u64);
        let (state, trace, converged) = run_em(samples, init, config, std, floor);
        let better = match &best {
            None => true,
            Some((_, t, _)) => trace.last() > t.last(),
        };
        if better {
            best = Some((state, trace, converged));
        }
    }

    let (state, trace, converged) = best.unwrap();
    let total_loglik = trace.last().unwrap() * n as f64;
    let report = FitReport {
        iterations: trace.len(),
        converged,
        bic: bic_score(total_loglik, c, n),
        n_samples: n,
        loglik_trace: trace,
    };
    let model = MoGModel::new(state.w, state.mu, state.eta, 1.0)?;
    Ok((model, report))
}

/// Single EM run warm-started from an existing model, no restarts. Polishes
/// published parameter sets and backs the fixed-point check: refining an
/// already converged fit moves the per-sample log-likelihood by less than
/// `config.delta`. Keeps the initializer's avg_snr.
pub fn em_refine(
    samples: &[f64],
    init: &MoGModel,
    config: &FitConfig,
) -> Result<(MoGModel, FitReport)> {
    config.validate()?;
    let c = init.components();
    let (_, std) = checked_stats(samples, c)?;
    let n = samples.len();
    let floor = config.min_std * std;
    let state = State {
        w: init.weights().to_vec(),
        mu: init.means().to_vec(),
        eta: init.stds().to_vec(),
    };
    let (state, trace, converged) = run_em(samples, state, config, std, floor);
    let total_loglik = trace.last().unwrap() * n as f64;
    let report = FitReport {
        iterations: trace.len(),
        converged,
        bic: bic_score(total_loglik, c, n),
        n_samples: n,
        loglik_trace: trace,
    };
    let model = MoGModel::new(state.w, state.mu, state.eta, init.avg_snr())?;
    Ok((model, report))
}

/// Deterministic symmetry-breaking start: means on the sample quantiles at
/// levels (j − ½)/C, widths at std/C, uniform weights. Restarts past the
/// first jitter the means by ±10% of the sample std under their own
/// sub-seed.
fn init_state(sorted: &[f64], c: usize, std: f64, floor: f64, seed: u64, restart: u64) -> State {
    let n = sorted.len();
    let mut mu: Vec<f64> = (0..c)
        .map(|j| {
            let q = (j as f64 + 0.5) / c as f64;
            sorted[((q * n as f64) as usize).min(n - 1)]
        })
        .collect();
    if restart > 0 {
        let mut rng = stream_rng(seed, restart);
        for m in &mut mu {
            *m += std * rng.random_range(-0.1..0.1);
        }
    }
    State {
        w: vec![1.0 / c as f64; c],
        mu,
        eta: vec![(std / c as f64).max(floor); c],
    }
}

fn run_em(
    samples: &[f64],
    mut state: State,
    config: &FitConfig,
    std: f64,
    floor: f64,
) -> (State, Vec<f64>, bool) {
    let c = state.w.len();
    let n = samples.len();
    let nf = n as f64;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();

    let mut pre = vec![0.0; c];
    let mut inv = vec![0.0; c];
    let mut lbuf = vec![0.0; c];
    let mut nj = vec![0.0; c];
    let mut sj = vec![0.0; c];
    let mut qj = vec![0.0; c];

    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev = f64::INFINITY;

    for it in 0..config.max_iters {
        for j in 0..c {
            inv[j] = 1.0 / state.eta[j];
            pre[j] = state.w[j].ln() - state.eta[j].ln() - 0.5 * ln_2pi;
            nj[j] = 0.0;
            sj[j] = 0.0;
            qj[j] = 0.0;
        }

        // Fused pass: log-sum-exp likelihood and the responsibility-weighted
        // moment accumulators in one sweep.
        let mut total = 0.0;
        let mut worst = (f64::INFINITY, 0.0);
        for &x in samples {
            let mut lmax = f64::NEG_INFINITY;
            for j in 0..c {
                let z = (x - state.mu[j]) * inv[j];
                let l = pre[j] - 0.5 * z * z;
                lbuf[j] = l;
                if l > lmax {
                    lmax = l;
                }
            }
            let mut se = 0.0;
            for j in 0..c {
                lbuf[j] = (lbuf[j] - lmax).exp();
                se += lbuf[j];
            }
            let lse = lmax + se.ln();
            total += lse;
            if lse < worst.0 {
                worst = (lse, x);
            }
            let inv_se = 1.0 / se;
            for j in 0..c {
                let r = lbuf[j] * inv_se;
                nj[j] += r;
                sj[j] += r * x;
                qj[j] += r * x * x;
            }
        }

        let ll = total / nf;
        trace.push(ll);
        if (ll - prev).abs() < config.delta {
            converged = true;
            break;
        }
        prev = ll;
        if it + 1 == config.max_iters {
            // Keep the parameters the last trace entry measured.
            break;
        }

        let mut wsum = 0.0;
        for j in 0..c {
            if nj[j] < 1e-10 * nf {
                // Starved component: plant it on the sample the mixture
                // explains worst so C stays fixed.
                state.w[j] = 1.0 / nf;
                state.mu[j] = worst.1;
                state.eta[j] = (std / c as f64).max(floor);
            } else {
                state.w[j] = nj[j] / nf;
                let m = sj[j] / nj[j];
                state.mu[j] = m;
                let var = (qj[j] / nj[j] - m * m).max(floor * floor);
                state.eta[j] = var.sqrt();
            }
            wsum += state.w[j];
        }
        for w in &mut state.w {
            *w /= wsum;
        }
    }

    (state, trace, converged)
}
