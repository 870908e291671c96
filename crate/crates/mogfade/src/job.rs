//! Config-driven batch jobs behind the `mogfade` binary: one JSON document
//! describes the channel, fit settings, grids, and output target; the
//! subcommand picks which pipeline to run over it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{sample_envelope, ChannelSpec};
use crate::error::{Error, Result};
use crate::metrics::{
    amount_of_fading, avg_pd_series, ergodic_capacity, mgf, outage_probability, raw_moment,
    raw_moment_via_mgf, roc_curve, ser, threshold_from_pf, DetectorSpec, SerScheme,
    DEFAULT_TRUNCATION_P,
};
use crate::mog::{em_fit, kl_divergence, select_components, BicEntry, FitConfig, FitReport, MoGModel};
use crate::policy::SeriesPolicy;
use crate::quad;
use crate::report::{self, Row};
use crate::sim::{
    empirical_capacity, empirical_outage, empirical_pd, empirical_ser, SampleSource, SimConfig,
};
use crate::special::marcum_q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Fit,
    Select,
    Eval,
    Simulate,
    Roc,
    Validate,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Fit => "fit",
            CommandKind::Select => "select",
            CommandKind::Eval => "eval",
            CommandKind::Simulate => "simulate",
            CommandKind::Roc => "roc",
            CommandKind::Validate => "validate",
        }
    }
}

/// One batch job. Which fields are required depends on `command`; unused
/// fields are rejected only when malformed, not when merely present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: CommandKind,
    /// Labels every CSV row; defaults to the channel kind or "model".
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    /// A model JSON file, either bare or a `fit` artifact; takes precedence
    /// over fitting from `channel`.
    #[serde(default)]
    pub model_path: Option<PathBuf>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    /// Mixture size for `fit`, and for commands that fit implicitly.
    #[serde(default)]
    pub components: Option<usize>,
    /// Candidate range for `select`, inclusive.
    #[serde(default)]
    pub c_range: Option<(usize, usize)>,
    /// Training draws for fitting commands.
    #[serde(default)]
    pub n_train: Option<usize>,
    #[serde(default)]
    pub detector: Option<DetectorSpec>,
    #[serde(default)]
    pub ser_scheme: Option<SerScheme>,
    /// MRC diversity order for SER estimation.
    #[serde(default)]
    pub branches: Option<usize>,
    /// Outage thresholds (linear SNR), strictly increasing.
    #[serde(default)]
    pub thresholds: Option<Vec<f64>>,
    /// Mean-SNR grid in dB, strictly increasing.
    #[serde(default)]
    pub snr_db: Option<Vec<f64>>,
    /// False-alarm grid in (0, 1), strictly increasing.
    #[serde(default)]
    pub pf_points: Option<Vec<f64>>,
    #[serde(default)]
    pub n_samples: Option<usize>,
    #[serde(default)]
    pub chunk_size: Option<usize>,
    /// Seeds sampling and simulation; `--seed` overrides. EM restarts keep
    /// their own seed inside `fit`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub bandwidth: Option<f64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Exit code classes promised by the interface: bad input syntax 2,
/// numerics 3, semantic validation 4. I/O trouble stays at 1.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 2,
        e if e.is_numeric() => 3,
        Error::Validation(_) | Error::InvalidSpec(_) | Error::DegenerateData(_) => 4,
        Error::Io(_) => 1,
        _ => 1,
    }
}

/// Parses and runs one job, returning the artifact path it wrote.
pub fn run_job(config_path: &Path, invoked: CommandKind, ov: &Overrides) -> Result<PathBuf> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| Error::Parse(format!("reading {}: {e}", config_path.display())))?;
    let job: JobConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", config_path.display())))?;
    if job.command != invoked {
        return Err(Error::Validation(format!(
            "config says command {:?} but {} was invoked",
            job.command.as_str(),
            invoked.as_str()
        )));
    }
    let seed = ov.seed.or(job.seed).unwrap_or(0);
    match invoked {
        CommandKind::Fit => run_fit(&job, seed, ov),
        CommandKind::Select => run_select(&job, seed, ov),
        CommandKind::Eval => run_eval(&job, seed, ov),
        CommandKind::Simulate => run_simulate(&job, seed, ov),
        CommandKind::Roc => run_roc(&job, seed, ov),
        CommandKind::Validate => run_validate(&job, seed, ov),
    }
}

fn out_path(job: &JobConfig, ov: &Overrides, default_name: &str) -> PathBuf {
    let base = job
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name));
    match (&ov.out_dir, base.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => base,
    }
}

fn scenario_id(job: &JobConfig) -> String {
    if let Some(s) = &job.scenario {
        return s.clone();
    }
    match (&job.channel, &job.model_path) {
        (Some(spec), _) => serde_json::to_value(spec.kind)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_else(|| "channel".into()),
        (None, Some(_)) => "model".into(),
        _ => "job".into(),
    }
}

fn require_channel(job: &JobConfig) -> Result<&ChannelSpec> {
    let spec = job
        .channel
        .as_ref()
        .ok_or_else(|| Error::Validation("this command needs a channel".into()))?;
    for w in spec.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

fn require_grid(grid: Option<&Vec<f64>>, what: &str, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let grid =
        grid.ok_or_else(|| Error::Validation(format!("this command needs {what}")))?;
    if grid.is_empty() {
        return Err(Error::Validation(format!("{what} must be non-empty")));
    }
    for (k, &g) in grid.iter().enumerate() {
        if !g.is_finite() || g < lo || g > hi {
            return Err(Error::Validation(format!(
                "{what} entries must lie in [{lo}, {hi}], got {g}"
            )));
        }
        if k > 0 && g <= grid[k - 1] {
            return Err(Error::Validation(format!(
                "{what} must be strictly increasing"
            )));
        }
    }
    Ok(grid.clone())
}

fn fit_from_channel(job: &JobConfig, seed: u64) -> Result<(MoGModel, FitReport)> {
    let spec = require_channel(job)?;
    let c = job
        .components
        .ok_or_else(|| Error::Validation("fitting needs `components`".into()))?;
    let n_train = job.n_train.unwrap_or(200_000);
    let samples = sample_envelope(spec, n_train, seed)?;
    let cfg = job.fit.unwrap_or_default();
    let (model, report) = em_fit(&samples, c, &cfg)?;
    Ok((model.with_avg_snr(spec.avg_snr)?, report))
}

/// Model input for the evaluation commands: an explicit file wins, else fit
/// one from the channel.
fn resolve_model(job: &JobConfig, seed: u64) -> Result<MoGModel> {
    match &job.model_path {
        Some(path) => load_model(path),
        None => Ok(fit_from_channel(job, seed)?.0),
    }
}

/// Accepts either a bare model document or a `fit` artifact wrapping one.
pub fn load_model(path: &Path) -> Result<MoGModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let body = if value.get("components").is_some() {
        value
    } else if let Some(inner) = value.get("model") {
        inner.clone()
    } else {
        return Err(Error::Parse(format!(
            "{}: neither a model nor a fit artifact",
            path.display()
        )));
    };
    serde_json::from_value(body).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct FitArtifact<'a> {
    model: &'a MoGModel,
    report: &'a FitReport,
}

fn run_fit(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let (model, report) = fit_from_channel(job, seed)?;
    let path = out_path(job, ov, "model.json");
    report::write_json(
        &path,
        &FitArtifact {
            model: &model,
            report: &report,
        },
    )?;
    Ok(path)
}

#[derive(Serialize)]
struct SelectArtifact<'a> {
    chosen_c: usize,
    model: &'a MoGModel,
    report: &'a FitReport,
    bic_table: &'a [BicEntry],
}

fn run_select(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let spec = require_channel(job)?;
    let (lo, hi) = job.c_range.unwrap_or((1, 8));
    let n_train = job.n_train.unwrap_or(200_000);
    let samples = sample_envelope(spec, n_train, seed)?;
    let cfg = job.fit.unwrap_or_default();
    let (model, report, table) = select_components(&samples, lo..=hi, &cfg)?;
    let path = out_path(job, ov, "select.json");
    report::write_json(
        &path,
        &SelectArtifact {
            chosen_c: model.components(),
            model: &model,
            report: &report,
            bic_table: &table,
        },
    )?;
    Ok(path)
}

fn mixture_phi(model: &MoGModel, x: f64) -> f64 {
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    let mut sum = 0.0;
    for j in 0..model.components() {
        let z = (x - model.means()[j]) / model.stds()[j];
        sum += model.weights()[j] / (norm * model.stds()[j]) * (-0.5 * z * z).exp();
    }
    sum
}

fn outage_quadrature(model: &MoGModel, gamma_th: f64) -> Result<f64> {
    let x_th = (gamma_th / model.avg_snr()).sqrt();
    if x_th == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64| mixture_phi(model, x);
    Ok(quad::integrate(&f, 0.0, x_th, 1e-10, 1e-14, 2000)?.value)
}

/// E[h(γ)] over the raw half-line mixture by quadrature.
fn expectation_quadrature(model: &MoGModel, h: impl Fn(f64) -> f64) -> Result<f64> {
    let gbar = model.avg_snr();
    let f = |x: f64| h(gbar * x * x) * mixture_phi(model, x);
    Ok(quad::integrate_to_inf(&f, 0.0, 1e-10, 1e-14, 2000)?.value)
}

/// Whole-line moment E[(γ̄x²)ⁿ], the measure the closed forms integrate.
fn moment_quadrature(model: &MoGModel, n: u32) -> Result<f64> {
    let gbar = model.avg_snr();
    let f = |x: f64| {
        (gbar * x * x).powi(n as i32) * (mixture_phi(model, x) + mixture_phi(model, -x))
    };
    Ok(quad::integrate_to_inf(&f, 0.0, 1e-10, 1e-14, 2000)?.value)
}

fn pd_quadrature(model: &MoGModel, u: u32, lambda: f64) -> Result<f64> {
    let gbar = model.avg_snr();
    let sqrt_lambda = lambda.sqrt();
    let policy = SeriesPolicy::default().with_max_terms(100_000);
    let failed = std::sync::Mutex::new(None);
    let f = |x: f64| {
        let pdf = mixture_phi(model, x);
        if pdf < 1e-300 {
            return 0.0;
        }
        match marcum_q(u, (2.0 * gbar).sqrt() * x, sqrt_lambda, &policy) {
            Ok(q) => q * pdf,
            Err(e) => {
                failed.lock().expect("oracle slot").get_or_insert(e);
                0.0
            }
        }
    };
    let value = quad::integrate_to_inf(&f, 0.0, 1e-9, 1e-13, 2000)?.value;
    if let Some(e) = failed.into_inner().expect("oracle slot") {
        return Err(e);
    }
    Ok(value)
}

/// Conditional symbol-error probability, for quadrature oracles.
fn conditional_ser_value(scheme: SerScheme, snr: f64) -> f64 {
    use crate::special::gaussian_q;
    match scheme {
        SerScheme::CoherentBinary { g } => gaussian_q((2.0 * g * snr).sqrt()),
        SerScheme::Mpsk { m } => {
            let g = (std::f64::consts::PI / m as f64).sin().powi(2);
            let upper = (m - 1) as f64 * std::f64::consts::PI / m as f64;
            let f = |theta: f64| {
                let s = theta.sin();
                (-g * snr / (s * s)).exp()
            };
            quad::fixed(&f, 0.0, upper, 64) / std::f64::consts::PI
        }
        SerScheme::SquareMqam { m } => {
            let q = 1.0 - 1.0 / (m as f64).sqrt();
            let tail = gaussian_q((3.0 / (m as f64 - 1.0) * snr).sqrt());
            4.0 * q * tail * (1.0 - q * tail)
        }
    }
}

fn run_eval(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let base = resolve_model(job, seed)?;
    let id = scenario_id(job);
    let bandwidth = job.bandwidth.unwrap_or(1.0);
    let mut rows = Vec::new();

    if let Some(grid) = &job.thresholds {
        for &th in &require_grid(Some(grid), "thresholds", 0.0, f64::INFINITY)? {
            rows.push(Row {
                scenario: id.clone(),
                metric: "outage".into(),
                abscissa: th,
                analytic: Some(outage_probability(&base, th)?),
                oracle: Some(outage_quadrature(&base, th)?),
                std_err: None,
            });
        }
    }

    if let Some(grid) = &job.snr_db {
        let grid = require_grid(Some(grid), "snr_db", f64::NEG_INFINITY, f64::INFINITY)?;
        for &db in &grid {
            let model = base.clone().with_avg_snr(10f64.powf(db / 10.0))?;
            let oracle =
                expectation_quadrature(&model, |g| bandwidth * g.ln_1p() / std::f64::consts::LN_2)?;
            rows.push(Row {
                scenario: id.clone(),
                metric: "capacity".into(),
                abscissa: db,
                analytic: Some(ergodic_capacity(&model, bandwidth)?),
                oracle: Some(oracle),
                std_err: None,
            });
        }
        if let Some(scheme) = job.ser_scheme {
            for &db in &grid {
                let model = base.clone().with_avg_snr(10f64.powf(db / 10.0))?;
                let oracle =
                    expectation_quadrature(&model, |g| conditional_ser_value(scheme, g))?;
                rows.push(Row {
                    scenario: id.clone(),
                    metric: "ser".into(),
                    abscissa: db,
                    analytic: Some(ser(std::slice::from_ref(&model), scheme)?),
                    oracle: Some(oracle),
                    std_err: None,
                });
            }
        }
    }

    for n in 1..=4u32 {
        rows.push(Row {
            scenario: id.clone(),
            metric: "raw_moment".into(),
            abscissa: n as f64,
            analytic: Some(raw_moment(&base, n)?),
            oracle: Some(moment_quadrature(&base, n)?),
            std_err: None,
        });
    }
    let af_oracle = {
        let m1 = moment_quadrature(&base, 1)?;
        let m2 = moment_quadrature(&base, 2)?;
        m2 / (m1 * m1) - 1.0
    };
    rows.push(Row {
        scenario: id.clone(),
        metric: "amount_of_fading".into(),
        abscissa: 0.0,
        analytic: Some(amount_of_fading(&base)),
        oracle: Some(af_oracle),
        std_err: None,
    });

    if let Some(det) = &job.detector {
        let grid = require_grid(job.pf_points.as_ref(), "pf_points", 1e-12, 1.0 - 1e-12)?;
        for &pf in &grid {
            let lambda = threshold_from_pf(det.u, pf)?;
            let with_lambda = DetectorSpec::with_lambda(det.u, lambda);
            rows.push(Row {
                scenario: id.clone(),
                metric: "pd".into(),
                abscissa: pf,
                analytic: Some(avg_pd_series(&base, &with_lambda, DEFAULT_TRUNCATION_P)?),
                oracle: Some(pd_quadrature(&base, det.u, lambda)?),
                std_err: None,
            });
        }
    }

    let path = out_path(job, ov, "eval.csv");
    report::write_csv(&path, &rows)?;
    Ok(path)
}

fn run_simulate(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let model = match &job.model_path {
        Some(path) => Some(load_model(path)?),
        None => None,
    };
    let source = match (&model, &job.channel) {
        (Some(m), _) => SampleSource::Model(m.clone()),
        (None, Some(spec)) => {
            for w in spec.validate()? {
                eprintln!("warning: {w}");
            }
            SampleSource::Channel(spec.clone())
        }
        (None, None) => {
            return Err(Error::Validation(
                "simulate needs a model_path or a channel".into(),
            ))
        }
    };
    let mut cfg = SimConfig::new(source, seed);
    if let Some(n) = job.n_samples {
        cfg.n_samples = n;
    }
    if let Some(c) = job.chunk_size {
        cfg.chunk_size = c;
    }
    cfg.validate()?;

    let id = scenario_id(job);
    let snr_db = 10.0 * cfg.source.avg_snr().log10();
    let mut rows = Vec::new();

    if let Some(grid) = &job.thresholds {
        let grid = require_grid(Some(grid), "thresholds", 0.0, f64::INFINITY)?;
        let estimates = empirical_outage(&cfg, &grid)?;
        for (&th, est) in grid.iter().zip(&estimates) {
            rows.push(Row {
                scenario: id.clone(),
                metric: "outage".into(),
                abscissa: th,
                analytic: model.as_ref().map(|m| outage_probability(m, th)).transpose()?,
                oracle: Some(est.value),
                std_err: Some(est.std_err),
            });
        }
    }

    let cap = empirical_capacity(&cfg)?;
    let bandwidth = job.bandwidth.unwrap_or(1.0);
    rows.push(Row {
        scenario: id.clone(),
        metric: "capacity".into(),
        abscissa: snr_db,
        analytic: model
            .as_ref()
            .map(|m| ergodic_capacity(m, bandwidth))
            .transpose()?,
        oracle: Some(bandwidth * cap.value),
        std_err: Some(bandwidth * cap.std_err),
    });

    if let Some(scheme) = job.ser_scheme {
        let branches = job.branches.unwrap_or(1);
        let est = empirical_ser(&cfg, branches, &scheme)?;
        let analytic = match &model {
            Some(m) => Some(ser(&vec![m.clone(); branches], scheme)?),
            None => None,
        };
        rows.push(Row {
            scenario: id.clone(),
            metric: "ser".into(),
            abscissa: snr_db,
            analytic,
            oracle: Some(est.value),
            std_err: Some(est.std_err),
        });
    }

    if let Some(det) = &job.detector {
        let pf_grid = match &job.pf_points {
            Some(_) => require_grid(job.pf_points.as_ref(), "pf_points", 1e-12, 1.0 - 1e-12)?,
            None => vec![crate::metrics::false_alarm_prob(det.u, det.resolve_lambda()?)?],
        };
        for &pf in &pf_grid {
            let lambda = threshold_from_pf(det.u, pf)?;
            let with_lambda = DetectorSpec::with_lambda(det.u, lambda);
            let est = empirical_pd(&cfg, &with_lambda)?;
            let analytic = match &model {
                Some(m) => Some(avg_pd_series(m, &with_lambda, DEFAULT_TRUNCATION_P)?),
                None => None,
            };
            rows.push(Row {
                scenario: id.clone(),
                metric: "pd".into(),
                abscissa: pf,
                analytic,
                oracle: Some(est.value),
                std_err: Some(est.std_err),
            });
        }
    }

    let path = out_path(job, ov, "simulate.csv");
    report::write_csv(&path, &rows)?;
    Ok(path)
}

fn run_roc(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let model = resolve_model(job, seed)?;
    let det = job
        .detector
        .as_ref()
        .ok_or_else(|| Error::Validation("roc needs a detector".into()))?;
    let grid = require_grid(job.pf_points.as_ref(), "pf_points", 1e-12, 1.0 - 1e-12)?;
    let analytic = roc_curve(&model, det.u, &grid)?;

    let mut cfg = SimConfig::new(SampleSource::Model(model), seed);
    if let Some(n) = job.n_samples {
        cfg.n_samples = n;
    }
    if let Some(c) = job.chunk_size {
        cfg.chunk_size = c;
    }

    let id = scenario_id(job);
    let mut rows = Vec::new();
    for &(pf, pd) in &analytic {
        let lambda = threshold_from_pf(det.u, pf)?;
        let est = empirical_pd(&cfg, &DetectorSpec::with_lambda(det.u, lambda))?;
        rows.push(Row {
            scenario: id.clone(),
            metric: "pd".into(),
            abscissa: pf,
            analytic: Some(pd),
            oracle: Some(est.value),
            std_err: Some(est.std_err),
        });
    }
    let path = out_path(job, ov, "roc.csv");
    report::write_csv(&path, &rows)?;
    Ok(path)
}

/// The built-in reference models and the channels they were fitted to.
fn builtin_fixtures() -> Vec<(&'static str, ChannelSpec, MoGModel)> {
    let load = |text: &str| -> MoGModel {
        serde_json::from_str(text).expect("embedded fixture parses")
    };
    vec![
        (
            "rl_zeta3",
            ChannelSpec::rayleigh_lognormal(3.0, 1.0),
            load(include_str!("../fixtures/rl_zeta3.json")),
        ),
        (
            "nl_m2_zeta1",
            ChannelSpec::nakagami_lognormal(2.0, 1.0, 1.0),
            load(include_str!("../fixtures/nl_m2_zeta1.json")),
        ),
        (
            "nl_m4_zeta1",
            ChannelSpec::nakagami_lognormal(4.0, 1.0, 1.0),
            load(include_str!("../fixtures/nl_m4_zeta1.json")),
        ),
        (
            "kappa_mu_k1_mu05",
            ChannelSpec::kappa_mu(1.0, 0.5, 1.0),
            load(include_str!("../fixtures/kappa_mu_k1_mu05.json")),
        ),
        (
            "kappa_mu_k3_mu1",
            ChannelSpec::kappa_mu(3.0, 1.0, 1.0),
            load(include_str!("../fixtures/kappa_mu_k3_mu1.json")),
        ),
        (
            "eta_mu_e05_mu02",
            ChannelSpec::eta_mu(0.5, 0.2, 1.0),
            load(include_str!("../fixtures/eta_mu_e05_mu02.json")),
        ),
        (
            "eta_mu_e5_mu10",
            ChannelSpec::eta_mu(5.0, 10.0, 1.0),
            load(include_str!("../fixtures/eta_mu_e5_mu10.json")),
        ),
        (
            "kappa_mu_shadowed_k1_mu3_m3",
            ChannelSpec::kappa_mu_shadowed(1.0, 3.0, 3.0, 1.0),
            load(include_str!("../fixtures/kappa_mu_shadowed_k1_mu3_m3.json")),
        ),
    ]
}

/// Cross-checks every reference model against its defining integrals and a
/// seeded Monte Carlo spot check. Writes all rows, then fails with a
/// diagnostic if any gate broke.
fn run_validate(job: &JobConfig, seed: u64, ov: &Overrides) -> Result<PathBuf> {
    let mut rows = Vec::new();
    let mut breaches: Vec<String> = Vec::new();
    let gate = |rows: &mut Vec<Row>, row: Row, tol: f64, breaches: &mut Vec<String>| {
        if let Some(err) = row.abs_error() {
            if !(err <= tol) {
                breaches.push(format!(
                    "{}/{} at {}: |error| {err:.3e} exceeds {tol:.1e}",
                    row.scenario, row.metric, row.abscissa
                ));
            }
        }
        rows.push(row);
    };

    for (name, spec, model) in builtin_fixtures() {
        let id = name.to_string();

        let kl = kl_divergence(&spec, &model)?;
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "kl_nats".into(),
                abscissa: 0.0,
                analytic: Some(0.0),
                oracle: Some(kl),
                std_err: None,
            },
            0.01,
            &mut breaches,
        );

        let s = 0.5;
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "mgf".into(),
                abscissa: s,
                analytic: Some(mgf(&model, s)?),
                oracle: Some(expectation_quadrature(&model, |g| (-s * g).exp())?),
                std_err: None,
            },
            1e-8,
            &mut breaches,
        );

        for n in 1..=4u32 {
            gate(
                &mut rows,
                Row {
                    scenario: id.clone(),
                    metric: "raw_moment".into(),
                    abscissa: n as f64,
                    analytic: Some(raw_moment(&model, n)?),
                    oracle: Some(raw_moment_via_mgf(&model, n)?),
                    std_err: None,
                },
                1e-10 * raw_moment(&model, n)?.abs(),
                &mut breaches,
            );
        }
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "raw_moment_quadrature".into(),
                abscissa: 2.0,
                analytic: Some(raw_moment(&model, 2)?),
                oracle: Some(moment_quadrature(&model, 2)?),
                std_err: None,
            },
            1e-8 * raw_moment(&model, 2)?.abs(),
            &mut breaches,
        );

        let th = model.avg_snr();
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "outage".into(),
                abscissa: th,
                analytic: Some(outage_probability(&model, th)?),
                oracle: Some(outage_quadrature(&model, th)?),
                std_err: None,
            },
            1e-8,
            &mut breaches,
        );

        // Truncated detection series: deeper prefixes may only grow, and the
        // p=40 tail bound must have collapsed.
        let study = model.clone().with_avg_snr(10f64.powf(0.5))?;
        let det = DetectorSpec::with_target_pf(3, 0.1);
        let p12 = avg_pd_series(&study, &det, 12)?;
        let p40 = avg_pd_series(&study, &det, 40)?;
        let bound12 = crate::metrics::pd_truncation_bound(&study, &det, 12)?;
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "pd_tail_dominated".into(),
                abscissa: 12.0,
                analytic: Some(0.0),
                oracle: Some((p40 - p12 - bound12).max(0.0)),
                std_err: None,
            },
            1e-12,
            &mut breaches,
        );
        // Heavy-fading mixtures converge slowest; p = 64 covers the fleet.
        let bound64 = crate::metrics::pd_truncation_bound(&study, &det, 64)?;
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "pd_tail_collapsed".into(),
                abscissa: 64.0,
                analytic: Some(0.0),
                oracle: Some(bound64),
                std_err: None,
            },
            1e-3,
            &mut breaches,
        );

        // Seeded Monte Carlo spot check against quadrature under the same
        // (renormalized) sampling measure.
        let mut cfg = SimConfig::new(SampleSource::Model(model.clone()), seed);
        cfg.n_samples = job.n_samples.unwrap_or(50_000);
        let cap = empirical_capacity(&cfg)?;
        let cap_quad = expectation_quadrature(&model, |g| g.ln_1p() / std::f64::consts::LN_2)?
            / model.normalization_mass();
        gate(
            &mut rows,
            Row {
                scenario: id.clone(),
                metric: "capacity_mc".into(),
                abscissa: 10.0 * model.avg_snr().log10(),
                analytic: Some(cap_quad),
                oracle: Some(cap.value),
                std_err: Some(cap.std_err),
            },
            4.5 * cap.std_err,
            &mut breaches,
        );
    }

    let path = out_path(job, ov, "validate.csv");
    report::write_csv(&path, &rows)?;
    if !breaches.is_empty() {
        return Err(Error::Validation(format!(
            "{} validation gate(s) broke:\n  {}",
            breaches.len(),
            breaches.join("\n  ")
        )));
    }
    Ok(path)
}
