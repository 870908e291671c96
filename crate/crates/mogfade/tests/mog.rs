mod common;

use common::{assert_monotone, assert_rel};
use mogfade::channels::{exact_envelope_pdf, exact_snr_pdf, sample_envelope, ChannelSpec};
use mogfade::mog::{
    em_fit, em_refine, kl_divergence, kl_divergence_between, mse_criterion,
    mse_criterion_between, select_components, FitConfig, MoGModel,
};
use mogfade::quad;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn fixture(name: &str) -> MoGModel {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap())
        .unwrap_or_else(|e| panic!("{path}: {e}"))
}

const FIXTURES: [&str; 8] = [
    "rl_zeta3",
    "nl_m2_zeta1",
    "nl_m4_zeta1",
    "kappa_mu_k1_mu05",
    "kappa_mu_k3_mu1",
    "eta_mu_e05_mu02",
    "eta_mu_e5_mu10",
    "kappa_mu_shadowed_k1_mu3_m3",
];

#[test]
fn fixture_models_load_with_near_unit_mass() {
    for name in FIXTURES {
        let model = fixture(name);
        let mass = model.normalization_mass();
        assert!(mass >= 0.995, "{name}: mass {mass}");
        assert!(mass <= 1.0 + 1e-12, "{name}: mass {mass}");
    }
    let mass = fixture("nl_m2_zeta1").normalization_mass();
    assert!((mass - 1.0).abs() < 1e-3, "nl_m2_zeta1 mass {mass}");
}

#[test]
fn fixture_models_track_exact_densities() {
    // Pointwise agreement at distribution-typical abscissas.
    let model = fixture("nl_m2_zeta1");
    let spec = ChannelSpec::nakagami_lognormal(2.0, 1.0, 1.0);
    let exact = exact_envelope_pdf(&spec, 1.0).unwrap();
    let approx = model.envelope_pdf(1.0).unwrap();
    assert!(
        ((approx - exact) / exact).abs() < 0.02,
        "nl envelope at 1: {approx} vs {exact}"
    );

    let model = fixture("kappa_mu_shadowed_k1_mu3_m3");
    let spec = ChannelSpec::kappa_mu_shadowed(1.0, 3.0, 3.0, 1.0);
    let exact = exact_snr_pdf(&spec, 1.0).unwrap();
    let approx = model.snr_pdf(1.0).unwrap();
    assert!(
        ((approx - exact) / exact).abs() < 0.02,
        "shadowed snr at 1: {approx} vs {exact}"
    );

    // Whole-curve agreement in nats; these double as guards on the
    // lognormal dB convention.
    let kl = kl_divergence(
        &ChannelSpec::rayleigh_lognormal(3.0, 1.0),
        &fixture("rl_zeta3"),
    )
    .unwrap();
    assert!(kl > -1e-10 && kl < 2e-3, "rl_zeta3 KL {kl}");
    let kl = kl_divergence(&spec, &model).unwrap();
    assert!(kl > -1e-10 && kl < 2e-3, "shadowed KL {kl}");
}

#[test]
fn snr_pdf_is_the_envelope_under_change_of_variables() {
    let model = fixture("nl_m2_zeta1").with_avg_snr(2.7).unwrap();
    let gbar = model.avg_snr();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x: f64 = rng.random_range(0.05..3.0);
        let via_snr = 2.0 * gbar * x * model.snr_pdf(gbar * x * x).unwrap();
        let env = model.envelope_pdf(x).unwrap();
        assert_rel(via_snr, env, 1e-12, "jacobian identity");
    }
}

#[test]
fn snr_mass_equals_half_line_mass() {
    for name in ["nl_m2_zeta1", "kappa_mu_k1_mu05"] {
        let model = fixture(name).with_avg_snr(1.9).unwrap();
        let gbar = model.avg_snr();
        // γ = γ̄u² clears the 1/√γ pole; interior quadrature nodes keep
        // u = 0 itself out of reach.
        let f = |u: f64| 2.0 * gbar * u * model.snr_pdf(gbar * u * u).unwrap();
        let mass = quad::integrate_to_inf(&f, 0.0, 1e-10, 1e-14, 200)
            .unwrap()
            .value;
        assert_rel(mass, model.normalization_mass(), 1e-8, name);
    }
}

#[test]
fn single_component_fit_recovers_gaussian_moments() {
    let n = 10_000;
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    let normal = rand_distr::Normal::new(1.0, 0.1).unwrap();
    let samples: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(normal)).collect();
    let config = FitConfig {
        restarts: 1,
        ..FitConfig::default()
    };
    let (model, report) = em_fit(&samples, 1, &config).unwrap();
    assert!(report.converged);
    assert_monotone(&report.loglik_trace, "gaussian c=1");
    let se = 0.1 / (n as f64).sqrt();
    assert!(
        (model.means()[0] - 1.0).abs() < 3.0 * se,
        "mean {}",
        model.means()[0]
    );
    assert!(
        (model.stds()[0] - 0.1).abs() < 0.004,
        "std {}",
        model.stds()[0]
    );
    assert!((model.weights()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn nl_fit_reaches_small_divergence() {
    let spec = ChannelSpec::nakagami_lognormal(2.0, 1.0, 1.0);
    let samples = sample_envelope(&spec, 200_000, 42).unwrap();
    let config = FitConfig {
        restarts: 2,
        seed: 7,
        ..FitConfig::default()
    };
    let (model, report) = em_fit(&samples, 4, &config).unwrap();

    assert!(report.converged, "no convergence in {} iters", report.iterations);
    assert_monotone(&report.loglik_trace, "nl c=4");
    assert_eq!(report.n_samples, 200_000);
    let wsum: f64 = model.weights().iter().sum();
    assert!((wsum - 1.0).abs() < 1e-12);
    assert!(model.weights().iter().all(|&w| w > 0.0));
    assert!(model.normalization_mass() >= 0.995);

    let kl = kl_divergence(&spec, &model).unwrap();
    assert!(kl > -1e-10, "negative KL {kl}");
    assert!(kl <= 0.01, "KL {kl}");

    // A converged fit is a fixed point: refining from it moves the
    // per-sample log-likelihood by less than delta.
    let (_, refit) = em_refine(&samples, &model, &config).unwrap();
    let moved = refit.loglik_trace.last().unwrap() - refit.loglik_trace.first().unwrap();
    assert!(moved.abs() < config.delta, "moved {moved}");
    assert_monotone(&refit.loglik_trace, "nl refine");
}

#[test]
fn posterior_rows_sum_to_one() {
    // Direct restatement of the E-step normalization on a fitted model.
    let model = fixture("nl_m2_zeta1");
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    for i in 0..100 {
        let x = 0.03 * i as f64;
        let dens: Vec<f64> = model
            .weights()
            .iter()
            .zip(model.means())
            .zip(model.stds())
            .map(|((w, mu), eta)| {
                let z = (x - mu) / eta;
                w / (norm * eta) * (-0.5 * z * z).exp()
            })
            .collect();
        let total: f64 = dens.iter().sum();
        let rows: f64 = dens.iter().map(|d| d / total).sum();
        assert!((rows - 1.0).abs() < 1e-12);
    }
}

#[test]
fn kl_of_identical_mixtures_is_zero() {
    let model = fixture("eta_mu_e5_mu10");
    let kl = kl_divergence_between(&model, &model.clone()).unwrap();
    assert!(kl.abs() < 1e-10, "KL {kl}");
    let mse = mse_criterion_between(&model, &model.clone(), 3.0, 10_000).unwrap();
    assert!(mse < 1e-20, "MSE {mse}");
}

#[test]
fn kl_is_nonnegative_for_mismatched_pairs() {
    let specs = [
        ChannelSpec::nakagami_m(2.0, 1.0),
        ChannelSpec::rayleigh(1.0),
        ChannelSpec::kappa_mu(1.0, 0.5, 1.0),
        ChannelSpec::eta_mu(0.5, 0.2, 1.0),
        ChannelSpec::kappa_mu_shadowed(1.0, 3.0, 3.0, 1.0),
    ];
    let models = ["nl_m2_zeta1", "eta_mu_e5_mu10"].map(fixture);
    for spec in &specs {
        for model in &models {
            let kl = kl_divergence(spec, model).unwrap();
            assert!(kl > -1e-9, "{:?}: KL {kl}", spec.kind);
        }
    }
}

#[test]
fn mse_criterion_examples() {
    let spec = ChannelSpec::nakagami_lognormal(4.0, 1.0, 1.0);
    let model = fixture("nl_m4_zeta1");
    let mse = mse_criterion(&spec, &model, 3.0, 10_000).unwrap();
    assert!(mse < 1e-4, "MSE {mse}");
    // Grid refinement no longer moves the value.
    let mse2 = mse_criterion(&spec, &model, 3.0, 20_000).unwrap();
    assert_rel(mse2, mse, 1e-3, "grid refinement");

    assert!(mse_criterion(&spec, &model, 0.0, 100).is_err());
    assert!(mse_criterion(&spec, &model, 3.0, 0).is_err());
}

#[test]
fn bic_selection_prefers_one_component_for_gaussian_data() {
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    let normal = rand_distr::Normal::new(1.0, 0.15).unwrap();
    let samples: Vec<f64> = (0..20_000).map(|_| rng.sample::<f64, _>(normal)).collect();
    let config = FitConfig {
        restarts: 2,
        seed: 3,
        ..FitConfig::default()
    };
    let (model, _, table) = select_components(&samples, 1..=4, &config).unwrap();
    assert_eq!(model.components(), 1, "table: {table:?}");
    assert_eq!(table.len(), 4);
    assert!(table.windows(2).all(|w| w[1].c == w[0].c + 1));
}

#[test]
fn bic_selection_matches_published_count_for_eta_mu() {
    let spec = ChannelSpec::eta_mu(5.0, 10.0, 1.0);
    let samples = sample_envelope(&spec, 200_000, 4242).unwrap();
    let config = FitConfig {
        restarts: 2,
        seed: 17,
        ..FitConfig::default()
    };
    let (model, report, table) = select_components(&samples, 1..=6, &config).unwrap();
    for entry in &table {
        eprintln!(
            "eta-mu(5,10) C={} bic={:.2} converged={}",
            entry.c, entry.bic, entry.converged
        );
    }
    assert_eq!(model.components(), 3, "table: {table:?}");
    assert_monotone(&report.loglik_trace, "eta-mu select winner");
}
