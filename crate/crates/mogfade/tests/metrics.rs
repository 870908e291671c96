mod common;

use common::{assert_abs, assert_monotone, assert_rel, fixture, fixture_components, mixture_pdf, FIXTURES};
use mogfade::channels::{exact_snr_pdf, sample_envelope, ChannelSpec};
use mogfade::metrics::{
    amount_of_fading, avg_pd_series, avg_pd_series_renormalized, awgn_pd, ergodic_capacity,
    false_alarm_prob, mgf, mrc_mgf, outage_probability, pd_truncation_bound,
    pd_truncation_bound_printed, raw_moment, raw_moment_via_mgf, roc_curve, ser,
    threshold_from_pf, DetectorSpec, SerScheme,
};
use mogfade::mog::{em_fit, FitConfig, MoGModel};
use mogfade::policy::SeriesPolicy;
use mogfade::quad;
use mogfade::special::{
    humbert_psi1, ln_bessel_i, ln_gamma, marcum_q, parabolic_cylinder_d, reg_upper_gamma,
};

const PI: f64 = std::f64::consts::PI;

/// E[h(γ)] under the mixture with γ = γ̄x², by direct quadrature of the raw
/// component table. Deliberately bypasses the model type.
fn snr_expectation(comps: &[(f64, f64, f64)], gbar: f64, h: &dyn Fn(f64) -> f64) -> f64 {
    let f = |x: f64| h(gbar * x * x) * mixture_pdf(comps, x);
    quad::integrate_to_inf(&f, 0.0, 1e-10, 1e-14, 400)
        .unwrap()
        .value
}

#[test]
fn mgf_matches_defining_integral_on_all_fixtures() {
    for name in FIXTURES {
        let comps = fixture_components(name);
        let model = fixture(name);
        let oracle = snr_expectation(&comps, 1.0, &|g| (-0.5 * g).exp());
        assert_rel(mgf(&model, 0.5).unwrap(), oracle, 1e-8, name);
        assert_abs(
            mgf(&model, 0.0).unwrap(),
            model.normalization_mass(),
            1e-13,
            name,
        );
    }
    // Densest check on the kappa-mu table, including a rescaled mean SNR.
    let comps = fixture_components("kappa_mu_k3_mu1");
    for &(s, gbar) in &[(0.25, 1.0), (1.0, 1.0), (0.5, 3.7)] {
        let model = fixture("kappa_mu_k3_mu1").with_avg_snr(gbar).unwrap();
        let oracle = snr_expectation(&comps, gbar, &|g| (-s * g).exp());
        assert_rel(
            mgf(&model, s).unwrap(),
            oracle,
            1e-8,
            &format!("kappa_mu_k3_mu1 s={s} gbar={gbar}"),
        );
    }
}

#[test]
fn mgf_is_non_increasing_in_s() {
    for name in FIXTURES {
        let model = fixture(name);
        let values: Vec<f64> = (0..50)
            .map(|k| mgf(&model, 100.0 * k as f64 / 49.0).unwrap())
            .collect();
        for (k, w) in values.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-15,
                "{name}: mgf increased between grid points {k} and {}",
                k + 1
            );
        }
        assert!(values[0] <= 1.0 + 1e-12);
        assert!(*values.last().unwrap() >= 0.0);
    }
}

#[test]
fn mrc_mgf_matches_product_measure_quadrature() {
    let comps_a = fixture_components("kappa_mu_k3_mu1");
    let comps_b = fixture_components("nl_m2_zeta1");
    let model_a = fixture("kappa_mu_k3_mu1");
    let model_b = fixture("nl_m2_zeta1").with_avg_snr(2.0).unwrap();
    let s = 1.0;
    // Nested quadrature of E[e^{−s(γ₁+γ₂)}] over the product measure.
    let outer = |x: f64| {
        let gx = x * x;
        let inner = |y: f64| (-s * (gx + 2.0 * y * y)).exp() * mixture_pdf(&comps_b, y);
        mixture_pdf(&comps_a, x)
            * quad::integrate_to_inf(&inner, 0.0, 1e-10, 1e-14, 200)
                .unwrap()
                .value
    };
    let oracle = quad::integrate_to_inf(&outer, 0.0, 1e-9, 1e-13, 200)
        .unwrap()
        .value;
    let combined = mrc_mgf(&[model_a, model_b], s).unwrap();
    assert_rel(combined, oracle, 1e-7, "two-branch mgf vs 2-D quadrature");
}

#[test]
fn moment_routes_and_quadrature_agree() {
    for name in FIXTURES {
        let comps = fixture_components(name);
        let model = fixture(name);
        for n in 0..=4u32 {
            let closed = raw_moment(&model, n).unwrap();
            // Whole-line moment: the mixture's x² powers integrate over all
            // of R, matching the closed form's full Gaussian moments.
            let f = |x: f64| {
                (x * x).powi(n as i32) * (mixture_pdf(&comps, x) + mixture_pdf(&comps, -x))
            };
            let oracle = quad::integrate_to_inf(&f, 0.0, 1e-10, 1e-14, 400)
                .unwrap()
                .value;
            assert_rel(closed, oracle, 1e-8, &format!("{name} n={n}"));
            if n >= 1 {
                let ladder = raw_moment_via_mgf(&model, n).unwrap();
                assert_rel(ladder, closed, 1e-12, &format!("{name} ladder n={n}"));
            }
        }
    }
    // γ̄ enters as a plain power.
    let scaled = fixture("nl_m4_zeta1").with_avg_snr(3.7).unwrap();
    let base = fixture("nl_m4_zeta1");
    for n in 1..=4u32 {
        let ratio = raw_moment(&scaled, n).unwrap() / raw_moment(&base, n).unwrap();
        assert_rel(ratio, 3.7f64.powi(n as i32), 1e-12, &format!("scale n={n}"));
    }
}

#[test]
fn fading_amount_tracks_the_exact_channels() {
    // The study's stated value for the eta-mu (5, 10) table.
    let af_mild = amount_of_fading(&fixture("eta_mu_e5_mu10"));
    assert_rel(af_mild, 0.0721, 0.10, "eta_mu_e5_mu10 fading amount");

    // Quadrature of the exact channel SNR pdf as the independent reference,
    // integrated in u = √(γ/γ̄) where the density is smooth.
    for (name, spec) in [
        ("eta_mu_e5_mu10", ChannelSpec::eta_mu(5.0, 10.0, 1.0)),
        ("eta_mu_e05_mu02", ChannelSpec::eta_mu(0.5, 0.2, 1.0)),
        ("kappa_mu_k3_mu1", ChannelSpec::kappa_mu(3.0, 1.0, 1.0)),
    ] {
        let moment = |n: i32| {
            let f = |u: f64| {
                let g = u * u;
                let pdf = exact_snr_pdf(&spec, g).unwrap_or(0.0);
                g.powi(n) * pdf * 2.0 * u
            };
            quad::integrate_to_inf(&f, 0.0, 1e-9, 1e-13, 400).unwrap().value
        };
        let (e1, e2) = (moment(1), moment(2));
        let af_channel = e2 / (e1 * e1) - 1.0;
        let af_table = amount_of_fading(&fixture(name));
        assert_rel(af_table, af_channel, 0.10, &format!("{name} vs channel"));
        eprintln!("{name}: table AF {af_table:.5}, channel AF {af_channel:.5}");
    }

    // Eq.-level consistency: the dedicated form equals the moment quotient.
    for name in FIXTURES {
        let model = fixture(name);
        let e1 = raw_moment(&model, 1).unwrap();
        let e2 = raw_moment(&model, 2).unwrap();
        let viamoments = (e2 - e1 * e1) / (e1 * e1);
        assert_rel(amount_of_fading(&model), viamoments, 1e-12, name);
    }
}

#[test]
fn outage_is_a_cdf_and_matches_quadrature() {
    for (name, gbar) in [("nl_m2_zeta1", 1.0), ("kappa_mu_k1_mu05", 2.3)] {
        let comps = fixture_components(name);
        let model = fixture(name).with_avg_snr(gbar).unwrap();
        let mass = model.normalization_mass();

        // CDF oracle on the envelope line.
        for frac in [0.1, 0.5, 1.0, 4.0] {
            let gamma_th = frac * gbar;
            let x_th = (gamma_th / gbar).sqrt();
            let f = |x: f64| mixture_pdf(&comps, x);
            let oracle = quad::integrate(&f, 0.0, x_th, 1e-12, 1e-15, 200)
                .unwrap()
                .value;
            assert_rel(
                outage_probability(&model, gamma_th).unwrap(),
                oracle,
                1e-10,
                &format!("{name} outage at {frac} gbar"),
            );
        }

        // Monotone, bounded, and no jumps beyond what the density allows.
        let steps = 1000usize;
        let top = 10.0 * gbar;
        let grid: Vec<f64> = (0..=steps)
            .map(|k| top * k as f64 / steps as f64)
            .collect();
        let values: Vec<f64> = grid
            .iter()
            .map(|&g| outage_probability(&model, g).unwrap())
            .collect();
        assert_monotone(&values, name);
        assert!(values.iter().all(|&p| (-1e-12..=mass + 1e-12).contains(&p)));
        for k in 1..steps {
            let step = grid[k + 1] - grid[k];
            let bound = model
                .snr_pdf(grid[k])
                .unwrap()
                .max(model.snr_pdf(grid[k + 1]).unwrap());
            assert!(
                values[k + 1] - values[k] <= 1.5 * bound * step + 1e-12,
                "{name}: jump at grid point {k}"
            );
        }
    }
}

#[test]
fn capacity_second_order_tracks_quadrature() {
    let bandwidth = 0.5;
    let gated = [
        "kappa_mu_k3_mu1",
        "kappa_mu_shadowed_k1_mu3_m3",
        "eta_mu_e5_mu10",
    ];
    let reported = ["eta_mu_e05_mu02", "kappa_mu_k1_mu05"];
    for name in gated.iter().chain(&reported) {
        let comps = fixture_components(name);
        let mut worst: f64 = 0.0;
        for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
            let gbar = 10f64.powf(db / 10.0);
            let model = fixture(name).with_avg_snr(gbar).unwrap();
            let approx = ergodic_capacity(&model, bandwidth).unwrap();
            let exact = bandwidth / std::f64::consts::LN_2
                * snr_expectation(&comps, gbar, &|g| (1.0 + g).ln());
            let dev = ((approx - exact) / exact).abs();
            worst = worst.max(dev);
            if gated.contains(name) {
                assert!(
                    dev <= 0.02,
                    "{name} at {db} dB: capacity off by {:.3}% (approx {approx}, exact {exact})",
                    100.0 * dev
                );
            }
        }
        eprintln!("{name}: worst capacity deviation {:.3}%", 100.0 * worst);
    }
}

#[test]
fn ser_matches_rayleigh_closed_forms() {
    // A fitted Rayleigh envelope is the reference case with a closed-form
    // BPSK error rate, 0.5(1 − √(γ̄/(1+γ̄))).
    let samples = sample_envelope(&ChannelSpec::rayleigh(1.0), 120_000, 910).unwrap();
    let config = FitConfig {
        restarts: 2,
        seed: 11,
        ..FitConfig::default()
    };
    let (fit, _) = em_fit(&samples, 6, &config).unwrap();

    let gbar = 10.0;
    let model = fit.clone().with_avg_snr(gbar).unwrap();
    let closed = 0.5 * (1.0 - (gbar / (1.0 + gbar)).sqrt());
    let one_branch = ser(std::slice::from_ref(&model), SerScheme::bpsk()).unwrap();
    assert_rel(one_branch, closed, 0.05, "single-branch Rayleigh BPSK");

    // Two-branch MRC over iid Rayleigh: [½(1−μ)]²(2+μ), μ = √(γ̄/(1+γ̄)).
    let m = (gbar / (1.0 + gbar)).sqrt();
    let closed_two = (0.5 * (1.0 - m)).powi(2) * (2.0 + m);
    let two_branch = ser(&[model.clone(), model.clone()], SerScheme::bpsk()).unwrap();
    assert_rel(two_branch, closed_two, 0.10, "two-branch Rayleigh BPSK");

    let noise = fit.with_avg_snr(1e-9).unwrap();
    let coin = ser(&[noise], SerScheme::bpsk()).unwrap();
    assert_abs(coin, 0.5, 1e-3, "vanishing-SNR BPSK");
}

#[test]
fn ser_constellation_identities_and_orderings() {
    let model = fixture("kappa_mu_k3_mu1").with_avg_snr(4.0).unwrap();

    // QPSK and 4-QAM are the same constellation; the two integral forms
    // must agree to quadrature accuracy.
    let qpsk = ser(std::slice::from_ref(&model), SerScheme::Mpsk { m: 4 }).unwrap();
    let qam4 = ser(std::slice::from_ref(&model), SerScheme::SquareMqam { m: 4 }).unwrap();
    assert_rel(qam4, qpsk, 1e-12, "4-QAM vs QPSK");

    for name in FIXTURES {
        let branch = fixture(name).with_avg_snr(4.0).unwrap();
        let bpsk = ser(std::slice::from_ref(&branch), SerScheme::bpsk()).unwrap();
        let bfsk = ser(std::slice::from_ref(&branch), SerScheme::bfsk()).unwrap();
        assert!(bpsk <= bfsk, "{name}: BPSK {bpsk} should not exceed BFSK {bfsk}");
        assert!((0.0..=1.0).contains(&bpsk));
    }

    // More energy per symbol must help 16-QAM.
    let mut last = 1.0f64;
    for gbar in [5.0, 10.0, 20.0] {
        let branch = fixture("nl_m4_zeta1").with_avg_snr(gbar).unwrap();
        let value = ser(std::slice::from_ref(&branch), SerScheme::SquareMqam { m: 16 }).unwrap();
        assert!(value < last, "16-QAM SER should fall with SNR");
        last = value;
    }

    // Node-doubling adequacy: a 128-node evaluation of the BPSK integral.
    let dense = quad::fixed(
        &|theta: f64| mgf(&model, 1.0 / theta.sin().powi(2)).unwrap(),
        0.0,
        PI / 2.0,
        128,
    ) / PI;
    let bpsk = ser(std::slice::from_ref(&model), SerScheme::bpsk()).unwrap();
    assert_rel(bpsk, dense, 1e-10, "64 vs 128 Gauss nodes");
}

#[test]
fn awgn_detection_agrees_across_three_routes() {
    let (u, snr, lambda) = (3u32, 2.0, 5.0);
    let direct = awgn_pd(u, snr, lambda).unwrap();

    // Poisson mixture of incomplete gammas.
    let mut series = 0.0;
    let mut weight = (-snr).exp();
    for k in 0..200 {
        series += weight * reg_upper_gamma(u as f64 + k as f64, lambda / 2.0).unwrap();
        weight *= snr / (k + 1) as f64;
        if weight < 1e-18 {
            break;
        }
    }
    assert_rel(direct, series, 1e-9, "marcum vs poisson mixture");

    // Defining integral of the Marcum Q.
    let a = (2.0 * snr).sqrt();
    let integrand = |x: f64| {
        let ln_i = ln_bessel_i(u as f64 - 1.0, a * x).unwrap();
        (x.ln() * u as f64 + (1.0 - u as f64) * a.ln() - (x * x + a * a) / 2.0 + ln_i).exp()
    };
    let tail = quad::integrate_to_inf(&integrand, lambda.sqrt(), 1e-11, 1e-15, 300)
        .unwrap()
        .value;
    assert_rel(direct, tail, 1e-9, "marcum vs defining integral");

    // Zero SNR collapses onto the false-alarm curve.
    let idle = awgn_pd(u, 0.0, lambda).unwrap();
    assert_rel(
        idle,
        false_alarm_prob(u, lambda).unwrap(),
        1e-12,
        "zero-SNR detection",
    );
    assert_eq!(awgn_pd(u, snr, 0.0).unwrap(), 1.0);
}

/// The two study scenarios: shadowed Nakagami tables at 5 dB mean SNR with
/// a u = 3 detector.
fn detection_scenarios() -> Vec<(&'static str, MoGModel)> {
    ["nl_m2_zeta1", "nl_m4_zeta1"]
        .into_iter()
        .map(|name| {
            (
                name,
                fixture(name).with_avg_snr(10f64.powf(0.5)).unwrap(),
            )
        })
        .collect()
}

fn pd_quadrature_oracle(name: &str, gbar: f64, u: u32, lambda: f64) -> f64 {
    let comps = fixture_components(name);
    // Deep tail probes drive the Marcum noncentrality to thousands of
    // series terms; give the oracle the budget and skip dead density.
    let policy = SeriesPolicy::default().with_max_terms(50_000);
    let f = |x: f64| {
        let pdf = mixture_pdf(&comps, x);
        if pdf < 1e-300 {
            return 0.0;
        }
        marcum_q(u, (2.0 * gbar * x * x).sqrt(), lambda.sqrt(), &policy).unwrap() * pdf
    };
    quad::integrate_to_inf(&f, 0.0, 1e-9, 1e-13, 300)
        .unwrap()
        .value
}

#[test]
fn detection_series_matches_quadrature_on_study_scenarios() {
    let u = 3u32;
    for (name, model) in detection_scenarios() {
        let gbar = model.avg_snr();
        let det0 = DetectorSpec::with_target_pf(u, 0.5);
        let bound = pd_truncation_bound(&model, &det0, 12).unwrap();
        for k in 0..10 {
            // Log-spaced false-alarm grid over the plotted range 0.01..0.9.
            let pf = 1e-2 * (0.9f64 / 1e-2).powf(k as f64 / 9.0);
            let lambda = threshold_from_pf(u, pf).unwrap();
            let det = DetectorSpec::with_lambda(u, lambda);
            let series = avg_pd_series(&model, &det, 12).unwrap();
            let oracle = pd_quadrature_oracle(name, gbar, u, lambda);
            // The truncated series is a partial sum of positive terms, so it
            // sits below the quadrature value by at most the truncated tail
            // (the bound is evaluated with Q = 1, hence lambda-independent
            // up to the detector's threshold, and dominates at every pf).
            let defect = oracle - series;
            assert!(
                defect >= -2e-5,
                "{name} pf={pf:.4}: series {series} above oracle {oracle}"
            );
            assert!(
                defect <= bound + 2e-5,
                "{name} pf={pf:.4}: defect {defect:.3e} exceeds tail bound {bound:.3e}"
            );
        }
        // The p=12 tail is scenario-dependent: about 1.2e-2 for the wider
        // m=2 mixture and 3.5e-3 for m=4.
        assert!(bound < 1.3e-2, "{name}: tail bound {bound:.3e} regressed");
        if name == "nl_m4_zeta1" {
            assert!(bound < 1e-2, "{name}: tail bound {bound:.3e} regressed");
        }
    }
}

#[test]
fn detection_series_grows_with_truncation_depth() {
    for (name, model) in detection_scenarios() {
        let det = DetectorSpec::with_target_pf(3, 0.1);
        let values: Vec<f64> = (0..=20)
            .map(|p| avg_pd_series(&model, &det, p).unwrap())
            .collect();
        assert_monotone(&values, name);
        let mass = model.normalization_mass();
        assert!(values.iter().all(|&v| v <= mass + 1e-12));
        let renorm = avg_pd_series_renormalized(&model, &det, 12).unwrap();
        assert_rel(renorm, values[12] / mass, 1e-15, name);
    }
}

#[test]
fn truncation_bound_dominates_the_observed_residual() {
    for (name, model) in detection_scenarios() {
        let det = DetectorSpec::with_target_pf(3, 0.1);
        let reference = avg_pd_series(&model, &det, 40).unwrap();
        let mut bounds = Vec::new();
        for p in [4usize, 8, 12] {
            let residual = reference - avg_pd_series(&model, &det, p).unwrap();
            assert!(residual >= -1e-12, "{name}: series not monotone");
            let bound = pd_truncation_bound(&model, &det, p).unwrap();
            assert!(
                bound + 1e-12 >= residual,
                "{name} p={p}: bound {bound} below residual {residual}"
            );
            let printed = pd_truncation_bound_printed(&model, &det, p).unwrap();
            assert!(
                printed + 1e-12 >= residual,
                "{name} p={p}: printed bound {printed} below residual {residual}"
            );
            eprintln!(
                "{name} p={p}: residual {residual:.3e}, bound {bound:.3e}, printed {printed:.3e}"
            );
            bounds.push(bound);
        }
        assert!(
            bounds[2] <= 0.08,
            "{name}: p=12 bound {} exceeds the study's stated ceiling",
            bounds[2]
        );
        let deep = pd_truncation_bound(&model, &det, 40).unwrap();
        assert!(deep < 1e-3, "{name}: p=40 bound {deep}");
        bounds.push(deep);
        for w in bounds.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{name}: bound not non-increasing");
        }
    }
}

/// Independent tail reference: Gₙ built straight from its definition with
/// the cylinder function, plus the Ψ₁ closed form of the full sum.
#[test]
fn truncation_tail_agrees_with_cylinder_terms_and_humbert_closed_form() {
    let policy = SeriesPolicy::default();
    for (name, model) in detection_scenarios() {
        let gbar = model.avg_snr();
        let det = DetectorSpec::with_target_pf(3, 0.1);
        for p in [4usize, 12] {
            let mut expected = 0.0;
            for &(w, mu, eta) in &fixture_components(name) {
                let a_big = 2.0 * gbar * eta * eta + 1.0;
                let r = gbar * eta * eta / a_big;
                let z0 = -mu / (eta * a_big.sqrt());
                let w_arg = z0 * z0 / 2.0;
                let prefactor =
                    w * (-(mu * mu / (2.0 * eta * eta) - w_arg / 2.0)).exp()
                        / (2.0 * PI * a_big).sqrt();

                // Full sum via the Ψ₁ reduction of Σ (2r)ⁿ [...] with the
                // Pochhammer contractions (½)ₙ(n+½)ₖ = (½)ₙ₊ₖ and
                // (n+1)ₖ = (1)ₙ₊ₖ/(1)ₙ.
                let even = humbert_psi1(0.5, 1.0, 1.0, 0.5, 2.0 * r, w_arg, &policy).unwrap();
                let odd = humbert_psi1(1.0, 1.0, 1.0, 1.5, 2.0 * r, w_arg, &policy).unwrap();
                let full = (PI / 2.0).sqrt()
                    * (-w_arg / 2.0).exp()
                    * (even + 2.0f64.sqrt() * z0.abs() / PI.sqrt() * odd);

                // Minus the leading terms, from the raw definition
                // Γ(2n+1)/n! · rⁿ · D₋₍₂ₙ₊₁₎(z₀).
                let mut head = 0.0;
                for n in 0..=p {
                    let nf = n as f64;
                    head += (ln_gamma(2.0 * nf + 1.0) - ln_gamma(nf + 1.0) + nf * r.ln()).exp()
                        * parabolic_cylinder_d(-(2.0 * nf + 1.0), z0).unwrap();
                }
                expected += prefactor * (full - head);
            }
            let bound = pd_truncation_bound(&model, &det, p).unwrap();
            assert_rel(bound, expected, 1e-9, &format!("{name} p={p}"));
        }
    }
}

#[test]
fn roc_curve_rises_from_zero_to_the_mass() {
    let model = detection_scenarios().remove(1).1;
    let u = 3u32;
    let grid: Vec<f64> = (0..10)
        .map(|k| 1e-3 * (0.9f64 / 1e-3).powf(k as f64 / 9.0))
        .collect();
    let curve = roc_curve(&model, u, &grid).unwrap();
    assert_eq!(curve.len(), grid.len());
    let pds: Vec<f64> = curve.iter().map(|&(_, pd)| pd).collect();
    for (k, &(pf, _)) in curve.iter().enumerate() {
        assert_eq!(pf, grid[k]);
    }
    assert_monotone(&pds, "roc detection probabilities");
    let mass = model.normalization_mass();
    assert!(pds.iter().all(|&p| p > 0.0 && p <= mass + 1e-9));

    // Endpoint limits: an almost-always-firing and an almost-never-firing
    // detector. The high end sits within the p=12 truncation gap of the
    // mass.
    let high = roc_curve(&model, u, &[1.0 - 1e-9]).unwrap()[0].1;
    let det = DetectorSpec::with_target_pf(u, 1.0 - 1e-9);
    let gap = pd_truncation_bound(&model, &det, 12).unwrap();
    assert!(mass - high <= gap + 1e-9, "high end {high} vs mass {mass}");
    let low = roc_curve(&model, u, &[1e-9]).unwrap()[0].1;
    assert!(low < 1e-3, "low end {low}");

    assert!(roc_curve(&model, u, &[]).is_err());
    assert!(roc_curve(&model, u, &[0.5, 0.5]).is_err());
    assert!(roc_curve(&model, u, &[0.2, 0.1]).is_err());
    assert!(roc_curve(&model, u, &[0.0, 0.5]).is_err());
}

#[test]
fn detector_spec_serializes_sparsely() {
    let det = DetectorSpec::with_lambda(3, 5.0);
    let text = serde_json::to_string(&det).unwrap();
    assert_eq!(text, r#"{"u":3,"lambda":5.0}"#);
    let parsed: DetectorSpec = serde_json::from_str(r#"{"u":3,"target_pf":0.1}"#).unwrap();
    assert_eq!(parsed, DetectorSpec::with_target_pf(3, 0.1));
    assert!(serde_json::from_str::<DetectorSpec>(r#"{"u":3,"threshold":5.0}"#).is_err());
    let round: DetectorSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(round, det);
}
