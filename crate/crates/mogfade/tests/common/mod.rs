#![allow(dead_code)]

use mogfade::mog::MoGModel;

/// Published mixture tables shipped with the crate, all at unit average SNR.
pub const FIXTURES: [&str; 8] = [
    "rl_zeta3",
    "nl_m2_zeta1",
    "nl_m4_zeta1",
    "kappa_mu_k1_mu05",
    "kappa_mu_k3_mu1",
    "eta_mu_e05_mu02",
    "eta_mu_e5_mu10",
    "kappa_mu_shadowed_k1_mu3_m3",
];

pub fn fixture(name: &str) -> MoGModel {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap())
        .unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// The same table as raw (weight, mean, std) triples, parsed without going
/// through the model type, for oracle densities that must not share code
/// with the implementation under test. Weights are rescaled to sum to one,
/// mirroring what model construction does to the rounded published tables.
pub fn fixture_components(name: &str) -> Vec<(f64, f64, f64)> {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mut comps: Vec<(f64, f64, f64)> = value["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["w"].as_f64().unwrap(),
                c["mu"].as_f64().unwrap(),
                c["eta"].as_f64().unwrap(),
            )
        })
        .collect();
    let total: f64 = comps.iter().map(|c| c.0).sum();
    for c in &mut comps {
        c.0 /= total;
    }
    comps
}

/// Gaussian mixture density from raw triples.
pub fn mixture_pdf(comps: &[(f64, f64, f64)], x: f64) -> f64 {
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    comps
        .iter()
        .map(|&(w, mu, eta)| {
            let z = (x - mu) / eta;
            w * (-0.5 * z * z).exp() / (eta * norm)
        })
        .sum()
}

/// Relative-error assertion with the tolerance visible at the call site.
pub fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        got.is_finite(),
        "{what}: got non-finite value {got} (want {want})"
    );
    if want == 0.0 {
        assert!(got.abs() <= tol, "{what}: got {got}, want 0 ± {tol}");
        return;
    }
    let rel = ((got - want) / want).abs();
    assert!(
        rel <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, rel err {rel:.3e} > {tol:.1e}"
    );
}

/// Non-decreasing within absolute slack, as EM traces must be.
pub fn assert_monotone(trace: &[f64], what: &str) {
    for w in trace.windows(2) {
        assert!(
            w[1] >= w[0] - 1e-9,
            "{what}: trace decreased from {:.12e} to {:.12e}",
            w[0],
            w[1]
        );
    }
}

pub fn assert_abs(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        got.is_finite(),
        "{what}: got non-finite value {got} (want {want})"
    );
    let err = (got - want).abs();
    assert!(
        err <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, abs err {err:.3e} > {tol:.1e}"
    );
}
