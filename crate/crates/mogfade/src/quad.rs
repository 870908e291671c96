//! Numerical integration.
//!
//! Gauss-Legendre rules with nodes computed at first use (Newton iteration
//! on the Legendre recurrence, no coefficient tables), plus an adaptive
//! driver that bisects the interval with the worst local error estimate
//! until the global estimate meets tolerance.

use std::collections::BinaryHeap;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::{Error, Result};

/// P_n(x) and P_n'(x) by upward recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let mut pm1 = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * pm1) / kf;
        pm1 = p;
        p = pk;
    }
    let dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// ascending in the node. Accurate to machine precision; the Newton
/// iteration from the Chebyshev initial guess converges in < 6 steps.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "rule order must be at least 2");
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x =
            (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..50 {
            let (p, dp) = legendre_pair(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        rule.push((x, 2.0 / ((1.0 - x * x) * (dp * dp))));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Cached rule, for orders requested repeatedly. Leaks one slice per
/// distinct order; orders in use are a handful of small constants.
pub fn gauss_legendre_cached(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry(n)
        .or_insert_with(|| Box::leak(gauss_legendre(n).into_boxed_slice()))
}

/// Fixed-order Gauss-Legendre estimate of ∫_a^b f.
pub fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre_cached(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in rule {
        acc += w * f(half.mul_add(x, mid));
    }
    acc * half
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Global error estimate actually achieved.
    pub abs_err: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn evaluate_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let coarse = fixed(f, a, b, 7);
    let fine = fixed(f, a, b, 15);
    Panel {
        a,
        b,
        value: fine,
        err: (fine - coarse).abs(),
    }
}

/// Adaptive integral of `f` over the finite interval [a, b].
///
/// Error control is `max(abs_tol, rel_tol * |integral|)` on the summed
/// per-panel estimates. Nodes are interior, so integrable endpoint
/// singularities are handled by subdivision rather than by evaluating at
/// the endpoint.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_err: 0.0,
            subdivisions: 0,
        });
    }
    if a > b {
        let mut q = integrate(f, b, a, rel_tol, abs_tol, max_subdivisions)?;
        q.value = -q.value;
        return Ok(q);
    }

    let mut heap = BinaryHeap::new();
    heap.push(evaluate_panel(f, a, b));
    let mut total = heap.peek().map(|p| p.value).unwrap_or(0.0);
    let mut total_err = heap.peek().map(|p| p.err).unwrap_or(0.0);

    let mut subdivisions = 0;
    loop {
        if !total.is_finite() {
            return Err(Error::Domain(
                "integrand produced a non-finite value".into(),
            ));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Quadrature {
                value: total,
                abs_err: total_err,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::Quadrature {
                err: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; accept its estimate.
            let mut q = Quadrature {
                value: total,
                abs_err: total_err,
                subdivisions,
            };
            q.abs_err = total_err;
            return Ok(q);
        }
        let left = evaluate_panel(f, worst.a, mid);
        let right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

/// Adaptive integral over [a, ∞) via the rational substitution
/// x = a + t/(1-t). The integrand must decay fast enough to be integrable;
/// the transformed integrand is taken as 0 at t = 1.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Quadrature> {
    let g = |t: f64| {
        let u = 1.0 - t;
        if u <= 0.0 {
            return 0.0;
        }
        let x = a + t / u;
        let v = f(x) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&g, 0.0, 1.0, rel_tol, abs_tol, max_subdivisions)
}
