//! One-dimensional quadrature rules.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// A rule as parallel node and weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The same rule mapped affinely onto [a, b].
    pub fn on(&self, a: f64, b: f64) -> Rule {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        Rule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }
}

/// n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// n-point Gauss–Hermite rule for the standard normal density: Σ wᵢ g(xᵢ)
/// approximates E g(Z), and is exact for polynomials of degree < 2n.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "gauss_hermite needs at least one node");
    // Newton on orthonormal Hermite functions (weight e^{-x²}), then rescale.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut x = 0.0;
    for i in 0..m {
        x = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => x - 1.14 * nf.powf(0.426) / x,
            2 => 1.86 * x - 0.86 * nodes[n - 1],
            3 => 1.91 * x - 0.91 * nodes[n - 2],
            _ => 2.0 * x - nodes[n - i + 1],
        };
        let mut dp = 0.0;
        for _ in 0..200 {
            let (p, d) = hermite_normalized(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = hermite_normalized(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        let w = 2.0 / (dp * dp);
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let sqrt2 = 2f64.sqrt();
    let sqrt_pi = PI.sqrt();
    Rule {
        nodes: nodes.iter().map(|x| x * sqrt2).collect(),
        weights: weights.iter().map(|w| w / sqrt_pi).collect(),
    }
}

/// Orthonormal Hermite function value and derivative (weight e^{-x²}).
fn hermite_normalized(n: usize, x: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    let d = (2.0 * n as f64).sqrt() * p2;
    (p1, d)
}

/// Adaptive Gauss–Legendre integration on [a, b]: panels are bisected until
/// the 15-point and 30-point rules agree to `tol` relative to the size of
/// the integral, in proportion to each panel's width.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(domain("interval", format!("[{a}, {b}] is not a finite interval")));
    }
    let coarse = gauss_legendre(15);
    let fine = gauss_legendre(30);
    let pair = |lo: f64, hi: f64| (coarse.on(lo, hi).integrate(&f), fine.on(lo, hi).integrate(&f));
    let whole = pair(a, b);
    let magnitude = fine.on(a, b).integrate(|x| f(x).abs());
    let scale = whole.1.abs().max(magnitude).max(1e-300);
    let mut stack = vec![(a, b, whole.0, whole.1, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, c, fv, depth)) = stack.pop() {
        let width_share = (hi - lo) / (b - a);
        if (c - fv).abs() <= tol * scale * width_share.max(1e-12) || depth >= 60 {
            total += fv;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (lc, lf) = pair(lo, mid);
        let (rc, rf) = pair(mid, hi);
        stack.push((lo, mid, lc, lf, depth + 1));
        stack.push((mid, hi, rc, rf, depth + 1));
    }
    Ok(total)
}
