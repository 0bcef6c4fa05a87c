use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{restrict_to_circle, CircleFunction};
use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::multiplier::{Multiplier, Parity};
use crate::quadrature;

/// Surface area ω_{d−1} of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / ln_gamma(h).exp()
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(domain("epsilon", format!("{eps} not in (0, 1]")))
    }
}

/// c₀ = 2ω_{d−1}Γ(ε+1)Γ(d/2)/Γ(d/2+ε).
fn c0(eps: f64, d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * sphere_area(d) * (ln_gamma(eps + 1.0) + ln_gamma(h) - ln_gamma(h + eps)).exp()
}

/// λ_k = c₀∫₀¹(1+r²)^{d/2−2}(1−2r/(1+r²))^{d/2−1+ε} r^k dr.
pub fn lambda_k(k: usize, eps: f64, d: usize) -> Result<f64> {
    check_epsilon(eps)?;
    if k % 2 != 0 {
        return Err(domain("k", format!("degree {k} must be even")));
    }
    if !(2..=3).contains(&d) {
        return Err(domain("d", format!("dimension {d} not supported")));
    }
    let h = d as f64 / 2.0;
    let integrand = |r: f64| {
        let q = 1.0 + r * r;
        // 1 − 2r/(1+r²) = (1−r)²/(1+r²) avoids cancellation near r = 1
        q.powf(h - 2.0) * ((1.0 - r) * (1.0 - r) / q).powf(h - 1.0 + eps) * r.powi(k as i32)
    };
    Ok(c0(eps, d) * quadrature::adaptive(integrand, 0.0, 1.0, 1e-12)?)
}

/// Even symbol m written as Σ_k λ_k Σ_{deg ψ = k}⟨f, ψ⟩ψ on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenDecomposition {
    pub epsilon: f64,
    pub degree: usize,
    /// λ_0, λ_2, …, λ_K.
    pub lambdas: Vec<f64>,
    /// Density f on S¹ (arc-length measure) with ⟨f, ψ⟩ = ⟨m, ψ⟩/λ_{deg ψ}.
    pub density: CircleFunction,
    /// L² norm of the restriction beyond degree K.
    pub residual: f64,
}

impl EvenDecomposition {
    pub fn lambda(&self, k: usize) -> Option<f64> {
        if k % 2 == 0 {
            self.lambdas.get(k / 2).copied()
        } else {
            None
        }
    }

    /// Σ_k λ_k f̂_k e^{ikφ}: the truncated restriction of m.
    pub fn series_eval(&self, phi: f64) -> f64 {
        let mut s = Complex64::default();
        for k in -(self.degree as i64)..=self.degree as i64 {
            if k % 2 == 0 {
                s += self.lambdas[k.unsigned_abs() as usize / 2]
                    * self.density.coeff(k)
                    * Complex64::from_polar(1.0, k as f64 * phi);
            }
        }
        s.re
    }
}

/// Computes λ_k and the density f for an even planar symbol truncated at
/// degree K.
pub fn even_decompose(m: &Multiplier, eps: f64, degree: usize) -> Result<EvenDecomposition> {
    check_epsilon(eps)?;
    if m.parity() != Parity::EvenReal {
        return Err(domain("m", "even decomposition needs an even symbol"));
    }
    let (restriction, residual) = restrict_to_circle(m, degree)?;
    let lambdas = (0..=degree / 2)
        .map(|j| lambda_k(2 * j, eps, 2))
        .collect::<Result<Vec<_>>>()?;
    let mut density = CircleFunction::zero(degree);
    for k in -(degree as i64)..=degree as i64 {
        if k % 2 == 0 {
            let c = restriction.coeff(k) / lambdas[k.unsigned_abs() as usize / 2];
            density.set_coeff(k, c)?;
        }
    }
    Ok(EvenDecomposition {
        epsilon: eps,
        degree,
        lambdas,
        density,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenQuadrature {
    pub a_nodes: usize,
    pub theta_nodes: usize,
}

impl Default for EvenQuadrature {
    fn default() -> Self {
        Self {
            a_nodes: 64,
            theta_nodes: 4096,
        }
    }
}

/// ∫_{S¹}∫₀¹(1−a)^{ε−1} mₐ^θ(ξ) f(θ) da dθ with a = 1 − s^{1/ε}, which
/// turns the weight into the constant 1/ε. Gauss–Legendre in s, trapezoid
/// in θ.
pub fn even_reconstruct_pointwise(dec: &EvenDecomposition, xi: &[f64], quad: EvenQuadrature) -> Result<f64> {
    if xi.len() != 2 {
        return Err(domain("xi", "directions live in the plane"));
    }
    let r = xi[0].hypot(xi[1]);
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain("xi", "direction must be a nonzero finite vector"));
    }
    if quad.a_nodes == 0 || quad.theta_nodes == 0 {
        return Err(domain("quad", "node counts must be positive"));
    }
    let phi = xi[1].atan2(xi[0]);
    let m = quad.theta_nodes;
    let h = 2.0 * PI / m as f64;
    let samples: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let theta = j as f64 * h;
            let t = (theta - phi).cos();
            (t * t, dec.density.eval(theta).re)
        })
        .collect();
    let rule = quadrature::gauss_legendre(quad.a_nodes).on(0.0, 1.0);
    let eps = dec.epsilon;
    let parts = Exec::default().map(rule.len(), |i| {
        let a = 1.0 - rule.nodes[i].powf(1.0 / eps);
        let inner: f64 = samples.iter().map(|&(t2, f)| (1.0 - a) / (1.0 - a * a * t2) * f).sum();
        rule.weights[i] * inner * h
    });
    Ok(parts.iter().sum::<f64>() / eps)
}

fn check_unit(v: &[f64], name: &'static str) -> Result<()> {
    let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(domain(name, format!("norm {n} is not 1")));
    }
    Ok(())
}

/// ½(P(rξ, θ) + P(rξ, −θ)) for the Poisson kernel of the unit ball in R^d.
pub fn poisson_kernel_sym(r: f64, xi: &[f64], theta: &[f64], d: usize) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain("r", format!("{r} not in (0, 1)")));
    }
    if xi.len() != d || theta.len() != d {
        return Err(domain("xi", format!("vectors must have length {d}")));
    }
    check_unit(xi, "xi")?;
    check_unit(theta, "theta")?;
    let t: f64 = xi.iter().zip(theta).map(|(a, b)| a * b).sum();
    let h = d as f64 / 2.0;
    let p = |t: f64| (1.0 - r * r) / (1.0 + r * r - 2.0 * r * t).powf(h);
    Ok((p(t) + p(-t)) / (2.0 * sphere_area(d)))
}

/// The even Taylor series of the symmetrised Poisson kernel in ⟨ξ, θ⟩ = t,
/// summed over `terms` terms.
pub fn poisson_kernel_series(r: f64, t: f64, d: usize, terms: usize) -> f64 {
    let h = d as f64 / 2.0;
    let q = 1.0 + r * r;
    let u = 2.0 * r / q * t;
    let u2 = u * u;
    // binom(−d/2, j), advanced two steps at a time
    let mut binom = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..terms {
        sum += binom * power;
        let j = 2 * k;
        binom *= (-h - j as f64) / (j as f64 + 1.0) * (-h - j as f64 - 1.0) / (j as f64 + 2.0);
        power *= u2;
    }
    (1.0 - r * r) * q.powf(-h) / sphere_area(d) * sum
}
