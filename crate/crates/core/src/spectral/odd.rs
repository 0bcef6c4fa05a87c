use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{restrict_to_circle, CircleFunction};
use crate::error::{domain, Result};
use crate::fft;
use crate::multiplier::{GridFunction, Multiplier, Parity};

/// Complex Fourier coefficient of φ ↦ sgn(cos φ) at frequency n.
fn sgn_cos_coefficient(n: i64) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    let j = (n.unsigned_abs() - 1) / 2;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    2.0 * sign / (PI * n.unsigned_abs() as f64)
}

/// Ω with m(ξ) = ∫_{S¹} Ω(θ)(−i)sgn⟨ξ, θ⟩ dθ (arc length) for an odd
/// symbol truncated at degree K. Each odd harmonic is divided by the
/// matching harmonic of sgn(cos).
pub fn rotations_decompose_odd_2d(m: &Multiplier, degree: usize) -> Result<CircleFunction> {
    if m.parity() != Parity::OddImaginary {
        return Err(domain("m", "the method of rotations needs an odd symbol"));
    }
    let (restriction, _) = restrict_to_circle(m, degree)?;
    let mut omega = CircleFunction::zero(degree);
    for n in -(degree as i64)..=degree as i64 {
        if n % 2 != 0 {
            let c = Complex64::i() * restriction.coeff(n) / (2.0 * PI * sgn_cos_coefficient(n));
            omega.set_coeff(n, c)?;
        }
    }
    Ok(omega)
}

fn check_plane(theta: &[f64], f: &GridFunction) -> Result<()> {
    if f.dim() != 2 || theta.len() != 2 {
        return Err(domain("f", "directional transforms are planar"));
    }
    Ok(())
}

fn sgn_dot(k: &[i64], theta: &[f64]) -> f64 {
    let dot = k[0] as f64 * theta[0] + k[1] as f64 * theta[1];
    let scale = (k[0] as f64).hypot(k[1] as f64);
    if dot.abs() <= 1e-12 * scale {
        0.0
    } else {
        dot.signum()
    }
}

/// H_θ with symbol −i·sgn⟨ξ, θ⟩, zero where ⟨k, θ⟩ = 0.
pub fn directional_hilbert(theta: &[f64], f: &GridFunction) -> Result<GridFunction> {
    check_plane(theta, f)?;
    let mut g = f.clone();
    g.spectral_map(|k, _| Complex64::new(0.0, -sgn_dot(k, theta)));
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationRule {
    /// Σ_j (2π/M)Ω(θ_j)H_{θ_j}f. First order because sgn⟨k, ·⟩ jumps.
    Trapezoid,
    /// Trapezoid sums give the Fourier coefficients of Ω, which are then
    /// paired exactly with those of sgn⟨k, ·⟩. Exact once M > 2·deg Ω.
    #[default]
    ProductTrapezoid,
}

/// ∫ Ω(θ)H_θ f dθ on `theta_nodes` equispaced directions.
pub fn rotations_reconstruct(
    omega: &CircleFunction,
    f: &GridFunction,
    theta_nodes: usize,
    rule: RotationRule,
) -> Result<GridFunction> {
    check_plane(&[1.0, 0.0], f)?;
    if theta_nodes < 2 {
        return Err(domain("theta_nodes", "need at least two directions"));
    }
    let m = theta_nodes;
    let h = 2.0 * PI / m as f64;
    let samples: Vec<Complex64> = (0..m).map(|j| omega.eval(j as f64 * h)).collect();
    let mut g = f.clone();
    match rule {
        RotationRule::Trapezoid => {
            let dirs: Vec<[f64; 2]> = (0..m).map(|j| [(j as f64 * h).cos(), (j as f64 * h).sin()]).collect();
            g.spectral_map(|k, _| {
                let s: Complex64 = dirs.iter().zip(&samples).map(|(d, w)| w * sgn_dot(k, d)).sum();
                Complex64::new(0.0, -1.0) * s * h
            });
        }
        RotationRule::ProductTrapezoid => {
            let mut coeffs = samples;
            fft::forward(&mut coeffs, 1, m);
            let pairs: Vec<(i64, Complex64)> = coeffs
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    let n = fft::freq(i, m);
                    // the Nyquist mode is ambiguous between ±M/2
                    (n % 2 != 0 && 2 * n.unsigned_abs() as usize != m)
                        .then(|| (n, c / m as f64 * 2.0 * PI * sgn_cos_coefficient(n)))
                })
                .collect();
            g.spectral_map(|k, _| {
                if k[0] == 0 && k[1] == 0 {
                    return Complex64::default();
                }
                let phi = (k[1] as f64).atan2(k[0] as f64);
                let s: Complex64 = pairs
                    .iter()
                    .map(|&(n, w)| w * Complex64::from_polar(1.0, n as f64 * phi))
                    .sum();
                Complex64::new(0.0, -1.0) * s
            });
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::NamedMultiplier;

    #[test]
    fn riesz_needs_a_single_harmonic() {
        let r1 = Multiplier::named(&NamedMultiplier::Riesz { k: 1, d: 2 }).unwrap();
        let omega = rotations_decompose_odd_2d(&r1, 7).unwrap();
        for n in -7i64..=7 {
            let expect = if n.abs() == 1 { 0.125 } else { 0.0 };
            assert!((omega.coeff(n) - expect).norm() < 1e-14, "{n} {}", omega.coeff(n));
        }
        let f = GridFunction::from_fn(2, 16, |t| t[0].cos()).unwrap();
        let g = rotations_reconstruct(&omega, &f, 64, RotationRule::ProductTrapezoid).unwrap();
        let expect = GridFunction::from_fn(2, 16, |t| t[0].sin()).unwrap();
        assert!(g.max_abs_diff(&expect) < 1e-13);
        let even = Multiplier::named(&NamedMultiplier::M0 { d: 2 }).unwrap();
        assert!(rotations_decompose_odd_2d(&even, 7).is_err());
    }

    #[test]
    fn directional_hilbert_on_axes() {
        let f = GridFunction::from_fn(2, 8, |t| t[0].sin()).unwrap();
        let g = directional_hilbert(&[1.0, 0.0], &f).unwrap();
        let expect = GridFunction::from_fn(2, 8, |t| -t[0].cos()).unwrap();
        assert!(g.max_abs_diff(&expect) < 1e-14);
        let z = directional_hilbert(&[0.0, 1.0], &f).unwrap();
        assert!(z.values().iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn plain_trapezoid_converges_slowly() {
        let r1 = Multiplier::named(&NamedMultiplier::Riesz { k: 1, d: 2 }).unwrap();
        let omega = rotations_decompose_odd_2d(&r1, 3).unwrap();
        let f = GridFunction::from_fn(2, 16, |t| (t[0] + 2.0 * t[1]).cos()).unwrap();
        let exact = r1.apply(&f).unwrap();
        let coarse = rotations_reconstruct(&omega, &f, 64, RotationRule::Trapezoid).unwrap();
        let fine = rotations_reconstruct(&omega, &f, 1024, RotationRule::Trapezoid).unwrap();
        let (ec, ef) = (coarse.max_abs_diff(&exact), fine.max_abs_diff(&exact));
        assert!(ef < ec && ef < 1e-2, "{ec} {ef}");
    }
}
