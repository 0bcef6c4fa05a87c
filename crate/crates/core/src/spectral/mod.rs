//! Decompositions of planar symbols through their restriction to the unit
//! circle: even symbols into the Poisson family mₐ^θ, odd symbols into
//! directional Hilbert transforms.

mod even;
mod odd;

pub use even::{
    even_decompose, even_reconstruct_pointwise, lambda_k, poisson_kernel_series, poisson_kernel_sym,
    sphere_area, EvenDecomposition, EvenQuadrature,
};
pub use odd::{directional_hilbert, rotations_decompose_odd_2d, rotations_reconstruct, RotationRule};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fft;
use crate::multiplier::{Multiplier, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleParity {
    Even,
    Odd,
    Mixed,
}

/// Trigonometric polynomial φ ↦ Σ_{|k|≤K} c_k e^{ikφ} on S¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleFunction {
    degree: usize,
    /// c_{−K}, …, c_K.
    coefficients: Vec<Complex64>,
}

impl CircleFunction {
    pub fn new(degree: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != 2 * degree + 1 {
            return Err(domain(
                "coefficients",
                format!("expected {} coefficients for degree {degree}, got {}", 2 * degree + 1, coefficients.len()),
            ));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(domain("coefficients", "non-finite coefficient"));
        }
        Ok(Self { degree, coefficients })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coefficients: vec![Complex64::default(); 2 * degree + 1],
        }
    }

    /// Coefficients c_k = (1/M)Σ g(φ_j)e^{−ikφ_j}, φ_j = 2πj/M, of samples of
    /// `g`, kept up to degree K; the second value is the L² norm (normalised
    /// measure) of the discarded modes.
    pub fn from_fn(degree: usize, samples: usize, g: impl Fn(f64) -> Complex64) -> Result<(Self, f64)> {
        let m = samples.max(4 * (degree + 1)).next_power_of_two();
        let mut data: Vec<Complex64> = (0..m).map(|j| g(2.0 * PI * j as f64 / m as f64)).collect();
        fft::forward(&mut data, 1, m);
        let mut out = Self::zero(degree);
        let mut tail = 0.0;
        for (i, v) in data.iter().enumerate() {
            let k = fft::freq(i, m);
            let c = v / m as f64;
            if k.unsigned_abs() as usize <= degree {
                out.coefficients[(k + degree as i64) as usize] = c;
            } else {
                tail += c.norm_sqr();
            }
        }
        Ok((out, tail.sqrt()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            Complex64::default()
        } else {
            self.coefficients[(k + self.degree as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, c: Complex64) -> Result<()> {
        if k.unsigned_abs() as usize > self.degree {
            return Err(domain("k", format!("|{k}| exceeds degree {}", self.degree)));
        }
        self.coefficients[(k + self.degree as i64) as usize] = c;
        Ok(())
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        (-(self.degree as i64)..=self.degree as i64)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, k as f64 * phi))
            .sum()
    }

    /// Value at a point of the plane through its angle.
    pub fn eval_direction(&self, xi: &[f64]) -> Complex64 {
        self.eval(xi[1].atan2(xi[0]))
    }

    /// c_{−k} = conj(c_k) up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        (1..=self.degree as i64).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
            && self.coeff(0).im.abs() <= tol
    }

    pub fn parity(&self, tol: f64) -> CircleParity {
        let mut even = false;
        let mut odd = false;
        for k in -(self.degree as i64)..=self.degree as i64 {
            if self.coeff(k).norm() > tol {
                if k % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (_, false) => CircleParity::Even,
            (false, true) => CircleParity::Odd,
            (true, true) => CircleParity::Mixed,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let degree = self.degree.max(other.degree);
        let coefficients = (-(degree as i64)..=degree as i64)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        Self { degree, coefficients }
    }

    /// L² norm under the normalised measure.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The planar symbol ξ ↦ g(ξ/|ξ|). Even functions become even-real
    /// symbols, odd ones odd-imaginary; anything else is rejected.
    pub fn to_multiplier(&self, name: impl Into<String>) -> Result<Multiplier> {
        let parity = match self.parity(1e-14 * self.l2_norm().max(1.0)) {
            CircleParity::Even => Parity::EvenReal,
            CircleParity::Odd => Parity::OddImaginary,
            CircleParity::Mixed => return Err(domain("g", "mixes even and odd modes")),
        };
        let g = self.clone();
        Multiplier::new(2, name, parity, move |xi| g.eval_direction(xi))
    }
}

/// Restriction φ ↦ m(cos φ, sin φ) of a planar symbol, truncated at degree
/// K, with the L² norm of the discarded tail.
pub fn restrict_to_circle(m: &Multiplier, degree: usize) -> Result<(CircleFunction, f64)> {
    if m.dim() != 2 {
        return Err(domain("m", format!("circle decompositions need d = 2, got {}", m.dim())));
    }
    CircleFunction::from_fn(degree, 4096.max(16 * (degree + 1)), |phi| m.eval(&[phi.cos(), phi.sin()]))
}
