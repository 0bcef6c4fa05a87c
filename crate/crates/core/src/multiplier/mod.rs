//! Homogeneous Fourier multipliers on the torus.

mod grid;
mod norm;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use grid::{grid_point, GridFunction, REAL_TOLERANCE};
pub(crate) use grid::is_nyquist;
pub use norm::{dual_exponent, lp_norm, p_star, NormParams, PointNorm};

use crate::error::{domain, Error, Result};
use crate::fft;
use crate::matrix::TransformMatrix;
use crate::quadrature;

pub type Symbol = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    EvenReal,
    OddImaginary,
}

/// A symbol m(ξ), homogeneous of order zero, with the zero mode fixed to the
/// sphere average.
#[derive(Clone)]
pub struct Multiplier {
    dim: usize,
    name: String,
    symbol: Symbol,
    parity: Parity,
    zero_value: f64,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .field("parity", &self.parity)
            .field("zero_value", &self.zero_value)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedMultiplier {
    /// −i·sgn(ξ) on the circle.
    Hilbert1d,
    /// ξ_k/(i|ξ|); `k` is one-based.
    Riesz { k: usize, d: usize },
    /// 2ξ₁²/|ξ|² − 1.
    M0 { d: usize },
    /// Real part of (ξ₁ − iξ₂)/(ξ₁ + iξ₂), equal to m₀ in the plane.
    BaReal,
    /// Imaginary part of (ξ₁ − iξ₂)/(ξ₁ + iξ₂): −2ξ₁ξ₂/|ξ|².
    BaImag,
    Constant { c: f64, d: usize },
    /// (1−a)/(1 − a²⟨ξ/|ξ|, θ⟩²).
    MATheta { a: f64, theta: Vec<f64> },
}

fn unit(xi: &[f64]) -> (f64, f64) {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    (r2.sqrt(), r2)
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(domain("d", format!("dimension {d} not in 1..=3")))
    }
}

impl Multiplier {
    /// Wraps a symbol after sampling it for homogeneity and the declared
    /// parity (relative deviation ≤ 1e−10).
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        parity: Parity,
        symbol: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(dim)?;
        let symbol: Symbol = Arc::new(symbol);
        let mut m = Self {
            dim,
            name: name.into(),
            symbol,
            parity,
            zero_value: 0.0,
        };
        m.validate(64)?;
        m.zero_value = sphere_average(&m)?;
        Ok(m)
    }

    pub fn named(which: &NamedMultiplier) -> Result<Self> {
        match which.clone() {
            NamedMultiplier::Hilbert1d => Self::new(1, "hilbert_1d", Parity::OddImaginary, |xi| {
                Complex64::new(0.0, -xi[0].signum())
            }),
            NamedMultiplier::Riesz { k, d } => {
                check_dim(d)?;
                if k == 0 || k > d {
                    return Err(domain("k", format!("Riesz index {k} not in 1..={d}")));
                }
                Self::new(d, format!("riesz({k},{d})"), Parity::OddImaginary, move |xi| {
                    let (r, _) = unit(xi);
                    Complex64::new(0.0, -xi[k - 1] / r)
                })
            }
            NamedMultiplier::M0 { d } => {
                check_dim(d)?;
                if d < 2 {
                    return Err(domain("d", "m0 needs d ≥ 2"));
                }
                Self::new(d, format!("m0({d})"), Parity::EvenReal, |xi| {
                    let (_, r2) = unit(xi);
                    Complex64::new(2.0 * xi[0] * xi[0] / r2 - 1.0, 0.0)
                })
            }
            NamedMultiplier::BaReal => Self::new(2, "ba_real", Parity::EvenReal, |xi| {
                let (_, r2) = unit(xi);
                Complex64::new((xi[0] * xi[0] - xi[1] * xi[1]) / r2, 0.0)
            }),
            NamedMultiplier::BaImag => Self::new(2, "ba_imag", Parity::EvenReal, |xi| {
                let (_, r2) = unit(xi);
                Complex64::new(-2.0 * xi[0] * xi[1] / r2, 0.0)
            }),
            NamedMultiplier::Constant { c, d } => {
                if !c.is_finite() {
                    return Err(domain("c", "constant must be finite"));
                }
                Self::new(d, format!("constant({c})"), Parity::EvenReal, move |_| Complex64::new(c, 0.0))
            }
            NamedMultiplier::MATheta { a, theta } => {
                if !(a > 0.0 && a < 1.0) {
                    return Err(domain("a", format!("{a} not in (0, 1)")));
                }
                let d = theta.len();
                check_dim(d)?;
                let (norm, _) = unit(&theta);
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(domain("theta", format!("|θ| = {norm}, expected a unit vector")));
                }
                Self::new(d, format!("m_a_theta({a})"), Parity::EvenReal, move |xi| {
                    let (r, _) = unit(xi);
                    let t: f64 = xi.iter().zip(&theta).map(|(x, y)| x * y).sum::<f64>() / r;
                    Complex64::new((1.0 - a) / (1.0 - a * a * t * t), 0.0)
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn zero_value(&self) -> f64 {
        self.zero_value
    }

    /// m(ξ) for ξ ≠ 0; the zero vector yields the sphere average.
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        if xi.iter().all(|&x| x == 0.0) {
            Complex64::new(self.zero_value, 0.0)
        } else {
            (self.symbol)(xi)
        }
    }

    /// Symbol at a lattice point, zero mode included.
    pub fn at_lattice(&self, k: &[i64]) -> Complex64 {
        let xi: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.eval(&xi)
    }

    /// Real-valued restriction for even symbols (imaginary part for odd ones,
    /// i.e. m = i·μ ⇒ μ).
    pub fn real_profile(&self, xi: &[f64]) -> f64 {
        let v = self.eval(xi);
        match self.parity {
            Parity::EvenReal => v.re,
            Parity::OddImaginary => v.im,
        }
    }

    fn validate(&self, samples: usize) -> Result<()> {
        let mut rng = crate::rng::stream(0x5eed, self.dim as u64);
        for _ in 0..samples {
            let xi: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
            let v = (self.symbol)(&xi);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(domain("symbol", format!("non-finite value at {xi:?}")));
            }
            let scale = v.norm().max(1.0);
            let lambda: f64 = rng.gen_range(0.1..10.0);
            let scaled: Vec<f64> = xi.iter().map(|x| x * lambda).collect();
            if ((self.symbol)(&scaled) - v).norm() > 1e-10 * scale {
                return Err(domain("symbol", format!("not homogeneous of order zero at {xi:?}")));
            }
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            let vn = (self.symbol)(&neg);
            let ok = match self.parity {
                Parity::EvenReal => (vn - v).norm() <= 1e-10 * scale && v.im.abs() <= 1e-10 * scale,
                Parity::OddImaginary => (vn + v).norm() <= 1e-10 * scale && v.re.abs() <= 1e-10 * scale,
            };
            if !ok {
                return Err(domain("symbol", format!("declared parity {:?} violated at {xi:?}", self.parity)));
            }
        }
        Ok(())
    }

    /// ξ ↦ m(Aξ).
    pub fn compose_with_linear_map(&self, a: &TransformMatrix) -> Result<Self> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        if a.det().abs() <= 1e-14 * scale.powi(self.dim as i32) {
            return Err(domain("matrix", "singular linear map"));
        }
        let inner = self.symbol.clone();
        let a = a.clone();
        Self::new(self.dim, format!("{}∘A", self.name), self.parity, move |xi| {
            inner(&a.apply(xi))
        })
    }

    /// Pointwise product m₁·m₂; the zero mode is recomputed.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let parity = if self.parity == other.parity {
            Parity::EvenReal
        } else {
            Parity::OddImaginary
        };
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        Self::new(self.dim, format!("{}·{}", self.name, other.name), parity, move |xi| a(xi) * b(xi))
    }

    /// Linear combination Σ cᵢ mᵢ of symbols sharing a parity.
    pub fn linear_combination(terms: &[(f64, &Multiplier)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| domain("terms", "empty combination"))?.1;
        if terms.iter().any(|(_, m)| m.dim != first.dim || m.parity != first.parity) {
            return Err(domain("terms", "all symbols must share dimension and parity"));
        }
        let parts: Vec<(f64, Symbol)> = terms.iter().map(|(c, m)| (*c, m.symbol.clone())).collect();
        Self::new(first.dim, "combination", first.parity, move |xi| {
            parts.iter().map(|(c, s)| s(xi) * *c).sum()
        })
    }

    /// Symbol values on the FFT bins of an `n`-point grid (Nyquist bins 0).
    pub fn table(&self, n: usize) -> Vec<Complex64> {
        let points = n.pow(self.dim as u32);
        let mut idx = vec![0usize; self.dim];
        let mut k = vec![0i64; self.dim];
        (0..points)
            .map(|flat| {
                fft::unravel(flat, self.dim, n, &mut idx);
                if is_nyquist(&idx, n) {
                    return Complex64::default();
                }
                for a in 0..self.dim {
                    k[a] = fft::freq(idx[a], n);
                }
                self.at_lattice(&k)
            })
            .collect()
    }

    /// T_m f: ĝ(k) = m(k) f̂(k), ĝ(0) = m(0) f̂(0). Real inputs stay real for
    /// even-real and odd-imaginary symbols.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        let table = self.table(f.n());
        Ok(apply_table(&table, f))
    }
}

/// Applies a precomputed symbol table (see [`Multiplier::table`]).
pub fn apply_table(table: &[Complex64], f: &GridFunction) -> GridFunction {
    assert_eq!(table.len(), f.points(), "symbol table does not match the grid");
    let mut g = f.clone();
    let (dim, n, points) = (f.dim(), f.n(), f.points());
    for block in g.values_mut().chunks_exact_mut(points) {
        fft::forward(block, dim, n);
        for (v, m) in block.iter_mut().zip(table) {
            *v *= m;
        }
        fft::inverse(block, dim, n);
    }
    g
}

/// Average of m over the unit sphere.
pub fn sphere_average(m: &Multiplier) -> Result<f64> {
    let f = |xi: &[f64]| (m.symbol)(xi).re;
    match m.dim {
        1 => Ok(0.5 * (f(&[1.0]) + f(&[-1.0]))),
        2 => {
            let n = 4096;
            let s: f64 = (0..n)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / n as f64;
                    f(&[phi.cos(), phi.sin()])
                })
                .sum();
            Ok(s / n as f64)
        }
        3 => {
            let gl = quadrature::gauss_legendre(96);
            let n_phi = 192;
            let mut s = 0.0;
            for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
                let rho = (1.0 - z * z).sqrt();
                let ring: f64 = (0..n_phi)
                    .map(|j| {
                        let phi = 2.0 * PI * j as f64 / n_phi as f64;
                        f(&[rho * phi.cos(), rho * phi.sin(), z])
                    })
                    .sum();
                s += w * ring / n_phi as f64;
            }
            Ok(s / 2.0)
        }
        d => Err(domain("d", format!("sphere average unsupported for d = {d}"))),
    }
}

/// (min, max) of an even real symbol over the unit sphere.
pub fn multiplier_extrema(m: &Multiplier, samples: usize) -> Result<(f64, f64)> {
    if m.parity != Parity::EvenReal {
        return Err(domain("multiplier", "extrema are defined for even real symbols"));
    }
    if samples < 256 {
        return Err(domain("samples", format!("{samples} < 256")));
    }
    let f = |xi: &[f64]| (m.symbol)(xi).re;
    match m.dim {
        1 => {
            let v = f(&[1.0]);
            Ok((v, v))
        }
        2 => {
            let g = |phi: f64| f(&[phi.cos(), phi.sin()]);
            let h = PI / samples as f64;
            let grid: Vec<f64> = (0..samples).map(|j| g(j as f64 * h)).collect();
            let refine = |sign: f64| {
                let j = (0..samples)
                    .max_by(|&a, &b| (sign * grid[a]).total_cmp(&(sign * grid[b])))
                    .unwrap();
                let c = j as f64 * h;
                let x = golden_max(|phi| sign * g(phi), c - h, c + h);
                (sign * g(x)).max(sign * grid[j]) * sign
            };
            Ok((refine(-1.0), refine(1.0)))
        }
        3 => {
            let to_xyz = |u: f64, phi: f64| {
                let z = u.clamp(-1.0, 1.0);
                let rho = (1.0 - z * z).sqrt();
                [rho * phi.cos(), rho * phi.sin(), z]
            };
            let golden = PI * (3.0 - 5f64.sqrt());
            let pts: Vec<(f64, f64)> = (0..samples)
                .map(|j| (1.0 - 2.0 * (j as f64 + 0.5) / samples as f64, golden * j as f64))
                .collect();
            let spacing = (4.0 * PI / samples as f64).sqrt();
            let refine = |sign: f64| {
                let (mut u, mut phi) = *pts
                    .iter()
                    .max_by(|a, b| (sign * f(&to_xyz(a.0, a.1))).total_cmp(&(sign * f(&to_xyz(b.0, b.1)))))
                    .unwrap();
                let mut best = sign * f(&to_xyz(u, phi));
                let mut step = spacing;
                while step > 1e-11 {
                    let mut improved = false;
                    for (du, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                        let (nu, np) = ((u + du).clamp(-1.0, 1.0), phi + dp);
                        let v = sign * f(&to_xyz(nu, np));
                        if v > best {
                            best = v;
                            u = nu;
                            phi = np;
                            improved = true;
                        }
                    }
                    if !improved {
                        step *= 0.5;
                    }
                }
                sign * best
            };
            Ok((refine(-1.0), refine(1.0)))
        }
        d => Err(domain("d", format!("unsupported dimension {d}"))),
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// 2/(δ⁺−δ⁻)·(1 + |δ⁺+δ⁻|/(|δ⁺|+|δ⁻|)).
pub fn umd_bound_factor_from(delta_minus: f64, delta_plus: f64) -> Result<f64> {
    if !(delta_plus > delta_minus) {
        return Err(domain("multiplier", "constant symbol (δ⁺ = δ⁻)"));
    }
    Ok(2.0 / (delta_plus - delta_minus)
        * (1.0 + (delta_plus + delta_minus).abs() / (delta_plus.abs() + delta_minus.abs())))
}

pub fn umd_bound_factor(m: &Multiplier) -> Result<f64> {
    let (lo, hi) = multiplier_extrema(m, 4096)?;
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(domain("multiplier", "constant symbol (δ⁺ = δ⁻)"));
    }
    umd_bound_factor_from(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m0() -> Multiplier {
        Multiplier::named(&NamedMultiplier::M0 { d: 2 }).unwrap()
    }

    #[test]
    fn m0_values_and_average() {
        let m = m0();
        assert_eq!(m.eval(&[1.0, 0.0]).re, 1.0);
        assert_eq!(m.eval(&[0.0, 1.0]).re, -1.0);
        assert!(m.zero_value().abs() < 1e-14);
        let m3 = Multiplier::named(&NamedMultiplier::M0 { d: 3 }).unwrap();
        // average of 2z² − 1 over S² is 2/3 − 1
        assert!((m3.zero_value() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn m_a_theta_closed_form() {
        let m = Multiplier::named(&NamedMultiplier::MATheta {
            a: 0.5,
            theta: vec![1.0, 0.0],
        })
        .unwrap();
        assert!((m.eval(&[1.0, 0.0]).re - 2.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = multiplier_extrema(&m, 256).unwrap();
        assert!((lo - 0.5).abs() < 1e-8 && (hi - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn bad_parameters_name_the_parameter() {
        let e = Multiplier::named(&NamedMultiplier::MATheta {
            a: 1.5,
            theta: vec![1.0, 0.0],
        })
        .unwrap_err();
        assert!(e.to_string().contains('a'), "{e}");
        match Multiplier::named(&NamedMultiplier::Riesz { k: 3, d: 2 }).unwrap_err() {
            Error::Domain { param, .. } => assert_eq!(param, "k"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn parity_violation_is_rejected() {
        let r = Multiplier::new(2, "bad", Parity::EvenReal, |xi| Complex64::new(xi[0] / xi[0].hypot(xi[1]), 0.0));
        assert!(r.is_err());
        let r = Multiplier::new(2, "inhomogeneous", Parity::EvenReal, |xi| Complex64::new(xi[0] * xi[0], 0.0));
        assert!(r.is_err());
    }

    #[test]
    fn extrema_in_three_dimensions() {
        let m3 = Multiplier::named(&NamedMultiplier::M0 { d: 3 }).unwrap();
        let (lo, hi) = multiplier_extrema(&m3, 512).unwrap();
        assert!((lo + 1.0).abs() < 1e-8 && (hi - 1.0).abs() < 1e-8, "{lo} {hi}");
    }

    #[test]
    fn umd_factor_examples() {
        assert!((umd_bound_factor(&m0()).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(umd_bound_factor_from(0.0, 1.0).unwrap(), 4.0);
        assert_eq!(umd_bound_factor_from(-2.0, 2.0).unwrap(), 0.5);
        let c = Multiplier::named(&NamedMultiplier::Constant { c: 2.0, d: 2 }).unwrap();
        assert!(umd_bound_factor(&c).is_err());
    }
}
