//! Functions sampled on a uniform torus grid.
//!
//! Grid points are θ_j = −π + 2πj/N on each axis. Values are stored with
//! shape `(value_dim, N, …, N)` in row-major order, so each component is a
//! contiguous block of N^d samples. Fourier coefficients use the normalised
//! convention f̂(k) = N^{-d} Σ_j f(θ_j) e^{-i⟨k,θ_j⟩}.
//!
//! Every constructor and every spectral operation zeroes the Nyquist bins
//! (any axis with |k_i| = N/2), which keeps real inputs real under odd
//! symbols.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::fft;

/// Residual allowed in the imaginary part of a function flagged real.
pub const REAL_TOLERANCE: f64 = 1e-12;

const GFN_MAGIC: &[u8; 4] = b"GFN1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim: usize,
    n: usize,
    value_dim: usize,
    real: bool,
    values: Vec<Complex64>,
}

fn check_shape(dim: usize, n: usize, value_dim: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(domain("dim", format!("grid dimension {dim} not in 1..=3")));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(domain("n", format!("points per axis {n} must be a power of two ≥ 2")));
    }
    if value_dim == 0 {
        return Err(domain("value_dim", "must be at least 1"));
    }
    Ok(())
}

impl GridFunction {
    pub fn zeros(dim: usize, n: usize, value_dim: usize) -> Result<Self> {
        check_shape(dim, n, value_dim)?;
        Ok(Self {
            dim,
            n,
            value_dim,
            real: true,
            values: vec![Complex64::default(); value_dim * n.pow(dim as u32)],
        })
    }

    /// Builds a function from raw samples; the samples are band-limited
    /// (Nyquist bins removed) on the way in.
    pub fn from_values(
        dim: usize,
        n: usize,
        value_dim: usize,
        values: Vec<Complex64>,
        real: bool,
    ) -> Result<Self> {
        check_shape(dim, n, value_dim)?;
        let expected = value_dim * n.pow(dim as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if real {
            let worst = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            if worst > REAL_TOLERANCE {
                return Err(domain("values", format!("flagged real but imaginary residual is {worst:e}")));
            }
        }
        let mut f = Self {
            dim,
            n,
            value_dim,
            real,
            values,
        };
        f.spectral_map(|_, _| Complex64::new(1.0, 0.0));
        Ok(f)
    }

    /// Samples a real scalar function at the grid points.
    pub fn from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn_vec(dim, n, 1, |theta, out| out[0] = f(theta))
    }

    /// Samples a real `value_dim`-valued function at the grid points.
    pub fn from_fn_vec(
        dim: usize,
        n: usize,
        value_dim: usize,
        f: impl Fn(&[f64], &mut [f64]),
    ) -> Result<Self> {
        check_shape(dim, n, value_dim)?;
        let points = n.pow(dim as u32);
        let mut values = vec![Complex64::default(); value_dim * points];
        let mut idx = vec![0usize; dim];
        let mut theta = vec![0.0; dim];
        let mut out = vec![0.0; value_dim];
        for flat in 0..points {
            fft::unravel(flat, dim, n, &mut idx);
            for a in 0..dim {
                theta[a] = grid_point(idx[a], n);
            }
            f(&theta, &mut out);
            for c in 0..value_dim {
                values[c * points + flat] = Complex64::new(out[c], 0.0);
            }
        }
        Self::from_values(dim, n, value_dim, values, true)
    }

    /// Builds a function from normalised Fourier coefficients laid out in FFT
    /// bin order (same shape as the values).
    pub fn from_coefficients(
        dim: usize,
        n: usize,
        value_dim: usize,
        coefficients: Vec<Complex64>,
        real: bool,
    ) -> Result<Self> {
        check_shape(dim, n, value_dim)?;
        let points = n.pow(dim as u32);
        if coefficients.len() != value_dim * points {
            return Err(Error::DimensionMismatch {
                expected: value_dim * points,
                found: coefficients.len(),
            });
        }
        let mut values = coefficients;
        let mut idx = vec![0usize; dim];
        for block in values.chunks_exact_mut(points) {
            for (flat, v) in block.iter_mut().enumerate() {
                fft::unravel(flat, dim, n, &mut idx);
                if is_nyquist(&idx, n) {
                    *v = Complex64::default();
                } else {
                    *v *= alternating_sign(&idx, n) * points as f64;
                }
            }
            fft::inverse(block, dim, n);
        }
        if real {
            values.iter_mut().for_each(|v| v.im = 0.0);
        }
        Ok(Self {
            dim,
            n,
            value_dim,
            real,
            values,
        })
    }

    /// Random real trigonometric polynomial with modes |k_i| ≤ `band`.
    /// Coefficients are standard normal, Hermitian-paired.
    pub fn random_trig<R: Rng + ?Sized>(
        dim: usize,
        n: usize,
        band: usize,
        mean_zero: bool,
        rng: &mut R,
    ) -> Result<Self> {
        check_shape(dim, n, 1)?;
        if band >= n / 2 {
            return Err(domain("band", format!("band {band} must be below N/2 = {}", n / 2)));
        }
        let points = n.pow(dim as u32);
        let mut coeffs = vec![Complex64::default(); points];
        let mut idx = vec![0usize; dim];
        let mut k = vec![0i64; dim];
        for flat in 0..points {
            fft::unravel(flat, dim, n, &mut idx);
            for a in 0..dim {
                k[a] = fft::freq(idx[a], n);
            }
            if k.iter().any(|&ki| ki.unsigned_abs() as usize > band) || is_nyquist(&idx, n) {
                continue;
            }
            if mean_zero && k.iter().all(|&ki| ki == 0) {
                continue;
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            coeffs[flat] = Complex64::new(re, im);
        }
        hermitian_symmetrize(&mut coeffs, dim, n);
        Self::from_coefficients(dim, n, 1, coeffs, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let p = self.points();
        &self.values[c * p..(c + 1) * p]
    }

    /// Grid coordinates of the flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.dim];
        fft::unravel(flat, self.dim, self.n, &mut idx);
        idx.iter().map(|&i| grid_point(i, self.n)).collect()
    }

    /// Largest |Im f| over the grid.
    pub fn imag_residual(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Normalised Fourier coefficients of every component, FFT bin order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let points = self.points();
        let mut out = self.values.clone();
        let mut idx = vec![0usize; self.dim];
        for block in out.chunks_exact_mut(points) {
            fft::forward(block, self.dim, self.n);
            for (flat, v) in block.iter_mut().enumerate() {
                fft::unravel(flat, self.dim, self.n, &mut idx);
                *v *= alternating_sign(&idx, self.n) / points as f64;
            }
        }
        out
    }

    /// Mean of each component.
    pub fn mean(&self) -> Vec<Complex64> {
        let p = self.points() as f64;
        (0..self.value_dim)
            .map(|c| self.component(c).iter().sum::<Complex64>() / p)
            .collect()
    }

    /// Multiplies every Fourier coefficient by `rule(k, component)`; the
    /// zero-phase convention makes the grid offset irrelevant here. Nyquist
    /// bins are cleared.
    pub fn spectral_map(&mut self, rule: impl Fn(&[i64], usize) -> Complex64) {
        let (dim, n) = (self.dim, self.n);
        let points = self.points();
        let mut idx = vec![0usize; dim];
        let mut k = vec![0i64; dim];
        for (c, block) in self.values.chunks_exact_mut(points).enumerate() {
            fft::forward(block, dim, n);
            for (flat, v) in block.iter_mut().enumerate() {
                fft::unravel(flat, dim, n, &mut idx);
                if is_nyquist(&idx, n) {
                    *v = Complex64::default();
                    continue;
                }
                for a in 0..dim {
                    k[a] = fft::freq(idx[a], n);
                }
                *v *= rule(&k, c);
            }
            fft::inverse(block, dim, n);
        }
    }

    /// Same function resampled on an `m`-point grid by zero padding (or
    /// truncating) its spectrum. Exact when the spectrum fits.
    pub fn regrid(&self, m: usize) -> Result<Self> {
        check_shape(self.dim, m, self.value_dim)?;
        let coeffs = self.coefficients();
        let points = self.points();
        let target_points = m.pow(self.dim as u32);
        let mut out = vec![Complex64::default(); self.value_dim * target_points];
        let mut idx = vec![0usize; self.dim];
        for c in 0..self.value_dim {
            'bins: for flat in 0..points {
                fft::unravel(flat, self.dim, self.n, &mut idx);
                let mut target = 0usize;
                for &i in &idx {
                    match fft::bin(fft::freq(i, self.n), m) {
                        Some(b) => target = target * m + b,
                        None => continue 'bins,
                    }
                }
                out[c * target_points + target] = coeffs[c * points + flat];
            }
        }
        Self::from_coefficients(self.dim, m, self.value_dim, out, self.real)
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `self + s·other`.
    pub fn axpy(&mut self, s: f64, other: &GridFunction) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * s;
        }
        self.real &= other.real;
        Ok(())
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.value_dim != other.value_dim {
            return Err(Error::DimensionMismatch {
                expected: self.value_dim,
                found: other.value_dim,
            });
        }
        Ok(())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// g(x) = f(Bᵀx) for an integer matrix B (rows given), sampled on an
    /// `n_out`-point grid: the coefficient of f at k moves to Bk. For
    /// nonsingular B this preserves every L^p norm and turns T_m into
    /// T_{m∘B⁻¹} conjugated by the substitution.
    pub fn lattice_map(&self, b: &[Vec<i64>], n_out: usize) -> Result<Self> {
        let d = self.dim;
        if b.len() != d || b.iter().any(|r| r.len() != d) {
            return Err(domain("b", format!("expected a {d}×{d} integer matrix")));
        }
        let det = crate::matrix::TransformMatrix::from_rows(
            &b.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<Vec<f64>>>(),
        )?
        .det();
        if det.abs() < 0.5 {
            return Err(domain("b", "matrix is singular"));
        }
        check_shape(d, n_out, self.value_dim)?;
        let coeffs = self.coefficients();
        let points = self.points();
        let out_points = n_out.pow(d as u32);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut out = vec![Complex64::default(); self.value_dim * out_points];
        let mut idx = vec![0usize; d];
        let mut k = vec![0i64; d];
        for c in 0..self.value_dim {
            for flat in 0..points {
                let v = coeffs[c * points + flat];
                if v.norm() <= 1e-15 * scale {
                    continue;
                }
                fft::unravel(flat, d, self.n, &mut idx);
                for a in 0..d {
                    k[a] = fft::freq(idx[a], self.n);
                }
                let mut target = 0usize;
                for row in b {
                    let kk: i64 = row.iter().zip(&k).map(|(x, y)| x * y).sum();
                    match fft::bin(kk, n_out).filter(|_| 2 * kk.unsigned_abs() as usize != n_out) {
                        Some(i) => target = target * n_out + i,
                        None => {
                            return Err(domain("n_out", format!("mode {kk} does not fit on {n_out} points")));
                        }
                    }
                }
                out[c * out_points + target] += v;
            }
        }
        Self::from_coefficients(d, n_out, self.value_dim, out, self.real)
    }

    /// Writes the GFN1 encoding (see the README for the byte layout).
    pub fn write_gfn<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(GFN_MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.value_dim as u32).to_le_bytes())?;
        w.write_all(&[u8::from(self.real)])?;
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_gfn<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != GFN_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}, expected GFN1")));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<usize> {
            r.read_exact(&mut word)?;
            Ok(u32::from_le_bytes(word) as usize)
        };
        let dim = read_u32(&mut r)?;
        let n = read_u32(&mut r)?;
        let value_dim = read_u32(&mut r)?;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let real = match flag[0] {
            0 => false,
            1 => true,
            other => return Err(Error::Format(format!("realness flag must be 0 or 1, got {other}"))),
        };
        check_shape(dim, n, value_dim)?;
        let count = value_dim * n.pow(dim as u32);
        let mut payload = vec![0u8; count * 16];
        r.read_exact(&mut payload)
            .map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
        let values = payload
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Ok(Self {
            dim,
            n,
            value_dim,
            real,
            values,
        })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_gfn(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_gfn(std::io::BufReader::new(file))
    }
}

#[inline]
pub fn grid_point(j: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / n as f64
}

#[inline]
pub(crate) fn is_nyquist(idx: &[usize], n: usize) -> bool {
    idx.contains(&(n / 2))
}

/// e^{iπΣk}: the phase between the plain DFT and coefficients taken with
/// the grid starting at −π.
#[inline]
fn alternating_sign(idx: &[usize], n: usize) -> f64 {
    let s: i64 = idx.iter().map(|&i| fft::freq(i, n)).sum();
    if s.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forces c(−k) = conj c(k) by averaging each pair.
pub(crate) fn hermitian_symmetrize(coeffs: &mut [Complex64], dim: usize, n: usize) {
    let points = n.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    for flat in 0..points {
        fft::unravel(flat, dim, n, &mut idx);
        let mut mirror = 0usize;
        for &i in &idx {
            mirror = mirror * n + (n - i) % n;
        }
        if mirror < flat {
            continue;
        }
        let a = coeffs[flat];
        let b = coeffs[mirror].conj();
        let avg = (a + b) * 0.5;
        coeffs[flat] = avg;
        coeffs[mirror] = avg.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn coefficients_of_cosine() {
        let f = GridFunction::from_fn(2, 16, |t| (t[0]).cos()).unwrap();
        let c = f.coefficients();
        let n = 16;
        let at = |k1: i64, k2: i64| c[fft::bin(k1, n).unwrap() * n + fft::bin(k2, n).unwrap()];
        assert!((at(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((at(-1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(at(0, 1).norm() < 1e-14);
    }

    #[test]
    fn coefficient_roundtrip_and_sine_phase() {
        let f = GridFunction::from_fn(1, 32, |t| (3.0 * t[0]).sin()).unwrap();
        let c = f.coefficients();
        // sin(3θ) = (e^{3iθ} − e^{−3iθ}) / 2i
        assert!((c[3] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        let g = GridFunction::from_coefficients(1, 32, 1, c, true).unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
    }

    #[test]
    fn nyquist_is_removed_on_construction() {
        let f = GridFunction::from_fn(1, 8, |t| (4.0 * t[0]).cos() + t[0].cos()).unwrap();
        let c = f.coefficients();
        assert!(c[4].norm() < 1e-15);
        let g = GridFunction::from_fn(1, 8, |t| t[0].cos()).unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
    }

    #[test]
    fn regrid_is_exact_for_band_limited() {
        let mut r = rng::stream(3, 0);
        let f = GridFunction::random_trig(2, 16, 5, true, &mut r).unwrap();
        let g = f.regrid(64).unwrap();
        let back = g.regrid(16).unwrap();
        assert!(f.max_abs_diff(&back) < 1e-13);
        // values agree where the grids coincide (every fourth fine point)
        for j1 in 0..16 {
            for j2 in 0..16 {
                let a = f.values()[j1 * 16 + j2];
                let b = g.values()[(4 * j1) * 64 + 4 * j2];
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn random_trig_is_real_and_mean_zero() {
        let mut r = rng::stream(9, 1);
        let f = GridFunction::random_trig(3, 8, 2, true, &mut r).unwrap();
        assert!(f.imag_residual() < 1e-15);
        assert!(f.mean()[0].norm() < 1e-14);
    }

    #[test]
    fn gfn_roundtrip_and_header() {
        let f = GridFunction::from_fn_vec(2, 4, 2, |t, out| {
            out[0] = t[0].sin();
            out[1] = t[1].cos();
        })
        .unwrap();
        let mut bytes = Vec::new();
        f.write_gfn(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"GFN1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(bytes[16], 1);
        assert_eq!(bytes.len(), 17 + 2 * 16 * 16);
        let g = GridFunction::read_gfn(bytes.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn gfn_rejects_garbage() {
        assert!(GridFunction::read_gfn(&b"GFN2\0\0\0\0"[..]).is_err());
        let mut bytes = Vec::new();
        GridFunction::zeros(1, 4, 1).unwrap().write_gfn(&mut bytes).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(GridFunction::read_gfn(bytes.as_slice()).is_err());
    }

    #[test]
    fn shape_errors() {
        assert!(GridFunction::zeros(4, 8, 1).is_err());
        assert!(GridFunction::zeros(2, 12, 1).is_err());
        assert!(GridFunction::zeros(2, 8, 0).is_err());
    }

    #[test]
    fn lattice_map_moves_modes() {
        let f = GridFunction::from_fn(2, 8, |t| t[0].cos() + (2.0 * t[1]).sin()).unwrap();
        let b = vec![vec![1, -1], vec![1, 1]];
        let g = f.lattice_map(&b, 16).unwrap();
        // f(Bᵀx) with Bᵀx = (x₁ + x₂, −x₁ + x₂)
        let expect = GridFunction::from_fn(2, 16, |t| (t[0] + t[1]).cos() + (2.0 * (t[1] - t[0])).sin()).unwrap();
        assert!(g.max_abs_diff(&expect) < 1e-13);
        assert!(f.lattice_map(&b, 4).is_err());
        assert!(f.lattice_map(&[vec![1, 1], vec![1, 1]], 16).is_err());
    }
}
