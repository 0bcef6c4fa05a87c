//! Multi-dimensional FFTs on cubic grids stored row-major.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<usize, Plans>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, map) = &mut *guard;
    if let Some(p) = map.get(&n) {
        return p.clone();
    }
    let p = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    map.insert(n, p.clone());
    p
}

/// Unnormalised forward transform in place: X(k) = Σ_j x(j) e^{-2πi⟨k,j⟩/n}.
pub fn forward(data: &mut [Complex64], dim: usize, n: usize) {
    let (fwd, _) = plans(n);
    transform(data, dim, n, fwd.as_ref());
}

/// Inverse transform including the 1/n^d factor.
pub fn inverse(data: &mut [Complex64], dim: usize, n: usize) {
    let (_, inv) = plans(n);
    transform(data, dim, n, inv.as_ref());
    let scale = 1.0 / (n.pow(dim as u32) as f64);
    data.iter_mut().for_each(|v| *v *= scale);
}

fn transform(data: &mut [Complex64], dim: usize, n: usize, fft: &dyn Fft<f64>) {
    let total = n.pow(dim as u32);
    assert_eq!(data.len(), total, "fft buffer has wrong length");
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // last axis is contiguous
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim.saturating_sub(1) {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

/// Signed frequency of FFT bin `i` on an `n`-point axis.
#[inline]
pub fn freq(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT bin holding signed frequency `k`; `None` when `|k|` does not fit.
#[inline]
pub fn bin(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k >= half || k < -half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

/// Decomposes a flat row-major index into per-axis bins.
#[inline]
pub fn unravel(mut flat: usize, dim: usize, n: usize, out: &mut [usize]) {
    for a in (0..dim).rev() {
        out[a] = flat % n;
        flat /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_3d() {
        let n = 8;
        let mut v: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = v.clone();
        forward(&mut v, 3, n);
        inverse(&mut v, 3, n);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let n = 16;
        let (k1, k2) = (3i64, -5i64);
        let mut v: Vec<Complex64> = (0..n * n)
            .map(|flat| {
                let (j1, j2) = (flat / n, flat % n);
                let ph = 2.0 * std::f64::consts::PI * (k1 * j1 as i64 + k2 * j2 as i64) as f64 / n as f64;
                Complex64::from_polar(1.0, ph)
            })
            .collect();
        forward(&mut v, 2, n);
        let at = bin(k1, n).unwrap() * n + bin(k2, n).unwrap();
        assert!((v[at] - Complex64::new((n * n) as f64, 0.0)).norm() < 1e-9);
        assert_eq!(freq(bin(-8, n).unwrap(), n), -8);
        assert_eq!(bin(8, n), None);
    }
}
