//! Normalised block sums of sines and cosines of uniform angles.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub block_length: usize,
    pub samples: usize,
    pub mean: [f64; 2],
    /// [[E s², E sc], [E sc, E c²]] (centred).
    pub covariance: [[f64; 2]; 2],
    /// Max |covariance − I|.
    pub distance_from_identity: f64,
    /// E s⁴ / (E s²)², equal to 3 for a Gaussian.
    pub kurtosis_s: f64,
    pub max_abs_s: f64,
}

/// s = (L/2)^{-1/2} Σ_{j≤L} sin t_j and c likewise with cos, for independent
/// uniform angles t_j.
pub fn clt_block_average(block_length: usize, samples: usize, seed: u64, exec: Exec) -> Result<CltReport> {
    if block_length == 0 {
        return Err(domain("block_length", "must be at least 1"));
    }
    if samples < 2 {
        return Err(domain("samples", "need at least 2 samples"));
    }
    let batches = samples.min(64);
    let scale = (block_length as f64 / 2.0).sqrt().recip();
    let parts = exec.map(batches, |b| {
        let count = samples / batches + usize::from(b < samples % batches);
        let mut r = rng::stream(seed, b as u64);
        // Σs, Σc, Σs², Σc², Σsc, Σs⁴, max|s|
        let mut acc = [0.0f64; 7];
        for _ in 0..count {
            let (mut s, mut c) = (0.0, 0.0);
            for _ in 0..block_length {
                let t: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                let (st, ct) = t.sin_cos();
                s += st;
                c += ct;
            }
            s *= scale;
            c *= scale;
            acc[0] += s;
            acc[1] += c;
            acc[2] += s * s;
            acc[3] += c * c;
            acc[4] += s * c;
            acc[5] += s.powi(4);
            acc[6] = acc[6].max(s.abs());
        }
        acc
    });
    let mut tot = [0.0f64; 7];
    for p in &parts {
        for i in 0..6 {
            tot[i] += p[i];
        }
        tot[6] = tot[6].max(p[6]);
    }
    let n = samples as f64;
    let mean = [tot[0] / n, tot[1] / n];
    let vs = tot[2] / n - mean[0] * mean[0];
    let vc = tot[3] / n - mean[1] * mean[1];
    let cov_sc = tot[4] / n - mean[0] * mean[1];
    let covariance = [[vs, cov_sc], [cov_sc, vc]];
    let distance = [(vs - 1.0).abs(), (vc - 1.0).abs(), cov_sc.abs()].into_iter().fold(0.0, f64::max);
    let m2 = tot[2] / n;
    Ok(CltReport {
        block_length,
        samples,
        mean,
        covariance,
        distance_from_identity: distance,
        kurtosis_s: (tot[5] / n) / (m2 * m2),
        max_abs_s: tot[6],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_angle_is_bounded_and_not_gaussian() {
        let r = clt_block_average(1, 50_000, 3, Exec::Sequential).unwrap();
        assert!(r.max_abs_s <= 2f64.sqrt() + 1e-12);
        // E(√2 sin t)⁴ = 3/2
        assert!((r.kurtosis_s - 1.5).abs() < 0.05, "{}", r.kurtosis_s);
    }
}
