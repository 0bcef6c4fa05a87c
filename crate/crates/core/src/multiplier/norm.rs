//! Discrete L^p norms of grid functions.

use serde::{Deserialize, Serialize};

use super::grid::GridFunction;
use crate::error::{domain, Result};

/// Pointwise norm used for vector-valued functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointNorm {
    L1,
    #[default]
    L2,
    LInf,
}

impl PointNorm {
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            PointNorm::L1 => v.iter().map(|x| x.abs()).sum(),
            PointNorm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            PointNorm::LInf => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub p: f64,
    /// Use the probability measure dθ/(2π)^d (constants have norm 1).
    pub normalized: bool,
    /// Pointwise norm for value_dim > 1.
    pub point_norm: PointNorm,
    /// Evaluate on a grid this many times finer than the function's own grid
    /// (spectral interpolation). 1 means the plain grid sum.
    pub oversample: usize,
}

impl NormParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(domain("p", format!("exponent {p} must lie in (1, ∞)")));
        }
        Ok(Self {
            p,
            normalized: true,
            point_norm: PointNorm::L2,
            oversample: 1,
        })
    }

    pub fn with_point_norm(mut self, point_norm: PointNorm) -> Self {
        self.point_norm = point_norm;
        self
    }

    pub fn with_oversample(mut self, oversample: usize) -> Self {
        self.oversample = oversample.max(1);
        self
    }

    /// p' with 1/p + 1/p' = 1.
    pub fn dual(&self) -> f64 {
        dual_exponent(self.p)
    }

    /// p* = max(p, p').
    pub fn p_star(&self) -> f64 {
        p_star(self.p)
    }
}

pub fn dual_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

pub fn p_star(p: f64) -> f64 {
    p.max(dual_exponent(p))
}

/// (N^{-d} Σ_j |f(θ_j)|^p)^{1/p}, with |·| the configured pointwise norm of
/// the real parts for vector-valued functions and the complex modulus for
/// scalar ones.
pub fn lp_norm(f: &GridFunction, params: &NormParams) -> f64 {
    if params.oversample > 1 {
        let fine = f
            .regrid(f.n() * params.oversample)
            .expect("oversampled grid size is a power of two");
        let plain = NormParams {
            oversample: 1,
            ..*params
        };
        return lp_norm(&fine, &plain);
    }
    let p = params.p;
    let points = f.points();
    let vd = f.value_dim();
    let mut acc = 0.0;
    if vd == 1 {
        for v in f.values() {
            acc += v.norm().powf(p);
        }
    } else {
        let mut buf = vec![0.0; vd];
        let vals = f.values();
        for j in 0..points {
            for (c, b) in buf.iter_mut().enumerate() {
                *b = vals[c * points + j].re;
            }
            acc += params.point_norm.eval(&buf).powf(p);
        }
    }
    let mut norm = (acc / points as f64).powf(1.0 / p);
    if !params.normalized {
        norm *= (2.0 * std::f64::consts::PI).powf(f.dim() as f64 / p);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        let n = NormParams::new(4.0).unwrap();
        assert!((n.dual() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(n.p_star(), 4.0);
        assert!((p_star(1.5) - 3.0).abs() < 1e-15);
        assert!(NormParams::new(1.0).is_err());
        assert!(NormParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn cosine_norms() {
        let f = GridFunction::from_fn(1, 64, |t| t[0].cos()).unwrap();
        let n2 = lp_norm(&f, &NormParams::new(2.0).unwrap());
        assert!((n2 - 0.5f64.sqrt()).abs() < 1e-12);
        let n4 = lp_norm(&f, &NormParams::new(4.0).unwrap());
        assert!((n4 - 0.375f64.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_measure_scales_constants() {
        let f = GridFunction::from_fn(2, 8, |_| 1.0).unwrap();
        let mut params = NormParams::new(2.0).unwrap();
        params.normalized = false;
        assert!((lp_norm(&f, &params) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn vector_point_norms() {
        let f = GridFunction::from_fn_vec(1, 8, 2, |_, out| {
            out[0] = 3.0;
            out[1] = -4.0;
        })
        .unwrap();
        let p = NormParams::new(2.0).unwrap();
        assert!((lp_norm(&f, &p.with_point_norm(PointNorm::L1)) - 7.0).abs() < 1e-12);
        assert!((lp_norm(&f, &p.with_point_norm(PointNorm::L2)) - 5.0).abs() < 1e-12);
        assert!((lp_norm(&f, &p.with_point_norm(PointNorm::LInf)) - 4.0).abs() < 1e-12);
    }
}
