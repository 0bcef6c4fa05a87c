//! Finite-dimensional operators between normed coordinate spaces.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::multiplier::PointNorm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<f64>,
    pub input_norm: PointNorm,
    pub output_norm: PointNorm,
}

impl OperatorMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
        input_norm: PointNorm,
        output_norm: PointNorm,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain("operator", "dimensions must be at least 1"));
        }
        if entries.len() != rows * cols {
            return Err(domain("operator", format!("{} entries for a {rows}×{cols} matrix", entries.len())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(domain("operator", "entries must be finite"));
        }
        Ok(Self {
            rows,
            cols,
            entries,
            input_norm,
            output_norm,
        })
    }

    pub fn identity(n: usize, norm: PointNorm) -> Self {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries: e,
            input_norm: norm,
            output_norm: norm,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.entries[i * self.cols..(i + 1) * self.cols]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        out
    }

    /// Operator norm ‖S : ℓ¹ → Y‖, attained on a basis vector.
    pub fn norm_from_l1(&self) -> Result<f64> {
        if self.input_norm != PointNorm::L1 {
            return Err(domain("operator", "closed form needs ℓ¹ input norm"));
        }
        let mut col = vec![0.0; self.rows];
        let mut best: f64 = 0.0;
        for j in 0..self.cols {
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.get(i, j);
            }
            best = best.max(self.output_norm.eval(&col));
        }
        Ok(best)
    }
}

/// σ_n: ℓ¹_n → ℓ^∞_n, the lower-triangular all-ones matrix of partial sums.
pub fn summation_operator(n: usize) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(domain("n", "must be at least 1"));
    }
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            e[i * n + j] = 1.0;
        }
    }
    OperatorMatrix::new(n, n, e, PointNorm::L1, PointNorm::LInf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_summation_operators() {
        assert_eq!(summation_operator(1).unwrap().entries, vec![1.0]);
        assert_eq!(summation_operator(2).unwrap().entries, vec![1.0, 0.0, 1.0, 1.0]);
        for n in [1, 3, 8, 16] {
            assert_eq!(summation_operator(n).unwrap().norm_from_l1().unwrap(), 1.0);
        }
        assert_eq!(summation_operator(3).unwrap().apply(&[1.0, 2.0, 3.0]), vec![1.0, 3.0, 6.0]);
    }
}
