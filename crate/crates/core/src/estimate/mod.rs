//! Norm estimation: single ratios, power iteration and the experiment
//! drivers built on them.

mod experiments;
mod power;

pub use experiments::{
    grid_stability, headline_experiment, rotation_equality, sigma_n_experiment, DualityRow, GridStability,
    HeadlineConfig, HeadlineRow, HeadlineTable, LogFit, RotationEquality, SigmaNConfig, SigmaNRow, SigmaNTable,
};
pub use power::{power_iterate_lp, InitFamily, PowerConfig, PowerEstimate, PowerTarget};

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::martingale::{
    gaussian_block_ratio, wp_transform_ratio, GaussEval, GaussianBlockInstance, OperatorMatrix,
    TransformCoefficients, WalshPaleyInstance,
};
use crate::matrix::TransformMatrix;
use crate::multiplier::{lp_norm, GridFunction, Multiplier, NormParams, PointNorm};

/// Something whose ‖T·‖/‖·‖ ratio can be evaluated at a fixed input.
#[derive(Debug, Clone, Copy)]
pub enum RatioTarget<'a> {
    Multiplier {
        m: &'a Multiplier,
        f: &'a GridFunction,
        s: Option<&'a OperatorMatrix>,
        oversample: usize,
    },
    WalshPaley {
        inst: &'a WalshPaleyInstance,
        alpha: &'a TransformCoefficients,
        s: Option<&'a OperatorMatrix>,
    },
    GaussianBlock {
        inst: &'a GaussianBlockInstance,
        a: &'a TransformMatrix,
        eval: GaussEval,
        s: Option<&'a OperatorMatrix>,
    },
}

/// Pointwise S applied to a vector-valued grid function.
pub fn apply_pointwise(s: &OperatorMatrix, f: &GridFunction) -> Result<GridFunction> {
    if f.value_dim() != s.cols {
        return Err(Error::DimensionMismatch {
            expected: s.cols,
            found: f.value_dim(),
        });
    }
    let points = f.points();
    let mut out = vec![num_complex::Complex64::default(); s.rows * points];
    for i in 0..s.rows {
        for j in 0..s.cols {
            let a = s.get(i, j);
            if a == 0.0 {
                continue;
            }
            for (o, v) in out[i * points..(i + 1) * points].iter_mut().zip(f.component(j)) {
                *o += v * a;
            }
        }
    }
    GridFunction::from_values(f.dim(), f.n(), s.rows, out, f.is_real())
}

/// ‖(T_m ⊗ S)f‖_p / ‖f‖_p with the point norms carried by S.
pub fn multiplier_ratio(
    m: &Multiplier,
    f: &GridFunction,
    s: Option<&OperatorMatrix>,
    p: f64,
    oversample: usize,
) -> Result<f64> {
    let params = NormParams::new(p)?.with_oversample(oversample);
    let g = m.apply(f)?;
    let (g, nin, nout) = match s {
        Some(s) => (apply_pointwise(s, &g)?, s.input_norm, s.output_norm),
        None => (g, PointNorm::L2, PointNorm::L2),
    };
    let den = lp_norm(f, &params.with_point_norm(nin));
    if den == 0.0 {
        return Err(Error::Degenerate("input has zero norm".into()));
    }
    Ok(lp_norm(&g, &params.with_point_norm(nout)) / den)
}

pub fn ratio_of(target: &RatioTarget<'_>, p: f64, exec: Exec) -> Result<f64> {
    match *target {
        RatioTarget::Multiplier { m, f, s, oversample } => {
            if oversample == 0 {
                return Err(domain("oversample", "must be at least 1"));
            }
            multiplier_ratio(m, f, s, p, oversample)
        }
        RatioTarget::WalshPaley { inst, alpha, s } => Ok(wp_transform_ratio(inst, alpha, p, s, exec)?.ratio),
        RatioTarget::GaussianBlock { inst, a, eval, s } => {
            Ok(gaussian_block_ratio(inst, a, p, eval, s, exec)?.best_ratio)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::NamedMultiplier;

    #[test]
    fn ratios_of_simple_multipliers() {
        let m0 = Multiplier::named(&NamedMultiplier::M0 { d: 2 }).unwrap();
        let cos1 = GridFunction::from_fn(2, 16, |t| t[0].cos()).unwrap();
        let t = RatioTarget::Multiplier {
            m: &m0,
            f: &cos1,
            s: None,
            oversample: 1,
        };
        assert!((ratio_of(&t, 2.0, Exec::Sequential).unwrap() - 1.0).abs() < 1e-14);
        let diag = GridFunction::from_fn(2, 16, |t| (t[0] + t[1]).cos()).unwrap();
        assert!(multiplier_ratio(&m0, &diag, None, 2.0, 1).unwrap() < 1e-14);
        let c = Multiplier::named(&NamedMultiplier::Constant { c: -2.5, d: 2 }).unwrap();
        assert!((multiplier_ratio(&c, &diag, None, 3.0, 2).unwrap() - 2.5).abs() < 1e-13);
    }
}
