//! Walsh–Paley and Gaussian block martingale transforms.

mod clt;
mod gaussian;
mod operator;
mod poly;
mod walsh_paley;

pub use clt::{clt_block_average, CltReport};
pub use gaussian::{
    blockwise_rotate, blockwise_rotation_covariance, gaussian_block_ratio, lemma_ii_transport, lemma_iii_embed,
    lemma_iv_augment, CovarianceCheck, GaussEval, GaussianBlockInstance, DEFAULT_MAX_DEGREE,
    MAX_QUADRATURE_VARIABLES,
};
pub use operator::{summation_operator, OperatorMatrix};
pub use poly::{Monomial, Poly};
pub use walsh_paley::{
    umd_lower_bound_search, verify_extreme_point, wp_transform_ratio, ExtremePointCheck, SearchConfig,
    SearchStrategy, TransformCoefficients, TransformRatio, WalshPaleyInstance, MAX_ENUMERATION_DEPTH,
};
