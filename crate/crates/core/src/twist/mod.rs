//! The quasi-linear map `Ω_φ` on finitely supported sequences, the twisted
//! quasi-norm, duality, and the canonical test vectors.

pub mod ops;
pub mod sample;
pub mod sparse;

pub use ops::{
    basis_vector, conjugate_map, conjugate_vec, duality_pairing, f_vector, growth_eta, growth_lambda_sigma,
    growth_lambda_sigma_routes, matrix_apply, omega, quasilinearity_defect, quasinorm, quasinorm_triangle_constant,
    BasisKind, LambdaSigmaRoutes, Matrix2, Pairing, Runs, TriangleConstant,
};
pub use sample::{sampled_constants, RandomVecConfig, SampledConstants};
pub use sparse::{SparseVec, TwistedVec};

use crate::error::{Error, Result};
use crate::funcs::{GrowthConfig, GrowthReport, WindowMax};

/// Evaluates `value(2^k)` for `k` in `k_min..=k_max` and classifies the
/// resulting sequence; window `k` has lower edge `2^k`.
pub fn dyadic_sweep<F>(k_min: u32, k_max: u32, config: GrowthConfig, value: F) -> Result<GrowthReport>
where
    F: Fn(u64) -> Result<f64>,
{
    if k_max < k_min || k_max > 62 {
        return Err(Error::InvalidParameter(format!(
            "dyadic sweep needs k_min <= k_max <= 62, got [{k_min}, {k_max}]"
        )));
    }
    let maxima = (k_min..=k_max)
        .map(|k| {
            let n = 1u64 << k;
            Ok(WindowMax {
                index: k as i32,
                lo: n as f64,
                max: value(n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthReport::classify(maxima, config))
}
