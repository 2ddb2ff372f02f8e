//! Lifted block sequences `w_n = (Ω_φ(v_n), v_n)` and their comparison with
//! the Kalton–Peck functional and the Orlicz norm.

pub mod basis;
pub mod norms;

pub use basis::{BlockBasis, OrliczFunc};
pub use norms::{
    band_sweep, block_combination_norm, block_lift, block_norm_vs_kp, embed_second, kp_functional, luxemburg_norm,
    project_first, random_coefficients, BandSweep, BandSweepReport, BlockNorm, RatioBand,
};
