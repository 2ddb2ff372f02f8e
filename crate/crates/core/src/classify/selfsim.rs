use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::BlockBasis;
use crate::error::{Error, Result};
use crate::funcs::{
    additivity_defect, hyers_linearize, resolved, lipschitz_bounds, FuncDescriptor, GrowthConfig, GrowthReport, HyersFit,
    LipschitzOptions, LogGrid, RegressionAxis, Verdict, WindowMax,
};
use crate::twist::{omega, SparseVec};

/// `L′(e_n) = Σ_k φ(log(1/|u_n(k)|))·u_n(k)·e_k`, one entry per block.
pub fn canonical_l(phi: &FuncDescriptor, basis: &BlockBasis) -> Vec<SparseVec> {
    basis
        .blocks()
        .iter()
        .map(|u| u.map_values(|_, v| v * phi.at((1.0 / v.norm()).ln().max(0.0))))
        .collect()
}

/// `Σ x_n images[n]`, with `images` indexed from block 1.
fn apply_table(images: &[SparseVec], x: &SparseVec) -> Result<SparseVec> {
    SparseVec::from_entries(x.iter().flat_map(|(n, xn)| images[n - 1].iter().map(move |(k, v)| (k, xn * v))))
}

/// `‖T_U(Ω_φ x) − Ω_φ(T_U x) + L′(x)‖₂ / ‖x‖₂` with `T_U x = Σ x_n u_n`.
pub fn selfsim_defect(phi: &FuncDescriptor, basis: &BlockBasis, x: &SparseVec) -> Result<f64> {
    if x.is_zero() {
        return Err(Error::InvalidParameter("self-similarity defect needs x != 0".into()));
    }
    if x.max_index() > basis.len() {
        return Err(Error::IndexOutOfRange {
            index: x.max_index(),
            len: basis.len(),
        });
    }
    let blocks = basis.blocks();
    let one = Complex64::new(1.0, 0.0);
    let t_omega = apply_table(blocks, &omega(phi, x))?;
    let omega_t = omega(phi, &apply_table(blocks, x)?);
    let l = apply_table(&canonical_l(phi, basis), x)?;
    let d = t_omega.combine(one, &omega_t, -one).combine(one, &l, one);
    Ok(d.norm() / x.norm())
}

fn half_log(n: f64) -> f64 {
    0.5 * n.ln()
}

/// `|φ(log √M) + φ(log √N) − φ(log √(NM))|`, with rounding-level values
/// reported as zero.
pub fn uniform_block_defect(phi: &FuncDescriptor, n: u64, m: u64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("N and M must be >= 1".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    let whole = phi.at(half_log(nf * mf));
    let d = phi.at(half_log(mf)) + phi.at(half_log(nf)) - whole;
    Ok(resolved(d, whole.norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DefectRoutes {
    /// [`selfsim_defect`] on `u_n = N^{-1/2}·(block of N ones)` and `x = f_M`.
    pub vector: f64,
    /// [`uniform_block_defect`].
    pub closed: f64,
    /// `|φ(log √(NM))|`, the size of the largest term.
    pub scale: f64,
}

pub fn uniform_defect_routes(phi: &FuncDescriptor, n: usize, m: usize) -> Result<DefectRoutes> {
    let basis = BlockBasis::uniform(m, n)?;
    let x = SparseVec::f_vector(m)?;
    Ok(DefectRoutes {
        vector: selfsim_defect(phi, &basis, &x)?,
        closed: uniform_block_defect(phi, n as u64, m as u64)?,
        scale: phi.at(half_log(n as f64 * m as f64)).norm(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectorConfig {
    pub grid: LogGrid,
    pub growth: GrowthConfig,
    pub lipschitz: LipschitzOptions,
    /// Defect matrix over `N = 2^i`, `M = 2^j`, `0 ≤ i, j ≤ defect_k_max`.
    pub defect_k_max: u32,
    /// Diagonal `D(2^k, 2^k)` sweep range.
    pub diagonal_k: (u32, u32),
    /// Only `k ≥ diagonal_tail_k` enters the diagonal regression.
    pub diagonal_tail_k: u32,
    /// Defect cap as a multiple of the empirical Lipschitz upper bound.
    pub cap_factor: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            grid: LogGrid::default(),
            growth: GrowthConfig::default(),
            lipschitz: LipschitzOptions::default(),
            defect_k_max: 20,
            diagonal_k: (1, 40),
            diagonal_tail_k: 8,
            cap_factor: 3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DetectorVerdict {
    KaltonPeckLike,
    NotKaltonPeck,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfSimReport {
    pub map_name: String,
    /// `defect_matrix[i][j] = D(2^i, 2^j)`.
    pub defect_matrix: Vec<Vec<f64>>,
    pub defect_max: f64,
    pub defect_cap: f64,
    pub lipschitz_upper: f64,
    /// Running maximum of `D(2^k, 2^k)` over `k`.
    pub diagonal: GrowthReport,
    pub additivity: GrowthReport,
    pub hyers: HyersFit,
    pub verdict: DetectorVerdict,
    pub config: DetectorConfig,
}

/// Self-similarity evidence: `KaltonPeckLike` when the Hyers residual is
/// Bounded and the uniform-block defects stay under the cap;
/// `NotKaltonPeck` when the residual or the diagonal defects grow.
pub fn kalton_peck_detector(phi: &FuncDescriptor, config: &DetectorConfig) -> Result<SelfSimReport> {
    if config.diagonal_k.0 < 1 || config.diagonal_k.1 < config.diagonal_k.0 || config.diagonal_k.1 > 62 {
        return Err(Error::InvalidParameter("diagonal exponents must satisfy 1 <= lo <= hi <= 62".into()));
    }
    if config.defect_k_max > 31 {
        return Err(Error::InvalidParameter("defect exponents are limited to 31".into()));
    }
    let kmax = config.defect_k_max;
    let defect_matrix: Vec<Vec<f64>> = (0..=kmax)
        .into_par_iter()
        .map(|i| {
            (0..=kmax)
                .map(|j| uniform_block_defect(phi, 1u64 << i, 1u64 << j))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let defect_max = defect_matrix.iter().flatten().copied().fold(0.0, f64::max);

    let mut running = 0.0f64;
    let mut diag = Vec::new();
    for k in config.diagonal_k.0..=config.diagonal_k.1 {
        let n = 1u64 << k;
        running = running.max(uniform_block_defect(phi, n, n)?);
        diag.push(WindowMax {
            index: k as i32,
            lo: n as f64,
            max: running,
        });
    }
    let diagonal = GrowthReport::classify(
        diag,
        GrowthConfig {
            axis: RegressionAxis::LogWindowIndex,
            tail_from: (1u64 << config.diagonal_tail_k) as f64,
            ..config.growth
        },
    );

    let additivity = additivity_defect(phi, &config.grid, config.growth);
    let hyers = hyers_linearize(phi, &config.grid, config.growth);
    let lipschitz_upper = lipschitz_bounds(phi, &config.grid, config.lipschitz).upper;
    let defect_cap = config.cap_factor * lipschitz_upper;

    let verdict = if hyers.residual.verdict == Verdict::Growing || diagonal.verdict == Verdict::Growing {
        DetectorVerdict::NotKaltonPeck
    } else if hyers.residual.verdict == Verdict::Bounded && defect_max <= defect_cap {
        DetectorVerdict::KaltonPeckLike
    } else {
        DetectorVerdict::Inconclusive
    };
    Ok(SelfSimReport {
        map_name: phi.label(),
        defect_matrix,
        defect_max,
        defect_cap,
        lipschitz_upper,
        diagonal,
        additivity,
        hyers,
        verdict,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn canonical_l_examples() {
        let phi = FuncDescriptor::linear(1.0);
        let l = canonical_l(&phi, &BlockBasis::unit(3).unwrap());
        assert!(l.iter().all(|v| v.is_zero()));
        let l = canonical_l(&phi, &BlockBasis::uniform(2, 4).unwrap());
        for (_, v) in l[1].iter() {
            assert!((v.re - LN_2 * 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn defect_of_first_basis_vector_vanishes() {
        let phi = FuncDescriptor::sin_log(0.1, 2.0).unwrap();
        let basis = BlockBasis::uniform(3, 5).unwrap();
        let d = selfsim_defect(&phi, &basis, &SparseVec::basis(1).unwrap()).unwrap();
        assert!(d < 1e-15, "{d}");
        assert!(selfsim_defect(&phi, &basis, &SparseVec::zero()).is_err());
        assert!(selfsim_defect(&phi, &basis, &SparseVec::basis(4).unwrap()).is_err());
    }

    #[test]
    fn uniform_defect_edges() {
        let phi = FuncDescriptor::sin_log(0.1, 1.0).unwrap();
        assert_eq!(uniform_block_defect(&phi, 1, 77).unwrap(), 0.0);
        assert_eq!(uniform_block_defect(&phi, 77, 1).unwrap(), 0.0);
        assert_eq!(
            uniform_block_defect(&phi, 8, 1 << 20).unwrap(),
            uniform_block_defect(&phi, 1 << 20, 8).unwrap()
        );
        assert!(uniform_block_defect(&phi, 0, 2).is_err());
    }

    #[test]
    fn routes_agree() {
        let phi = FuncDescriptor::sin_log(0.3, 1.5).unwrap();
        let r = uniform_defect_routes(&phi, 8, 16).unwrap();
        assert!((r.vector - r.closed).abs() <= 1e-12 * r.scale, "{r:?}");
    }
}
