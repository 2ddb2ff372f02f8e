use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::basis::{BlockBasis, OrliczFunc};
use crate::error::{Error, Result};
use crate::funcs::FuncDescriptor;
use crate::twist::sample::random_entries;
use crate::twist::{omega, quasinorm, SparseVec, TwistedVec};

/// `w_n = (Ω_φ(v_n), v_n)`.
pub fn block_lift(phi: &FuncDescriptor, basis: &BlockBasis, n: usize) -> Result<TwistedVec> {
    let v = basis.block(n)?;
    Ok(TwistedVec::new(omega(phi, v), v.clone()))
}

fn check_coefficients(basis: &BlockBasis, t: &SparseVec) -> Result<()> {
    if t.max_index() > basis.len() {
        return Err(Error::IndexOutOfRange {
            index: t.max_index(),
            len: basis.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockNorm {
    /// `‖(Σ t_n Ω_φ(v_n), Σ t_n v_n)‖_φ`.
    pub direct: f64,
    /// The expanded double sum over block coordinates plus `‖t‖₂`.
    pub formula: f64,
}

/// `‖Σ t_n w_n‖_φ` evaluated twice: once by assembling the combination and
/// calling [`quasinorm`], once coordinatewise through
/// `t_n v_n(k)·(φ(log(1/|v_n(k)|)) − φ(log(‖t‖₂/|t_n v_n(k)|)))`.
pub fn block_combination_norm(phi: &FuncDescriptor, basis: &BlockBasis, t: &SparseVec) -> Result<BlockNorm> {
    check_coefficients(basis, t)?;
    if t.is_zero() {
        return Ok(BlockNorm {
            direct: 0.0,
            formula: 0.0,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let (mut y, mut x) = (SparseVec::zero(), SparseVec::zero());
    for (n, tn) in t.iter() {
        let v = basis.block(n)?;
        y = y.combine(one, &omega(phi, v), tn);
        x = x.combine(one, v, tn);
    }
    let direct = quasinorm(phi, &TwistedVec::new(y, x));

    let tnorm = t.norm();
    let mut coords = Vec::new();
    for (n, tn) in t.iter() {
        for (_, vk) in basis.block(n)?.iter() {
            let c = tn * vk;
            let own = phi.at((1.0 / vk.norm()).ln().max(0.0));
            let mixed = if c.norm() / tnorm < 1e-300 {
                Complex64::new(0.0, 0.0)
            } else {
                phi.at((tnorm / c.norm()).ln().max(0.0))
            };
            coords.push(c * own - c * mixed);
        }
    }
    let formula = SparseVec::from_dense(&coords).norm() + tnorm;
    Ok(BlockNorm { direct, formula })
}

/// `F(t) = (Σ|t_n|² log²(‖t‖₂/|t_n|))^{1/2} + ‖t‖₂`.
///
/// Moduli are sorted before summation, so the value is independent of the
/// order of the coordinates.
pub fn kp_functional(t: &SparseVec) -> f64 {
    let mut m: Vec<f64> = t.iter().map(|(_, v)| v.norm()).collect();
    if m.is_empty() {
        return 0.0;
    }
    m.sort_by(f64::total_cmp);
    let scale = *m.last().unwrap();
    let norm = scale * m.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt();
    let s: f64 = m
        .iter()
        .map(|&x| {
            let u = x / norm;
            if u < 1e-300 {
                0.0
            } else {
                (u * u.ln()).powi(2)
            }
        })
        .sum();
    norm * s.sqrt() + norm
}

const LUXEMBURG_RTOL: f64 = 1e-13;

/// `inf{ρ > 0 : Σ Φ(|t_n|/ρ) ≤ 1}` by bisection; `0` for `t = 0`.
pub fn luxemburg_norm(t: &SparseVec, orlicz: &OrliczFunc) -> f64 {
    if t.is_zero() {
        return 0.0;
    }
    let m: Vec<f64> = t.iter().map(|(_, v)| v.norm()).collect();
    let modular = |rho: f64| m.iter().map(|&x| orlicz.eval(x / rho)).sum::<f64>();
    let mut lo = t.norm_inf();
    if modular(lo) <= 1.0 {
        return lo;
    }
    let l1: f64 = m.iter().sum();
    let mut hi = kp_functional(t) + l1;
    while modular(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > LUXEMBURG_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `j(x) = (0, x)`.
pub fn embed_second(x: &SparseVec) -> TwistedVec {
    TwistedVec::new(SparseVec::zero(), x.clone())
}

/// `p(y, x) = y`.
pub fn project_first(v: &TwistedVec) -> SparseVec {
    v.y.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioBand {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl RatioBand {
    pub fn from_ratios(ratios: impl IntoIterator<Item = f64>) -> Self {
        let mut band = RatioBand {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            samples: 0,
        };
        for r in ratios {
            band.lo = band.lo.min(r);
            band.hi = band.hi.max(r);
            band.samples += 1;
        }
        band
    }

    pub fn overlaps(&self, other: &RatioBand) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.samples > 0 && self.lo >= lo && self.hi <= hi
    }
}

/// Band of `block_combination_norm(φ, basis, t).direct / F(t)` over the
/// nonzero samples.
pub fn block_norm_vs_kp(phi: &FuncDescriptor, basis: &BlockBasis, samples: &[SparseVec]) -> Result<RatioBand> {
    if !phi.is_bi_lipschitz() {
        return Err(Error::NotBiLipschitz(phi.label()));
    }
    let ratios = samples
        .par_iter()
        .filter(|t| !t.is_zero())
        .map(|t| Ok(block_combination_norm(phi, basis, t)?.direct / kp_functional(t)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RatioBand::from_ratios(ratios))
}

/// Random coefficient vector supported in `1..=len`.
pub fn random_coefficients<R: Rng>(rng: &mut R, len: usize, spread: f64, complex: bool) -> SparseVec {
    let d = rng.gen_range(1..=len.max(1));
    random_entries(rng, d, spread, complex)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandSweep {
    pub instances: usize,
    pub max_blocks: usize,
    pub max_width: usize,
    pub spread: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandSweepReport {
    pub sweep: BandSweep,
    /// `block_combination_norm / F`.
    pub block: RatioBand,
    /// `luxemburg / F`.
    pub luxemburg: RatioBand,
    /// Largest relative gap between the direct and formula routes.
    pub max_route_gap: f64,
}

/// Random instances `(basis, t)` drawn from one seeded stream, then evaluated
/// in parallel.
pub fn band_sweep(phi: &FuncDescriptor, sweep: BandSweep) -> Result<BandSweepReport> {
    if !phi.is_bi_lipschitz() {
        return Err(Error::NotBiLipschitz(phi.label()));
    }
    if sweep.max_blocks == 0 || sweep.max_width == 0 {
        return Err(Error::InvalidParameter("block counts and widths must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed);
    let instances = (0..sweep.instances)
        .map(|_| {
            let count = rng.gen_range(1..=sweep.max_blocks);
            let basis = BlockBasis::random(&mut rng, count, sweep.max_width, sweep.spread, true)?;
            let t = random_coefficients(&mut rng, count, sweep.spread, true);
            Ok((basis, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let orlicz = OrliczFunc;
    let rows = instances
        .par_iter()
        .map(|(basis, t)| {
            let b = block_combination_norm(phi, basis, t)?;
            let f = kp_functional(t);
            let gap = (b.direct - b.formula).abs() / b.direct.abs().max(b.formula.abs());
            Ok((b.direct / f, luxemburg_norm(t, &orlicz) / f, gap))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandSweepReport {
        sweep,
        block: RatioBand::from_ratios(rows.iter().map(|r| r.0)),
        luxemburg: RatioBand::from_ratios(rows.iter().map(|r| r.1)),
        max_route_gap: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}
