//! Seeded random vectors for sampling-based estimates.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::ops::omega;
use super::sparse::{SparseVec, TwistedVec};
use crate::funcs::FuncDescriptor;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RandomVecConfig {
    /// Supports are `{1, …, d}` with `d` uniform in `1..=max_dim`.
    pub max_dim: usize,
    /// Moduli are `exp(−spread·U)`, `U` uniform on `[0, 1)`.
    pub spread: f64,
    /// Uniform phases when true, random signs otherwise.
    pub complex: bool,
}

impl Default for RandomVecConfig {
    fn default() -> Self {
        RandomVecConfig {
            max_dim: 64,
            spread: 6.0,
            complex: true,
        }
    }
}

pub fn random_entries<R: Rng>(rng: &mut R, dim: usize, spread: f64, complex: bool) -> SparseVec {
    let values: Vec<Complex64> = (0..dim)
        .map(|_| {
            let m = (-spread * rng.gen::<f64>()).exp();
            if complex {
                Complex64::from_polar(m, TAU * rng.gen::<f64>())
            } else if rng.gen::<bool>() {
                Complex64::new(m, 0.0)
            } else {
                Complex64::new(-m, 0.0)
            }
        })
        .collect();
    SparseVec::from_dense(&values)
}

pub fn random_dim<R: Rng>(rng: &mut R, cfg: &RandomVecConfig) -> usize {
    rng.gen_range(1..=cfg.max_dim.max(1))
}

pub fn random_vec<R: Rng>(rng: &mut R, cfg: &RandomVecConfig) -> SparseVec {
    let d = random_dim(rng, cfg);
    random_entries(rng, d, cfg.spread, cfg.complex)
}

/// Random element with independent twisted and base parts of a common dimension.
pub fn random_twisted<R: Rng>(rng: &mut R, cfg: &RandomVecConfig) -> TwistedVec {
    let d = random_dim(rng, cfg);
    TwistedVec::new(
        random_entries(rng, d, cfg.spread, cfg.complex),
        random_entries(rng, d, cfg.spread, cfg.complex),
    )
}

/// Pairs for the quasi-norm triangle constant.
///
/// Both base parts share a random dimension `d`. The second base part is
/// either independent or a perturbation `x₁ + s·z` with `s = exp(−3U)`.
/// Each twisted part is, with equal odds, zero, the lift `Ω_φ(x)`, or
/// independent noise.
pub fn triangle_pair<R: Rng>(rng: &mut R, phi: &FuncDescriptor, cfg: &RandomVecConfig) -> (TwistedVec, TwistedVec) {
    let d = random_dim(rng, cfg);
    let x1 = random_entries(rng, d, cfg.spread, cfg.complex);
    let x2 = if rng.gen::<bool>() {
        random_entries(rng, d, cfg.spread, cfg.complex)
    } else {
        let s = (-3.0 * rng.gen::<f64>()).exp();
        let z = random_entries(rng, d, cfg.spread, cfg.complex);
        x1.combine(Complex64::new(1.0, 0.0), &z, Complex64::new(s, 0.0))
    };
    let lift = |x: SparseVec, rng: &mut R| {
        let y = match rng.gen_range(0..3) {
            0 => SparseVec::zero(),
            1 => omega(phi, &x),
            _ => random_entries(rng, d, cfg.spread, cfg.complex),
        };
        TwistedVec::new(y, x)
    };
    let u = lift(x1, rng);
    let v = lift(x2, rng);
    (u, v)
}

/// Seeded sampling estimates of the constants attached to `Ω_φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledConstants {
    pub samples: usize,
    /// Largest `‖Ω(x+y) − Ω(x) − Ω(y)‖₂ / (‖x‖₂ + ‖y‖₂)`.
    pub quasilinearity: f64,
    /// Largest `‖u+v‖_φ / (‖u‖_φ + ‖v‖_φ)`.
    pub triangle: f64,
    /// Largest `|⟨u, v⟩| / (‖u‖_φ·‖v‖_{−φ})`, bilinear pairing.
    pub duality: f64,
    /// Largest `‖Ω_φ(x)‖_∞ / ‖x‖₂`.
    pub coordinatewise: f64,
}

pub fn sampled_constants(phi: &FuncDescriptor, cfg: &RandomVecConfig, samples: usize, seed: u64) -> SampledConstants {
    use super::ops::{duality_pairing, quasilinearity_defect, quasinorm, quasinorm_triangle_constant, Pairing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let neg = FuncDescriptor::scale(-1.0, phi.clone());
    let mut out = SampledConstants {
        samples,
        quasilinearity: 0.0,
        triangle: 0.0,
        duality: 0.0,
        coordinatewise: 0.0,
    };
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = random_vec(&mut rng, cfg);
        let y = random_vec(&mut rng, cfg);
        if let Ok(d) = quasilinearity_defect(phi, &x, &y) {
            out.quasilinearity = out.quasilinearity.max(d);
        }
        out.coordinatewise = out.coordinatewise.max(omega(phi, &x).norm_inf() / x.norm());
        let u = random_twisted(&mut rng, cfg);
        let v = random_twisted(&mut rng, cfg);
        let denom = quasinorm(phi, &u) * quasinorm(&neg, &v);
        if denom > 0.0 {
            out.duality = out.duality.max(duality_pairing(&u, &v, Pairing::Bilinear).norm() / denom);
        }
        pairs.push(triangle_pair(&mut rng, phi, cfg));
    }
    out.triangle = quasinorm_triangle_constant(phi, pairs).ratio;
    out
}
