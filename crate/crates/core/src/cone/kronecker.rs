use std::f64::consts::{LN_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::spec::GAMMA;
use crate::error::{Error, Result};

/// Lattice resolution per axis for covering radius and discrepancy.
pub const LATTICE: usize = 64;
const MAX_DIM: usize = 3;

/// `{k·β}` with the rounding error of the product `k·β` carried separately,
/// so the result is accurate to a few ulps of 1 for every `k < 2^53`.
pub fn frac_mul(k: u64, beta: f64) -> f64 {
    let kf = k as f64;
    let p = kf * beta;
    let e = kf.mul_add(beta, -p);
    let r = (p - p.floor()) + e;
    let r = r - r.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Points `({kβ₁}, …, {kβₙ})` for `k = 1..=K`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KroneckerOrbit {
    pub betas: Vec<f64>,
    pub k: usize,
    coords: Vec<f64>,
}

impl KroneckerOrbit {
    pub fn dim(&self) -> usize {
        self.betas.len()
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    /// Point for `k = index + 1`.
    pub fn point(&self, index: usize) -> &[f64] {
        let n = self.dim();
        &self.coords[index * n..(index + 1) * n]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim())
    }
}

pub fn kronecker_orbit(betas: &[f64], k: usize) -> Result<KroneckerOrbit> {
    if betas.is_empty() {
        return Err(Error::InvalidParameter("at least one beta is required".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("orbit length must be >= 1".into()));
    }
    if let Some(b) = betas.iter().find(|b| !b.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta {b} is not finite")));
    }
    let n = betas.len();
    let mut coords = vec![0.0; n * k];
    coords.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (c, &b) in row.iter_mut().zip(betas) {
            *c = frac_mul(i as u64 + 1, b);
        }
    });
    Ok(KroneckerOrbit {
        betas: betas.to_vec(),
        k,
        coords,
    })
}

fn check_dim(orbit: &KroneckerOrbit) -> Result<()> {
    if orbit.dim() > MAX_DIM {
        return Err(Error::Unsupported(format!(
            "lattice diagnostics are limited to dimension {MAX_DIM}, got {}",
            orbit.dim()
        )));
    }
    Ok(())
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Bucket grid over the torus for nearest-point queries.
struct Buckets<'a> {
    orbit: &'a KroneckerOrbit,
    side: usize,
    cells: Vec<Vec<u32>>,
}

impl<'a> Buckets<'a> {
    fn new(orbit: &'a KroneckerOrbit) -> Self {
        let n = orbit.dim();
        let target = (orbit.len() as f64).powf(1.0 / n as f64);
        let side = (target.ceil() as usize).clamp(1, 256);
        let mut cells = vec![Vec::new(); side.pow(n as u32)];
        for (i, p) in orbit.points().enumerate() {
            cells[Self::cell_of(p, side)].push(i as u32);
        }
        Buckets { orbit, side, cells }
    }

    fn cell_of(p: &[f64], side: usize) -> usize {
        p.iter().fold(0, |acc, &x| acc * side + ((x * side as f64) as usize).min(side - 1))
    }

    fn nearest(&self, q: &[f64]) -> f64 {
        let n = q.len();
        let side = self.side as i64;
        let home: Vec<i64> = q
            .iter()
            .map(|&x| ((x * side as f64) as i64).min(side - 1))
            .collect();
        let mut best = f64::INFINITY;
        let max_ring = side / 2 + 1;
        for ring in 0..=max_ring {
            let mut offset = vec![-ring; n];
            loop {
                if offset.iter().any(|o| o.abs() == ring) {
                    let cell = home
                        .iter()
                        .zip(&offset)
                        .fold(0usize, |acc, (h, o)| acc * self.side + (h + o).rem_euclid(side) as usize);
                    for &i in &self.cells[cell] {
                        let p = self.orbit.point(i as usize);
                        let d2: f64 = p.iter().zip(q).map(|(a, b)| torus_gap(*a, *b).powi(2)).sum();
                        best = best.min(d2);
                    }
                }
                // Odometer over the cube [-ring, ring]^n.
                let mut axis = 0;
                while axis < n {
                    offset[axis] += 1;
                    if offset[axis] <= ring {
                        break;
                    }
                    offset[axis] = -ring;
                    axis += 1;
                }
                if axis == n {
                    break;
                }
            }
            // Unvisited cells lie at least `ring` cell widths away.
            let reach = ring as f64 / side as f64;
            if best.is_finite() && best.sqrt() <= reach {
                break;
            }
        }
        best.sqrt()
    }
}

/// Largest torus distance from a point of the `64^n` lattice `{i/64}` to the
/// orbit.
pub fn covering_radius(orbit: &KroneckerOrbit) -> Result<f64> {
    check_dim(orbit)?;
    let n = orbit.dim();
    let buckets = Buckets::new(orbit);
    let total = LATTICE.pow(n as u32);
    Ok((0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut q = [0.0; MAX_DIM];
            for axis in (0..n).rev() {
                q[axis] = (idx % LATTICE) as f64 / LATTICE as f64;
                idx /= LATTICE;
            }
            buckets.nearest(&q[..n])
        })
        .reduce(|| 0.0, f64::max))
}

/// `max |#{points in B}/K − vol(B)|` over anchored boxes `∏[0, j_i/64)`.
pub fn discrepancy_estimate(orbit: &KroneckerOrbit) -> Result<f64> {
    check_dim(orbit)?;
    let n = orbit.dim();
    let side = LATTICE + 1;
    // Counts indexed from 1 so the prefix sums have a zero border.
    let mut counts = vec![0u64; side.pow(n as u32)];
    for p in orbit.points() {
        let idx = p.iter().fold(0, |acc, &x| {
            acc * side + ((x * LATTICE as f64) as usize).min(LATTICE - 1) + 1
        });
        counts[idx] += 1;
    }
    for axis in 0..n {
        let stride = side.pow((n - 1 - axis) as u32);
        for idx in 0..counts.len() {
            if !(idx / stride).is_multiple_of(side) {
                counts[idx] += counts[idx - stride];
            }
        }
    }
    let k = orbit.len() as f64;
    let mut worst: f64 = 0.0;
    for (idx, &c) in counts.iter().enumerate() {
        let mut rest = idx;
        let mut vol = 1.0;
        for _ in 0..n {
            vol *= (rest % side) as f64 / LATTICE as f64;
            rest /= side;
        }
        worst = worst.max((c as f64 / k - vol).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignSearch {
    Found { k: u64, values: Vec<f64> },
    NotFound { k_max: u64 },
}

/// `sin(2π·{k·β·log 2})`.
pub fn pattern_values(betas: &[f64], k: u64) -> Vec<f64> {
    betas.iter().map(|b| (TAU * frac_mul(k, b * LN_2)).sin()).collect()
}

/// Smallest `k ≤ k_max` with `sign_i·sin(2πkβ_i log 2) > threshold` for all `i`.
pub fn find_sign_pattern(betas: &[f64], signs: &[i8], threshold: f64, k_max: u64) -> Result<SignSearch> {
    if betas.is_empty() || betas.len() != signs.len() {
        return Err(Error::InvalidParameter(
            "betas and signs must be nonempty and of equal length".into(),
        ));
    }
    if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
        return Err(Error::InvalidParameter(format!("signs must be +1 or -1, got {s}")));
    }
    if threshold >= 1.0 {
        return Ok(SignSearch::NotFound { k_max });
    }
    let scaled: Vec<f64> = betas.iter().map(|b| b * LN_2).collect();
    let hit = (1..=k_max).into_par_iter().find_first(|&k| {
        scaled
            .iter()
            .zip(signs)
            .all(|(b, &s)| s as f64 * (TAU * frac_mul(k, *b)).sin() > threshold)
    });
    Ok(match hit {
        Some(k) => SignSearch::Found {
            k,
            values: pattern_values(betas, k),
        },
        None => SignSearch::NotFound { k_max },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrigCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub a: f64,
    pub b: f64,
    pub residual: f64,
}

/// Both sides of `2 sin(βy) − sin(β(γ+y)) = a·sin(2πβ′γ²n) + b·cos(2πβ′γ²n)`
/// at `y = −nγ`, with `β = −2πβ′γ`, `a = 2 − cos(βγ)`, `b = −sin(βγ)`.
pub fn trig_identity_check(beta_prime: f64, n: u64) -> TrigCheck {
    let beta = -TAU * beta_prime * GAMMA;
    let y = -(n as f64) * GAMMA;
    let lhs = 2.0 * (beta * y).sin() - (beta * (GAMMA + y)).sin();
    let a = 2.0 - (beta * GAMMA).cos();
    let b = -(beta * GAMMA).sin();
    let arg = TAU * beta_prime * GAMMA * GAMMA * n as f64;
    let rhs = a * arg.sin() + b * arg.cos();
    TrigCheck {
        lhs,
        rhs,
        a,
        b,
        residual: (lhs - rhs).abs(),
    }
}
