use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::twist::sample::random_entries;
use crate::twist::SparseVec;

const UNIT_TOL: f64 = 1e-12;

/// Normalized block sequence `(v_n)` in `ℓ₂`: unit vectors with disjoint,
/// consecutive supports `support(v_n) ⊆ (p_{n−1}, p_n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBasis", into = "RawBasis")]
pub struct BlockBasis {
    blocks: Vec<SparseVec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    blocks: Vec<SparseVec>,
}

impl TryFrom<RawBasis> for BlockBasis {
    type Error = Error;
    fn try_from(raw: RawBasis) -> Result<Self> {
        BlockBasis::new(raw.blocks)
    }
}

impl From<BlockBasis> for RawBasis {
    fn from(b: BlockBasis) -> Self {
        RawBasis { blocks: b.blocks }
    }
}

fn contiguous(start: usize, values: &[Complex64]) -> SparseVec {
    SparseVec::from_sorted(values.iter().enumerate().map(|(i, v)| (start + i, *v)).collect())
}

impl BlockBasis {
    pub fn new(blocks: Vec<SparseVec>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidBasis("no blocks".into()));
        }
        let mut prev_end = 0;
        for (n, v) in blocks.iter().enumerate() {
            if v.is_zero() {
                return Err(Error::InvalidBasis(format!("block {} is zero", n + 1)));
            }
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidBasis(format!(
                    "block {} has norm {}, expected 1",
                    n + 1,
                    v.norm()
                )));
            }
            let first = v.entries()[0].0;
            if first <= prev_end {
                return Err(Error::InvalidBasis(format!(
                    "block {} starts at {first}, overlapping the previous block ending at {prev_end}",
                    n + 1
                )));
            }
            prev_end = v.max_index();
        }
        Ok(BlockBasis { blocks })
    }

    /// `v_n = e_n`.
    pub fn unit(count: usize) -> Result<Self> {
        Self::new((1..=count).map(SparseVec::basis).collect::<Result<_>>()?)
    }

    /// `v_n = width^{-1/2}·(e_{(n−1)w+1} + … + e_{nw})`.
    pub fn uniform(count: usize, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidBasis("block width must be >= 1".into()));
        }
        let c = Complex64::new(1.0 / (width as f64).sqrt(), 0.0);
        let values = vec![c; width];
        Self::new((0..count).map(|n| contiguous(n * width + 1, &values)).collect())
    }

    /// Consecutive blocks of random width in `1..=max_width` with random
    /// entries, normalized.
    pub fn random<R: Rng>(rng: &mut R, count: usize, max_width: usize, spread: f64, complex: bool) -> Result<Self> {
        if max_width == 0 {
            return Err(Error::InvalidBasis("block width must be >= 1".into()));
        }
        let mut start = 1;
        let mut blocks = Vec::with_capacity(count);
        for _ in 0..count {
            let w = rng.gen_range(1..=max_width);
            let raw = random_entries(rng, w, spread, complex);
            let inv = Complex64::new(1.0 / raw.norm(), 0.0);
            let values: Vec<Complex64> = raw.iter().map(|(_, v)| v * inv).collect();
            blocks.push(contiguous(start, &values));
            start += w;
        }
        Self::new(blocks)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[SparseVec] {
        &self.blocks
    }

    /// `v_n`, `n ≥ 1`.
    pub fn block(&self, n: usize) -> Result<&SparseVec> {
        if n == 0 || n > self.blocks.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.blocks.len(),
            });
        }
        Ok(&self.blocks[n - 1])
    }

    /// `p_0 = 0 < p_1 < …` with `p_n` the last index of block `n`.
    pub fn breakpoints(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.blocks.iter().map(|b| b.max_index())).collect()
    }
}

/// `Φ(s) = s²(1 + |log s|)²`, `Φ(0) = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrliczFunc;

impl OrliczFunc {
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let g = 1.0 + s.ln().abs();
        s * s * g * g
    }
}
