use std::fmt;

use num_complex::Complex64;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Scale-safe `(Σ|z_k|²)^{1/2}`; a single entry gives its modulus exactly.
pub(crate) fn l2_norm<'a>(values: impl Iterator<Item = &'a Complex64> + Clone) -> f64 {
    let s: f64 = values.clone().map(|z| z.norm_sqr()).sum();
    if s.is_finite() && s > 1e-280 {
        return s.sqrt();
    }
    let scale = values.clone().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = values.map(|z| (z.norm() / scale).powi(2)).sum();
    scale * s.sqrt()
}

/// Finitely supported complex sequence indexed from 1.
///
/// Entries are kept sorted by index and every stored value is nonzero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Complex64)>,
    norm: f64,
}

impl SparseVec {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs; repeated indices are
    /// summed and zeros dropped.
    pub fn from_entries(items: impl IntoIterator<Item = (usize, Complex64)>) -> Result<Self> {
        let mut items: Vec<(usize, Complex64)> = items.into_iter().collect();
        for &(k, v) in &items {
            if k == 0 {
                return Err(Error::InvalidParameter("sequence indices start at 1".into()));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("entry {k} is not finite")));
            }
        }
        items.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(items.len());
        for (k, v) in items {
            match merged.last_mut() {
                Some((j, acc)) if *j == k => *acc += v,
                _ => merged.push((k, v)),
            }
        }
        Ok(Self::from_sorted(merged))
    }

    // Caller guarantees strictly increasing indices.
    pub(crate) fn from_sorted(mut entries: Vec<(usize, Complex64)>) -> Self {
        entries.retain(|(_, v)| *v != Complex64::new(0.0, 0.0));
        let norm = l2_norm(entries.iter().map(|(_, v)| v));
        SparseVec { entries, norm }
    }

    /// Dense slice `x[0], x[1], …` placed at indices `1, 2, …`.
    pub fn from_dense(values: &[Complex64]) -> Self {
        Self::from_sorted(values.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect())
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::from_sorted(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1, Complex64::new(*v, 0.0)))
                .collect(),
        )
    }

    /// `e_n`.
    pub fn basis(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("basis index must be >= 1".into()));
        }
        Ok(Self::from_sorted(vec![(n, Complex64::new(1.0, 0.0))]))
    }

    /// `f_n = e_1 + … + e_n`.
    pub fn f_vector(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("f_n needs n >= 1".into()));
        }
        Ok(Self::from_sorted((1..=n).map(|k| (k, Complex64::new(1.0, 0.0))).collect()))
    }

    pub fn entries(&self) -> &[(usize, Complex64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map_or(Complex64::new(0.0, 0.0), |i| self.entries[i].1)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cached `ℓ₂` norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_sorted(self.entries.iter().map(|&(k, v)| (k, c * v)).collect())
    }

    pub fn map_values(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self::from_sorted(self.entries.iter().map(|&(k, v)| (k, f(k, v))).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &SparseVec, b: Complex64) -> Self {
        let (x, y) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let next = match (x.get(i), y.get(j)) {
                (Some(p), Some(q)) if p.0 == q.0 => {
                    i += 1;
                    j += 1;
                    (p.0, a * p.1 + b * q.1)
                }
                (Some(p), Some(q)) if p.0 < q.0 => {
                    i += 1;
                    (p.0, a * p.1)
                }
                (Some(_), Some(q)) | (None, Some(q)) => {
                    j += 1;
                    (q.0, b * q.1)
                }
                (Some(p), None) => {
                    i += 1;
                    (p.0, a * p.1)
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        Self::from_sorted(out)
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn conj(&self) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|&(k, v)| (k, v.conj())).collect(),
            norm: self.norm,
        }
    }

    /// `Σ a_k b_k`, no conjugation.
    pub fn dot(&self, other: &SparseVec) -> Complex64 {
        let (x, y) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::new(0.0, 0.0);
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += x[i].1 * y[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }
}

impl Serialize for SparseVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(&k.to_string(), &[v.re, v.im])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SparseVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SparseVec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping decimal indices to [re, im] pairs")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<SparseVec, A::Error> {
                let mut items = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                while let Some((key, value)) = access.next_entry::<String, [f64; 2]>()? {
                    let k: usize = key
                        .parse()
                        .map_err(|_| de::Error::custom(format!("index {key:?} is not a positive integer")))?;
                    if !seen.insert(k) {
                        return Err(de::Error::custom(format!("duplicate index {k}")));
                    }
                    items.push((k, Complex64::new(value[0], value[1])));
                }
                SparseVec::from_entries(items).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Element `(y, x)` of the twisted sum: `y` the twisted coordinate, `x` the
/// base coordinate.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedVec {
    pub y: SparseVec,
    pub x: SparseVec,
}

impl TwistedVec {
    pub fn new(y: SparseVec, x: SparseVec) -> Self {
        TwistedVec { y, x }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.y.is_zero() && self.x.is_zero()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TwistedVec::new(self.y.scale(c), self.x.scale(c))
    }

    pub fn add(&self, other: &TwistedVec) -> Self {
        TwistedVec::new(self.y.add(&other.y), self.x.add(&other.x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeros_dropped_and_duplicates_summed() {
        let v = SparseVec::from_entries([(3, c(1.0, 0.0)), (1, c(0.0, 0.0)), (3, c(1.0, 2.0))]).unwrap();
        assert_eq!(v.entries(), &[(3, c(2.0, 2.0))]);
        assert!(SparseVec::from_entries([(0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(SparseVec::f_vector(9).unwrap().norm(), 3.0);
        assert_eq!(SparseVec::from_real(&[3.0, 4.0]).norm(), 5.0);
        assert_eq!(SparseVec::basis(7).unwrap().norm(), 1.0);
        let tiny = SparseVec::from_real(&[3e-200, 4e-200]);
        assert!((tiny.norm() - 5e-200).abs() < 1e-213);
    }

    #[test]
    fn combine_merges_supports() {
        let a = SparseVec::from_entries([(1, c(1.0, 0.0)), (4, c(2.0, 0.0))]).unwrap();
        let b = SparseVec::from_entries([(2, c(1.0, 0.0)), (4, c(2.0, 0.0))]).unwrap();
        let d = a.sub(&b);
        assert_eq!(d.entries(), &[(1, c(1.0, 0.0)), (2, c(-1.0, 0.0))]);
        assert_eq!(a.dot(&b), c(4.0, 0.0));
    }

    #[test]
    fn json_sorted_numerically() {
        let v = SparseVec::from_entries([(10, c(1.0, 0.0)), (2, c(0.5, -1.0))]).unwrap();
        let s = serde_json::to_string(&TwistedVec::new(SparseVec::zero(), v.clone())).unwrap();
        assert_eq!(s, r#"{"y":{},"x":{"2":[0.5,-1.0],"10":[1.0,0.0]}}"#);
        let back: TwistedVec = serde_json::from_str(&s).unwrap();
        assert_eq!(back.x, v);
        assert!(serde_json::from_str::<SparseVec>(r#"{"0":[1,0]}"#).is_err());
        assert!(serde_json::from_str::<SparseVec>(r#"{"a":[1,0]}"#).is_err());
    }
}
