use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcs::{FuncDescriptor, LogGrid};

/// Singular values at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub rank: usize,
    pub min_singular_value: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    pub independent: bool,
}

/// Numerical rank of the maps with their exact linear parts removed.
///
/// Each map contributes the column `(h(t) − c_h·t)/t` sampled on the grid
/// (real and imaginary parts stacked) and scaled to unit length.
pub fn independence_gram_rank(elements: &[FuncDescriptor], grid: &LogGrid) -> Result<GramReport> {
    if elements.len() < 2 {
        return Err(Error::InvalidParameter("Gram rank needs at least two elements".into()));
    }
    let ts = grid.samples();
    if ts.len() < 4 * elements.len() {
        return Err(Error::InvalidGrid(format!(
            "{} samples are too few for {} elements",
            ts.len(),
            elements.len()
        )));
    }
    let rows = 2 * ts.len();
    let mut a = DMatrix::<f64>::zeros(rows, elements.len());
    for (j, h) in elements.iter().enumerate() {
        let c = h.linear_part();
        for (i, &t) in ts.iter().enumerate() {
            let v = (h.at(t) - c * t) / t;
            a[(2 * i, j)] = v.re;
            a[(2 * i + 1, j)] = v.im;
        }
        let norm = a.column(j).norm();
        if norm > 0.0 {
            a.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let gram = a.transpose() * &a;
    let mut singular_values: Vec<f64> = a.singular_values().iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let rank = singular_values.iter().filter(|&&s| s > RANK_THRESHOLD).count();
    Ok(GramReport {
        rank,
        min_singular_value: *singular_values.last().expect("at least two columns"),
        independent: rank == elements.len(),
        gram: gram.row_iter().map(|r| r.iter().copied().collect()).collect(),
        singular_values,
    })
}
