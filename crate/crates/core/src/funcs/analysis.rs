use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::descriptor::FuncDescriptor;
use super::grid::LogGrid;
use super::growth::{GrowthConfig, GrowthReport, WindowMax};
use crate::error::{Error, Result};

impl FuncDescriptor {
    // Grid evaluation; callers only pass t >= 0.
    pub(crate) fn at(&self, t: f64) -> Complex64 {
        debug_assert!(t >= 0.0);
        self.eval(t).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

/// Differences at or below `NOISE_ULPS·ε·scale` are rounding noise and count as 0.
pub const NOISE_ULPS: f64 = 64.0;

/// `|d|`, or 0 when it is within rounding noise of magnitude `scale`.
pub fn resolved(d: Complex64, scale: f64) -> f64 {
    let m = d.norm();
    if m <= NOISE_ULPS * f64::EPSILON * scale {
        0.0
    } else {
        m
    }
}

/// Per-window maxima of a nonnegative function of `t`, classified.
pub fn window_report<F>(grid: &LogGrid, config: GrowthConfig, h: F) -> GrowthReport
where
    F: Fn(f64) -> f64 + Sync,
{
    let maxima: Vec<WindowMax> = grid
        .windows()
        .par_iter()
        .map(|w| {
            let max = grid
                .window_samples(w)
                .into_iter()
                .map(&h)
                .fold(0.0, f64::max);
            WindowMax {
                index: w.index,
                lo: w.lo,
                max,
            }
        })
        .collect();
    GrowthReport::classify(maxima, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzOptions {
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for LipschitzOptions {
    fn default() -> Self {
        LipschitzOptions {
            random_pairs: 4096,
            seed: 0x7715_7ab5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub lower: f64,
    pub upper: f64,
    pub pairs: usize,
}

/// Empirical Lipschitz constants from adjacent grid difference quotients
/// plus seeded random pairs `(t, t·(1+δ))`, `δ ∈ [1e-3, 1]`.
pub fn lipschitz_bounds(f: &FuncDescriptor, grid: &LogGrid, opts: LipschitzOptions) -> LipschitzEstimate {
    let ts = grid.samples();
    let vals: Vec<Complex64> = ts.par_iter().map(|&t| f.at(t)).collect();
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut pairs = 0;
    let mut push = |q: f64| {
        lower = lower.min(q);
        upper = upper.max(q);
        pairs += 1;
    };
    for i in 1..ts.len() {
        push((vals[i] - vals[i - 1]).norm() / (ts[i] - ts[i - 1]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (la, lb) = (grid.t_min.ln(), grid.t_max.ln());
    for _ in 0..opts.random_pairs {
        let t1 = rng.gen_range(la..lb).exp();
        let delta = rng.gen_range((1e-3f64).ln()..0.0).exp();
        let mut t2 = t1 * (1.0 + delta);
        if t2 > grid.t_max {
            t2 = t1 / (1.0 + delta);
        }
        if t2 == t1 {
            continue;
        }
        push((f.at(t2) - f.at(t1)).norm() / (t2 - t1).abs());
    }
    LipschitzEstimate {
        lower: if lower.is_finite() { lower } else { 0.0 },
        upper,
        pairs,
    }
}

/// Growth of `|f(t) − a·g(t)|` over the grid.
pub fn difference_report(
    f: &FuncDescriptor,
    g: &FuncDescriptor,
    a: Complex64,
    grid: &LogGrid,
    config: GrowthConfig,
) -> GrowthReport {
    window_report(grid, config, |t| {
        let (x, y) = (f.at(t), a * g.at(t));
        resolved(x - y, x.norm() + y.norm())
    })
}

/// `f` and `g` are classified equivalent when `|f − g|` is Bounded.
pub fn equivalence_test(f: &FuncDescriptor, g: &FuncDescriptor, grid: &LogGrid, config: GrowthConfig) -> GrowthReport {
    difference_report(f, g, Complex64::new(1.0, 0.0), grid, config)
}

/// Box searched for the projective coefficient `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectiveFit {
    pub a_best: Complex64,
    /// Final-window maximum of `|f − a_best·g|`.
    pub objective: f64,
    pub complex_search: bool,
    pub report: GrowthReport,
}

const GOLDEN_TOL: f64 = 1e-13;

/// Minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(h: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if a == b {
        return a;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d);
        }
    }
    let mid = 0.5 * (a + b);
    // Endpoints win ties so an exact fit on a degenerate bracket survives.
    [lo, hi, mid]
        .into_iter()
        .map(|x| (x, h(x)))
        .fold((mid, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0
}

/// Fits `a` minimizing the final-window maximum of `|f − a·g|`, then reports
/// growth of `|f − a_best·g|` over every window.
///
/// Real maps use golden-section search; complex maps alternate golden-section
/// searches on the real and imaginary parts of `a`. Without an explicit
/// search box the bracket is the range of `f/g` over the final window, which
/// contains the minimizer whenever `g` keeps its sign there.
pub fn projective_equivalence_test(
    f: &FuncDescriptor,
    g: &FuncDescriptor,
    grid: &LogGrid,
    search: Option<SearchBox>,
    config: GrowthConfig,
) -> Result<ProjectiveFit> {
    let ts = grid.window_samples(&grid.final_window());
    let fv: Vec<Complex64> = ts.iter().map(|&t| f.at(t)).collect();
    let gv: Vec<Complex64> = ts.iter().map(|&t| g.at(t)).collect();
    let gmax = gv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let fmax = fv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(gmax > 1e-300) || gmax <= 1e-14 * fmax {
        return Err(Error::DegenerateReference);
    }
    let objective = |a: Complex64| {
        fv.iter()
            .zip(&gv)
            .map(|(x, y)| (x - a * y).norm())
            .fold(0.0, f64::max)
    };
    let bbox = search.unwrap_or_else(|| {
        let ratios: Vec<Complex64> = fv
            .iter()
            .zip(&gv)
            .filter(|(_, y)| y.norm() > 1e-12 * gmax)
            .map(|(x, y)| x / y)
            .collect();
        let span = |sel: fn(&Complex64) -> f64| {
            ratios
                .iter()
                .map(sel)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        SearchBox {
            re: span(|z| z.re),
            im: span(|z| z.im),
        }
    });
    let complex_search = !(f.is_real() && g.is_real());
    let a_best = if !complex_search {
        Complex64::new(
            golden_section(|x| objective(Complex64::new(x, 0.0)), bbox.re.0, bbox.re.1, GOLDEN_TOL),
            0.0,
        )
    } else {
        let mut a = Complex64::new(
            0.5 * (bbox.re.0 + bbox.re.1),
            0.5 * (bbox.im.0 + bbox.im.1),
        );
        for _ in 0..60 {
            let prev = a;
            a.re = golden_section(|x| objective(Complex64::new(x, a.im)), bbox.re.0, bbox.re.1, GOLDEN_TOL);
            a.im = golden_section(|y| objective(Complex64::new(a.re, y)), bbox.im.0, bbox.im.1, GOLDEN_TOL);
            if (a - prev).norm() <= 1e-14 * (1.0 + a.norm()) {
                break;
            }
        }
        a
    };
    Ok(ProjectiveFit {
        a_best,
        objective: objective(a_best),
        complex_search,
        report: difference_report(f, g, a_best, grid, config),
    })
}

const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.25, 0.1, 0.01, 0.001];

/// Growth of `|f(a+b) − f(a) − f(b)|` over pairs `a = u·t`, `b = t − a`
/// with `t` on the grid and `u` from a fixed set of split fractions.
pub fn additivity_defect(f: &FuncDescriptor, grid: &LogGrid, config: GrowthConfig) -> GrowthReport {
    window_report(grid, config, |t| {
        let ft = f.at(t);
        SPLIT_FRACTIONS
            .iter()
            .map(|u| {
                let a = t * u;
                let b = t - a;
                let (fa, fb) = (f.at(a), f.at(b));
                resolved(ft - fa - fb, ft.norm() + fa.norm() + fb.norm())
            })
            .fold(0.0, f64::max)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyersFit {
    pub c: Complex64,
    pub residual: GrowthReport,
}

/// Slope `c ≈ lim f(t)/t` averaged over the final window, and the growth of
/// the residual `|f(t) − c·t|`. Real and imaginary parts are averaged
/// separately.
pub fn hyers_linearize(f: &FuncDescriptor, grid: &LogGrid, config: GrowthConfig) -> HyersFit {
    let ts = grid.window_samples(&grid.final_window());
    let (mut re, mut im) = (0.0, 0.0);
    for &t in &ts {
        let q = f.at(t) / t;
        re += q.re;
        im += q.im;
    }
    let n = ts.len() as f64;
    let c = Complex64::new(re / n, im / n);
    let residual = window_report(grid, config, |t| {
        let (x, y) = (f.at(t), c * t);
        resolved(x - y, x.norm() + y.norm())
    });
    HyersFit { c, residual }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BisEvidence {
    /// `(window index, max |f''| over the window)`.
    pub window_max_d2: Vec<(i32, f64)>,
    pub final_max: f64,
    /// Slope of `log max|f''|` over the windows, a decreasing-trend diagnostic.
    pub trend_slope: f64,
    pub epsilon: f64,
    pub verdict: bool,
}

/// Vanishing-second-derivative check: true iff the final-window maximum of
/// `|f''|` is below `epsilon`.
pub fn in_l_bis(f: &FuncDescriptor, grid: &LogGrid, epsilon: f64) -> Result<BisEvidence> {
    f.check_derivatives(2, "$")?;
    let windows = grid.windows();
    let window_max_d2: Vec<(i32, f64)> = windows
        .par_iter()
        .map(|w| {
            let m = grid
                .window_samples(w)
                .into_iter()
                .map(|t| f.eval_d2(t).map(|z| z.norm()).unwrap_or(f64::NAN))
                .fold(0.0, f64::max);
            (w.index, m)
        })
        .collect();
    let xs: Vec<f64> = window_max_d2.iter().map(|w| w.0 as f64).collect();
    let ys: Vec<f64> = window_max_d2.iter().map(|w| w.1.max(1e-300).ln()).collect();
    let final_max = window_max_d2.last().map_or(f64::NAN, |w| w.1);
    Ok(BisEvidence {
        trend_slope: super::growth::ls_slope(&xs, &ys),
        final_max,
        epsilon,
        verdict: final_max < epsilon,
        window_max_d2,
    })
}

fn half_log_quotient(f: &FuncDescriptor, n: u64) -> Complex64 {
    let l = (n as f64).ln();
    let h = 0.5 * l;
    (f.at(l) - f.at(h)) / h
}

/// Difference of the quotients `(φ(log n) − φ(log √n)) / log √n` at `n` and
/// `m`, as a complex value.
pub fn bid_difference(f: &FuncDescriptor, n: u64, m: u64) -> Result<Complex64> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter(format!(
            "bid functional needs n, m >= 2, got ({n}, {m})"
        )));
    }
    Ok(half_log_quotient(f, n) - half_log_quotient(f, m))
}

/// `Δ(n, m)`: modulus of [`bid_difference`].
pub fn bid_functional(f: &FuncDescriptor, n: u64, m: u64) -> Result<f64> {
    bid_difference(f, n, m).map(|z| z.norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BidSweep {
    pub exponents: (u32, u32),
    pub max: f64,
    pub argmax: (u64, u64),
    /// Maxima of the real and imaginary parts of the difference taken separately.
    pub max_re: f64,
    pub max_im: f64,
}

/// Sweep of `Δ(2^i, 2^j)` over `i, j` in the exponent range.
pub fn bid_sweep(f: &FuncDescriptor, exp_min: u32, exp_max: u32) -> Result<BidSweep> {
    if exp_min < 1 || exp_max < exp_min || exp_max > 62 {
        return Err(Error::InvalidParameter(format!(
            "bid sweep exponents must satisfy 1 <= min <= max <= 62, got [{exp_min}, {exp_max}]"
        )));
    }
    let q: Vec<(u64, Complex64)> = (exp_min..=exp_max)
        .map(|i| {
            let n = 1u64 << i;
            (n, half_log_quotient(f, n))
        })
        .collect();
    let mut out = BidSweep {
        exponents: (exp_min, exp_max),
        max: 0.0,
        argmax: (q[0].0, q[0].0),
        max_re: 0.0,
        max_im: 0.0,
    };
    for (n, qn) in &q {
        for (m, qm) in &q {
            let d = qn - qm;
            if d.norm() > out.max {
                out.max = d.norm();
                out.argmax = (*n, *m);
            }
            out.max_re = out.max_re.max(d.re.abs());
            out.max_im = out.max_im.max(d.im.abs());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::growth::Verdict;

    fn small_grid() -> LogGrid {
        LogGrid::dyadic(-4, 30, 128).unwrap()
    }

    #[test]
    fn linear_lipschitz_is_exact() {
        let est = lipschitz_bounds(&FuncDescriptor::linear(3.0), &small_grid(), LipschitzOptions::default());
        assert!((est.lower - 3.0).abs() < 1e-12 && (est.upper - 3.0).abs() < 1e-12, "{est:?}");
    }

    #[test]
    fn golden_section_finds_vertex_of_abs() {
        let x = golden_section(|x| (x - 0.3).abs(), -2.0, 5.0, 1e-14);
        assert!((x - 0.3).abs() < 1e-12);
        assert_eq!(golden_section(|x| x * x, 1.5, 1.5, 1e-14), 1.5);
    }

    #[test]
    fn projective_fit_on_scaled_copy() {
        let g = FuncDescriptor::sin_log(0.1, 1.0).unwrap();
        for c in [Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(1.0, 1.0)] {
            let f = FuncDescriptor::scale(c, g.clone());
            let fit = projective_equivalence_test(&f, &g, &small_grid(), None, GrowthConfig::default()).unwrap();
            assert!((fit.a_best - c).norm() < 1e-6, "{c} -> {}", fit.a_best);
            assert_eq!(fit.report.verdict, Verdict::Bounded);
        }
    }

    #[test]
    fn degenerate_reference_flagged() {
        let f = FuncDescriptor::linear(1.0);
        let g = FuncDescriptor::linear(0.0);
        assert_eq!(
            projective_equivalence_test(&f, &g, &small_grid(), None, GrowthConfig::default()),
            Err(Error::DegenerateReference)
        );
    }

    #[test]
    fn bid_rejects_small_arguments() {
        let f = FuncDescriptor::linear(1.0);
        assert!(bid_functional(&f, 1, 4).is_err());
        assert!(bid_functional(&f, 4, 0).is_err());
        assert_eq!(bid_functional(&f, 7, 7).unwrap(), 0.0);
    }

    #[test]
    fn bis_needs_second_derivative() {
        let f = FuncDescriptor::sin_plain().with_max_derivative(1);
        assert!(matches!(
            in_l_bis(&f, &small_grid(), 1e-6),
            Err(Error::DerivativeUnavailable { .. })
        ));
    }
}
