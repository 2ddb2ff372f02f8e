//! Finite-scale evidence for `sup < ∞` versus `sup = ∞`.
//!
//! A nonnegative function of scale is reduced to per-window maxima `M_k`. The
//! tail windows (lower edge at or above `tail_from`) are regressed as
//! `log M_k` against the window index (or its logarithm) and classified with
//! explicit thresholds, all of which are echoed in the report.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

/// Abscissa of the log-maxima regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegressionAxis {
    /// `log M_k` against `k`; a map growing like `t^p` on dyadic windows
    /// has slope `p·log 2`.
    WindowIndex,
    /// `log M_k` against `log k`; for sweeps where the argument grows
    /// linearly in `k` (e.g. `log √n` with `n = 2^k`). Needs `k ≥ 1`.
    LogWindowIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthConfig {
    pub tau_grow: f64,
    pub tau_flat: f64,
    /// `B_cap = cap_factor · max(M_first, floor)` over the tail.
    pub cap_factor: f64,
    pub floor: f64,
    pub min_windows: usize,
    pub tail_from: f64,
    pub axis: RegressionAxis,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            tau_grow: 0.05,
            tau_flat: 0.05,
            cap_factor: 10.0,
            floor: 1e-9,
            min_windows: 12,
            tail_from: 1.0,
            axis: RegressionAxis::WindowIndex,
        }
    }
}

impl GrowthConfig {
    /// Configuration for sweeps indexed by `k = log2 n`, `k ≥ 1`.
    pub fn for_log_sweep() -> Self {
        GrowthConfig {
            axis: RegressionAxis::LogWindowIndex,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowMax {
    pub index: i32,
    /// Lower edge of the window on the scale axis.
    pub lo: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub window_maxima: Vec<WindowMax>,
    pub tail_windows: usize,
    pub slope: f64,
    pub cap: f64,
    pub verdict: Verdict,
    pub config: GrowthConfig,
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

impl GrowthReport {
    pub fn classify(window_maxima: Vec<WindowMax>, config: GrowthConfig) -> Self {
        let tail: Vec<&WindowMax> = window_maxima
            .iter()
            .filter(|w| w.lo >= config.tail_from)
            .filter(|w| config.axis == RegressionAxis::WindowIndex || w.index >= 1)
            .collect();
        let xs: Vec<f64> = tail
            .iter()
            .map(|w| match config.axis {
                RegressionAxis::WindowIndex => w.index as f64,
                RegressionAxis::LogWindowIndex => (w.index as f64).ln(),
            })
            .collect();
        let ys: Vec<f64> = tail.iter().map(|w| w.max.max(config.floor).ln()).collect();
        let slope = ls_slope(&xs, &ys);
        let first = tail.first().map_or(0.0, |w| w.max);
        let cap = config.cap_factor * first.max(config.floor);
        let tail_max = tail.iter().map(|w| w.max).fold(0.0, f64::max);
        let last = tail.last().map_or(0.0, |w| w.max);

        let verdict = if tail.len() < config.min_windows || tail.iter().any(|w| !w.max.is_finite()) {
            Verdict::Inconclusive
        } else if slope > config.tau_grow && last > config.floor {
            Verdict::Growing
        } else if tail_max <= cap && slope <= config.tau_flat {
            Verdict::Bounded
        } else {
            Verdict::Inconclusive
        };
        GrowthReport {
            tail_windows: tail.len(),
            window_maxima,
            slope,
            cap,
            verdict,
            config,
        }
    }

    pub fn max(&self) -> f64 {
        self.window_maxima.iter().map(|w| w.max).fold(0.0, f64::max)
    }

    pub fn final_max(&self) -> f64 {
        self.window_maxima.last().map_or(0.0, |w| w.max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn windows(f: impl Fn(i32) -> f64, ks: std::ops::RangeInclusive<i32>) -> Vec<WindowMax> {
        ks.map(|k| WindowMax {
            index: k,
            lo: 2f64.powi(k),
            max: f(k),
        })
        .collect()
    }

    #[test]
    fn geometric_growth_has_log2_slope() {
        let r = GrowthReport::classify(windows(|k| 2f64.powi(k + 1), 0..=39), GrowthConfig::default());
        assert!((r.slope - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Growing);
    }

    #[test]
    fn constant_is_bounded_and_zero_is_bounded() {
        let r = GrowthReport::classify(windows(|_| 1.0, 0..=39), GrowthConfig::default());
        assert_eq!(r.verdict, Verdict::Bounded);
        let r = GrowthReport::classify(windows(|_| 0.0, 0..=39), GrowthConfig::default());
        assert_eq!(r.verdict, Verdict::Bounded);
        assert_eq!(r.slope, 0.0);
    }

    #[test]
    fn too_few_windows_is_inconclusive() {
        let r = GrowthReport::classify(windows(|k| 2f64.powi(k), 0..=5), GrowthConfig::default());
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn jump_above_cap_is_inconclusive() {
        let r = GrowthReport::classify(
            windows(|k| if k == 20 { 1e3 } else { 1.0 }, 0..=39),
            GrowthConfig::default(),
        );
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn log_axis_sees_linear_growth_in_k() {
        let r = GrowthReport::classify(
            windows(|k| 0.35 * k as f64 + 1.0, 1..=30),
            GrowthConfig::for_log_sweep(),
        );
        assert!(r.slope > 0.5, "{}", r.slope);
        assert_eq!(r.verdict, Verdict::Growing);
    }

    #[test]
    fn slope_of_line() {
        assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
        assert_eq!(ls_slope(&[1.0], &[1.0]), 0.0);
    }
}
