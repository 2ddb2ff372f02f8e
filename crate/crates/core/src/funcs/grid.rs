use serde::Serialize;

use crate::error::{Error, Result};

/// Logarithmic sampling grid over `[t_min, t_max]`, partitioned into windows
/// `[b^k, b^{k+1}]` clipped to the range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_window: usize,
    pub window_base: f64,
}

/// One window of a [`LogGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub index: i32,
    pub lo: f64,
    pub hi: f64,
}

impl Default for LogGrid {
    /// `[2^-20, 2^40]`, 512 samples per dyadic window.
    fn default() -> Self {
        LogGrid {
            t_min: 2f64.powi(-20),
            t_max: 2f64.powi(40),
            points_per_window: 512,
            window_base: 2.0,
        }
    }
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, points_per_window: usize, window_base: f64) -> Result<Self> {
        let g = LogGrid {
            t_min,
            t_max,
            points_per_window,
            window_base,
        };
        g.validate()?;
        Ok(g)
    }

    /// Dyadic grid over `[2^k_min, 2^k_max]`.
    pub fn dyadic(k_min: i32, k_max: i32, points_per_window: usize) -> Result<Self> {
        Self::new(2f64.powi(k_min), 2f64.powi(k_max), points_per_window, 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(Error::InvalidGrid(format!("t_min must be positive, got {}", self.t_min)));
        }
        if !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "t_max must exceed t_min ({} <= {})",
                self.t_max, self.t_min
            )));
        }
        if self.points_per_window < 2 {
            return Err(Error::InvalidGrid("need at least 2 points per window".into()));
        }
        if !(self.window_base > 1.0 && self.window_base.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "window base must exceed 1, got {}",
                self.window_base
            )));
        }
        Ok(())
    }

    fn power(&self, k: i32) -> f64 {
        if self.window_base == 2.0 {
            2f64.powi(k)
        } else {
            self.window_base.powi(k)
        }
    }

    /// Windows in increasing order; they tile `[t_min, t_max]`.
    pub fn windows(&self) -> Vec<Window> {
        let b = self.window_base;
        let mut k = (self.t_min.ln() / b.ln()).floor() as i32;
        // Guard against log rounding on exact powers.
        while self.power(k + 1) <= self.t_min {
            k += 1;
        }
        while self.power(k) > self.t_min {
            k -= 1;
        }
        let mut out = Vec::new();
        loop {
            let lo = self.power(k).max(self.t_min);
            let hi = self.power(k + 1).min(self.t_max);
            if lo >= self.t_max {
                break;
            }
            out.push(Window { index: k, lo, hi });
            k += 1;
        }
        out
    }

    /// Log-spaced samples of one window, both endpoints included.
    pub fn window_samples(&self, w: &Window) -> Vec<f64> {
        let n = self.points_per_window;
        let (a, b) = (w.lo.ln(), w.hi.ln());
        let mut out: Vec<f64> = (0..n)
            .map(|j| (a + (b - a) * j as f64 / (n - 1) as f64).exp())
            .collect();
        out[0] = w.lo;
        out[n - 1] = w.hi;
        for t in out.iter_mut() {
            *t = t.clamp(self.t_min, self.t_max);
        }
        out
    }

    /// All samples in increasing order, shared window endpoints listed once.
    pub fn samples(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for w in self.windows() {
            for t in self.window_samples(&w) {
                if out.last().is_none_or(|&last| t > last) {
                    out.push(t);
                }
            }
        }
        out
    }

    pub fn final_window(&self) -> Window {
        *self.windows().last().expect("a valid grid has at least one window")
    }
}
