//! T-periodic scalar functions of time stored as truncated Fourier series.
//!
//! The interval length `L(t)` and offset `A(t)` are kept in this form so that
//! their first and second derivatives are available exactly.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Default node count for period averages of composite integrands.
pub const DEFAULT_QUADRATURE_NODES: usize = 1024;

/// `f(t) = mean + sum_k cos[k-1] cos(2 pi k t / T) + sin[k-1] sin(2 pi k t / T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction {
    period: f64,
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PeriodicFunction {
    pub fn new(period: f64, mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(
                "period",
                format!("must be positive, got {period}"),
            ));
        }
        if !mean.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "must be finite"));
        }
        Ok(Self {
            period,
            mean,
            cos,
            sin,
        })
    }

    pub fn constant(period: f64, value: f64) -> Result<Self> {
        Self::new(period, value, Vec::new(), Vec::new())
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    pub fn harmonics(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// True when every oscillating coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        // Reduce first so that t and t + nT hit the same phase.
        let phase = TAU * t.rem_euclid(self.period) / self.period;
        let mut value = self.mean;
        for k in 0..self.harmonics() {
            let arg = (k + 1) as f64 * phase;
            let (s, c) = arg.sin_cos();
            value += self.cos.get(k).copied().unwrap_or(0.0) * c;
            value += self.sin.get(k).copied().unwrap_or(0.0) * s;
        }
        value
    }

    /// Term-wise derivative of the given order; order 0 returns a copy.
    pub fn derivative(&self, order: u32) -> PeriodicFunction {
        let mut out = self.clone();
        for _ in 0..order {
            out = out.first_derivative();
        }
        out
    }

    fn first_derivative(&self) -> PeriodicFunction {
        let n = self.harmonics();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 0..n {
            let w = TAU * (k + 1) as f64 / self.period;
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            cos[k] = b * w;
            sin[k] = -a * w;
        }
        PeriodicFunction {
            period: self.period,
            mean: 0.0,
            cos,
            sin,
        }
    }

    /// Period average of the series itself, which is its constant term.
    pub fn period_mean(&self) -> f64 {
        self.mean
    }

    /// `(min, max, argmin, argmax)` over `samples` equispaced times in one period.
    pub fn sampled_extrema(&self, samples: usize) -> (f64, f64, f64, f64) {
        sampled_extrema(|t| self.eval(t), self.period, samples)
    }
}

/// Composite trapezoid average of a `period`-periodic integrand.
///
/// For periodic integrands the trapezoid rule reduces to an equal-weight sum
/// over the left endpoints and converges spectrally.
pub fn period_average(f: impl Fn(f64) -> f64, period: f64, nodes: usize) -> f64 {
    let nodes = nodes.max(1);
    let h = period / nodes as f64;
    let sum: f64 = (0..nodes).map(|k| f(k as f64 * h)).sum();
    sum / nodes as f64
}

pub(crate) fn sampled_extrema(
    f: impl Fn(f64) -> f64,
    period: f64,
    samples: usize,
) -> (f64, f64, f64, f64) {
    let h = period / samples as f64;
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for k in 0..samples {
        let t = k as f64 * h;
        let v = f(t);
        if v < lo.0 {
            lo = (v, t);
        }
        if v > hi.0 {
            hi = (v, t);
        }
    }
    (lo.0, hi.0, lo.1, hi.1)
}

/// Golden-section maximization of `f` on `[a, b]`; returns the best value seen.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f(a).max(f(b)).max(f1).max(f2);
    for _ in 0..iterations {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// Maximum of a `period`-periodic function: dense sampling, then golden-section
/// refinement in the two cells around the best sample.
pub(crate) fn refined_max(f: impl Fn(f64) -> f64, period: f64, samples: usize) -> f64 {
    let (_, hi, _, t_hi) = sampled_extrema(&f, period, samples);
    let h = period / samples as f64;
    golden_max(&f, t_hi - h, t_hi + h, 60).max(hi)
}

pub(crate) fn refined_min(f: impl Fn(f64) -> f64, period: f64, samples: usize) -> f64 {
    -refined_max(|t| -f(t), period, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn wobble() -> PeriodicFunction {
        PeriodicFunction::new(1.0, 1.0, vec![], vec![0.1]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = wobble();
        assert!((f.eval(0.25) - 1.1).abs() < 1e-15);
        assert!((f.eval(1.25) - 1.1).abs() < 1e-15);
        let c = PeriodicFunction::constant(3.0, 2.0).unwrap();
        assert_eq!(c.eval(0.7), 2.0);
        assert_eq!(c.eval(-11.3), 2.0);
    }

    #[test]
    fn derivative_examples() {
        let f = wobble();
        let df = f.derivative(1);
        assert!((df.eval(0.0) - 0.2 * PI).abs() < 1e-14);
        assert!((df.eval(0.3) - 0.2 * PI * (2.0 * PI * 0.3).cos()).abs() < 1e-14);
        let c = PeriodicFunction::constant(1.0, 5.0).unwrap();
        assert_eq!(c.derivative(2).eval(0.4), 0.0);
    }

    #[test]
    fn means() {
        assert_eq!(wobble().period_mean(), 1.0);
        assert_eq!(
            PeriodicFunction::constant(2.0, 3.0).unwrap().period_mean(),
            3.0
        );
        let f = wobble();
        let coarse = period_average(|t| f.eval(t).powi(-2), 1.0, DEFAULT_QUADRATURE_NODES);
        let oracle = period_average(|t| f.eval(t).powi(-2), 1.0, 4096);
        assert!((coarse - oracle).abs() <= 1e-10);
    }

    #[test]
    fn rejects_bad_period() {
        assert!(PeriodicFunction::new(0.0, 1.0, vec![], vec![]).is_err());
        assert!(PeriodicFunction::new(-1.0, 1.0, vec![], vec![]).is_err());
        assert!(PeriodicFunction::new(1.0, f64::NAN, vec![], vec![]).is_err());
    }

    #[test]
    fn refined_extrema_of_sine() {
        let f = |t: f64| (TAU * t).sin();
        assert!((refined_max(f, 1.0, 7) - 1.0).abs() < 1e-12);
        assert!((refined_min(f, 1.0, 7) + 1.0).abs() < 1e-12);
    }
}
