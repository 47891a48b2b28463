//! The moving interval `A(t) + ct < x < A(t) + ct + L(t)` and its mapping onto
//! the fixed reference interval `0 < xi < L0`.
//!
//! With `xi = L0 (x - A(t) - ct) / L(t)` the operator `d/dt - D d^2/dx^2`
//! becomes `d/dt - D alpha(t) d^2/dxi^2 - b(xi, t) d/dxi` where
//!
//! ```text
//! alpha(t)   = L0^2 / L(t)^2
//! b(xi, t)   = ((c + A'(t)) L0 + xi L'(t)) / L(t)
//! ```
//!
//! The module also provides the exponent field `E(xi, t)` that removes the
//! first-order term, its spread `delta_e`, and the curvature quantities
//! `Q_bar`, `Q_low` entering the periodic-interval eigenvalue bounds.

use crate::error::{Error, Result};
use crate::periodic_fn::{refined_max, refined_min, sampled_extrema, PeriodicFunction};

/// Samples per period used to verify `L(t) > 0`.
pub const POSITIVITY_SAMPLES: usize = 4096;
/// Default time resolution of the `E` extremum search.
pub const DELTA_E_SAMPLES: usize = 256;
/// Default time resolution for `overlap_width`.
pub const OVERLAP_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedCoefficients {
    /// Multiplies the diffusivity: `L0^2 / L(t)^2`.
    pub diffusion_factor: f64,
    /// First-order coefficient `b(xi, t)`.
    pub advection: f64,
}

#[derive(Debug, Clone)]
pub struct DomainMotion {
    speed: f64,
    length: PeriodicFunction,
    offset: PeriodicFunction,
    reference_length: f64,
    length_rate: PeriodicFunction,
    length_accel: PeriodicFunction,
    offset_rate: PeriodicFunction,
    offset_accel: PeriodicFunction,
}

impl DomainMotion {
    /// `reference_length` defaults to `L(0)`.
    pub fn new(
        speed: f64,
        length: PeriodicFunction,
        offset: PeriodicFunction,
        reference_length: Option<f64>,
    ) -> Result<Self> {
        if !speed.is_finite() {
            return Err(Error::invalid("domain.c", "must be finite"));
        }
        if length.period() != offset.period() {
            return Err(Error::invalid(
                "domain.A",
                format!(
                    "period {} differs from the period {} of domain.L",
                    offset.period(),
                    length.period()
                ),
            ));
        }
        let (min_len, _, t_min, _) = length.sampled_extrema(POSITIVITY_SAMPLES);
        if !(min_len > 0.0) {
            return Err(Error::invalid(
                "domain.L",
                format!("must stay positive: min sampled value {min_len} at t={t_min}"),
            ));
        }
        let reference_length = reference_length.unwrap_or_else(|| length.eval(0.0));
        if !(reference_length.is_finite() && reference_length > 0.0) {
            return Err(Error::invalid(
                "domain.L0",
                format!("must be positive, got {reference_length}"),
            ));
        }
        Ok(Self {
            speed,
            length_rate: length.derivative(1),
            length_accel: length.derivative(2),
            offset_rate: offset.derivative(1),
            offset_accel: offset.derivative(2),
            length,
            offset,
            reference_length,
        })
    }

    /// Fixed interval `ct < x < ct + L0` of constant length.
    pub fn translating(speed: f64, reference_length: f64, period: f64) -> Result<Self> {
        Self::new(
            speed,
            PeriodicFunction::constant(period, reference_length)?,
            PeriodicFunction::constant(period, 0.0)?,
            Some(reference_length),
        )
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn period(&self) -> f64 {
        self.length.period()
    }

    pub fn reference_length(&self) -> f64 {
        self.reference_length
    }

    pub fn length_fn(&self) -> &PeriodicFunction {
        &self.length
    }

    pub fn offset_fn(&self) -> &PeriodicFunction {
        &self.offset
    }

    /// Length and offset are both constant, i.e. the interval only translates.
    pub fn is_rigid(&self) -> bool {
        self.length.is_constant() && self.offset.is_constant()
    }

    pub fn length(&self, t: f64) -> f64 {
        self.length.eval(t)
    }

    pub fn length_rate(&self, t: f64) -> f64 {
        self.length_rate.eval(t)
    }

    pub fn length_accel(&self, t: f64) -> f64 {
        self.length_accel.eval(t)
    }

    pub fn offset(&self, t: f64) -> f64 {
        self.offset.eval(t)
    }

    pub fn offset_rate(&self, t: f64) -> f64 {
        self.offset_rate.eval(t)
    }

    pub fn offset_accel(&self, t: f64) -> f64 {
        self.offset_accel.eval(t)
    }

    pub fn diffusion_factor(&self, t: f64) -> f64 {
        let ratio = self.reference_length / self.length(t);
        ratio * ratio
    }

    /// `b(xi, t)` without range checking; used in the stepping loops.
    pub fn advection(&self, xi: f64, t: f64) -> f64 {
        ((self.speed + self.offset_rate(t)) * self.reference_length + xi * self.length_rate(t))
            / self.length(t)
    }

    pub fn coefficients_at(&self, xi: f64, t: f64) -> Result<TransformedCoefficients> {
        if !(0.0..=self.reference_length).contains(&xi) {
            return Err(Error::OutOfRange {
                xi,
                l0: self.reference_length,
            });
        }
        Ok(TransformedCoefficients {
            diffusion_factor: self.diffusion_factor(t),
            advection: self.advection(xi, t),
        })
    }

    /// `E(xi, t) = L' L xi^2 / (4 L0^2) + A' L xi / (2 L0)`.
    pub fn e_field(&self, xi: f64, t: f64) -> f64 {
        let (quad, lin) = self.e_coefficients(t);
        quad * xi * xi + lin * xi
    }

    /// `dE/dt` at fixed `xi`.
    pub fn e_field_rate(&self, xi: f64, t: f64) -> f64 {
        let l0 = self.reference_length;
        let l = self.length(t);
        let ld = self.length_rate(t);
        let ldd = self.length_accel(t);
        let ad = self.offset_rate(t);
        let add = self.offset_accel(t);
        (ldd * l + ld * ld) * xi * xi / (4.0 * l0 * l0) + (add * l + ad * ld) * xi / (2.0 * l0)
    }

    fn e_coefficients(&self, t: f64) -> (f64, f64) {
        let l0 = self.reference_length;
        let l = self.length(t);
        (
            self.length_rate(t) * l / (4.0 * l0 * l0),
            self.offset_rate(t) * l / (2.0 * l0),
        )
    }

    /// Exact `(min, max)` of `E(., t)` over `[0, L0]`: the field is a quadratic in `xi`.
    fn e_extrema_at(&self, t: f64) -> (f64, f64) {
        let (quad, lin) = self.e_coefficients(t);
        let l0 = self.reference_length;
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let end = quad * l0 * l0 + lin * l0;
        lo = lo.min(end);
        hi = hi.max(end);
        if quad != 0.0 {
            let vertex = -lin / (2.0 * quad);
            if vertex > 0.0 && vertex < l0 {
                let v = quad * vertex * vertex + lin * vertex;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// `max E - min E` over `[0, L0] x [0, T]`.
    pub fn delta_e(&self) -> f64 {
        self.delta_e_with(DELTA_E_SAMPLES)
    }

    /// The `xi` extremum at each time is exact; the time extremum uses
    /// `samples` points per period followed by golden-section refinement.
    pub fn delta_e_with(&self, samples: usize) -> f64 {
        let period = self.period();
        let hi = refined_max(|t| self.e_extrema_at(t).1, period, samples);
        let lo = refined_min(|t| self.e_extrema_at(t).0, period, samples);
        (hi - lo).max(0.0)
    }

    /// `(Q_bar(t), Q_low(t))`.
    pub fn q_bounds(&self, t: f64) -> (f64, f64) {
        let l = self.length(t);
        q_extrema(self.length_accel(t) * l, self.offset_accel(t) * l)
    }

    /// `min_t (A + L) - max_t A`; positive when some fixed interval stays inside.
    pub fn overlap_width(&self) -> f64 {
        self.overlap_width_with(OVERLAP_SAMPLES)
    }

    pub fn overlap_width_with(&self, samples: usize) -> f64 {
        let period = self.period();
        let right = refined_min(|t| self.offset(t) + self.length(t), period, samples);
        let left = refined_max(|t| self.offset(t), period, samples);
        right - left
    }

    /// `(min, max)` of `L` over a dense sampling of one period.
    pub fn length_range(&self) -> (f64, f64) {
        let (lo, hi, _, _) = sampled_extrema(|t| self.length(t), self.period(), POSITIVITY_SAMPLES);
        (lo, hi)
    }
}

/// Extrema over `eta in [0, 1]` of `eta^2 l_accel_l / 2 + eta a_accel_l`, returned
/// as `(max, -min)`. Both are non-negative because the quadratic vanishes at 0.
pub fn q_extrema(l_accel_l: f64, a_accel_l: f64) -> (f64, f64) {
    let g = |eta: f64| 0.5 * eta * eta * l_accel_l + eta * a_accel_l;
    let mut hi = 0.0f64;
    let mut lo = 0.0f64;
    let mut visit = |eta: f64| {
        let v = g(eta);
        hi = hi.max(v);
        lo = lo.min(v);
    };
    visit(1.0);
    if l_accel_l != 0.0 {
        let vertex = -a_accel_l / l_accel_l;
        if vertex > 0.0 && vertex < 1.0 {
            visit(vertex);
        }
    }
    (hi, -lo)
}
