//! Power-law competition kinetics.
//!
//! ```text
//! f1(u1, u2) = u1 (r1 - (h1 u1)^n - (g1 u2)^n)
//! f2(u1, u2) = u2 (r2 - (g2 u1)^n - (h2 u2)^n)
//! ```
//!
//! With `n = 1` this is the Lotka-Volterra system. The single-species terms are
//! `F_i(u) = u (r_i - (h_i u)^n)` with carrying capacity `K_i = r_i^(1/n) / h_i`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    One,
    Two,
}

impl Species {
    pub fn index(self) -> usize {
        match self {
            Species::One => 1,
            Species::Two => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Species::One),
            2 => Some(Species::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Species::One => Species::Two,
            Species::Two => Species::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionModel {
    pub r1: f64,
    pub r2: f64,
    pub n: f64,
    pub h1_hat: f64,
    pub h2_hat: f64,
    pub g2_hat: f64,
    /// Effect of species 2 on species 1; only used by the coupled simulator.
    pub g1_hat: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ReactionModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("reaction.r1", self.r1),
            ("reaction.r2", self.r2),
            ("reaction.n", self.n),
            ("reaction.h1_hat", self.h1_hat),
            ("reaction.h2_hat", self.h2_hat),
            ("reaction.g2_hat", self.g2_hat),
            ("reaction.D1", self.d1),
            ("reaction.D2", self.d2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.g1_hat.is_finite() && self.g1_hat >= 0.0) {
            return Err(Error::invalid(
                "reaction.g1_hat",
                format!("must be non-negative, got {}", self.g1_hat),
            ));
        }
        Ok(())
    }

    pub fn rate(&self, s: Species) -> f64 {
        match s {
            Species::One => self.r1,
            Species::Two => self.r2,
        }
    }

    pub fn diffusivity(&self, s: Species) -> f64 {
        match s {
            Species::One => self.d1,
            Species::Two => self.d2,
        }
    }

    fn self_coefficient(&self, s: Species) -> f64 {
        match s {
            Species::One => self.h1_hat,
            Species::Two => self.h2_hat,
        }
    }

    /// Coefficient of the other species in the per-capita rate of `s`.
    fn cross_coefficient(&self, s: Species) -> f64 {
        match s {
            Species::One => self.g1_hat,
            Species::Two => self.g2_hat,
        }
    }

    #[inline]
    fn power(&self, coefficient: f64, u: f64) -> f64 {
        let x = coefficient * u;
        if x == 0.0 {
            0.0
        } else if self.n == 1.0 {
            x
        } else {
            x.powf(self.n)
        }
    }

    /// `K_i = r_i^(1/n) / h_i`.
    pub fn capacity(&self, s: Species) -> f64 {
        self.rate(s).powf(1.0 / self.n) / self.self_coefficient(s)
    }

    pub fn k1(&self) -> f64 {
        self.capacity(Species::One)
    }

    pub fn k2(&self) -> f64 {
        self.capacity(Species::Two)
    }

    /// `h_i(u) = (h_i_hat u)^n`.
    pub fn self_limitation(&self, s: Species, u: f64) -> f64 {
        self.power(self.self_coefficient(s), u)
    }

    /// `h1(u)`.
    pub fn h1(&self, u: f64) -> f64 {
        self.self_limitation(Species::One, u)
    }

    /// `h2(u)`.
    pub fn h2(&self, u: f64) -> f64 {
        self.self_limitation(Species::Two, u)
    }

    /// `g2(u1) = (g2_hat u1)^n`: the per-capita competitive load species 1 puts on species 2.
    pub fn g2(&self, u1: f64) -> f64 {
        self.power(self.g2_hat, u1)
    }

    /// `(g1_hat u2)^n`.
    pub fn g1(&self, u2: f64) -> f64 {
        self.power(self.g1_hat, u2)
    }

    /// `F_s(u) = u (r_s - h_s(u))`.
    pub fn solo_growth(&self, s: Species, u: f64) -> Result<f64> {
        check_density("solo_growth", u)?;
        Ok(u * (self.rate(s) - self.self_limitation(s, u)))
    }

    /// `f1(u1, u2)`.
    pub fn growth_1(&self, u1: f64, u2: f64) -> Result<f64> {
        check_density("growth_1", u1)?;
        check_density("growth_1", u2)?;
        Ok(u1 * (self.r1 - self.h1(u1) - self.g1(u2)))
    }

    /// `f2(u1, u2)`.
    pub fn growth_2(&self, u1: f64, u2: f64) -> Result<f64> {
        check_density("growth_2", u1)?;
        check_density("growth_2", u2)?;
        Ok(u2 * (self.r2 - self.g2(u1) - self.h2(u2)))
    }

    /// Per-capita loss `q` such that the kinetics of `s` read `-q u_s`:
    /// `q = h_s(own) + (cross_hat other)^n - r_s`. Negative inputs are clamped to 0.
    #[inline]
    pub fn per_capita_loss(&self, s: Species, own: f64, other: f64) -> f64 {
        self.self_limitation(s, own.max(0.0))
            + self.power(self.cross_coefficient(s), other.max(0.0))
            - self.rate(s)
    }

    /// `beta_hat = sup_{[0, K1]} g2 = (g2_hat K1)^n`.
    pub fn beta_hat(&self) -> f64 {
        self.g2(self.k1())
    }
}

fn check_density(what: &'static str, u: f64) -> Result<()> {
    if u < 0.0 || u.is_nan() {
        Err(Error::NegativeDensity { what, value: u })
    } else {
        Ok(())
    }
}
