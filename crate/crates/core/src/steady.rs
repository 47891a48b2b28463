//! Positive periodic states `u_s*` of the single-species problems
//! `u_t = L_s u + F_s(u)`, reached by integrating period after period until the
//! period map stops moving the solution.

use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::floquet::{principal_eigenpair, ZeroPotential};
use crate::pde::{sup_distance, Grid, SpaceTimeField, SpeciesStepper};
use crate::reaction::{ReactionModel, Species};

#[derive(Debug, Clone, Copy)]
pub struct SteadyOptions {
    /// Initial profile is `amplitude * K * sin(pi xi / L0)`.
    pub initial_amplitude: f64,
    /// Stop once `||u((n+1)T) - u(nT)||_inf` falls below this.
    pub tolerance: f64,
    pub max_periods: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            initial_amplitude: 0.5,
            tolerance: 1e-9,
            max_periods: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub species: Species,
    /// Final period of the run, or zeros when `extinct`.
    pub field: SpaceTimeField,
    /// The subcritical case `r <= mu`: no positive periodic state exists.
    pub extinct: bool,
    /// Principal eigenvalue `mu_s` of the linear operator without kinetics.
    pub mu: f64,
    history: Vec<f64>,
}

impl SteadyState {
    /// Per-period sup-norm deltas, one per integrated period.
    pub fn convergence_history(&self) -> &[f64] {
        &self.history
    }

    pub fn periods(&self) -> usize {
        self.history.len()
    }

    pub fn final_delta(&self) -> Option<f64> {
        self.history.last().copied()
    }
}

pub fn periodic_steady_state(
    species: Species,
    model: &ReactionModel,
    domain: &DomainMotion,
    grid: Grid,
) -> Result<SteadyState> {
    periodic_steady_state_with(species, model, domain, grid, SteadyOptions::default(), None)
}

/// As [`periodic_steady_state`]; a previously computed `mu_s` skips the eigensolve.
pub fn periodic_steady_state_with(
    species: Species,
    model: &ReactionModel,
    domain: &DomainMotion,
    grid: Grid,
    options: SteadyOptions,
    mu: Option<f64>,
) -> Result<SteadyState> {
    model.validate()?;
    let mu = match mu {
        Some(mu) => mu,
        None => principal_eigenpair(model.diffusivity(species), domain, grid, ZeroPotential)?.mu,
    };
    if model.rate(species) <= mu {
        return Ok(SteadyState {
            species,
            field: SpaceTimeField::zeros(grid),
            extinct: true,
            mu,
            history: Vec::new(),
        });
    }

    let capacity = model.capacity(species);
    let mut u: Vec<f64> = grid
        .principal_mode()
        .into_iter()
        .map(|s| options.initial_amplitude * capacity * s)
        .collect();
    let mut stepper = SpeciesStepper::new(species, model, domain, grid)?;
    let dt = grid.dt();
    let mut snapshots = vec![vec![0.0; grid.m()]; grid.nt() + 1];
    let mut history = Vec::new();
    for _ in 0..options.max_periods {
        snapshots[0].copy_from_slice(&u);
        for k in 0..grid.nt() {
            stepper.step(&mut u, k as f64 * dt)?;
            snapshots[k + 1].copy_from_slice(&u);
        }
        let delta = sup_distance(&snapshots[0], &u);
        history.push(delta);
        if delta < options.tolerance {
            return Ok(SteadyState {
                species,
                field: SpaceTimeField::new(grid, 0.0, snapshots, true),
                extinct: false,
                mu,
                history,
            });
        }
    }
    Err(Error::SteadyNotConverged {
        periods: options.max_periods,
        delta: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Sup norms of the discrete residuals of the equation for `u` and of the
/// transformed equation for `v = u exp(E / D)`, where
///
/// ```text
/// v_t = D alpha v_xixi + (r - A'^2/(4D) - L'/(2L) + L'' L xi^2/(4 D L0^2)
///                         + A'' L xi/(2 D L0)) v - h_hat^n e^{-nE/D} v^{n+1}
/// ```
///
/// Both use centered differences in `xi` and `t` on the stored snapshots. Only
/// valid for domains without constant drift (`c = 0`).
#[derive(Debug, Clone, Copy)]
pub struct TransformedResiduals {
    pub original: f64,
    pub transformed: f64,
}

pub fn transformed_residuals(
    species: Species,
    model: &ReactionModel,
    domain: &DomainMotion,
    field: &SpaceTimeField,
) -> TransformedResiduals {
    let grid = *field.grid();
    let (m, nt) = (grid.m(), grid.nt());
    let (h, dt, l0) = (grid.h(), grid.dt(), grid.l0());
    let d = model.diffusivity(species);
    let r = model.rate(species);
    let snaps = field.period_snapshots();
    let at = |k: usize, i: isize| -> f64 {
        if i < 0 || i as usize >= m {
            0.0
        } else {
            snaps[k % nt][i as usize]
        }
    };
    let weight = |k: usize, i: usize| (domain.e_field(grid.xi(i), field.time(k % nt)) / d).exp();
    let vat = |k: usize, i: isize| -> f64 {
        if i < 0 || i as usize >= m {
            0.0
        } else {
            at(k, i) * weight(k, i as usize)
        }
    };

    let mut original = 0.0f64;
    let mut transformed = 0.0f64;
    for k in 0..nt {
        let t = field.time(k);
        let (kp, km) = (k + 1, k + nt - 1);
        let alpha = domain.diffusion_factor(t);
        let l = domain.length(t);
        let ld = domain.length_rate(t);
        let ldd = domain.length_accel(t);
        let ad = domain.offset_rate(t);
        let add = domain.offset_accel(t);
        for i in 0..m {
            let ii = i as isize;
            let xi = grid.xi(i);
            let u = at(k, ii);
            let u_t = (at(kp, ii) - at(km, ii)) / (2.0 * dt);
            let u_xx = (at(k, ii + 1) - 2.0 * u + at(k, ii - 1)) / (h * h);
            let u_x = (at(k, ii + 1) - at(k, ii - 1)) / (2.0 * h);
            let kinetics = u * (r - model.self_limitation(species, u));
            let res_u = u_t - d * alpha * u_xx - domain.advection(xi, t) * u_x - kinetics;
            original = original.max(res_u.abs());

            let v = vat(k, ii);
            let v_t = (vat(kp, ii) - vat(km, ii)) / (2.0 * dt);
            let v_xx = (vat(k, ii + 1) - 2.0 * v + vat(k, ii - 1)) / (h * h);
            let growth = r - ad * ad / (4.0 * d) - ld / (2.0 * l)
                + ldd * l * xi * xi / (4.0 * d * l0 * l0)
                + add * l * xi / (2.0 * d * l0);
            let e = domain.e_field(xi, t);
            let damping = model.self_limitation(species, (-e / d).exp() * v);
            let res_v = v_t - d * alpha * v_xx - growth * v + damping * v;
            transformed = transformed.max(res_v.abs());
        }
    }
    TransformedResiduals {
        original,
        transformed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> ReactionModel {
        ReactionModel {
            r1: 6.0,
            r2: 6.0,
            n: 1.0,
            h1_hat: 1.0,
            h2_hat: 1.0,
            g2_hat: 0.5,
            g1_hat: 0.0,
            d1: 1.0,
            d2: 1.0,
        }
    }

    #[test]
    fn subcritical_rate_gives_extinction() {
        let m = ReactionModel { r1: 2.0, ..desk() };
        let d = DomainMotion::translating(0.0, 2.0, 1.0).unwrap();
        let g = Grid::for_domain(&d, 40, 100).unwrap();
        let s = periodic_steady_state(Species::One, &m, &d, g).unwrap();
        assert!(s.extinct);
        assert_eq!(s.field.max(), 0.0);
        assert!(s.mu > 2.0);
    }

    #[test]
    fn stationary_state_solves_two_point_problem() {
        let m = desk();
        let d = DomainMotion::translating(0.0, 2.0, 1.0).unwrap();
        let g = Grid::for_domain(&d, 60, 200).unwrap();
        let s = periodic_steady_state(Species::One, &m, &d, g).unwrap();
        assert!(!s.extinct);
        let u = s.field.snapshot(0);
        let h = g.h();
        let mut worst = 0.0f64;
        for i in 0..g.m() {
            let left = if i == 0 { 0.0 } else { u[i - 1] };
            let right = if i + 1 == g.m() { 0.0 } else { u[i + 1] };
            let res = (left - 2.0 * u[i] + right) / (h * h) + u[i] * (6.0 - u[i]);
            worst = worst.max(res.abs());
        }
        // Residual of the discrete two-point problem: O(dt^2) splitting error only.
        assert!(worst < 1e-3, "residual {worst}");
        assert!(s.field.min() >= 0.0 && s.field.max() <= m.k1());
        // Time independence of the converged stationary state.
        let drift = s
            .field
            .snapshots()
            .iter()
            .map(|snap| sup_distance(snap, u))
            .fold(0.0f64, f64::max);
        assert!(drift <= 1e-8, "drift {drift}");
    }
}
