//! Principal periodic eigenpair of
//!
//! ```text
//! phi_t - L phi + q phi = mu phi,   phi = 0 on the boundary,   phi(., t + T) = phi(., t)
//! ```
//!
//! If `phi` is the positive periodic eigenfunction then `u = phi e^{-mu t}`
//! solves `u_t = L u - q u`, so the period map `P` satisfies
//! `P phi(., 0) = e^{-mu T} phi(., 0)`. The dominant eigenvalue `rho` of `P`
//! is found by power iteration and `mu = -ln(rho) / T`.

use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::pde::{
    integrate_linear_period, sup_norm, Grid, GridFunction, LinearStepper, Potential, SpaceTimeField,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-11;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy)]
pub struct FloquetOptions {
    /// Stop when `|rho_k - rho_{k-1}| / rho_k` drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub mu: f64,
    /// Periodic eigenfunction over one period, sup norm 1 at `t = 0`.
    pub phi: SpaceTimeField,
    pub iterations: usize,
    /// `||P v - rho v||_inf` for the final unit iterate.
    pub residual: f64,
}

/// `q = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn sample(&self, _: &Grid, _: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantPotential(pub f64);

impl Potential for ConstantPotential {
    fn sample(&self, _: &Grid, _: f64, out: &mut [f64]) {
        out.fill(self.0);
    }
}

/// `q(xi, t) = f(xi, t)` from a closure.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64, f64) -> f64> Potential for FnPotential<F> {
    fn sample(&self, grid: &Grid, t: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (self.0)(grid.xi(i), t);
        }
    }
}

/// `q(xi, t) = map(field(xi, t))` with the field interpolated linearly in time.
pub struct FieldPotential<'a, F> {
    field: &'a SpaceTimeField,
    map: F,
}

impl<'a, F: Fn(f64) -> f64> FieldPotential<'a, F> {
    pub fn new(field: &'a SpaceTimeField, map: F) -> Self {
        Self { field, map }
    }
}

impl<F: Fn(f64) -> f64> Potential for FieldPotential<'_, F> {
    fn sample(&self, _: &Grid, t: f64, out: &mut [f64]) {
        self.field.sample_into(t, out);
        for v in out.iter_mut() {
            *v = (self.map)(*v);
        }
    }
}

/// `inner + shift`.
pub struct ShiftedPotential<P> {
    pub inner: P,
    pub shift: f64,
}

impl<P: Potential> Potential for ShiftedPotential<P> {
    fn sample(&self, grid: &Grid, t: f64, out: &mut [f64]) {
        self.inner.sample(grid, t, out);
        for v in out.iter_mut() {
            *v += self.shift;
        }
    }
}

/// The period map `v -> u(T)` for `u_t = L u - q u`, `u(0) = v`.
pub struct PeriodMap<'a, P> {
    stepper: LinearStepper<'a>,
    potential: P,
}

impl<'a, P: Potential> PeriodMap<'a, P> {
    pub fn new(
        diffusivity: f64,
        domain: &'a DomainMotion,
        grid: Grid,
        potential: P,
    ) -> Result<Self> {
        Ok(Self {
            stepper: LinearStepper::new(domain, grid, diffusivity)?,
            potential,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.stepper.grid()
    }

    pub fn apply(&mut self, v: &[f64]) -> Result<GridFunction> {
        let grid = *self.stepper.grid();
        let mut u = v.to_vec();
        for k in 0..grid.nt() {
            self.stepper
                .step(&mut u, k as f64 * grid.dt(), &self.potential)?;
        }
        Ok(u)
    }

    /// One period with every snapshot retained.
    pub fn trajectory(&mut self, v: &[f64]) -> Result<SpaceTimeField> {
        integrate_linear_period(&mut self.stepper, v, 0.0, &self.potential)
    }
}

pub fn monodromy_apply(
    v: &[f64],
    diffusivity: f64,
    domain: &DomainMotion,
    grid: Grid,
    potential: impl Potential,
) -> Result<GridFunction> {
    PeriodMap::new(diffusivity, domain, grid, potential)?.apply(v)
}

pub fn principal_eigenpair(
    diffusivity: f64,
    domain: &DomainMotion,
    grid: Grid,
    potential: impl Potential,
) -> Result<EigenResult> {
    principal_eigenpair_with(
        diffusivity,
        domain,
        grid,
        potential,
        FloquetOptions::default(),
    )
}

pub fn principal_eigenpair_with(
    diffusivity: f64,
    domain: &DomainMotion,
    grid: Grid,
    potential: impl Potential,
    options: FloquetOptions,
) -> Result<EigenResult> {
    let mut map = PeriodMap::new(diffusivity, domain, grid, potential)?;
    let mut v = grid.principal_mode();
    normalize(&mut v);

    let mut rho_prev = f64::NAN;
    let mut change = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let w = map.apply(&v)?;
        let rho = dot(&w, &v) / dot(&v, &v);
        if !(rho > 0.0) {
            return Err(Error::NonPositiveSpectralRadius { rho });
        }
        change = ((rho - rho_prev) / rho).abs();
        let residual = w
            .iter()
            .zip(&v)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - rho * b).abs()));
        v = w;
        normalize(&mut v);
        if change < options.tolerance {
            let period = grid.period();
            let mu = -rho.ln() / period;
            let mut phi = map.trajectory(&v)?;
            let phi = rescale_to_periodic(&mut phi, mu);
            return Ok(EigenResult {
                mu,
                phi,
                iterations: iteration,
                residual,
            });
        }
        rho_prev = rho;
    }
    Err(Error::EigenNotConverged {
        iterations: options.max_iterations,
        change,
    })
}

fn rescale_to_periodic(trajectory: &mut SpaceTimeField, mu: f64) -> SpaceTimeField {
    let grid = *trajectory.grid();
    let snapshots = trajectory
        .snapshots()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let growth = (mu * k as f64 * grid.dt()).exp();
            s.iter().map(|v| v * growth).collect()
        })
        .collect();
    SpaceTimeField::new(grid, 0.0, snapshots, true)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = sup_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_potential_rescales_period_map() {
        let d = DomainMotion::translating(0.5, 1.0, 1.0).unwrap();
        let g = Grid::new(40, 100, 1.0, 1.0).unwrap();
        let v = g.principal_mode();
        let a = monodromy_apply(&v, 1.0, &d, g, ZeroPotential).unwrap();
        let b = monodromy_apply(&v, 1.0, &d, g, ConstantPotential(1.7)).unwrap();
        let factor = (-1.7f64).exp();
        for (x, y) in a.iter().zip(&b) {
            assert!((x * factor - y).abs() <= 1e-14 * x.abs().max(1e-300));
        }
        let z = monodromy_apply(&vec![0.0; 40], 1.0, &d, g, ZeroPotential).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn heat_mode_through_one_period() {
        let d = DomainMotion::translating(0.0, 1.0, 1.0).unwrap();
        let g = Grid::new(99, 1000, 1.0, 1.0).unwrap();
        let v = g.principal_mode();
        let out = monodromy_apply(&v, 1.0, &d, g, ZeroPotential).unwrap();
        let decay = (-PI * PI).exp();
        for (a, b) in out.iter().zip(&v) {
            assert!((a - decay * b).abs() < 1e-3 * decay);
        }
    }

    #[test]
    fn stationary_interval_eigenvalue() {
        let d = DomainMotion::translating(0.0, 1.0, 1.0).unwrap();
        let g = Grid::new(100, 500, 1.0, 1.0).unwrap();
        let r = principal_eigenpair(1.0, &d, g, ZeroPotential).unwrap();
        assert!((r.mu - PI * PI).abs() / (PI * PI) < 1e-3);
        assert!(r.phi.period_snapshots().iter().flatten().all(|&v| v > 0.0));
        assert!(r.phi.periodicity_defect() <= 1e-8);
        assert!((sup_norm(r.phi.snapshot(0)) - 1.0).abs() < 1e-15);
    }
}
