//! Time stepping.
//!
//! Linear step for `u_t = L u - q u` over `[t, t + dt]`, all coefficients frozen
//! at `t_m = t + dt/2`:
//!
//! ```text
//! m       = mean_i q_i(t_m)
//! B       = L(t_m) - (q(t_m) - m)
//! u_new   = exp(-m dt) (I - dt/2 B)^{-1} (I + dt/2 B) u
//! ```
//!
//! The spatially constant part of the potential is integrated exactly, so a
//! constant shift of `q` rescales the period map by exactly `exp(-shift T)`.
//!
//! Nonlinear kinetics `u (r - h(u) - ...)` are written as a potential evaluated
//! at the midpoint extrapolation `3/2 u^n - 1/2 u^{n-1}` and then advanced with
//! the same linear step.

use super::field::{sup_norm, SpaceTimeField};
use super::{assemble_into, Grid, GridFunction, Potential, Tridiagonal};
use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::reaction::{ReactionModel, Species};

/// Negative values above this threshold are treated as roundoff and clamped to 0.
pub const UNDERSHOOT_TOLERANCE: f64 = 1e-12;

pub struct LinearStepper<'a> {
    domain: &'a DomainMotion,
    grid: Grid,
    diffusivity: f64,
    op: Tridiagonal,
    implicit: Tridiagonal,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    potential: Vec<f64>,
}

impl<'a> LinearStepper<'a> {
    pub fn new(domain: &'a DomainMotion, grid: Grid, diffusivity: f64) -> Result<Self> {
        if !(diffusivity.is_finite() && diffusivity > 0.0) {
            return Err(Error::invalid(
                "diffusivity",
                format!("must be positive, got {diffusivity}"),
            ));
        }
        let m = grid.m();
        Ok(Self {
            domain,
            grid,
            diffusivity,
            op: Tridiagonal::zeros(m),
            implicit: Tridiagonal::zeros(m),
            rhs: vec![0.0; m],
            scratch: vec![0.0; m],
            potential: vec![0.0; m],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn domain(&self) -> &DomainMotion {
        self.domain
    }

    /// Advance `u` from `t` to `t + dt` with the potential sampled at `t + dt/2`.
    pub fn step(&mut self, u: &mut [f64], t: f64, potential: &dyn Potential) -> Result<()> {
        let mut q = std::mem::take(&mut self.potential);
        potential.sample(&self.grid, t + 0.5 * self.grid.dt(), &mut q);
        let res = self.step_with(u, t, &q);
        self.potential = q;
        res
    }

    /// Advance with an explicit midpoint potential `q`.
    pub fn step_with(&mut self, u: &mut [f64], t: f64, q: &[f64]) -> Result<()> {
        let dt = self.grid.dt();
        let tm = t + 0.5 * dt;
        let shift = q.iter().sum::<f64>() / q.len() as f64;
        assemble_into(
            &mut self.op,
            self.diffusivity,
            self.domain,
            &self.grid,
            q,
            shift,
            tm,
        )?;
        self.op.apply(u, &mut self.rhs);
        let half = 0.5 * dt;
        for i in 0..u.len() {
            self.rhs[i] = u[i] + half * self.rhs[i];
            self.implicit.lower[i] = -half * self.op.lower[i];
            self.implicit.diag[i] = 1.0 - half * self.op.diag[i];
            self.implicit.upper[i] = -half * self.op.upper[i];
        }
        self.implicit
            .solve_in_place(&mut self.rhs, &mut self.scratch)?;
        let decay = (-shift * dt).exp();
        for (ui, ri) in u.iter_mut().zip(&self.rhs) {
            *ui = ri * decay;
        }
        Ok(())
    }
}

/// Largest `dt` for which the linear step maps positive data to positive data:
/// both CN factors are then M-matrix / non-negative. `potential_spread` bounds
/// `max_i (q_i - mean q)` over the period.
pub fn positivity_time_step(
    diffusivity: f64,
    domain: &DomainMotion,
    grid: &Grid,
    potential_spread: f64,
) -> f64 {
    let (l_min, _) = domain.length_range();
    let alpha_max = (domain.reference_length() / l_min).powi(2);
    let h = grid.h();
    2.0 / (2.0 * diffusivity * alpha_max / (h * h) + potential_spread.max(0.0))
}

/// Integrates the linear problem over one period from `t0`, keeping every step.
pub fn integrate_linear_period(
    stepper: &mut LinearStepper<'_>,
    initial: &[f64],
    t0: f64,
    potential: &dyn Potential,
) -> Result<SpaceTimeField> {
    let grid = *stepper.grid();
    let dt = grid.dt();
    let mut u = initial.to_vec();
    let mut snapshots = Vec::with_capacity(grid.nt() + 1);
    snapshots.push(u.clone());
    for k in 0..grid.nt() {
        stepper.step(&mut u, t0 + k as f64 * dt, potential)?;
        snapshots.push(u.clone());
    }
    Ok(SpaceTimeField::new(grid, t0, snapshots, false))
}

fn extrapolate(u: &[f64], prev: Option<&[f64]>, i: usize) -> f64 {
    match prev {
        Some(p) => (1.5 * u[i] - 0.5 * p[i]).max(0.0),
        None => u[i],
    }
}

fn sanitize(u: &mut [f64], species: Species, t: f64, limit: f64) -> Result<()> {
    for (node, v) in u.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::BlowUp {
                species: species.index(),
                norm: f64::INFINITY,
                limit,
                t,
            });
        }
        if *v < 0.0 {
            if *v < -UNDERSHOOT_TOLERANCE {
                return Err(Error::Undershoot {
                    species: species.index(),
                    node: node + 1,
                    value: *v,
                    t,
                });
            }
            *v = 0.0;
        }
    }
    let norm = sup_norm(u);
    if norm > limit {
        return Err(Error::BlowUp {
            species: species.index(),
            norm,
            limit,
            t,
        });
    }
    Ok(())
}

fn blowup_limit(model: &ReactionModel) -> f64 {
    10.0 * model.k1().max(model.k2())
}

/// Single-species nonlinear stepper for `u_t = L_s u + F_s(u)`.
pub struct SpeciesStepper<'a> {
    species: Species,
    model: &'a ReactionModel,
    linear: LinearStepper<'a>,
    prev: Option<Vec<f64>>,
    q: Vec<f64>,
    limit: f64,
}

impl<'a> SpeciesStepper<'a> {
    pub fn new(
        species: Species,
        model: &'a ReactionModel,
        domain: &'a DomainMotion,
        grid: Grid,
    ) -> Result<Self> {
        let linear = LinearStepper::new(domain, grid, model.diffusivity(species))?;
        Ok(Self {
            species,
            model,
            linear,
            prev: None,
            q: vec![0.0; grid.m()],
            limit: blowup_limit(model),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.linear.grid()
    }

    /// Sets the state one step back, used by the midpoint extrapolation.
    pub fn set_history(&mut self, prev: &[f64]) {
        self.prev = Some(prev.to_vec());
    }

    pub fn step(&mut self, u: &mut [f64], t: f64) -> Result<()> {
        for i in 0..u.len() {
            let own = extrapolate(u, self.prev.as_deref(), i);
            self.q[i] = self.model.per_capita_loss(self.species, own, 0.0);
        }
        match &mut self.prev {
            Some(p) => p.copy_from_slice(u),
            None => self.prev = Some(u.to_vec()),
        }
        self.linear.step_with(u, t, &self.q)?;
        sanitize(u, self.species, t + self.grid().dt(), self.limit)
    }
}

/// Two-species stepper for the full competition system.
pub struct CoupledStepper<'a> {
    model: &'a ReactionModel,
    first: LinearStepper<'a>,
    second: LinearStepper<'a>,
    prev1: Option<Vec<f64>>,
    prev2: Option<Vec<f64>>,
    q1: Vec<f64>,
    q2: Vec<f64>,
    limit: f64,
}

impl<'a> CoupledStepper<'a> {
    pub fn new(model: &'a ReactionModel, domain: &'a DomainMotion, grid: Grid) -> Result<Self> {
        Ok(Self {
            model,
            first: LinearStepper::new(domain, grid, model.d1)?,
            second: LinearStepper::new(domain, grid, model.d2)?,
            prev1: None,
            prev2: None,
            q1: vec![0.0; grid.m()],
            q2: vec![0.0; grid.m()],
            limit: blowup_limit(model),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.first.grid()
    }

    pub fn set_history(&mut self, prev1: &[f64], prev2: &[f64]) {
        self.prev1 = Some(prev1.to_vec());
        self.prev2 = Some(prev2.to_vec());
    }

    pub fn step(&mut self, u1: &mut [f64], u2: &mut [f64], t: f64) -> Result<()> {
        for i in 0..u1.len() {
            let a = extrapolate(u1, self.prev1.as_deref(), i);
            let b = extrapolate(u2, self.prev2.as_deref(), i);
            self.q1[i] = self.model.per_capita_loss(Species::One, a, b);
            self.q2[i] = self.model.per_capita_loss(Species::Two, b, a);
        }
        for (prev, u) in [(&mut self.prev1, &*u1), (&mut self.prev2, &*u2)] {
            match prev {
                Some(p) => p.copy_from_slice(u),
                None => *prev = Some(u.to_vec()),
            }
        }
        self.first.step_with(u1, t, &self.q1)?;
        self.second.step_with(u2, t, &self.q2)?;
        let t_end = t + self.grid().dt();
        sanitize(u1, Species::One, t_end, self.limit)?;
        sanitize(u2, Species::Two, t_end, self.limit)
    }
}

/// One period of the coupled system from `t0`, returning both fields.
pub fn integrate_coupled_period(
    stepper: &mut CoupledStepper<'_>,
    u1: &mut GridFunction,
    u2: &mut GridFunction,
    t0: f64,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    let grid = *stepper.grid();
    let dt = grid.dt();
    let mut s1 = Vec::with_capacity(grid.nt() + 1);
    let mut s2 = Vec::with_capacity(grid.nt() + 1);
    s1.push(u1.clone());
    s2.push(u2.clone());
    for k in 0..grid.nt() {
        stepper.step(u1, u2, t0 + k as f64 * dt)?;
        s1.push(u1.clone());
        s2.push(u2.clone());
    }
    Ok((
        SpaceTimeField::new(grid, t0, s1, false),
        SpaceTimeField::new(grid, t0, s2, false),
    ))
}
