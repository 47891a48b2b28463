//! Direct simulation of the competition system started from `(u1*, eps sin)`,
//! used to classify invasion empirically.

use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::pde::{sup_distance, sup_norm, CoupledStepper, Grid, GridFunction, SpaceTimeField};
use crate::reaction::ReactionModel;

/// Records needed by [`classify_invasion`].
pub const CLASSIFY_WINDOW: usize = 10;
/// Upper end of the linear regime, as a fraction of `K2`.
pub const LINEAR_REGIME_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord {
    pub period: usize,
    pub t: f64,
    /// `||u2(., nT)||_inf`.
    pub u2_sup: f64,
    /// `||u1(., nT) - u1*(., 0)||_inf`.
    pub u1_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub period: f64,
    pub k2: f64,
    pub seed_amplitude: f64,
    /// Records for `n = 0..=periods`.
    pub records: Vec<PeriodRecord>,
    pub final_u1: GridFunction,
    pub final_u2: GridFunction,
}

pub fn default_seed_amplitude(model: &ReactionModel) -> f64 {
    1e-4 * model.k2()
}

/// Integrates `periods` periods of the coupled system from `u1 = u1*(., 0)` and
/// `u2 = seed_amplitude sin(pi xi / L0)`.
pub fn coupled_run(
    model: &ReactionModel,
    domain: &DomainMotion,
    grid: Grid,
    u1star: &SpaceTimeField,
    seed_amplitude: f64,
    periods: usize,
) -> Result<Trajectory> {
    if !(seed_amplitude >= 0.0 && seed_amplitude.is_finite()) {
        return Err(Error::invalid(
            "run.seed_amplitude",
            format!("must be a non-negative number, got {seed_amplitude}"),
        ));
    }
    if *u1star.grid() != grid {
        return Err(Error::invalid(
            "u1star",
            "is on a different grid from the run",
        ));
    }
    let start = u1star.snapshot(0).to_vec();
    let mut u1 = start.clone();
    let mut u2: GridFunction = grid
        .principal_mode()
        .into_iter()
        .map(|s| seed_amplitude * s)
        .collect();
    let mut stepper = CoupledStepper::new(model, domain, grid)?;
    // The state one step before t = 0 on the periodic orbit.
    stepper.set_history(u1star.snapshot(grid.nt() - 1), &u2);

    let dt = grid.dt();
    let record = |n: usize, u1: &[f64], u2: &[f64]| PeriodRecord {
        period: n,
        t: n as f64 * grid.period(),
        u2_sup: sup_norm(u2),
        u1_deviation: sup_distance(u1, &start),
    };
    let mut records = Vec::with_capacity(periods + 1);
    records.push(record(0, &u1, &u2));
    for n in 1..=periods {
        let t0 = (n - 1) as f64 * grid.period();
        for k in 0..grid.nt() {
            stepper.step(&mut u1, &mut u2, t0 + k as f64 * dt)?;
        }
        records.push(record(n, &u1, &u2));
    }
    Ok(Trajectory {
        period: grid.period(),
        k2: model.k2(),
        seed_amplitude,
        records,
        final_u1: u1,
        final_u2: u2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalClass {
    Invades,
    Decays,
    Undetermined,
}

impl EmpiricalClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EmpiricalClass::Invades => "Invades",
            EmpiricalClass::Decays => "Decays",
            EmpiricalClass::Undetermined => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: EmpiricalClass,
    /// Least-squares slope of `ln ||u2||` against `t`.
    pub rate: f64,
    /// `rate * T`.
    pub log_growth_per_period: f64,
    pub margin: f64,
    /// First and last period index of the fitted window.
    pub window: (usize, usize),
}

pub fn default_growth_margin(period: f64) -> f64 {
    0.02 / period
}

/// Fits `ln ||u2(., nT)||` over the last [`CLASSIFY_WINDOW`] records lying in
/// `[10 eps, 0.01 K2]`.
pub fn classify_invasion(
    trajectory: &Trajectory,
    growth_margin: Option<f64>,
) -> Result<Classification> {
    let margin = growth_margin.unwrap_or_else(|| default_growth_margin(trajectory.period));
    let lower = 10.0 * f64::EPSILON;
    let upper = LINEAR_REGIME_FRACTION * trajectory.k2;
    let inside: Vec<&PeriodRecord> = trajectory
        .records
        .iter()
        .filter(|r| r.u2_sup >= lower && r.u2_sup <= upper)
        .collect();
    if inside.len() < CLASSIFY_WINDOW {
        return Err(Error::WindowNotEntered {
            lower,
            upper,
            found: inside.len(),
            needed: CLASSIFY_WINDOW,
        });
    }
    let window = &inside[inside.len() - CLASSIFY_WINDOW..];
    let n = window.len() as f64;
    let mean_t = window.iter().map(|r| r.t).sum::<f64>() / n;
    let mean_y = window.iter().map(|r| r.u2_sup.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for r in window {
        let dx = r.t - mean_t;
        sxy += dx * (r.u2_sup.ln() - mean_y);
        sxx += dx * dx;
    }
    let rate = sxy / sxx;
    let class = if rate > margin {
        EmpiricalClass::Invades
    } else if rate < -margin {
        EmpiricalClass::Decays
    } else {
        EmpiricalClass::Undetermined
    };
    Ok(Classification {
        class,
        rate,
        log_growth_per_period: rate * trajectory.period,
        margin,
        window: (window[0].period, window[window.len() - 1].period),
    })
}
