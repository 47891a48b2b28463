//! Finite differences on the reference interval `[0, L0]` with homogeneous
//! Dirichlet conditions, and Crank-Nicolson time stepping.
//!
//! Interior nodes are `xi_i = i L0 / (M + 1)` for `i = 1..=M`; the boundary
//! values are identically zero and never stored.

mod field;
mod stepper;
mod tridiag;

pub use field::{sup_distance, sup_norm, SpaceTimeField};
pub use stepper::{
    integrate_coupled_period, integrate_linear_period, positivity_time_step, CoupledStepper,
    LinearStepper, SpeciesStepper, UNDERSHOOT_TOLERANCE,
};
pub use tridiag::Tridiagonal;

use std::f64::consts::PI;

use crate::domain::DomainMotion;
use crate::error::{Error, Result};

pub const MIN_INTERIOR_NODES: usize = 16;

/// A vector of interior nodal values.
pub type GridFunction = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    m: usize,
    nt: usize,
    l0: f64,
    period: f64,
}

impl Grid {
    pub fn new(m: usize, nt: usize, l0: f64, period: f64) -> Result<Self> {
        if m < MIN_INTERIOR_NODES {
            return Err(Error::invalid(
                "grid.M",
                format!("needs at least {MIN_INTERIOR_NODES} interior nodes, got {m}"),
            ));
        }
        if nt == 0 {
            return Err(Error::invalid("grid.Nt", "must be positive"));
        }
        if !(l0 > 0.0 && period > 0.0 && l0.is_finite() && period.is_finite()) {
            return Err(Error::invalid("grid", "L0 and T must be positive"));
        }
        Ok(Self { m, nt, l0, period })
    }

    pub fn for_domain(domain: &DomainMotion, m: usize, nt: usize) -> Result<Self> {
        Self::new(m, nt, domain.reference_length(), domain.period())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn h(&self) -> f64 {
        self.l0 / (self.m + 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.period / self.nt as f64
    }

    /// Position of interior node `i` (0-based).
    pub fn xi(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|i| self.xi(i))
    }

    /// `sin(pi xi / L0)` at the interior nodes.
    pub fn principal_mode(&self) -> GridFunction {
        self.nodes().map(|x| (PI * x / self.l0).sin()).collect()
    }

    /// Same interval and period with `2(M+1) - 1` nodes and `2 Nt` steps.
    pub fn refined(&self) -> Grid {
        Grid {
            m: 2 * self.m + 1,
            nt: 2 * self.nt,
            ..*self
        }
    }
}

/// A potential `q(xi, t)` sampled on the grid nodes.
pub trait Potential {
    fn sample(&self, grid: &Grid, t: f64, out: &mut [f64]);
}

impl<P: Potential + ?Sized> Potential for &P {
    fn sample(&self, grid: &Grid, t: f64, out: &mut [f64]) {
        (**self).sample(grid, t, out)
    }
}

/// Second-order central differences for `D alpha(t) d^2/dxi^2 + b(xi, t) d/dxi - q`,
/// with the Dirichlet columns eliminated.
pub fn assemble(
    diffusivity: f64,
    domain: &DomainMotion,
    grid: &Grid,
    potential: &[f64],
    t: f64,
) -> Result<Tridiagonal> {
    let mut op = Tridiagonal::zeros(grid.m());
    assemble_into(&mut op, diffusivity, domain, grid, potential, 0.0, t)?;
    Ok(op)
}

/// As [`assemble`] with `potential - shift` on the diagonal.
pub(crate) fn assemble_into(
    op: &mut Tridiagonal,
    diffusivity: f64,
    domain: &DomainMotion,
    grid: &Grid,
    potential: &[f64],
    shift: f64,
    t: f64,
) -> Result<()> {
    let h = grid.h();
    let diff = diffusivity * domain.diffusion_factor(t);
    let a = diff / (h * h);
    let mut worst = (0.0f64, 0usize);
    for i in 0..grid.m() {
        let xi = grid.xi(i);
        let b = domain.advection(xi, t);
        let peclet = b.abs() * h / diff;
        if peclet > worst.0 {
            worst = (peclet, i);
        }
        let half = b / (2.0 * h);
        op.lower[i] = a - half;
        op.diag[i] = -2.0 * a - (potential[i] - shift);
        op.upper[i] = a + half;
    }
    if !(worst.0 < 2.0) {
        return Err(Error::Peclet {
            peclet: worst.0,
            node: worst.1 + 1,
            xi: grid.xi(worst.1),
            t,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> DomainMotion {
        DomainMotion::translating(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(15, 10, 1.0, 1.0).is_err());
        assert!(Grid::new(16, 0, 1.0, 1.0).is_err());
        let g = Grid::new(19, 40, 2.0, 0.5).unwrap();
        assert_eq!(g.h(), 0.1);
        assert_eq!(g.dt() * g.nt() as f64, 0.5);
        let r = g.refined();
        assert_eq!(r.m(), 39);
        assert_eq!(r.xi(1), g.xi(0));
    }

    #[test]
    fn stencil_examples() {
        // 1 / dxi^2 = 16 needs M = 3; assemble itself does not enforce the grid minimum.
        let g = Grid {
            m: 3,
            nt: 1,
            l0: 1.0,
            period: 1.0,
        };
        let op = assemble(1.0, &unit(), &g, &[0.0; 3], 0.0).unwrap();
        assert_eq!(op.diag, vec![-32.0; 3]);
        assert_eq!(&op.lower[1..], &[16.0, 16.0]);
        assert_eq!(&op.upper[..2], &[16.0, 16.0]);

        let moving = DomainMotion::translating(2.0, 1.0, 1.0).unwrap();
        let op = assemble(1.0, &moving, &g, &[0.0; 3], 0.0).unwrap();
        assert_eq!(op.lower[1], 16.0 - 4.0);
        assert_eq!(op.upper[1], 16.0 + 4.0);

        let op = assemble(1.0, &unit(), &g, &[5.0; 3], 0.0).unwrap();
        assert_eq!(op.diag, vec![-37.0; 3]);
    }

    #[test]
    fn peclet_guard_names_node() {
        let fast = DomainMotion::translating(100.0, 1.0, 1.0).unwrap();
        let g = Grid::new(16, 10, 1.0, 1.0).unwrap();
        match assemble(1.0, &fast, &g, &[0.0; 16], 0.0) {
            Err(Error::Peclet { peclet, node, .. }) => {
                assert!(peclet > 2.0);
                assert!((1..=16).contains(&node));
            }
            other => panic!("expected Peclet error, got {other:?}"),
        }
    }
}
