//! Invasion analysis for two competing species on a one-dimensional interval
//! that translates at constant speed and whose endpoints may oscillate in time.
//!
//! The moving interval `A(t) + ct < x < A(t) + ct + L(t)` is mapped to the fixed
//! reference interval `[0, L0]`. On it the crate computes principal periodic
//! eigenvalues ([`floquet`]), periodic single-species states ([`steady`]), the
//! analytic invasion conditions ([`invasion`]) and direct coupled simulations
//! ([`simulate`]).

pub mod domain;
pub mod error;
pub mod floquet;
pub mod invasion;
pub mod pde;
pub mod periodic_fn;
pub mod reaction;
pub mod scenario;
pub mod simulate;
pub mod steady;

pub use domain::DomainMotion;
pub use error::{Error, Result};
pub use floquet::{principal_eigenpair, EigenResult};
pub use invasion::{full_report, InvasionVerdict, Report, Verdict};
pub use pde::{Grid, SpaceTimeField};
pub use periodic_fn::PeriodicFunction;
pub use reaction::{ReactionModel, Species};
pub use scenario::Scenario;
pub use simulate::{classify_invasion, coupled_run, EmpiricalClass, Trajectory};
pub use steady::{periodic_steady_state, SteadyState};
