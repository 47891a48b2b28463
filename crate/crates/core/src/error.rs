use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("xi = {xi} lies outside the reference interval [0, {l0}]")]
    OutOfRange { xi: f64, l0: f64 },

    #[error("negative density {value} passed to {what}")]
    NegativeDensity { what: &'static str, value: f64 },

    #[error(
        "grid Peclet number {peclet:.4} >= 2 at node {node} (xi = {xi:.6}, t = {t:.6}); \
         the grid is too coarse for the advection, increase M"
    )]
    Peclet {
        peclet: f64,
        node: usize,
        xi: f64,
        t: f64,
    },

    #[error("singular tridiagonal system (pivot {pivot:e} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last relative change {change:e}); undamped Crank-Nicolson modes can dominate when D dt / h^2 is large, increase grid.Nt")]
    EigenNotConverged { iterations: usize, change: f64 },

    #[error("spectral radius estimate {rho:e} is not positive; positivity was lost, refine the time step")]
    NonPositiveSpectralRadius { rho: f64 },

    #[error("negative undershoot {value:e} in species {species} at node {node}, t = {t:.6}")]
    Undershoot {
        species: usize,
        node: usize,
        value: f64,
        t: f64,
    },

    #[error("blow-up in species {species}: sup norm {norm:e} exceeds {limit:e} at t = {t:.6}")]
    BlowUp {
        species: usize,
        norm: f64,
        limit: f64,
        t: f64,
    },

    #[error(
        "periodic steady state did not converge after {periods} periods (last delta {delta:e})"
    )]
    SteadyNotConverged { periods: usize, delta: f64 },

    #[error("species {species} has no positive periodic state (r = {rate} <= mu = {mu})")]
    Extinct { species: usize, rate: f64, mu: f64 },

    #[error("growth window [{lower:e}, {upper:e}] holds only {found} records, need {needed}; adjust run.seed_amplitude or run.periods")]
    WindowNotEntered {
        lower: f64,
        upper: f64,
        found: usize,
        needed: usize,
    },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::OutOfRange { .. } => "out_of_range",
            Error::NegativeDensity { .. } => "negative_density",
            Error::Peclet { .. } => "peclet",
            Error::SingularSystem { .. } => "singular_system",
            Error::EigenNotConverged { .. } => "eigen_not_converged",
            Error::NonPositiveSpectralRadius { .. } => "non_positive_spectral_radius",
            Error::Undershoot { .. } => "undershoot",
            Error::BlowUp { .. } => "blow_up",
            Error::SteadyNotConverged { .. } => "steady_not_converged",
            Error::Extinct { .. } => "extinct",
            Error::WindowNotEntered { .. } => "window_not_entered",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
