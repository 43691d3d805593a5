use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow at order {order}, argument {argument}")]
    Overflow { order: i64, argument: String },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("division hazard at mode q = {q}: {what}")]
    DivisionHazard { q: i64, what: String },

    #[error("singular mode q = {q} at ka = {ka}")]
    SingularMode { q: i64, ka: f64 },

    #[error("quadrature refinement mismatch for entry {entry}: relative change {change:e}")]
    Quadrature { entry: usize, change: f64 },

    #[error("{found} unmasked points, at least {needed} required")]
    InsufficientPoints { found: usize, needed: usize },

    #[error("every weighted mode is zero")]
    EmptySpectrum,

    #[error("not tabulated: {0}")]
    NotTabulated(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
