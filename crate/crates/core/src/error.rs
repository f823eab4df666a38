use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An input lies outside the domain of the function (negative concentration, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The stoichiometric class admits no positive equilibrium.
    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    /// A state touches zero where a dissipation integrand needs strictly positive values.
    #[error("boundary touch: species {species} is zero at cell {cell}")]
    BoundaryTouch { species: usize, cell: usize },

    /// An explicit reaction update would drive a cell negative; the caller retries with a smaller step.
    #[error("positivity failure: species {species} would go negative at cell {cell}")]
    Positivity { species: usize, cell: usize },

    /// A certificate constant came out non-finite or non-positive.
    #[error("constant {name} is not finite and positive ({value}); inputs: {inputs}")]
    Constant { name: &'static str, value: f64, inputs: String },

    /// A theorem hypothesis is not met by the supplied data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}
