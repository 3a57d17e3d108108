use thiserror::Error;

/// Errors raised by the fidelity library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("|x| overflowed at t = {t}")]
    Overflow { t: f64 },

    #[error("|x| underflowed at t = {t}")]
    Underflow { t: f64 },

    #[error("phase increment {increment} at t = {t} is too large to unwrap; refine step")]
    StepTooCoarse { t: f64, increment: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("time {t} lies outside the trajectory grid [{start}, {end}]")]
    OutsideGrid { t: f64, start: f64, end: f64 },

    #[error("quadrature with {nodes} nodes cannot resolve degree {n_max}; increase nodes")]
    IncreaseNodes { nodes: usize, n_max: usize },

    #[error("norm defect {defect:e} exceeds tolerance {tolerance:e}")]
    NormDefect { defect: f64, tolerance: f64 },

    #[error("state has no Hermite coefficients")]
    EmptyCoefficients,

    #[error("grid contains x = 0 but g = {g} > 0")]
    SingularGrid { g: f64 },

    #[error("edge mass {edge_mass:e} at t = {t}: enlarge x_max or shorten horizon")]
    GridEscape { t: f64, edge_mass: f64 },

    #[error("Hermite expansion defect {defect:e} exceeds {tolerance:e}")]
    ExpansionDefect { defect: f64, tolerance: f64 },

    #[error("trajectory initial data do not match the state's squeeze parameters")]
    MismatchedInitialData,

    #[error("Ermakov-Pinney amplitude collapsed to {y:e} at t = {t}")]
    Collapse { t: f64, y: f64 },

    #[error("degenerate inverted-oscillator parameters: ad - bc = 0")]
    Degenerate,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
