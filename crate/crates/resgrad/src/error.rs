//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state is not finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("unknown system `{0}` (known: dho, duffing, vdp)")]
    UnknownSystem(String),

    #[error("{scheme} requires the damped harmonic oscillator, got `{system}`")]
    UnsupportedSystem {
        scheme: &'static str,
        system: &'static str,
    },

    #[error("fixed-point iteration did not converge within {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: u32, residual: f64 },

    #[error("fixed-point iteration produced a non-finite iterate")]
    Divergence,

    #[error("not underdamped (requires b^2 < 4k): b = {b}, k = {k}")]
    Overdamped { b: f64, k: f64 },

    #[error("step starting at t = {t} failed: {source}")]
    StepAt {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("error maxima for h = {h} are zero; cannot take logarithms")]
    DegenerateData { h: f64 },

    #[error("energy is zero at trajectory index {index}; loss ratio undefined")]
    ZeroEnergy { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Tag an error with the time of the step that produced it.
    pub fn at_time(self, t: f64) -> Error {
        Error::StepAt {
            t,
            source: Box::new(self),
        }
    }
}
