use thiserror::Error;

/// Errors raised by the geometry, kinematics, Wigner and channel layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of a chart or formula.
    #[error("domain error: {quantity} = {value} ({requirement})")]
    Domain {
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The areal-radius Newton solve did not settle.
    #[error("Newton solve for {quantity} did not converge after {iterations} iterations (last step {last_step:e})")]
    Convergence {
        quantity: &'static str,
        iterations: usize,
        last_step: f64,
    },

    /// A worldline sample violates a per-sample invariant.
    #[error("worldline sample {index}: {quantity} = {value} ({requirement})")]
    Step {
        index: usize,
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A denominator of the Wigner step vanishes.
    #[error("singular step input: {quantity} = {value}")]
    SingularInput { quantity: &'static str, value: f64 },

    /// A map is not of the form pI - (1-q)σ₁.
    #[error("map is not in the radial span {{I, σ₁}} (residual {residual:e})")]
    Decomposition { residual: f64 },

    /// An accumulated quantity left the representable range.
    #[error("{quantity} is not finite")]
    NonFinite { quantity: &'static str },

    /// Wraps an error raised while processing a given worldline sample or segment.
    #[error("at sample {index}: {source}")]
    AtSample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            requirement,
        }
    }

    pub(crate) fn at_sample(self, index: usize) -> Self {
        match self {
            // Step errors already carry their index.
            e @ Error::Step { .. } | e @ Error::AtSample { .. } => e,
            e => Error::AtSample {
                index,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
