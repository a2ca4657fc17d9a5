use thiserror::Error;

/// Errors reported by the solver library.
#[derive(Debug, Error)]
pub enum SolverError {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An oracle produced a nonfinite value.
    #[error("{what} oracle returned a nonfinite value at iteration {iteration}")]
    NonfiniteOracle { what: &'static str, iteration: usize },

    /// The Cauchy decrease came out negative beyond rounding tolerance, which
    /// signals a broken proximal step.
    #[error("Cauchy decrease {value:.3e} is negative beyond tolerance")]
    NegativeCauchyDecrease { value: f64 },

    /// The quadratic model did not decrease at the computed step while the
    /// iterate was not yet stationary.
    #[error("model decrease {value:.3e} is not positive")]
    NonpositiveModelDecrease { value: f64 },

    /// The subproblem solver returned a point worse than its warm start.
    #[error("subproblem solution increased the model by {value:.3e}")]
    ModelIncrease { value: f64 },
}
