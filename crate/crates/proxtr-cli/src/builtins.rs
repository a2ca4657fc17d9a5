//! Builtin demonstration problems for `solve`.

use proxtr::{Problem, RegularizerSpec, SolverError};

pub const BUILTIN_NAMES: [&str; 3] = ["quadratic", "lasso", "box_quadratic"];

/// Constructs a builtin problem by name:
///
/// - `quadratic`: ½(x−1)² from x = 0; minimizer 1.
/// - `lasso`: ½(x−1)² + ½|x| from x = 0; minimizer 0.5.
/// - `box_quadratic`: ½‖x − (2, −3)‖² + ½‖x‖₁ on [−1, 1]² from the origin;
///   minimizer on the box boundary at (1, −1).
pub fn builtin_problem(name: &str) -> Result<Problem, SolverError> {
    match name {
        "quadratic" => Problem::unconstrained(
            1,
            Box::new(|x: &[f64]| 0.5 * (x[0] - 1.0) * (x[0] - 1.0)),
            Box::new(|x: &[f64]| vec![x[0] - 1.0]),
            RegularizerSpec::zero(),
            vec![0.0],
        ),
        "lasso" => Problem::unconstrained(
            1,
            Box::new(|x: &[f64]| 0.5 * (x[0] - 1.0) * (x[0] - 1.0)),
            Box::new(|x: &[f64]| vec![x[0] - 1.0]),
            RegularizerSpec::l1(0.5)?,
            vec![0.0],
        ),
        "box_quadratic" => Problem::new(
            2,
            Box::new(|x: &[f64]| {
                0.5 * ((x[0] - 2.0) * (x[0] - 2.0) + (x[1] + 3.0) * (x[1] + 3.0))
            }),
            Box::new(|x: &[f64]| vec![x[0] - 2.0, x[1] + 3.0]),
            RegularizerSpec::l1(0.5)?,
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        ),
        other => Err(SolverError::InvalidInput(format!(
            "unknown builtin problem '{other}'; available: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// Reference solutions used by tests and sanity output.
pub fn builtin_solution(name: &str) -> Option<Vec<f64>> {
    match name {
        "quadratic" => Some(vec![1.0]),
        "lasso" => Some(vec![0.5]),
        "box_quadratic" => Some(vec![1.0, -1.0]),
        _ => None,
    }
}
