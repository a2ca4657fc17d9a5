//! Approximate minimization of the quadratic-plus-regularizer model inside
//! the effective radius.
//!
//! The iterative path runs proximal-gradient steps on
//! `m(s) = ∇f(x)ᵀs + ½b‖s‖² + h(x + s)` warm-started at the Cauchy step, so
//! the returned point never has a worse model value than the warm start. The
//! analytic path returns the unconstrained minimizer −∇f(x)/b for smooth
//! problems, bypassing inner-solver rounding entirely.

use crate::error::SolverError;
use crate::problem::{BoxBall, RegularizerSpec};
use crate::prox::{eval_h, prox_separable};
use crate::vecops::{add, dot, norm2sq};

/// Default inner-iteration budget for the proximal-gradient path.
pub const DEFAULT_MAX_INNER: usize = 50;

/// Inner iterations stop once the iterate moves less than this in ∞-norm.
const STALL_TOL: f64 = 1e-10;

/// The model may exceed its warm-start value by at most this much.
const MODEL_INCREASE_TOL: f64 = 1e-12;

/// One trust-region subproblem: minimize the quadratic model with Hessian
/// `b`·I plus the regularizer, over the box seen from `x` intersected with an
/// ∞-ball of radius `radius_eff = min(Δ, β‖s₁‖)`.
pub struct SubproblemSpec<'a> {
    pub grad: &'a [f64],
    /// Scalar model Hessian; the operator norm is |b| exactly.
    pub b: f64,
    pub radius_eff: f64,
    /// Warm start; always feasible for `radius_eff`.
    pub s1: &'a [f64],
    pub regularizer: &'a RegularizerSpec,
    pub x: &'a [f64],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub alpha: f64,
}

impl SubproblemSpec<'_> {
    /// Model value at `s` up to the constant f(x), which cancels in every
    /// comparison.
    pub fn model_value(&self, s: &[f64]) -> f64 {
        dot(self.grad, s) + 0.5 * self.b * norm2sq(s) + eval_h(self.regularizer, &add(self.x, s))
    }
}

/// Proximal-gradient descent on the model, warm-started at `s1`.
///
/// Returns the best iterate seen (by model value) and the number of inner
/// iterations performed; with `max_inner = 0` that is the warm start itself.
/// The step length 1/(b + α⁻¹·radius_eff⁻¹) is below 1/b, so the smooth part
/// decreases monotonically along the iteration.
pub fn solve_model(spec: &SubproblemSpec, max_inner: usize) -> Result<(Vec<f64>, usize), SolverError> {
    if !(spec.radius_eff > 0.0) {
        return Err(SolverError::InvalidInput(format!(
            "effective radius must be positive, got {}",
            spec.radius_eff
        )));
    }
    let region = BoxBall::around(spec.x, spec.lower, spec.upper, spec.radius_eff)?;
    let step = 1.0 / (spec.b + (spec.alpha * spec.radius_eff).recip());

    let warm_value = spec.model_value(spec.s1);
    let mut current = spec.s1.to_vec();
    let mut best = current.clone();
    let mut best_value = warm_value;
    let mut inner = 0;

    while inner < max_inner {
        let target: Vec<f64> = current
            .iter()
            .zip(spec.grad)
            .map(|(s, g)| s - step * (g + spec.b * s))
            .collect();
        let next = prox_separable(spec.regularizer, &target, step, spec.x, &region)?;
        inner += 1;

        let value = spec.model_value(&next);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(&next);
        }
        let moved = current
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        current = next;
        if moved < STALL_TOL {
            break;
        }
    }

    if best_value > warm_value + MODEL_INCREASE_TOL {
        return Err(SolverError::ModelIncrease { value: best_value - warm_value });
    }
    Ok((best, inner))
}

/// Global minimizer −∇f(x)/b of the smooth unconstrained model with Hessian
/// b·I, b > 0. Used by the verification harness in place of the iterative
/// solver so no inner-solver rounding enters the trace.
pub fn solve_model_analytic(grad: &[f64], b: f64) -> Result<Vec<f64>, SolverError> {
    if !b.is_finite() || b <= 0.0 {
        return Err(SolverError::InvalidInput(format!(
            "analytic model step needs a positive curvature, got {b}"
        )));
    }
    Ok(grad.iter().map(|g| -(g / b)).collect())
}
