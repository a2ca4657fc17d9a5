//! Step-size rule, Cauchy step, and the criticality measure.
//!
//! The Cauchy step minimizes the first-order model
//! `f(x) + ∇f(x)ᵀs + ½ν⁻¹‖s‖² + h(x + s)` over the feasible region, which is
//! a single proximal evaluation. The decrease it achieves on that model, ξ_cp,
//! yields the stationarity measure √(ξ_cp/ν) used for termination.

use crate::error::SolverError;
use crate::problem::{BoxBall, Problem};
use crate::prox::{eval_h, prox_separable};
use crate::vecops::{add, dot, norm2sq};

/// Cauchy decreases in [−NEG_XI_TOL, 0] are rounded up to zero; anything more
/// negative is reported as a broken proximal step.
pub const NEG_XI_TOL: f64 = 1e-10;

/// Cauchy step data for one iteration.
#[derive(Clone, Debug)]
pub struct CauchyResult {
    /// Step size ν used for the first-order model.
    pub nu: f64,
    /// The Cauchy step itself.
    pub s1: Vec<f64>,
    /// Optimal decrease of the first-order model at `s1`; nonnegative.
    pub xi_cp: f64,
    /// √(ξ_cp/ν). Coincides with ‖∇f(x)‖ on smooth unconstrained problems
    /// when the trust region is inactive.
    pub criticality: f64,
}

/// Largest step size admitted at radius Δ with model Hessian norm ‖B‖:
///
/// ν = 1 / (α⁻¹Δ⁻¹ + ‖B‖(1 + α⁻¹Δ⁻¹)),
///
/// which keeps ν‖B‖ < 1 for every Δ.
pub fn select_nu(delta: f64, norm_b: f64, alpha: f64) -> Result<f64, SolverError> {
    if !delta.is_finite() || !norm_b.is_finite() || !alpha.is_finite() {
        return Err(SolverError::InvalidInput("step-size inputs must be finite".into()));
    }
    if delta <= 0.0 || alpha <= 0.0 || norm_b < 0.0 {
        return Err(SolverError::InvalidInput(format!(
            "step-size inputs out of range: delta={delta}, norm_b={norm_b}, alpha={alpha}"
        )));
    }
    let t = (alpha * delta).recip();
    Ok(1.0 / (t + norm_b * (1.0 + t)))
}

/// The gap 1 − ν‖B‖ for the step size of [`select_nu`], computed from its own
/// closed form t(1 + ‖B‖) / (‖B‖(1 + t) + t) with t = α⁻¹Δ⁻¹.
///
/// The direct product ν·‖B‖ rounds to exactly 1.0 in double precision once
/// α⁻¹Δ⁻¹ falls below machine epsilon, which would erase the sign of this
/// gap; the closed form keeps it strictly positive.
pub fn kappa_mdc(delta: f64, norm_b: f64, alpha: f64) -> f64 {
    let t = (alpha * delta).recip();
    t * (1.0 + norm_b) / (norm_b * (1.0 + t) + t)
}

/// Computes the Cauchy step at `x` for gradient `grad`, step size `nu`, and
/// radius `delta`, together with ξ_cp and the criticality measure.
///
/// ξ_cp = −∇f(x)ᵀs₁ + h(x) − h(x + s₁); the value of f itself cancels and is
/// never consulted.
pub fn cauchy_step(
    problem: &Problem,
    x: &[f64],
    grad: &[f64],
    nu: f64,
    delta: f64,
) -> Result<CauchyResult, SolverError> {
    let q: Vec<f64> = grad.iter().map(|g| -(nu * g)).collect();
    let region = BoxBall::around(x, &problem.lower, &problem.upper, delta)?;
    let s1 = prox_separable(&problem.regularizer, &q, nu, x, &region)?;

    let hx = eval_h(&problem.regularizer, x);
    let hxs = eval_h(&problem.regularizer, &add(x, &s1));
    let mut xi_cp = (hx - hxs) - dot(grad, &s1);
    if xi_cp < 0.0 {
        if xi_cp < -NEG_XI_TOL {
            return Err(SolverError::NegativeCauchyDecrease { value: xi_cp });
        }
        xi_cp = 0.0;
    }
    // Sufficient-decrease property of the proximal step.
    debug_assert!(xi_cp >= 0.5 / nu * norm2sq(&s1) - 1e-12);

    let criticality = (xi_cp / nu).sqrt();
    Ok(CauchyResult { nu, s1, xi_cp, criticality })
}
