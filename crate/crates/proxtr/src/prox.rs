//! Closed-form separable proximal kernels.
//!
//! The feasible set is always a box intersected with an ∞-norm ball, so every
//! proximal subproblem splits into independent scalar problems
//! `min ½ν⁻¹(s − q)² + λ|x + s|` over an interval. The unconstrained scalar
//! prox has a closed form and clamping it onto the interval is exact because
//! the scalar objective is convex.

use crate::error::SolverError;
use crate::problem::{BoxBall, RegularizerKind, RegularizerSpec};

/// Evaluates the regularizer at `x`: 0 for the zero kind, λ‖x‖₁ for L1.
pub fn eval_h(spec: &RegularizerSpec, x: &[f64]) -> f64 {
    match spec.kind {
        RegularizerKind::Zero => 0.0,
        RegularizerKind::L1 => spec.weight * x.iter().map(|v| v.abs()).sum::<f64>(),
    }
}

/// Componentwise minimizer of `½ν⁻¹(sᵢ − qᵢ)² + λ|xᵢ + sᵢ|` over
/// `sᵢ ∈ [max(ℓᵢ − xᵢ, −Δ), min(uᵢ − xᵢ, Δ)]`.
///
/// Returns an error when ν is not positive, `q` is not finite, or some
/// coordinate has an empty feasible interval (infeasible `shift`).
pub fn prox_separable(
    spec: &RegularizerSpec,
    q: &[f64],
    nu: f64,
    shift: &[f64],
    region: &BoxBall,
) -> Result<Vec<f64>, SolverError> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(SolverError::InvalidInput(format!(
            "prox step size must be positive and finite, got {nu}"
        )));
    }
    if !(region.radius > 0.0) {
        return Err(SolverError::InvalidInput(format!(
            "prox region radius must be positive, got {}",
            region.radius
        )));
    }
    let n = q.len();
    if shift.len() != n || region.lower_shift.len() != n || region.upper_shift.len() != n {
        return Err(SolverError::InvalidInput("prox input lengths disagree".into()));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::InvalidInput("prox target must be finite".into()));
    }

    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let lo = region.lower_shift[i].max(-region.radius);
        let hi = region.upper_shift[i].min(region.radius);
        if lo > hi {
            return Err(SolverError::InvalidInput(format!(
                "empty feasible interval in coordinate {i}: [{lo}, {hi}]"
            )));
        }
        s.push(prox_scalar(spec, q[i], nu, shift[i], lo, hi));
    }
    Ok(s)
}

fn prox_scalar(spec: &RegularizerSpec, q: f64, nu: f64, x: f64, lo: f64, hi: f64) -> f64 {
    let cand = if spec.is_smooth() {
        q
    } else {
        soft_threshold(x + q, nu * spec.weight) - x
    };
    if cand >= lo && cand <= hi {
        return cand;
    }
    let objective = |s: f64| {
        let quad = 0.5 / nu * (s - q) * (s - q);
        if spec.is_smooth() { quad } else { quad + spec.weight * (x + s).abs() }
    };
    pick_endpoint(lo, hi, objective(lo), objective(hi))
}

/// Smaller objective wins; an exact tie goes to the endpoint with smaller
/// magnitude so results are deterministic.
fn pick_endpoint(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> f64 {
    if f_lo < f_hi {
        lo
    } else if f_hi < f_lo {
        hi
    } else if lo.abs() <= hi.abs() {
        lo
    } else {
        hi
    }
}

fn soft_threshold(w: f64, t: f64) -> f64 {
    if w > t {
        w - t
    } else if w < -t {
        w + t
    } else {
        0.0
    }
}
