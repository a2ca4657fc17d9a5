//! Closed-form worst-case iteration bounds, for comparison against observed
//! counts.
//!
//! With the step-size rule of [`crate::cauchy::select_nu`] and Hessian norms
//! controlled by max(μ₁, μ₂σ^p) in the number σ of successful iterations, the
//! number of successful iterations before the criticality measure drops below
//! ε admits two closed-form bounds: an ε⁻² one when the growth never bites
//! and an ε^{−2/(1−p)} one when it does. Unsuccessful iterations are bounded
//! through the radius update alone.

use crate::driver::{HessianPolicy, SolveResult};
use crate::error::SolverError;
use crate::problem::TrParams;

/// Everything the bound formulas consume. Use [`BoundInputs::from_run`] to
/// derive the run-dependent entries from a finished solve.
#[derive(Clone, Copy, Debug)]
pub struct BoundInputs {
    /// (f+h)(x₀).
    pub f0_plus_h0: f64,
    /// Lower bound on f + h over the run (best observed value if the user
    /// supplies none; the bounds are then a-posteriori checks).
    pub f_low: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Sufficient-decrease fraction in (0, 1); runs report 1 − max_k ν_k‖B_k‖.
    pub kappa_mdc: f64,
    /// Model error constant; the hard instance realizes ½.
    pub kappa_ubd: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub delta0: f64,
    pub epsilon: f64,
}

/// Which closed-form successful-iteration bound applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Hessian growth never dominates; the ε⁻² form applies.
    Bounded,
    /// Growth dominates; the ε^{−2/(1−p)} form applies.
    Growth,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Bounded => write!(f, "bounded"),
            Regime::Growth => write!(f, "growth"),
        }
    }
}

/// Both successful-iteration bounds, with the regime whose condition the
/// growth-regime value satisfies self-consistently.
#[derive(Clone, Copy, Debug)]
pub struct SuccessfulBound {
    pub regime: Regime,
    /// The bound selected by `regime`.
    pub bound: f64,
    pub bounded_value: f64,
    pub growth_value: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<(), SolverError> {
        let fail = |m: String| Err(SolverError::InvalidInput(m));
        if !(self.f0_plus_h0 >= self.f_low) {
            return fail(format!(
                "initial objective {} below its lower bound {}",
                self.f0_plus_h0, self.f_low
            ));
        }
        if !(self.kappa_mdc > 0.0 && self.kappa_mdc < 1.0) {
            return fail(format!("kappa_mdc must lie in (0, 1), got {}", self.kappa_mdc));
        }
        if !(self.kappa_ubd > 0.0) {
            return fail(format!("kappa_ubd must be positive, got {}", self.kappa_ubd));
        }
        if !(self.mu1 > 0.0 && self.mu2 > 0.0) {
            return fail(format!("mu1 and mu2 must be positive, got {} and {}", self.mu1, self.mu2));
        }
        if !(0.0..1.0).contains(&self.p) {
            return fail(format!("p must lie in [0, 1), got {}", self.p));
        }
        if !(self.alpha > 0.0 && self.beta >= 1.0 && self.delta0 > 0.0) {
            return fail("alpha, beta, delta0 out of range".into());
        }
        if !(self.eta1 > 0.0 && self.eta1 <= self.eta2 && self.eta2 < 1.0) {
            return fail("eta thresholds out of range".into());
        }
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0 && self.gamma2 < 1.0 && self.gamma4 > 1.0) {
            return fail("gamma constants out of range".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }

    /// Derives inputs from a finished run: κ_mdc is the run minimum of
    /// 1 − ν_k‖B_k‖, the growth constants come from the policy, and `f_low`
    /// defaults to the best observed objective value.
    pub fn from_run(
        result: &SolveResult,
        params: &TrParams,
        policy: &HessianPolicy,
        kappa_ubd: f64,
        f_low: Option<f64>,
    ) -> Result<Self, SolverError> {
        let first = result
            .history
            .first()
            .ok_or_else(|| SolverError::InvalidInput("run has no iterations to derive bounds from".into()))?;
        let (mu1, mu2, p) = policy.growth_constants();
        let inputs = Self {
            f0_plus_h0: first.f_val + first.h_val,
            f_low: f_low.unwrap_or_else(|| result.best_objective()),
            eta1: params.eta1,
            eta2: params.eta2,
            kappa_mdc: result.audit.min_kappa_mdc,
            kappa_ubd,
            mu1,
            mu2,
            p,
            alpha: params.alpha,
            beta: params.beta,
            gamma1: params.gamma1,
            gamma2: params.gamma2,
            gamma4: params.gamma4,
            delta0: params.delta0,
            epsilon: params.epsilon,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// Radius below which every noncritical iteration must be very
    /// successful: κ_mdc(1 − η₂) / (2 κ_ubd α β²).
    pub fn delta_succ(&self) -> f64 {
        self.kappa_mdc * (1.0 - self.eta2) / (2.0 * self.kappa_ubd * self.alpha * self.beta * self.beta)
    }

    /// min(Δ₀, γ₁·Δ_succ); no radius along a run drops below this.
    pub fn delta_min(&self) -> f64 {
        self.delta0.min(self.gamma1 * self.delta_succ())
    }

    /// Both closed-form bounds on the number of successful iterations, and
    /// the regime whose condition holds at the growth-regime candidate value.
    pub fn successful_bound(&self) -> SuccessfulBound {
        let ainv = (self.alpha * self.delta_min()).recip();
        let gap = self.f0_plus_h0 - self.f_low;
        let scale = gap / (self.eta1 * self.kappa_mdc * self.epsilon * self.epsilon);
        let bounded_value = (self.mu1 * (1.0 + ainv) + ainv).max(2.0 * ainv) * scale;
        let growth_value = (2.0 * self.mu2 * (1.0 + ainv) * scale).powf(1.0 / (1.0 - self.p));

        // Self-consistent regime test at the candidate count: the split is
        // stated in terms of the unknown |S(ε)| itself.
        let grown = self.mu2 * growth_value.powf(self.p);
        let regime = if self.mu1 >= grown || grown < 1.0 / (1.0 + self.alpha * self.delta_min()) {
            Regime::Bounded
        } else {
            Regime::Growth
        };
        let bound = match regime {
            Regime::Bounded => bounded_value,
            Regime::Growth => growth_value,
        };
        SuccessfulBound { regime, bound, bounded_value, growth_value }
    }

    /// log_{γ₂}(Δ_min/Δ₀) + |S|·|log_{γ₂}(γ₄)|, an upper bound on the number
    /// of unsuccessful iterations given `n_successful` successful ones.
    pub fn unsuccessful_bound(&self, n_successful: f64) -> f64 {
        (self.delta_min() / self.delta0).log(self.gamma2)
            + n_successful * self.gamma4.log(self.gamma2).abs()
    }
}
