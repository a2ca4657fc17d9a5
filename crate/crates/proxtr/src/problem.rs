//! Problem data, regularizer specifications, and algorithm constants.

use crate::error::SolverError;
use crate::vecops::all_finite;

/// Which nonsmooth term the problem carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularizerKind {
    /// h = 0.
    Zero,
    /// h(x) = λ‖x‖₁.
    L1,
}

/// A regularizer with its weight. The weight is ignored for [`RegularizerKind::Zero`],
/// and an L1 term with zero weight behaves exactly like the zero regularizer.
#[derive(Clone, Copy, Debug)]
pub struct RegularizerSpec {
    pub kind: RegularizerKind,
    pub weight: f64,
}

impl RegularizerSpec {
    pub fn zero() -> Self {
        Self { kind: RegularizerKind::Zero, weight: 0.0 }
    }

    pub fn l1(weight: f64) -> Result<Self, SolverError> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(SolverError::InvalidInput(format!(
                "L1 weight must be finite and nonnegative, got {weight}"
            )));
        }
        Ok(Self { kind: RegularizerKind::L1, weight })
    }

    /// True when h vanishes identically (zero kind, or L1 with zero weight).
    pub fn is_smooth(&self) -> bool {
        matches!(self.kind, RegularizerKind::Zero) || self.weight == 0.0
    }
}

pub type ValueOracle = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradOracle = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Everything the solver consumes: smooth oracles, regularizer, box bounds,
/// and the starting point. Bounds may be ±∞ componentwise.
///
/// Oracles must be deterministic: the same input must produce the same output
/// bit for bit. The solver relies on this for reproducible traces.
pub struct Problem {
    pub dim: usize,
    pub f: ValueOracle,
    pub grad: GradOracle,
    pub regularizer: RegularizerSpec,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub x0: Vec<f64>,
}

impl Problem {
    pub fn new(
        dim: usize,
        f: ValueOracle,
        grad: GradOracle,
        regularizer: RegularizerSpec,
        lower: Vec<f64>,
        upper: Vec<f64>,
        x0: Vec<f64>,
    ) -> Result<Self, SolverError> {
        if dim == 0 {
            return Err(SolverError::InvalidInput("dimension must be positive".into()));
        }
        if lower.len() != dim || upper.len() != dim || x0.len() != dim {
            return Err(SolverError::InvalidInput(format!(
                "bounds and starting point must have length {dim}"
            )));
        }
        for i in 0..dim {
            if !(lower[i] <= upper[i]) {
                return Err(SolverError::InvalidInput(format!(
                    "lower bound exceeds upper bound in coordinate {i}: [{}, {}]",
                    lower[i], upper[i]
                )));
            }
        }
        if !all_finite(&x0) {
            return Err(SolverError::InvalidInput("starting point must be finite".into()));
        }
        Ok(Self { dim, f, grad, regularizer, lower, upper, x0 })
    }

    /// A problem without box constraints.
    pub fn unconstrained(
        dim: usize,
        f: ValueOracle,
        grad: GradOracle,
        regularizer: RegularizerSpec,
        x0: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let lower = vec![f64::NEG_INFINITY; dim];
        let upper = vec![f64::INFINITY; dim];
        Self::new(dim, f, grad, regularizer, lower, upper, x0)
    }

    pub fn is_box_unbounded(&self) -> bool {
        self.lower.iter().all(|&l| l == f64::NEG_INFINITY)
            && self.upper.iter().all(|&u| u == f64::INFINITY)
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (l, u))| *l <= *xi && *xi <= *u)
    }
}

/// Constants of the outer trust-region loop.
///
/// The defaults satisfy the full constraint chain below and match the
/// verification setup: η₁ = 10⁻³, η₂ = 0.75, γ₁ = 1/3, γ₂ = 0.9, γ₃ = 3,
/// γ₄ = 5, Δ₀ = 1, Δ_max = 10³, α = β = 10¹⁶, ε = 10⁻⁶, 10 000 iterations.
#[derive(Clone, Copy, Debug)]
pub struct TrParams {
    pub eta1: f64,
    pub eta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub delta0: f64,
    pub delta_max: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Stopping tolerance on the criticality measure, in (0, 1).
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for TrParams {
    fn default() -> Self {
        Self {
            eta1: 1e-3,
            eta2: 0.75,
            gamma1: 1.0 / 3.0,
            gamma2: 0.9,
            gamma3: 3.0,
            gamma4: 5.0,
            delta0: 1.0,
            delta_max: 1e3,
            alpha: 1e16,
            beta: 1e16,
            epsilon: 1e-6,
            max_iter: 10_000,
        }
    }
}

impl TrParams {
    /// Checks 0 < η₁ ≤ η₂ < 1, 0 < 1/γ₃ ≤ γ₁ ≤ γ₂ < 1 < γ₃ ≤ γ₄,
    /// Δ_max > Δ₀ > 0, α > 0, β ≥ 1, ε ∈ (0, 1), and a positive iteration cap.
    pub fn validate(&self) -> Result<(), SolverError> {
        let fail = |msg: String| Err(SolverError::InvalidInput(msg));
        let vals = [
            self.eta1, self.eta2, self.gamma1, self.gamma2, self.gamma3, self.gamma4,
            self.delta0, self.delta_max, self.alpha, self.beta, self.epsilon,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return fail("all trust-region constants must be finite".into());
        }
        if !(0.0 < self.eta1 && self.eta1 <= self.eta2 && self.eta2 < 1.0) {
            return fail(format!("need 0 < eta1 <= eta2 < 1, got eta1={}, eta2={}", self.eta1, self.eta2));
        }
        if !(self.gamma3 > 1.0 && self.gamma3 <= self.gamma4) {
            return fail(format!("need 1 < gamma3 <= gamma4, got gamma3={}, gamma4={}", self.gamma3, self.gamma4));
        }
        if !(1.0 / self.gamma3 <= self.gamma1 && self.gamma1 <= self.gamma2 && self.gamma2 < 1.0) {
            return fail(format!(
                "need 1/gamma3 <= gamma1 <= gamma2 < 1, got gamma1={}, gamma2={}, 1/gamma3={}",
                self.gamma1, self.gamma2, 1.0 / self.gamma3
            ));
        }
        if !(self.delta0 > 0.0 && self.delta_max > self.delta0) {
            return fail(format!("need delta_max > delta0 > 0, got delta0={}, delta_max={}", self.delta0, self.delta_max));
        }
        if !(self.alpha > 0.0) {
            return fail(format!("need alpha > 0, got {}", self.alpha));
        }
        if !(self.beta >= 1.0) {
            return fail(format!("need beta >= 1, got {}", self.beta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("need epsilon in (0, 1), got {}", self.epsilon));
        }
        if self.max_iter == 0 {
            return fail("need a positive iteration cap".into());
        }
        Ok(())
    }
}

/// The feasible set of a proximal subproblem, expressed in step coordinates:
/// the box shifted by the current iterate, intersected with an ∞-norm ball of
/// radius Δ. A step s is feasible when
/// `max(lower_shift_i, −Δ) ≤ s_i ≤ min(upper_shift_i, Δ)` for every i.
#[derive(Clone, Debug)]
pub struct BoxBall {
    /// ℓ − x, componentwise (−∞ for unbounded coordinates).
    pub lower_shift: Vec<f64>,
    /// u − x, componentwise (+∞ for unbounded coordinates).
    pub upper_shift: Vec<f64>,
    /// Trust-region radius Δ > 0.
    pub radius: f64,
}

impl BoxBall {
    pub fn new(lower_shift: Vec<f64>, upper_shift: Vec<f64>, radius: f64) -> Result<Self, SolverError> {
        if !(radius > 0.0) {
            return Err(SolverError::InvalidInput(format!("trust-region radius must be positive, got {radius}")));
        }
        if lower_shift.len() != upper_shift.len() {
            return Err(SolverError::InvalidInput("shift vectors must have equal length".into()));
        }
        Ok(Self { lower_shift, upper_shift, radius })
    }

    /// The region seen from the point `x` of a box `[lower, upper]`.
    pub fn around(x: &[f64], lower: &[f64], upper: &[f64], radius: f64) -> Result<Self, SolverError> {
        let lo = lower.iter().zip(x).map(|(l, xi)| l - xi).collect();
        let hi = upper.iter().zip(x).map(|(u, xi)| u - xi).collect();
        Self::new(lo, hi, radius)
    }
}
