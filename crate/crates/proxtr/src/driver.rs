//! Outer trust-region loop.
//!
//! Per iteration: pick the step size ν, compute the Cauchy step and the
//! criticality measure, stop if below tolerance, otherwise solve the
//! quadratic model inside the effective radius, take the ratio of actual to
//! model decrease, accept or reject, and update the radius. The radius
//! update uses fixed representatives of the allowed intervals — γ₃Δ on very
//! successful, Δ on successful, γ₂Δ on unsuccessful iterations — so runs are
//! bit-reproducible.

use crate::cauchy::{cauchy_step, kappa_mdc, select_nu};
use crate::error::SolverError;
use crate::problem::{Problem, TrParams};
use crate::prox::eval_h;
use crate::subsolver::{solve_model, solve_model_analytic, SubproblemSpec};
use crate::vecops::{add, all_finite, dot, inf_norm, norm2sq};

/// Violations of the per-iteration sufficient-decrease audit beyond this are
/// reported as failures.
pub const AUDIT_TOL: f64 = 1e-10;

/// Rule producing the model Hessian norm ‖B_k‖ at outer iteration `k` given
/// the number of successful iterations so far.
#[derive(Clone, Copy, Debug)]
pub enum HessianPolicy {
    /// ‖B_k‖ = b for all k.
    Constant(f64),
    /// ‖B_k‖ = max(μ₁, μ₂·σ^p), where σ counts the successful iterations
    /// before k.
    PowerGrowth { mu1: f64, mu2: f64, p: f64 },
    /// ‖B₀‖ = 1 and ‖B_k‖ = k^p afterwards; pairs with the hard instance,
    /// where every iteration is successful and k itself counts them.
    AdversarialPower { p: f64 },
}

impl HessianPolicy {
    pub fn norm_b(&self, k: usize, sigma: usize) -> f64 {
        match *self {
            HessianPolicy::Constant(b) => b,
            HessianPolicy::PowerGrowth { mu1, mu2, p } => mu1.max(mu2 * (sigma as f64).powf(p)),
            HessianPolicy::AdversarialPower { p } => {
                if k == 0 {
                    1.0
                } else {
                    (k as f64).powf(p)
                }
            }
        }
    }

    /// Constants (μ₁, μ₂, p) this policy declares for the growth audit
    /// max_{j≤k}‖B_j‖ ≤ max(μ₁, μ₂·σ_k^p).
    pub fn growth_constants(&self) -> (f64, f64, f64) {
        match *self {
            HessianPolicy::Constant(b) => (b, b, 0.0),
            HessianPolicy::PowerGrowth { mu1, mu2, p } => (mu1, mu2, p),
            HessianPolicy::AdversarialPower { p } => (1.0, 1.0, p),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let (mu1, mu2, p) = self.growth_constants();
        if !(mu1 > 0.0 && mu1.is_finite() && mu2 > 0.0 && mu2.is_finite()) {
            return Err(SolverError::InvalidInput(format!(
                "growth constants must be positive and finite, got mu1={mu1}, mu2={mu2}"
            )));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(SolverError::InvalidInput(format!(
                "growth exponent must lie in [0, 1), got {p}"
            )));
        }
        Ok(())
    }
}

/// How the model subproblem is solved.
#[derive(Clone, Copy, Debug)]
pub enum SubsolverMode {
    /// Proximal-gradient iterations warm-started at the Cauchy step.
    Iterative { max_inner: usize },
    /// Closed-form step −∇f/b; requires a vanishing regularizer and an
    /// unbounded box.
    Analytic,
}

impl Default for SubsolverMode {
    fn default() -> Self {
        SubsolverMode::Iterative { max_inner: crate::subsolver::DEFAULT_MAX_INNER }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationStatus {
    VerySuccessful,
    Successful,
    Unsuccessful,
    /// Criticality fell below tolerance before a step was computed; the row
    /// carries the Cauchy data only.
    Terminated,
}

impl IterationStatus {
    pub fn label(&self) -> &'static str {
        match self {
            IterationStatus::VerySuccessful => "very_successful",
            IterationStatus::Successful => "successful",
            IterationStatus::Unsuccessful => "unsuccessful",
            IterationStatus::Terminated => "terminated",
        }
    }
}

/// One row of the solve trace. `delta`, `x_norm` refer to the state at the
/// start of the iteration; norms are ∞-norms.
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub k: usize,
    /// Inner iterations spent in the subsolver (1 for the analytic path and
    /// for the terminal row's Cauchy-only work).
    pub inner: usize,
    pub f_val: f64,
    pub h_val: f64,
    /// ν_k^{-1/2}·ξ_cp^{1/2}.
    pub criticality: f64,
    /// Square root of the model decrease m(0) − m(s_k); absent on the
    /// terminal row.
    pub sqrt_xi: Option<f64>,
    pub rho: Option<f64>,
    pub delta: f64,
    pub x_norm: f64,
    /// ‖s_k‖ for stepped rows, ‖s_{k,1}‖ for the terminal row.
    pub s_norm: f64,
    pub b_norm: f64,
    pub status: IterationStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    FirstOrderStationary,
    MaxIter,
}

/// Results of the runtime assumption audits accumulated over a run.
#[derive(Clone, Copy, Debug)]
pub struct AuditReport {
    /// min over iterations of 1 − ν_k‖B_k‖; positive iff ν_k‖B_k‖ < 1 held
    /// throughout.
    pub min_kappa_mdc: f64,
    /// min over iterations of (m(0) − m(s_k)) − κ_mdc·ξ_cp with
    /// κ_mdc = 1 − ν_k‖B_k‖. Should not drop below −[`AUDIT_TOL`].
    pub sufficient_decrease_margin: f64,
    /// max over iterations of |f(x_k+s_k) − φ(s_k)| − ½(1+‖B_k‖)‖s_k‖².
    /// Nonpositive (up to [`AUDIT_TOL`]) when the model error constant ½
    /// applies, as on the hard instance.
    pub model_error_excess: f64,
    /// Whether max_{j≤k}‖B_j‖ ≤ max(μ₁, μ₂σ_k^p) held at every iteration.
    pub growth_ok: bool,
    /// Whether every step satisfied ‖s_k‖ ≤ min(Δ_k, β‖s_{k,1}‖) and box
    /// feasibility.
    pub steps_feasible: bool,
}

impl Default for AuditReport {
    fn default() -> Self {
        Self {
            min_kappa_mdc: f64::INFINITY,
            sufficient_decrease_margin: f64::INFINITY,
            model_error_excess: f64::NEG_INFINITY,
            growth_ok: true,
            steps_feasible: true,
        }
    }
}

impl AuditReport {
    /// The audits every run must satisfy: ν_k‖B_k‖ < 1, the sufficient
    /// decrease with κ_mdc = 1 − ν_k‖B_k‖, declared Hessian growth, and step
    /// feasibility.
    pub fn passes(&self) -> bool {
        self.min_kappa_mdc > 0.0
            && self.sufficient_decrease_margin >= -AUDIT_TOL
            && self.growth_ok
            && self.steps_feasible
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub final_x: Vec<f64>,
    /// Number of iterations that computed a step (successful + unsuccessful);
    /// the terminal stationarity check is not counted.
    pub iterations: usize,
    pub n_successful: usize,
    pub n_unsuccessful: usize,
    /// One record per iteration, plus a terminal row when the run stopped at
    /// a stationary point.
    pub history: Vec<IterationRecord>,
    pub audit: AuditReport,
}

impl SolveResult {
    /// Best f + h value seen along the run.
    pub fn best_objective(&self) -> f64 {
        self.history
            .iter()
            .map(|r| r.f_val + r.h_val)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Ratio of actual to model decrease.
pub fn rho(actual_decrease: f64, model_decrease: f64) -> Result<f64, SolverError> {
    if !(model_decrease > 0.0) {
        return Err(SolverError::NonpositiveModelDecrease { value: model_decrease });
    }
    Ok(actual_decrease / model_decrease)
}

/// Runs the trust-region loop on `problem` from `problem.x0`.
pub fn run(
    problem: &Problem,
    params: &TrParams,
    policy: HessianPolicy,
    mode: SubsolverMode,
) -> Result<SolveResult, SolverError> {
    params.validate()?;
    policy.validate()?;
    if matches!(mode, SubsolverMode::Analytic)
        && !(problem.regularizer.is_smooth() && problem.is_box_unbounded())
    {
        return Err(SolverError::InvalidInput(
            "the analytic subsolver requires a vanishing regularizer and an unbounded box".into(),
        ));
    }
    if !problem.is_feasible(&problem.x0) {
        return Err(SolverError::InvalidInput("starting point is infeasible".into()));
    }
    if !eval_h(&problem.regularizer, &problem.x0).is_finite() {
        return Err(SolverError::InvalidInput("regularizer is not finite at the starting point".into()));
    }

    let (mu1, mu2, growth_p) = policy.growth_constants();
    let mut x = problem.x0.clone();
    let mut delta = params.delta0;
    let mut sigma = 0usize;
    let mut n_successful = 0usize;
    let mut n_unsuccessful = 0usize;
    let mut max_b_seen = 0.0f64;
    let mut history: Vec<IterationRecord> = Vec::new();
    let mut audit = AuditReport::default();

    for k in 0.. {
        if k == params.max_iter {
            return Ok(SolveResult {
                status: SolveStatus::MaxIter,
                final_x: x,
                iterations: k,
                n_successful,
                n_unsuccessful,
                history,
                audit,
            });
        }

        let b = policy.norm_b(k, sigma);
        max_b_seen = max_b_seen.max(b);
        let nu = select_nu(delta, b, params.alpha)?;
        let kappa = kappa_mdc(delta, b, params.alpha);
        audit.min_kappa_mdc = audit.min_kappa_mdc.min(kappa);

        let fx = (problem.f)(&x);
        if !fx.is_finite() {
            return Err(SolverError::NonfiniteOracle { what: "objective", iteration: k });
        }
        let gx = (problem.grad)(&x);
        if gx.len() != problem.dim || !all_finite(&gx) {
            return Err(SolverError::NonfiniteOracle { what: "gradient", iteration: k });
        }
        let hx = eval_h(&problem.regularizer, &x);

        let cauchy = cauchy_step(problem, &x, &gx, nu, delta)?;

        if cauchy.criticality <= params.epsilon {
            history.push(IterationRecord {
                k,
                inner: 1,
                f_val: fx,
                h_val: hx,
                criticality: cauchy.criticality,
                sqrt_xi: None,
                rho: None,
                delta,
                x_norm: inf_norm(&x),
                s_norm: inf_norm(&cauchy.s1),
                b_norm: b,
                status: IterationStatus::Terminated,
            });
            return Ok(SolveResult {
                status: SolveStatus::FirstOrderStationary,
                final_x: x,
                iterations: k,
                n_successful,
                n_unsuccessful,
                history,
                audit,
            });
        }

        let radius_eff = delta.min(params.beta * inf_norm(&cauchy.s1));
        let (s, inner) = match mode {
            SubsolverMode::Analytic => (solve_model_analytic(&gx, b)?, 1),
            SubsolverMode::Iterative { max_inner } => {
                let spec = SubproblemSpec {
                    grad: &gx,
                    b,
                    radius_eff,
                    s1: &cauchy.s1,
                    regularizer: &problem.regularizer,
                    x: &x,
                    lower: &problem.lower,
                    upper: &problem.upper,
                    alpha: params.alpha,
                };
                solve_model(&spec, max_inner)?
            }
        };

        let xs = add(&x, &s);
        if inf_norm(&s) > radius_eff + AUDIT_TOL || !problem.is_feasible(&xs) {
            audit.steps_feasible = false;
        }

        let fxs = (problem.f)(&xs);
        if !fxs.is_finite() {
            return Err(SolverError::NonfiniteOracle { what: "objective", iteration: k });
        }
        let hxs = eval_h(&problem.regularizer, &xs);
        let g_dot_s = dot(&gx, &s);
        let s_sq = norm2sq(&s);
        let model_decrease = -(g_dot_s + 0.5 * b * s_sq + (hxs - hx));
        let actual_decrease = (fx + hx) - (fxs + hxs);
        let rho_k = rho(actual_decrease, model_decrease)?;

        audit.sufficient_decrease_margin = audit
            .sufficient_decrease_margin
            .min(model_decrease - kappa * cauchy.xi_cp);
        let smooth_model = fx + g_dot_s + 0.5 * b * s_sq;
        audit.model_error_excess = audit
            .model_error_excess
            .max((fxs - smooth_model).abs() - 0.5 * (1.0 + b) * s_sq);

        let status = if rho_k >= params.eta2 {
            IterationStatus::VerySuccessful
        } else if rho_k >= params.eta1 {
            IterationStatus::Successful
        } else {
            IterationStatus::Unsuccessful
        };

        history.push(IterationRecord {
            k,
            inner,
            f_val: fx,
            h_val: hx,
            criticality: cauchy.criticality,
            sqrt_xi: Some(model_decrease.sqrt()),
            rho: Some(rho_k),
            delta,
            x_norm: inf_norm(&x),
            s_norm: inf_norm(&s),
            b_norm: b,
            status,
        });

        if rho_k >= params.eta1 {
            x = xs;
            sigma += 1;
            n_successful += 1;
        } else {
            n_unsuccessful += 1;
        }

        if max_b_seen > mu1.max(mu2 * (sigma as f64).powf(growth_p)) {
            audit.growth_ok = false;
        }

        let bar = match status {
            IterationStatus::VerySuccessful => params.gamma3 * delta,
            IterationStatus::Successful => delta,
            IterationStatus::Unsuccessful => params.gamma2 * delta,
            IterationStatus::Terminated => unreachable!(),
        };
        delta = bar.min(params.delta_max);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::RegularizerSpec;

    fn quadratic_1d(reg: RegularizerSpec) -> Problem {
        Problem::unconstrained(
            1,
            Box::new(|x: &[f64]| 0.5 * (x[0] - 1.0) * (x[0] - 1.0)),
            Box::new(|x: &[f64]| vec![x[0] - 1.0]),
            reg,
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn newton_step_on_quadratic_converges_immediately() {
        let p = quadratic_1d(RegularizerSpec::zero());
        let params = TrParams { epsilon: 1e-6, ..TrParams::default() };
        let r = run(&p, &params, HessianPolicy::Constant(1.0), SubsolverMode::Analytic).unwrap();
        assert_eq!(r.status, SolveStatus::FirstOrderStationary);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.n_successful, 1);
        assert_eq!(r.n_unsuccessful, 0);
        assert!((r.final_x[0] - 1.0).abs() < 1e-6);
        assert_eq!(r.history[0].s_norm, 1.0); // exact Newton step
        assert_eq!(r.history.len(), 2); // one step + terminal row
        assert!(r.audit.passes());
    }

    #[test]
    fn lasso_fixed_point() {
        let p = quadratic_1d(RegularizerSpec::l1(0.5).unwrap());
        let params = TrParams { epsilon: 1e-6, ..TrParams::default() };
        let r = run(&p, &params, HessianPolicy::Constant(1.0), SubsolverMode::default()).unwrap();
        assert_eq!(r.status, SolveStatus::FirstOrderStationary);
        assert!((r.final_x[0] - 0.5).abs() < 1e-6, "got {}", r.final_x[0]);
        assert!(r.audit.passes());

        // Grid confirmation of the stationary point of ½(x−1)² + ½|x|.
        let obj = |x: f64| 0.5 * (x - 1.0) * (x - 1.0) + 0.5 * x.abs();
        let mut arg = 0.0;
        let mut best = f64::INFINITY;
        for j in -300_000..=300_000 {
            let x = j as f64 * 1e-5;
            let v = obj(x);
            if v < best {
                best = v;
                arg = x;
            }
        }
        assert!((arg - 0.5).abs() < 1e-4);
    }

    #[test]
    fn rho_is_plain_ratio() {
        assert_eq!(rho(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(rho(0.0, 1.0).unwrap(), 0.0);
        assert!(rho(1.0, 0.0).is_err());
        assert!(rho(1.0, -1.0).is_err());
    }

    #[test]
    fn unsuccessful_iterations_shrink_radius_and_keep_iterate() {
        // Hopeless curvature model on a stiff quadratic forces rejections.
        let p = Problem::unconstrained(
            1,
            Box::new(|x: &[f64]| 50.0 * x[0] * x[0]),
            Box::new(|x: &[f64]| vec![100.0 * x[0]]),
            RegularizerSpec::zero(),
            vec![0.1],
        )
        .unwrap();
        let params = TrParams { alpha: 1.0, beta: 1e16, epsilon: 1e-8, ..TrParams::default() };
        let r = run(&p, &params, HessianPolicy::Constant(0.01), SubsolverMode::default()).unwrap();
        assert_eq!(r.status, SolveStatus::FirstOrderStationary);
        assert!(r.n_unsuccessful > 0, "expected rejected steps");
        assert!(r.final_x[0].abs() < 1e-6);
        assert!(r.audit.passes());

        let mut fh_prev = f64::INFINITY;
        for (i, rec) in r.history.iter().enumerate() {
            let fh = rec.f_val + rec.h_val;
            assert!(fh <= fh_prev + 1e-12, "objective increased along the run");
            fh_prev = fh;
            assert!(rec.delta <= params.delta_max + 1e-12);
            if i + 1 < r.history.len() {
                let next = &r.history[i + 1];
                let ratio = next.delta / rec.delta;
                let expected = match rec.status {
                    IterationStatus::VerySuccessful => {
                        (params.gamma3 * rec.delta).min(params.delta_max) / rec.delta
                    }
                    IterationStatus::Successful => 1.0,
                    IterationStatus::Unsuccessful => params.gamma2,
                    IterationStatus::Terminated => unreachable!("terminal row has no successor"),
                };
                assert!((ratio - expected).abs() <= 1e-12, "radius branch mismatch");
                if rec.status == IterationStatus::Unsuccessful {
                    assert_eq!(next.x_norm, rec.x_norm, "iterate moved on rejection");
                }
            }
        }
    }

    #[test]
    fn max_iter_is_reported() {
        let p = quadratic_1d(RegularizerSpec::zero());
        let params = TrParams { epsilon: 1e-12, max_iter: 1, ..TrParams::default() };
        let r = run(&p, &params, HessianPolicy::Constant(1.0), SubsolverMode::Analytic).unwrap();
        assert_eq!(r.status, SolveStatus::MaxIter);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.history.len(), 1);
    }

    #[test]
    fn nonfinite_oracle_is_an_input_error() {
        let p = Problem::unconstrained(
            1,
            Box::new(|_| f64::NAN),
            Box::new(|_| vec![0.0]),
            RegularizerSpec::zero(),
            vec![0.0],
        )
        .unwrap();
        let r = run(&p, &TrParams::default(), HessianPolicy::Constant(1.0), SubsolverMode::default());
        assert!(matches!(r, Err(SolverError::NonfiniteOracle { .. })));
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let p = Problem::new(
            1,
            Box::new(|_| 0.0),
            Box::new(|_| vec![0.0]),
            RegularizerSpec::zero(),
            vec![1.0],
            vec![2.0],
            vec![0.0],
        )
        .unwrap();
        let r = run(&p, &TrParams::default(), HessianPolicy::Constant(1.0), SubsolverMode::default());
        assert!(matches!(r, Err(SolverError::InvalidInput(_))));
    }

    #[test]
    fn analytic_mode_requires_smooth_unconstrained() {
        let p = quadratic_1d(RegularizerSpec::l1(0.5).unwrap());
        let r = run(&p, &TrParams::default(), HessianPolicy::Constant(1.0), SubsolverMode::Analytic);
        assert!(matches!(r, Err(SolverError::InvalidInput(_))));
    }

    #[test]
    fn power_growth_policy_obeys_its_declared_envelope() {
        let p = quadratic_1d(RegularizerSpec::zero());
        let params = TrParams { epsilon: 1e-10, alpha: 1.0, ..TrParams::default() };
        let policy = HessianPolicy::PowerGrowth { mu1: 0.5, mu2: 2.0, p: 0.3 };
        let r = run(&p, &params, policy, SubsolverMode::default()).unwrap();
        assert_eq!(r.status, SolveStatus::FirstOrderStationary);
        assert!(r.audit.growth_ok);
        assert!(r.audit.passes());
    }
}
