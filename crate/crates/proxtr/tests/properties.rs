//! Cross-module properties: the hard instance driven end to end, sequence
//! invariants over a parameter sweep, and bound checks against observed
//! counts.

use std::sync::Arc;

use proxtr::adversary::{k_eps, AdversarialInstance, AdversaryParams};
use proxtr::bounds::BoundInputs;
use proxtr::{run, HessianPolicy, IterationStatus, SolveStatus, SubsolverMode, TrParams};

const SWEEP_EPS: [f64; 4] = [1.0 / 3.0, 0.2, 0.1, 0.05];
const SWEEP_P: [f64; 4] = [0.0, 0.1, 0.3, 0.5];

fn hard_params(epsilon: f64, p: f64) -> (AdversaryParams, TrParams) {
    let adv = AdversaryParams::new(epsilon, p, 1e16, 1e16);
    let ke = k_eps(epsilon, p).unwrap();
    let tr = TrParams {
        epsilon,
        alpha: adv.alpha,
        beta: adv.beta,
        gamma3: adv.gamma3,
        delta0: adv.delta0,
        delta_max: adv.delta_max,
        max_iter: ke + 10,
        ..TrParams::default()
    };
    (adv, tr)
}

#[test]
fn sequence_invariants_across_the_sweep() {
    for &eps in &SWEEP_EPS {
        for &p in &SWEEP_P {
            let (adv, _) = hard_params(eps, p);
            let inst = AdversarialInstance::build(&adv).unwrap();
            let ke = inst.k_eps();

            for k in 0..=ke {
                let ki = k as isize;
                // Ramp and slope definitions.
                assert_eq!(inst.ramp(k), (ke - k) as f64 / ke as f64);
                assert_eq!(inst.slope(ki), -eps * (1.0 + inst.ramp(k)));
                // Slopes stay in (−2ε, −ε] territory and exceed ε before k*.
                assert!(inst.slope(ki).abs() <= 2.0 * eps + 1e-15);
                assert!(inst.slope(ki).abs() <= 1.0);
                if k < ke {
                    assert!(inst.slope(ki).abs() > eps);
                }
                // Steps are positive, bounded by 1, and consistent.
                assert!(inst.step(ki) > 0.0 && inst.step(ki) <= 1.0);
                assert_eq!(inst.step(ki), -(inst.slope(ki) / inst.curvature(k)));
                // Objective values decrease, stay in [0, f0], and obey the
                // closed-form envelope with (1−p)-power growth.
                let f0 = inst.objective(0);
                let gap = f0 - inst.objective(ki);
                assert!(inst.objective(ki) >= 0.0 && inst.objective(ki) <= f0);
                let envelope = 4.0 * eps * eps * (2.0 + (k as f64).powf(1.0 - p) / (1.0 - p));
                assert!(gap >= -1e-12 && gap <= envelope + 1e-10, "eps={eps} p={p} k={k}");
                assert!(envelope <= 8.0 * eps * eps + 4.0 / (1.0 - p) + 1e-10);
                // Slope increments are within one step.
                assert!((inst.slope(ki + 1) - inst.slope(ki)).abs() <= inst.step(ki) + 1e-15);
                // Step vs radius and vs the Cauchy step (both norms in 1-D).
                let rhs = inst.radius(k).min(adv.beta * inst.cauchy_step(k).abs());
                assert!(inst.step(ki).abs() <= rhs + 1e-12);
                // Criticality identity at the prescribed step size.
                let g = inst.slope(ki);
                let nu = inst.step_size(k);
                let crit = ((-g * -(nu * g)) / nu).sqrt();
                assert!((crit - g.abs()).abs() <= 1e-13);
            }
            assert_eq!(inst.slope(ke as isize), -eps);

            // Interpolation at every interior knot, both value and slope.
            for k in 0..=ke as isize {
                let x = inst.knot(k);
                assert!((inst.eval_f(x) - inst.objective(k)).abs() <= 1e-12);
                assert!((inst.eval_fprime(x) - inst.slope(k)).abs() <= 1e-12);
            }
            // Piece endpoints reproduce the right-hand knot data.
            for k in -1..=ke as isize {
                let piece = inst.piece(k);
                assert!((piece.value(piece.width) - inst.objective(k + 1)).abs() <= 1e-12);
                assert!((piece.slope(piece.width) - inst.slope(k + 1)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn one_sided_slopes_agree_at_interior_knots() {
    for &eps in &SWEEP_EPS {
        for &p in &SWEEP_P {
            let (adv, _) = hard_params(eps, p);
            let inst = AdversarialInstance::build(&adv).unwrap();
            for k in 0..=inst.k_eps() as isize {
                let left = inst.piece(k - 1);
                let right = inst.piece(k);
                let gap = (left.slope(left.width) - right.slope(0.0)).abs();
                assert!(gap <= 1e-10, "eps={eps} p={p} knot {k}: one-sided slopes differ by {gap}");
            }
        }
    }
}

#[test]
fn finite_differences_confirm_the_derivative() {
    // Central differences at step 1e-7 carry roundoff of order
    // ulp(f)/h ≈ 1e-8, so the comparison tolerance is 1e-7.
    let h = 1e-7;
    for &eps in &[1.0 / 3.0, 0.05] {
        for &p in &[0.0, 0.5] {
            let (adv, _) = hard_params(eps, p);
            let inst = AdversarialInstance::build(&adv).unwrap();
            let ke = inst.k_eps() as isize;
            let stride = (ke as usize / 50).max(1);
            for k in (0..=ke).step_by(stride) {
                for t in [0.25, 0.5, 0.75] {
                    let piece = inst.piece(k);
                    let x = inst.knot(k) + t * piece.width;
                    let fd = (inst.eval_f(x + h) - inst.eval_f(x - h)) / (2.0 * h);
                    let exact = inst.eval_fprime(x);
                    assert!(
                        (fd - exact).abs() <= 1e-7,
                        "eps={eps} p={p} k={k} t={t}: fd={fd} exact={exact}"
                    );
                }
            }
        }
    }
}

#[test]
fn driver_consumes_exactly_the_predicted_budget_across_the_sweep() {
    for &eps in &SWEEP_EPS {
        for &p in &SWEEP_P {
            if eps == 0.05 && p == 0.5 {
                continue; // 160k iterations; covered once in the long test below
            }
            let (adv, tr) = hard_params(eps, p);
            let inst = Arc::new(AdversarialInstance::build(&adv).unwrap());
            let problem = inst.problem();
            let result = run(&problem, &tr, HessianPolicy::AdversarialPower { p }, SubsolverMode::Analytic)
                .unwrap();
            assert_eq!(result.status, SolveStatus::FirstOrderStationary);
            assert_eq!(result.iterations, inst.k_eps(), "eps={eps} p={p}");
            assert_eq!(result.n_successful, inst.k_eps());
            assert_eq!(result.n_unsuccessful, 0);
            assert!(result.audit.passes());
            assert!(result.audit.model_error_excess <= 1e-10);
            let terminal = result.history.last().unwrap();
            assert_eq!(terminal.status, IterationStatus::Terminated);
            assert_eq!(terminal.criticality, eps, "terminal measure must hit eps exactly");
            for rec in &result.history {
                if let Some(r) = rec.rho {
                    assert!((r - 2.0).abs() <= 1e-10, "acceptance ratio should be 2, got {r}");
                }
            }
        }
    }
}

#[test]
fn driver_tracks_the_prescribed_trajectory_to_rounding() {
    // Radii and curvatures repeat the very computations of the construction
    // and must agree bit for bit. Iterates, steps and criticality pass
    // through the piecewise evaluation once per iteration, which can move
    // them by an ulp; the terminal measure still lands exactly on epsilon.
    let (adv, tr) = hard_params(0.1, 0.1);
    let inst = Arc::new(AdversarialInstance::build(&adv).unwrap());
    let problem = inst.problem();
    let result = run(&problem, &tr, HessianPolicy::AdversarialPower { p: 0.1 }, SubsolverMode::Analytic)
        .unwrap();
    assert_eq!(result.iterations, 166);
    for rec in &result.history {
        let k = rec.k;
        assert_eq!(rec.b_norm, inst.curvature(k));
        assert_eq!(rec.delta, inst.radius(k));
        assert!((rec.x_norm - inst.knot(k as isize).abs()).abs() <= 1e-13, "iterate at {k}");
        assert!(
            (rec.criticality - inst.slope(k as isize).abs()).abs() <= 1e-14,
            "criticality at {k}: {} vs {}",
            rec.criticality,
            inst.slope(k as isize).abs()
        );
        assert!((rec.f_val - inst.objective(k as isize)).abs() <= 1e-13, "value at {k}");
        if rec.status != IterationStatus::Terminated {
            assert!((rec.s_norm - inst.step(k as isize).abs()).abs() <= 1e-14, "step at {k}");
        } else {
            assert!((rec.s_norm - inst.cauchy_step(k).abs()).abs() <= 1e-14);
            assert_eq!(rec.criticality, 0.1, "terminal measure is exact");
        }
    }
    assert!((result.final_x[0] - inst.knot(166)).abs() <= 1e-13);
}

#[test]
fn long_instance_still_terminates_on_budget() {
    let (adv, tr) = hard_params(0.05, 0.5);
    let inst = Arc::new(AdversarialInstance::build(&adv).unwrap());
    assert_eq!(inst.k_eps(), 160_000);
    let problem = inst.problem();
    let result = run(&problem, &tr, HessianPolicy::AdversarialPower { p: 0.5 }, SubsolverMode::Analytic)
        .unwrap();
    assert_eq!(result.iterations, 160_000);
    assert_eq!(result.history.last().unwrap().criticality, 0.05);
}

#[test]
fn observed_counts_sit_below_the_closed_form_bounds() {
    for &(eps, p) in &[(0.1, 0.1), (0.05, 0.1)] {
        let (adv, tr) = hard_params(eps, p);
        let inst = Arc::new(AdversarialInstance::build(&adv).unwrap());
        let problem = inst.problem();
        let policy = HessianPolicy::AdversarialPower { p };
        let result = run(&problem, &tr, policy, SubsolverMode::Analytic).unwrap();
        let inputs = BoundInputs::from_run(&result, &tr, &policy, 0.5, None).unwrap();
        assert!(inputs.delta_succ() > 0.0);
        assert!(inputs.delta_min() > 0.0);
        let s_bound = inputs.successful_bound();
        assert!(
            (result.n_successful as f64) <= s_bound.bound,
            "observed {} above bound {}",
            result.n_successful,
            s_bound.bound
        );
        let u_bound = inputs.unsuccessful_bound(result.n_successful as f64);
        assert!((result.n_unsuccessful as f64) <= u_bound);
    }
}

#[test]
fn instance_rejects_undersized_beta_and_oversized_budgets() {
    assert!(AdversarialInstance::build(&AdversaryParams::new(0.1, 0.1, 1.0, 1.0)).is_err());
    assert!(k_eps(1e-4, 0.5).is_err()); // 10^16 knots
}
