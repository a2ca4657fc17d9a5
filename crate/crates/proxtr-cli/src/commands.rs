//! The four subcommands. Each takes resolved settings plus an output writer
//! and returns the process exit code, so tests can capture everything.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use proxtr::adversary::{k_eps, AdversarialInstance, AdversaryParams};
use proxtr::bounds::BoundInputs;
use proxtr::{
    run, HessianPolicy, SolveResult, SolveStatus, SolverError, SubsolverMode, TrParams,
};

use crate::builtins::builtin_problem;
use crate::config::{
    resolve_adversarial, resolve_params, ExperimentConfig, FlagOverrides, ProblemChoice,
};
use crate::logfmt::{self, write_log};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_IO: i32 = 3;

fn fail(out: &mut dyn Write, err: &SolverError) -> i32 {
    let _ = writeln!(out, "error: {err}");
    EXIT_MISMATCH
}

/// Audits every run must clear; the hard instance additionally realizes the
/// model-error constant ½.
fn audits_pass(result: &SolveResult, adversarial: bool) -> bool {
    result.audit.passes() && (!adversarial || result.audit.model_error_excess <= 1e-10)
}

struct AdversarialRun {
    instance: Arc<AdversarialInstance>,
    result: SolveResult,
    params: TrParams,
    policy: HessianPolicy,
}

fn run_adversarial(
    cfg: &ExperimentConfig,
    flags: &FlagOverrides,
) -> Result<AdversarialRun, SolverError> {
    let (epsilon, p) = resolve_adversarial(cfg, flags)?;
    let mut params = resolve_params(cfg, flags);
    params.epsilon = epsilon;
    params.delta0 = 1.0;
    if cfg.params.max_iter.or(flags.max_iter).is_none() {
        params.max_iter = k_eps(epsilon, p)? + 2;
    }
    let adv = AdversaryParams {
        epsilon,
        p,
        alpha: params.alpha,
        beta: params.beta,
        gamma3: params.gamma3,
        delta0: params.delta0,
        delta_max: params.delta_max,
    };
    let instance = Arc::new(AdversarialInstance::build(&adv)?);
    let problem = instance.problem();
    let policy = HessianPolicy::AdversarialPower { p };
    let result = run(&problem, &params, policy, SubsolverMode::Analytic)?;
    Ok(AdversarialRun { instance, result, params, policy })
}

/// Runs the hard instance and checks the observed iteration count against
/// ⌊ε^{−2/(1−p)}⌋. Exit 0 only when the counts agree and every runtime audit
/// passed.
pub fn cmd_verify(cfg: &ExperimentConfig, flags: &FlagOverrides, out: &mut dyn Write) -> i32 {
    let hard = match run_adversarial(cfg, flags) {
        Ok(r) => r,
        Err(e) => return fail(out, &e),
    };
    let _ = write_log(out, &hard.result);
    if let Some(last) = hard.result.history.last() {
        if hard.result.status == SolveStatus::FirstOrderStationary {
            let _ = writeln!(out, "TR: terminating with √ξcp/√ν = {}", last.criticality);
            let _ = writeln!(out, "status: first-order stationary");
        }
    }
    let predicted = hard.instance.k_eps();
    let observed = hard.result.iterations;
    let audits = audits_pass(&hard.result, true);
    let _ = writeln!(out, "observed iterations: {observed}, predicted: {predicted}");
    if observed == predicted && audits && hard.result.status == SolveStatus::FirstOrderStationary {
        let _ = writeln!(out, "verification: PASS");
        EXIT_OK
    } else {
        let _ = writeln!(
            out,
            "verification: FAIL (observed {observed} vs predicted {predicted}, audits {})",
            if audits { "ok" } else { "violated" }
        );
        EXIT_MISMATCH
    }
}

/// Solves a builtin problem, printing the trace and optionally writing the
/// history as CSV. Exit 0 on stationarity, 2 when the iteration cap was hit.
pub fn cmd_solve(cfg: &ExperimentConfig, flags: &FlagOverrides, out: &mut dyn Write) -> i32 {
    let name = flags
        .problem
        .clone()
        .or_else(|| match &cfg.problem {
            Some(ProblemChoice::Builtin(n)) => Some(n.clone()),
            _ => None,
        })
        .unwrap_or_else(|| "quadratic".to_string());
    let problem = match builtin_problem(&name) {
        Ok(p) => p,
        Err(e) => return fail(out, &e),
    };
    let params = resolve_params(cfg, flags);
    let policy = cfg.policy.map(HessianPolicy::from).unwrap_or(HessianPolicy::Constant(1.0));
    let mode = cfg.subsolver.map(SubsolverMode::from).unwrap_or_default();

    let result = match run(&problem, &params, policy, mode) {
        Ok(r) => r,
        Err(e) => return fail(out, &e),
    };
    let _ = writeln!(out, "problem: {name}");
    let _ = write_log(out, &result);
    let _ = writeln!(
        out,
        "iterations: {} ({} successful, {} unsuccessful)",
        result.iterations, result.n_successful, result.n_unsuccessful
    );
    let xs: Vec<String> = result.final_x.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "final point: [{}]", xs.join(", "));
    if !audits_pass(&result, false) {
        let _ = writeln!(out, "warning: runtime audits reported a violation");
    }
    if let Some(path) = flags.out.clone().or_else(|| cfg.out.clone()) {
        if let Err(e) = write_history_csv(&path, &result) {
            let _ = writeln!(out, "error: cannot write {}: {e}", path.display());
            return EXIT_IO;
        }
        let _ = writeln!(out, "history written to {}", path.display());
    }
    match result.status {
        SolveStatus::FirstOrderStationary => {
            let _ = writeln!(out, "status: first-order stationary");
            EXIT_OK
        }
        SolveStatus::MaxIter => {
            let _ = writeln!(out, "status: iteration cap reached");
            EXIT_NO_CONVERGENCE
        }
    }
}

fn write_history_csv(path: &Path, result: &SolveResult) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "k,inner,f,h,criticality,sqrt_xi,rho,delta,x_norm,s_norm,b_norm,status")?;
    for r in &result.history {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.inner,
            r.f_val,
            r.h_val,
            r.criticality,
            opt(r.sqrt_xi),
            opt(r.rho),
            r.delta,
            r.x_norm,
            r.s_norm,
            r.b_norm,
            r.status.label()
        )?;
    }
    w.flush()
}

/// Writes CSV samples of the hard instance: objective and derivative over
/// the full support (plus one step past the last knot so both flat tails
/// appear), the prescribed iterates, and the prescribed steps.
pub fn cmd_emit(cfg: &ExperimentConfig, flags: &FlagOverrides, out: &mut dyn Write) -> i32 {
    let (epsilon, p) = match resolve_adversarial(cfg, flags) {
        Ok(v) => v,
        Err(e) => return fail(out, &e),
    };
    let params = resolve_params(cfg, flags);
    let adv = AdversaryParams {
        epsilon,
        p,
        alpha: params.alpha,
        beta: params.beta,
        gamma3: params.gamma3,
        delta0: 1.0,
        delta_max: params.delta_max,
    };
    let instance = match AdversarialInstance::build(&adv) {
        Ok(i) => Arc::new(i),
        Err(e) => return fail(out, &e),
    };
    let samples = flags.samples.or(cfg.samples).unwrap_or(2000).max(2);
    let dir = flags.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));

    match emit_csvs(&instance, samples, &dir) {
        Ok(files) => {
            for f in files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(out, "error: cannot write under {}: {e}", dir.display());
            EXIT_IO
        }
    }
}

fn emit_csvs(
    instance: &AdversarialInstance,
    samples: usize,
    dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    let ke = instance.k_eps() as isize;
    let (lo, hi_knot) = instance.domain();
    let hi = hi_knot + instance.step(ke);

    // Uniform samples plus every knot, so knot rows appear exactly.
    let mut grid = Vec::with_capacity(samples + instance.k_eps() + 3);
    for i in 0..samples {
        grid.push(lo + (hi - lo) * i as f64 / (samples - 1) as f64);
    }
    for k in -1..=ke + 1 {
        grid.push(instance.knot(k));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut written = Vec::new();
    let mut open = |name: &str| -> io::Result<(BufWriter<File>, PathBuf)> {
        let path = dir.join(name);
        Ok((BufWriter::new(File::create(&path)?), path))
    };

    let (mut f_csv, path) = open("f.csv")?;
    writeln!(f_csv, "x,f")?;
    for &x in &grid {
        writeln!(f_csv, "{x},{}", instance.eval_f(x))?;
    }
    f_csv.flush()?;
    written.push(path);

    let (mut g_csv, path) = open("fprime.csv")?;
    writeln!(g_csv, "x,fprime")?;
    for &x in &grid {
        writeln!(g_csv, "{x},{}", instance.eval_fprime(x))?;
    }
    g_csv.flush()?;
    written.push(path);

    let (mut x_csv, path) = open("iterates.csv")?;
    writeln!(x_csv, "k,x")?;
    for k in 0..=ke + 1 {
        writeln!(x_csv, "{k},{}", instance.knot(k))?;
    }
    x_csv.flush()?;
    written.push(path);

    let (mut s_csv, path) = open("steps.csv")?;
    writeln!(s_csv, "k,s")?;
    for k in 0..=ke {
        writeln!(s_csv, "{k},{}", instance.step(k))?;
    }
    s_csv.flush()?;
    written.push(path);

    Ok(written)
}

/// Prints the closed-form bound values for the configured problem next to
/// the observed counts.
pub fn cmd_bounds(cfg: &ExperimentConfig, flags: &FlagOverrides, out: &mut dyn Write) -> i32 {
    let kappa_ubd = cfg.kappa_ubd.unwrap_or(0.5);
    let adversarial = !matches!(
        (&cfg.problem, &flags.problem),
        (Some(ProblemChoice::Builtin(_)), None) | (_, Some(_))
    );

    let (result, params, policy, predicted) = if adversarial {
        let hard = match run_adversarial(cfg, flags) {
            Ok(r) => r,
            Err(e) => return fail(out, &e),
        };
        let predicted = hard.instance.k_eps();
        (hard.result, hard.params, hard.policy, Some(predicted))
    } else {
        let name = flags
            .problem
            .clone()
            .or_else(|| match &cfg.problem {
                Some(ProblemChoice::Builtin(n)) => Some(n.clone()),
                _ => None,
            })
            .unwrap_or_else(|| "quadratic".to_string());
        let problem = match builtin_problem(&name) {
            Ok(p) => p,
            Err(e) => return fail(out, &e),
        };
        let params = resolve_params(cfg, flags);
        let policy = cfg.policy.map(HessianPolicy::from).unwrap_or(HessianPolicy::Constant(1.0));
        let mode = cfg.subsolver.map(SubsolverMode::from).unwrap_or_default();
        match run(&problem, &params, policy, mode) {
            Ok(r) => (r, params, policy, None),
            Err(e) => return fail(out, &e),
        }
    };

    let inputs = match BoundInputs::from_run(&result, &params, &policy, kappa_ubd, cfg.f_low) {
        Ok(i) => i,
        Err(e) => return fail(out, &e),
    };
    let s_bound = inputs.successful_bound();
    let u_bound = inputs.unsuccessful_bound(result.n_successful as f64);
    let _ = writeln!(out, "delta_succ = {}", logfmt::sci1(inputs.delta_succ()));
    let _ = writeln!(out, "delta_min = {}", logfmt::sci1(inputs.delta_min()));
    let _ = writeln!(
        out,
        "successful-iteration bound = {} [regime: {}; bounded form {}, growth form {}]",
        logfmt::sci1(s_bound.bound),
        s_bound.regime,
        logfmt::sci1(s_bound.bounded_value),
        logfmt::sci1(s_bound.growth_value),
    );
    let _ = writeln!(out, "unsuccessful-iteration bound = {}", logfmt::sci1(u_bound));
    if let Some(ke) = predicted {
        let _ = writeln!(out, "k_eps = {ke}");
    }
    let _ = writeln!(
        out,
        "observed: {} successful, {} unsuccessful",
        result.n_successful, result.n_unsuccessful
    );
    let ok_s = (result.n_successful as f64) <= s_bound.bound;
    let ok_u = (result.n_unsuccessful as f64) <= u_bound;
    let _ = writeln!(out, "observed within bounds: {}", if ok_s && ok_u { "yes" } else { "NO" });
    EXIT_OK
}
