//! JSON experiment configuration and flag overrides.
//!
//! A config file selects the problem, overrides solver constants, and picks
//! the Hessian policy and subsolver. Command-line flags override individual
//! fields on top of the file.

use std::fs;
use std::path::{Path, PathBuf};

use proxtr::{HessianPolicy, SolverError, SubsolverMode, TrParams};
use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Option<ProblemChoice>,
    #[serde(default)]
    pub params: ParamOverrides,
    pub policy: Option<PolicyChoice>,
    pub subsolver: Option<SubsolverChoice>,
    pub out: Option<PathBuf>,
    /// Sample count for `emit` (default 2000).
    pub samples: Option<usize>,
    /// Known lower bound on f + h for `bounds`; best observed value if absent.
    pub f_low: Option<f64>,
    /// Model error constant for `bounds` (default 0.5).
    pub kappa_ubd: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, SolverError> {
        let text = fs::read_to_string(path).map_err(|e| {
            SolverError::InvalidInput(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            SolverError::InvalidInput(format!("cannot parse config {}: {e}", path.display()))
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemChoice {
    Adversarial { epsilon: f64, p: f64 },
    Builtin(String),
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
    pub delta0: Option<f64>,
    pub delta_max: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Constant(f64),
    PowerGrowth { mu1: f64, mu2: f64, p: f64 },
    AdversarialPower { p: f64 },
}

impl From<PolicyChoice> for HessianPolicy {
    fn from(c: PolicyChoice) -> Self {
        match c {
            PolicyChoice::Constant(b) => HessianPolicy::Constant(b),
            PolicyChoice::PowerGrowth { mu1, mu2, p } => HessianPolicy::PowerGrowth { mu1, mu2, p },
            PolicyChoice::AdversarialPower { p } => HessianPolicy::AdversarialPower { p },
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SubsolverChoice {
    Iterative,
    Analytic,
}

impl From<SubsolverChoice> for SubsolverMode {
    fn from(c: SubsolverChoice) -> Self {
        match c {
            SubsolverChoice::Iterative => SubsolverMode::default(),
            SubsolverChoice::Analytic => SubsolverMode::Analytic,
        }
    }
}

/// Values passed as command-line flags; each one beats the config file.
#[derive(Clone, Debug, Default)]
pub struct FlagOverrides {
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma3: Option<f64>,
    pub delta_max: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub problem: Option<String>,
    pub samples: Option<usize>,
}

/// Merges defaults, the config file, and flags into concrete solver
/// constants. `gamma4` and `gamma1` are pulled along when a large `gamma3`
/// would break the constant chain; explicit settings stay untouched.
pub fn resolve_params(cfg: &ExperimentConfig, flags: &FlagOverrides) -> TrParams {
    let o = &cfg.params;
    let mut p = TrParams::default();
    if let Some(v) = o.eta1 {
        p.eta1 = v;
    }
    if let Some(v) = o.eta2 {
        p.eta2 = v;
    }
    if let Some(v) = o.gamma1 {
        p.gamma1 = v;
    }
    if let Some(v) = o.gamma2 {
        p.gamma2 = v;
    }
    if let Some(v) = o.gamma3.or(flags.gamma3) {
        p.gamma3 = v;
    }
    if let Some(v) = o.gamma4 {
        p.gamma4 = v;
    }
    if let Some(v) = o.delta0 {
        p.delta0 = v;
    }
    if let Some(v) = o.delta_max.or(flags.delta_max) {
        p.delta_max = v;
    }
    if let Some(v) = o.alpha.or(flags.alpha) {
        p.alpha = v;
    }
    if let Some(v) = o.beta.or(flags.beta) {
        p.beta = v;
    }
    if let Some(v) = o.epsilon.or(flags.epsilon) {
        p.epsilon = v;
    }
    if let Some(v) = o.max_iter.or(flags.max_iter) {
        p.max_iter = v;
    }
    if o.gamma4.is_none() && p.gamma4 < p.gamma3 {
        p.gamma4 = p.gamma3;
    }
    if o.gamma1.is_none() && p.gamma1 < 1.0 / p.gamma3 {
        p.gamma1 = 1.0 / p.gamma3;
    }
    p
}

/// The adversarial (ε, p) pair for a command, from flags, then the config
/// problem entry, then the standard defaults ε = 0.1, p = 0.1.
pub fn resolve_adversarial(cfg: &ExperimentConfig, flags: &FlagOverrides) -> Result<(f64, f64), SolverError> {
    let from_cfg = match &cfg.problem {
        Some(ProblemChoice::Adversarial { epsilon, p }) => Some((*epsilon, *p)),
        Some(ProblemChoice::Builtin(name)) => {
            return Err(SolverError::InvalidInput(format!(
                "this command needs an adversarial problem, config selects builtin '{name}'"
            )));
        }
        None => None,
    };
    let (e0, p0) = from_cfg.unwrap_or((0.1, 0.1));
    Ok((flags.epsilon.unwrap_or(e0), flags.p.unwrap_or(p0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_adversarial_problem_and_policy() {
        let text = r#"{
            "problem": {"adversarial": {"epsilon": 0.1, "p": 0.1}},
            "params": {"alpha": 1e16, "gamma3": 3.0},
            "policy": {"adversarial_power": {"p": 0.1}},
            "subsolver": "analytic"
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(cfg.problem, Some(ProblemChoice::Adversarial { .. })));
        assert_eq!(cfg.params.alpha, Some(1e16));
        assert_eq!(cfg.subsolver, Some(SubsolverChoice::Analytic));
    }

    #[test]
    fn parses_builtin_problem() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"problem": {"builtin": "lasso"}}"#).unwrap();
        assert!(matches!(cfg.problem, Some(ProblemChoice::Builtin(ref n)) if n == "lasso"));
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"probelm": 3}"#).is_err());
    }

    #[test]
    fn flags_override_config() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"problem": {"adversarial": {"epsilon": 0.25, "p": 0.3}}}"#)
                .unwrap();
        let flags = FlagOverrides { epsilon: Some(0.05), ..Default::default() };
        let (e, p) = resolve_adversarial(&cfg, &flags).unwrap();
        assert_eq!(e, 0.05);
        assert_eq!(p, 0.3);
    }

    #[test]
    fn gamma_chain_follows_a_large_gamma3() {
        let flags = FlagOverrides { gamma3: Some(7.0), ..Default::default() };
        let p = resolve_params(&ExperimentConfig::default(), &flags);
        assert_eq!(p.gamma4, 7.0);
        p.validate().unwrap();
        let flags = FlagOverrides { gamma3: Some(2.0), ..Default::default() };
        let p = resolve_params(&ExperimentConfig::default(), &flags);
        assert_eq!(p.gamma1, 0.5);
        p.validate().unwrap();
    }
}
