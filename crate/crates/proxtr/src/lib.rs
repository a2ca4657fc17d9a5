//! Trust-region solver for nonsmooth regularized problems
//! `min f(x) + h(x)` subject to box constraints `ℓ ≤ x ≤ u`,
//! designed to remain well-behaved when the norms of the model Hessians grow
//! without bound over the run.
//!
//! The crate provides
//!
//! - closed-form separable proximal kernels ([`prox`]),
//! - the step-size rule, Cauchy step and criticality measure ([`cauchy`]),
//! - a proximal-gradient subsolver for the quadratic-plus-regularizer model
//!   ([`subsolver`]),
//! - the outer trust-region loop with a per-iteration trace and runtime
//!   assumption audits ([`driver`]),
//! - a generator for a one-dimensional piecewise-cubic objective on which the
//!   solver provably consumes its full worst-case iteration budget
//!   ([`adversary`]),
//! - closed-form worst-case iteration bounds for comparison against observed
//!   counts ([`bounds`]).
//!
//! The trust region is measured in the ∞-norm throughout, so the intersection
//! of the box constraints with the trust region is again a box and every
//! proximal subproblem separates by coordinate.

pub mod adversary;
pub mod bounds;
pub mod cauchy;
pub mod driver;
mod error;
pub mod problem;
pub mod prox;
pub mod subsolver;
pub(crate) mod vecops;

pub use driver::{
    run, AuditReport, HessianPolicy, IterationRecord, IterationStatus, SolveResult, SolveStatus,
    SubsolverMode,
};
pub use error::SolverError;
pub use problem::{BoxBall, Problem, RegularizerKind, RegularizerSpec, TrParams};
