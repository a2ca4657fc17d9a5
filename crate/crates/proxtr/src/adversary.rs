//! The hard one-dimensional instance.
//!
//! For a tolerance ε ∈ (0, ½] and growth exponent p ∈ [0, 1), the instance
//! prescribes `k* = ⌊ε^{−2/(1−p)}⌋` iterates with slopes that decay linearly
//! from −2ε to −ε, curvatures ‖B_k‖ = k^p, and steps s_k = −g_k/B_k. A
//! piecewise-cubic objective interpolates the prescribed values and slopes at
//! the iterates, so the solver run on it accepts every step with ratio 2 and
//! first reaches criticality ≤ ε at iteration k* exactly.
//!
//! Each cubic piece is built on the actual gap between consecutive stored
//! knots (not the step value that produced it): the two differ by the
//! rounding absorbed when the knot was stored, and using the true gap keeps
//! evaluation at knots accurate to the last bit. That is what lets the driver
//! walking this objective reproduce the prescribed sequences exactly in
//! double precision.

use std::io::{self, Write};
use std::sync::Arc;

use crate::cauchy::select_nu;
use crate::error::SolverError;
use crate::problem::{Problem, RegularizerSpec};

/// Hard cap on the number of knots; above this the precomputed arrays would
/// not fit in memory comfortably.
pub const MAX_KNOTS: usize = 10_000_000;

/// Parameter set for the instance. `new` fills in the standard radius
/// schedule (γ₃ = 3, Δ₀ = 1, Δ_max = 10³); the construction requires
/// Δ₀ ≥ 1 so that every radius along the run stays at least 1.
#[derive(Clone, Copy, Debug)]
pub struct AdversaryParams {
    pub epsilon: f64,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma3: f64,
    pub delta0: f64,
    pub delta_max: f64,
}

impl AdversaryParams {
    pub fn new(epsilon: f64, p: f64, alpha: f64, beta: f64) -> Self {
        Self { epsilon, p, alpha, beta, gamma3: 3.0, delta0: 1.0, delta_max: 1e3 }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(SolverError::InvalidInput(format!(
                "epsilon must lie in (0, 1/2], got {}",
                self.epsilon
            )));
        }
        if !(0.0..1.0).contains(&self.p) {
            return Err(SolverError::InvalidInput(format!(
                "growth exponent must lie in [0, 1), got {}",
                self.p
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SolverError::InvalidInput(format!("alpha must be positive, got {}", self.alpha)));
        }
        let beta_floor = 2.0 / self.alpha + 1.0;
        if !(self.beta >= beta_floor) {
            return Err(SolverError::InvalidInput(format!(
                "the hard instance needs beta >= 2/alpha + 1 = {beta_floor}, got {}",
                self.beta
            )));
        }
        if !(self.gamma3 > 1.0) {
            return Err(SolverError::InvalidInput(format!("gamma3 must exceed 1, got {}", self.gamma3)));
        }
        if !(self.delta0 >= 1.0 && self.delta_max > self.delta0) {
            return Err(SolverError::InvalidInput(format!(
                "need delta_max > delta0 >= 1, got delta0={}, delta_max={}",
                self.delta0, self.delta_max
            )));
        }
        Ok(())
    }
}

/// ⌊ε^{−2/(1−p)}⌋ with a snap-to-integer guard: when the power lands within
/// 4 ulps of an integer, that integer is used before flooring. Without the
/// guard, values like 0.1^{-2} = 100 − O(1e−14) would floor to 99.
pub fn k_eps(epsilon: f64, p: f64) -> Result<usize, SolverError> {
    if !(epsilon > 0.0 && epsilon <= 0.5) || !(0.0..1.0).contains(&p) {
        return Err(SolverError::InvalidInput(format!(
            "k_eps needs epsilon in (0, 1/2] and p in [0, 1), got epsilon={epsilon}, p={p}"
        )));
    }
    let t = epsilon.powf(-2.0 / (1.0 - p));
    if !t.is_finite() || t > MAX_KNOTS as f64 {
        return Err(SolverError::InvalidInput(format!(
            "instance would need about {t} knots, above the cap of {MAX_KNOTS}"
        )));
    }
    let r = t.round();
    let snapped = if (t - r).abs() <= 4.0 * ulp(t) { r } else { t.floor() };
    if !(snapped >= 1.0) {
        return Err(SolverError::InvalidInput(format!("degenerate instance: k = {snapped}")));
    }
    Ok(snapped as usize)
}

fn ulp(x: f64) -> f64 {
    debug_assert!(x.is_finite() && x > 0.0);
    f64::from_bits(x.to_bits() + 1) - x
}

/// One cubic piece c₀ + c₁τ + c₂τ² + c₃τ³ valid for τ ∈ (0, width].
#[derive(Clone, Copy, Debug)]
pub struct CubicPiece {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub width: f64,
}

impl CubicPiece {
    pub fn value(&self, t: f64) -> f64 {
        ((self.c3 * t + self.c2) * t + self.c1) * t + self.c0
    }

    pub fn slope(&self, t: f64) -> f64 {
        (3.0 * self.c3 * t + 2.0 * self.c2) * t + self.c1
    }
}

/// The fully precomputed instance: sequences for k ∈ {−1, …, k*+1} and one
/// cubic piece per knot interval, plus the plateaus outside.
#[derive(Clone, Debug)]
pub struct AdversarialInstance {
    params: AdversaryParams,
    k_eps: usize,
    /// w_k for k ∈ 0..=k*.
    ramp: Vec<f64>,
    /// g_k for k ∈ −1..=k*+1 (index offset 1).
    slopes: Vec<f64>,
    /// f_k for k ∈ −1..=k*+1 (index offset 1).
    values: Vec<f64>,
    /// x_k for k ∈ −1..=k*+1 (index offset 1); strictly increasing.
    knots: Vec<f64>,
    /// s_k for k ∈ −1..=k* (index offset 1).
    steps: Vec<f64>,
    /// B_k for k ∈ 0..=k*.
    curvatures: Vec<f64>,
    /// ν_k for k ∈ 0..=k*.
    step_sizes: Vec<f64>,
    /// s_{k,1} = −ν_k g_k for k ∈ 0..=k*.
    cauchy_steps: Vec<f64>,
    /// Δ_k for k ∈ 0..=k*.
    radii: Vec<f64>,
    /// Piece k covers (x_k, x_{k+1}] for k ∈ −1..=k* (index offset 1).
    pieces: Vec<CubicPiece>,
}

impl AdversarialInstance {
    /// Builds every sequence and cubic piece for the given parameters.
    pub fn build(params: &AdversaryParams) -> Result<Self, SolverError> {
        params.validate()?;
        let ke = k_eps(params.epsilon, params.p)?;
        let eps = params.epsilon;
        let n = ke + 3; // k = −1..=k*+1

        let mut ramp = vec![0.0; ke + 1];
        let mut slopes = vec![0.0; n];
        let mut values = vec![0.0; n];
        let mut knots = vec![0.0; n];
        let mut steps = vec![0.0; n - 1];
        let mut curvatures = vec![0.0; ke + 1];
        let mut step_sizes = vec![0.0; ke + 1];
        let mut cauchy_steps = vec![0.0; ke + 1];
        let mut radii = vec![0.0; ke + 1];

        for k in 0..=ke {
            ramp[k] = (ke - k) as f64 / ke as f64;
            slopes[k + 1] = -eps * (1.0 + ramp[k]);
        }
        values[1] = 8.0 * eps * eps + 4.0 / (1.0 - params.p);
        knots[1] = 0.0;
        curvatures[0] = 1.0;
        for k in 1..=ke {
            curvatures[k] = (k as f64).powf(params.p);
        }
        for k in 0..=ke {
            steps[k + 1] = -(slopes[k + 1] / curvatures[k]);
        }
        for k in 1..=ke {
            knots[k + 1] = knots[k] + steps[k];
            values[k + 1] = values[k] + slopes[k] * steps[k];
        }
        let mut delta = params.delta0;
        for k in 0..=ke {
            radii[k] = delta;
            step_sizes[k] = select_nu(delta, curvatures[k], params.alpha)?;
            cauchy_steps[k] = -(step_sizes[k] * slopes[k + 1]);
            delta = (params.gamma3 * delta).min(params.delta_max);
        }

        // Boundary rows: a unit-width lead-in piece with zero entry slope and
        // a constant-extension row past the last prescribed iterate.
        values[0] = values[1];
        slopes[0] = 0.0;
        steps[0] = 1.0;
        knots[0] = -1.0;
        slopes[ke + 2] = slopes[ke + 1];
        values[ke + 2] = values[ke + 1];
        knots[ke + 2] = knots[ke + 1] + steps[ke + 1];

        // Hermite pieces. The width is the exact gap between stored knots so
        // that evaluating a piece at its full width reproduces the right-hand
        // knot data to the last bit.
        let mut pieces = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let width = knots[i + 1] - knots[i];
            if !(width > 0.0) {
                return Err(SolverError::InvalidInput(format!(
                    "knots failed to increase at index {i}; epsilon too small for this p"
                )));
            }
            let r1 = values[i + 1] - (values[i] + slopes[i] * width);
            let r2 = slopes[i + 1] - slopes[i];
            pieces.push(CubicPiece {
                c0: values[i],
                c1: slopes[i],
                c2: (3.0 * r1 - r2 * width) / (width * width),
                c3: (r2 * width - 2.0 * r1) / (width * width * width),
                width,
            });
        }

        let inst = Self {
            params: *params,
            k_eps: ke,
            ramp,
            slopes,
            values,
            knots,
            steps,
            curvatures,
            step_sizes,
            cauchy_steps,
            radii,
            pieces,
        };
        inst.check_construction()?;
        Ok(inst)
    }

    /// Cheap O(k*) sanity checks of the prescribed sequences.
    fn check_construction(&self) -> Result<(), SolverError> {
        let ke = self.k_eps;
        let internal = |msg: String| Err(SolverError::InvalidInput(msg));
        for k in 0..=ke {
            if !(self.step(k as isize) > 0.0) {
                return internal(format!("step {k} is not positive"));
            }
            if k >= 1 && !(self.objective(k as isize) < self.objective(k as isize - 1)) {
                return internal(format!("objective values not strictly decreasing at {k}"));
            }
            if self.objective(k as isize) < 0.0 {
                return internal(format!("objective value {k} is negative"));
            }
            let g_next = self.slope(k as isize + 1);
            let g_here = self.slope(k as isize);
            if (g_next - g_here).abs() > self.step(k as isize) + 1e-15 {
                return internal(format!("slope increment exceeds step at {k}"));
            }
            if self.radius(k) < 1.0 {
                return internal(format!("radius dropped below 1 at {k}"));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &AdversaryParams {
        &self.params
    }

    pub fn k_eps(&self) -> usize {
        self.k_eps
    }

    fn off(&self, k: isize) -> usize {
        debug_assert!(k >= -1);
        (k + 1) as usize
    }

    /// f_k, defined for k ∈ −1..=k*+1.
    pub fn objective(&self, k: isize) -> f64 {
        self.values[self.off(k)]
    }

    /// g_k, defined for k ∈ −1..=k*+1.
    pub fn slope(&self, k: isize) -> f64 {
        self.slopes[self.off(k)]
    }

    /// x_k, defined for k ∈ −1..=k*+1.
    pub fn knot(&self, k: isize) -> f64 {
        self.knots[self.off(k)]
    }

    /// s_k, defined for k ∈ −1..=k*.
    pub fn step(&self, k: isize) -> f64 {
        self.steps[self.off(k)]
    }

    /// ‖B_k‖, defined for k ∈ 0..=k*.
    pub fn curvature(&self, k: usize) -> f64 {
        self.curvatures[k]
    }

    /// ν_k, defined for k ∈ 0..=k*.
    pub fn step_size(&self, k: usize) -> f64 {
        self.step_sizes[k]
    }

    /// s_{k,1}, defined for k ∈ 0..=k*.
    pub fn cauchy_step(&self, k: usize) -> f64 {
        self.cauchy_steps[k]
    }

    /// w_k, defined for k ∈ 0..=k*.
    pub fn ramp(&self, k: usize) -> f64 {
        self.ramp[k]
    }

    /// Δ_k along the all-accepting radius schedule, defined for k ∈ 0..=k*.
    pub fn radius(&self, k: usize) -> f64 {
        self.radii[k]
    }

    /// Piece k covering (x_k, x_{k+1}], defined for k ∈ −1..=k*.
    pub fn piece(&self, k: isize) -> &CubicPiece {
        &self.pieces[self.off(k)]
    }

    /// (x_{−1}, x_{k*+1}): the interval on which the objective is a true
    /// piecewise cubic; it is constant outside.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Index of the piece whose half-open interval (x_i, x_{i+1}] contains
    /// `pos`, or the plateau it falls on.
    fn locate(&self, pos: f64) -> Location {
        if pos <= self.knots[0] {
            return Location::LeftPlateau;
        }
        let j = self.knots.partition_point(|&kx| kx < pos);
        if j == self.knots.len() {
            return Location::RightPlateau;
        }
        Location::Piece(j - 1)
    }

    /// Objective value: f₀ left of the first knot, the covering cubic piece
    /// inside, f_{k*} past the last knot.
    pub fn eval_f(&self, pos: f64) -> f64 {
        match self.locate(pos) {
            Location::LeftPlateau => self.values[1],
            Location::RightPlateau => self.values[self.k_eps + 1],
            Location::Piece(i) => self.pieces[i].value(pos - self.knots[i]),
        }
    }

    /// Derivative of [`Self::eval_f`]; zero on both plateaus.
    pub fn eval_fprime(&self, pos: f64) -> f64 {
        match self.locate(pos) {
            Location::LeftPlateau | Location::RightPlateau => 0.0,
            Location::Piece(i) => self.pieces[i].slope(pos - self.knots[i]),
        }
    }

    /// Writes the knot table with its cubic coefficients as CSV. Cells that
    /// are undefined for a row (the curvature of the lead-in row, everything
    /// piece-related on the final row) are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,x,f,g,s,B,c0,c1,c2,c3")?;
        let ke = self.k_eps as isize;
        for k in -1..=ke + 1 {
            let x = self.knot(k);
            let f = self.objective(k);
            let g = self.slope(k);
            let s = if k <= ke { self.step(k).to_string() } else { String::new() };
            let b = if (0..=ke).contains(&k) { self.curvature(k as usize).to_string() } else { String::new() };
            if k <= ke {
                let p = self.piece(k);
                writeln!(out, "{k},{x},{f},{g},{s},{b},{},{},{},{}", p.c0, p.c1, p.c2, p.c3)?;
            } else {
                writeln!(out, "{k},{x},{f},{g},{s},{b},,,,")?;
            }
        }
        Ok(())
    }

    /// Wraps the instance as a solver problem: smooth, unconstrained,
    /// one-dimensional, starting at the first prescribed iterate x₀ = 0.
    pub fn problem(self: &Arc<Self>) -> Problem {
        let value = Arc::clone(self);
        let deriv = Arc::clone(self);
        Problem::unconstrained(
            1,
            Box::new(move |x: &[f64]| value.eval_f(x[0])),
            Box::new(move |x: &[f64]| vec![deriv.eval_fprime(x[0])]),
            RegularizerSpec::zero(),
            vec![0.0],
        )
        .expect("instance problem construction cannot fail")
    }
}

enum Location {
    LeftPlateau,
    RightPlateau,
    Piece(usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_params(epsilon: f64, p: f64) -> AdversaryParams {
        AdversaryParams::new(epsilon, p, 1e16, 1e16)
    }

    #[test]
    fn iteration_budgets_for_reference_tolerances() {
        assert_eq!(k_eps(0.1, 0.1).unwrap(), 166);
        assert_eq!(k_eps(0.05, 0.1).unwrap(), 778);
        assert_eq!(k_eps(1.0 / 3.0, 0.1).unwrap(), 11);
        assert_eq!(k_eps(0.5, 0.0).unwrap(), 4);
        // The snap guard keeps exact powers from flooring one short.
        assert_eq!(k_eps(0.1, 0.0).unwrap(), 100);
        assert_eq!(k_eps(0.05, 0.5).unwrap(), 160_000);
        assert!(k_eps(0.7, 0.0).is_err());
        assert!(k_eps(0.1, 1.0).is_err());
    }

    #[test]
    fn initial_values_for_one_third() {
        let inst = AdversarialInstance::build(&std_params(1.0 / 3.0, 0.1)).unwrap();
        assert_eq!(inst.k_eps(), 11);
        assert!((inst.objective(0) - (8.0 / 9.0 + 4.0 / 0.9)).abs() < 1e-12);
        assert_eq!(inst.slope(0), -2.0 / 3.0);
        assert_eq!(inst.step(0), 2.0 / 3.0);
        assert_eq!(inst.knot(0), 0.0);
        assert_eq!(inst.curvature(0), 1.0);
        assert_eq!(inst.radius(0), 1.0);
    }

    #[test]
    fn boundary_rows() {
        let inst = AdversarialInstance::build(&std_params(0.25, 0.1)).unwrap();
        let ke = inst.k_eps() as isize;
        assert_eq!(inst.objective(-1), inst.objective(0));
        assert_eq!(inst.slope(-1), 0.0);
        assert_eq!(inst.step(-1), 1.0);
        assert_eq!(inst.knot(-1), -1.0);
        assert_eq!(inst.objective(ke + 1), inst.objective(ke));
        assert_eq!(inst.slope(ke + 1), inst.slope(ke));
        // Terminal slope hits the tolerance exactly.
        assert_eq!(inst.slope(ke), -0.25);
    }

    #[test]
    fn beta_floor_is_enforced_with_the_bound_in_the_message() {
        let bad = AdversaryParams::new(0.25, 0.1, 1.0, 2.5);
        let err = AdversarialInstance::build(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("beta >= 2/alpha + 1 = 3"), "message was: {msg}");
    }

    #[test]
    fn plateaus_and_knot_interpolation() {
        let inst = AdversarialInstance::build(&std_params(1.0 / 3.0, 0.1)).unwrap();
        let ke = inst.k_eps() as isize;
        assert_eq!(inst.eval_f(-5.0), inst.objective(0));
        assert_eq!(inst.eval_fprime(-5.0), 0.0);
        let (_, hi) = inst.domain();
        assert_eq!(inst.eval_f(hi + 1.0), inst.objective(ke));
        assert_eq!(inst.eval_fprime(hi + 1.0), 0.0);
        for k in 0..=ke {
            let x = inst.knot(k);
            assert!((inst.eval_f(x) - inst.objective(k)).abs() <= 1e-12);
            assert!((inst.eval_fprime(x) - inst.slope(k)).abs() <= 1e-12);
        }
    }

    #[test]
    fn coefficients_match_a_cramer_solve() {
        let inst = AdversarialInstance::build(&std_params(0.2, 0.3)).unwrap();
        let ke = inst.k_eps() as isize;
        for k in -1..=ke {
            let p = inst.piece(k);
            let w = p.width;
            let r1 = inst.objective(k + 1) - (inst.objective(k) + inst.slope(k) * w);
            let r2 = inst.slope(k + 1) - inst.slope(k);
            // Cramer on [w² w³; 2w 3w²][c2 c3]ᵀ = [r1 r2]ᵀ.
            let det = w * w * (3.0 * w * w) - w * w * w * (2.0 * w);
            let c2 = (r1 * (3.0 * w * w) - w * w * w * r2) / det;
            let c3 = (w * w * r2 - 2.0 * w * r1) / det;
            assert!((c2 - p.c2).abs() <= 1e-12 * (1.0 + p.c2.abs()), "piece {k}");
            assert!((c3 - p.c3).abs() <= 1e-12 * (1.0 + p.c3.abs()), "piece {k}");
        }
    }

    #[test]
    fn midpoint_matches_hermite_basis_oracle() {
        let inst = AdversarialInstance::build(&std_params(1.0 / 3.0, 0.1)).unwrap();
        let ke = inst.k_eps() as isize;
        for k in -1..=ke {
            let p = inst.piece(k);
            let w = p.width;
            let u = 0.5;
            let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
            let h10 = u * u * u - 2.0 * u * u + u;
            let h01 = -2.0 * u * u * u + 3.0 * u * u;
            let h11 = u * u * u - u * u;
            let oracle = h00 * inst.objective(k)
                + h10 * w * inst.slope(k)
                + h01 * inst.objective(k + 1)
                + h11 * w * inst.slope(k + 1);
            let mid = inst.knot(k) + w * 0.5;
            assert!((inst.eval_f(mid) - oracle).abs() <= 1e-10, "piece {k}");
        }
    }

    #[test]
    fn csv_has_one_row_per_knot() {
        let inst = AdversarialInstance::build(&std_params(0.5, 0.0)).unwrap();
        let mut buf = Vec::new();
        inst.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,x,f,g,s,B,c0,c1,c2,c3");
        assert_eq!(lines.len(), 1 + inst.k_eps() + 3);
        // The first data row is the lead-in knot with no curvature cell.
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "-1");
        assert_eq!(first[1], "-1");
        assert_eq!(first[5], "");
        // Every stored number parses back to the same value.
        let row0: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(row0[1].parse::<f64>().unwrap(), inst.knot(0));
        assert_eq!(row0[2].parse::<f64>().unwrap(), inst.objective(0));
    }
}
