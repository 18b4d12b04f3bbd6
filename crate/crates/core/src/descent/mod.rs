//! Per-mode preconditioned gradient descent on reduced Fourier coefficients.
//!
//! Each slot moves by `δa = −δτ_k ∂S/∂a`. With a uniform step the
//! `π m k²` curvature of the kinetic term makes high harmonics unstable
//! unless `δτ < 2/(π m k_max²)`; the preconditioned schedule
//! `δτ_k = δ/(m k²)` removes the `k` dependence (`δ < 2/π`). Negative
//! entries in a custom schedule ascend along those harmonics, which can
//! settle on saddle points of the action.

mod naive;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::action::{evaluate, ActionReport, QuadratureGrid};
use crate::dynamics::residual;
use crate::error::{Error, Result};
use crate::symmetry::{OrbitModel, ReducedParams, Reduction};

pub use naive::{naive_stability_bound, naive_time_descent, NaiveDiagnostic, TimePaths};

/// Default preconditioned step.
///
/// Below `2/(3π)`: for `α = −1` the curvature of the overall scale mode is
/// three times its kinetic part, which tightens the kinetic bound `2/π`.
pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentSchedule {
    /// `δτ_k = δτ` for every harmonic.
    Uniform(f64),
    /// `δτ_k = δ / (m k²)`, with `m` the slot's effective inertia.
    Preconditioned(f64),
    /// Explicit `δτ_k` per harmonic; entries may be negative.
    Custom(BTreeMap<usize, f64>),
}

impl Default for DescentSchedule {
    fn default() -> Self {
        DescentSchedule::Preconditioned(DEFAULT_DELTA)
    }
}

impl DescentSchedule {
    /// Preconditioned steps with the sign flipped on the listed harmonics.
    pub fn saddle(delta: f64, reduction: &Reduction, ascend: &[usize]) -> Self {
        let mut table = BTreeMap::new();
        for slot in 0..reduction.len() {
            let k = reduction.slot_harmonic(slot);
            let sign = if ascend.contains(&k) { -1.0 } else { 1.0 };
            table.insert(k, sign * delta / (k * k) as f64);
        }
        DescentSchedule::Custom(table)
    }

    pub fn validate(&self, reduction: &Reduction) -> Result<()> {
        match self {
            DescentSchedule::Uniform(d) | DescentSchedule::Preconditioned(d) => {
                if *d == 0.0 || !d.is_finite() {
                    return Err(Error::InvalidArgument(format!("step size {d} must be finite and nonzero")));
                }
            }
            DescentSchedule::Custom(table) => {
                if table.values().all(|&v| v == 0.0) || table.values().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("custom schedule needs a finite nonzero entry".into()));
                }
                for slot in 0..reduction.len() {
                    let k = reduction.slot_harmonic(slot);
                    if !table.contains_key(&k) {
                        return Err(Error::InvalidArgument(format!("custom schedule has no entry for k = {k}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `δτ` applied to one slot.
    pub fn slot_step(&self, reduction: &Reduction, slot: usize) -> f64 {
        let k = reduction.slot_harmonic(slot) as f64;
        match self {
            DescentSchedule::Uniform(d) => *d,
            DescentSchedule::Preconditioned(d) => d / (reduction.slot_inertia(slot) * k * k),
            DescentSchedule::Custom(table) => table.get(&(k as usize)).copied().unwrap_or(0.0),
        }
    }
}

/// One explicit step `a ← a − δτ_k ∂S/∂a`.
pub fn step(params: &ReducedParams, gradient: &[f64], schedule: &DescentSchedule) -> Result<ReducedParams> {
    if gradient.len() != params.len() {
        return Err(Error::LayoutMismatch);
    }
    let red = params.reduction();
    let values = params
        .values
        .iter()
        .zip(gradient)
        .enumerate()
        .map(|(slot, (&a, &g))| a - schedule.slot_step(red, slot) * g)
        .collect();
    params.with_values(values)
}

/// Largest stable step in the kinetic limit; `mass` is the slot inertia.
///
/// Uniform: `δτ < 2/(π m k_max²)`. Preconditioned: `δ < 2/π`. Custom: the
/// largest factor by which the table may be scaled.
pub fn stability_bound(schedule: &DescentSchedule, k_max: usize, mass: f64) -> f64 {
    let k2 = (k_max * k_max) as f64;
    match schedule {
        DescentSchedule::Uniform(_) => 2.0 / (PI * mass * k2),
        DescentSchedule::Preconditioned(_) => 2.0 / PI,
        DescentSchedule::Custom(table) => table
            .iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|(&k, &v)| 2.0 / (PI * mass * (k * k) as f64 * v.abs()))
            .fold(f64::INFINITY, f64::min),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopCriteria {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub escape_radius: f64,
    /// Emit a progress line every this many iterations (0 disables).
    pub log_interval: usize,
    /// Converged runs count as solutions only if `residual <= certify_tol`.
    pub certify_tol: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self { grad_tol: 1e-10, max_iters: 200_000, escape_radius: 50.0, log_interval: 1000, certify_tol: 1e-5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    Collision { i: usize, j: usize, t: f64 },
    Escape { body: usize },
    MaxIters,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub params: ReducedParams,
    pub iterations: usize,
    pub action_trace: Vec<f64>,
    pub grad_norm: f64,
    /// Equation-of-motion residual on the run's grid, for converged runs.
    pub residual: Option<f64>,
    /// Converged with `residual <= certify_tol`.
    pub certified: bool,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    /// True when no step increased the action by more than `slack`.
    pub fn action_nonincreasing(&self, slack: f64) -> bool {
        self.action_trace.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

pub fn run(
    model: &OrbitModel,
    params0: &ReducedParams,
    schedule: &DescentSchedule,
    stop: &StopCriteria,
    grid: &QuadratureGrid,
) -> Result<RunResult> {
    run_with_observer(model, params0, schedule, stop, grid, |_, _, _| {})
}

/// As [`run`], calling `observer(iteration, params, report)` before each step.
pub fn run_with_observer(
    model: &OrbitModel,
    params0: &ReducedParams,
    schedule: &DescentSchedule,
    stop: &StopCriteria,
    grid: &QuadratureGrid,
    mut observer: impl FnMut(usize, &ReducedParams, &ActionReport),
) -> Result<RunResult> {
    model.check_params(params0)?;
    schedule.validate(model.reduction())?;
    let mut params = params0.clone();
    let mut trace = Vec::new();
    let mut iter = 0;
    loop {
        let report = match evaluate(model, &params, grid) {
            Ok(r) => r,
            Err(Error::Collision { i, j, t, .. }) => {
                log::info!("iter {iter}: collision between bodies {i} and {j} at t = {t:.6}");
                return Ok(finish(Outcome::Collision { i, j, t }, params, iter, trace, f64::NAN, None));
            }
            Err(e) => return Err(e),
        };
        trace.push(report.action);
        observer(iter, &params, &report);
        if stop.log_interval > 0 && iter % stop.log_interval == 0 {
            log::info!(
                "iter {iter} S {:.12e} grad {:.3e} dmin {:.6e}",
                report.action,
                report.grad_norm,
                report.min_distance
            );
        }
        if report.max_radius > stop.escape_radius || !report.grad_norm.is_finite() {
            let body = farthest_body(model, &params, grid)?;
            log::info!("iter {iter}: body {body} escaped (radius {:.3e})", report.max_radius);
            return Ok(finish(Outcome::Escape { body }, params, iter, trace, report.grad_norm, None));
        }
        if report.grad_norm <= stop.grad_tol {
            let res = residual(model, &params, grid)?.max_abs;
            log::info!("iter {iter}: converged, S {:.12e} residual {res:.3e}", report.action);
            let mut out = finish(Outcome::Converged, params, iter, trace, report.grad_norm, Some(res));
            out.certified = res <= stop.certify_tol;
            if !out.certified {
                log::warn!(
                    "residual {res:.3e} exceeds {:.1e}: truncation-limited at k_max = {}, raise k_max to certify",
                    stop.certify_tol,
                    model.k_max()
                );
            }
            return Ok(out);
        }
        if iter >= stop.max_iters {
            return Ok(finish(Outcome::MaxIters, params, iter, trace, report.grad_norm, None));
        }
        params = step(&params, &report.gradient, schedule)?;
        iter += 1;
    }
}

fn finish(
    outcome: Outcome,
    params: ReducedParams,
    iterations: usize,
    action_trace: Vec<f64>,
    grad_norm: f64,
    residual: Option<f64>,
) -> RunResult {
    RunResult { outcome, params, iterations, action_trace, grad_norm, residual, certified: false }
}

fn farthest_body(model: &OrbitModel, params: &ReducedParams, grid: &QuadratureGrid) -> Result<usize> {
    let s = model.sample(params, grid)?;
    let mut best = (0, f64::NEG_INFINITY);
    for node in 0..s.n_nodes() {
        for (i, x) in s.positions_at(node).iter().enumerate() {
            let r = x.norm();
            if !(r <= best.1) {
                best = (i, r);
            }
        }
    }
    Ok(best.0)
}
