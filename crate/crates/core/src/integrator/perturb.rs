use std::f64::consts::TAU;
use std::ops::ControlFlow;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::align::rigid_deviation;
use super::{extract_ics, integrate_with, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::symmetry::{OrbitModel, ReducedParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbOptions {
    pub dt: f64,
    pub samples_per_period: usize,
    /// Bound on the orbital deviation; `None` means 100× the largest applied
    /// displacement.
    pub envelope: Option<f64>,
    /// Reference configurations per period for the phase search.
    pub phase_grid: usize,
    pub escape_radius: f64,
    /// Stop integrating at the first envelope exit.
    pub stop_on_exit: bool,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            samples_per_period: 64,
            envelope: None,
            phase_grid: 256,
            escape_radius: 50.0,
            stop_on_exit: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitCause {
    Envelope,
    Collision { i: usize, j: usize },
    Escape,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    /// `period` is the time of the first exit in units of the orbit period.
    Exited { period: f64, cause: ExitCause },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// Displacement applied to each body at `t = 0`.
    pub deviation: Vec<Vector3<f64>>,
    pub n_periods: usize,
    pub envelope: f64,
    /// Largest deviation from the Fourier orbit after the best time shift,
    /// rotation and translation; this drives the verdict.
    pub max_deviation: f64,
    /// Largest `max_i |x_i(t) − x_i^F(t)|` at matching times.
    pub max_matched_deviation: f64,
    pub verdict: Verdict,
    /// `(t / T, orbital deviation, matched deviation)` per sample.
    pub series: Vec<[f64; 3]>,
    /// Body that received the largest displacement.
    pub tracked_body: usize,
    /// Positions of the tracked body at each sample.
    pub section: Vec<Vector3<f64>>,
    /// `max |z|` over all bodies and samples.
    pub z_extent: f64,
}

impl PerturbationReport {
    pub fn bounded(&self) -> bool {
        self.verdict == Verdict::Bounded
    }

    /// Keeps the earliest exit.
    fn exit_first(&mut self, period: f64, cause: ExitCause) {
        if self.verdict == Verdict::Bounded {
            self.verdict = Verdict::Exited { period, cause };
        }
    }

    /// The verdict agrees with the recorded maximum.
    pub fn is_consistent(&self) -> bool {
        match self.verdict {
            Verdict::Bounded => self.max_deviation < self.envelope,
            Verdict::Exited { cause: ExitCause::Envelope, .. } => self.max_deviation >= self.envelope,
            Verdict::Exited { .. } => true,
        }
    }
}

struct PhaseSearch<'a> {
    model: &'a OrbitModel,
    params: &'a ReducedParams,
    masses: Vec<f64>,
    grid: Vec<Vec<Vector3<f64>>>,
}

impl<'a> PhaseSearch<'a> {
    fn new(model: &'a OrbitModel, params: &'a ReducedParams, n: usize) -> Result<Self> {
        let times: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let s = model.sample_times(params, &times)?;
        let grid = (0..n).map(|j| s.positions_at(j).to_vec()).collect();
        Ok(Self { model, params, masses: model.masses(), grid })
    }

    fn at(&self, x: &[Vector3<f64>], s: f64) -> Result<f64> {
        let (q, _) = self.model.state_at(self.params, s)?;
        Ok(rigid_deviation(x, &q, &self.masses))
    }

    /// `min_s` of the rigid deviation between `x` and the orbit at phase `s`.
    fn min_over_phase(&self, x: &[Vector3<f64>]) -> Result<f64> {
        let n = self.grid.len();
        let (mut best, mut best_d) = (0, f64::INFINITY);
        for (j, q) in self.grid.iter().enumerate() {
            let d = rigid_deviation(x, q, &self.masses);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        let h = TAU / n as f64;
        let (mut a, mut b) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (self.at(x, c)?, self.at(x, d)?);
        for _ in 0..40 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.at(x, c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.at(x, d)?;
            }
        }
        Ok(best_d.min(fc).min(fd))
    }
}

/// Integrate the orbit with `deviation` added to the initial positions for
/// `n_periods` and measure how far it strays from the Fourier orbit.
pub fn perturb_and_track(
    model: &OrbitModel,
    params: &ReducedParams,
    deviation: &[Vector3<f64>],
    n_periods: usize,
    opts: &PerturbOptions,
) -> Result<PerturbationReport> {
    if deviation.len() != model.n_bodies() {
        return Err(Error::LayoutMismatch);
    }
    if deviation.iter().any(|d| d.iter().any(|c| !c.is_finite())) {
        return Err(Error::InvalidArgument("deviation must be finite".into()));
    }
    if n_periods == 0 || opts.samples_per_period == 0 || opts.phase_grid < 3 {
        return Err(Error::InvalidArgument("need n_periods, samples_per_period >= 1 and phase_grid >= 3".into()));
    }
    let size = deviation.iter().map(|d| d.amax()).fold(0.0, f64::max);
    let envelope = opts.envelope.unwrap_or(100.0 * size);
    let tracked_body = (0..deviation.len())
        .max_by(|&a, &b| deviation[a].norm().total_cmp(&deviation[b].norm()))
        .unwrap_or(0);
    let masses = model.masses();
    let search = PhaseSearch::new(model, params, opts.phase_grid)?;
    let mut state = extract_ics(model, params)?;
    for (x, d) in state.positions.iter_mut().zip(deviation) {
        *x += d;
    }
    let horizon = TAU * n_periods as f64;
    let steps_per_period = (TAU / opts.dt).round().max(1.0) as usize;
    let stride = (steps_per_period / opts.samples_per_period).max(1);

    let mut report = PerturbationReport {
        deviation: deviation.to_vec(),
        n_periods,
        envelope,
        max_deviation: 0.0,
        max_matched_deviation: 0.0,
        verdict: Verdict::Bounded,
        series: Vec::new(),
        tracked_body,
        section: Vec::new(),
        z_extent: 0.0,
    };
    let mut failure = None;
    let result = integrate_with(&state, &masses, &model.potential, opts.dt, horizon, stride, |sample| {
        let s = &sample.state;
        let period = s.t / TAU;
        if s.max_radius() > opts.escape_radius {
            report.exit_first(period, ExitCause::Escape);
            return ControlFlow::Break(());
        }
        let orbital = match search.min_over_phase(&s.positions) {
            Ok(d) => d,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        let matched = match model.state_at(params, s.t.rem_euclid(TAU)) {
            Ok((q, _)) => s.positions.iter().zip(&q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max),
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        report.max_deviation = report.max_deviation.max(orbital);
        report.max_matched_deviation = report.max_matched_deviation.max(matched);
        report.series.push([period, orbital, matched]);
        report.section.push(s.positions[tracked_body]);
        report.z_extent = s.positions.iter().map(|x| x.z.abs()).fold(report.z_extent, f64::max);
        if orbital >= envelope {
            report.exit_first(period, ExitCause::Envelope);
            if opts.stop_on_exit {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    match result {
        Ok(_) => {}
        Err(Error::Collision { i, j, t, .. }) => {
            report.exit_first(t / TAU, ExitCause::Collision { i, j });
        }
        Err(Error::NonFinite(t)) => {
            report.exit_first(t / TAU, ExitCause::NonFinite);
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Independent perturbation runs on separate threads, in input order.
pub fn perturb_many(
    model: &OrbitModel,
    params: &ReducedParams,
    deviations: &[Vec<Vector3<f64>>],
    n_periods: usize,
    opts: &PerturbOptions,
) -> Vec<Result<PerturbationReport>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = deviations
            .iter()
            .map(|d| scope.spawn(move || perturb_and_track(model, params, d, n_periods, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("perturbation worker panicked")).collect()
    })
}
