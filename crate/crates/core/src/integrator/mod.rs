//! Direct integration of the equations of motion with fixed-step RK4.
//!
//! Used to check converged Fourier orbits independently: extract the state at
//! `t = 0`, integrate a period, compare. Perturbation studies live in
//! [`perturb_and_track`].

mod align;
mod perturb;

use std::f64::consts::TAU;
use std::io::Write;
use std::ops::ControlFlow;

use nalgebra::Vector3;

use crate::dynamics::{accumulate_forces, observables, PotentialSpec};
use crate::error::{Error, Result};
use crate::symmetry::{OrbitModel, ReducedParams};

pub use align::{best_rotation, rigid_deviation};
pub use perturb::{perturb_and_track, perturb_many, ExitCause, PerturbOptions, PerturbationReport, Verdict};

/// Default step, `2π·10⁻⁴`.
pub const DEFAULT_DT: f64 = TAU * 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState {
    pub positions: Vec<Vector3<f64>>,
    pub velocities: Vec<Vector3<f64>>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(positions: Vec<Vector3<f64>>, velocities: Vec<Vector3<f64>>, t: f64) -> Result<Self> {
        if positions.len() != velocities.len() {
            return Err(Error::LayoutMismatch);
        }
        let s = Self { positions, velocities, t };
        if !s.is_finite() {
            return Err(Error::NonFinite(t));
        }
        Ok(s)
    }

    pub fn n_bodies(&self) -> usize {
        self.positions.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.positions.iter().chain(&self.velocities).all(|v| v.iter().all(|c| c.is_finite()))
    }

    /// Max-norm distance in phase space.
    pub fn distance(&self, other: &PhaseState) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .chain(self.velocities.iter().zip(&other.velocities))
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }

    pub fn max_radius(&self) -> f64 {
        self.positions.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// State of the Fourier orbit at `t = 0`, at physical scale.
pub fn extract_ics(model: &OrbitModel, params: &ReducedParams) -> Result<PhaseState> {
    let (positions, velocities) = model.state_at(params, 0.0)?;
    Ok(PhaseState { positions, velocities, t: 0.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub state: PhaseState,
    pub energy: f64,
    pub angular_momentum: Vector3<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Step actually taken: the horizon divided by a whole number of steps.
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &PhaseState {
        &self.samples.last().expect("trajectory has at least the initial sample").state
    }

    /// `max |E(t) − E(0)| / |E(0)|` over the samples.
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE)
    }

    /// `max |J(t) − J(0)|_∞` over the samples.
    pub fn angular_momentum_drift(&self) -> f64 {
        let j0 = self.samples[0].angular_momentum;
        self.samples.iter().map(|s| (s.angular_momentum - j0).amax()).fold(0.0, f64::max)
    }

    /// One row per sample: `t`, then `x,y,z,vx,vy,vz` per body, then `E,Jx,Jy,Jz`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let nb = self.samples.first().map_or(0, |s| s.state.n_bodies());
        let mut header = vec!["t".to_string()];
        for i in 1..=nb {
            for c in ["x", "y", "z", "vx", "vy", "vz"] {
                header.push(format!("{c}{i}"));
            }
        }
        header.extend(["E", "Jx", "Jy", "Jz"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for s in &self.samples {
            let mut row = vec![s.state.t];
            for (x, v) in s.state.positions.iter().zip(&s.state.velocities) {
                row.extend(x.iter().chain(v.iter()));
            }
            row.push(s.energy);
            row.extend(s.angular_momentum.iter());
            w.write_record(row.iter().map(|v| format!("{v:.17e}"))).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Classical RK4 for `ẍ_i = F_i / m_i` with reusable scratch buffers.
pub struct Rk4<'a> {
    masses: &'a [f64],
    spec: &'a PotentialSpec,
    k: [(Vec<Vector3<f64>>, Vec<Vector3<f64>>); 4],
    tmp_x: Vec<Vector3<f64>>,
    tmp_v: Vec<Vector3<f64>>,
    force: Vec<Vector3<f64>>,
}

impl<'a> Rk4<'a> {
    pub fn new(masses: &'a [f64], spec: &'a PotentialSpec) -> Self {
        let z = vec![Vector3::zeros(); masses.len()];
        let pair = (z.clone(), z.clone());
        Self {
            masses,
            spec,
            k: [pair.clone(), pair.clone(), pair.clone(), pair],
            tmp_x: z.clone(),
            tmp_v: z.clone(),
            force: z,
        }
    }

    fn deriv(&mut self, stage: usize, t: f64) -> Result<()> {
        accumulate_forces(self.spec, self.masses, &self.tmp_x, t, &mut self.force)?;
        let (dx, dv) = &mut self.k[stage];
        dx.copy_from_slice(&self.tmp_v);
        for ((a, f), m) in dv.iter_mut().zip(&self.force).zip(self.masses) {
            *a = f / *m;
        }
        Ok(())
    }

    /// Advance `state` by `dt`.
    pub fn step(&mut self, state: &mut PhaseState, dt: f64) -> Result<()> {
        let t = state.t;
        let offsets = [0.0, 0.5, 0.5, 1.0];
        for stage in 0..4 {
            let c = offsets[stage] * dt;
            for i in 0..state.n_bodies() {
                if stage == 0 {
                    self.tmp_x[i] = state.positions[i];
                    self.tmp_v[i] = state.velocities[i];
                } else {
                    let (px, pv) = &self.k[stage - 1];
                    self.tmp_x[i] = state.positions[i] + c * px[i];
                    self.tmp_v[i] = state.velocities[i] + c * pv[i];
                }
            }
            self.deriv(stage, t + c)?;
        }
        for i in 0..state.n_bodies() {
            let dx = self.k[0].0[i] + 2.0 * self.k[1].0[i] + 2.0 * self.k[2].0[i] + self.k[3].0[i];
            let dv = self.k[0].1[i] + 2.0 * self.k[1].1[i] + 2.0 * self.k[2].1[i] + self.k[3].1[i];
            state.positions[i] += dt / 6.0 * dx;
            state.velocities[i] += dt / 6.0 * dv;
        }
        state.t = t + dt;
        if !state.is_finite() {
            return Err(Error::NonFinite(state.t));
        }
        Ok(())
    }
}

fn step_count(dt: f64, horizon: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon = {horizon} must be non-negative")));
    }
    Ok(((horizon / dt).round() as usize).max(usize::from(horizon > 0.0)))
}

/// Integrate for `horizon`, recording every `stride` steps plus the endpoints.
///
/// `dt` is adjusted so that a whole number of steps spans the horizon.
pub fn integrate(
    state: &PhaseState,
    masses: &[f64],
    spec: &PotentialSpec,
    dt: f64,
    horizon: f64,
    stride: usize,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let (dt, steps) = integrate_with(state, masses, spec, dt, horizon, stride, |s| {
        samples.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(Trajectory { samples, dt, steps })
}

/// As [`integrate`], streaming samples to `observe`, which may stop early.
/// Returns the step taken and the number of steps completed.
pub fn integrate_with(
    state: &PhaseState,
    masses: &[f64],
    spec: &PotentialSpec,
    dt: f64,
    horizon: f64,
    stride: usize,
    mut observe: impl FnMut(Sample) -> ControlFlow<()>,
) -> Result<(f64, usize)> {
    if masses.len() != state.n_bodies() {
        return Err(Error::LayoutMismatch);
    }
    let steps = step_count(dt, horizon)?;
    let h = if steps == 0 { dt } else { horizon / steps as f64 };
    let stride = stride.max(1);
    let t0 = state.t;
    let mut cur = state.clone();
    let mut rk = Rk4::new(masses, spec);
    let sample = |s: &PhaseState| -> Result<Sample> {
        let obs = observables(spec, masses, &s.positions, &s.velocities)?;
        Ok(Sample { state: s.clone(), energy: obs.energy, angular_momentum: obs.angular_momentum })
    };
    if observe(sample(&cur)?).is_break() {
        return Ok((h, 0));
    }
    for n in 1..=steps {
        rk.step(&mut cur, h)?;
        cur.t = t0 + n as f64 * h;
        if n % stride == 0 || n == steps {
            if observe(sample(&cur)?).is_break() {
                return Ok((h, n));
            }
        }
    }
    Ok((h, steps))
}

/// Final state only, without sampling observables.
pub fn propagate(state: &PhaseState, masses: &[f64], spec: &PotentialSpec, dt: f64, horizon: f64) -> Result<PhaseState> {
    let steps = step_count(dt, horizon)?;
    let h = if steps == 0 { dt } else { horizon / steps as f64 };
    let t0 = state.t;
    let mut cur = state.clone();
    let mut rk = Rk4::new(masses, spec);
    for n in 1..=steps {
        rk.step(&mut cur, h)?;
        cur.t = t0 + n as f64 * h;
    }
    Ok(cur)
}

/// Max-norm phase-space mismatch after integrating one period from the
/// extracted initial conditions.
pub fn return_error(model: &OrbitModel, params: &ReducedParams, dt: f64) -> Result<f64> {
    let s0 = extract_ics(model, params)?;
    let s1 = propagate(&s0, &model.masses(), &model.potential, dt, TAU)?;
    Ok(s1.distance(&s0))
}

/// `|y(dt) − y(dt/2)| / |y(dt/2) − y(dt/4)|` at the end of the horizon;
/// close to 16 for a fourth-order scheme.
pub fn order_ratio(state: &PhaseState, masses: &[f64], spec: &PotentialSpec, dt: f64, horizon: f64) -> Result<f64> {
    let a = propagate(state, masses, spec, dt, horizon)?;
    let b = propagate(state, masses, spec, dt / 2.0, horizon)?;
    let c = propagate(state, masses, spec, dt / 4.0, horizon)?;
    Ok(a.distance(&b) / b.distance(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::tests::two_body;
    use approx::assert_relative_eq;

    fn circle_state() -> (PhaseState, Vec<f64>) {
        let (model, params) = two_body(0.25f64.powf(1.0 / 3.0));
        (extract_ics(&model, &params).unwrap(), model.masses())
    }

    #[test]
    fn extract_matches_fourier_state_exactly() {
        let (model, params) = two_body(0.7);
        let s = extract_ics(&model, &params).unwrap();
        let (x, v) = model.state_at(&params, 0.0).unwrap();
        assert_eq!(s.positions, x);
        assert_eq!(s.velocities, v);
    }

    #[test]
    fn circular_two_body_returns() {
        let (s0, m) = circle_state();
        let traj = integrate(&s0, &m, &PotentialSpec::newtonian(), DEFAULT_DT, TAU, 1000).unwrap();
        assert_eq!(traj.steps, 10_000);
        assert_eq!(traj.samples.len(), 11);
        assert!(traj.final_state().distance(&s0) <= 1e-8, "{}", traj.final_state().distance(&s0));
        assert!(traj.relative_energy_drift() <= 1e-9);
        assert!(traj.angular_momentum_drift() <= 1e-9);
    }

    #[test]
    fn fourth_order_convergence() {
        let (mut s0, m) = circle_state();
        // eccentric orbit so the error is not a pure phase shift
        s0.velocities.iter_mut().for_each(|v| *v *= 0.8);
        let r = order_ratio(&s0, &m, &PotentialSpec::newtonian(), TAU / 800.0, TAU).unwrap();
        assert!((12.0..=20.0).contains(&r), "{r}");
    }

    #[test]
    fn csv_layout() {
        let (s0, m) = circle_state();
        let traj = integrate(&s0, &m, &PotentialSpec::newtonian(), TAU / 100.0, TAU, 50).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,x1,y1,z1,vx1,vy1,vz1,x2,y2,z2,vx2,vy2,vz2,E,Jx,Jy,Jz");
        assert_eq!(lines[1].split(',').count(), 17);
        let t_end: f64 = lines[3].split(',').next().unwrap().parse().unwrap();
        assert_relative_eq!(t_end, TAU, max_relative = 1e-15);
    }

    #[test]
    fn collision_reported() {
        let s = PhaseState::new(
            vec![Vector3::new(5e-10, 0.0, 0.0), Vector3::new(-5e-10, 0.0, 0.0)],
            vec![Vector3::zeros(); 2],
            0.0,
        )
        .unwrap();
        let err = integrate(&s, &[1.0, 1.0], &PotentialSpec::newtonian(), 1e-3, 1.0, 1).unwrap_err();
        assert!(matches!(err, Error::Collision { i: 0, j: 1, .. }), "{err:?}");
    }

    #[test]
    fn bad_step_rejected() {
        let (s0, m) = circle_state();
        assert!(integrate(&s0, &m, &PotentialSpec::newtonian(), 0.0, TAU, 1).is_err());
        assert!(integrate(&s0, &m, &PotentialSpec::newtonian(), -1.0, TAU, 1).is_err());
    }
}
