//! Homogeneous pair potentials, forces and physical observables.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::action::QuadratureGrid;
use crate::error::{Error, Result};
use crate::fourier::fill_harmonics;
use crate::symmetry::{OrbitModel, ReducedParams};

/// Pairs closer than this are reported as a collision.
pub const DEFAULT_COLLISION_THRESHOLD: f64 = 1e-8;

/// `V_ij = -G m_i m_j r^α` for `α < 0`, `+G m_i m_j r^α` for `0 < α < 2`;
/// attractive in both cases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub alpha: f64,
    pub g: f64,
    pub softening: f64,
    pub collision_threshold: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::newtonian()
    }
}

impl PotentialSpec {
    pub fn new(alpha: f64, g: f64) -> Result<Self> {
        if !(alpha < 2.0) || alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidExponent(alpha));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidArgument(format!("coupling G = {g} must be finite and non-negative")));
        }
        Ok(Self {
            alpha,
            g,
            softening: 0.0,
            collision_threshold: DEFAULT_COLLISION_THRESHOLD,
        })
    }

    pub fn newtonian() -> Self {
        Self::new(-1.0, 1.0).unwrap()
    }

    pub fn strong_force() -> Self {
        Self::new(-2.0, 1.0).unwrap()
    }

    /// Free particles (`G = 0`).
    pub fn free() -> Self {
        Self::new(-1.0, 0.0).unwrap()
    }

    pub fn with_softening(mut self, eps: f64) -> Self {
        self.softening = eps;
        self
    }

    /// Pair potential and `dV/dr` for unit masses.
    #[inline]
    fn pair(&self, r2: f64) -> (f64, f64) {
        let r2 = r2 + self.softening * self.softening;
        let sign = if self.alpha < 0.0 { -1.0 } else { 1.0 };
        if self.alpha == -1.0 {
            let inv = 1.0 / r2.sqrt();
            (-self.g * inv, self.g * inv * inv)
        } else {
            let r = r2.sqrt();
            let ra = r.powf(self.alpha);
            (sign * self.g * ra, sign * self.g * self.alpha * ra / r)
        }
    }
}

/// Outcome of one pairwise force sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceSweep {
    pub potential: f64,
    pub min_distance: f64,
}

/// Overwrite `out` with the forces `F_i = -∂V/∂x_i`; returns the total
/// potential. `t` is only used to label a collision.
pub fn accumulate_forces(
    spec: &PotentialSpec,
    masses: &[f64],
    positions: &[Vector3<f64>],
    t: f64,
    out: &mut [Vector3<f64>],
) -> Result<ForceSweep> {
    let n = positions.len();
    debug_assert_eq!(masses.len(), n);
    debug_assert_eq!(out.len(), n);
    out.iter_mut().for_each(|f| *f = Vector3::zeros());
    let mut potential = 0.0;
    let mut min_d2 = f64::INFINITY;
    let thr2 = spec.collision_threshold * spec.collision_threshold;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = positions[j] - positions[i];
            let r2 = d.norm_squared();
            if r2 < thr2 || !r2.is_finite() {
                return Err(Error::Collision { i, j, t, distance: r2.sqrt() });
            }
            min_d2 = min_d2.min(r2);
            let mm = masses[i] * masses[j];
            let (v, dv) = spec.pair(r2);
            potential += mm * v;
            // force on i points along +d with magnitude dV/dr
            let f = d * (mm * dv / (r2 + spec.softening * spec.softening).sqrt());
            out[i] += f;
            out[j] -= f;
        }
    }
    Ok(ForceSweep { potential, min_distance: min_d2.sqrt() })
}

/// Forces on each body and the total potential energy.
pub fn forces(
    spec: &PotentialSpec,
    masses: &[f64],
    positions: &[Vector3<f64>],
) -> Result<(Vec<Vector3<f64>>, f64)> {
    let mut out = vec![Vector3::zeros(); positions.len()];
    let sweep = accumulate_forces(spec, masses, positions, 0.0, &mut out)?;
    Ok((out, sweep.potential))
}

pub fn potential_energy(spec: &PotentialSpec, masses: &[f64], positions: &[Vector3<f64>]) -> Result<f64> {
    forces(spec, masses, positions).map(|(_, v)| v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    pub angular_momentum: Vector3<f64>,
    pub inertia: Matrix3<f64>,
    pub quadrupole: Matrix3<f64>,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
    pub momentum: Vector3<f64>,
    pub com: Vector3<f64>,
}

impl Observables {
    /// Largest absolute entry of the quadrupole tensor.
    pub fn quadrupole_max(&self) -> f64 {
        self.quadrupole.amax()
    }

    /// Largest absolute off-diagonal entry of the inertia tensor.
    pub fn inertia_offdiag_max(&self) -> f64 {
        let i = &self.inertia;
        i[(0, 1)].abs().max(i[(0, 2)].abs()).max(i[(1, 2)].abs())
    }

    /// `(λ_max − λ_min) / λ_max` over the inertia eigenvalues.
    pub fn inertia_spread(&self) -> f64 {
        let ev = self.inertia.symmetric_eigenvalues();
        let (lo, hi) = (ev.min(), ev.max());
        if hi == 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }

    /// Scalar moment of inertia `Σ m |x|²` (half the trace of the tensor).
    pub fn scalar_inertia(&self) -> f64 {
        0.5 * self.inertia.trace()
    }
}

/// `J = Σ m x × ẋ`, `I = Σ m (|x|² 𝟙 − x xᵀ)`, `Q = Σ m (3 x xᵀ − |x|² 𝟙)`.
///
/// `|x|² π_x = x xᵀ`, so a body at the origin contributes nothing to `I` or `Q`.
pub fn observables(
    spec: &PotentialSpec,
    masses: &[f64],
    positions: &[Vector3<f64>],
    velocities: &[Vector3<f64>],
) -> Result<Observables> {
    let mut j = Vector3::zeros();
    let mut p = Vector3::zeros();
    let mut com = Vector3::zeros();
    let mut inertia = Matrix3::zeros();
    let mut quad = Matrix3::zeros();
    let mut kinetic = 0.0;
    let mut total_mass = 0.0;
    for ((&m, x), v) in masses.iter().zip(positions).zip(velocities) {
        j += m * x.cross(v);
        p += m * v;
        com += m * x;
        total_mass += m;
        kinetic += 0.5 * m * v.norm_squared();
        let r2 = x.norm_squared();
        let outer = x * x.transpose();
        inertia += m * (Matrix3::identity() * r2 - outer);
        quad += m * (3.0 * outer - Matrix3::identity() * r2);
    }
    if total_mass > 0.0 {
        com /= total_mass;
    }
    let potential = potential_energy(spec, masses, positions)?;
    Ok(Observables {
        angular_momentum: j,
        inertia,
        quadrupole: quad,
        kinetic,
        potential,
        energy: kinetic + potential,
        momentum: p,
        com,
    })
}

/// Worst-case violation of `m ẍ = F` along a sampled trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// `max_{i,t} |m_i ẍ_i(t) − F_i(t)|_∞`.
    pub max_abs: f64,
    /// Per harmonic `k` (index), the largest amplitude of the residual's
    /// Fourier component over bodies and coordinates.
    pub spectrum: Vec<f64>,
}

pub fn residual(model: &OrbitModel, params: &ReducedParams, grid: &QuadratureGrid) -> Result<ResidualReport> {
    let sampled = model.sample(params, grid)?;
    let masses = model.masses();
    let nb = model.n_bodies();
    let n = grid.len();
    let kmax = n / 2;
    let mut res = vec![Vector3::zeros(); nb * n];
    let mut f = vec![Vector3::zeros(); nb];
    let mut max_abs: f64 = 0.0;
    for (jt, t) in grid.nodes().enumerate() {
        accumulate_forces(&model.potential, &masses, sampled.positions_at(jt), t, &mut f)?;
        for i in 0..nb {
            let r = masses[i] * sampled.acceleration(i, jt) - f[i];
            max_abs = max_abs.max(r.amax());
            res[i * n + jt] = r;
        }
    }
    let mut spectrum = vec![0.0; kmax + 1];
    let mut s = vec![0.0; kmax + 1];
    let mut c = vec![0.0; kmax + 1];
    let mut proj = vec![[Vector3::<f64>::zeros(); 2]; (kmax + 1) * nb];
    for (jt, t) in grid.nodes().enumerate() {
        fill_harmonics(t, &mut s, &mut c);
        for i in 0..nb {
            let r = res[i * n + jt];
            for k in 0..=kmax {
                proj[i * (kmax + 1) + k][0] += r * s[k];
                proj[i * (kmax + 1) + k][1] += r * c[k];
            }
        }
    }
    let norm = 2.0 / n as f64;
    for i in 0..nb {
        for (k, amp) in spectrum.iter_mut().enumerate() {
            let [ps, pc] = proj[i * (kmax + 1) + k];
            let scale = if k == 0 { 0.5 } else { 1.0 };
            for d in 0..3 {
                let a = scale * norm * ps[d].hypot(pc[d]);
                *amp = f64::max(*amp, a);
            }
        }
    }
    Ok(ResidualReport { max_abs, spectrum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::all_signed_permutations;
    use approx::assert_abs_diff_eq;

    #[test]
    fn newtonian_pair() {
        let spec = PotentialSpec::newtonian();
        for d in [0.5, 1.0, 2.5] {
            let pos = [Vector3::zeros(), Vector3::new(d, 0.0, 0.0)];
            let (f, v) = forces(&spec, &[1.0, 1.0], &pos).unwrap();
            assert_abs_diff_eq!(f[0].x, 1.0 / (d * d), epsilon = 1e-14);
            assert_abs_diff_eq!(f[1].x, -1.0 / (d * d), epsilon = 1e-14);
            assert_abs_diff_eq!(v, -1.0 / d, epsilon = 1e-14);
        }
    }

    #[test]
    fn general_exponent_matches_finite_difference() {
        for alpha in [-2.0, -1.5, -0.5, 0.5, 1.0, 1.5] {
            let spec = PotentialSpec::new(alpha, 1.3).unwrap();
            let masses = [1.0, 2.0, 0.7];
            let pos = vec![
                Vector3::new(0.1, 0.2, -0.3),
                Vector3::new(1.0, -0.4, 0.2),
                Vector3::new(-0.6, 0.9, 0.5),
            ];
            let (f, _) = forces(&spec, &masses, &pos).unwrap();
            let h = 1e-6;
            for i in 0..3 {
                for d in 0..3 {
                    let mut p = pos.clone();
                    p[i][d] += h;
                    let vp = potential_energy(&spec, &masses, &p).unwrap();
                    p[i][d] -= 2.0 * h;
                    let vm = potential_energy(&spec, &masses, &p).unwrap();
                    assert_abs_diff_eq!(f[i][d], -(vp - vm) / (2.0 * h), epsilon = 1e-7);
                }
            }
            // attractive: body 0 pulled toward body 1 when alone with it
            let (f2, _) = forces(&spec, &[1.0, 1.0], &pos[..2]).unwrap();
            assert!(f2[0].dot(&(pos[1] - pos[0])) > 0.0);
        }
    }

    #[test]
    fn action_reaction() {
        let spec = PotentialSpec::newtonian();
        let masses = [1.0, 2.0, 3.0, 0.5];
        let pos = vec![
            Vector3::new(0.1, 0.2, -0.3),
            Vector3::new(1.0, -0.4, 0.2),
            Vector3::new(-0.6, 0.9, 0.5),
            Vector3::new(0.3, 0.3, 1.1),
        ];
        let (f, _) = forces(&spec, &masses, &pos).unwrap();
        let total: Vector3<f64> = f.iter().sum();
        assert!(total.amax() < 1e-14);
    }

    #[test]
    fn collision_detected() {
        let spec = PotentialSpec::newtonian();
        let pos = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)];
        assert!(matches!(forces(&spec, &[1.0, 1.0], &pos), Err(Error::Collision { i: 0, j: 1, .. })));
    }

    #[test]
    fn crisscross_listed_state() {
        let pos = [
            Vector3::new(1.07590, 0.0, 0.0),
            Vector3::new(-0.07095, 0.0, 0.0),
            Vector3::new(-1.00496, 0.0, 0.0),
        ];
        let vel = [
            Vector3::new(0.0, 0.19509, 0.0),
            Vector3::new(0.0, -1.23187, 0.0),
            Vector3::new(0.0, 1.03678, 0.0),
        ];
        let obs = observables(&PotentialSpec::newtonian(), &[1.0; 3], &pos, &vel).unwrap();
        // oracle: Σ x_i ẏ_i
        let jz = 1.07590 * 0.19509 + -0.07095 * -1.23187 + -1.00496 * 1.03678;
        assert_abs_diff_eq!(jz, -0.74462, epsilon = 1e-4);
        assert_abs_diff_eq!(obs.angular_momentum.z, jz, epsilon = 1e-14);
        assert_abs_diff_eq!(obs.momentum.y, 0.0, epsilon = 1e-5);
    }

    #[test]
    fn observables_equivariance_and_trace() {
        let spec = PotentialSpec::newtonian();
        let masses = [1.0, 2.0, 0.5];
        let pos = vec![
            Vector3::new(0.1, 0.2, -0.3),
            Vector3::new(1.0, -0.4, 0.2),
            Vector3::zeros(),
        ];
        let vel = vec![
            Vector3::new(0.3, -0.2, 0.1),
            Vector3::new(-0.1, 0.5, 0.7),
            Vector3::new(0.2, 0.2, -0.4),
        ];
        let base = observables(&spec, &masses, &pos, &vel).unwrap();
        assert!(base.quadrupole.trace().abs() < 1e-14);
        assert!(base.inertia.symmetric_eigenvalues().min() >= -1e-14);
        for g in all_signed_permutations() {
            let r = g.matrix();
            let p: Vec<_> = pos.iter().map(|x| r * x).collect();
            let v: Vec<_> = vel.iter().map(|x| r * x).collect();
            let o = observables(&spec, &masses, &p, &v).unwrap();
            let det = g.determinant() as f64;
            assert!((o.angular_momentum - det * r * base.angular_momentum).amax() < 1e-14);
            assert!((o.inertia - r * base.inertia * r.transpose()).amax() < 1e-14);
            assert!((o.quadrupole - r * base.quadrupole * r.transpose()).amax() < 1e-14);
            assert!(o.quadrupole.trace().abs() < 1e-14);
            assert_abs_diff_eq!(o.energy, base.energy, epsilon = 1e-14);
        }
    }
}
