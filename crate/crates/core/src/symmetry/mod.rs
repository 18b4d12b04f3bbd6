//! Symmetry-constrained orbit models.
//!
//! An [`OrbitModel`] binds every body to a *generator* path through a signed
//! permutation and a time phase:
//!
//! ```text
//! x_i(t) = R_i · g(t + φ_i),   g_c(t) = f_{s(c)}(t + ψ_c)
//! ```
//!
//! where the `f_s` are scalar Fourier series. The free variables of a descent
//! are the [`ReducedParams`] slots; each slot owns one full coefficient and
//! may drive further coefficients through signed couplings. Symmetry is
//! therefore enforced by the parameterization itself and survives every
//! descent step exactly.

mod families;
mod group;
mod matching;

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::action::QuadratureGrid;
use crate::dynamics::PotentialSpec;
use crate::error::{Error, Result};
use crate::fourier::{fill_harmonics, Basis, FourierSeries, Parity};

pub use families::{
    build_choreography, build_crisscross, build_crisscross_with, build_cubic_family, build_cubic_family_with,
    collision_parity_check, CoordinateShape, FamilyOptions, ParityVerdict,
};
pub use group::{a4_elements, all_signed_permutations, closure, klein_elements, OrthTransform};
pub use matching::bottleneck_distance;

/// Which coefficients a scalar series may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesShape {
    pub k_max: usize,
    pub parity: Parity,
    pub sin: bool,
    pub cos: bool,
}

impl SeriesShape {
    pub fn allows(&self, basis: Basis, k: usize) -> bool {
        k >= 1
            && k <= self.k_max
            && self.parity.allows(k)
            && match basis {
                Basis::Sin => self.sin,
                Basis::Cos => self.cos,
            }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (Basis, usize)> + '_ {
        self.parity
            .harmonics(self.k_max)
            .flat_map(|k| [(Basis::Sin, k), (Basis::Cos, k)])
            .filter(move |&(b, k)| self.allows(b, k))
    }
}

/// Address of one full coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoefRef {
    pub series: usize,
    pub basis: Basis,
    pub k: usize,
}

/// `target = sign · values[slot]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub slot: usize,
    pub target: CoefRef,
    pub sign: f64,
}

/// Linear map between the reduced slots and the full coefficient set.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    shapes: Vec<SeriesShape>,
    slots: Vec<CoefRef>,
    couplings: Vec<Coupling>,
    /// Effective inertia per slot: kinetic Hessian diagonal divided by `π k²`.
    inertia: Vec<f64>,
}

impl Reduction {
    /// Validates that every allowed full coefficient is driven by exactly one
    /// slot (directly or through one coupling).
    pub fn new(shapes: Vec<SeriesShape>, slots: Vec<CoefRef>, couplings: Vec<Coupling>) -> Result<Self> {
        use std::collections::HashMap;
        let mut owner: HashMap<CoefRef, usize> = HashMap::new();
        let mut claim = |c: CoefRef, slot: usize| -> Result<()> {
            let shape = shapes
                .get(c.series)
                .ok_or_else(|| Error::InvalidReduction(format!("series {} does not exist", c.series)))?;
            if !shape.allows(c.basis, c.k) {
                return Err(Error::InvalidReduction(format!("{c:?} is not allowed by its series shape")));
            }
            if owner.insert(c, slot).is_some() {
                return Err(Error::InvalidReduction(format!("{c:?} is driven by more than one slot")));
            }
            Ok(())
        };
        for (i, &c) in slots.iter().enumerate() {
            claim(c, i)?;
        }
        for cp in &couplings {
            if cp.slot >= slots.len() {
                return Err(Error::InvalidReduction(format!("coupling names missing slot {}", cp.slot)));
            }
            if cp.sign.abs() != 1.0 {
                return Err(Error::InvalidReduction("coupling signs must be ±1".into()));
            }
            claim(cp.target, cp.slot)?;
        }
        for (s, shape) in shapes.iter().enumerate() {
            for (basis, k) in shape.coefficients() {
                let c = CoefRef { series: s, basis, k };
                if !owner.contains_key(&c) {
                    return Err(Error::InvalidReduction(format!("{c:?} is not reachable from any slot")));
                }
            }
        }
        let n = slots.len();
        Ok(Self { shapes, slots, couplings, inertia: vec![1.0; n] })
    }

    pub fn shapes(&self) -> &[SeriesShape] {
        &self.shapes
    }

    pub fn slots(&self) -> &[CoefRef] {
        &self.slots
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot_harmonic(&self, slot: usize) -> usize {
        self.slots[slot].k
    }

    pub fn slot_inertia(&self, slot: usize) -> f64 {
        self.inertia[slot]
    }

    pub fn k_max(&self) -> usize {
        self.shapes.iter().map(|s| s.k_max).max().unwrap_or(0)
    }

    fn zero_series(&self) -> Vec<FourierSeries> {
        self.shapes.iter().map(|s| FourierSeries::new(s.k_max, s.parity)).collect()
    }

    /// Full coefficient set from slot values.
    pub fn expand(&self, values: &[f64]) -> Result<Vec<FourierSeries>> {
        if values.len() != self.slots.len() {
            return Err(Error::LayoutMismatch);
        }
        let mut out = self.zero_series();
        for (c, &v) in self.slots.iter().zip(values) {
            out[c.series].set(c.basis, c.k, v)?;
        }
        for cp in &self.couplings {
            let t = cp.target;
            out[t.series].set(t.basis, t.k, cp.sign * values[cp.slot])?;
        }
        Ok(out)
    }

    /// Slot values read from the coefficients each slot owns directly.
    pub fn reduce(&self, full: &[FourierSeries]) -> Result<Vec<f64>> {
        if full.len() != self.shapes.len() {
            return Err(Error::LayoutMismatch);
        }
        Ok(self.slots.iter().map(|c| full[c.series].coeff(c.basis, c.k)).collect())
    }

    /// Chain rule through the couplings: each slot receives the signed sum
    /// of the gradients of the coefficients it drives.
    pub fn project(&self, full_gradient: &[FourierSeries]) -> Result<Vec<f64>> {
        if full_gradient.len() != self.shapes.len() {
            return Err(Error::LayoutMismatch);
        }
        let mut g: Vec<f64> = self
            .slots
            .iter()
            .map(|c| full_gradient[c.series].coeff(c.basis, c.k))
            .collect();
        for cp in &self.couplings {
            let t = cp.target;
            g[cp.slot] += cp.sign * full_gradient[t.series].coeff(t.basis, t.k);
        }
        Ok(g)
    }
}

/// Free descent variables plus the map that expands them.
#[derive(Clone, Debug)]
pub struct ReducedParams {
    pub values: Vec<f64>,
    reduction: Arc<Reduction>,
}

impl PartialEq for ReducedParams {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && same_reduction(&self.reduction, &other.reduction)
    }
}

fn same_reduction(a: &Arc<Reduction>, b: &Arc<Reduction>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ReducedParams {
    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self { values, reduction: Arc::clone(&self.reduction) })
    }

    pub fn expand(&self) -> Result<Vec<FourierSeries>> {
        self.reduction.expand(&self.values)
    }

    /// Index of the slot owning `coef` directly, if any.
    pub fn slot_of(&self, coef: CoefRef) -> Option<usize> {
        self.reduction.slots.iter().position(|&c| c == coef)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Coordinate `c` of a generator is `series` evaluated at `t + phase`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub series: usize,
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub channels: [Option<Channel>; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyBinding {
    pub generator: usize,
    pub transform: OrthTransform,
    pub phase: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Cubic { m: usize },
    CrissCross { masses: [f64; 3] },
    Choreography { n: usize },
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Cubic { .. } => "cubic",
            Family::CrissCross { .. } => "crisscross",
            Family::Choreography { .. } => "choreography",
            Family::Custom => "custom",
        }
    }
}

/// A spatio-temporal symmetry: the body set at time `t` equals
/// `{R x_i(shift + t)}`, or `{R x_i(shift − t)}` when `reversed`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryOp {
    pub label: String,
    pub transform: OrthTransform,
    pub time_shift: f64,
    pub reversed: bool,
}

impl SymmetryOp {
    pub fn spatial(transform: OrthTransform) -> Self {
        Self { label: transform.to_string(), transform, time_shift: 0.0, reversed: false }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitModel {
    pub generators: Vec<Generator>,
    pub bindings: Vec<BodyBinding>,
    pub potential: PotentialSpec,
    pub family: Family,
    symmetries: Vec<SymmetryOp>,
    reduction: Arc<Reduction>,
}

impl OrbitModel {
    pub fn new(
        generators: Vec<Generator>,
        bindings: Vec<BodyBinding>,
        potential: PotentialSpec,
        family: Family,
        mut reduction: Reduction,
        symmetries: Vec<SymmetryOp>,
    ) -> Result<Self> {
        for b in &bindings {
            if !(b.mass > 0.0) || !b.mass.is_finite() {
                return Err(Error::NonPositiveMass(b.mass));
            }
            if b.generator >= generators.len() {
                return Err(Error::InvalidArgument(format!("binding names missing generator {}", b.generator)));
            }
        }
        for g in &generators {
            for ch in g.channels.iter().flatten() {
                if ch.series >= reduction.shapes.len() {
                    return Err(Error::InvalidArgument(format!("channel names missing series {}", ch.series)));
                }
            }
        }
        // mass fed into each series, summed over every (body, channel) use
        let mut series_mass = vec![0.0; reduction.shapes.len()];
        for b in &bindings {
            for ch in generators[b.generator].channels.iter().flatten() {
                series_mass[ch.series] += b.mass;
            }
        }
        let mut inertia: Vec<f64> = reduction.slots.iter().map(|c| series_mass[c.series]).collect();
        for cp in &reduction.couplings {
            inertia[cp.slot] += series_mass[cp.target.series];
        }
        reduction.inertia = inertia;
        Ok(Self { generators, bindings, potential, family, symmetries, reduction: Arc::new(reduction) })
    }

    pub fn n_bodies(&self) -> usize {
        self.bindings.len()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.bindings.iter().map(|b| b.mass).collect()
    }

    pub fn k_max(&self) -> usize {
        self.reduction.k_max()
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn symmetries(&self) -> &[SymmetryOp] {
        &self.symmetries
    }

    /// Distinct spatial transforms among the model's symmetries (those acting
    /// at equal times).
    pub fn spatial_group(&self) -> Vec<OrthTransform> {
        let mut g: Vec<_> = self
            .symmetries
            .iter()
            .filter(|s| s.time_shift == 0.0 && !s.reversed)
            .map(|s| s.transform)
            .collect();
        g.sort();
        g.dedup();
        g
    }

    pub fn check_params(&self, params: &ReducedParams) -> Result<()> {
        if same_reduction(&self.reduction, &params.reduction) {
            Ok(())
        } else {
            Err(Error::LayoutMismatch)
        }
    }

    pub fn zero_params(&self) -> ReducedParams {
        ReducedParams { values: vec![0.0; self.reduction.len()], reduction: Arc::clone(&self.reduction) }
    }

    pub fn params_from_values(&self, values: Vec<f64>) -> Result<ReducedParams> {
        self.zero_params().with_values(values)
    }

    pub fn reduce(&self, full: &[FourierSeries]) -> Result<ReducedParams> {
        let values = self.reduction.reduce(full)?;
        self.params_from_values(values)
    }

    pub fn expand(&self, params: &ReducedParams) -> Result<Vec<FourierSeries>> {
        self.check_params(params)?;
        params.expand()
    }

    pub fn project_gradient(&self, full_gradient: &[FourierSeries], params: &ReducedParams) -> Result<Vec<f64>> {
        self.check_params(params)?;
        self.reduction.project(full_gradient)
    }

    /// Positions, velocities and accelerations on the quadrature grid.
    pub fn sample(&self, params: &ReducedParams, grid: &QuadratureGrid) -> Result<SampledOrbit> {
        let full = self.expand(params)?;
        let times: Vec<f64> = grid.nodes().collect();
        self.sample_full(&full, &times)
    }

    pub fn sample_times(&self, params: &ReducedParams, times: &[f64]) -> Result<SampledOrbit> {
        let full = self.expand(params)?;
        self.sample_full(&full, times)
    }

    /// Evaluate raw (possibly non-symmetric) full coefficients.
    pub fn sample_full(&self, full: &[FourierSeries], times: &[f64]) -> Result<SampledOrbit> {
        if full.len() != self.reduction.shapes.len() {
            return Err(Error::LayoutMismatch);
        }
        let nb = self.n_bodies();
        let kmax = full.iter().map(|s| s.k_max()).max().unwrap_or(0);
        let mut s = vec![0.0; kmax + 1];
        let mut c = vec![0.0; kmax + 1];
        let mut out = SampledOrbit::zeros(nb, times.len());
        for (jt, &t) in times.iter().enumerate() {
            for (i, b) in self.bindings.iter().enumerate() {
                let mut jet = [Vector3::zeros(); 3];
                for (axis, ch) in self.generators[b.generator].channels.iter().enumerate() {
                    let Some(ch) = ch else { continue };
                    let f = &full[ch.series];
                    fill_harmonics(t + b.phase + ch.phase, &mut s, &mut c);
                    let (fs, fc) = (f.sin_coeffs(), f.cos_coeffs());
                    let mut v = [fc[0], 0.0, 0.0];
                    for k in 1..=f.k_max() {
                        let (a, bb) = (fs[k], fc[k]);
                        if a == 0.0 && bb == 0.0 {
                            continue;
                        }
                        let kf = k as f64;
                        let sc = a * s[k] + bb * c[k];
                        v[0] += sc;
                        v[1] += kf * (a * c[k] - bb * s[k]);
                        v[2] -= kf * kf * sc;
                    }
                    for d in 0..3 {
                        jet[d][axis] = v[d];
                    }
                }
                let idx = jt * nb + i;
                out.pos[idx] = b.transform.apply(&jet[0]);
                out.vel[idx] = b.transform.apply(&jet[1]);
                out.acc[idx] = b.transform.apply(&jet[2]);
            }
        }
        Ok(out)
    }

    /// Positions and velocities of every body at a single time.
    pub fn state_at(&self, params: &ReducedParams, t: f64) -> Result<(Vec<Vector3<f64>>, Vec<Vector3<f64>>)> {
        let s = self.sample_times(params, &[t])?;
        Ok((s.pos, s.vel))
    }

    /// `∂S/∂c` for every full coefficient `c`, given the equation-of-motion
    /// defect `m ẍ − F` sampled on the grid (node-major), using
    /// `∂S/∂c = −∫ Σ_i (m_i ẍ_i − F_i) · ∂x_i/∂c dt`.
    pub(crate) fn full_gradient(&self, defect: &[Vector3<f64>], times: &[f64], weight: f64) -> Vec<FourierSeries> {
        let nb = self.n_bodies();
        let shapes = &self.reduction.shapes;
        let mut gs: Vec<Vec<f64>> = shapes.iter().map(|s| vec![0.0; s.k_max + 1]).collect();
        let mut gc = gs.clone();
        let kmax = self.k_max();
        let mut s = vec![0.0; kmax + 1];
        let mut c = vec![0.0; kmax + 1];
        for (jt, &t) in times.iter().enumerate() {
            for (i, b) in self.bindings.iter().enumerate() {
                let u = b.transform.apply_transpose(&defect[jt * nb + i]);
                for (axis, ch) in self.generators[b.generator].channels.iter().enumerate() {
                    let Some(ch) = ch else { continue };
                    let shape = &shapes[ch.series];
                    let w = -weight * u[axis];
                    if w == 0.0 {
                        continue;
                    }
                    fill_harmonics(t + b.phase + ch.phase, &mut s, &mut c);
                    for k in shape.parity.harmonics(shape.k_max) {
                        if shape.sin {
                            gs[ch.series][k] += w * s[k];
                        }
                        if shape.cos {
                            gc[ch.series][k] += w * c[k];
                        }
                    }
                }
            }
        }
        shapes
            .iter()
            .zip(gs.into_iter().zip(gc))
            .map(|(shape, (sin, cos))| {
                let mut f = FourierSeries::new(shape.k_max, shape.parity);
                for (basis, k) in shape.coefficients() {
                    let v = match basis {
                        Basis::Sin => sin[k],
                        Basis::Cos => cos[k],
                    };
                    f.set(basis, k, v).expect("shape-allowed coefficient");
                }
                f
            })
            .collect()
    }

    /// Check every family symmetry on the grid, for reduced parameters.
    pub fn verify_symmetry(&self, params: &ReducedParams, grid: &QuadratureGrid, tol: f64) -> Result<SymmetryReport> {
        let full = self.expand(params)?;
        self.verify_symmetry_full(&full, grid, tol)
    }

    /// As [`verify_symmetry`](Self::verify_symmetry) but for raw coefficients,
    /// which need not lie in the image of the reduction.
    pub fn verify_symmetry_full(&self, full: &[FourierSeries], grid: &QuadratureGrid, tol: f64) -> Result<SymmetryReport> {
        let times: Vec<f64> = grid.nodes().collect();
        let base = self.sample_full(full, &times)?;
        let mut checks = Vec::with_capacity(self.symmetries.len());
        for op in &self.symmetries {
            let mapped_times: Vec<f64> = times
                .iter()
                .map(|&t| {
                    let u = if op.reversed { op.time_shift - t } else { op.time_shift + t };
                    u.rem_euclid(TAU)
                })
                .collect();
            let other = self.sample_full(full, &mapped_times)?;
            let mut worst: f64 = 0.0;
            for jt in 0..times.len() {
                let mapped: Vec<_> = other.positions_at(jt).iter().map(|x| op.transform.apply(x)).collect();
                worst = worst.max(bottleneck_distance(base.positions_at(jt), &mapped));
            }
            checks.push(SymmetryCheck { label: op.label.clone(), max_distance: worst, passed: worst <= tol });
        }
        Ok(SymmetryReport { checks, tol })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck {
    pub label: String,
    pub max_distance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub checks: Vec<SymmetryCheck>,
    pub tol: f64,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_distance(&self) -> f64 {
        self.checks.iter().map(|c| c.max_distance).fold(0.0, f64::max)
    }
}

/// Body states on a list of times, stored node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledOrbit {
    n_bodies: usize,
    n_nodes: usize,
    pos: Vec<Vector3<f64>>,
    vel: Vec<Vector3<f64>>,
    acc: Vec<Vector3<f64>>,
}

impl SampledOrbit {
    fn zeros(n_bodies: usize, n_nodes: usize) -> Self {
        let z = vec![Vector3::zeros(); n_bodies * n_nodes];
        Self { n_bodies, n_nodes, pos: z.clone(), vel: z.clone(), acc: z }
    }

    pub fn n_bodies(&self) -> usize {
        self.n_bodies
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn position(&self, body: usize, node: usize) -> Vector3<f64> {
        self.pos[node * self.n_bodies + body]
    }

    pub fn velocity(&self, body: usize, node: usize) -> Vector3<f64> {
        self.vel[node * self.n_bodies + body]
    }

    pub fn acceleration(&self, body: usize, node: usize) -> Vector3<f64> {
        self.acc[node * self.n_bodies + body]
    }

    pub fn positions_at(&self, node: usize) -> &[Vector3<f64>] {
        &self.pos[node * self.n_bodies..(node + 1) * self.n_bodies]
    }

    pub fn velocities_at(&self, node: usize) -> &[Vector3<f64>] {
        &self.vel[node * self.n_bodies..(node + 1) * self.n_bodies]
    }

    pub fn accelerations_at(&self, node: usize) -> &[Vector3<f64>] {
        &self.acc[node * self.n_bodies..(node + 1) * self.n_bodies]
    }

    /// Largest `|x_i(t)|` over all samples.
    pub fn max_radius(&self) -> f64 {
        self.pos.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}
