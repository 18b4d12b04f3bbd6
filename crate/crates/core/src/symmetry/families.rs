//! Builders for the symmetric orbit families: the cubic family of `4m`
//! bodies on four loops, the planar criss-cross, and choreographies.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{
    a4_elements, klein_elements, BodyBinding, Channel, CoefRef, Coupling, Family, Generator, OrbitModel,
    OrthTransform, ReducedParams, Reduction, SeriesShape, SymmetryOp,
};
use crate::dynamics::PotentialSpec;
use crate::error::{Error, Result};
use crate::fourier::{Basis, FourierSeries, Parity, DEFAULT_K_MAX};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyOptions {
    pub k_max: usize,
    pub mass: f64,
    pub potential: PotentialSpec,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        Self { k_max: DEFAULT_K_MAX, mass: 1.0, potential: PotentialSpec::newtonian() }
    }
}

impl FamilyOptions {
    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_potential(mut self, potential: PotentialSpec) -> Self {
        self.potential = potential;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityVerdict {
    Safe,
    Collision,
}

/// With `m` masses per loop, even `m` puts a partner at the diametrically
/// opposite point of every loop, so two loop intersections are crossed at
/// once and bodies on different loops collide.
pub fn collision_parity_check(m: usize) -> Result<ParityVerdict> {
    match m {
        0 => Err(Error::ZeroMultiplicity),
        m if m % 2 == 0 => Ok(ParityVerdict::Collision),
        _ => Ok(ParityVerdict::Safe),
    }
}

pub fn build_cubic_family(m: usize) -> Result<(OrbitModel, ReducedParams)> {
    build_cubic_family_with(m, &FamilyOptions::default())
}

/// `4m` bodies: loop `L` body `j` moves on `g_L · x_0(t + 2πj/m)` where
/// `x_0(t) = (f(t), f(t + 2π/3), f(t + 4π/3))` and `g_L` runs over the
/// Klein four-group. `f` is an odd-harmonic sine series; the seed `f = sin t`
/// is the unit circle normal to `(1, 1, 1)`.
pub fn build_cubic_family_with(m: usize, opts: &FamilyOptions) -> Result<(OrbitModel, ReducedParams)> {
    if collision_parity_check(m)? == ParityVerdict::Collision {
        return Err(Error::CollisionParity { m });
    }
    check_mass(opts.mass)?;
    let shape = SeriesShape { k_max: opts.k_max, parity: Parity::OddOnly, sin: true, cos: false };
    let slots: Vec<_> = Parity::OddOnly
        .harmonics(opts.k_max)
        .map(|k| CoefRef { series: 0, basis: Basis::Sin, k })
        .collect();
    let reduction = Reduction::new(vec![shape], slots, vec![])?;
    let generator = Generator {
        channels: [0.0, TAU / 3.0, 2.0 * TAU / 3.0].map(|phase| Some(Channel { series: 0, phase })),
    };
    let mut bindings = Vec::with_capacity(4 * m);
    for g in klein_elements() {
        for j in 0..m {
            bindings.push(BodyBinding { generator: 0, transform: g, phase: TAU * j as f64 / m as f64, mass: opts.mass });
        }
    }
    let spatial = if m % 3 == 0 { a4_elements() } else { klein_elements() };
    let mut symmetries: Vec<_> = spatial.into_iter().map(SymmetryOp::spatial).collect();
    symmetries.push(SymmetryOp {
        label: "half-period".into(),
        transform: OrthTransform::diagonal([-1, -1, -1]),
        time_shift: PI,
        reversed: false,
    });
    symmetries.push(SymmetryOp {
        label: "time-reversal".into(),
        transform: OrthTransform::new([0, 2, 1], [-1, -1, -1]).unwrap(),
        time_shift: 0.0,
        reversed: true,
    });
    let model = OrbitModel::new(
        vec![generator],
        bindings,
        opts.potential,
        Family::Cubic { m },
        reduction,
        symmetries,
    )?;
    let mut params = model.zero_params();
    params.values[0] = 1.0;
    Ok((model, params))
}

/// Sign relating the equal-mass criss-cross couplings at harmonic `k`:
/// `+1` for `k ≡ 3 (mod 4)`, `−1` for `k ≡ 1 (mod 4)`.
pub fn crisscross_sign(k: usize) -> f64 {
    if k % 4 == 3 {
        1.0
    } else {
        -1.0
    }
}

pub fn build_crisscross(masses: [f64; 3]) -> Result<(OrbitModel, ReducedParams)> {
    build_crisscross_with(masses, &FamilyOptions::default())
}

/// Planar three-body orbit with `x_i = Σ a_{i,k} cos kt`, `y_i = Σ b_{i,k} sin kt`
/// over odd `k`. Bodies 1 and 2 form the inner pair, body 3 circles them
/// retrograde.
///
/// Equal masses couple `a_{2,k} = ±b_{1,k}`, `b_{2,k} = ±a_{1,k}`,
/// `b_{3,k} = ±a_{3,k}` (sign from [`crisscross_sign`]), leaving the slots
/// `a_{1,k}, b_{1,k}, a_{3,k}`. Unequal masses leave every coefficient free.
/// Seed: `a_{1,1} = 1`, `b_{1,1} = 0`, `a_{3,1} = −1`.
pub fn build_crisscross_with(masses: [f64; 3], opts: &FamilyOptions) -> Result<(OrbitModel, ReducedParams)> {
    for &m in &masses {
        check_mass(m)?;
    }
    let equal = masses[0] == masses[1] && masses[1] == masses[2];
    let k_max = opts.k_max;
    let odd = Parity::OddOnly;
    // series 2i: x of body i (cos), 2i+1: y of body i (sin)
    let shapes: Vec<_> = (0..6)
        .map(|s| SeriesShape { k_max, parity: odd, sin: s % 2 == 1, cos: s % 2 == 0 })
        .collect();
    let coef = |series: usize, k: usize| CoefRef {
        series,
        basis: if series % 2 == 0 { Basis::Cos } else { Basis::Sin },
        k,
    };
    let mut slots = Vec::new();
    let mut couplings = Vec::new();
    if equal {
        // slot blocks: a_1 (series 0), b_1 (series 1), a_3 (series 4)
        for (block, (own, coupled)) in [(0, 3), (1, 2), (4, 5)].into_iter().enumerate() {
            for (i, k) in odd.harmonics(k_max).enumerate() {
                let slot = block * odd.harmonics(k_max).count() + i;
                slots.push(coef(own, k));
                couplings.push(Coupling { slot, target: coef(coupled, k), sign: crisscross_sign(k) });
            }
        }
    } else {
        for s in 0..6 {
            slots.extend(odd.harmonics(k_max).map(|k| coef(s, k)));
        }
    }
    let reduction = Reduction::new(shapes, slots, couplings)?;
    let generators: Vec<_> = (0..3)
        .map(|i| Generator {
            channels: [
                Some(Channel { series: 2 * i, phase: 0.0 }),
                Some(Channel { series: 2 * i + 1, phase: 0.0 }),
                None,
            ],
        })
        .collect();
    let bindings: Vec<_> = (0..3)
        .map(|i| BodyBinding { generator: i, transform: OrthTransform::IDENTITY, phase: 0.0, mass: masses[i] })
        .collect();
    let mut symmetries = vec![
        SymmetryOp {
            label: "half-period".into(),
            transform: OrthTransform::diagonal([-1, -1, 1]),
            time_shift: PI,
            reversed: false,
        },
        SymmetryOp {
            label: "time-reversal".into(),
            transform: OrthTransform::diagonal([1, -1, 1]),
            time_shift: 0.0,
            reversed: true,
        },
    ];
    if equal {
        symmetries.push(SymmetryOp {
            label: "quarter-turn".into(),
            transform: OrthTransform::new([1, 0, 2], [-1, 1, 1]).unwrap(),
            time_shift: FRAC_PI_2,
            reversed: false,
        });
    }
    let model = OrbitModel::new(
        generators,
        bindings,
        opts.potential,
        Family::CrissCross { masses },
        reduction,
        symmetries,
    )?;

    // seed through the equal-mass couplings at k = 1
    let s1 = crisscross_sign(1);
    let seed = [(0, 1.0), (1, 0.0), (2, s1 * 0.0), (3, s1 * 1.0), (4, -1.0), (5, s1 * -1.0)];
    let mut full: Vec<FourierSeries> = (0..6).map(|_| FourierSeries::new(k_max, odd)).collect();
    for (s, v) in seed {
        full[s].set(coef(s, 1).basis, 1, v)?;
    }
    if !equal {
        // remove the centre-of-mass motion of the seed once
        let total: f64 = masses.iter().sum();
        for axis in 0..2 {
            let com: f64 = (0..3).map(|i| masses[i] * full[2 * i + axis].coeff(coef(axis, 1).basis, 1)).sum::<f64>() / total;
            for i in 0..3 {
                let s = 2 * i + axis;
                let b = coef(s, 1).basis;
                let v = full[s].coeff(b, 1) - com;
                full[s].set(b, 1, v)?;
            }
        }
    }
    let params = model.reduce(&full)?;
    Ok((model, params))
}

/// Per-coordinate series shape for a choreography generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordinateShape {
    pub parity: Parity,
    pub sin: bool,
    pub cos: bool,
}

impl CoordinateShape {
    pub const fn sin_only(parity: Parity) -> Self {
        Self { parity, sin: true, cos: false }
    }

    pub const fn cos_only(parity: Parity) -> Self {
        Self { parity, sin: false, cos: true }
    }

    pub const fn full(parity: Parity) -> Self {
        Self { parity, sin: true, cos: true }
    }
}

/// `n` equal masses on one closed curve, body `j` at time offset `2πj/n`.
///
/// `coords` fixes which coefficients each coordinate may carry (`None`
/// keeps it at zero). The seed curve is projected onto those coefficients.
pub fn build_choreography(
    n: usize,
    coords: [Option<CoordinateShape>; 3],
    seed: impl Fn(f64) -> [f64; 3],
    opts: &FamilyOptions,
) -> Result<(OrbitModel, ReducedParams)> {
    if n == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    check_mass(opts.mass)?;
    let k_max = opts.k_max;
    let mut shapes = Vec::new();
    let mut channels = [None; 3];
    let mut slots = Vec::new();
    for (axis, c) in coords.iter().enumerate() {
        let Some(c) = c else { continue };
        let series = shapes.len();
        let shape = SeriesShape { k_max, parity: c.parity, sin: c.sin, cos: c.cos };
        slots.extend(shape.coefficients().map(|(basis, k)| CoefRef { series, basis, k }));
        shapes.push(shape);
        channels[axis] = Some(Channel { series, phase: 0.0 });
    }
    let reduction = Reduction::new(shapes.clone(), slots, vec![])?;
    let bindings: Vec<_> = (0..n)
        .map(|j| BodyBinding {
            generator: 0,
            transform: OrthTransform::IDENTITY,
            phase: TAU * j as f64 / n as f64,
            mass: opts.mass,
        })
        .collect();

    let mut symmetries = Vec::new();
    if n > 1 {
        symmetries.push(SymmetryOp {
            label: "relabel".into(),
            transform: OrthTransform::IDENTITY,
            time_shift: TAU / n as f64,
            reversed: false,
        });
    }
    let present: Vec<_> = coords.iter().flatten().collect();
    if present.iter().all(|c| c.parity == Parity::OddOnly) {
        symmetries.push(SymmetryOp {
            label: "half-period".into(),
            transform: OrthTransform::diagonal([-1, -1, -1]),
            time_shift: PI,
            reversed: false,
        });
    }
    if present.iter().all(|c| c.sin != c.cos) {
        let signs = coords.map(|c| match c {
            Some(c) if c.sin => -1,
            _ => 1,
        });
        symmetries.push(SymmetryOp {
            label: "time-reversal".into(),
            transform: OrthTransform::diagonal(signs),
            time_shift: 0.0,
            reversed: true,
        });
    }
    let model = OrbitModel::new(
        vec![Generator { channels }],
        bindings,
        opts.potential,
        Family::Choreography { n },
        reduction,
        symmetries,
    )?;

    // project the seed curve by trapezoidal quadrature
    let nq = 8 * k_max + 8;
    let samples: Vec<[f64; 3]> = (0..nq).map(|j| seed(TAU * j as f64 / nq as f64)).collect();
    let mut full = Vec::new();
    for (axis, c) in coords.iter().enumerate() {
        let Some(c) = c else { continue };
        let mut f = FourierSeries::new(k_max, c.parity);
        for k in c.parity.harmonics(k_max) {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, x) in samples.iter().enumerate() {
                let (s, co) = (k as f64 * TAU * j as f64 / nq as f64).sin_cos();
                a += x[axis] * s;
                b += x[axis] * co;
            }
            if c.sin {
                f.set_sin(k, 2.0 * a / nq as f64)?;
            }
            if c.cos {
                f.set_cos(k, 2.0 * b / nq as f64)?;
            }
        }
        full.push(f);
    }
    let params = model.reduce(&full)?;
    Ok((model, params))
}

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMass(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::QuadratureGrid;
    use nalgebra::Vector3;

    #[test]
    fn parity_rule() {
        assert_eq!(collision_parity_check(1).unwrap(), ParityVerdict::Safe);
        assert_eq!(collision_parity_check(2).unwrap(), ParityVerdict::Collision);
        assert_eq!(collision_parity_check(3).unwrap(), ParityVerdict::Safe);
        assert_eq!(collision_parity_check(0), Err(Error::ZeroMultiplicity));
    }

    #[test]
    fn cubic_construction() {
        let (model, params) = build_cubic_family(1).unwrap();
        assert_eq!(model.n_bodies(), 4);
        let ks: Vec<_> = model.reduction().slots().iter().map(|c| c.k).collect();
        assert_eq!(ks, (1..=27).step_by(2).collect::<Vec<_>>());
        assert!(model.reduction().slots().iter().all(|c| c.basis == Basis::Sin));
        assert_eq!(params.values[0], 1.0);
        assert!(params.values[1..].iter().all(|&v| v == 0.0));
        assert_eq!(model.spatial_group().len(), 4);

        assert_eq!(build_cubic_family(2).unwrap_err(), Error::CollisionParity { m: 2 });
        assert_eq!(build_cubic_family(0).unwrap_err(), Error::ZeroMultiplicity);

        let (m3, _) = build_cubic_family(3).unwrap();
        assert_eq!(m3.n_bodies(), 12);
        assert_eq!(m3.spatial_group(), a4_elements());
        let (m5, _) = build_cubic_family(5).unwrap();
        assert_eq!(m5.spatial_group(), {
            let mut k = klein_elements();
            k.sort();
            k
        });
    }

    #[test]
    fn cubic_seed_positions() {
        let (model, params) = build_cubic_family(1).unwrap();
        let (pos, _) = model.state_at(&params, 0.0).unwrap();
        let r3 = 3f64.sqrt() / 2.0;
        assert!((pos[0] - Vector3::new(0.0, r3, -r3)).amax() < 1e-15);
        // body bound by (x,-y,-z)
        assert!((pos[1] - Vector3::new(0.0, -r3, r3)).amax() < 1e-15);
    }

    #[test]
    fn cubic_m3_cyclic_invariance() {
        let (model, mut params) = build_cubic_family(3).unwrap();
        params.values[1] = -0.046;
        params.values[2] = 0.004;
        let grid = QuadratureGrid::new(40).unwrap();
        let sampled = model.sample(&params, &grid).unwrap();
        let c = OrthTransform::cyclic();
        for node in 0..grid.len() {
            let set = sampled.positions_at(node);
            let mapped: Vec<_> = set.iter().map(|x| c.apply(x)).collect();
            assert!(super::super::bottleneck_distance(set, &mapped) < 1e-12);
        }
    }

    #[test]
    fn crisscross_construction() {
        let (model, params) = build_crisscross([1.0; 3]).unwrap();
        assert_eq!(model.reduction().len(), 3 * 14);
        assert_eq!(crisscross_sign(1), -1.0);
        assert_eq!(crisscross_sign(3), 1.0);
        assert_eq!(crisscross_sign(5), -1.0);
        assert_eq!(crisscross_sign(7), 1.0);
        // seed (a_{1,1}, b_{1,1}, a_{3,1})
        assert_eq!((params.values[0], params.values[14], params.values[28]), (1.0, 0.0, -1.0));
        let full = params.expand().unwrap();
        // a_{2,1} = -b_{1,1}, b_{2,1} = -a_{1,1}, b_{3,1} = -a_{3,1}
        assert_eq!(full[3].sin_coeff(1), -1.0);
        assert_eq!(full[5].sin_coeff(1), 1.0);
        let k1 = model
            .reduction()
            .couplings()
            .iter()
            .find(|c| c.target == CoefRef { series: 2, basis: Basis::Cos, k: 1 })
            .unwrap();
        assert_eq!(k1.sign, -1.0);

        let (unequal, p) = build_crisscross([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(unequal.reduction().len(), 6 * 14);
        assert!(unequal.reduction().couplings().is_empty());
        // seed has no centre-of-mass motion
        let full = p.expand().unwrap();
        let masses = [1.0, 2.0, 3.0];
        let comx: f64 = (0..3).map(|i| masses[i] * full[2 * i].cos_coeff(1)).sum();
        let comy: f64 = (0..3).map(|i| masses[i] * full[2 * i + 1].sin_coeff(1)).sum();
        assert!(comx.abs() < 1e-15 && comy.abs() < 1e-15);

        assert_eq!(build_crisscross([1.0, 0.0, 1.0]).unwrap_err(), Error::NonPositiveMass(0.0));
    }

    #[test]
    fn choreography_projection() {
        let opts = FamilyOptions::default().with_k_max(5);
        let (model, params) = build_choreography(
            2,
            [Some(CoordinateShape::cos_only(Parity::OddOnly)), Some(CoordinateShape::sin_only(Parity::OddOnly)), None],
            |t| [0.7 * t.cos(), 0.7 * t.sin() + 0.1 * (3.0 * t).sin(), 0.0],
            &opts,
        )
        .unwrap();
        let full = params.expand().unwrap();
        assert!((full[0].cos_coeff(1) - 0.7).abs() < 1e-14);
        assert!((full[1].sin_coeff(1) - 0.7).abs() < 1e-14);
        assert!((full[1].sin_coeff(3) - 0.1).abs() < 1e-14);
        assert_eq!(model.n_bodies(), 2);
        let (pos, _) = model.state_at(&params, 0.0).unwrap();
        assert!((pos[0] + pos[1]).amax() < 1e-14);
    }
}
