//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::Vector3;
use periodic_orbits::action::{fd_gradient_oracle, gradient};
use periodic_orbits::descent::{
    naive_stability_bound, naive_time_descent, run, run_with_observer, DescentSchedule, RunResult, StopCriteria,
    TimePaths,
};
use periodic_orbits::export::coefficient_table;
use periodic_orbits::fourier::Parity;
use periodic_orbits::integrator::{extract_ics, integrate, order_ratio, perturb_and_track, perturb_many, PerturbOptions, DEFAULT_DT};
use periodic_orbits::symmetry::{
    all_signed_permutations, build_choreography, build_crisscross, build_crisscross_with, build_cubic_family,
    build_cubic_family_with, CoordinateShape, FamilyOptions, OrbitModel, ReducedParams,
};
use periodic_orbits::{observables, Outcome, PotentialSpec, QuadratureGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn converge(model: &OrbitModel, seed: &ReducedParams) -> Result<RunResult, String> {
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let r = run(model, seed, &DescentSchedule::default(), &StopCriteria::default(), &grid).map_err(e2s)?;
    ensure(r.outcome == Outcome::Converged, || format!("descent ended with {:?}", r.outcome))?;
    Ok(r)
}

fn two_body_model(k_max: usize, seed: impl Fn(f64) -> [f64; 3]) -> (OrbitModel, ReducedParams) {
    build_choreography(
        2,
        [Some(CoordinateShape::cos_only(Parity::OddOnly)), Some(CoordinateShape::sin_only(Parity::OddOnly)), None],
        seed,
        &FamilyOptions::default().with_k_max(k_max),
    )
    .unwrap()
}

/// `a_k` for odd `k` from 1, normalized by `a_1`.
fn normalized_cubic(params: &ReducedParams) -> Vec<f64> {
    params.values.iter().map(|a| a / params.values[0]).collect()
}

fn compare_column(got: &[f64], want: &[f64], tol: f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for (j, (g, w)) in got.iter().zip(want).enumerate() {
        let d = (g - w).abs();
        worst = worst.max(d);
        ensure(d <= tol, || format!("k = {}: got {g:.5}, table {w:.5}", 2 * j + 1))?;
    }
    Ok(worst)
}

const CUBIC_M1: [f64; 5] = [1.0, 0.03282, -0.00098, -0.00036, -0.00003];
const CUBIC_M3: [f64; 8] = [1.0, -0.04629, -0.00472, -0.00269, 0.00056, 0.00010, 0.00007, -0.00002];
const CUBIC_M5: [f64; 10] = [1.0, -0.03991, 0.00359, 0.00161, -0.00168, -0.00043, -0.00028, 0.00012, 0.00001, 0.00001];
const CUBIC_M7: [f64; 11] =
    [1.0, -0.03335, 0.00885, 0.00445, -0.00334, -0.00039, -0.00028, -0.00013, -0.00011, -0.00008, -0.00005];
const CRISSCROSS: [[f64; 3]; 8] = [
    [1.09764, 0.10896, -0.98868],
    [-0.02809, 0.03251, -0.00442],
    [0.00724, -0.00376, -0.01100],
    [-0.00121, 0.00131, -0.00010],
    [0.00040, -0.00029, -0.00069],
    [-0.00010, 0.00010, -0.00001],
    [0.00003, -0.00003, -0.00006],
    [-0.00001, 0.00001, 0.00000],
];

fn criterion_1() -> Check {
    let (model, seed) = two_body_model(9, |t| [0.9 * t.cos() + 0.05 * (3.0 * t).cos(), 0.7 * t.sin(), 0.0]);
    let r = converge(&model, &seed)?;
    let full = model.expand(&r.params).map_err(e2s)?;
    let want = 2f64.powf(-2.0 / 3.0);
    let (ax, ay) = (full[0].cos_coeff(1), full[1].sin_coeff(1));
    ensure((ax - want).abs() <= 1e-4 && (ay - want).abs() <= 1e-4, || format!("a_1 = ({ax}, {ay}), want {want}"))?;
    let res = r.residual.unwrap();
    ensure(res <= 1e-8, || format!("residual {res:.3e} > 1e-8"))?;
    Ok(format!("a_1 = {ax:.6}, residual {res:.1e}"))
}

fn criterion_2(m1: &RunResult) -> Check {
    let got = normalized_cubic(&m1.params);
    let worst = compare_column(&got[..5], &CUBIC_M1, 0.002)?;
    let res = m1.residual.unwrap();
    ensure(res <= 1e-5, || format!("residual {res:.3e} > 1e-5 at k_max = 27"))?;
    Ok(format!("max table deviation {worst:.1e}, residual {res:.1e}"))
}

fn criterion_3(model: &OrbitModel, m1: &RunResult) -> Check {
    let s = extract_ics(model, &m1.params).map_err(e2s)?;
    let x_ref = Vector3::new(0.0, -0.69548, 0.69548);
    let v_ref = Vector3::new(0.87546, -0.31950, -0.31950);
    let mut best = f64::INFINITY;
    for g in all_signed_permutations() {
        for (x, v) in s.positions.iter().zip(&s.velocities) {
            let d = (g.apply(x) - x_ref).amax().max((g.apply(v) - v_ref).amax());
            best = best.min(d);
        }
    }
    ensure(best <= 1e-4, || format!("closest body state differs by {best:.2e}"))?;
    // scale from the tabulated spectrum and the tabulated velocity
    let k_sum: f64 = CUBIC_M1.iter().enumerate().map(|(j, a)| (2 * j + 1) as f64 * a).sum();
    let scale = 0.87546 / k_sum;
    let y: f64 = CUBIC_M1.iter().enumerate().map(|(j, a)| a * (TAU * (2 * j + 1) as f64 / 3.0).sin()).sum();
    let y0 = (scale * y).abs();
    ensure((y0 - 0.69548).abs() <= 1e-4, || format!("derived |y(0)| = {y0:.5}"))?;
    Ok(format!("ICs within {best:.1e}; derived |y(0)| = {y0:.5}"))
}

fn criterion_4(m1_model: &OrbitModel, m1: &RunResult) -> Check {
    let times: Vec<f64> = (0..64).map(|j| TAU * j as f64 / 64.0).collect();
    let (m3_model, seed) = build_cubic_family(3).map_err(e2s)?;
    let m3 = converge(&m3_model, &seed)?;
    let mut jmax: f64 = 0.0;
    for (model, params) in [(m1_model, &m1.params), (&m3_model, &m3.params)] {
        let s = model.sample_times(params, &times).map_err(e2s)?;
        for j in 0..times.len() {
            let o = observables(&model.potential, &model.masses(), s.positions_at(j), s.velocities_at(j)).map_err(e2s)?;
            jmax = jmax.max(o.angular_momentum.amax());
        }
    }
    ensure(jmax <= 1e-10, || format!("|J| reaches {jmax:.2e}"))?;
    let s = m3_model.sample_times(&m3.params, &times).map_err(e2s)?;
    let (mut qmax, mut spread, mut imin, mut imax) = (0f64, 0f64, f64::INFINITY, 0f64);
    for j in 0..times.len() {
        let o = observables(&m3_model.potential, &m3_model.masses(), s.positions_at(j), s.velocities_at(j)).map_err(e2s)?;
        qmax = qmax.max(o.quadrupole_max());
        spread = spread.max(o.inertia_spread());
        imin = imin.min(o.scalar_inertia());
        imax = imax.max(o.scalar_inertia());
    }
    ensure(qmax <= 1e-8, || format!("m = 3 |Q|max = {qmax:.2e}"))?;
    ensure(spread <= 1e-8, || format!("m = 3 inertia spread = {spread:.2e}"))?;
    let var = (imax - imin) / imax;
    ensure(var >= 1e-3, || format!("I(t) varies only by {var:.2e}"))?;
    Ok(format!("|J| {jmax:.1e}, m=3 |Q| {qmax:.1e}, spread {spread:.1e}, I variation {var:.1e}"))
}

fn criterion_5(m3_a3: f64) -> Check {
    let mut a3 = vec![m3_a3];
    let mut worst: f64 = 0.0;
    for (m, table) in [(5usize, &CUBIC_M5[..]), (7, &CUBIC_M7[..])] {
        let (model, seed) = build_cubic_family(m).map_err(e2s)?;
        let r = converge(&model, &seed)?;
        let got = normalized_cubic(&r.params);
        worst = worst.max(compare_column(&got[..table.len()], table, 0.002).map_err(|e| format!("m = {m}: {e}"))?);
        a3.push(got[1]);
    }
    let band = -0.02235;
    ensure(a3[0] < a3[1] && a3[1] < a3[2] && a3[2] < band, || format!("a_3 for m = 3, 5, 7: {a3:.5?}"))?;
    Ok(format!("max table deviation {worst:.1e}; a_3 = {:.5} -> {:.5} -> {:.5}", a3[0], a3[1], a3[2]))
}

fn criterion_6(cc_model: &OrbitModel, cc: &RunResult) -> Check {
    let table = coefficient_table(cc_model, &cc.params).map_err(e2s)?;
    let mut worst: f64 = 0.0;
    for (j, row) in CRISSCROSS.iter().enumerate() {
        let k = 2 * j + 1;
        for (c, want) in ["a_1,k", "b_1,k", "a_3,k"].iter().zip(row) {
            let got = table.value(c, k).ok_or_else(|| format!("missing {c} at k = {k}"))?;
            let d = (got - want).abs();
            worst = worst.max(d);
            ensure(d <= 1e-3, || format!("{c} at k = {k}: got {got:.5}, table {want:.5}"))?;
        }
    }
    let full = cc_model.expand(&cc.params).map_err(e2s)?;
    let sum: f64 = full[0].cos_coeffs().iter().sum();
    ensure((sum - 1.07590).abs() <= 1e-4, || format!("sum of a_1,k = {sum:.5}"))?;
    let (model, seed) = build_crisscross([1.0, 2.0, 3.0]).map_err(e2s)?;
    let r = converge(&model, &seed)?;
    Ok(format!("24 entries within {worst:.1e}; x_1(0) = {sum:.5}; 1:2:3 converged in {} iterations", r.iterations))
}

fn criterion_7(cc_model: &OrbitModel, cc: &RunResult, m1_model: &OrbitModel, m1: &RunResult) -> Check {
    let opts = PerturbOptions::default();
    let z = Vector3::zeros();
    let kicks = [Vector3::new(0.001, 0.0, 0.0), Vector3::new(0.005, 0.0, 0.0), Vector3::new(0.0, 0.0, 0.005)];
    let devs: Vec<_> = kicks.iter().map(|d| vec![*d, z, z]).collect();
    let mut parts = Vec::new();
    for (kick, rep) in kicks.iter().zip(perturb_many(cc_model, &cc.params, &devs, 40, &opts)) {
        let rep = rep.map_err(e2s)?;
        ensure(rep.is_consistent(), || "verdict inconsistent with maximum".into())?;
        ensure(rep.bounded(), || format!("kick {:?} exited: {:?} (max {:.2e})", kick.as_slice(), rep.verdict, rep.max_deviation))?;
        parts.push(format!("{:.1e}/{:.1e}", rep.max_deviation, rep.envelope));
    }
    let mut dev = vec![z; m1_model.n_bodies()];
    dev[0] = kicks[0];
    let rep = perturb_and_track(m1_model, &m1.params, &dev, 10, &opts).map_err(e2s)?;
    let exit = match rep.verdict {
        periodic_orbits::integrator::Verdict::Exited { period, .. } if period <= 10.0 => period,
        v => return Err(format!("cubic m = 1 stayed {v:?} (max {:.2e})", rep.max_deviation)),
    };
    Ok(format!("criss-cross bounded ({}); cubic exits at {exit:.2} periods", parts.join(", ")))
}

fn criterion_8(m1_model: &OrbitModel, m1: &RunResult, cc_model: &OrbitModel, cc: &RunResult) -> Check {
    // analytic vs finite-difference gradient
    let mut rng = ChaCha8Rng::seed_from_u64(20260101);
    let small = FamilyOptions::default().with_k_max(11);
    let families: Vec<(OrbitModel, ReducedParams)> = vec![
        build_cubic_family_with(1, &small).unwrap(),
        build_cubic_family_with(3, &small).unwrap(),
        build_crisscross_with([1.0; 3], &small).unwrap(),
        build_crisscross_with([1.0, 2.0, 3.0], &small).unwrap(),
        two_body_model(11, |t| [0.6 * t.cos(), 0.6 * t.sin(), 0.0]),
        build_cubic_family_with(1, &small.with_potential(PotentialSpec::strong_force())).unwrap(),
        build_cubic_family_with(1, &small.with_potential(PotentialSpec::new(0.5, 1.0).unwrap())).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let (model, seed) = &families[trial % families.len()];
        let values = seed
            .values
            .iter()
            .enumerate()
            .map(|(slot, v)| {
                let k = model.reduction().slot_harmonic(slot) as f64;
                v + rng.gen_range(-0.15..0.15) / k
            })
            .collect();
        let p = seed.with_values(values).unwrap();
        let grid = QuadratureGrid::for_k_max(model.k_max());
        let g = gradient(model, &p, &grid).map_err(e2s)?;
        let fd = fd_gradient_oracle(model, &p, &grid, 1e-5).map_err(e2s)?;
        let scale = g.iter().fold(0f64, |m, x| m.max(x.abs()));
        let err = g.iter().zip(&fd).fold(0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
        worst = worst.max(err);
        ensure(err <= 1e-6, || format!("trial {trial}: relative gradient error {err:.2e}"))?;
    }

    // fourth-order convergence and conservation on converged orbits
    let s0 = extract_ics(m1_model, &m1.params).map_err(e2s)?;
    let ratio = order_ratio(&s0, &m1_model.masses(), &m1_model.potential, TAU / 400.0, TAU).map_err(e2s)?;
    ensure((12.0..=20.0).contains(&ratio), || format!("RK4 ratio {ratio:.2}"))?;
    let mut drift: f64 = 0.0;
    for (model, params) in [(m1_model, &m1.params), (cc_model, &cc.params)] {
        let s = extract_ics(model, params).map_err(e2s)?;
        let traj = integrate(&s, &model.masses(), &model.potential, DEFAULT_DT, TAU, 100).map_err(e2s)?;
        drift = drift.max(traj.relative_energy_drift()).max(traj.angular_momentum_drift());
    }
    ensure(drift <= 1e-9, || format!("energy/J drift {drift:.2e} per period"))?;

    // zig-zag instability of the position-space scheme
    let n = 64;
    let r = 2f64.powf(-2.0 / 3.0);
    let paths = TimePaths::from_fn(2, n, |i, t| {
        let s = if i == 0 { 1.0 } else { -1.0 };
        let j = (t / TAU * n as f64).round() as usize;
        Vector3::new(s * r * t.cos() + if j % 2 == 0 { 1e-6 } else { -1e-6 }, s * r * t.sin(), 0.0)
    });
    let bound = naive_stability_bound(n, 1.0);
    let spec = PotentialSpec::newtonian();
    let (_, below) = naive_time_descent(&paths, &[1.0, 1.0], &spec, 0.9 * bound, 50).map_err(e2s)?;
    let (_, above) = naive_time_descent(&paths, &[1.0, 1.0], &spec, 1.1 * bound, 50).map_err(e2s)?;
    ensure(!below.zigzag_growing() && above.zigzag_growing(), || {
        format!("growth below {:.3}, above {:.3}", below.growth_per_step, above.growth_per_step)
    })?;

    // symmetry at every descent iteration
    let mut sym_worst: f64 = 0.0;
    let mut sym_fail = None;
    for (model, seed) in [build_cubic_family(1).unwrap(), build_cubic_family(3).unwrap(), build_crisscross([1.0; 3]).unwrap()] {
        let grid = QuadratureGrid::for_k_max(model.k_max());
        run_with_observer(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid, |it, p, _| {
            match model.verify_symmetry(p, &grid, 1e-12) {
                Ok(rep) => {
                    sym_worst = sym_worst.max(rep.max_distance());
                    if !rep.passed() && sym_fail.is_none() {
                        sym_fail = Some(format!("{} iteration {it}: {:.2e}", model.family.name(), rep.max_distance()));
                    }
                }
                Err(e) => sym_fail = Some(e.to_string()),
            }
        })
        .map_err(e2s)?;
    }
    if let Some(f) = sym_fail {
        return Err(f);
    }
    Ok(format!(
        "gradient {worst:.1e}, RK4 ratio {ratio:.2}, drift {drift:.1e}, zig-zag {:.2}/{:.2}, symmetry {sym_worst:.1e}",
        below.growth_per_step, above.growth_per_step
    ))
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |n: u32, name: &str, result: Check, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n} PASS {name} ({secs:.1} s): {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {n} FAIL {name} ({secs:.1} s): {why}");
            }
        }
    };

    let t = Instant::now();
    report(1, "two-body circular oracle", criterion_1(), t);

    let t = Instant::now();
    let (m1_model, seed) = build_cubic_family(1).unwrap();
    let m1 = converge(&m1_model, &seed);
    let (cc_model, seed) = build_crisscross([1.0; 3]).unwrap();
    let cc = converge(&cc_model, &seed);
    let (m3_model, seed) = build_cubic_family(3).unwrap();
    let m3 = converge(&m3_model, &seed);
    let shared_secs = t.elapsed();

    let with = |r: &Result<RunResult, String>, f: &dyn Fn(&RunResult) -> Check| match r {
        Ok(r) => f(r),
        Err(e) => Err(format!("descent failed: {e}")),
    };

    let t = Instant::now() - shared_secs;
    report(2, "cubic reference coefficients, m = 1", with(&m1, &|r| criterion_2(r)), t);
    let t = Instant::now();
    report(3, "initial conditions of the m = 1 orbit", with(&m1, &|r| criterion_3(&m1_model, r)), t);
    let t = Instant::now();
    report(4, "conservation and symmetry observables", with(&m1, &|r| criterion_4(&m1_model, r)), t);
    let t = Instant::now();
    let m3_a3 = m3.as_ref().map(|r| normalized_cubic(&r.params)[1]);
    let c5 = match (&m3, m3_a3) {
        (Ok(r), Ok(a3)) => compare_column(&normalized_cubic(&r.params)[..8], &CUBIC_M3, 0.002)
            .map_err(|e| format!("m = 3: {e}"))
            .and_then(|_| criterion_5(a3)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    report(5, "cubic reference coefficients, m = 3, 5, 7 and a_3 trend", c5, t);
    let t = Instant::now();
    report(6, "criss-cross reference coefficients", with(&cc, &|r| criterion_6(&cc_model, r)), t);
    let t = Instant::now();
    let c7 = match (&cc, &m1) {
        (Ok(c), Ok(m)) => criterion_7(&cc_model, c, &m1_model, m),
        _ => Err("descent failed".into()),
    };
    report(7, "stability experiments", c7, t);
    let t = Instant::now();
    let c8 = match (&cc, &m1) {
        (Ok(c), Ok(m)) => criterion_8(&m1_model, m, &cc_model, c),
        _ => Err("descent failed".into()),
    };
    report(8, "property suite", c8, t);

    println!("acceptance: {} of 8 passed in {:.1} s", 8 - failures, start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
