//! Independent check of a converged orbit by RK4 integration: one-period
//! return error, fourth-order convergence, and conservation of E and J.
//!
//! `cargo run --release --example verify_orbit`

use std::f64::consts::TAU;

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::integrator::{extract_ics, integrate, order_ratio, return_error, DEFAULT_DT};
use periodic_orbits::symmetry::build_cubic_family;
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (model, seed) = build_cubic_family(1)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let p = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?.params;
    let s0 = extract_ics(&model, &p)?;
    println!("body 1 at t = 0: x = {:.5?}, v = {:.5?}", s0.positions[0].as_slice(), s0.velocities[0].as_slice());
    println!("return error after one period: {:.3e}", return_error(&model, &p, DEFAULT_DT)?);
    let ratio = order_ratio(&s0, &model.masses(), &model.potential, TAU / 400.0, TAU)?;
    println!("error ratio for halved steps:  {ratio:.2}");
    let traj = integrate(&s0, &model.masses(), &model.potential, DEFAULT_DT, TAU, 100)?;
    println!("relative energy drift:         {:.3e}", traj.relative_energy_drift());
    println!("angular momentum drift:        {:.3e}", traj.angular_momentum_drift());
    Ok(())
}
