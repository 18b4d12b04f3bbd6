//! Observables along a cubic orbit. With `m` a multiple of 3 the symmetry
//! group acts irreducibly, so the inertia tensor is scalar and the
//! quadrupole vanishes, while the scalar moment of inertia still varies.
//!
//! `cargo run --release --example cubic_observables -- 3`

use std::f64::consts::TAU;

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::symmetry::build_cubic_family;
use periodic_orbits::{observables, QuadratureGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: usize = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let (model, seed) = build_cubic_family(m)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    println!("m = {m}: {:?}, spatial group of order {}", res.outcome, model.spatial_group().len());
    let times: Vec<f64> = (0..16).map(|j| TAU * j as f64 / 16.0).collect();
    let s = model.sample_times(&res.params, &times)?;
    let masses = model.masses();
    println!("{:>8} {:>12} {:>10} {:>10} {:>10}", "t", "I", "|J|", "|Q|max", "spread");
    for (j, t) in times.iter().enumerate() {
        let o = observables(&model.potential, &masses, s.positions_at(j), s.velocities_at(j))?;
        println!(
            "{t:>8.4} {:>12.8} {:>10.2e} {:>10.2e} {:>10.2e}",
            o.scalar_inertia(),
            o.angular_momentum.norm(),
            o.quadrupole_max(),
            o.inertia_spread()
        );
    }
    Ok(())
}
