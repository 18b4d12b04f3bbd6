//! The planar criss-cross for three equal masses: coefficient table and the
//! initial conditions it implies.
//!
//! `cargo run --release --example crisscross`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::export::coefficient_table;
use periodic_orbits::integrator::extract_ics;
use periodic_orbits::symmetry::build_crisscross;
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (model, seed) = build_crisscross([1.0; 3])?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    println!("{:?} after {} iterations, residual {:.3e}", res.outcome, res.iterations, res.residual.unwrap_or(f64::NAN));
    print!("{}", coefficient_table(&model, &res.params)?);
    let s = extract_ics(&model, &res.params)?;
    for (i, (x, v)) in s.positions.iter().zip(&s.velocities).enumerate() {
        println!("body {}: x = ({:>8.5}, {:>8.5})  v = ({:>8.5}, {:>8.5})", i + 1, x.x, x.y, v.x, v.y);
    }
    Ok(())
}
