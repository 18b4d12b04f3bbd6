//! Criss-cross with masses in the ratio 1:2:3. Without the equal-mass
//! couplings every coefficient is free; the seed is shifted to the centre
//! of mass.
//!
//! `cargo run --release --example crisscross_unequal -- 1,2,3`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::export::coefficient_table;
use periodic_orbits::symmetry::build_crisscross;
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "1,2,3".into());
    let m: Vec<f64> = arg.split(',').map(str::parse).collect::<Result<_, _>>()?;
    let masses: [f64; 3] = m.try_into().map_err(|_| "expected three masses")?;
    let (model, seed) = build_crisscross(masses)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    println!("masses {masses:?}: {:?} after {} iterations", res.outcome, res.iterations);
    println!("{} free coefficients, residual {:.3e}", res.params.len(), res.residual.unwrap_or(f64::NAN));
    print!("{}", coefficient_table(&model, &res.params)?);
    Ok(())
}
