//! Persist a converged orbit, load it back (re-verifying the residual) and
//! print its coefficient table.
//!
//! `cargo run --release --example records -- orbit.json`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::export::coefficient_table;
use periodic_orbits::symmetry::build_cubic_family;
use periodic_orbits::{OrbitRecord, QuadratureGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "cubic_m1.json".into());
    let (model, seed) = build_cubic_family(1)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let (schedule, stop) = (DescentSchedule::default(), StopCriteria::default());
    let res = run(&model, &seed, &schedule, &stop, &grid)?;
    let record = OrbitRecord::from_run(&model, &res, &schedule, &stop, &grid)?;
    record.save(path.as_ref())?;
    let back = OrbitRecord::load(path.as_ref())?;
    println!("wrote {path}; reloaded equal: {}", back == record);
    let (model, params) = back.model()?;
    print!("{}", coefficient_table(&model, &params)?);
    Ok(())
}
