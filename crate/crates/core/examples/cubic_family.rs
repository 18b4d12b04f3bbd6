//! Minimize the action for the cubic family and print its odd-sine spectrum
//! normalized to `a_1 = 1`.
//!
//! `cargo run --release --example cubic_family -- 3`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::symmetry::build_cubic_family;
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let m: usize = std::env::args().nth(1).map_or(Ok(1), |s| s.parse())?;
    let (model, seed) = build_cubic_family(m)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    println!("m = {m}: {:?} after {} iterations, S = {:.10}", res.outcome, res.iterations, res.action_trace.last().unwrap());
    println!("grad {:.3e}  residual {:.3e}", res.grad_norm, res.residual.unwrap_or(f64::NAN));
    let a1 = res.params.values[0];
    println!("scale a_1 = {a1:.5}");
    for (slot, a) in res.params.values.iter().enumerate().take(6) {
        let k = model.reduction().slot_harmonic(slot);
        println!("a_{k:<2} = {:>9.5}", a / a1);
    }
    Ok(())
}
