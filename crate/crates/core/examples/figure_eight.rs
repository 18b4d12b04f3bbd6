//! Recipe for a family outside the built-in ones: three equal masses chasing
//! each other around a figure eight.
//!
//! Both planar coordinates are sine series over all harmonics, the bodies
//! are a third of a period apart, and the seed is the lemniscate
//! `(sin t, sin 2t / 2)`. The same steps apply to any choreography: pick the
//! coordinate shapes, project a seed curve, descend, then verify.
//!
//! `cargo run --release --example figure_eight`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::fourier::Parity;
use periodic_orbits::integrator::{return_error, DEFAULT_DT};
use periodic_orbits::symmetry::{build_choreography, CoordinateShape, FamilyOptions};
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let opts = FamilyOptions::default().with_k_max(31);
    let sine = Some(CoordinateShape::sin_only(Parity::All));
    let (model, seed) = build_choreography(3, [sine, sine, None], |t| [t.sin(), 0.5 * (2.0 * t).sin(), 0.0], &opts)?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    println!("{:?} after {} iterations", res.outcome, res.iterations);
    println!("action    {:.8}", res.action_trace.last().unwrap());
    println!("residual  {:.3e}", res.residual.unwrap_or(f64::NAN));
    println!("return    {:.3e}", return_error(&model, &res.params, DEFAULT_DT)?);
    let full = model.expand(&res.params)?;
    for k in 1..=5 {
        println!("k = {k}: x {:>9.5}  y {:>9.5}", full[0].sin_coeff(k), full[1].sin_coeff(k));
    }
    Ok(())
}
