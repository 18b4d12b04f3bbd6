//! Negative entries in a custom schedule reverse the flow along their
//! harmonics: a stationary point that attracts plain descent along a
//! harmonic repels along it, and a direction of negative curvature becomes
//! attracting. Near the two-body circle, a minimum, the two schedules part
//! ways.
//!
//! `cargo run --release --example saddle_search`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::fourier::Parity;
use periodic_orbits::symmetry::{build_choreography, CoordinateShape, FamilyOptions};
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = FamilyOptions::default().with_k_max(7);
    let r = 2f64.powf(-2.0 / 3.0);
    let (model, seed) = build_choreography(
        2,
        [Some(CoordinateShape::cos_only(Parity::OddOnly)), Some(CoordinateShape::sin_only(Parity::OddOnly)), None],
        |t| [(r + 0.01) * t.cos(), r * t.sin(), 0.0],
        &opts,
    )?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let stop = StopCriteria { max_iters: 2000, ..StopCriteria::default() };
    for (name, schedule) in [
        ("descend all", DescentSchedule::saddle(0.05, model.reduction(), &[])),
        ("ascend k = 1", DescentSchedule::saddle(0.05, model.reduction(), &[1])),
    ] {
        let res = run(&model, &seed, &schedule, &stop, &grid)?;
        println!(
            "{name:>13}: {:?} after {} iterations, action {:.6} -> {:.6}",
            res.outcome,
            res.iterations,
            res.action_trace[0],
            res.action_trace.last().unwrap()
        );
    }
    Ok(())
}
