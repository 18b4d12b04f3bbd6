//! Two equal masses on a circle: the one orbit with a closed form.
//!
//! Force balance `1/d² = r` with `d = 2r` gives `r = 2^{-2/3}`. Descent from
//! a perturbed circle has to land there.
//!
//! `cargo run --release --example two_body`

use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::fourier::Parity;
use periodic_orbits::symmetry::{build_choreography, CoordinateShape, FamilyOptions};
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = FamilyOptions::default().with_k_max(9);
    let (model, seed) = build_choreography(
        2,
        [Some(CoordinateShape::cos_only(Parity::OddOnly)), Some(CoordinateShape::sin_only(Parity::OddOnly)), None],
        |t| [0.9 * t.cos() + 0.05 * (3.0 * t).cos(), 0.7 * t.sin(), 0.0],
        &opts,
    )?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let res = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?;
    let full = model.expand(&res.params)?;
    println!("{:?} after {} iterations", res.outcome, res.iterations);
    println!("a_1 x      {:.9}", full[0].cos_coeff(1));
    println!("a_1 y      {:.9}", full[1].sin_coeff(1));
    println!("2^(-2/3)   {:.9}", 2f64.powf(-2.0 / 3.0));
    println!("residual   {:.3e}", res.residual.unwrap_or(f64::NAN));
    Ok(())
}
