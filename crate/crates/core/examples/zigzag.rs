//! Descent directly on sampled positions. The alternating mode is damped
//! below `δτ = h²/2m` and grows geometrically above it.
//!
//! `cargo run --release --example zigzag`

use std::f64::consts::TAU;

use nalgebra::Vector3;
use periodic_orbits::descent::{naive_stability_bound, naive_time_descent, TimePaths};
use periodic_orbits::PotentialSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 64;
    let r = 0.63;
    let paths = TimePaths::from_fn(2, n, |i, t| {
        let s = if i == 0 { 1.0 } else { -1.0 };
        let j = (t / TAU * n as f64).round() as usize;
        let noise = if j % 2 == 0 { 1e-6 } else { -1e-6 };
        Vector3::new(s * r * t.cos() + noise, s * r * t.sin(), 0.0)
    });
    let bound = naive_stability_bound(n, 1.0);
    println!("step bound h²/2m = {bound:.4e}");
    for factor in [0.5, 0.9, 1.1, 1.5] {
        let (_, diag) = naive_time_descent(&paths, &[1.0, 1.0], &PotentialSpec::newtonian(), factor * bound, 30)?;
        println!(
            "δτ = {factor:.1}× bound: growth per step {:.3}, final amplitude {:.2e}",
            diag.growth_per_step,
            diag.nyquist.last().unwrap()
        );
    }
    Ok(())
}
