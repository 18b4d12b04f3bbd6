//! Displace one body and integrate: the criss-cross stays close to its
//! orbit for 40 periods, the cubic orbit leaves within a few.
//!
//! `cargo run --release --example perturbation_study`

use nalgebra::Vector3;
use periodic_orbits::descent::{run, DescentSchedule, StopCriteria};
use periodic_orbits::integrator::{perturb_and_track, perturb_many, PerturbOptions};
use periodic_orbits::symmetry::{build_crisscross, build_cubic_family};
use periodic_orbits::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = PerturbOptions::default();
    let (model, seed) = build_crisscross([1.0; 3])?;
    let grid = QuadratureGrid::for_k_max(model.k_max());
    let cc = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?.params;
    let z = Vector3::zeros();
    let kicks = [Vector3::new(0.001, 0.0, 0.0), Vector3::new(0.005, 0.0, 0.0), Vector3::new(0.0, 0.0, 0.005)];
    let devs: Vec<_> = kicks.iter().map(|d| vec![*d, z, z]).collect();
    println!("criss-cross, 40 periods");
    for rep in perturb_many(&model, &cc, &devs, 40, &opts) {
        let rep = rep?;
        println!(
            "  kick {:?}: orbital {:.2e}, matched {:.2e}, z extent {:.2e}, {:?}",
            rep.deviation[0].as_slice(),
            rep.max_deviation,
            rep.max_matched_deviation,
            rep.z_extent,
            rep.verdict
        );
    }

    let (model, seed) = build_cubic_family(1)?;
    let cubic = run(&model, &seed, &DescentSchedule::default(), &StopCriteria::default(), &grid)?.params;
    let mut dev = vec![z; model.n_bodies()];
    dev[0] = kicks[0];
    let rep = perturb_and_track(&model, &cubic, &dev, 10, &opts)?;
    println!("cubic m = 1, 10 periods: {:?}", rep.verdict);
    for s in rep.series.iter().step_by(opts.samples_per_period / 2) {
        println!("  t/T {:>5.2}  orbital {:.2e}", s[0], s[1]);
    }
    Ok(())
}
