//! Periodic n-body orbits as minimizers of the action over symmetry-constrained
//! Fourier series.
//!
//! Orbits have period `2π`. Each body's coordinates are truncated Fourier
//! series; a symmetry group ties the bodies and coordinates together so that
//! only a reduced set of coefficients is free. Preconditioned gradient descent
//! on those coefficients drives the action to a stationary point, which an
//! RK4 integrator then checks against the equations of motion.

pub mod action;
pub mod cli;
pub mod descent;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod fourier;
pub mod integrator;
pub mod record;
pub mod symmetry;

pub use action::{evaluate, ActionReport, QuadratureGrid};
pub use descent::{run, DescentSchedule, Outcome, RunResult, StopCriteria};
pub use dynamics::{observables, residual, Observables, PotentialSpec};
pub use error::{Error, Result};
pub use fourier::{Basis, FourierSeries, Parity, ScalingLaw};
pub use symmetry::{Family, OrbitModel, ReducedParams};
pub use integrator::{extract_ics, integrate, perturb_and_track, return_error, PhaseState};
pub use record::OrbitRecord;
