//! `orbitctl`: build, minimize, verify, perturb and export orbits.
//!
//! Exit status: 0 success, 1 usage error, 2 collision, 3 escape,
//! 4 non-convergence.

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use crate::action::QuadratureGrid;
use crate::descent::{run, DescentSchedule, Outcome, StopCriteria, DEFAULT_DELTA};
use crate::dynamics::{observables, residual, PotentialSpec};
use crate::error::{Error, Result};
use crate::export::coefficient_table;
use crate::fourier::DEFAULT_K_MAX;
use crate::integrator::{extract_ics, integrate, perturb_and_track, return_error, ExitCause, PerturbOptions, Verdict, DEFAULT_DT};
use crate::record::{build_family, OrbitRecord};
use crate::symmetry::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 1,
    Collision = 2,
    Escape = 3,
    NotConverged = 4,
}

impl From<&Outcome> for Status {
    fn from(o: &Outcome) -> Self {
        match o {
            Outcome::Converged => Status::Success,
            Outcome::Collision { .. } => Status::Collision,
            Outcome::Escape { .. } => Status::Escape,
            Outcome::MaxIters => Status::NotConverged,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "orbitctl", version, about = "Symmetric periodic n-body orbits by action minimization")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a family and write its seed record.
    Seed {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run descent from a seed (record or family flags) and write the result.
    Minimize {
        #[arg(long, conflicts_with = "family")]
        record: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        descent: DescentArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Residual, symmetry and one-period return error of a record.
    Verify {
        record: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Largest acceptable return error.
        #[arg(long, default_value_t = 1e-3)]
        return_tol: f64,
    },
    /// Displace one body and track the integrated orbit.
    Perturb {
        record: PathBuf,
        /// Body index, starting at 1.
        #[arg(long, default_value_t = 1)]
        body: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dx: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dy: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        dz: f64,
        #[arg(long, default_value_t = 40)]
        periods: usize,
        /// Defaults to 100 times the displacement.
        #[arg(long)]
        envelope: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Write `t/T, orbital deviation, matched deviation, x, y, z` of the tracked body.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Observables along the Fourier orbit: I, J, E, |Q|max, inertia spread.
    Observe {
        record: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Coefficient table, 5 decimals.
    ExportTable {
        record: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Integrated trajectory as delimited text.
    ExportTraj {
        record: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        periods: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Record every this many steps.
        #[arg(long, default_value_t = 100)]
        stride: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Cubic,
    Crisscross,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    /// Bodies per loop (cubic family).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Three comma-separated masses (criss-cross).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    masses: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScheduleKind {
    Preconditioned,
    Uniform,
}

#[derive(Args, Debug)]
struct DescentArgs {
    #[arg(long, value_enum, default_value_t = ScheduleKind::Preconditioned)]
    schedule: ScheduleKind,
    /// `δ` for the preconditioned schedule, `δτ` for the uniform one.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 1e-10)]
    grad_tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 50.0)]
    escape_radius: f64,
    #[arg(long, default_value_t = 1000)]
    log_interval: usize,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        match self.family {
            Some(FamilyKind::Cubic) => Ok(Family::Cubic { m: self.m }),
            Some(FamilyKind::Crisscross) => {
                let masses: [f64; 3] = self
                    .masses
                    .clone()
                    .try_into()
                    .map_err(|_| Error::InvalidArgument("--masses takes three values".into()))?;
                Ok(Family::CrissCross { masses })
            }
            None => Err(Error::InvalidArgument("--family is required".into())),
        }
    }

    fn seed(&self) -> Result<OrbitRecord> {
        let potential = PotentialSpec::new(self.alpha, self.g)?;
        let (model, params) = build_family(&self.family()?, 1.0, potential, self.k_max)?;
        OrbitRecord::seed(&model, &params)
    }
}

impl DescentArgs {
    fn schedule(&self) -> DescentSchedule {
        match self.schedule {
            ScheduleKind::Preconditioned => DescentSchedule::Preconditioned(self.delta),
            ScheduleKind::Uniform => DescentSchedule::Uniform(self.delta),
        }
    }

    fn stop(&self) -> StopCriteria {
        StopCriteria {
            grad_tol: self.grad_tol,
            max_iters: self.max_iters,
            escape_radius: self.escape_radius,
            log_interval: self.log_interval,
            ..StopCriteria::default()
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Usage } else { Status::Success };
        }
    };
    match execute(cli.command, out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CollisionParity { .. } | Error::Collision { .. } => Status::Collision,
                _ => Status::Usage,
            }
        }
    }
}

fn sink(path: &Option<PathBuf>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

fn save_or_print(record: &OrbitRecord, path: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => record.save(p),
        None => {
            writeln!(out, "{}", record.to_json()?)?;
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<OrbitRecord> {
    OrbitRecord::load(path)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<Status> {
    match command {
        Command::Seed { family, output } => {
            let record = family.seed()?;
            save_or_print(&record, &output, out)?;
            Ok(Status::Success)
        }
        Command::Minimize { record, family, descent, output } => {
            let seed = match record {
                Some(p) => OrbitRecord::from_json(&std::fs::read_to_string(p)?)?,
                None => family.seed()?,
            };
            let (model, params) = seed.model()?;
            let grid = QuadratureGrid::for_k_max(model.k_max());
            let (schedule, stop) = (descent.schedule(), descent.stop());
            let result = run(&model, &params, &schedule, &stop, &grid)?;
            let record = OrbitRecord::from_run(&model, &result, &schedule, &stop, &grid)?;
            eprintln!(
                "{:?} after {} iterations; S = {:.10}, grad = {:.3e}, residual = {}",
                result.outcome,
                result.iterations,
                record.action.unwrap_or(f64::NAN),
                result.grad_norm,
                result.residual.map_or("n/a".into(), |r| format!("{r:.3e}")),
            );
            if result.converged() && !result.certified {
                eprintln!("warning: residual above {:.0e}; raise --k-max to certify", stop.certify_tol);
            }
            save_or_print(&record, &output, out)?;
            Ok(Status::from(&result.outcome))
        }
        Command::Verify { record, dt, return_tol } => {
            let rec = load(&record)?;
            let (model, params) = rec.model()?;
            let grid = rec.grid()?;
            let res = residual(&model, &params, &grid)?;
            let sym = model.verify_symmetry(&params, &grid, 1e-12)?;
            let ret = return_error(&model, &params, dt)?;
            writeln!(out, "family        {}", rec.family.name())?;
            writeln!(out, "outcome       {:?}", rec.outcome)?;
            writeln!(out, "residual      {:.3e}", res.max_abs)?;
            writeln!(out, "certified     {}", rec.certified)?;
            writeln!(out, "symmetry      {} (max {:.3e})", if sym.passed() { "ok" } else { "FAILED" }, sym.max_distance())?;
            writeln!(out, "return error  {ret:.3e}")?;
            let ok = rec.converged() && sym.passed() && ret <= return_tol;
            Ok(if ok { Status::Success } else { Status::NotConverged })
        }
        Command::Perturb { record, body, dx, dy, dz, periods, envelope, dt, csv } => {
            let rec = load(&record)?;
            let (model, params) = rec.model()?;
            if body == 0 || body > model.n_bodies() {
                return Err(Error::InvalidArgument(format!("--body must be in 1..={}", model.n_bodies())));
            }
            let mut dev = vec![Vector3::zeros(); model.n_bodies()];
            dev[body - 1] = Vector3::new(dx, dy, dz);
            let opts = PerturbOptions { dt, envelope, ..PerturbOptions::default() };
            let rep = perturb_and_track(&model, &params, &dev, periods, &opts)?;
            writeln!(out, "periods            {}", rep.n_periods)?;
            writeln!(out, "envelope           {:.3e}", rep.envelope)?;
            writeln!(out, "orbital deviation  {:.3e}", rep.max_deviation)?;
            writeln!(out, "matched deviation  {:.3e}", rep.max_matched_deviation)?;
            writeln!(out, "z extent           {:.3e}", rep.z_extent)?;
            writeln!(out, "verdict            {:?}", rep.verdict)?;
            if let Some(p) = &csv {
                let mut w = csv::Writer::from_path(p).map_err(|e| Error::Io(e.to_string()))?;
                w.write_record(["period", "orbital", "matched", "x", "y", "z"]).map_err(|e| Error::Io(e.to_string()))?;
                for (s, x) in rep.series.iter().zip(&rep.section) {
                    let row = [s[0], s[1], s[2], x.x, x.y, x.z].map(|v| format!("{v:.10e}"));
                    w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
                }
                w.flush()?;
            }
            Ok(match rep.verdict {
                Verdict::Exited { cause: ExitCause::Collision { .. }, .. } => Status::Collision,
                Verdict::Exited { cause: ExitCause::Escape | ExitCause::NonFinite, .. } => Status::Escape,
                _ => Status::Success,
            })
        }
        Command::Observe { record, samples, output } => {
            let rec = load(&record)?;
            let (model, params) = rec.model()?;
            let n = samples.max(1);
            let times: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
            let s = model.sample_times(&params, &times)?;
            let masses = model.masses();
            sink(&output, out, |w| {
                writeln!(w, "t,I,Jx,Jy,Jz,E,Qmax,inertia_spread")?;
                for (j, t) in times.iter().enumerate() {
                    let o = observables(&model.potential, &masses, s.positions_at(j), s.velocities_at(j))?;
                    let j3 = o.angular_momentum;
                    writeln!(
                        w,
                        "{t:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                        o.scalar_inertia(),
                        j3.x,
                        j3.y,
                        j3.z,
                        o.energy,
                        o.quadrupole_max(),
                        o.inertia_spread()
                    )?;
                }
                Ok(())
            })?;
            Ok(Status::Success)
        }
        Command::ExportTable { record, output } => {
            let rec = load(&record)?;
            let (model, params) = rec.model()?;
            let table = coefficient_table(&model, &params)?;
            sink(&output, out, |w| Ok(write!(w, "{table}")?))?;
            Ok(Status::Success)
        }
        Command::ExportTraj { record, periods, dt, stride, output } => {
            let rec = load(&record)?;
            let (model, params) = rec.model()?;
            let s0 = extract_ics(&model, &params)?;
            let traj = integrate(&s0, &model.masses(), &model.potential, dt, periods * TAU, stride)?;
            sink(&output, out, |w| traj.write_csv(w))?;
            Ok(Status::Success)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> Status {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    main_with_args(std::env::args_os(), &mut io::stdout().lock())
}
