//! Orbit records: a schema-versioned JSON document holding everything needed
//! to rebuild and re-verify an orbit.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::QuadratureGrid;
use crate::descent::{DescentSchedule, Outcome, RunResult, StopCriteria};
use crate::dynamics::{observables, residual, PotentialSpec};
use crate::error::{Error, Result};
use crate::export::table_scale;
use crate::symmetry::{build_crisscross_with, build_cubic_family_with, Family, FamilyOptions, OrbitModel, ReducedParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSummary {
    pub angular_momentum: [f64; 3],
    /// Largest `|Q_ij|` over 64 times in a period.
    pub quadrupole_max: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentSettings {
    pub schedule: DescentSchedule,
    pub stop: StopCriteria,
    pub grid_nodes: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRecord {
    pub schema_version: u32,
    pub family: Family,
    /// Body mass for single-mass families.
    pub mass: f64,
    pub potential: PotentialSpec,
    pub k_max: usize,
    /// Reduced coefficients in slot order.
    pub coefficients: Vec<f64>,
    /// Physical `a_1` of the table reference series.
    pub scale: f64,
    /// `None` for an unminimized seed.
    pub outcome: Option<Outcome>,
    pub certified: bool,
    pub action: Option<f64>,
    pub residual: Option<f64>,
    pub grad_norm: Option<f64>,
    pub observables: Option<ObservableSummary>,
    pub descent: Option<DescentSettings>,
}

/// Rebuild the model for a supported family.
pub fn build_family(family: &Family, mass: f64, potential: PotentialSpec, k_max: usize) -> Result<(OrbitModel, ReducedParams)> {
    let opts = FamilyOptions { k_max, mass, potential };
    match family {
        Family::Cubic { m } => build_cubic_family_with(*m, &opts),
        Family::CrissCross { masses } => build_crisscross_with(*masses, &opts),
        other => Err(Error::InvalidRecord(format!("family '{}' cannot be rebuilt from a record", other.name()))),
    }
}

pub fn summarize(model: &OrbitModel, params: &ReducedParams) -> Result<ObservableSummary> {
    let times: Vec<f64> = (0..64).map(|j| TAU * j as f64 / 64.0).collect();
    let s = model.sample_times(params, &times)?;
    let masses = model.masses();
    let mut out = None;
    let mut qmax: f64 = 0.0;
    for j in 0..times.len() {
        let o = observables(&model.potential, &masses, s.positions_at(j), s.velocities_at(j))?;
        qmax = qmax.max(o.quadrupole_max());
        out.get_or_insert(o);
    }
    let o = out.expect("64 samples");
    Ok(ObservableSummary { angular_momentum: o.angular_momentum.into(), quadrupole_max: qmax, energy: o.energy })
}

impl OrbitRecord {
    pub fn seed(model: &OrbitModel, params: &ReducedParams) -> Result<Self> {
        model.check_params(params)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            family: model.family.clone(),
            mass: model.masses().first().copied().unwrap_or(1.0),
            potential: model.potential,
            k_max: model.k_max(),
            coefficients: params.values.clone(),
            scale: table_scale(model, params)?,
            outcome: None,
            certified: false,
            action: None,
            residual: None,
            grad_norm: None,
            observables: None,
            descent: None,
        })
    }

    pub fn from_run(
        model: &OrbitModel,
        result: &RunResult,
        schedule: &DescentSchedule,
        stop: &StopCriteria,
        grid: &QuadratureGrid,
    ) -> Result<Self> {
        let mut r = Self::seed(model, &result.params)?;
        r.outcome = Some(result.outcome.clone());
        r.certified = result.certified;
        r.action = result.action_trace.last().copied().filter(|a| a.is_finite());
        r.grad_norm = Some(result.grad_norm).filter(|g| g.is_finite());
        r.residual = result.residual;
        if matches!(result.outcome, Outcome::Converged | Outcome::MaxIters) {
            r.observables = Some(summarize(model, &result.params)?);
        }
        r.descent = Some(DescentSettings {
            schedule: schedule.clone(),
            stop: *stop,
            grid_nodes: grid.len(),
            iterations: result.iterations,
        });
        Ok(r)
    }

    pub fn converged(&self) -> bool {
        self.outcome == Some(Outcome::Converged)
    }

    pub fn grid(&self) -> Result<QuadratureGrid> {
        match &self.descent {
            Some(d) => QuadratureGrid::new(d.grid_nodes),
            None => Ok(QuadratureGrid::for_k_max(self.k_max)),
        }
    }

    /// Model and parameters described by the record.
    pub fn model(&self) -> Result<(OrbitModel, ReducedParams)> {
        let (model, _) = build_family(&self.family, self.mass, self.potential, self.k_max)?;
        let params = model.params_from_values(self.coefficients.clone())?;
        Ok((model, params))
    }

    /// Structural checks that need no numerics.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: self.schema_version, expected: SCHEMA_VERSION });
        }
        if self.converged() && (self.residual.is_none() || self.grad_norm.is_none()) {
            return Err(Error::InvalidRecord("converged record must carry residual and grad_norm".into()));
        }
        if self.certified && !self.converged() {
            return Err(Error::InvalidRecord("only converged records can be certified".into()));
        }
        if let Some(v) = self.coefficients.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        Ok(())
    }

    /// Recompute the residual; it must lie within 2× the stored value.
    pub fn reverify(&self) -> Result<f64> {
        let (model, params) = self.model()?;
        let grid = self.grid()?;
        let now = residual(&model, &params, &grid)?.max_abs;
        let stored = self.residual.unwrap_or(f64::INFINITY);
        if now > 2.0 * stored.max(1e-14) {
            return Err(Error::InvalidRecord(format!("stored residual {stored:.3e} but recomputed {now:.3e}")));
        }
        Ok(now)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidRecord(e.to_string()))
    }

    /// Parse and validate without re-verifying.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(Error::SchemaVersion { found: v as u32, expected: SCHEMA_VERSION }),
            None => return Err(Error::InvalidRecord("missing schema_version".into())),
        }
        let record: Self = serde_json::from_value(value).map_err(|e| Error::InvalidRecord(e.to_string()))?;
        record.validate()?;
        Ok(record)
    }

    /// Write to a temporary file next to `path`, then rename over it.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let text = self.to_json()?;
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
        Ok(())
    }

    /// Read, validate and, for converged records, re-verify the residual.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let record = Self::from_json(&text)?;
        if record.converged() {
            record.reverify()?;
        }
        Ok(record)
    }
}

/// `offset` counts the bytes consumed when the parser stopped.
fn parse_error(text: &str, e: &serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = if line == 0 {
        0
    } else {
        text.split_inclusive('\n').take(line - 1).map(str::len).sum::<usize>() + column
    };
    Error::Parse { offset: offset.min(text.len()), line, column, message: e.to_string() }
}
