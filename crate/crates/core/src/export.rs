//! Coefficient tables as aligned plain text.

use std::fmt;

use crate::error::{Error, Result};
use crate::fourier::{Basis, FourierSeries};
use crate::symmetry::{Family, OrbitModel, ReducedParams};

/// Fourier coefficients by harmonic, one column per tabulated series.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub columns: Vec<String>,
    /// `(k, values)` in increasing `k`; rows that round to zero at the end
    /// are dropped.
    pub rows: Vec<(usize, Vec<f64>)>,
    /// Physical `a_1` of the reference series.
    pub scale: f64,
    /// Whether the values were divided by `scale`.
    pub normalized: bool,
}

impl CoefficientTable {
    pub fn value(&self, column: &str, k: usize) -> Option<f64> {
        let c = self.columns.iter().position(|n| n == column)?;
        self.rows.iter().find(|(kk, _)| *kk == k).map(|(_, v)| v[c])
    }

    pub fn column(&self, column: &str) -> Option<Vec<(usize, f64)>> {
        let c = self.columns.iter().position(|n| n == column)?;
        Some(self.rows.iter().map(|(k, v)| (*k, v[c])).collect())
    }
}

/// Five decimals, never `-0.00000`.
pub fn fixed5(v: f64) -> String {
    let s = format!("{v:.5}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.00000".into()
    } else {
        s
    }
}

impl fmt::Display for CoefficientTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.normalized {
            writeln!(f, "# normalized to a_1 = 1; physical a_1 = {}", fixed5(self.scale))?;
        } else {
            writeln!(f, "# physical coefficients; a_1 = {}", fixed5(self.scale))?;
        }
        write!(f, "{:>4}", "k")?;
        for c in &self.columns {
            write!(f, " {c:>10}")?;
        }
        writeln!(f)?;
        for (k, vals) in &self.rows {
            write!(f, "{k:>4}")?;
            for v in vals {
                write!(f, " {:>10}", fixed5(*v))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Physical `a_1` of the reference series: the generator's sine series for
/// the cubic family, body 1's `x` cosine series for the criss-cross, the
/// first nonzero fundamental otherwise.
pub fn table_scale(model: &OrbitModel, params: &ReducedParams) -> Result<f64> {
    let full = model.expand(params)?;
    Ok(reference_scale(&model.family, &full))
}

fn reference_scale(family: &Family, full: &[FourierSeries]) -> f64 {
    match family {
        Family::Cubic { .. } => full[0].sin_coeff(1),
        Family::CrissCross { .. } => full[0].cos_coeff(1),
        _ => full
            .iter()
            .flat_map(|s| [s.sin_coeff(1), s.cos_coeff(1)])
            .find(|v| *v != 0.0)
            .unwrap_or(0.0),
    }
}

/// Cubic family: one column `a_k`, normalized by `a_1`. Criss-cross with
/// equal masses: `a_{1,k}, b_{1,k}, a_{3,k}` in physical units; unequal
/// masses add the remaining bodies. Other families list every series.
pub fn coefficient_table(model: &OrbitModel, params: &ReducedParams) -> Result<CoefficientTable> {
    let full = model.expand(params)?;
    let scale = reference_scale(&model.family, &full);
    let (columns, refs, normalized): (Vec<String>, Vec<(usize, Basis)>, bool) = match &model.family {
        Family::Cubic { .. } => (vec!["a_k".into()], vec![(0, Basis::Sin)], true),
        Family::CrissCross { masses } => {
            let equal = masses.iter().all(|m| *m == masses[0]);
            let bodies: &[usize] = if equal { &[0, 2] } else { &[0, 1, 2] };
            let mut cols = Vec::new();
            let mut refs = Vec::new();
            for &b in bodies {
                let i = b + 1;
                cols.push(format!("a_{i},k"));
                refs.push((2 * b, Basis::Cos));
                if !(equal && b == 2) {
                    cols.push(format!("b_{i},k"));
                    refs.push((2 * b + 1, Basis::Sin));
                }
            }
            (cols, refs, false)
        }
        _ => {
            let shapes = model.reduction().shapes();
            let mut cols = Vec::new();
            let mut refs = Vec::new();
            for (s, shape) in shapes.iter().enumerate() {
                if shape.sin {
                    cols.push(format!("s{s}_sin"));
                    refs.push((s, Basis::Sin));
                }
                if shape.cos {
                    cols.push(format!("s{s}_cos"));
                    refs.push((s, Basis::Cos));
                }
            }
            (cols, refs, false)
        }
    };
    if normalized && scale == 0.0 {
        return Err(Error::NormalizationUndefined(scale));
    }
    let div = if normalized { scale } else { 1.0 };
    let mut rows: Vec<(usize, Vec<f64>)> = (1..=model.k_max())
        .filter(|&k| refs.iter().any(|&(s, b)| model.reduction().shapes()[s].allows(b, k)))
        .map(|k| (k, refs.iter().map(|&(s, b)| full[s].coeff(b, k) / div).collect()))
        .collect();
    while rows.len() > 1 && rows.last().is_some_and(|(_, v)| v.iter().all(|x| fixed5(*x) == "0.00000")) {
        rows.pop();
    }
    Ok(CoefficientTable { columns, rows, scale, normalized })
}
