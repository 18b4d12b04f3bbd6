//! Gradient descent directly on sampled positions, with the three-point
//! second difference for `ẍ`. Kept to reproduce its zig-zag instability:
//! the alternating mode `(−1)^j` sees `ẍ ≈ −4x/h²`, so the update factor
//! `1 − 4mδτ/h²` leaves the unit interval once `δτ > h²/(2m)`.

use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::dynamics::{accumulate_forces, PotentialSpec};
use crate::error::{Error, Result};

/// Positions of every body on `N` uniform times over one period, node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TimePaths {
    n_bodies: usize,
    pos: Vec<Vector3<f64>>,
}

impl TimePaths {
    /// `f(body, t)` sampled at `t_j = 2πj/N`.
    pub fn from_fn(n_bodies: usize, n_nodes: usize, f: impl Fn(usize, f64) -> Vector3<f64>) -> Self {
        let mut pos = Vec::with_capacity(n_bodies * n_nodes);
        for j in 0..n_nodes {
            let t = TAU * j as f64 / n_nodes as f64;
            pos.extend((0..n_bodies).map(|i| f(i, t)));
        }
        Self { n_bodies, pos }
    }

    pub fn n_bodies(&self) -> usize {
        self.n_bodies
    }

    pub fn n_nodes(&self) -> usize {
        self.pos.len() / self.n_bodies.max(1)
    }

    pub fn position(&self, body: usize, node: usize) -> Vector3<f64> {
        self.pos[node * self.n_bodies + body]
    }

    pub fn position_mut(&mut self, body: usize, node: usize) -> &mut Vector3<f64> {
        &mut self.pos[node * self.n_bodies + body]
    }

    /// `max_{i,d} |(1/N) Σ_j (−1)^j x_{i,d}(t_j)|`.
    pub fn nyquist_amplitude(&self) -> f64 {
        let n = self.n_nodes();
        let mut acc = vec![Vector3::zeros(); self.n_bodies];
        for j in 0..n {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            for (i, a) in acc.iter_mut().enumerate() {
                *a += s * self.position(i, j);
            }
        }
        acc.iter().map(|a| a.amax() / n as f64).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NaiveDiagnostic {
    /// Alternating-mode amplitude before the first and after every step.
    pub nyquist: Vec<f64>,
    /// Geometric mean growth of the alternating mode per step.
    pub growth_per_step: f64,
    /// Set when the iteration was stopped by a collision or a non-finite state.
    pub halted: Option<String>,
}

impl NaiveDiagnostic {
    pub fn zigzag_growing(&self) -> bool {
        self.growth_per_step > 1.0 || self.halted.is_some()
    }
}

/// Largest stable uniform step `h²/(2m)` with `h = 2π/N`.
pub fn naive_stability_bound(n_nodes: usize, mass: f64) -> f64 {
    let h = TAU / n_nodes as f64;
    h * h / (2.0 * mass)
}

/// `iters` steps of `x ← x + δτ (m ẍ − F)` on the sampled paths.
pub fn naive_time_descent(
    paths: &TimePaths,
    masses: &[f64],
    spec: &PotentialSpec,
    dtau: f64,
    iters: usize,
) -> Result<(TimePaths, NaiveDiagnostic)> {
    let nb = paths.n_bodies;
    let n = paths.n_nodes();
    if masses.len() != nb {
        return Err(Error::LayoutMismatch);
    }
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("naive descent needs an even node count >= 4, got {n}")));
    }
    let h2 = (TAU / n as f64).powi(2);
    let mut cur = paths.clone();
    let mut next = paths.clone();
    let mut f = vec![Vector3::zeros(); nb];
    let mut nyquist = vec![cur.nyquist_amplitude()];
    let mut halted = None;
    'outer: for _ in 0..iters {
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let at = &cur.pos[j * nb..(j + 1) * nb];
            if let Err(e) = accumulate_forces(spec, masses, at, t, &mut f) {
                halted = Some(e.to_string());
                break 'outer;
            }
            let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
            for i in 0..nb {
                let acc = (cur.position(i, jp) - 2.0 * cur.position(i, j) + cur.position(i, jm)) / h2;
                *next.position_mut(i, j) = cur.position(i, j) + dtau * (masses[i] * acc - f[i]);
            }
        }
        std::mem::swap(&mut cur, &mut next);
        let a = cur.nyquist_amplitude();
        nyquist.push(a);
        if !a.is_finite() {
            halted = Some("non-finite state".into());
            break;
        }
    }
    let steps = nyquist.len() - 1;
    let growth_per_step = if steps == 0 || nyquist[0] == 0.0 {
        1.0
    } else {
        (nyquist[steps] / nyquist[0]).powf(1.0 / steps as f64)
    };
    Ok((cur, NaiveDiagnostic { nyquist, growth_per_step, halted }))
}
