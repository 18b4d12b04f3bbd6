//! Truncated Fourier series on the fixed period `2π`.
//!
//! A [`FourierSeries`] stores sine and cosine amplitudes densely by harmonic
//! index. Physical periods other than `2π` are handled by [`ScalingLaw`],
//! which carries the amplitude factor of a homogeneous potential instead of
//! storing a period on the series itself.

use std::f64::consts::TAU;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_K_MAX: usize = 27;

/// `|a_1|` below this is treated as zero by [`FourierSeries::normalize`].
pub const NORMALIZE_EPS: f64 = 1e-12;

/// Which harmonic indices a series may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    All,
    OddOnly,
}

impl Parity {
    pub fn allows(self, k: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::OddOnly => k % 2 == 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Parity::All => "all",
            Parity::OddOnly => "odd_only",
        }
    }

    /// Allowed harmonics in `1..=k_max` (the constant term is never listed).
    pub fn harmonics(self, k_max: usize) -> impl Iterator<Item = usize> {
        (1..=k_max).filter(move |&k| self.allows(k))
    }
}

/// Sine or cosine basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Sin,
    Cos,
}

/// `f(t) = Σ a_k sin kt + Σ b_k cos kt`, `t ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    sin: Vec<f64>,
    cos: Vec<f64>,
    parity: Parity,
}

impl FourierSeries {
    /// The zero series with room for harmonics `0..=k_max`.
    pub fn new(k_max: usize, parity: Parity) -> Self {
        Self {
            sin: vec![0.0; k_max + 1],
            cos: vec![0.0; k_max + 1],
            parity,
        }
    }

    pub fn from_terms(
        k_max: usize,
        parity: Parity,
        sin: &[(usize, f64)],
        cos: &[(usize, f64)],
    ) -> Result<Self> {
        let mut s = Self::new(k_max, parity);
        for &(k, v) in sin {
            s.set_sin(k, v)?;
        }
        for &(k, v) in cos {
            s.set_cos(k, v)?;
        }
        Ok(s)
    }

    /// Odd-harmonic sine series from amplitudes listed for `k = 1, 3, 5, ...`.
    pub fn odd_sine(k_max: usize, amplitudes: &[f64]) -> Result<Self> {
        let terms: Vec<_> = amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| (2 * i + 1, a))
            .collect();
        Self::from_terms(k_max, Parity::OddOnly, &terms, &[])
    }

    pub fn k_max(&self) -> usize {
        self.sin.len() - 1
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Highest harmonic with a nonzero amplitude, or 0 for the zero series.
    pub fn order(&self) -> usize {
        (0..=self.k_max())
            .rev()
            .find(|&k| self.sin[k] != 0.0 || self.cos[k] != 0.0)
            .unwrap_or(0)
    }

    pub fn sin_coeff(&self, k: usize) -> f64 {
        self.sin.get(k).copied().unwrap_or(0.0)
    }

    pub fn cos_coeff(&self, k: usize) -> f64 {
        self.cos.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, basis: Basis, k: usize) -> f64 {
        match basis {
            Basis::Sin => self.sin_coeff(k),
            Basis::Cos => self.cos_coeff(k),
        }
    }

    /// Dense sine amplitudes indexed by `k` (index 0 is always zero).
    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    fn check(&self, k: usize, constant_ok: bool) -> Result<()> {
        if k > self.k_max() {
            return Err(Error::HarmonicOutOfRange { k, k_max: self.k_max() });
        }
        let allowed = if k == 0 {
            constant_ok && self.parity == Parity::All
        } else {
            self.parity.allows(k)
        };
        if !allowed {
            return Err(Error::ParityViolation { k, parity: self.parity.name() });
        }
        Ok(())
    }

    pub fn set_sin(&mut self, k: usize, value: f64) -> Result<()> {
        self.check(k, false)?;
        self.sin[k] = value;
        Ok(())
    }

    pub fn set_cos(&mut self, k: usize, value: f64) -> Result<()> {
        self.check(k, true)?;
        self.cos[k] = value;
        Ok(())
    }

    pub fn set(&mut self, basis: Basis, k: usize, value: f64) -> Result<()> {
        match basis {
            Basis::Sin => self.set_sin(k, value),
            Basis::Cos => self.set_cos(k, value),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.cos[0];
        for k in 1..=self.k_max() {
            let (s, c) = (k as f64 * t).sin_cos();
            acc += self.sin[k] * s + self.cos[k] * c;
        }
        acc
    }

    pub fn eval_deriv(&self, t: f64, order: u32) -> Result<f64> {
        if !(1..=2).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        let [_, d1, d2] = self.eval_jet(t);
        Ok(if order == 1 { d1 } else { d2 })
    }

    /// Value, first and second derivative at `t` in one pass.
    pub fn eval_jet(&self, t: f64) -> [f64; 3] {
        let mut out = [self.cos[0], 0.0, 0.0];
        for k in 1..=self.k_max() {
            let (a, b) = (self.sin[k], self.cos[k]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let kf = k as f64;
            let (s, c) = (kf * t).sin_cos();
            out[0] += a * s + b * c;
            out[1] += kf * (a * c - b * s);
            out[2] -= kf * kf * (a * s + b * c);
        }
        out
    }

    /// Divide by `a_1`; returns the normalized series and the original `a_1`.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let scale = self.sin_coeff(1);
        if !(scale.abs() >= NORMALIZE_EPS) {
            return Err(Error::NormalizationUndefined(scale.abs()));
        }
        Ok((self.scaled(1.0 / scale), scale))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sin: self.sin.iter().map(|v| v * factor).collect(),
            cos: self.cos.iter().map(|v| v * factor).collect(),
            parity: self.parity,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sin.iter().chain(&self.cos).all(|&v| v == 0.0)
    }
}

impl Add for &FourierSeries {
    type Output = FourierSeries;

    fn add(self, rhs: &FourierSeries) -> FourierSeries {
        let k_max = self.k_max().max(rhs.k_max());
        let parity = if self.parity == rhs.parity { self.parity } else { Parity::All };
        let mut out = FourierSeries::new(k_max, parity);
        for k in 0..=k_max {
            out.sin[k] = self.sin_coeff(k) + rhs.sin_coeff(k);
            out.cos[k] = self.cos_coeff(k) + rhs.cos_coeff(k);
        }
        out
    }
}

impl Mul<f64> for &FourierSeries {
    type Output = FourierSeries;

    fn mul(self, rhs: f64) -> FourierSeries {
        self.scaled(rhs)
    }
}

/// Amplitude scaling of a homogeneous potential `V ∝ r^α` with period `T`:
/// `x(t) = T^{2/(2-α)} f(t/T)`, relative to the `2π` reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingLaw {
    alpha: f64,
    period: f64,
}

impl ScalingLaw {
    pub fn new(alpha: f64, period: f64) -> Result<Self> {
        if !(alpha < 2.0) || alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidExponent(alpha));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidPeriod(period));
        }
        Ok(Self { alpha, period })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn exponent(&self) -> f64 {
        2.0 / (2.0 - self.alpha)
    }

    pub fn factor(&self) -> f64 {
        (self.period / TAU).powf(self.exponent())
    }
}

/// Rescale per-coordinate series from period `2π` to the law's period.
/// The stored series stay on `[0, 2π)`; only amplitudes change.
pub fn rescale_period(series: &[FourierSeries], law: &ScalingLaw) -> Vec<FourierSeries> {
    let f = law.factor();
    series.iter().map(|s| s.scaled(f)).collect()
}

/// Fill `sin[k] = sin(kθ)` and `cos[k] = cos(kθ)` for `k = 0..len` using the
/// angle-addition recurrence.
pub(crate) fn fill_harmonics(theta: f64, sin: &mut [f64], cos: &mut [f64]) {
    debug_assert_eq!(sin.len(), cos.len());
    if sin.is_empty() {
        return;
    }
    sin[0] = 0.0;
    cos[0] = 1.0;
    if sin.len() == 1 {
        return;
    }
    let (s1, c1) = theta.sin_cos();
    sin[1] = s1;
    cos[1] = c1;
    for k in 2..sin.len() {
        // re-anchor periodically to keep the recurrence error flat
        if k % 16 == 0 {
            let (s, c) = (k as f64 * theta).sin_cos();
            sin[k] = s;
            cos[k] = c;
        } else {
            sin[k] = sin[k - 1] * c1 + cos[k - 1] * s1;
            cos[k] = cos[k - 1] * c1 - sin[k - 1] * s1;
        }
    }
}
