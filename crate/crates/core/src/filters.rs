//! Measurement-induced dephasing spectra F(δ), normalized to unit area.
//!
//! Impulsive interruptions every τ give a sinc² window; noisy Stark shifts
//! and CW driving of the auxiliary transition give a Lorentzian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// F(δ) = (τ/2π) sinc²(δτ/2) for interruptions at interval τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SincSquaredFilter {
    interval: f64,
}

impl SincSquaredFilter {
    pub fn new(interval: f64) -> Result<Self> {
        Ok(Self {
            interval: require_positive("tau", interval)?,
        })
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let s = sinc(0.5 * delta * self.interval);
        self.interval / (2.0 * PI) * s * s
    }
}

/// F(δ) = ν / [π(ν² + δ²)] with half width ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFilter {
    width: f64,
}

impl LorentzianFilter {
    pub fn new(width: f64) -> Result<Self> {
        Ok(Self {
            width: require_positive("nu", width)?,
        })
    }

    /// Width from random Stark shifts of mean square ⟨Δω²⟩ and correlation
    /// time τ_c.
    pub fn from_noise(mean_square_shift: f64, correlation_time: f64) -> Result<Self> {
        Self::new(width_from_noise(mean_square_shift, correlation_time)?)
    }

    /// Width from a CW field of Rabi frequency Ω on a transition decaying
    /// at γ_u.
    pub fn from_cw(rabi: f64, aux_decay: f64) -> Result<Self> {
        Self::new(width_from_cw(rabi, aux_decay)?)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let u = delta / self.width;
        1.0 / (PI * self.width * (1.0 + u * u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DephasingFilter {
    Sinc(SincSquaredFilter),
    Lorentzian(LorentzianFilter),
}

impl From<SincSquaredFilter> for DephasingFilter {
    fn from(f: SincSquaredFilter) -> Self {
        Self::Sinc(f)
    }
}

impl From<LorentzianFilter> for DephasingFilter {
    fn from(f: LorentzianFilter) -> Self {
        Self::Lorentzian(f)
    }
}

impl DephasingFilter {
    pub fn eval(&self, delta: f64) -> f64 {
        match self {
            Self::Sinc(f) => f.eval(delta),
            Self::Lorentzian(f) => f.eval(delta),
        }
    }

    /// Characteristic width: 2π/τ (first zero) or ν.
    pub fn width(&self) -> f64 {
        match self {
            Self::Sinc(f) => 2.0 * PI / f.interval,
            Self::Lorentzian(f) => f.width,
        }
    }

    /// Breakpoints (offsets δ) for integrating F against a response that
    /// matters on `band`.
    pub(crate) fn breakpoints(&self, band: (f64, f64)) -> Vec<f64> {
        let w = self.width();
        let mut pts = vec![0.0];
        for k in [1.0, 10.0, 100.0, 1.0e3, 1.0e4, 1.0e5, 1.0e6] {
            pts.push(-k * w);
            pts.push(k * w);
        }
        if let Self::Sinc(_) = self {
            // one panel per lobe across the band where the response lives,
            // capped so pathological bands do not explode the panel count
            const MAX_LOBES: f64 = 20_000.0;
            let (lo, hi) = band;
            let first = (lo / w).floor().clamp(-MAX_LOBES, -16.0);
            let last = (hi / w).ceil().clamp(16.0, MAX_LOBES);
            let mut k = first;
            while k <= last {
                pts.push(k * w);
                k += 1.0;
            }
        }
        pts
    }
}

/// Evaluates F(δ), δ measured from ω_a.
pub fn eval_filter(filter: &DephasingFilter, delta: f64) -> f64 {
    filter.eval(delta)
}

/// ν = ⟨Δω²⟩ τ_c.
pub fn width_from_noise(mean_square_shift: f64, correlation_time: f64) -> Result<f64> {
    let ms = require_positive("mean_square_shift", mean_square_shift)?;
    let tc = require_positive("tau_c", correlation_time)?;
    Ok(ms * tc)
}

/// ν = 2Ω²/γ_u, valid only for γ_u > Ω.
pub fn width_from_cw(rabi: f64, aux_decay: f64) -> Result<f64> {
    let rabi = require_positive("rabi", rabi)?;
    let aux_decay = require_positive("gamma_u", aux_decay)?;
    if aux_decay <= rabi {
        return Err(Error::Validity(format!(
            "CW dephasing width needs gamma_u > Omega (gamma_u = {aux_decay:e}, Omega = {rabi:e})"
        )));
    }
    Ok(2.0 * rabi * rabi / aux_decay)
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1.0e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
