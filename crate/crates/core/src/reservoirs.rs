//! Reservoir spectral responses G(ω) and their correlation functions Φ(t).
//!
//! All frequencies are angular (rad/s) and all times are seconds.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::quadrature::{self, clean_breakpoints, Tolerance};

/// Cutoff of the hydrogenic free-space response, ω_c ≈ c/a_B.
pub const HYDROGENIC_CUTOFF: f64 = 1.0e19;

/// Lorentzian line of a high-Q cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianMode {
    coupling: f64,
    half_width: f64,
    center: f64,
}

impl LorentzianMode {
    /// `coupling` is g_s, `half_width` is Γ_s and `center` is ω_s.
    pub fn new(coupling: f64, half_width: f64, center: f64) -> Result<Self> {
        Ok(Self {
            coupling: require_positive("g_s", coupling)?,
            half_width: require_positive("gamma_s", half_width)?,
            center: require_positive("omega_s", center)?,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// G_s at offset `x = ω - ω_s`.
    pub fn at_offset(&self, x: f64) -> f64 {
        let u = x / self.half_width;
        self.coupling * self.coupling / (PI * self.half_width * (1.0 + u * u))
    }

    pub fn eval(&self, omega: f64) -> f64 {
        self.at_offset(omega - self.center)
    }
}

/// Free-space response of a hydrogenic atom, G(ω) = αω / [1 + (ω/ω_c)²]⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenicResponse {
    coupling: f64,
    cutoff: f64,
}

impl HydrogenicResponse {
    pub fn new(coupling: f64, cutoff: f64) -> Result<Self> {
        Ok(Self {
            coupling: require_non_negative("alpha", coupling)?,
            cutoff: require_positive("omega_c", cutoff)?,
        })
    }

    /// α with the default cutoff of 1e19 rad/s.
    pub fn with_default_cutoff(coupling: f64) -> Result<Self> {
        Self::new(coupling, HYDROGENIC_CUTOFF)
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let x = omega / self.cutoff;
        self.coupling * omega / (1.0 + x * x).powi(4)
    }

    fn eval_complex(&self, omega: Complex64) -> Complex64 {
        let x = omega / self.cutoff;
        omega * self.coupling / (x * x + 1.0).powi(4)
    }

    /// Location of the maximum, ω_c/√7.
    pub fn peak(&self) -> f64 {
        self.cutoff / 7f64.sqrt()
    }

    /// ∫₀^∞ G dω = αω_c²/6.
    pub fn total_weight(&self) -> f64 {
        self.coupling * self.cutoff * self.cutoff / 6.0
    }
}

/// Piecewise-linear response from sampled (ω, G) pairs; zero outside the
/// sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedResponse {
    omega: Vec<f64>,
    value: Vec<f64>,
}

impl TabulatedResponse {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Table("need at least two samples".into()));
        }
        for (i, &(w, g)) in samples.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Table(format!(
                    "row {}: frequency {w} must be finite and >= 0",
                    i + 1
                )));
            }
            if !g.is_finite() || g < 0.0 {
                return Err(Error::Table(format!(
                    "row {}: response {g} must be finite and >= 0",
                    i + 1
                )));
            }
            if i > 0 && w <= samples[i - 1].0 {
                return Err(Error::Table(format!(
                    "row {}: frequencies must be strictly increasing",
                    i + 1
                )));
            }
        }
        let (omega, value) = samples.into_iter().unzip();
        Ok(Self { omega, value })
    }

    /// Parses two columns (ω, G) separated by whitespace or commas.
    /// Everything after `#` on a line is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Table(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Table(format!("line {}: `{s}`: {e}", lineno + 1)))
            };
            samples.push((parse(fields[0])?, parse(fields[1])?));
        }
        Self::new(samples)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omega.iter().copied().zip(self.value.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let (lo, hi) = self.range();
        if !(omega >= lo && omega <= hi) {
            return 0.0;
        }
        let i = self.omega.partition_point(|&w| w <= omega);
        if i == self.omega.len() {
            return self.value[i - 1];
        }
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let (g0, g1) = (self.value[i - 1], self.value[i]);
        g0 + (g1 - g0) * (omega - w0) / (w1 - w0)
    }

    /// Exact trapezoidal area of the interpolant.
    pub fn total_weight(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.value.windows(2))
            .map(|(w, g)| 0.5 * (w[1] - w[0]) * (g[0] + g[1]))
            .sum()
    }

    /// Weight-averaged frequency ∫ωG dω / ∫G dω of the interpolant; the
    /// midpoint of the range for an all-zero table.
    pub fn centroid(&self) -> f64 {
        let weight = self.total_weight();
        if weight == 0.0 {
            let (lo, hi) = self.range();
            return 0.5 * (lo + hi);
        }
        let first_moment: f64 = self
            .omega
            .windows(2)
            .zip(self.value.windows(2))
            .map(|(w, g)| {
                (w[1] - w[0]) * (g[0] * (2.0 * w[0] + w[1]) + g[1] * (w[0] + 2.0 * w[1])) / 6.0
            })
            .sum();
        first_moment / weight
    }

    /// Frequency of the largest sample.
    pub fn peak(&self) -> f64 {
        let mut best = 0;
        for (i, g) in self.value.iter().enumerate() {
            if *g > self.value[best] {
                best = i;
            }
        }
        self.omega[best]
    }
}

/// A reservoir spectral response G(ω) ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectralResponse {
    Lorentzian(LorentzianMode),
    Hydrogenic(HydrogenicResponse),
    Tabulated(TabulatedResponse),
}

impl From<LorentzianMode> for SpectralResponse {
    fn from(m: LorentzianMode) -> Self {
        Self::Lorentzian(m)
    }
}

impl From<HydrogenicResponse> for SpectralResponse {
    fn from(h: HydrogenicResponse) -> Self {
        Self::Hydrogenic(h)
    }
}

impl From<TabulatedResponse> for SpectralResponse {
    fn from(t: TabulatedResponse) -> Self {
        Self::Tabulated(t)
    }
}

impl fmt::Display for SpectralResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lorentzian(m) => write!(
                f,
                "lorentzian(g_s={:e}, gamma_s={:e}, omega_s={:e})",
                m.coupling, m.half_width, m.center
            ),
            Self::Hydrogenic(h) => write!(
                f,
                "hydrogenic(alpha={:e}, omega_c={:e})",
                h.coupling, h.cutoff
            ),
            Self::Tabulated(t) => {
                let (lo, hi) = t.range();
                write!(f, "tabulated({} samples on [{lo:e}, {hi:e}])", t.len())
            }
        }
    }
}

impl SpectralResponse {
    /// G(ω). Negative frequencies are rejected.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega < 0.0 {
            return Err(Error::Domain {
                quantity: "omega",
                value: omega,
                requirement: "spectral responses are defined for omega >= 0",
            });
        }
        Ok(self.eval_unchecked(omega))
    }

    pub(crate) fn eval_unchecked(&self, omega: f64) -> f64 {
        match self {
            Self::Lorentzian(m) => m.eval(omega),
            Self::Hydrogenic(h) => h.eval(omega),
            Self::Tabulated(t) => t.eval(omega),
        }
    }

    /// G(ω_a + δ), evaluated so that a narrow line far from the origin
    /// keeps full relative precision in δ.
    pub(crate) fn eval_detuned(&self, omega_a: f64, delta: f64) -> f64 {
        let omega = omega_a + delta;
        if omega < 0.0 {
            return 0.0;
        }
        match self {
            Self::Lorentzian(m) => m.at_offset((omega_a - m.center) + delta),
            _ => self.eval_unchecked(omega),
        }
    }

    /// ∫ G dω over the response's support.
    pub fn total_weight(&self) -> f64 {
        match self {
            Self::Lorentzian(m) => m.coupling * m.coupling,
            Self::Hydrogenic(h) => h.total_weight(),
            Self::Tabulated(t) => t.total_weight(),
        }
    }

    /// Frequency used as the rotating-frame reference ω_s: the line centre,
    /// the cutoff, or the tabulated centroid.
    pub fn reference_frequency(&self) -> f64 {
        match self {
            Self::Lorentzian(m) => m.center,
            Self::Hydrogenic(h) => h.cutoff,
            Self::Tabulated(t) => t.centroid(),
        }
    }

    /// Width of the narrowest spectral feature (rad/s).
    pub fn feature_width(&self) -> f64 {
        match self {
            Self::Lorentzian(m) => m.half_width,
            Self::Hydrogenic(h) => h.cutoff,
            Self::Tabulated(t) => t
                .omega
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Support `[lo, hi]`; `hi = None` for an unbounded response.
    pub(crate) fn support(&self) -> (f64, Option<f64>) {
        match self {
            Self::Tabulated(t) => {
                let (lo, hi) = t.range();
                (lo, Some(hi))
            }
            _ => (0.0, None),
        }
    }

    /// Breakpoints (as offsets δ = ω − ω_a) at which the response changes
    /// character.
    pub(crate) fn features(&self, omega_a: f64) -> Vec<f64> {
        match self {
            Self::Lorentzian(m) => {
                let c = m.center - omega_a;
                let mut pts = vec![c];
                for k in [1.0, 3.0, 10.0, 30.0, 100.0, 1.0e3, 1.0e4] {
                    pts.push(c - k * m.half_width);
                    pts.push(c + k * m.half_width);
                }
                pts
            }
            Self::Hydrogenic(h) => {
                let mut pts: Vec<f64> = (-8..=3)
                    .map(|k| h.cutoff * 10f64.powi(k) - omega_a)
                    .collect();
                pts.push(h.peak() - omega_a);
                pts.push(3.0 * h.cutoff - omega_a);
                pts
            }
            Self::Tabulated(t) => {
                let stride = (t.len() / 20_000).max(1);
                t.omega
                    .iter()
                    .step_by(stride)
                    .map(|w| w - omega_a)
                    .collect()
            }
        }
    }

    /// Rough band of offsets outside of which G is negligible.
    pub(crate) fn significant_band(&self, omega_a: f64) -> (f64, f64) {
        match self {
            Self::Lorentzian(m) => {
                let c = m.center - omega_a;
                (c - 1.0e4 * m.half_width, c + 1.0e4 * m.half_width)
            }
            Self::Hydrogenic(h) => (-omega_a, 100.0 * h.cutoff),
            Self::Tabulated(t) => {
                let (lo, hi) = t.range();
                (lo - omega_a, hi - omega_a)
            }
        }
    }
}

/// Evaluates G(ω) for any variant.
pub fn eval_response(model: &SpectralResponse, omega: f64) -> Result<f64> {
    model.eval(omega)
}

/// A sharp spectral feature plus a flat background continuum that only
/// enters through its on-resonance rate γ_b = 2πG_b(ω_a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeResponse {
    sharp: SpectralResponse,
    background_rate: f64,
}

impl CompositeResponse {
    pub fn new(sharp: impl Into<SpectralResponse>, background_rate: f64) -> Result<Self> {
        Ok(Self {
            sharp: sharp.into(),
            background_rate: require_non_negative("gamma_b", background_rate)?,
        })
    }

    pub fn sharp(&self) -> &SpectralResponse {
        &self.sharp
    }

    pub fn background_rate(&self) -> f64 {
        self.background_rate
    }
}

type KernelFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum KernelSource {
    Lorentzian {
        coupling: f64,
        half_width: f64,
        center: f64,
    },
    Spectrum(SpectralResponse),
    /// `native` is the reference frequency `f` was written for.
    Custom {
        f: KernelFn,
        rate_scale: f64,
        native: f64,
    },
}

/// Reservoir correlation function Φ(t) = ∫ G(ω) e^{−i(ω−ω_s)t} dω in the
/// frame rotating at the reference frequency ω_s.
#[derive(Clone)]
pub struct MemoryKernel {
    source: KernelSource,
    reference: f64,
}

impl fmt::Debug for MemoryKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            KernelSource::Lorentzian { .. } => "lorentzian",
            KernelSource::Spectrum(_) => "numeric",
            KernelSource::Custom { .. } => "custom",
        };
        f.debug_struct("MemoryKernel")
            .field("kind", &kind)
            .field("reference", &self.reference)
            .finish()
    }
}

impl From<&SpectralResponse> for MemoryKernel {
    fn from(model: &SpectralResponse) -> Self {
        Self::from_response(model)
    }
}

impl MemoryKernel {
    pub fn from_response(model: &SpectralResponse) -> Self {
        let source = match model {
            SpectralResponse::Lorentzian(m) => KernelSource::Lorentzian {
                coupling: m.coupling,
                half_width: m.half_width,
                center: m.center,
            },
            other => KernelSource::Spectrum(other.clone()),
        };
        Self {
            source,
            reference: model.reference_frequency(),
        }
    }

    /// An arbitrary kernel. `rate_scale` is the fastest rate on which it
    /// varies and feeds the solver step criterion.
    pub fn custom<F>(f: F, reference: f64, rate_scale: f64) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            source: KernelSource::Custom {
                f: Arc::new(f),
                rate_scale,
                native: reference,
            },
            reference,
        }
    }

    /// Φ ≡ 0.
    pub fn zero(reference: f64) -> Self {
        Self::custom(|_| Complex64::new(0.0, 0.0), reference, 0.0)
    }

    /// Same kernel seen from another rotating frame.
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = reference;
        self
    }

    pub fn reference_frequency(&self) -> f64 {
        self.reference
    }

    pub fn is_lorentzian(&self) -> Option<(f64, f64)> {
        match self.source {
            KernelSource::Lorentzian {
                coupling,
                half_width,
                ..
            } => Some((coupling, half_width)),
            _ => None,
        }
    }

    /// Fastest rate (1/s) at which Φ(t)e^{iΔt} changes, excluding Δ.
    pub fn rate_scale(&self) -> f64 {
        match &self.source {
            KernelSource::Lorentzian {
                coupling,
                half_width,
                ..
            } => coupling.max(*half_width),
            KernelSource::Spectrum(model) => match model {
                SpectralResponse::Tabulated(t) => {
                    let (lo, hi) = t.range();
                    let spread = (hi - self.reference).abs().max((self.reference - lo).abs());
                    spread.max(t.total_weight().sqrt())
                }
                other => other.feature_width().max(other.total_weight().sqrt()),
            },
            KernelSource::Custom { rate_scale, .. } => *rate_scale,
        }
    }

    /// Shortest time scale on which the kernel has structure.
    pub(crate) fn short_time(&self) -> f64 {
        match &self.source {
            KernelSource::Lorentzian {
                coupling,
                half_width,
                ..
            } => 1.0 / coupling.max(*half_width),
            KernelSource::Spectrum(SpectralResponse::Hydrogenic(h)) => 1.0 / h.cutoff,
            _ => {
                let r = self.rate_scale();
                if r > 0.0 {
                    1.0 / r
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain {
                quantity: "t",
                value: t,
                requirement: "correlation functions are evaluated for t >= 0",
            });
        }
        match &self.source {
            KernelSource::Lorentzian {
                coupling,
                half_width,
                center,
            } => {
                let value = Complex64::new(coupling * coupling * (-half_width * t).exp(), 0.0);
                Ok(value * reframe(self.reference - center, t))
            }
            KernelSource::Custom { f, native, .. } => {
                Ok(f(t) * reframe(self.reference - native, t))
            }
            KernelSource::Spectrum(model) => numeric_correlation(model, self.reference, t),
        }
    }
}

fn reframe(shift: f64, t: f64) -> Complex64 {
    if shift == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, shift * t)
    }
}

/// Φ(t) for `model`, referenced to its own ω_s.
pub fn correlation_function(model: &SpectralResponse, t: f64) -> Result<Complex64> {
    MemoryKernel::from_response(model).eval(t)
}

const KERNEL_REL_TOL: f64 = 1.0e-12;

fn numeric_correlation(model: &SpectralResponse, reference: f64, t: f64) -> Result<Complex64> {
    let weight = model.total_weight();
    if weight == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tol = Tolerance::new(KERNEL_REL_TOL)
        .with_abs(KERNEL_REL_TOL * weight)
        .accepting(1.0e-8)
        .with_max_panels(200_000);
    match model {
        SpectralResponse::Hydrogenic(h) => hydrogenic_correlation(h, reference, t, tol),
        SpectralResponse::Tabulated(tab) => Ok(tabulated_correlation(tab, reference, t)),
        SpectralResponse::Lorentzian(m) => {
            let scale = m.half_width;
            let pts: Vec<f64> = [-1.0e4, -100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0, 1.0e4]
                .iter()
                .map(|k| m.center + k * scale)
                .collect();
            let pts = clean_breakpoints(pts, 0.0, m.center + 1.0e4 * scale);
            oscillatory_real_axis(|w| m.eval(w), &pts, true, reference, t, tol)
        }
    }
}

/// Φ(t) for the hydrogenic response along the ray ω = r e^{−iπ/4}.
///
/// G is analytic in the fourth quadrant (its poles sit at ±iω_c) and
/// decays like |ω|⁻⁷, so the real-axis integral equals the integral along
/// the ray, where e^{−iωt} is exponentially damped.
fn hydrogenic_correlation(
    h: &HydrogenicResponse,
    reference: f64,
    t: f64,
    tol: Tolerance,
) -> Result<Complex64> {
    let wc = h.cutoff;
    let mut pts: Vec<f64> = (-4..=3).map(|k| wc * 10f64.powi(k)).collect();
    pts.push(h.peak());
    if t == 0.0 {
        let pts = clean_breakpoints(pts, 0.0, 1.0e3 * wc);
        let est = quadrature::integrate(|w: f64| h.eval(w), &pts, true, tol)?;
        return Ok(Complex64::new(est.value, 0.0));
    }

    let dir = Complex64::from_polar(1.0, -FRAC_PI_4);
    let damping_end = 60.0 / (t * FRAC_PI_4.sin());
    for k in 0..=64 {
        pts.push(f64::from(k) * damping_end / 64.0);
    }
    let hi = damping_end.min(1.0e3 * wc).max(wc);
    let pts = clean_breakpoints(pts, 0.0, hi);
    let integrand = |r: f64| {
        let w = dir * r;
        h.eval_complex(w) * (Complex64::new(0.0, -t) * w).exp() * dir
    };
    let est = quadrature::integrate(integrand, &pts, true, tol)?;
    Ok(est.value * Complex64::from_polar(1.0, reference * t))
}

/// The interpolant is piecewise linear, so each segment integrates exactly.
fn tabulated_correlation(tab: &TabulatedResponse, reference: f64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(tab.total_weight(), 0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (w, y) in tab.omega.windows(2).zip(tab.value.windows(2)) {
        let h = w[1] - w[0];
        let (e0, e1) = segment_moments(t * h);
        let phase = Complex64::from_polar(1.0, -(w[0] - reference) * t);
        sum += phase * h * (e0 * y[0] + e1 * (y[1] - y[0]));
    }
    sum
}

/// ∫₀¹ e^{-iθs} ds and ∫₀¹ s e^{-iθs} ds.
fn segment_moments(theta: f64) -> (Complex64, Complex64) {
    let a = Complex64::new(0.0, -theta);
    if theta.abs() < 0.5 {
        let (mut e0, mut e1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        // term = a^k / k!
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..30 {
            let kf = k as f64;
            e0 += term / (kf + 1.0);
            e1 += term / (kf + 2.0);
            term = term * a / (kf + 1.0);
        }
        return (e0, e1);
    }
    let ea = a.exp();
    let e0 = (ea - 1.0) / a;
    let e1 = ea / a - (ea - 1.0) / (a * a);
    (e0, e1)
}

fn oscillatory_real_axis<G: Fn(f64) -> f64>(
    g: G,
    pts: &[f64],
    tail: bool,
    reference: f64,
    t: f64,
    tol: Tolerance,
) -> Result<Complex64> {
    let est = quadrature::integrate(
        |w: f64| Complex64::from_polar(g(w), -(w - reference) * t),
        pts,
        tail,
        tol,
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cavity() -> LorentzianMode {
        LorentzianMode::new(4.5e6, 6.3e6, 1.0e15).unwrap()
    }

    #[test]
    fn lorentzian_peak_value() {
        let m = cavity();
        let g = SpectralResponse::from(m);
        assert_eq!(g.eval(1.0e15).unwrap(), 4.5e6 * 4.5e6 / (PI * 6.3e6));
    }

    #[test]
    fn hydrogenic_at_cutoff() {
        let h = HydrogenicResponse::new(2.0, 1.0e19).unwrap();
        assert_relative_eq!(h.eval(1.0e19), 2.0 * 1.0e19 / 16.0, max_relative = 1e-15);
        assert_eq!(h.eval(0.0), 0.0);
        assert!(h.eval(1.0e25) < 1e-20);
    }

    #[test]
    fn hydrogenic_maximum_by_scan() {
        // golden-section search on G, independent of the closed form ω_c/√7
        let h = HydrogenicResponse::new(1.0, 1.0).unwrap();
        let (mut a, mut b) = (0.01, 2.0);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if h.eval(c) > h.eval(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert_relative_eq!(0.5 * (a + b), 0.377_964_473_009_227_2, max_relative = 1e-7);
        assert_relative_eq!(h.peak(), 0.377_964_473_009_227_2, max_relative = 1e-15);
    }

    #[test]
    fn negative_frequency_is_a_domain_error() {
        let g = SpectralResponse::from(cavity());
        assert!(matches!(g.eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(
            correlation_function(&g, -1e-9),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(LorentzianMode::new(0.0, 1.0, 1.0).is_err());
        assert!(LorentzianMode::new(1.0, -1.0, 1.0).is_err());
        assert!(HydrogenicResponse::new(-1.0, 1.0).is_err());
        assert!(HydrogenicResponse::new(1.0, 0.0).is_err());
        assert!(CompositeResponse::new(cavity(), -1.0).is_err());
    }

    #[test]
    fn lorentzian_kernel_is_exponential() {
        let g = SpectralResponse::from(cavity());
        let phi0 = correlation_function(&g, 0.0).unwrap();
        assert_eq!(phi0, Complex64::new(4.5e6 * 4.5e6, 0.0));
        let phi = correlation_function(&g, 1.0 / 6.3e6).unwrap();
        assert_relative_eq!(phi.re, 4.5e6 * 4.5e6 * (-1f64).exp(), max_relative = 1e-14);
        assert_eq!(phi.im, 0.0);
    }

    #[test]
    fn table_parsing() {
        let text = "# omega, G\n1.0, 0.0\n2.0 4.0 # peak\n\n3.0,\t0.0\n";
        let t = TabulatedResponse::parse(text).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.eval(1.5), 2.0);
        assert_eq!(t.eval(2.0), 4.0);
        assert_eq!(t.eval(3.0), 0.0);
        assert_eq!(t.eval(0.5), 0.0);
        assert_eq!(t.eval(3.5), 0.0);
        assert_eq!(t.total_weight(), 4.0);
        assert_eq!(t.centroid(), 2.0);
    }

    #[test]
    fn table_rejects_bad_rows() {
        assert!(TabulatedResponse::parse("1 2 3\n2 3\n").is_err());
        assert!(TabulatedResponse::parse("1 2\n1 3\n").is_err());
        assert!(TabulatedResponse::parse("1 2\n2 -3\n").is_err());
        assert!(TabulatedResponse::parse("1 x\n2 3\n").is_err());
        assert!(TabulatedResponse::parse("1 1\n").is_err());
    }

    #[test]
    fn narrow_box_kernel_at_small_time() {
        // narrow plateau of weight W centred on ω_s; for t ≪ 1/width, Φ ≈ W
        let ws = 1.0e9;
        let half = 1.0e3;
        let height = 2.0;
        let table = TabulatedResponse::new(vec![
            (ws - half - 1.0, 0.0),
            (ws - half, height),
            (ws + half, height),
            (ws + half + 1.0, 0.0),
        ])
        .unwrap();
        let w = table.total_weight();
        let model = SpectralResponse::from(table);
        let phi = correlation_function(&model, 1.0e-6).unwrap();
        // direct midpoint-rule oracle of ∫ G cos((ω-ω_s)t) dω
        let n = 200_000;
        let (lo, hi) = (ws - half - 1.0, ws + half + 1.0);
        let dw = (hi - lo) / n as f64;
        let mut oracle = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let x = lo + (k as f64 + 0.5) * dw;
            let g = model.eval(x).unwrap();
            oracle += Complex64::from_polar(g * dw, -(x - ws) * 1.0e-6);
        }
        assert!((phi - oracle).norm() < 1e-6 * w, "{phi} vs {oracle}, W={w}");
        assert_relative_eq!(phi.re, w, max_relative = 1e-6);
    }

    #[test]
    fn hydrogenic_kernel_weight_and_ray_agree_with_real_axis() {
        let h = HydrogenicResponse::new(1.0, 1.0e19).unwrap();
        let model = SpectralResponse::from(h);
        let phi0 = correlation_function(&model, 0.0).unwrap();
        assert_relative_eq!(phi0.re, 1.0e38 / 6.0, max_relative = 1e-10);
        assert_eq!(phi0.im, 0.0);

        // real-axis oracle with panels of width ≤ π/(5t)
        for t in [3.0e-20, 2.0e-19, 1.5e-18] {
            let phi = correlation_function(&model, t).unwrap();
            let width = PI / (5.0 * t);
            let upper = 200.0 * 1.0e19;
            let n = (upper / width).ceil() as usize;
            let mut oracle = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
                let r: crate::quadrature::PanelRule<Complex64> = crate::quadrature::gauss_kronrod(
                    &|w: f64| Complex64::from_polar(h.eval(w), -(w - 1.0e19) * t),
                    a,
                    b,
                );
                oracle += r.value;
            }
            assert!(
                (phi - oracle).norm() < 1e-9 * phi0.re,
                "t={t:e}: ray {phi} vs axis {oracle}"
            );
        }
    }

    #[test]
    fn zero_coupling_hydrogenic_kernel_vanishes() {
        let model = SpectralResponse::from(HydrogenicResponse::new(0.0, 1.0e19).unwrap());
        assert_eq!(
            correlation_function(&model, 1e-17).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }
}
