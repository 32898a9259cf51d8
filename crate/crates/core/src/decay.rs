//! Measurement-modified decay rates.
//!
//! Two routes to the same rate: the spectral overlap κ = 2π∫G(ω)F(ω−ω_a)dω
//! and, for impulsive interruptions, the memory-kernel integral
//! κ = (2/τ) Re∫₀^τ (τ−t) Φ(t) e^{iΔt} dt. Closed forms cover the
//! Lorentzian short-time amplitude and the hydrogenic response under
//! Lorentzian dephasing.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::filters::{DephasingFilter, SincSquaredFilter};
use crate::quadrature::{self, clean_breakpoints, Tolerance};
use crate::reservoirs::{CompositeResponse, HydrogenicResponse, MemoryKernel, SpectralResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethod {
    Quadrature,
    TimeDomain,
    ClosedForm,
}

/// κ = κ_s + γ_b with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    total: f64,
    sharp: f64,
    background: f64,
    method: RateMethod,
    error_estimate: f64,
    warnings: Vec<String>,
}

impl RateResult {
    pub fn new(sharp: f64, background: f64, method: RateMethod, error_estimate: f64) -> Self {
        Self {
            total: sharp + background,
            sharp,
            background,
            method,
            error_estimate,
            warnings: Vec::new(),
        }
    }

    /// Adds a background rate γ_b, keeping κ = κ_s + γ_b.
    pub fn with_background(mut self, background: f64) -> Self {
        self.background = background;
        self.total = self.sharp + background;
        self
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn sharp(&self) -> f64 {
        self.sharp
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn method(&self) -> RateMethod {
        self.method
    }

    /// Absolute error estimate on κ_s (1/s).
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

const OVERLAP_TOL: Tolerance = Tolerance::new(1.0e-10)
    .accepting(1.0e-8)
    .with_max_panels(400_000);

/// κ_s = 2π∫G(ω)F(ω−ω_a)dω by breakpoint-aware adaptive quadrature.
pub fn universal_rate(
    model: &SpectralResponse,
    filter: &DephasingFilter,
    omega_a: f64,
) -> Result<RateResult> {
    require_positive("omega_a", omega_a)?;
    let (support_lo, support_hi) = model.support();
    let lo = support_lo - omega_a;
    let band = model.significant_band(omega_a);

    let mut pts = model.features(omega_a);
    pts.extend(filter.breakpoints(band));
    let (hi, tail) = match support_hi {
        Some(h) => (h - omega_a, false),
        None => {
            let end = pts
                .iter()
                .copied()
                .filter(|p| p.is_finite())
                .fold(lo, f64::max);
            let end = if end > lo {
                end
            } else {
                lo + filter.width().max(model.feature_width())
            };
            (end, true)
        }
    };
    let pts = clean_breakpoints(pts, lo, hi);

    let integrand = |delta: f64| model.eval_detuned(omega_a, delta) * filter.eval(delta);
    let est = quadrature::integrate(integrand, &pts, tail, OVERLAP_TOL)?;
    Ok(RateResult::new(
        2.0 * PI * est.value,
        0.0,
        RateMethod::Quadrature,
        2.0 * PI * est.abs_error,
    ))
}

/// [`universal_rate`] for the sharp part plus the background rate γ_b.
pub fn composite_rate(
    system: &CompositeResponse,
    filter: &DephasingFilter,
    omega_a: f64,
) -> Result<RateResult> {
    Ok(universal_rate(system.sharp(), filter, omega_a)?.with_background(system.background_rate()))
}

const TIME_DOMAIN_TOL: Tolerance = Tolerance::new(1.0e-10)
    .accepting(1.0e-7)
    .with_max_panels(100_000);

/// κ_s = (2/τ) Re∫₀^τ (τ−t) Φ(t) e^{iΔt} dt, where Δ = ω_a − ω_s is
/// measured from the kernel's reference frequency.
pub fn impulsive_rate_time_domain(
    kernel: &MemoryKernel,
    detuning: f64,
    interval: f64,
) -> Result<f64> {
    let tau = require_positive("tau", interval)?;
    if !detuning.is_finite() {
        return Err(Error::Domain {
            quantity: "detuning",
            value: detuning,
            requirement: "must be finite",
        });
    }

    let mut pts = Vec::new();
    let t0 = tau.min(kernel.short_time()) * 1.0e-3;
    let mut t = t0;
    while t < tau {
        pts.push(t);
        t *= 10f64.powf(0.125);
    }
    if detuning != 0.0 {
        let spacing = (PI / detuning.abs()).max(tau / 4096.0);
        let n = (tau / spacing).floor() as usize;
        pts.extend((1..=n).map(|k| k as f64 * spacing));
    }
    let pts = clean_breakpoints(pts, 0.0, tau);

    // evaluation errors are stashed and reported after the quadrature
    let failure = std::cell::RefCell::new(None);
    let integrand = |t: f64| match kernel.eval(t) {
        Ok(phi) => phi * Complex64::from_polar(tau - t, detuning * t),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let est = quadrature::integrate(integrand, &pts, false, TIME_DOMAIN_TOL)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 / tau * est.value.re)
}

/// Short-time amplitude with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeAmplitude {
    pub amplitude: Complex64,
    /// τ ≪ (Γ_s + |Δ|)⁻¹ and τ ≪ g_s⁻¹, with ≪ read as a factor of ten.
    pub within_validity: bool,
}

impl ShortTimeAmplitude {
    /// κ_s = (2/τ)(1 − Re α_e).
    pub fn rate(&self, interval: f64) -> f64 {
        2.0 / interval * (1.0 - self.amplitude.re)
    }
}

/// α_e(τ) ≈ 1 − g²/(Γ−iΔ)·[τ + (e^{(iΔ−Γ)τ} − 1)/(Γ−iΔ)].
pub fn lorentzian_short_time_amplitude(
    coupling: f64,
    half_width: f64,
    detuning: f64,
    interval: f64,
) -> Result<ShortTimeAmplitude> {
    if interval.is_nan() || interval < 0.0 {
        return Err(Error::Domain {
            quantity: "tau",
            value: interval,
            requirement: "must be non-negative",
        });
    }
    let b = Complex64::new(half_width, -detuning);
    // g²/b·[τ + (e^{-bτ} − 1)/b] = g²τ²·φ₂(bτ) with φ₂(z) = (e^{-z} − 1 + z)/z²
    let amplitude =
        Complex64::new(1.0, 0.0) - phi2(b * interval) * (coupling * coupling * interval * interval);
    let within_validity =
        interval * (half_width + detuning.abs()) <= 0.1 && interval * coupling <= 0.1;
    Ok(ShortTimeAmplitude {
        amplitude,
        within_validity,
    })
}

fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 1.0e-2 {
        // 1/2 − z/6 + z²/24 − z³/120 + z⁴/720 − z⁵/5040
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 3..=8 {
            term = -term * z / f64::from(k);
            sum += term;
        }
        sum
    } else {
        ((-z).exp() - 1.0 + z) / (z * z)
    }
}

/// f = (ν − iω_a)/ω_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRatio(Complex64);

impl ComplexRatio {
    pub fn new(width: f64, omega_a: f64, cutoff: f64) -> Self {
        Self(Complex64::new(width, -omega_a) / cutoff)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// |f² − 1| below which the bracket is summed as a power series.
pub const SERIES_THRESHOLD: f64 = 0.05;

/// ν/ω_c at or above which the hydrogenic result is flagged.
pub const VALIDITY_CEILING: f64 = 0.1;

/// Rate for the hydrogenic response under Lorentzian dephasing of width ν,
/// from the closed-form overlap.
pub fn hydrogenic_lorentzian_rate(
    response: &HydrogenicResponse,
    omega_a: f64,
    width: f64,
) -> Result<RateResult> {
    require_positive("omega_a", omega_a)?;
    require_positive("nu", width)?;
    let wc = response.cutoff();
    let f = ComplexRatio::new(width, omega_a, wc).value();
    let bracket = hydrogenic_bracket(f);
    let kappa = response.coupling() * wc / 3.0 * bracket.re;
    let mut result = RateResult::new(kappa, 0.0, RateMethod::ClosedForm, 0.0);
    if width >= VALIDITY_CEILING * wc {
        result = result.with_warning(format!(
            "nu = {width:e} is not small against omega_c = {wc:e}: outside model validity"
        ));
    }
    Ok(result)
}

/// f(2f⁴−7f²+11)/(2(f²−1)³) − 6f ln f/(f²−1)⁴ − 3iπ(f²+4f+5)/(16(f+1)⁴).
pub(crate) fn hydrogenic_bracket(f: Complex64) -> Complex64 {
    let f2 = f * f;
    let u = f2 - 1.0;
    let singular = if u.norm() < SERIES_THRESHOLD {
        // with u = f² − 1 the first two terms equal f·Σ 3(−u)^m/(m+4)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for m in 0..40 {
            sum += power * (3.0 / f64::from(m + 4));
            power *= -u;
        }
        f * sum
    } else {
        let u3 = u * u * u;
        f * (2.0 * f2 * f2 - 7.0 * f2 + 11.0) / (2.0 * u3) - 6.0 * f * f.ln() / (u3 * u)
    };
    let fp1 = f + 1.0;
    let regular =
        Complex64::new(0.0, 3.0 * PI) * (f2 + 4.0 * f + 5.0) / (16.0 * fp1 * fp1 * fp1 * fp1);
    singular - regular
}

/// Sinc²-filter overlap and memory-kernel rate for the same setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crosscheck {
    pub frequency_domain: f64,
    pub time_domain: f64,
    /// |κ_freq − κ_time| / max(|κ_freq|, |κ_time|); zero when both vanish.
    pub discrepancy: f64,
}

pub fn sinc_vs_kernel_crosscheck(
    model: &SpectralResponse,
    omega_a: f64,
    interval: f64,
) -> Result<Crosscheck> {
    let filter = DephasingFilter::from(SincSquaredFilter::new(interval)?);
    let frequency_domain = universal_rate(model, &filter, omega_a)?.sharp();
    let kernel = MemoryKernel::from_response(model);
    let detuning = omega_a - kernel.reference_frequency();
    let time_domain = impulsive_rate_time_domain(&kernel, detuning, interval)?;
    let scale = frequency_domain.abs().max(time_domain.abs());
    let discrepancy = if scale == 0.0 {
        0.0
    } else {
        (frequency_domain - time_domain).abs() / scale
    };
    Ok(Crosscheck {
        frequency_domain,
        time_domain,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::LorentzianFilter;
    use crate::reservoirs::LorentzianMode;
    use approx::assert_relative_eq;

    const G: f64 = 4.5e6;
    const GAMMA: f64 = 6.3e6;
    const WS: f64 = 1.0e15;

    fn line() -> SpectralResponse {
        LorentzianMode::new(G, GAMMA, WS).unwrap().into()
    }

    // Dense-grid oracle for the Lorentzian ⊗ Lorentzian convolution,
    // substituting x = tan θ to turn the infinite line into a finite one.
    fn convolution_oracle(gamma: f64, nu: f64, detuning: f64) -> f64 {
        let n = 400_000;
        let mut sum = 0.0;
        for k in 0..n {
            let theta = -PI / 2.0 + PI * (k as f64 + 0.5) / n as f64;
            let x = nu * theta.tan();
            let jac = nu / theta.cos().powi(2);
            let filter = nu / (PI * (nu * nu + x * x));
            let y = x + detuning;
            let spec = G * G * gamma / (PI * (gamma * gamma + y * y));
            sum += spec * filter * jac * PI / n as f64;
        }
        2.0 * PI * sum
    }

    #[test]
    fn lorentzian_convolution_identity() {
        for (nu, detuning) in [(1.0e6, 0.0), (3.0e7, 2.0e7), (2.0e5, -5.0e6)] {
            let closed = 2.0 * G * G * (GAMMA + nu) / ((GAMMA + nu).powi(2) + detuning * detuning);
            let oracle = convolution_oracle(GAMMA, nu, detuning);
            assert_relative_eq!(closed, oracle, max_relative = 1e-5);
            let filter = LorentzianFilter::new(nu).unwrap().into();
            let k = universal_rate(&line(), &filter, WS + detuning).unwrap();
            assert_relative_eq!(k.sharp(), closed, max_relative = 1e-8);
            assert_eq!(k.total(), k.sharp() + k.background());
        }
    }

    #[test]
    fn markovian_limit() {
        let filter = LorentzianFilter::new(1.0e-3).unwrap().into();
        let k = universal_rate(&line(), &filter, WS).unwrap();
        assert_relative_eq!(k.sharp(), 2.0 * G * G / GAMMA, max_relative = 1e-8);
    }

    #[test]
    fn zero_coupling_gives_zero_rate() {
        let h: SpectralResponse = HydrogenicResponse::new(0.0, 1.0e19).unwrap().into();
        let filter = SincSquaredFilter::new(1.0e-16).unwrap().into();
        assert_eq!(universal_rate(&h, &filter, 1.0e15).unwrap().sharp(), 0.0);
        let cc = sinc_vs_kernel_crosscheck(&h, 1.0e15, 1.0e-16).unwrap();
        assert_eq!(
            (cc.frequency_domain, cc.time_domain, cc.discrepancy),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn rate_rejects_bad_omega() {
        let filter = LorentzianFilter::new(1.0).unwrap().into();
        assert!(universal_rate(&line(), &filter, 0.0).is_err());
        let k = MemoryKernel::from_response(&line());
        assert!(impulsive_rate_time_domain(&k, 0.0, 0.0).is_err());
        assert!(impulsive_rate_time_domain(&k, 0.0, -1.0).is_err());
    }

    #[test]
    fn zeno_short_time_law() {
        let k = MemoryKernel::from_response(&line());
        let tau = 1.0e-10;
        let rate = impulsive_rate_time_domain(&k, 0.0, tau).unwrap();
        assert_relative_eq!(rate, G * G * tau, max_relative = GAMMA * tau);
        // explicit integral: (2g²/Γ²τ)(Γτ − 1 + e^{−Γτ})
        for tau in [1.0e-9, 3.0e-8, 1.0e-6] {
            let x: f64 = GAMMA * tau;
            let exact = 2.0 * G * G / (GAMMA * GAMMA * tau) * (x - 1.0 + (-x).exp());
            let rate = impulsive_rate_time_domain(&k, 0.0, tau).unwrap();
            assert_relative_eq!(rate, exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn long_interval_approaches_markov_rate() {
        let k = MemoryKernel::from_response(&line());
        let tau = 1.0e-2;
        let rate = impulsive_rate_time_domain(&k, 0.0, tau).unwrap();
        let markov = 2.0 * G * G / GAMMA;
        assert_relative_eq!(
            rate,
            markov * (1.0 - 1.0 / (GAMMA * tau)),
            max_relative = 1e-9
        );
        let filter = SincSquaredFilter::new(tau).unwrap().into();
        let freq = universal_rate(&line(), &filter, WS).unwrap().sharp();
        assert_relative_eq!(freq, rate, max_relative = 1e-6);
    }

    #[test]
    fn zero_kernel_gives_zero_rate() {
        let k = MemoryKernel::zero(WS);
        assert_eq!(impulsive_rate_time_domain(&k, 3.0e6, 1.0e-8).unwrap(), 0.0);
    }

    #[test]
    fn short_time_amplitude() {
        let a = lorentzian_short_time_amplitude(G, GAMMA, 0.0, 0.0).unwrap();
        assert_eq!(a.amplitude, Complex64::new(1.0, 0.0));
        // on resonance 2(1 − Re α)/τ → g²τ as τ → 0
        let tau = 1.0e-11;
        let a = lorentzian_short_time_amplitude(G, GAMMA, 0.0, tau).unwrap();
        assert!(a.within_validity);
        assert_relative_eq!(a.rate(tau), G * G * tau, max_relative = GAMMA * tau);
        let a = lorentzian_short_time_amplitude(G, GAMMA, 1.0e8, 3.0e-7).unwrap();
        assert!(!a.within_validity);
    }

    #[test]
    fn short_time_amplitude_matches_direct_formula() {
        for (detuning, tau) in [(0.0, 3.0e-8), (1.0e8, 3.0 * PI * 1.0e-8), (-2.0e7, 1.0e-7)] {
            let b = Complex64::new(GAMMA, -detuning);
            let direct = Complex64::new(1.0, 0.0)
                - G * G / b * (tau + ((Complex64::new(-GAMMA, detuning) * tau).exp() - 1.0) / b);
            let a = lorentzian_short_time_amplitude(G, GAMMA, detuning, tau).unwrap();
            assert!((a.amplitude - direct).norm() < 1e-12);
            // and the kernel route for the same interval
            let k = MemoryKernel::from_response(&line());
            let rate = impulsive_rate_time_domain(&k, detuning, tau).unwrap();
            assert_relative_eq!(a.rate(tau), rate, max_relative = 1e-9);
        }
    }

    fn bracket_quadrature_oracle(nu: f64, a: f64) -> f64 {
        // 2∫₀^∞ x/(1+x²)⁴ · (ν/π)/(ν² + (x−a)²) dx, in units of ω_c
        let pts = clean_breakpoints(
            vec![a - 100.0 * nu, a - nu, a, a + nu, a + 100.0 * nu, 1.0, 10.0],
            0.0,
            100.0,
        );
        let f = |x: f64| x / (1.0 + x * x).powi(4) * nu / (PI * (nu * nu + (x - a) * (x - a)));
        2.0 * PI
            * quadrature::integrate(f, &pts, true, Tolerance::new(1e-12))
                .unwrap()
                .value
    }

    #[test]
    fn closed_form_reference_point() {
        let h = HydrogenicResponse::new(1.0, 1.0e19).unwrap();
        let k = hydrogenic_lorentzian_rate(&h, 1.0e18, 1.0e17).unwrap();
        let oracle = 1.0e19 * bracket_quadrature_oracle(0.01, 0.1);
        assert_relative_eq!(k.total(), oracle, max_relative = 1e-9);
        // independent high-precision value, α ω_c · 0.5959643184651112
        assert_relative_eq!(
            k.total(),
            1.0e19 * 0.595_964_318_465_111_2,
            max_relative = 1e-10
        );
        assert!(k.warnings().is_empty());
    }

    #[test]
    fn closed_form_near_unit_ratio() {
        // ω_a → 0 and ν ≈ ω_c puts f² near 1; series and closed form must join
        let h = HydrogenicResponse::new(1.0, 1.0).unwrap();
        for (nu, a) in [(1.0, 1e-6), (1.02, 1e-3), (0.97, 0.01), (1.0 + 1e-5, 1e-7)] {
            let k = hydrogenic_lorentzian_rate(&h, a, nu).unwrap();
            let oracle = bracket_quadrature_oracle(nu, a);
            assert_relative_eq!(k.total(), oracle, max_relative = 1e-8);
            assert!(!k.warnings().is_empty());
        }
        // continuity across the switch
        let f_in = Complex64::new(1.0 + 0.024_9, -1e-4);
        let f_out = Complex64::new(1.0 + 0.025_1, -1e-4);
        assert!((hydrogenic_bracket(f_in) - hydrogenic_bracket(f_out)).norm() < 1e-3);
    }

    #[test]
    fn closed_form_zero_coupling() {
        let h = HydrogenicResponse::new(0.0, 1.0e19).unwrap();
        assert_eq!(
            hydrogenic_lorentzian_rate(&h, 1.0e15, 1.0e14)
                .unwrap()
                .total(),
            0.0
        );
    }

    #[test]
    fn complex_ratio_signs() {
        let f = ComplexRatio::new(1e12, 1e15, 1e19).value();
        assert!(f.re > 0.0 && f.im <= 0.0);
    }

    #[test]
    fn lorentzian_crosscheck() {
        let cc = sinc_vs_kernel_crosscheck(&line(), WS + 3.0e6, 3.0e-8).unwrap();
        assert!(cc.discrepancy <= 1e-6, "{cc:?}");
    }

    #[test]
    fn hydrogenic_crosscheck() {
        let h: SpectralResponse = HydrogenicResponse::new(1.0, 1.0e19).unwrap().into();
        let cc = sinc_vs_kernel_crosscheck(&h, 1.0e15, 1.0e-16).unwrap();
        assert!(cc.discrepancy <= 1e-4, "{cc:?}");
    }
}
