//! Excited-state dynamics: the memory-kernel equation
//! dα/dt = −∫₀^t Φ(t−t′) e^{iΔ(t−t′)} α(t′) dt′, its exact solution for a
//! Lorentzian kernel, and population traces under repeated interruption.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decay::{impulsive_rate_time_domain, lorentzian_short_time_amplitude};
use crate::error::{require_positive, Error, Result};
use crate::reservoirs::{CompositeResponse, MemoryKernel, SpectralResponse};

/// Largest admissible h·max(|Δ|, kernel rate) for [`volterra_solve`].
pub const MAX_STEP_PRODUCT: f64 = 0.05;

/// Longest Volterra grid a trace may request; the solver is O(n²).
pub const MAX_VOLTERRA_STEPS: usize = 20_000;

/// Samples per shortest oscillation period or per 1/Γ_s in traces.
pub const SAMPLES_PER_PERIOD: f64 = 40.0;

/// Uniform grid t_k = k·step, k = 0..=steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    step: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(step: f64, steps: usize) -> Result<Self> {
        Ok(Self {
            step: require_positive("step", step)?,
            steps,
        })
    }

    /// `steps` equal steps covering `[0, end]`.
    pub fn spanning(end: f64, steps: usize) -> Result<Self> {
        require_positive("end", end)?;
        if steps == 0 {
            return Err(Error::Domain {
                quantity: "steps",
                value: 0.0,
                requirement: "need at least one step",
            });
        }
        Self::new(end / steps as f64, steps)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }
}

/// Solves the memory-kernel equation with α(0) = 1 by trapezoidal product
/// integration (second order).
pub fn volterra_solve(
    kernel: &MemoryKernel,
    detuning: f64,
    grid: &TimeGrid,
) -> Result<Vec<Complex64>> {
    let h = grid.step();
    let rate = detuning.abs().max(kernel.rate_scale());
    if h * rate > MAX_STEP_PRODUCT * (1.0 + 1.0e-9) {
        return Err(Error::StepTooCoarse {
            step: h,
            suggested: MAX_STEP_PRODUCT / rate,
        });
    }

    let n = grid.steps();
    let weights = (0..=n)
        .map(|j| {
            let t = grid.time(j);
            Ok(kernel.eval(t)? * Complex64::from_polar(1.0, detuning * t))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut alpha = Vec::with_capacity(n + 1);
    alpha.push(Complex64::new(1.0, 0.0));
    let k0 = weights[0];
    let denom = Complex64::new(1.0, 0.0) + k0 * (0.25 * h * h);
    let mut memory_prev = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        let mut history = weights[i] * alpha[0] * 0.5;
        for j in 1..i {
            history += weights[i - j] * alpha[j];
        }
        history *= h;
        let next = (alpha[i - 1] - (memory_prev + history) * (0.5 * h)) / denom;
        memory_prev = history + k0 * next * (0.5 * h);
        alpha.push(next);
    }
    Ok(alpha)
}

/// Exact α_e(t) for the Lorentzian kernel g²e^{−Γt}, the solution of
/// α̈ + (Γ − iΔ)α̇ + g²α = 0 with α(0) = 1, α̇(0) = 0.
pub fn lorentzian_exact_amplitude(
    coupling: f64,
    half_width: f64,
    detuning: f64,
    t: f64,
) -> Complex64 {
    let m = Complex64::new(-0.5 * half_width, 0.5 * detuning);
    let d = (m * m - coupling * coupling).sqrt();
    let dt = d * t;
    if dt.re.abs() > 20.0 {
        let r = m / d;
        ((m + d) * t).exp() * (1.0 - r) * 0.5 + ((m - d) * t).exp() * (1.0 + r) * 0.5
    } else {
        (m * t).exp() * (dt.cosh() - m * t * sinhc(dt))
    }
}

fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1.0e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// How many intervals a schedule covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleExtent {
    Count(usize),
    Until(f64),
}

/// Impulsive measurements every τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSchedule {
    interval: f64,
    extent: ScheduleExtent,
}

impl MeasurementSchedule {
    pub fn with_count(interval: f64, count: usize) -> Result<Self> {
        require_positive("tau", interval)?;
        if count == 0 {
            return Err(Error::Domain {
                quantity: "count",
                value: 0.0,
                requirement: "a schedule needs at least one interruption",
            });
        }
        Ok(Self {
            interval,
            extent: ScheduleExtent::Count(count),
        })
    }

    pub fn until(interval: f64, t_max: f64) -> Result<Self> {
        require_positive("tau", interval)?;
        require_positive("t_max", t_max)?;
        if t_max < interval {
            return Err(Error::Domain {
                quantity: "t_max",
                value: t_max,
                requirement: "must cover at least one interval",
            });
        }
        Ok(Self {
            interval,
            extent: ScheduleExtent::Until(t_max),
        })
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn extent(&self) -> ScheduleExtent {
        self.extent
    }

    pub fn end(&self) -> f64 {
        match self.extent {
            ScheduleExtent::Count(n) => n as f64 * self.interval,
            ScheduleExtent::Until(t) => t,
        }
    }
}

/// Sampled W(t) with optional amplitude and interruption bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    times: Vec<f64>,
    population: Vec<f64>,
    amplitude: Option<Vec<Complex64>>,
    interrupted: Vec<bool>,
    interruptions: Vec<f64>,
}

impl EvolutionTrace {
    fn new(times: Vec<f64>, population: Vec<f64>, amplitude: Option<Vec<Complex64>>) -> Self {
        let interrupted = vec![false; times.len()];
        Self {
            times,
            population: population.into_iter().map(|w| w.clamp(0.0, 1.0)).collect(),
            amplitude,
            interrupted,
            interruptions: Vec::new(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn population(&self) -> &[f64] {
        &self.population
    }

    /// Effective amplitude with |α|² = W; its phase restarts at every
    /// interruption.
    pub fn amplitude(&self) -> Option<&[Complex64]> {
        self.amplitude.as_deref()
    }

    /// Per-sample flag: the sample sits on an interruption.
    pub fn interrupted(&self) -> &[bool] {
        &self.interrupted
    }

    pub fn interruptions(&self) -> &[f64] {
        &self.interruptions
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation of W; clamps outside the sampled range.
    pub fn population_at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return self.population[0];
        }
        if i == self.times.len() {
            return self.population[i - 1];
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (w0, w1) = (self.population[i - 1], self.population[i]);
        w0 + (w1 - w0) * (t - t0) / (t1 - t0)
    }

    /// Writes `t,W,re_alpha,im_alpha,interrupted` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,W,re_alpha,im_alpha,interrupted")?;
        for i in 0..self.len() {
            let (re, im) = match &self.amplitude {
                Some(a) => (format_sci(a[i].re), format_sci(a[i].im)),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                format_sci(self.times[i]),
                format_sci(self.population[i]),
                re,
                im,
                u8::from(self.interrupted[i])
            )?;
        }
        Ok(())
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// Least-squares fit of −ln W = κt + c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits −ln W over samples with t in `[from, to]` and W > 0.
pub fn fit_decay(times: &[f64], population: &[f64], from: f64, to: f64) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(population)
        .filter(|(t, w)| **t >= from && **t <= to && **w > 0.0)
        .map(|(t, w)| (*t, -w.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if stt == 0.0 {
        return None;
    }
    let rate = sty / stt;
    let intercept = my - rate * mt;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sty * sty / (stt * syy)
    };
    Some(DecayFit {
        rate,
        intercept,
        r_squared,
    })
}

impl EvolutionTrace {
    pub fn fit(&self, from: f64, to: f64) -> Option<DecayFit> {
        fit_decay(&self.times, &self.population, from, to)
    }

    /// Fit through the interruption instants only (and t = 0).
    pub fn fit_interruptions(&self) -> Option<DecayFit> {
        let (t, w): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.population)
            .zip(&self.interrupted)
            .enumerate()
            .filter(|(i, (_, flag))| *i == 0 || **flag)
            .map(|(_, ((t, w), _))| (*t, *w))
            .unzip();
        fit_decay(&t, &w, 0.0, f64::INFINITY)
    }

    /// Fit of the upper envelope max_{t′≥t} W(t′), which irons out Rabi
    /// oscillations.
    pub fn fit_envelope(&self, from: f64, to: f64) -> Option<DecayFit> {
        let mut envelope = self.population.clone();
        for i in (0..envelope.len().saturating_sub(1)).rev() {
            envelope[i] = envelope[i].max(envelope[i + 1]);
        }
        fit_decay(&self.times, &envelope, from, to)
    }
}

/// Source of the uninterrupted sharp-part amplitude α_e(t).
enum Propagator {
    Exact {
        coupling: f64,
        half_width: f64,
        detuning: f64,
    },
    Volterra {
        kernel: MemoryKernel,
        detuning: f64,
        max_step: f64,
    },
}

impl Propagator {
    fn new(sharp: &SpectralResponse, detuning: f64) -> Self {
        let kernel = MemoryKernel::from_response(sharp);
        match kernel.is_lorentzian() {
            Some((coupling, half_width)) => Self::Exact {
                coupling,
                half_width,
                detuning,
            },
            None => {
                let rate = detuning.abs().max(kernel.rate_scale());
                let max_step = if rate > 0.0 {
                    0.5 * MAX_STEP_PRODUCT / rate
                } else {
                    f64::INFINITY
                };
                Self::Volterra {
                    kernel,
                    detuning,
                    max_step,
                }
            }
        }
    }

    /// Sampling step honouring the trace density rule.
    fn sample_step(&self) -> f64 {
        match *self {
            Self::Exact {
                coupling,
                half_width,
                detuning,
            } => {
                let rabi = (detuning * detuning + 4.0 * coupling * coupling).sqrt();
                let by_width = 1.0 / (SAMPLES_PER_PERIOD * half_width);
                let by_rabi = 2.0 * std::f64::consts::PI / (SAMPLES_PER_PERIOD * rabi);
                by_width.min(by_rabi)
            }
            Self::Volterra { max_step, .. } => max_step,
        }
    }

    /// α_e at k·end/steps for k = 0..=steps.
    fn sample(&self, end: f64, steps: usize) -> Result<Vec<Complex64>> {
        match self {
            Self::Exact {
                coupling,
                half_width,
                detuning,
            } => Ok((0..=steps)
                .map(|k| {
                    let t = end * k as f64 / steps as f64;
                    lorentzian_exact_amplitude(*coupling, *half_width, *detuning, t)
                })
                .collect()),
            Self::Volterra {
                kernel,
                detuning,
                max_step,
            } => {
                let sub = if max_step.is_finite() {
                    ((end / steps as f64) / max_step).ceil().max(1.0) as usize
                } else {
                    1
                };
                if steps * sub > MAX_VOLTERRA_STEPS {
                    return Err(Error::Domain {
                        quantity: "t_max",
                        value: end,
                        requirement: "trace would need more than 20000 memory-kernel steps",
                    });
                }
                let grid = TimeGrid::spanning(end, steps * sub)?;
                let fine = volterra_solve(kernel, *detuning, &grid)?;
                Ok(fine.into_iter().step_by(sub).collect())
            }
        }
    }
}

/// e^{−γ_b t} on a uniform grid.
pub fn background_trace(background_rate: f64, t_max: f64, steps: usize) -> Result<EvolutionTrace> {
    let grid = TimeGrid::spanning(t_max, steps)?;
    let times: Vec<f64> = (0..=steps).map(|k| grid.time(k)).collect();
    let population = times.iter().map(|t| (-background_rate * t).exp()).collect();
    let amplitude = times
        .iter()
        .map(|t| Complex64::new((-0.5 * background_rate * t).exp(), 0.0))
        .collect();
    Ok(EvolutionTrace::new(times, population, Some(amplitude)))
}

/// W(t) = e^{−γ_b t}|α_e(t)|² without interruptions.
pub fn free_evolution(
    system: &CompositeResponse,
    detuning: f64,
    t_max: f64,
) -> Result<EvolutionTrace> {
    require_positive("t_max", t_max)?;
    let prop = Propagator::new(system.sharp(), detuning);
    let steps = (t_max / prop.sample_step()).ceil().max(1.0) as usize;
    let alpha = prop.sample(t_max, steps)?;
    let gb = system.background_rate();
    let times: Vec<f64> = (0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect();
    let amplitude: Vec<Complex64> = times
        .iter()
        .zip(&alpha)
        .map(|(t, a)| a * (-0.5 * gb * t).exp())
        .collect();
    let population = amplitude.iter().map(|a| a.norm_sqr()).collect();
    Ok(EvolutionTrace::new(times, population, Some(amplitude)))
}

/// W(nτ + s) = e^{−γ_b(nτ+s)} |α_e(τ)|^{2n} |α_e(s)|²: each measurement
/// keeps the population and erases the phase and the reservoir memory.
pub fn interrupted_evolution(
    system: &CompositeResponse,
    detuning: f64,
    schedule: &MeasurementSchedule,
) -> Result<EvolutionTrace> {
    let tau = schedule.interval();
    let end = schedule.end();
    let prop = Propagator::new(system.sharp(), detuning);
    let per_interval = (tau / prop.sample_step()).ceil().max(4.0) as usize;
    let alpha = prop.sample(tau, per_interval)?;
    let survival = alpha[per_interval].norm();
    let gb = system.background_rate();

    let full = (end / tau * (1.0 + 1.0e-12)).floor() as usize;
    let mut times = vec![0.0];
    let mut amplitude = vec![Complex64::new(1.0, 0.0)];
    let mut flags = vec![false];
    let mut interruptions = Vec::new();
    let mut push = |t: f64, a: Complex64, flag: bool| {
        times.push(t);
        amplitude.push(a * (-0.5 * gb * t).exp());
        flags.push(flag);
    };

    for n in 0..full {
        let start = n as f64 * tau;
        let carried = survival.powi(n as i32);
        for (j, a) in alpha.iter().enumerate().skip(1) {
            let t = start + tau * j as f64 / per_interval as f64;
            if j == per_interval {
                // phase erased; magnitude kept
                let t_int = (n + 1) as f64 * tau;
                push(t_int, Complex64::new(carried * survival, 0.0), true);
                interruptions.push(t_int);
            } else {
                push(t, a * carried, false);
            }
        }
    }
    let covered = full as f64 * tau;
    if end - covered > 1.0e-9 * tau {
        let rest = end - covered;
        let steps = ((rest / tau) * per_interval as f64).ceil().max(1.0) as usize;
        let partial = prop.sample(rest, steps)?;
        let carried = survival.powi(full as i32);
        for (j, a) in partial.iter().enumerate().skip(1) {
            push(covered + rest * j as f64 / steps as f64, a * carried, false);
        }
    }

    let population = amplitude.iter().map(|a| a.norm_sqr()).collect();
    let mut trace = EvolutionTrace::new(times, population, Some(amplitude));
    trace.interrupted = flags;
    trace.interruptions = interruptions;
    Ok(trace)
}

/// One row of the detuned-interruption comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhancementRow {
    pub interval: f64,
    /// Δτ in rad.
    pub phase: f64,
    /// Rate fitted to the interrupted trace (1/s).
    pub interrupted_rate: f64,
    /// γ_b + 2(1 − Re α_e(τ))/τ from the short-time amplitude.
    pub predicted_rate: f64,
    /// Envelope decay rate of the uninterrupted trace.
    pub uninterrupted_rate: f64,
}

impl EnhancementRow {
    pub fn enhanced(&self) -> bool {
        self.interrupted_rate > self.uninterrupted_rate
    }
}

/// Compares interrupted decay at each τ against the uninterrupted envelope
/// over `[0, t_max]`.
pub fn detuned_enhancement(
    system: &CompositeResponse,
    detuning: f64,
    intervals: &[f64],
    t_max: f64,
) -> Result<Vec<EnhancementRow>> {
    let gb = system.background_rate();
    let free = free_evolution(system, detuning, t_max)?;
    let uninterrupted_rate = free
        .fit_envelope(0.25 * t_max, t_max)
        .map(|f| f.rate)
        .unwrap_or(f64::NAN);
    let kernel = MemoryKernel::from_response(system.sharp());

    intervals
        .iter()
        .map(|&tau| {
            let schedule = MeasurementSchedule::until(tau, t_max)?;
            let trace = interrupted_evolution(system, detuning, &schedule)?;
            let interrupted_rate = trace
                .fit_interruptions()
                .map(|f| f.rate)
                .unwrap_or(f64::NAN);
            let sharp = match kernel.is_lorentzian() {
                Some((g, gamma)) => {
                    lorentzian_short_time_amplitude(g, gamma, detuning, tau)?.rate(tau)
                }
                None => impulsive_rate_time_domain(&kernel, detuning, tau)?,
            };
            Ok(EnhancementRow {
                interval: tau,
                phase: detuning * tau,
                interrupted_rate,
                predicted_rate: sharp + gb,
                uninterrupted_rate,
            })
        })
        .collect()
}
