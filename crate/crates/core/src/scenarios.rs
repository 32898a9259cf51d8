//! Cavity parameter mapping, pump-pulse feasibility checks and the named
//! presets behind the figure reproductions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::evolution::{
    background_trace, free_evolution, interrupted_evolution, EvolutionTrace, MeasurementSchedule,
};
use crate::reservoirs::{CompositeResponse, HydrogenicResponse, LorentzianMode};

/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e10;

/// Atomic transition frequency used when a cavity scenario needs an
/// absolute ω_a (rad/s). Only detunings matter for the cavity results.
pub const OPTICAL_FREQUENCY: f64 = 1.0e15;

/// Mirror factor, length and solid-angle fraction of a single-mode cavity
/// around the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    finesse: f64,
    length_cm: f64,
    solid_angle: f64,
    free_space_rate: f64,
}

impl CavityGeometry {
    /// `finesse` is (1−R)⁻², `solid_angle` the fraction of 4π covered.
    pub fn new(
        finesse: f64,
        length_cm: f64,
        solid_angle: f64,
        free_space_rate: f64,
    ) -> Result<Self> {
        if !(finesse > 1.0 && finesse.is_finite()) {
            return Err(Error::Domain {
                quantity: "finesse",
                value: finesse,
                requirement: "must exceed 1",
            });
        }
        require_positive("length", length_cm)?;
        if !(solid_angle > 0.0 && solid_angle < 1.0) {
            return Err(Error::Domain {
                quantity: "solid_angle",
                value: solid_angle,
                requirement: "must lie in (0, 1)",
            });
        }
        require_positive("gamma_f", free_space_rate)?;
        Ok(Self {
            finesse,
            length_cm,
            solid_angle,
            free_space_rate,
        })
    }

    pub fn finesse(&self) -> f64 {
        self.finesse
    }

    pub fn length_cm(&self) -> f64 {
        self.length_cm
    }

    pub fn solid_angle(&self) -> f64 {
        self.solid_angle
    }

    pub fn free_space_rate(&self) -> f64 {
        self.free_space_rate
    }
}

/// Γ_s, g_s and γ_b of a cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub half_width: f64,
    pub coupling: f64,
    pub background_rate: f64,
}

impl CavityParams {
    /// The cavity as a composite reservoir, mode centred at `atom − detuning`.
    pub fn system(&self, atom_frequency: f64, detuning: f64) -> Result<CompositeResponse> {
        let mode = LorentzianMode::new(self.coupling, self.half_width, atom_frequency - detuning)?;
        CompositeResponse::new(mode, self.background_rate)
    }
}

/// Γ_s = c/(L√F), g_s = √(c f γ_f /(2L)), γ_b = (1 − f)γ_f.
pub fn cavity_params(geom: &CavityGeometry) -> CavityParams {
    let c = SPEED_OF_LIGHT;
    CavityParams {
        half_width: c / (geom.length_cm * geom.finesse.sqrt()),
        coupling: (c * geom.solid_angle * geom.free_space_rate / (2.0 * geom.length_cm)).sqrt(),
        background_rate: (1.0 - geom.solid_angle) * geom.free_space_rate,
    }
}

/// Interval, pump pulse and auxiliary decay of an impulsive measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub interval: f64,
    pub pulse_duration: f64,
    pub pump_rabi: f64,
    pub aux_decay: f64,
}

impl PulseSchedule {
    pub fn new(interval: f64, pulse_duration: f64, pump_rabi: f64, aux_decay: f64) -> Result<Self> {
        Ok(Self {
            interval: require_positive("tau", interval)?,
            pulse_duration: require_positive("t_p", pulse_duration)?,
            pump_rabi: require_positive("omega_p", pump_rabi)?,
            aux_decay: require_positive("gamma_u", aux_decay)?,
        })
    }
}

/// What "much larger" and "close to π" mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityThresholds {
    pub ratio: f64,
    pub pi_tolerance: f64,
}

impl Default for FeasibilityThresholds {
    fn default() -> Self {
        Self {
            ratio: 10.0,
            pi_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub name: String,
    pub value: f64,
    pub requirement: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<ScheduleCheck>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ScheduleCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

// relative slack so that boundary cases such as t_p·γ_u = 0.1 pass
const SLACK: f64 = 1.0e-12;

pub fn validate_schedule(s: &PulseSchedule) -> ValidityReport {
    validate_schedule_with(s, &FeasibilityThresholds::default())
}

pub fn validate_schedule_with(s: &PulseSchedule, th: &FeasibilityThresholds) -> ValidityReport {
    let r = th.ratio;
    let at_least = |v: f64| v >= r * (1.0 - SLACK);
    let at_most = |v: f64| v <= (1.0 + SLACK) / r;

    let spacing = s.interval / s.pulse_duration;
    let area = s.pump_rabi * s.pulse_duration;
    let pulse_vs_decay = s.pulse_duration * s.aux_decay;
    let interval_vs_decay = s.interval * s.aux_decay;
    let checks = vec![
        ScheduleCheck {
            name: "interval_vs_pulse".into(),
            value: spacing,
            requirement: format!("tau/t_p >= {r}"),
            passed: at_least(spacing),
        },
        ScheduleCheck {
            name: "pi_pulse".into(),
            value: area,
            requirement: format!("|Omega_p t_p - pi| <= {} pi", th.pi_tolerance),
            passed: (area - PI).abs() <= th.pi_tolerance * PI * (1.0 + SLACK),
        },
        ScheduleCheck {
            name: "pulse_vs_aux_decay".into(),
            value: pulse_vs_decay,
            requirement: format!("t_p gamma_u <= {}", 1.0 / r),
            passed: at_most(pulse_vs_decay),
        },
        ScheduleCheck {
            name: "interval_vs_aux_decay".into(),
            value: interval_vs_decay,
            requirement: format!("tau gamma_u >= {r}"),
            passed: at_least(interval_vs_decay),
        },
    ];
    ValidityReport { checks }
}

/// A labelled curve of a figure reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub description: String,
    pub trace: EvolutionTrace,
}

/// Curve 1 background decay, 2 interrupted evolution (F₁), 3 and 4 the
/// uninterrupted cavity at F₁ and F₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Plan {
    pub free_space_rate: f64,
    pub finesses: [f64; 2],
    pub length_cm: f64,
    pub solid_angle: f64,
    pub detuning: f64,
    pub interval: f64,
    pub t_max: f64,
    pub atom_frequency: f64,
}

impl Fig3Plan {
    pub fn geometry(&self, finesse: f64) -> Result<CavityGeometry> {
        CavityGeometry::new(
            finesse,
            self.length_cm,
            self.solid_angle,
            self.free_space_rate,
        )
    }

    pub fn system(&self, finesse: f64) -> Result<CompositeResponse> {
        cavity_params(&self.geometry(finesse)?).system(self.atom_frequency, self.detuning)
    }

    pub fn curves(&self) -> Result<Vec<Curve>> {
        let [f1, f2] = self.finesses;
        let s1 = self.system(f1)?;
        let s2 = self.system(f2)?;
        let schedule = MeasurementSchedule::until(self.interval, self.t_max)?;
        Ok(vec![
            Curve {
                label: "1".into(),
                description: "background decay".into(),
                trace: background_trace(s1.background_rate(), self.t_max, 400)?,
            },
            Curve {
                label: "2".into(),
                description: format!("interrupted, F={f1:e}, tau={:e}", self.interval),
                trace: interrupted_evolution(&s1, self.detuning, &schedule)?,
            },
            Curve {
                label: "3".into(),
                description: format!("uninterrupted, F={f1:e}"),
                trace: free_evolution(&s1, self.detuning, self.t_max)?,
            },
            Curve {
                label: "4".into(),
                description: format!("uninterrupted, F={f2:e}"),
                trace: free_evolution(&s2, self.detuning, self.t_max)?,
            },
        ])
    }
}

/// Detuned cavity: curve 1 background, 2 uninterrupted, 3 and 4
/// interrupted at the two intervals (largest first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Plan {
    pub geometry: CavityGeometry,
    pub detuning: f64,
    pub intervals: Vec<f64>,
    pub t_max: f64,
    pub atom_frequency: f64,
}

impl Fig4Plan {
    pub fn system(&self) -> Result<CompositeResponse> {
        cavity_params(&self.geometry).system(self.atom_frequency, self.detuning)
    }

    pub fn curves(&self) -> Result<Vec<Curve>> {
        let system = self.system()?;
        let mut curves = vec![
            Curve {
                label: "1".into(),
                description: "background decay".into(),
                trace: background_trace(system.background_rate(), self.t_max, 400)?,
            },
            Curve {
                label: "2".into(),
                description: format!("uninterrupted, delta={:e}", self.detuning),
                trace: free_evolution(&system, self.detuning, self.t_max)?,
            },
        ];
        let mut intervals = self.intervals.clone();
        intervals.sort_by(|a, b| b.total_cmp(a));
        for (k, tau) in intervals.iter().enumerate() {
            let schedule = MeasurementSchedule::until(*tau, self.t_max)?;
            curves.push(Curve {
                label: (k + 3).to_string(),
                description: format!("interrupted, delta*tau={:.3} pi", self.detuning * tau / PI),
                trace: interrupted_evolution(&system, self.detuning, &schedule)?,
            });
        }
        Ok(curves)
    }
}

/// Free-space reservoir below cutoff under Lorentzian dephasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiZenoPlan {
    pub coupling: f64,
    pub cutoff: f64,
    pub atom_frequency: f64,
    pub atom_sweep: Vec<f64>,
    pub widths: Vec<f64>,
}

impl AntiZenoPlan {
    pub fn response(&self) -> Result<HydrogenicResponse> {
        HydrogenicResponse::new(self.coupling, self.cutoff)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum Preset {
    Fig3(Fig3Plan),
    Fig4(Fig4Plan),
    AntiZeno(AntiZenoPlan),
}

pub const PRESET_NAMES: [&str; 3] = ["fig3", "fig4", "antizeno"];

/// `n` points from `lo` to `hi` inclusive, evenly spaced in log.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "fig3" => Ok(Preset::Fig3(Fig3Plan {
            free_space_rate: 1.0e6,
            finesses: [1.0e5, 1.0e6],
            length_cm: 15.0,
            solid_angle: 0.02,
            detuning: 0.0,
            interval: 3.0e-8,
            t_max: 4.0e-6,
            atom_frequency: OPTICAL_FREQUENCY,
        })),
        "fig4" => Ok(Preset::Fig4(Fig4Plan {
            geometry: CavityGeometry::new(1.0e6, 15.0, 0.02, 1.0e6)?,
            detuning: 1.0e8,
            intervals: vec![3.0 * PI * 1.0e-8, 5.0 * PI * 1.0e-8],
            t_max: 4.0e-6,
            atom_frequency: OPTICAL_FREQUENCY,
        })),
        "antizeno" => Ok(Preset::AntiZeno(AntiZenoPlan {
            coupling: 1.0,
            cutoff: 1.0e19,
            atom_frequency: 1.0e15,
            atom_sweep: vec![1.0e14, 1.0e15, 1.0e16, 1.0e17, 1.0e18],
            widths: log_space(1.0e12, 1.0e17, 50),
        })),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_digits(x: f64) -> f64 {
        let e = x.abs().log10().floor() - 1.0;
        (x / 10f64.powf(e)).round() * 10f64.powf(e)
    }

    #[test]
    fn quoted_cavity_values() {
        let p = cavity_params(&CavityGeometry::new(1e5, 15.0, 0.02, 1e6).unwrap());
        assert_eq!(two_digits(p.half_width), 6.3e6);
        assert_eq!(two_digits(p.coupling), 4.5e6);
        assert_relative_eq!(p.background_rate, 0.98e6, max_relative = 1e-15);
        let p = cavity_params(&CavityGeometry::new(1e6, 15.0, 0.02, 1e6).unwrap());
        assert_relative_eq!(p.half_width, 2e6, max_relative = 1e-15);
    }

    #[test]
    fn geometry_rejects_bad_values() {
        assert!(CavityGeometry::new(1.0, 15.0, 0.02, 1e6).is_err());
        assert!(CavityGeometry::new(1e5, 0.0, 0.02, 1e6).is_err());
        assert!(CavityGeometry::new(1e5, 15.0, 1.0, 1e6).is_err());
        assert!(CavityGeometry::new(1e5, 15.0, 0.02, 0.0).is_err());
    }

    #[test]
    fn schedule_examples() {
        let ok = PulseSchedule::new(3e-8, 1e-10, PI * 1e10, 1e9).unwrap();
        assert!(validate_schedule(&ok).all_passed());

        let half = PulseSchedule::new(3e-8, 1e-10, 0.5 * PI * 1e10, 1e9).unwrap();
        let report = validate_schedule(&half);
        assert!(!report.check("pi_pulse").unwrap().passed);
        assert!(report.check("interval_vs_pulse").unwrap().passed);

        let close = PulseSchedule::new(1e-9, 1e-11, PI * 1e11, 1e9).unwrap();
        assert!(
            !validate_schedule(&close)
                .check("interval_vs_aux_decay")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn thresholds_are_configurable() {
        let s = PulseSchedule::new(3e-8, 1e-10, PI * 1e10, 1e9).unwrap();
        let strict = FeasibilityThresholds {
            ratio: 100.0,
            pi_tolerance: 0.01,
        };
        let report = validate_schedule_with(&s, &strict);
        assert!(report.check("interval_vs_pulse").unwrap().passed);
        assert!(!report.check("interval_vs_aux_decay").unwrap().passed);
    }

    #[test]
    fn presets() {
        match preset("fig3").unwrap() {
            Preset::Fig3(p) => {
                let c = cavity_params(&p.geometry(p.finesses[0]).unwrap());
                assert_eq!(two_digits(c.coupling), 4.5e6);
                assert_eq!(p.interval, 3e-8);
            }
            other => panic!("{other:?}"),
        }
        match preset("fig4").unwrap() {
            Preset::Fig4(p) => assert_eq!(p.detuning, 1e8),
            other => panic!("{other:?}"),
        }
        match preset("antizeno").unwrap() {
            Preset::AntiZeno(p) => {
                assert_eq!(p.cutoff, 1e19);
                assert_eq!(p.widths.len(), 50);
                assert_eq!(p.widths[0], 1e12);
                assert_eq!(p.widths[49], 1e17);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(preset("fig5"), Err(Error::UnknownPreset(_))));
        assert_eq!(preset("fig4").unwrap(), preset("fig4").unwrap());
    }

    #[test]
    fn fig3_has_four_curves() {
        let Preset::Fig3(p) = preset("fig3").unwrap() else {
            unreachable!()
        };
        let curves = p.curves().unwrap();
        let labels: Vec<&str> = curves.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["1", "2", "3", "4"]);
        assert!(curves.iter().all(|c| c.trace.population()[0] == 1.0));
    }
}
