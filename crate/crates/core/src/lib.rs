//! Spontaneous decay of a two-level emitter under repeated or continuous
//! measurement.
//!
//! A reservoir is described by its spectral response G(ω); measurements
//! enter as a normalized dephasing window F(δ). The decay rate follows from
//! their overlap, κ = 2π∫G(ω)F(ω−ω_a)dω, or equivalently from the memory
//! kernel Φ(t) in the time domain. When F is broader than G the rate drops
//! with measurement frequency (Zeno inhibition); when G rises across F it
//! grows (anti-Zeno acceleration).

pub mod decay;
pub mod error;
pub mod evolution;
pub mod filters;
pub mod quadrature;
pub mod reservoirs;
pub mod scenarios;

pub use decay::{
    composite_rate, hydrogenic_lorentzian_rate, impulsive_rate_time_domain,
    lorentzian_short_time_amplitude, sinc_vs_kernel_crosscheck, universal_rate, ComplexRatio,
    Crosscheck, RateMethod, RateResult, ShortTimeAmplitude,
};
pub use error::{Error, Result};
pub use evolution::{
    background_trace, detuned_enhancement, fit_decay, format_sci, free_evolution,
    interrupted_evolution, lorentzian_exact_amplitude, volterra_solve, DecayFit, EnhancementRow,
    EvolutionTrace, MeasurementSchedule, ScheduleExtent, TimeGrid,
};
pub use filters::{
    eval_filter, width_from_cw, width_from_noise, DephasingFilter, LorentzianFilter,
    SincSquaredFilter,
};
pub use reservoirs::{
    correlation_function, eval_response, CompositeResponse, HydrogenicResponse, LorentzianMode,
    MemoryKernel, SpectralResponse, TabulatedResponse,
};
pub use scenarios::{
    cavity_params, log_space, preset, validate_schedule, validate_schedule_with, AntiZenoPlan,
    CavityGeometry, CavityParams, Curve, FeasibilityThresholds, Fig3Plan, Fig4Plan, Preset,
    PulseSchedule, ScheduleCheck, ValidityReport, PRESET_NAMES,
};
