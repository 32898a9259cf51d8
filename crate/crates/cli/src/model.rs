//! Builds core objects from a resolved configuration.

use serde::Serialize;
use zeno_core::{
    cavity_params, composite_rate, hydrogenic_lorentzian_rate, impulsive_rate_time_domain,
    CavityGeometry, CavityParams, CompositeResponse, DephasingFilter, HydrogenicResponse,
    LorentzianFilter, LorentzianMode, MemoryKernel, RateMethod, SincSquaredFilter,
    SpectralResponse, TabulatedResponse,
};

use crate::config::Config;
use crate::error::CliError;

pub const DEFAULT_CENTER: f64 = zeno_core::scenarios::OPTICAL_FREQUENCY;
pub const DEFAULT_CUTOFF: f64 = 1.0e19;
pub const DEFAULT_HYDROGENIC_COUPLING: f64 = 1.0;

/// Reservoir plus the atom's place in it.
pub struct Setup {
    pub system: CompositeResponse,
    pub omega_a: f64,
    /// ω_a minus the kernel reference frequency.
    pub detuning: f64,
    pub cavity: Option<CavityParams>,
}

pub fn cavity_geometry(config: &Config, finesse_key: &str) -> Result<CavityGeometry, CliError> {
    let why = "cavity reservoir";
    Ok(CavityGeometry::new(
        config.require(finesse_key, why)?,
        config.require("length", why)?,
        config.require("solid_angle", why)?,
        config.require("gamma_f", why)?,
    )?)
}

pub fn setup(config: &Config) -> Result<Setup, CliError> {
    setup_with(config, "finesse")
}

/// As [`setup`], reading the cavity finesse from `finesse_key`.
pub fn setup_with(config: &Config, finesse_key: &str) -> Result<Setup, CliError> {
    let kind = config
        .get("reservoir")
        .ok_or_else(|| CliError::Config("missing 'reservoir'".into()))?;
    let background = config.number("background")?;
    let mut cavity = None;
    let sharp: SpectralResponse = match kind {
        "lorentzian" | "cavity" => {
            let (g, gamma, bg) = if kind == "cavity" {
                if background.is_some() || config.has("coupling") || config.has("half_width") {
                    return Err(CliError::Config(
                        "a cavity reservoir derives coupling, half_width and background from its geometry".into(),
                    ));
                }
                let p = cavity_params(&cavity_geometry(config, finesse_key)?);
                cavity = Some(p);
                (p.coupling, p.half_width, p.background_rate)
            } else {
                let why = "lorentzian reservoir";
                (
                    config.require("coupling", why)?,
                    config.require("half_width", why)?,
                    background.unwrap_or(0.0),
                )
            };
            let center = config.number("center")?.unwrap_or(DEFAULT_CENTER);
            let mode = LorentzianMode::new(g, gamma, center)?;
            let system = CompositeResponse::new(mode, bg)?;
            let (omega_a, detuning) = atom_position(config, center, center)?;
            return Ok(Setup {
                system,
                omega_a,
                detuning,
                cavity,
            });
        }
        "hydrogenic" => HydrogenicResponse::new(
            config
                .number("coupling")?
                .unwrap_or(DEFAULT_HYDROGENIC_COUPLING),
            config.number("cutoff")?.unwrap_or(DEFAULT_CUTOFF),
        )?
        .into(),
        "tabulated" => {
            let path = config
                .get("table")
                .ok_or_else(|| CliError::Config("missing 'table' (tabulated reservoir)".into()))?;
            TabulatedResponse::from_path(path)?.into()
        }
        other => return Err(CliError::Config(format!("unknown reservoir '{other}'"))),
    };
    let reference = sharp.reference_frequency();
    // an optical atom sits far below the hydrogenic cutoff
    let home = match sharp {
        SpectralResponse::Hydrogenic(_) => DEFAULT_CENTER,
        _ => reference,
    };
    let system = CompositeResponse::new(sharp, background.unwrap_or(0.0))?;
    let (omega_a, detuning) = atom_position(config, reference, home)?;
    Ok(Setup {
        system,
        omega_a,
        detuning,
        cavity,
    })
}

/// `home` is used when neither `omega_a` nor `detuning` is given.
fn atom_position(config: &Config, reference: f64, home: f64) -> Result<(f64, f64), CliError> {
    match (config.number("omega_a")?, config.number("detuning")?) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "give either 'omega_a' or 'detuning', not both".into(),
        )),
        (Some(w), None) => Ok((w, w - reference)),
        (None, Some(d)) => Ok((reference + d, d)),
        (None, None) => Ok((home, home - reference)),
    }
}

/// The dephasing filter named by `filter`, or inferred from `tau` / `nu`.
pub fn filter(config: &Config) -> Result<DephasingFilter, CliError> {
    let kind = match config.get("filter") {
        Some(k) => k,
        None if config.has("tau") => "sinc",
        None if config.has("nu") => "lorentzian",
        None => {
            return Err(CliError::Config(
                "missing 'filter' (or 'tau' / 'nu')".into(),
            ))
        }
    };
    Ok(match kind {
        "sinc" => SincSquaredFilter::new(config.require("tau", "sinc filter")?)?.into(),
        "lorentzian" => LorentzianFilter::new(config.require("nu", "lorentzian filter")?)?.into(),
        "noise" => LorentzianFilter::from_noise(
            config.require("noise_ms", "noise filter")?,
            config.require("tau_c", "noise filter")?,
        )?
        .into(),
        "cw" => LorentzianFilter::from_cw(
            config.require("rabi", "cw filter")?,
            config.require("gamma_u", "cw filter")?,
        )?
        .into(),
        other => return Err(CliError::Config(format!("unknown filter '{other}'"))),
    })
}

/// One computed rate.
#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub kappa_total: f64,
    pub kappa_sharp: f64,
    pub background: f64,
    /// Absent when the method gives none.
    pub error_estimate: Option<f64>,
    pub method: &'static str,
    pub filter_width: f64,
    pub warnings: Vec<String>,
}

fn method_name(m: RateMethod) -> &'static str {
    match m {
        RateMethod::Quadrature => "quadrature",
        RateMethod::TimeDomain => "time",
        RateMethod::ClosedForm => "closed",
    }
}

pub fn rate(config: &Config) -> Result<RateRow, CliError> {
    let s = setup(config)?;
    let f = filter(config)?;
    let method = config.get("method").unwrap_or("auto");
    let hydrogenic = match s.system.sharp() {
        SpectralResponse::Hydrogenic(h) => Some(*h),
        _ => None,
    };
    let result = match (method, &f, hydrogenic) {
        ("auto" | "closed", DephasingFilter::Lorentzian(l), Some(h)) => {
            hydrogenic_lorentzian_rate(&h, s.omega_a, l.width())?
                .with_background(s.system.background_rate())
        }
        ("closed", _, _) => {
            return Err(CliError::Config(
                "method 'closed' needs a hydrogenic reservoir with a Lorentzian filter".into(),
            ))
        }
        ("time", DephasingFilter::Sinc(sf), _) => {
            let kernel = MemoryKernel::from_response(s.system.sharp());
            let k = impulsive_rate_time_domain(&kernel, s.detuning, sf.interval())?;
            zeno_core::RateResult::new(
                k,
                s.system.background_rate(),
                RateMethod::TimeDomain,
                f64::NAN,
            )
        }
        ("time", _, _) => {
            return Err(CliError::Config(
                "method 'time' needs the sinc filter".into(),
            ))
        }
        _ => composite_rate(&s.system, &f, s.omega_a)?,
    };
    Ok(RateRow {
        kappa_total: result.total(),
        kappa_sharp: result.sharp(),
        background: result.background(),
        error_estimate: Some(result.error_estimate()).filter(|e| e.is_finite()),
        method: method_name(result.method()),
        filter_width: f.width(),
        warnings: result.warnings().to_vec(),
    })
}
