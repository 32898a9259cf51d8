//! Flat `key = value` run configuration, sweep axes and preset defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use zeno_core::{log_space, Preset, PRESET_NAMES};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    Text(&'static [&'static str]),
    Path,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub unit: &'static str,
}

const fn num(key: &'static str, unit: &'static str) -> Param {
    Param {
        key,
        kind: Kind::Number,
        unit,
    }
}

pub const RESERVOIRS: &[&str] = &["lorentzian", "cavity", "hydrogenic", "tabulated"];
pub const FILTERS: &[&str] = &["sinc", "lorentzian", "noise", "cw"];
pub const METHODS: &[&str] = &["auto", "quadrature", "closed", "time"];

/// Every key a configuration may carry.
pub const PARAMS: &[Param] = &[
    Param {
        key: "preset",
        kind: Kind::Text(&PRESET_NAMES),
        unit: "",
    },
    Param {
        key: "reservoir",
        kind: Kind::Text(RESERVOIRS),
        unit: "",
    },
    num("coupling", "rad/s"),
    num("half_width", "1/s"),
    num("center", "rad/s"),
    num("cutoff", "rad/s"),
    Param {
        key: "table",
        kind: Kind::Path,
        unit: "",
    },
    num("background", "1/s"),
    num("finesse", "1"),
    num("finesse_alt", "1"),
    num("length", "cm"),
    num("solid_angle", "1"),
    num("gamma_f", "1/s"),
    num("omega_a", "rad/s"),
    num("detuning", "rad/s"),
    Param {
        key: "filter",
        kind: Kind::Text(FILTERS),
        unit: "",
    },
    num("tau", "s"),
    num("tau_alt", "s"),
    num("nu", "rad/s"),
    num("noise_ms", "rad^2/s^2"),
    num("tau_c", "s"),
    num("rabi", "rad/s"),
    num("gamma_u", "1/s"),
    Param {
        key: "method",
        kind: Kind::Text(METHODS),
        unit: "",
    },
    num("t_max", "s"),
    num("count", "1"),
    num("pulse_duration", "s"),
    num("pump_rabi", "rad/s"),
    num("ratio", "1"),
    num("pi_tolerance", "1"),
];

pub fn param(key: &str) -> Option<&'static Param> {
    PARAMS.iter().find(|p| p.key == key)
}

/// Column header `key (unit)`; the coupling of a hydrogenic reservoir is
/// dimensionless.
pub fn header(key: &str, config: &Config) -> String {
    let unit = match (key, config.get("reservoir")) {
        ("coupling", Some("hydrogenic")) => "1",
        _ => param(key).map_or("", |p| p.unit),
    };
    if unit.is_empty() {
        key.to_string()
    } else {
        format!("{key} ({unit})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `lo:hi:lin|log:count`
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    pub count: usize,
}

impl Axis {
    pub fn parse(key: &str, text: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("{key}: bad sweep axis '{text}': {why}"));
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [lo, hi, spacing, count] = parts[..] else {
            return Err(bad("expected lo:hi:lin|log:count"));
        };
        let lo: f64 = lo.parse().map_err(|_| bad("lo is not a number"))?;
        let hi: f64 = hi.parse().map_err(|_| bad("hi is not a number"))?;
        let spacing = match spacing {
            "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            _ => return Err(bad("spacing must be lin or log")),
        };
        let count: usize = count
            .parse()
            .map_err(|_| bad("count is not a positive integer"))?;
        if count < 2 {
            return Err(bad("a sweep needs at least 2 points"));
        }
        if !lo.is_finite() || !hi.is_finite() || lo == hi {
            return Err(bad("need finite, distinct end points"));
        }
        if spacing == Spacing::Log && (lo <= 0.0 || hi <= 0.0) {
            return Err(bad("log spacing needs positive end points"));
        }
        Ok(Self {
            key: key.to_string(),
            lo,
            hi,
            spacing,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_space(self.lo, self.hi, self.count),
            Spacing::Linear => (0..self.count)
                .map(|k| {
                    if k == self.count - 1 {
                        self.hi
                    } else {
                        self.lo + (self.hi - self.lo) * k as f64 / (self.count - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

fn is_axis(value: &str) -> bool {
    value.contains(':')
}

/// Effective configuration: sorted keys, string values as written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected key = value",
                    n + 1
                )));
            };
            let key = key.trim();
            if config.values.contains_key(key) {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key '{key}'",
                    n + 1
                )));
            }
            config
                .set(key, value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let p = param(key).ok_or_else(|| CliError::Config(format!("unknown key '{key}'")))?;
        if value.is_empty() {
            return Err(CliError::Config(format!("{key}: empty value")));
        }
        match p.kind {
            Kind::Number => {
                if is_axis(value) {
                    Axis::parse(key, value)?;
                } else {
                    parse_number(key, value)?;
                }
            }
            Kind::Text(choices) => {
                if !choices.contains(&value) {
                    return Err(CliError::Config(format!(
                        "{key}: '{value}' is not one of {}",
                        choices.join(", ")
                    )));
                }
            }
            Kind::Path => {}
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Adds `defaults` for keys not already present.
    pub fn fill(&mut self, defaults: &Config) {
        for (k, v) in &defaults.values {
            self.values.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) if is_axis(v) => Err(CliError::Config(format!(
                "{key}: sweep axis '{v}' is only allowed with the sweep command"
            ))),
            Some(v) => parse_number(key, v).map(Some),
        }
    }

    pub fn require(&self, key: &str, why: &str) -> Result<f64, CliError> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing '{key}' ({why})")))
    }

    pub fn axes(&self) -> Result<Vec<Axis>, CliError> {
        self.values
            .iter()
            .filter(|(_, v)| is_axis(v))
            .map(|(k, v)| Axis::parse(k, v))
            .collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// One `key = value` per line, sorted.
    pub fn render(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64, CliError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Config(format!(
            "{key}: '{value}' is not a finite number"
        ))),
    }
}

/// Shortest round-trip text for a number.
pub fn number_text(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Rate,
    Evolve,
    Sweep,
    Validate,
}

/// Keys bound by a named preset. Sweep mode also receives the preset's
/// sweep axes.
pub fn preset_defaults(name: &str, mode: Mode) -> Result<Config, CliError> {
    let plan = zeno_core::preset(name).map_err(|e| CliError::Config(e.to_string()))?;
    let mut c = Config::default();
    let mut put = |k: &str, v: String| c.values.insert(k.to_string(), v);
    match plan {
        Preset::Fig3(p) => {
            put("reservoir", "cavity".into());
            put("finesse", number_text(p.finesses[0]));
            put("finesse_alt", number_text(p.finesses[1]));
            put("length", number_text(p.length_cm));
            put("solid_angle", number_text(p.solid_angle));
            put("gamma_f", number_text(p.free_space_rate));
            put("center", number_text(p.atom_frequency - p.detuning));
            put("detuning", number_text(p.detuning));
            put("filter", "sinc".into());
            put("tau", number_text(p.interval));
            put("t_max", number_text(p.t_max));
        }
        Preset::Fig4(p) => {
            let g = p.geometry;
            put("reservoir", "cavity".into());
            put("finesse", number_text(g.finesse()));
            put("length", number_text(g.length_cm()));
            put("solid_angle", number_text(g.solid_angle()));
            put("gamma_f", number_text(g.free_space_rate()));
            put("center", number_text(p.atom_frequency - p.detuning));
            put("detuning", number_text(p.detuning));
            put("filter", "sinc".into());
            put("tau", number_text(p.intervals[0]));
            put("tau_alt", number_text(p.intervals[1]));
            put("t_max", number_text(p.t_max));
        }
        Preset::AntiZeno(p) => {
            put("reservoir", "hydrogenic".into());
            put("coupling", number_text(p.coupling));
            put("cutoff", number_text(p.cutoff));
            put("omega_a", number_text(p.atom_frequency));
            put("filter", "lorentzian".into());
            if mode == Mode::Sweep {
                let (lo, hi) = (p.widths[0], p.widths[p.widths.len() - 1]);
                put(
                    "nu",
                    format!(
                        "{}:{}:log:{}",
                        number_text(lo),
                        number_text(hi),
                        p.widths.len()
                    ),
                );
            }
        }
    }
    Ok(c)
}

/// Feasibility thresholds used by `validate` unless overridden.
pub fn validate_defaults() -> Config {
    let mut c = Config::default();
    c.values.insert("ratio".into(), "10".into());
    c.values.insert("pi_tolerance".into(), "0.05".into());
    c
}
