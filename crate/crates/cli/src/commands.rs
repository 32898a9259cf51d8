use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};
use zeno_core::{
    background_trace, detuned_enhancement, format_sci, free_evolution, interrupted_evolution,
    validate_schedule_with, Curve, EvolutionTrace, FeasibilityThresholds, Fig3Plan,
    MeasurementSchedule, PulseSchedule,
};

use crate::config::{header, number_text, Axis, Config, Spacing};
use crate::error::CliError;
use crate::model::{self, RateRow, DEFAULT_CENTER};
use crate::output::{Artifacts, Table};
use crate::plot::{self, PlotSpec, Series};

fn opt_sci(x: Option<f64>) -> String {
    x.map(format_sci).unwrap_or_default()
}

const RATE_COLUMNS: [&str; 7] = [
    "kappa_total (1/s)",
    "kappa_sharp (1/s)",
    "gamma_b (1/s)",
    "error_estimate (1/s)",
    "method",
    "filter_width (rad/s)",
    "warnings",
];

fn rate_cells(r: &RateRow) -> Vec<String> {
    vec![
        format_sci(r.kappa_total),
        format_sci(r.kappa_sharp),
        format_sci(r.background),
        opt_sci(r.error_estimate),
        r.method.to_string(),
        format_sci(r.filter_width),
        r.warnings.join("; "),
    ]
}

pub fn rate(config: &Config) -> Result<Artifacts, CliError> {
    let setup = model::setup(config)?;
    let row = model::rate(config)?;
    let mut table = Table::new(
        ["omega_a (rad/s)", "detuning (rad/s)"]
            .iter()
            .chain(RATE_COLUMNS.iter())
            .map(|s| s.to_string())
            .collect(),
    );
    let mut cells = vec![format_sci(setup.omega_a), format_sci(setup.detuning)];
    cells.extend(rate_cells(&row));
    table.push(cells);
    Ok(Artifacts {
        name: "rate".into(),
        command: "rate",
        table: Some(table),
        results: json!({
            "omega_a": setup.omega_a,
            "detuning": setup.detuning,
            "cavity": setup.cavity,
            "rate": row,
        }),
        warnings: row.warnings.clone(),
        error_estimates: json!({ "kappa": row.error_estimate }),
        plot: None,
    })
}

/// Cartesian product of the axes, first axis slowest.
fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        let values = axis.values();
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    points
}

pub fn sweep(config: &Config, name: &str, workers: usize) -> Result<Artifacts, CliError> {
    let axes = config.axes()?;
    if axes.is_empty() {
        return Err(CliError::Config(
            "sweep needs at least one axis, e.g. --nu 1e12:1e17:log:50".into(),
        ));
    }
    let points = grid(&axes);
    let configs = points
        .iter()
        .map(|p| {
            let mut c = config.clone();
            for (axis, v) in axes.iter().zip(p) {
                c.set(&axis.key, &number_text(*v))?;
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    let rows: Vec<Result<RateRow, CliError>> =
        pool.install(|| configs.par_iter().map(model::rate).collect());
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(
        axes.iter()
            .map(|a| header(&a.key, config))
            .chain(RATE_COLUMNS.iter().map(|s| s.to_string()))
            .collect(),
    );
    let mut warnings = BTreeSet::new();
    let mut json_rows = Vec::with_capacity(rows.len());
    for (p, r) in points.iter().zip(&rows) {
        let mut cells: Vec<String> = p.iter().map(|v| format_sci(*v)).collect();
        cells.extend(rate_cells(r));
        table.push(cells);
        warnings.extend(r.warnings.iter().cloned());
        let params: serde_json::Map<String, Value> = axes
            .iter()
            .zip(p)
            .map(|(a, v)| (a.key.clone(), json!(v)))
            .collect();
        json_rows.push(json!({ "params": params, "rate": r }));
    }
    let max_error = rows
        .iter()
        .filter_map(|r| r.error_estimate)
        .fold(0.0, f64::max);

    let plot = sweep_plot(&axes, &points, &rows);
    Ok(Artifacts {
        name: name.into(),
        command: "sweep",
        table: Some(table),
        results: json!({
            "axes": axes.iter().map(|a| json!({
                "key": a.key,
                "lo": a.lo,
                "hi": a.hi,
                "spacing": if a.spacing == Spacing::Log { "log" } else { "lin" },
                "count": a.count,
            })).collect::<Vec<_>>(),
            "rows": json_rows,
        }),
        warnings: warnings.into_iter().collect(),
        error_estimates: json!({ "max_kappa_error": max_error }),
        plot: Some(plot),
    })
}

fn sweep_plot(axes: &[Axis], points: &[Vec<f64>], rows: &[RateRow]) -> Result<String, CliError> {
    let mut series: Vec<Series> = Vec::new();
    for (p, r) in points.iter().zip(rows) {
        let label = if axes.len() == 1 {
            "kappa".to_string()
        } else {
            axes[1..]
                .iter()
                .zip(&p[1..])
                .map(|(a, v)| format!("{}={}", a.key, number_text(*v)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((p[0], r.kappa_total)),
            None => series.push(Series {
                label,
                points: vec![(p[0], r.kappa_total)],
            }),
        }
    }
    let positive = rows.iter().all(|r| r.kappa_total > 0.0);
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.kappa_total), hi.max(r.kappa_total))
    });
    let spec = PlotSpec {
        title: format!("decay rate vs {}", axes[0].key),
        x_label: header(&axes[0].key, &Config::default()),
        y_label: "kappa (1/s)".into(),
        x_log: axes[0].spacing == Spacing::Log,
        y_log: positive && hi / lo > 100.0,
    };
    plot::render(&spec, &series)
}

fn trace_curve(label: &str, description: String, trace: EvolutionTrace) -> Curve {
    Curve {
        label: label.into(),
        description,
        trace,
    }
}

pub fn evolve(config: &Config, name: &str) -> Result<Artifacts, CliError> {
    let mut enhancement = Value::Null;
    let curves = if config.get("preset") == Some("fig3")
        && config.get("reservoir") == Some("cavity")
    {
        let detuning = config.number("detuning")?.unwrap_or(0.0);
        let plan = Fig3Plan {
            free_space_rate: config.require("gamma_f", "cavity")?,
            finesses: [
                config.require("finesse", "cavity")?,
                config.require("finesse_alt", "second cavity curve")?,
            ],
            length_cm: config.require("length", "cavity")?,
            solid_angle: config.require("solid_angle", "cavity")?,
            detuning,
            interval: config.require("tau", "interrupted curve")?,
            t_max: config.require("t_max", "trace length")?,
            atom_frequency: config.number("center")?.unwrap_or(DEFAULT_CENTER) + detuning,
        };
        plan.curves()?
    } else {
        let setup = model::setup(config)?;
        let tau = config.number("tau")?;
        let count = config.number("count")?;
        let t_max = match (config.number("t_max")?, count, tau) {
            (Some(t), _, _) => t,
            (None, Some(n), Some(tau)) => n * tau,
            _ => {
                return Err(CliError::Config(
                    "missing 't_max' (or 'count' with 'tau')".into(),
                ))
            }
        };
        let schedule = |tau: f64| -> Result<MeasurementSchedule, CliError> {
            Ok(match count {
                Some(n) if n >= 1.0 && n.fract() == 0.0 => {
                    MeasurementSchedule::with_count(tau, n as usize)?
                }
                Some(n) => {
                    return Err(CliError::Config(format!(
                        "count: {n} is not a positive integer"
                    )))
                }
                None => MeasurementSchedule::until(tau, t_max)?,
            })
        };
        let (sys, det) = (&setup.system, setup.detuning);
        let mut curves = vec![
            trace_curve(
                "1",
                "background decay".into(),
                background_trace(sys.background_rate(), t_max, 400)?,
            ),
            trace_curve(
                "2",
                format!("uninterrupted, detuning={}", number_text(det)),
                free_evolution(sys, det, t_max)?,
            ),
        ];
        let mut intervals: Vec<f64> = [tau, config.number("tau_alt")?]
            .into_iter()
            .flatten()
            .collect();
        intervals.sort_by(|a, b| b.total_cmp(a));
        for (k, t) in intervals.iter().enumerate() {
            curves.push(trace_curve(
                &(k + 3).to_string(),
                format!("interrupted, tau={}", number_text(*t)),
                interrupted_evolution(sys, det, &schedule(*t)?)?,
            ));
        }
        if !intervals.is_empty() && count.is_none() && t_max >= intervals[0] {
            enhancement = serde_json::to_value(detuned_enhancement(sys, det, &intervals, t_max)?)
                .map_err(|e| CliError::Io(e.into()))?;
        }
        curves
    };

    let mut table = Table::new(
        ["curve", "t (s)", "W", "re_alpha", "im_alpha", "interrupted"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let mut summaries = Vec::new();
    for c in &curves {
        let tr = &c.trace;
        let amp = tr.amplitude();
        for i in 0..tr.len() {
            table.push(vec![
                c.label.clone(),
                format_sci(tr.times()[i]),
                format_sci(tr.population()[i]),
                amp.map(|a| format_sci(a[i].re)).unwrap_or_default(),
                amp.map(|a| format_sci(a[i].im)).unwrap_or_default(),
                u8::from(tr.interrupted()[i]).to_string(),
            ]);
        }
        let end = tr.times()[tr.len() - 1];
        let late = tr.fit(0.5 * end, end);
        summaries.push(json!({
            "label": c.label,
            "description": c.description,
            "samples": tr.len(),
            "interruptions": tr.interruptions().len(),
            "final_population": tr.population()[tr.len() - 1],
            "late_time_rate": late.map(|f| f.rate),
        }));
    }
    let series: Vec<Series> = curves
        .iter()
        .map(|c| Series {
            label: c.label.clone(),
            points: c
                .trace
                .times()
                .iter()
                .copied()
                .zip(c.trace.population().iter().copied())
                .collect(),
        })
        .collect();
    let spec = PlotSpec {
        title: "excited-state population".into(),
        x_label: "t (s)".into(),
        y_label: "W".into(),
        x_log: false,
        y_log: false,
    };
    Ok(Artifacts {
        name: name.into(),
        command: "evolve",
        table: Some(table),
        results: json!({ "curves": summaries, "enhancement": enhancement }),
        warnings: Vec::new(),
        error_estimates: json!({ "solver": "exact Lorentzian amplitude or second-order memory-kernel grid" }),
        plot: Some(plot::render(&spec, &series)),
    })
}

pub fn validate(config: &Config) -> Result<Artifacts, CliError> {
    let why = "pulse schedule";
    let schedule = PulseSchedule::new(
        config.require("tau", why)?,
        config.require("pulse_duration", why)?,
        config.require("pump_rabi", why)?,
        config.require("gamma_u", why)?,
    )?;
    let thresholds = FeasibilityThresholds {
        ratio: config.require("ratio", why)?,
        pi_tolerance: config.require("pi_tolerance", why)?,
    };
    let report = validate_schedule_with(&schedule, &thresholds);
    let mut table = Table::new(
        ["check", "value", "requirement", "passed"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let mut warnings = Vec::new();
    for c in &report.checks {
        table.push(vec![
            c.name.clone(),
            format_sci(c.value),
            c.requirement.clone(),
            c.passed.to_string(),
        ]);
        if !c.passed {
            warnings.push(format!(
                "{} fails: {} (value {})",
                c.name,
                c.requirement,
                number_text(c.value)
            ));
        }
    }
    Ok(Artifacts {
        name: "validate".into(),
        command: "validate",
        table: Some(table),
        results: json!({ "all_passed": report.all_passed(), "checks": report.checks }),
        warnings,
        error_estimates: Value::Null,
        plot: None,
    })
}
