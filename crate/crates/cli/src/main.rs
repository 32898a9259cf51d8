//! `zeno`: decay rates, population traces and parameter sweeps for an
//! emitter under repeated or continuous measurement.

mod commands;
mod config;
mod error;
mod model;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{preset_defaults, validate_defaults, Config, Mode};
use error::CliError;
use output::OutputArgs;

/// Environment variable holding the default sweep worker count.
const WORKERS_ENV: &str = "ZENO_WORKERS";

macro_rules! param_args {
    ($($field:ident => $help:literal,)*) => {
        /// Parameter overrides; each wins over the config file.
        #[derive(Debug, Clone, Default, Args)]
        pub struct ParamArgs {
            $(
                #[arg(long, value_name = "VALUE", allow_hyphen_values = true, help = $help)]
                pub $field: Option<String>,
            )*
        }

        impl ParamArgs {
            fn pairs(&self) -> Vec<(&'static str, Option<&str>)> {
                vec![$((stringify!($field), self.$field.as_deref()),)*]
            }
        }
    };
}

param_args! {
    preset => "Bind the parameters of a named preset (fig3, fig4, antizeno)",
    reservoir => "lorentzian | cavity | hydrogenic | tabulated",
    coupling => "g_s (rad/s) or the hydrogenic coupling alpha",
    half_width => "Gamma_s (1/s)",
    center => "omega_s (rad/s)",
    cutoff => "omega_c (rad/s)",
    table => "Two-column omega,G file for a tabulated reservoir",
    background => "gamma_b (1/s)",
    finesse => "Cavity mirror factor (1-R)^-2",
    finesse_alt => "Second cavity mirror factor (comparison curve)",
    length => "Cavity length (cm)",
    solid_angle => "Fraction of 4 pi covered by the cavity mode",
    gamma_f => "Free-space decay rate (1/s)",
    omega_a => "Atomic frequency (rad/s)",
    detuning => "omega_a - omega_s (rad/s)",
    filter => "sinc | lorentzian | noise | cw",
    tau => "Interval between measurements (s)",
    tau_alt => "Second interval (s)",
    nu => "Lorentzian dephasing half width (rad/s)",
    noise_ms => "Mean-square Stark shift (rad^2/s^2)",
    tau_c => "Noise correlation time (s)",
    rabi => "CW Rabi frequency on the auxiliary transition (rad/s)",
    gamma_u => "Auxiliary level decay rate (1/s)",
    method => "auto | quadrature | closed | time",
    t_max => "Trace length (s)",
    count => "Number of interruptions",
    pulse_duration => "Pump pulse duration (s)",
    pump_rabi => "Pump Rabi frequency (rad/s)",
    ratio => "Factor read as much larger / much smaller",
    pi_tolerance => "Allowed relative deviation of the pulse area from pi",
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Flat key = value configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the effective configuration here
    #[arg(long, value_name = "PATH")]
    save_config: Option<PathBuf>,
    /// Sweep worker threads (default: $ZENO_WORKERS, else all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Parser)]
#[command(
    name = "zeno",
    version,
    about = "Spontaneous decay under repeated or continuous measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay rate for one reservoir, filter and atomic frequency
    Rate(RunArgs),
    /// Population traces, uninterrupted and interrupted
    Evolve(RunArgs),
    /// Decay rate over sweep axes given as lo:hi:lin|log:count
    Sweep(RunArgs),
    /// Run a named figure reproduction (fig3, fig4, antizeno)
    Preset {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a pump-pulse schedule against the feasibility inequalities
    Validate(RunArgs),
}

fn effective_config(mode: Mode, run: &RunArgs, preset: Option<&str>) -> Result<Config, CliError> {
    let mut config = match &run.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for (key, value) in run.params.pairs() {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    if let Some(name) = preset {
        config.set("preset", name)?;
    }
    if let Some(name) = config.get("preset").map(str::to_string) {
        config.fill(&preset_defaults(&name, mode)?);
    }
    if mode == Mode::Validate {
        config.fill(&validate_defaults());
    }
    Ok(config)
}

fn workers(run: &RunArgs) -> Result<usize, CliError> {
    if let Some(n) = run.workers {
        return Ok(n);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV}: '{v}' is not a worker count"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (mode, run, preset) = match &cli.command {
        Command::Rate(r) => (Mode::Rate, r, None),
        Command::Evolve(r) => (Mode::Evolve, r, None),
        Command::Sweep(r) => (Mode::Sweep, r, None),
        Command::Validate(r) => (Mode::Validate, r, None),
        Command::Preset { name, run } => {
            let mode = if name == "antizeno" {
                Mode::Sweep
            } else {
                Mode::Evolve
            };
            (mode, run, Some(name.as_str()))
        }
    };
    let config = effective_config(mode, run, preset)?;
    if let Some(path) = &run.save_config {
        std::fs::write(path, config.render())?;
    }
    let name = preset.unwrap_or(match mode {
        Mode::Rate => "rate",
        Mode::Evolve => "evolve",
        Mode::Sweep => "sweep",
        Mode::Validate => "validate",
    });
    let artifacts = match mode {
        Mode::Rate => commands::rate(&config)?,
        Mode::Evolve => commands::evolve(&config, name)?,
        Mode::Sweep => commands::sweep(&config, name, workers(run)?)?,
        Mode::Validate => commands::validate(&config)?,
    };
    output::emit(artifacts, &config, &run.output)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zeno: {e}");
            e.exit_code()
        }
    }
}
