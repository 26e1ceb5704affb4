//! Command-line entry point: five workflows (simulate, fit, sobol,
//! scenario, vulnerability) behind one binary, all driven by a single
//! JSON config. Progress and warnings go to stderr; everything durable
//! goes through [`OutputDir`] into the chosen output directory.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;

use crate::calibrate::{FitProblem, Observation, ObservationSet};
use crate::io::{load_forcing, load_observations, sha256_hex, OutputDir, RunConfig};
use crate::scenario::{sweep, vulnerability_grid, vulnerability_index, VulnerabilityIndex};
use crate::sensitivity::time_dependent_sobol;
use crate::simulate::{seasonal_metrics, simulate, SeasonalMetrics};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "lakebloom",
    version,
    about = "Seasonal cyanobacteria, toxin, and oxygen dynamics for stratified lakes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one forward simulation; writes trajectory.csv and metrics.json.
    Simulate(CommonArgs),
    /// Calibrate parameters against observations with differential
    /// evolution; writes fit.json and fitted_params.json.
    Fit(CommonArgs),
    /// Time-dependent Sobol sensitivity of cyanobacterial biomass; writes
    /// sobol.csv and sobol.json.
    Sobol(CommonArgs),
    /// Run the configured scenario list; writes scenarios.csv and
    /// scenarios.json.
    Scenario(CommonArgs),
    /// Vulnerability-index grid over exchange rate, depth offset, and
    /// warming; writes grid.csv and grid.json.
    Vulnerability(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory, created if missing. All files land here.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// RNG seed; overrides the config (precedence: flag, config, 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads. Default: LAKEBLOOM_WORKERS, else all cores.
    /// Never affects numerical results, only wall time.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print progress to stderr.
    #[arg(short, long, action = ArgAction::Count)]
    pub verbose: u8,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Sobol(_) => "sobol",
            Command::Scenario(_) => "scenario",
            Command::Vulnerability(_) => "vulnerability",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::Fit(a)
            | Command::Sobol(a)
            | Command::Scenario(a)
            | Command::Vulnerability(a) => a,
        }
    }
}

/// Parse arguments and run; returns the process exit code (0 success,
/// 1 validation error, 2 runtime/model error).
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(command: &Command) -> Result<()> {
    let args = command.args();
    let started = Instant::now();

    let config_bytes = fs::read(&args.config)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    let config_hash = sha256_hex(&config_bytes);
    let config = RunConfig::from_path(&args.config)?;
    configure_workers(args.workers)?;

    let mut out = OutputDir::create(&args.out)?;
    let seed = match dispatch(command, &config, args, &mut out) {
        Ok(seed) => seed,
        Err(e) => {
            out.cleanup();
            return Err(e);
        }
    };
    out.write_manifest()?;

    // Written after the manifest and never listed in it: the timing field
    // changes between otherwise identical runs.
    let metadata = serde_json::json!({
        "tool": { "name": "lakebloom", "version": env!("CARGO_PKG_VERSION") },
        "subcommand": command.name(),
        "label": config.label,
        "seed": seed,
        "config": { "sha256": config_hash },
        "timing": { "wall_seconds": started.elapsed().as_secs_f64() },
    });
    let mut bytes = serde_json::to_vec_pretty(&metadata)?;
    bytes.push(b'\n');
    fs::write(out.path_of("run_metadata.json"), bytes)?;

    if args.verbose > 0 {
        eprintln!(
            "{}: wrote {} files to {} in {:.2}s",
            command.name(),
            out.written_files().len(),
            out.root().display(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

/// Pin the global worker pool. An explicit count (flag or environment)
/// builds the pool at that size; otherwise rayon's default stands.
fn configure_workers(flag: Option<usize>) -> Result<()> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("LAKEBLOOM_WORKERS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!(
                    "LAKEBLOOM_WORKERS must be a positive integer, got '{s}'"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(
    command: &Command,
    config: &RunConfig,
    args: &CommonArgs,
    out: &mut OutputDir,
) -> Result<u64> {
    match command {
        Command::Simulate(_) => cmd_simulate(config, args, out),
        Command::Fit(_) => cmd_fit(config, args, out),
        Command::Sobol(_) => cmd_sobol(config, args, out),
        Command::Scenario(_) => cmd_scenario(config, args, out),
        Command::Vulnerability(_) => cmd_vulnerability(config, args, out),
    }
}

fn emit_warnings(label: &str, warnings: &[String]) {
    for w in warnings {
        eprintln!("warning [{label}]: {w}");
    }
}

fn cmd_simulate(config: &RunConfig, args: &CommonArgs, out: &mut OutputDir) -> Result<u64> {
    let forcing = load_forcing(config.forcing_path()?)?;
    let params = config.effective_params()?;
    if args.verbose > 0 {
        eprintln!("simulate: forcing loaded, {} samples", forcing.samples().len());
    }
    let traj = simulate(&params, &forcing, &config.initial_state, &config.simulation)?;
    emit_warnings(&config.label, &traj.warnings);
    let metrics = seasonal_metrics(&traj)?;
    out.write_trajectory_csv("trajectory.csv", &traj)?;
    out.write_json("metrics.json", &metrics)?;
    Ok(config.effective_seed(args.seed))
}

fn cmd_fit(config: &RunConfig, args: &CommonArgs, out: &mut OutputDir) -> Result<u64> {
    let fit_cfg = config
        .fit
        .as_ref()
        .ok_or_else(|| Error::Config("fit needs a 'fit' section in the config".into()))?;
    let forcing = load_forcing(config.forcing_path()?)?;
    let observations = load_observations(config.observations_path()?, forcing.anchor_year)?;
    let observations = match &fit_cfg.variables {
        Some(vars) => {
            let kept: Vec<Observation> = observations
                .records()
                .iter()
                .copied()
                .filter(|o| vars.contains(&o.variable))
                .collect();
            if kept.is_empty() {
                return Err(Error::Config(
                    "the fit variable filter leaves no observations".into(),
                ));
            }
            ObservationSet::new(kept)?
        }
        None => observations,
    };
    if let Some((lo, hi)) = observations.span() {
        let (t0, t1) = (config.simulation.t0, config.simulation.t1);
        if lo < t0 - 1e-6 || hi > t1 + 1e-6 {
            let time = if lo < t0 - 1e-6 { lo } else { hi };
            return Err(Error::ObservationOutsideSpan { time, start: t0, end: t1 });
        }
    }

    let params = config.effective_params()?;
    let bounds = fit_cfg.parameter_bounds()?;
    let mut settings = fit_cfg.settings;
    settings.seed = args.seed.or(config.seed).unwrap_or(settings.seed);
    settings.validate(bounds.entries().len())?;

    if args.verbose > 0 {
        eprintln!(
            "fit: {} observations, {} parameters, seed {}",
            observations.len(),
            bounds.entries().len(),
            settings.seed
        );
    }
    let problem = FitProblem {
        base_params: &params,
        initial: &config.initial_state,
        forcing: &forcing,
        simulation: &config.simulation,
        bounds: &bounds,
        observations: &observations,
        normalization: fit_cfg.normalization,
        penalty: settings.penalty,
    };
    let result = problem.solve(&settings)?;
    if args.verbose > 0 {
        eprintln!(
            "fit: best objective {:.6e} after {} generations ({} evaluations, {} failed)",
            result.best_objective, result.generations_run, result.evaluations, result.failures
        );
    }

    let mut fitted_params = params.clone();
    let mut fitted_initial = config.initial_state;
    bounds.apply(&result.best_vector(), &mut fitted_params, &mut fitted_initial)?;
    out.write_json("fit.json", &result)?;
    out.write_json(
        "fitted_params.json",
        &serde_json::json!({
            "params": fitted_params,
            "initial_state": fitted_initial,
        }),
    )?;
    Ok(settings.seed)
}

fn cmd_sobol(config: &RunConfig, args: &CommonArgs, out: &mut OutputDir) -> Result<u64> {
    let design = config.sobol.clone().unwrap_or_default();
    let forcing = load_forcing(config.forcing_path()?)?;
    let params = config.effective_params()?;
    let override_seed = args.seed.or(config.seed);
    if args.verbose > 0 {
        eprintln!(
            "sobol: {} factors, {} rows",
            design.factors.len(),
            design.base_samples * (design.factors.len() + 2)
        );
    }
    let result = time_dependent_sobol(
        &params,
        &forcing,
        &config.initial_state,
        &config.simulation,
        &design,
        override_seed,
    )?;
    if !result.excluded_samples.is_empty() {
        eprintln!(
            "warning [{}]: {} design samples excluded after simulation failures",
            config.label,
            result.excluded_samples.len()
        );
    }
    let seed = result.seed;
    out.write_sobol_csv("sobol.csv", &result)?;
    out.write_json("sobol.json", &result)?;
    Ok(seed)
}

#[derive(Debug, Serialize)]
struct ScenarioReport {
    label: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vulnerability: Option<VulnerabilityIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<SeasonalMetrics>,
}

fn cmd_scenario(config: &RunConfig, args: &CommonArgs, out: &mut OutputDir) -> Result<u64> {
    if config.scenarios.is_empty() {
        return Err(Error::Config(
            "scenario needs a non-empty 'scenarios' list in the config".into(),
        ));
    }
    let forcing = load_forcing(config.forcing_path()?)?;
    let params = config.effective_params()?;

    let base = simulate(&params, &forcing, &config.initial_state, &config.simulation)?;
    emit_warnings(&config.label, &base.warnings);
    let base_metrics = seasonal_metrics(&base)?;

    let items = sweep(
        &params,
        &forcing,
        &config.initial_state,
        &config.simulation,
        &config.scenarios,
    );
    let mut reports = Vec::with_capacity(items.len());
    for item in &items {
        let report = match &item.outcome {
            Ok(run) => ScenarioReport {
                label: item.spec.label.clone(),
                status: "ok",
                error: None,
                vulnerability: Some(vulnerability_index(&base, &run.trajectory)?),
                metrics: Some(run.metrics.clone()),
            },
            Err(e) => {
                eprintln!("warning [{}]: scenario failed: {e}", item.spec.label);
                ScenarioReport {
                    label: item.spec.label.clone(),
                    status: "failed",
                    error: Some(e.to_string()),
                    vulnerability: None,
                    metrics: None,
                }
            }
        };
        reports.push(report);
    }
    if args.verbose > 0 {
        let ok = reports.iter().filter(|r| r.status == "ok").count();
        eprintln!("scenario: {ok} of {} scenarios succeeded", reports.len());
    }

    out.write_sweep_csv("scenarios.csv", &items)?;
    out.write_json(
        "scenarios.json",
        &serde_json::json!({
            "label": config.label,
            "base": { "metrics": base_metrics },
            "scenarios": reports,
        }),
    )?;
    Ok(config.effective_seed(args.seed))
}

fn cmd_vulnerability(config: &RunConfig, args: &CommonArgs, out: &mut OutputDir) -> Result<u64> {
    let settings = config.vulnerability.clone().unwrap_or_default();
    let forcing = load_forcing(config.forcing_path()?)?;
    let params = config.effective_params()?;
    if args.verbose > 0 {
        eprintln!(
            "vulnerability: {} cells",
            settings.exchange_rates.len()
                * settings.depth_offsets.len()
                * settings.warming_levels.len()
        );
    }
    let grid = vulnerability_grid(
        &params,
        &forcing,
        &config.initial_state,
        &config.simulation,
        &settings,
    )?;
    out.write_grid_csv("grid.csv", &grid)?;
    out.write_json("grid.json", &grid)?;
    Ok(config.effective_seed(args.seed))
}
