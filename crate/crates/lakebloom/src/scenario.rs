//! Declarative what-if transforms on a configured lake (warming, nutrient
//! loading, mixing, stratification depth), scenario sweeps, and the
//! vulnerability-index grid comparing warmed runs against matched bases.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar;
use crate::io::sha256_hex;
use crate::io::ForcingSeries;
use crate::model::{LakeState, ModelParams};
use crate::simulate::{seasonal_metrics, simulate, SeasonalMetrics, SimulationSettings, Trajectory};
use crate::{Error, Result};

/// Base MC-LR peaks below this are too small to support a meaningful
/// ratio. unit: ug/L
pub const EPS_MCLR: f64 = 1e-6;

/// One scenario: every field is optional and absent fields leave the base
/// configuration untouched.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSpec {
    pub label: String,
    /// Added to water temperature only on days-of-year 121 through 273.
    /// unit: degC
    pub warm_season_dt: Option<f64>,
    /// Added to water temperature on every day. unit: degC
    pub uniform_dt: Option<f64>,
    /// Replaces the initial dissolved phosphorus. unit: mgP/L
    pub initial_p: Option<f64>,
    /// Replaces the inflow phosphorus concentration. unit: mgP/L
    pub p_in: Option<f64>,
    /// Replaces the water exchange rate. unit: m/day
    pub exchange_rate: Option<f64>,
    /// Added to every epilimnion depth sample. unit: m
    pub depth_offset: Option<f64>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        for (v, n) in [
            (self.warm_season_dt, "warm_season_dt"),
            (self.uniform_dt, "uniform_dt"),
            (self.depth_offset, "depth_offset"),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(Error::InvalidSettings(format!("{n} must be finite, got {v}")));
                }
            }
        }
        for (v, n) in [
            (self.initial_p, "initial_p"),
            (self.p_in, "p_in"),
            (self.exchange_rate, "exchange_rate"),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidSettings(format!("{n} must be non-negative, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.warm_season_dt.is_none()
            && self.uniform_dt.is_none()
            && self.initial_p.is_none()
            && self.p_in.is_none()
            && self.exchange_rate.is_none()
            && self.depth_offset.is_none()
    }
}

/// Apply a scenario to a base configuration. Pure: the base inputs are
/// left untouched and an identity spec returns equal values.
pub fn apply_scenario(
    params: &ModelParams,
    forcing: &ForcingSeries,
    initial: &LakeState,
    spec: &ScenarioSpec,
) -> Result<(ModelParams, ForcingSeries, LakeState)> {
    spec.validate()?;
    let mut params = params.clone();
    let mut initial = *initial;
    if let Some(p) = spec.initial_p {
        initial.phosphorus = p;
    }
    if let Some(p) = spec.p_in {
        params.background.p_in = p;
    }
    if let Some(nu) = spec.exchange_rate {
        params.background.exchange_rate = nu;
    }
    let warm_dt = spec.warm_season_dt.unwrap_or(0.0);
    let uniform_dt = spec.uniform_dt.unwrap_or(0.0);
    let dz = spec.depth_offset.unwrap_or(0.0);
    let forcing = forcing
        .map_samples(|mut s| {
            s.temperature += uniform_dt;
            if calendar::in_warm_season(s.day) {
                s.temperature += warm_dt;
            }
            s.depth += dz;
            s
        })
        .map_err(|e| {
            Error::InvalidSettings(format!("scenario '{}' produces invalid forcing: {e}", spec.label))
        })?;
    Ok((params, forcing, initial))
}

/// Ratio of scenario peak MC-LR to base peak MC-LR, undefined when the
/// base never produces a resolvable peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum VulnerabilityIndex {
    Defined(f64),
    UndefinedBase,
}

pub fn vulnerability_index(base: &Trajectory, scenario: &Trajectory) -> Result<VulnerabilityIndex> {
    let peak = |traj: &Trajectory| -> Result<f64> {
        if traj.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        Ok(traj.states.iter().map(|s| s.mclr).fold(f64::NEG_INFINITY, f64::max))
    };
    let base_peak = peak(base)?;
    let scenario_peak = peak(scenario)?;
    if base_peak < EPS_MCLR {
        return Ok(VulnerabilityIndex::UndefinedBase);
    }
    Ok(VulnerabilityIndex::Defined(scenario_peak / base_peak))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRun {
    pub trajectory: Trajectory,
    pub metrics: SeasonalMetrics,
}

#[derive(Debug)]
pub struct SweepItem {
    pub spec: ScenarioSpec,
    pub outcome: Result<SweepRun>,
}

/// Run each scenario independently against the same base configuration.
/// Order-preserving; failures are reported per item.
pub fn sweep(
    params: &ModelParams,
    forcing: &ForcingSeries,
    initial: &LakeState,
    settings: &SimulationSettings,
    specs: &[ScenarioSpec],
) -> Vec<SweepItem> {
    specs
        .par_iter()
        .map(|spec| {
            let outcome = (|| {
                let (p, f, s) = apply_scenario(params, forcing, initial, spec)?;
                let trajectory = simulate(&p, &f, &s, settings)?;
                let metrics = seasonal_metrics(&trajectory)?;
                Ok(SweepRun { trajectory, metrics })
            })();
            SweepItem {
                spec: spec.clone(),
                outcome,
            }
        })
        .collect()
}

/// What the denominator run of each grid cell holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridBaseMode {
    /// Base shares the cell's exchange rate and depth offset and differs
    /// only in warming, isolating the temperature effect.
    #[default]
    PerCell,
    /// Base is the unmodified lake configuration for every cell.
    GlobalBase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSettings {
    /// unit: m/day
    pub exchange_rates: Vec<f64>,
    /// unit: m
    pub depth_offsets: Vec<f64>,
    /// Warm-season temperature increases. unit: degC
    pub warming_levels: Vec<f64>,
    pub base_mode: GridBaseMode,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            exchange_rates: vec![0.02, 0.04, 0.06, 0.08, 0.10, 0.12],
            depth_offsets: vec![0.0, 0.9, 1.8, 2.7],
            warming_levels: vec![0.5, 1.5, 3.5],
            base_mode: GridBaseMode::PerCell,
        }
    }
}

impl GridSettings {
    pub fn validate(&self) -> Result<()> {
        if self.exchange_rates.is_empty() || self.depth_offsets.is_empty() || self.warming_levels.is_empty() {
            return Err(Error::InvalidSettings("vulnerability grid axes must be non-empty".into()));
        }
        for v in &self.exchange_rates {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidSettings(format!("bad exchange rate {v}")));
            }
        }
        for v in self.depth_offsets.iter().chain(&self.warming_levels) {
            if !v.is_finite() {
                return Err(Error::InvalidSettings(format!("bad grid value {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    UndefinedBase,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub exchange_rate: f64,
    pub depth_offset: f64,
    pub warming: f64,
    pub index: Option<f64>,
    pub status: CellStatus,
}

/// Vulnerability indices on the (exchange rate, depth offset) plane, one
/// slice per warming level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VulnerabilityGrid {
    pub exchange_rates: Vec<f64>,
    pub depth_offsets: Vec<f64>,
    pub warming_levels: Vec<f64>,
    pub base_mode: GridBaseMode,
    /// Hash of the base configuration the ratios are measured against.
    pub base_hash: String,
    /// Cells ordered by (warming, exchange rate, depth offset), the last
    /// axis fastest.
    pub cells: Vec<GridCell>,
}

impl VulnerabilityGrid {
    pub fn cell(&self, warming_i: usize, exchange_i: usize, depth_i: usize) -> &GridCell {
        let ne = self.exchange_rates.len();
        let nd = self.depth_offsets.len();
        &self.cells[(warming_i * ne + exchange_i) * nd + depth_i]
    }

    /// One warming level's indices as a matrix indexed
    /// [exchange][depth]; failed or undefined cells are `None`.
    pub fn matrix(&self, warming_i: usize) -> Vec<Vec<Option<f64>>> {
        (0..self.exchange_rates.len())
            .map(|ie| {
                (0..self.depth_offsets.len())
                    .map(|id| self.cell(warming_i, ie, id).index)
                    .collect()
            })
            .collect()
    }
}

/// Evaluate the warming vulnerability of every grid cell. A cell failure
/// marks that cell and the grid completes.
pub fn vulnerability_grid(
    params: &ModelParams,
    forcing: &ForcingSeries,
    initial: &LakeState,
    settings: &SimulationSettings,
    grid: &GridSettings,
) -> Result<VulnerabilityGrid> {
    grid.validate()?;
    let base_hash = sha256_hex(
        &serde_json::to_vec(&(params, initial, settings, forcing.samples(), &grid.base_mode))
            .expect("serializable"),
    );

    // Base runs: one per (exchange, depth) pair in per-cell mode, a single
    // shared run in global-base mode.
    let pairs: Vec<(usize, usize)> = (0..grid.exchange_rates.len())
        .flat_map(|ie| (0..grid.depth_offsets.len()).map(move |id| (ie, id)))
        .collect();
    let base_runs: Vec<Option<Trajectory>> = match grid.base_mode {
        GridBaseMode::PerCell => pairs
            .par_iter()
            .map(|&(ie, id)| {
                let spec = ScenarioSpec {
                    label: "base".into(),
                    exchange_rate: Some(grid.exchange_rates[ie]),
                    depth_offset: Some(grid.depth_offsets[id]),
                    ..Default::default()
                };
                apply_scenario(params, forcing, initial, &spec)
                    .and_then(|(p, f, s)| simulate(&p, &f, &s, settings))
                    .ok()
            })
            .collect(),
        GridBaseMode::GlobalBase => {
            let one = simulate(params, forcing, initial, settings).ok();
            pairs.iter().map(|_| one.clone()).collect()
        }
    };

    let nd = grid.depth_offsets.len();
    let triples: Vec<(usize, usize, usize)> = (0..grid.warming_levels.len())
        .flat_map(|iw| pairs.iter().map(move |&(ie, id)| (iw, ie, id)))
        .collect();
    let cells: Vec<GridCell> = triples
        .par_iter()
        .map(|&(iw, ie, id)| {
            let mut cell = GridCell {
                exchange_rate: grid.exchange_rates[ie],
                depth_offset: grid.depth_offsets[id],
                warming: grid.warming_levels[iw],
                index: None,
                status: CellStatus::Failed,
            };
            let base = match &base_runs[ie * nd + id] {
                Some(t) => t,
                None => return cell,
            };
            let spec = ScenarioSpec {
                label: format!("warm+{}", grid.warming_levels[iw]),
                warm_season_dt: Some(grid.warming_levels[iw]),
                exchange_rate: Some(grid.exchange_rates[ie]),
                depth_offset: Some(grid.depth_offsets[id]),
                ..Default::default()
            };
            let outcome = (|| {
                let (p, f, s) = apply_scenario(params, forcing, initial, &spec)?;
                let traj = simulate(&p, &f, &s, settings)?;
                vulnerability_index(base, &traj)
            })();
            match outcome {
                Ok(VulnerabilityIndex::Defined(v)) => {
                    cell.index = Some(v);
                    cell.status = CellStatus::Ok;
                }
                Ok(VulnerabilityIndex::UndefinedBase) => {
                    cell.status = CellStatus::UndefinedBase;
                }
                Err(_) => {}
            }
            cell
        })
        .collect();

    Ok(VulnerabilityGrid {
        exchange_rates: grid.exchange_rates.clone(),
        depth_offsets: grid.depth_offsets.clone(),
        warming_levels: grid.warming_levels.clone(),
        base_mode: grid.base_mode,
        base_hash,
        cells,
    })
}
