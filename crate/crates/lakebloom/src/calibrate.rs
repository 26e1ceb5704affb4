//! Model calibration: weighted mean-square-error objective over observed
//! time series and a differential-evolution search (DE/rand/1/bin) within
//! box bounds.
//!
//! Candidate evaluations inside a generation run in parallel; every random
//! draw happens on a single coordinator stream in fixed candidate order, so
//! the result is independent of the worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Forcing, LakeState, ModelParams, Variable, STATE_NAMES};
use crate::simulate::{simulate, SimulationSettings, Trajectory};
use crate::{Error, Result};

/// One measured value of an observable variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Day index on the simulation clock.
    pub time: f64,
    pub variable: Variable,
    pub value: f64,
    /// Relative weight in the objective. Must be positive.
    pub weight: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ObservationSet {
    observations: Vec<Observation>,
}

impl ObservationSet {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        for (i, o) in observations.iter().enumerate() {
            if !o.time.is_finite() || !o.value.is_finite() {
                return Err(Error::Domain(format!(
                    "observation {i} ({}) has non-finite time or value",
                    o.variable
                )));
            }
            if !(o.weight.is_finite() && o.weight > 0.0) {
                return Err(Error::Domain(format!(
                    "observation {i} ({}) has non-positive weight {}",
                    o.variable, o.weight
                )));
            }
        }
        Ok(ObservationSet { observations })
    }

    pub fn records(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        let first = self.observations.first()?;
        let mut lo = first.time;
        let mut hi = first.time;
        for o in &self.observations {
            lo = lo.min(o.time);
            hi = hi.max(o.time);
        }
        Some((lo, hi))
    }
}

/// How squared residuals of different variables are made commensurate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Raw squared residuals.
    Unit,
    /// Each variable's residuals divided by the variance of its observed
    /// values, so mixed-unit variables contribute comparably. Variables
    /// with zero observed variance fall back to raw residuals.
    #[default]
    PerVariableVariance,
}

/// Weighted mean squared error between a trajectory and observations.
///
/// Predictions are linearly interpolated between stored states; an
/// observation outside the stored span is an error.
pub fn mse_objective(
    trajectory: &Trajectory,
    observations: &ObservationSet,
    normalization: Normalization,
) -> Result<f64> {
    if observations.is_empty() {
        return Ok(0.0);
    }
    let (start, end) = trajectory.span().ok_or(Error::EmptyTrajectory)?;

    let mut scale = [1.0f64; Variable::ALL.len()];
    if normalization == Normalization::PerVariableVariance {
        for (k, var) in Variable::ALL.iter().enumerate() {
            let values: Vec<f64> = observations
                .records()
                .iter()
                .filter(|o| o.variable == *var)
                .map(|o| o.value)
                .collect();
            if values.len() < 2 {
                continue;
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var_obs = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
            if var_obs > 0.0 {
                scale[k] = var_obs;
            }
        }
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for o in observations.records() {
        let pred = trajectory
            .value_at(o.variable, o.time)
            .ok_or(Error::ObservationOutsideSpan {
                time: o.time,
                start,
                end,
            })?;
        let k = Variable::ALL.iter().position(|v| *v == o.variable).expect("known variable");
        num += o.weight * (pred - o.value).powi(2) / scale[k];
        den += o.weight;
    }
    Ok(num / den)
}

/// What a fitted coordinate writes to: a model parameter path or an
/// initial-state component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoundTarget {
    Param,
    State(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    /// A dotted parameter path (e.g. `cyano.mu_max`) or an initial-state
    /// component, either bare (`phosphorus`) or prefixed (`init.phosphorus`).
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterBounds {
    entries: Vec<BoundEntry>,
}

fn resolve_target(name: &str) -> Result<BoundTarget> {
    let state_name = name.strip_prefix("init.").unwrap_or(name);
    if let Some(i) = STATE_NAMES.iter().position(|n| *n == state_name) {
        return Ok(BoundTarget::State(i));
    }
    if ModelParams::default().get(name).is_some() {
        Ok(BoundTarget::Param)
    } else {
        Err(Error::UnknownParameter(name.to_string()))
    }
}

impl ParameterBounds {
    pub fn new(entries: Vec<BoundEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidBounds("no bound entries".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            resolve_target(&e.name)?;
            if !(e.lower.is_finite() && e.upper.is_finite() && e.lower < e.upper) {
                return Err(Error::InvalidBounds(format!(
                    "{}: need finite lower < upper, got [{}, {}]",
                    e.name, e.lower, e.upper
                )));
            }
            if entries[..i].iter().any(|prev| prev.name == e.name) {
                return Err(Error::InvalidBounds(format!("duplicate name {}", e.name)));
            }
        }
        Ok(ParameterBounds { entries })
    }

    pub fn entries(&self) -> &[BoundEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && self
                .entries
                .iter()
                .zip(x.iter())
                .all(|(e, &v)| v >= e.lower && v <= e.upper)
    }

    /// Midpoint of the hypercube.
    pub fn center(&self) -> Vec<f64> {
        self.entries.iter().map(|e| 0.5 * (e.lower + e.upper)).collect()
    }

    /// Write a candidate vector into a parameter set and initial state.
    pub fn apply(&self, x: &[f64], params: &mut ModelParams, initial: &mut LakeState) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::InvalidBounds(format!(
                "candidate has {} coordinates for {} bounds",
                x.len(),
                self.len()
            )));
        }
        for (e, &v) in self.entries.iter().zip(x.iter()) {
            match resolve_target(&e.name)? {
                BoundTarget::State(i) => {
                    let mut arr = initial.to_array();
                    arr[i] = v;
                    *initial = LakeState::from_array(&arr);
                }
                BoundTarget::Param => {
                    if !params.set(&e.name, v) {
                        return Err(Error::UnknownParameter(e.name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Extract the vector of currently-set values (inverse of `apply`).
    pub fn extract(&self, params: &ModelParams, initial: &LakeState) -> Result<Vec<f64>> {
        let arr = initial.to_array();
        self.entries
            .iter()
            .map(|e| match resolve_target(&e.name)? {
                BoundTarget::State(i) => Ok(arr[i]),
                BoundTarget::Param => params
                    .get(&e.name)
                    .ok_or_else(|| Error::UnknownParameter(e.name.clone())),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSettings {
    /// Population size; absent means 15 times the problem dimension.
    pub population_size: Option<usize>,
    pub max_generations: usize,
    /// Mutation factor.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub seed: u64,
    /// Objective value substituted for failed simulations.
    pub penalty: f64,
    /// Early stop once per-generation improvement stays below this for
    /// `patience` consecutive generations; zero disables early stopping.
    pub tol: f64,
    pub patience: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            population_size: None,
            max_generations: 300,
            f: 0.7,
            cr: 0.9,
            seed: 42,
            penalty: 1e12,
            tol: 1e-10,
            patience: 40,
        }
    }
}

impl FitSettings {
    pub fn validate(&self, dimension: usize) -> Result<()> {
        if self.resolved_population(dimension) < 4 {
            return Err(Error::InvalidSettings("population_size must be at least 4".into()));
        }
        if !(self.f > 0.0 && self.f <= 2.0) {
            return Err(Error::InvalidSettings(format!("mutation factor must be in (0, 2], got {}", self.f)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidSettings(format!("crossover rate must be in [0, 1], got {}", self.cr)));
        }
        if self.max_generations == 0 {
            return Err(Error::InvalidSettings("max_generations must be at least 1".into()));
        }
        if !(self.penalty.is_finite() && self.penalty > 0.0) {
            return Err(Error::InvalidSettings("penalty must be finite and positive".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) || self.patience == 0 {
            return Err(Error::InvalidSettings("need tol >= 0 and patience >= 1".into()));
        }
        Ok(())
    }

    pub fn resolved_population(&self, dimension: usize) -> usize {
        self.population_size.unwrap_or(15 * dimension.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub best: Vec<NamedValue>,
    pub best_objective: f64,
    /// Best-ever objective after each generation; non-increasing.
    pub history: Vec<f64>,
    pub evaluations: u64,
    /// Evaluations that hit the penalty fallback.
    pub failures: u64,
    pub seed: u64,
    pub settings: FitSettings,
    pub population_size: usize,
    pub generations_run: usize,
}

impl FitResult {
    pub fn best_vector(&self) -> Vec<f64> {
        self.best.iter().map(|nv| nv.value).collect()
    }
}

fn reflect_into(mut v: f64, lower: f64, upper: f64) -> f64 {
    for _ in 0..100 {
        if v < lower {
            v = 2.0 * lower - v;
        } else if v > upper {
            v = 2.0 * upper - v;
        } else {
            return v;
        }
    }
    v.clamp(lower, upper)
}

/// DE/rand/1/bin minimization of `objective` over the bounds hypercube.
///
/// Deterministic for a given seed regardless of worker count: mutation and
/// crossover draws happen on one coordinator stream in fixed candidate
/// order, and only the (pure) objective evaluations run in parallel.
pub fn differential_evolution<F>(
    objective: F,
    bounds: &ParameterBounds,
    settings: &FitSettings,
) -> Result<FitResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = bounds.len();
    settings.validate(dim)?;
    let np = settings.resolved_population(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|_| {
            bounds
                .entries()
                .iter()
                .map(|e| rng.gen_range(e.lower..=e.upper))
                .collect()
        })
        .collect();
    let mut values: Vec<f64> = population.par_iter().map(|x| objective(x)).collect();
    let mut evaluations = np as u64;
    let mut failures = values.iter().filter(|&&v| v == settings.penalty).count() as u64;

    let best_idx = argmin(&values);
    let mut best_vector = population[best_idx].clone();
    let mut best_value = values[best_idx];

    let mut history = Vec::with_capacity(settings.max_generations);
    let mut stall = 0usize;
    let mut generations_run = 0usize;

    for _gen in 0..settings.max_generations {
        let mut trials: Vec<Vec<f64>> = Vec::with_capacity(np);
        for i in 0..np {
            let mut pick = |exclude: &[usize]| loop {
                let r = rng.gen_range(0..np);
                if !exclude.contains(&r) {
                    return r;
                }
            };
            let r1 = pick(&[i]);
            let r2 = pick(&[i, r1]);
            let r3 = pick(&[i, r1, r2]);
            let j_rand = rng.gen_range(0..dim);
            let mut trial = population[i].clone();
            for (j, e) in bounds.entries().iter().enumerate() {
                let cross = rng.gen_range(0.0..1.0) < settings.cr;
                if cross || j == j_rand {
                    let v = population[r1][j] + settings.f * (population[r2][j] - population[r3][j]);
                    trial[j] = reflect_into(v, e.lower, e.upper);
                }
            }
            trials.push(trial);
        }

        let trial_values: Vec<f64> = trials.par_iter().map(|x| objective(x)).collect();
        evaluations += np as u64;
        failures += trial_values.iter().filter(|&&v| v == settings.penalty).count() as u64;

        let prev_best = best_value;
        for i in 0..np {
            if trial_values[i] <= values[i] {
                population[i] = trials[i].clone();
                values[i] = trial_values[i];
            }
            if values[i] < best_value {
                best_value = values[i];
                best_vector = population[i].clone();
            }
        }
        history.push(best_value);
        generations_run += 1;

        if settings.tol > 0.0 {
            if prev_best - best_value < settings.tol {
                stall += 1;
                if stall >= settings.patience {
                    break;
                }
            } else {
                stall = 0;
            }
        }
    }
    Ok(FitResult {
        best: bounds
            .entries()
            .iter()
            .zip(best_vector.iter())
            .map(|(e, &v)| NamedValue {
                name: e.name.clone(),
                value: v,
            })
            .collect(),
        best_objective: best_value,
        history,
        evaluations,
        failures,
        seed: settings.seed,
        settings: *settings,
        population_size: np,
        generations_run,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// A complete calibration problem: the base configuration to patch, the
/// data to match, and the penalty convention.
pub struct FitProblem<'a, F: Forcing + Sync> {
    pub base_params: &'a ModelParams,
    pub initial: &'a LakeState,
    pub forcing: &'a F,
    pub simulation: &'a SimulationSettings,
    pub bounds: &'a ParameterBounds,
    pub observations: &'a ObservationSet,
    pub normalization: Normalization,
    pub penalty: f64,
}

impl<'a, F: Forcing + Sync> FitProblem<'a, F> {
    /// Total objective: any simulation or validation failure maps to the
    /// finite penalty value instead of propagating.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self.try_evaluate(x) {
            Ok(v) if v.is_finite() => v,
            _ => self.penalty,
        }
    }

    fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        let mut params = self.base_params.clone();
        let mut initial = *self.initial;
        self.bounds.apply(x, &mut params, &mut initial)?;
        let traj = simulate(&params, self.forcing, &initial, self.simulation)?;
        mse_objective(&traj, self.observations, self.normalization)
    }

    pub fn solve(&self, settings: &FitSettings) -> Result<FitResult> {
        let settings = FitSettings {
            penalty: self.penalty,
            ..*settings
        };
        differential_evolution(|x| self.evaluate(x), self.bounds, &settings)
    }
}

/// Second-difference curvature of the objective along each coordinate,
/// normalized by the squared bound width. Flat directions signal
/// parameters the data cannot identify.
pub fn curvature_scan<F>(objective: F, bounds: &ParameterBounds, center: &[f64], rel_step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = objective(center);
    bounds
        .entries()
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let h = rel_step * (e.upper - e.lower);
            let mut up = center.to_vec();
            up[j] = (center[j] + h).min(e.upper);
            let mut dn = center.to_vec();
            dn[j] = (center[j] - h).max(e.lower);
            (objective(&up) - 2.0 * f0 + objective(&dn)) / (h * h)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrophicState {
    Oligotrophic,
    Mesotrophic,
    Eutrophic,
}

/// Trophic classification from total phosphorus in µg/L.
pub fn classify_trophic(total_p_ug_l: f64) -> Result<TrophicState> {
    if !(total_p_ug_l >= 0.0) {
        return Err(Error::Domain(format!(
            "total phosphorus must be non-negative, got {total_p_ug_l}"
        )));
    }
    Ok(if total_p_ug_l < 10.0 {
        TrophicState::Oligotrophic
    } else if total_p_ug_l <= 35.0 {
        TrophicState::Mesotrophic
    } else {
        TrophicState::Eutrophic
    })
}
