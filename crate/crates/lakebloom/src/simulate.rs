//! Fixed-step integration of the lake model, trajectory storage, budget
//! accumulators, and seasonal bloom metrics.
//!
//! The integrator is classical fourth-order Runge-Kutta at the model's
//! native step of 1/3 day. Bloom collapses are locally stiff, so a step
//! that drives a component negative beyond tolerance is retried in 2, 4,
//! then 8 sub-steps before the run fails.

use serde::{Deserialize, Serialize};

use crate::calendar;
use crate::model::{
    idx, rhs, Forcing, ForcingAt, LakeState, ModelParams, Variable, N_LEDGER, N_STATE, STATE_NAMES,
};
use crate::{Error, Result};

/// The model's native step (day).
pub const DEFAULT_DT: f64 = 1.0 / 3.0;

/// Negative excursions smaller than this are treated as roundoff and
/// clamped to zero; anything larger is genuine instability.
pub const TOL_CLAMP: f64 = 1e-8;

/// Slack for forcing coverage and span/step divisibility checks.
const TIME_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSettings {
    /// First simulated day index.
    pub t0: f64,
    /// Last simulated day index.
    pub t1: f64,
    /// Integration step. unit: day
    pub dt: f64,
    /// Clamp roundoff-negative components to zero and fail on larger
    /// negative excursions.
    pub clamp_negative: bool,
    /// Record every n-th step (the initial and final states are always
    /// recorded).
    pub store_stride: usize,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        SimulationSettings {
            t0: 1.0,
            t1: 365.0,
            dt: DEFAULT_DT,
            clamp_negative: true,
            store_stride: 1,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 >= self.t0) {
            return Err(Error::InvalidSettings(format!(
                "need finite t1 >= t0, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSettings(format!("dt must be positive, got {}", self.dt)));
        }
        if self.store_stride == 0 {
            return Err(Error::InvalidSettings("store_stride must be >= 1".into()));
        }
        Ok(())
    }

    fn n_steps(&self) -> usize {
        (((self.t1 - self.t0) / self.dt) - TIME_EPS).ceil().max(0.0) as usize
    }
}

/// One fourth-order Runge-Kutta step of a generic ODE system
/// `f(t, y, dy)`. Writes the advanced state into `out`.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], dt: f64, out: &mut [f64], scratch: &mut Rk4Scratch) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    scratch.resize(n);
    let Rk4Scratch { k1, k2, k3, k4, tmp } = scratch;

    f(t, y, k1)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    f(t + 0.5 * dt, tmp, k2)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    f(t + 0.5 * dt, tmp, k3)?;
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    f(t + dt, tmp, k4)?;
    for i in 0..n {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

/// Reusable stage buffers for [`rk4_step`].
#[derive(Debug, Default)]
pub struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn resize(&mut self, n: usize) {
        for buf in [&mut self.k1, &mut self.k2, &mut self.k3, &mut self.k4, &mut self.tmp] {
            buf.resize(n, 0.0);
        }
    }
}

const N_EXT: usize = N_STATE + N_LEDGER;

fn eval_extended<F: Forcing>(
    params: &ModelParams,
    forcing: &F,
    t: f64,
    y: &[f64],
    dy: &mut [f64],
) -> Result<()> {
    let mut arr = [0.0; N_STATE];
    arr.copy_from_slice(&y[..N_STATE]);
    let state = LakeState::from_array(&arr);
    let d = rhs(t, &state, params, &forcing.at(t))?;
    dy[..N_STATE].copy_from_slice(&d.state);
    dy[N_STATE..].copy_from_slice(&d.ledger);
    Ok(())
}

/// Post-step hygiene: divergence check, quota boxing, negativity policy.
fn settle_step(y: &mut [f64], params: &ModelParams, t_next: f64, clamp_negative: bool) -> Result<()> {
    for i in 0..N_STATE {
        if !y[i].is_finite() {
            return Err(Error::Divergence {
                component: STATE_NAMES[i],
                time: t_next,
            });
        }
    }
    y[idx::CYANO_QUOTA] = y[idx::CYANO_QUOTA].clamp(params.cyano.q_min, params.cyano.q_max);
    y[idx::ALGAE_QUOTA] = y[idx::ALGAE_QUOTA].clamp(params.algae.q_min, params.algae.q_max);
    if clamp_negative {
        for i in 0..N_STATE {
            if y[i] < 0.0 {
                if y[i] > -TOL_CLAMP {
                    y[i] = 0.0;
                } else {
                    return Err(Error::Stiffness {
                        component: STATE_NAMES[i],
                        time: t_next,
                        value: y[i],
                    });
                }
            }
        }
    }
    Ok(())
}

struct LakeStepper<'a, F: Forcing> {
    params: &'a ModelParams,
    forcing: &'a F,
    clamp_negative: bool,
    scratch: Rk4Scratch,
    out: Vec<f64>,
}

impl<'a, F: Forcing> LakeStepper<'a, F> {
    fn new(params: &'a ModelParams, forcing: &'a F, clamp_negative: bool) -> Self {
        LakeStepper {
            params,
            forcing,
            clamp_negative,
            scratch: Rk4Scratch::default(),
            out: vec![0.0; N_EXT],
        }
    }

    fn step_once(&mut self, t: f64, dt: f64, y: &mut [f64]) -> Result<()> {
        let params = self.params;
        let forcing = self.forcing;
        let mut f = |t: f64, y: &[f64], dy: &mut [f64]| eval_extended(params, forcing, t, y, dy);
        rk4_step(&mut f, t, y, dt, &mut self.out, &mut self.scratch)?;
        settle_step(&mut self.out[..], params, t + dt, self.clamp_negative)?;
        y.copy_from_slice(&self.out);
        Ok(())
    }

    /// Advance one macro step, sub-stepping in 2/4/8 pieces if the step
    /// drives a component negative beyond tolerance. Returns the number of
    /// sub-steps used.
    fn advance(&mut self, t: f64, dt: f64, y: &mut [f64], saved: &mut [f64]) -> Result<usize> {
        saved.copy_from_slice(y);
        let first = match self.step_once(t, dt, y) {
            Ok(()) => return Ok(1),
            Err(e @ Error::Stiffness { .. }) => e,
            Err(e) => return Err(e),
        };
        let mut last = first;
        for parts in [2usize, 4, 8] {
            y.copy_from_slice(saved);
            let h = dt / parts as f64;
            let mut failed = None;
            for k in 0..parts {
                if let Err(e) = self.step_once(t + k as f64 * h, h, y) {
                    failed = Some(e);
                    break;
                }
            }
            match failed {
                None => return Ok(parts),
                Some(e @ Error::Stiffness { .. }) => last = e,
                Some(e) => return Err(e),
            }
        }
        y.copy_from_slice(saved);
        Err(last)
    }
}

/// One clamped Runge-Kutta step of the lake system.
pub fn step_rk4<F: Forcing>(
    state: &LakeState,
    t: f64,
    dt: f64,
    params: &ModelParams,
    forcing: &F,
    clamp_negative: bool,
) -> Result<LakeState> {
    let mut stepper = LakeStepper::new(params, forcing, clamp_negative);
    let mut y = vec![0.0; N_EXT];
    y[..N_STATE].copy_from_slice(&state.to_array());
    stepper.step_once(t, dt, &mut y)?;
    let mut arr = [0.0; N_STATE];
    arr.copy_from_slice(&y[..N_STATE]);
    Ok(LakeState::from_array(&arr))
}

/// Stored simulation output: states, cumulative budget ledgers, and
/// forcing snapshots at each recorded time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LakeState>,
    /// Cumulative ledgers (see [`crate::model::LEDGER_NAMES`]).
    pub ledgers: Vec<[f64; N_LEDGER]>,
    pub forcings: Vec<ForcingAt>,
    pub dt: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.times.first()?, *self.times.last()?))
    }

    pub fn final_state(&self) -> Option<&LakeState> {
        self.states.last()
    }

    pub fn final_ledger(&self) -> Option<&[f64; N_LEDGER]> {
        self.ledgers.last()
    }

    /// Variable value at time `t`, linearly interpolated between stored
    /// samples (derived variables are interpolated after extraction).
    /// `None` outside the stored span.
    pub fn value_at(&self, variable: Variable, t: f64) -> Option<f64> {
        let (start, end) = self.span()?;
        if t < start - TIME_EPS || t > end + TIME_EPS {
            return None;
        }
        let pos = self.times.partition_point(|&x| x < t);
        if pos == 0 {
            return Some(variable.extract(&self.states[0]));
        }
        if pos >= self.len() {
            return Some(variable.extract(&self.states[self.len() - 1]));
        }
        let (t0, t1) = (self.times[pos - 1], self.times[pos]);
        let (v0, v1) = (
            variable.extract(&self.states[pos - 1]),
            variable.extract(&self.states[pos]),
        );
        if t1 <= t0 {
            return Some(v1);
        }
        let w = (t - t0) / (t1 - t0);
        Some(v0 + w * (v1 - v0))
    }

    pub fn series(&self, variable: Variable) -> Vec<f64> {
        self.states.iter().map(|s| variable.extract(s)).collect()
    }
}

/// Integrate the model from `settings.t0` to `settings.t1`.
///
/// Deterministic: identical inputs produce bitwise-identical trajectories.
pub fn simulate<F: Forcing>(
    params: &ModelParams,
    forcing: &F,
    initial: &LakeState,
    settings: &SimulationSettings,
) -> Result<Trajectory> {
    params.validate()?;
    initial.validate()?;
    settings.validate()?;
    if let Some((have_start, have_end)) = forcing.span() {
        if settings.t0 < have_start - TIME_EPS || settings.t1 > have_end + TIME_EPS {
            return Err(Error::ForcingCoverage {
                have_start,
                have_end,
                need_start: settings.t0,
                need_end: settings.t1,
            });
        }
    }

    let n = settings.n_steps();
    let mut y = vec![0.0; N_EXT];
    y[..N_STATE].copy_from_slice(&initial.to_array());
    let mut saved = vec![0.0; N_EXT];

    let capacity = n / settings.store_stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        ledgers: Vec::with_capacity(capacity),
        forcings: Vec::with_capacity(capacity),
        dt: settings.dt,
        warnings: Vec::new(),
    };
    let record = |t: f64, y: &[f64], traj: &mut Trajectory| {
        let mut arr = [0.0; N_STATE];
        arr.copy_from_slice(&y[..N_STATE]);
        let mut led = [0.0; N_LEDGER];
        led.copy_from_slice(&y[N_STATE..]);
        traj.times.push(t);
        traj.states.push(LakeState::from_array(&arr));
        traj.ledgers.push(led);
        traj.forcings.push(forcing.at(t));
    };

    record(settings.t0, &y, &mut traj);
    if n == 0 {
        return Ok(traj);
    }

    let mut stepper = LakeStepper::new(params, forcing, settings.clamp_negative);
    let mut substepped = 0usize;
    for i in 0..n {
        let t = settings.t0 + i as f64 * settings.dt;
        let t_next = if i + 1 == n {
            settings.t1
        } else {
            settings.t0 + (i + 1) as f64 * settings.dt
        };
        let dt = t_next - t;
        if stepper.advance(t, dt, &mut y, &mut saved)? > 1 {
            substepped += 1;
        }
        if (i + 1) % settings.store_stride == 0 || i + 1 == n {
            record(t_next, &y, &mut traj);
        }
    }
    if substepped > 0 {
        traj.warnings.push(format!(
            "{substepped} of {n} steps required sub-stepping (locally stiff dynamics)"
        ));
    }
    Ok(traj)
}

/// Peak, peak day, and warm-season mean of one reported variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableMetrics {
    pub variable: Variable,
    pub peak: f64,
    pub peak_day: f64,
    /// Mean over stored samples with day-of-year in the warm window;
    /// absent when the trajectory never enters it.
    pub warm_season_mean: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeasonalMetrics {
    pub variables: Vec<VariableMetrics>,
    pub min_oxygen: f64,
    pub min_oxygen_day: f64,
}

impl SeasonalMetrics {
    pub fn get(&self, variable: Variable) -> &VariableMetrics {
        self.variables
            .iter()
            .find(|m| m.variable == variable)
            .expect("metrics cover every variable")
    }
}

/// Per-variable peak value and first-argmax day, warm-season means, and
/// the seasonal oxygen minimum.
pub fn seasonal_metrics(traj: &Trajectory) -> Result<SeasonalMetrics> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let warm: Vec<usize> = (0..traj.len())
        .filter(|&i| calendar::in_warm_season(traj.times[i]))
        .collect();
    let mut variables = Vec::with_capacity(Variable::ALL.len());
    for var in Variable::ALL {
        let mut peak = f64::NEG_INFINITY;
        let mut peak_day = traj.times[0];
        for (i, s) in traj.states.iter().enumerate() {
            let v = var.extract(s);
            if v > peak {
                peak = v;
                peak_day = traj.times[i];
            }
        }
        let warm_season_mean = if warm.is_empty() {
            None
        } else {
            Some(warm.iter().map(|&i| var.extract(&traj.states[i])).sum::<f64>() / warm.len() as f64)
        };
        variables.push(VariableMetrics {
            variable: var,
            peak,
            peak_day,
            warm_season_mean,
        });
    }
    let mut min_oxygen = f64::INFINITY;
    let mut min_oxygen_day = traj.times[0];
    for (i, s) in traj.states.iter().enumerate() {
        if s.oxygen < min_oxygen {
            min_oxygen = s.oxygen;
            min_oxygen_day = traj.times[i];
        }
    }
    Ok(SeasonalMetrics {
        variables,
        min_oxygen,
        min_oxygen_day,
    })
}
