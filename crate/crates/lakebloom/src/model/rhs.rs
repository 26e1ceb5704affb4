//! Assembled balance equations for the thirteen-component epilimnion state,
//! plus cumulative ledger rates used to audit phosphorus and toxin budgets.
//!
//! Construction rule: every phosphorus or toxin flux leaving one pool
//! enters another (or a named external sink) using the *same* expression,
//! so the closure invariants hold to roundoff at any state, physical or
//! not. Dissolved-phosphorus recycling is total: mortality, egestion, and
//! stoichiometrically unassimilable ingestion all return to solution.

use serde::{Deserialize, Serialize};

use crate::model::params::ModelParams;
use crate::model::responses::{
    body_burden, depth_averaged_light_factor, droop_growth_rate, grazing_rates, holling2,
    hypoxia_mortality, oxygen_saturation, phosphorus_uptake,
};
use crate::model::state::{LakeState, N_STATE, STATE_NAMES};
use crate::{Error, Result};

/// Instantaneous environment at the simulated time. `light` and `p_in`
/// fall back to the parameterized seasonal light curve and the constant
/// inflow concentration when absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingAt {
    /// Epilimnion water temperature. unit: degC
    pub temperature: f64,
    /// Epilimnion (mixed-layer) depth. unit: m
    pub depth: f64,
    /// Surface irradiance. unit: umol photons/m^2/s
    pub light: Option<f64>,
    /// Inflow phosphorus override. unit: mgP/L
    pub p_in: Option<f64>,
}

/// Provider of forcing along the simulated span.
pub trait Forcing {
    fn at(&self, t: f64) -> ForcingAt;

    /// Covered day-index span, if bounded. `None` means synthetic forcing
    /// defined for all t.
    fn span(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> ForcingAt> Forcing for F {
    fn at(&self, t: f64) -> ForcingAt {
        self(t)
    }
}

pub const N_LEDGER: usize = 7;

pub const LEDGER_NAMES: [&str; N_LEDGER] = [
    "tox_produced",
    "tox_settled",
    "tox_decayed",
    "tox_flushed",
    "p_inflow",
    "p_outflow",
    "p_settled",
];

/// Rates of the cumulative budget ledgers. Integrated alongside the state,
/// so each ledger identity holds pointwise and therefore after any
/// linear-combination step of the integrator.
pub mod ledger {
    pub const TOX_PRODUCED: usize = 0;
    /// Toxin buried with dead consumers (leaves the water column).
    pub const TOX_SETTLED: usize = 1;
    pub const TOX_DECAYED: usize = 2;
    pub const TOX_FLUSHED: usize = 3;
    pub const P_INFLOW: usize = 4;
    pub const P_OUTFLOW: usize = 5;
    pub const P_SETTLED: usize = 6;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub state: [f64; N_STATE],
    pub ledger: [f64; N_LEDGER],
}

impl LakeState {
    /// Total phosphorus across dissolved and living pools. unit: mgP/L
    pub fn total_phosphorus(&self, p: &ModelParams) -> f64 {
        self.phosphorus
            + self.cyano_quota * self.cyano
            + self.algae_quota * self.algae
            + p.daphnia.consumer.theta * self.daphnia
            + p.perch.theta * self.perch
            + p.walleye.theta * self.walleye
    }

    /// Total tracked toxin across dissolved and consumer pools. unit: ug/L
    pub fn total_toxin(&self) -> f64 {
        self.mclr + self.tox_daphnia + self.tox_perch + self.tox_walleye
    }
}

/// Right-hand side of the full system. `params` must have passed
/// validation; `forcing.depth` must be positive.
pub fn rhs(t: f64, s: &LakeState, p: &ModelParams, f: &ForcingAt) -> Result<Derivatives> {
    let z = f.depth;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("epilimnion depth must be positive, got {z} at t = {t}")));
    }
    let temp = f.temperature;
    let nu_z = p.background.exchange_rate / z;
    let i0 = f.light.unwrap_or_else(|| p.background.light.at(t));
    let p_in = f.p_in.unwrap_or(p.background.p_in);

    // Stage states of the integrator are not clamped, so the responses
    // below see sanitized inputs; each flux still uses one shared value on
    // both its source and destination side, keeping the budget identities
    // exact whatever the inputs.
    let k_total =
        (p.background.k_bg + p.cyano.k_shade * s.cyano + p.algae.k_shade * s.algae).max(0.0);
    let mclr_pos = s.mclr.max(0.0);

    // Phytoplankton growth and uptake. Thermal factors assume params were
    // validated; construction cannot fail here.
    let phi_c = p.cyano.cardinal_temps()?.factor(temp);
    let phi_a = p.algae.cardinal_temps()?.factor(temp);
    let light_c = depth_averaged_light_factor(i0, p.cyano.h_light, k_total, z);
    let light_a = depth_averaged_light_factor(i0, p.algae.h_light, k_total, z);
    // Dissolved toxin inhibits growth; gamma defaults to 0 for the producer.
    let mu_c = droop_growth_rate(s.cyano_quota, p.cyano.mu_max, p.cyano.q_min, phi_c, light_c)
        / (1.0 + p.cyano.gamma_inhib * mclr_pos);
    let mu_a = droop_growth_rate(s.algae_quota, p.algae.mu_max, p.algae.q_min, phi_a, light_a)
        / (1.0 + p.algae.gamma_inhib * mclr_pos);
    let uptake_temp_c = if p.uptake_carries_temp { phi_c } else { 1.0 };
    let uptake_temp_a = if p.uptake_carries_temp { phi_a } else { 1.0 };
    let up_c = phosphorus_uptake(s.phosphorus, s.cyano_quota, p.cyano.rho_max, p.cyano.q_min, p.cyano.q_max, p.cyano.k_p)
        * uptake_temp_c;
    let up_a = phosphorus_uptake(s.phosphorus, s.algae_quota, p.algae.rho_max, p.algae.q_min, p.algae.q_max, p.algae.k_p)
        * uptake_temp_a;

    // Daphnia diet: shared saturating response over both prey.
    let dd = &p.daphnia.consumer;
    let (g_c, g_a) = grazing_rates(
        s.cyano.max(0.0),
        s.algae.max(0.0),
        dd.p_max,
        dd.h,
        p.daphnia.pref_cyano,
        p.daphnia.pref_algae,
    );
    let ingest = g_c + g_a;
    // P content of the ingested mix; degenerate diet contributes nothing.
    let q_food = if ingest > 0.0 {
        (g_c * s.cyano_quota + g_a * s.algae_quota) / ingest
    } else {
        0.0
    };
    let phi_d = dd.cardinal_temps()?.factor(temp);
    let liebig = if dd.theta > 0.0 { (q_food / dd.theta).min(1.0) } else { 1.0 };
    // Per-capita carbon growth; prey removal below is NOT thermally scaled,
    // the surplus returns to dissolved P as unassimilated ingestion.
    let growth_d = dd.e * liebig * phi_d * ingest;

    let hyp_d = hypoxia_mortality(s.oxygen, dd.m_hyp, dd.o_crit, dd.hill_n);
    let u_d = body_burden(s.tox_daphnia.max(0.0), s.daphnia);
    let mort_d = dd.m + hyp_d + dd.d_tox * u_d;

    // Perch eat daphnia, walleye eat perch.
    let py = &p.perch;
    let f_y = holling2(s.daphnia.max(0.0), py.p_max, py.h);
    let phi_y = py.cardinal_temps()?.factor(temp);
    let hyp_y = hypoxia_mortality(s.oxygen, py.m_hyp, py.o_crit, py.hill_n);
    let u_y = body_burden(s.tox_perch.max(0.0), s.perch);
    let mort_y = py.m + hyp_y + py.d_tox * u_y;

    let pw = &p.walleye;
    let f_w = holling2(s.perch.max(0.0), pw.p_max, pw.h);
    let phi_w = pw.cardinal_temps()?.factor(temp);
    let hyp_w = hypoxia_mortality(s.oxygen, pw.m_hyp, pw.o_crit, pw.hill_n);
    let u_w = body_burden(s.tox_walleye.max(0.0), s.walleye);
    let mort_w = pw.m + hyp_w + pw.d_tox * u_w;

    // Carbon balances.
    let d_cyano = (mu_c - p.cyano.m - p.cyano.sink_rate / z - nu_z) * s.cyano - g_c * s.daphnia;
    let d_algae = (mu_a - p.algae.m - p.algae.sink_rate / z - nu_z) * s.algae - g_a * s.daphnia;
    let d_daphnia = (growth_d - mort_d) * s.daphnia - f_y * s.perch;
    let d_perch = (py.e * phi_y * f_y - mort_y) * s.perch - f_w * s.walleye;
    let d_walleye = (pw.e * phi_w * f_w - mort_w) * s.walleye;

    // Quota dynamics: uptake minus growth dilution (the same effective
    // growth rate as the biomass equation, so quota * biomass bookkeeping
    // cancels exactly). Frozen for an absent population.
    let d_qc = if s.cyano == 0.0 { 0.0 } else { up_c - mu_c * s.cyano_quota };
    let d_qa = if s.algae == 0.0 { 0.0 } else { up_a - mu_a * s.algae_quota };

    // Dissolved phosphorus: exchange, uptake, and total recycling.
    let recycled_dead = p.cyano.m * s.cyano * s.cyano_quota
        + p.algae.m * s.algae * s.algae_quota
        + mort_d * s.daphnia * dd.theta
        + mort_y * s.perch * py.theta
        + mort_w * s.walleye * pw.theta;
    // Ingested P not fixed into new consumer biomass (egestion plus
    // stoichiometric excess), per consumer.
    let spill_d = (q_food * ingest - dd.theta * growth_d) * s.daphnia;
    let spill_y = (dd.theta - py.theta * py.e * phi_y) * f_y * s.perch;
    let spill_w = (py.theta - pw.theta * pw.e * phi_w) * f_w * s.walleye;
    let d_phosphorus = nu_z * (p_in - s.phosphorus) - up_c * s.cyano - up_a * s.algae
        + recycled_dead
        + spill_d
        + spill_y
        + spill_w;

    // Toxin ledger. Live-cell toxin (q_tox per mgC) is implicit; it enters
    // the tracked pools through leakage, lysis, and grazing.
    let qt = p.toxin.q_tox;
    let tox_graze = g_c * s.daphnia * qt;
    let tox_pred_y = f_y * s.perch * u_d;
    let tox_pred_w = f_w * s.walleye * u_y;
    let aq_d = dd.a_aq * s.mclr * s.daphnia;
    let aq_y = py.a_aq * s.mclr * s.perch;
    let aq_w = pw.a_aq * s.mclr * s.walleye;

    let d_mclr = (p.toxin.leak + p.cyano.m) * qt * s.cyano
        + (1.0 - dd.beta) * tox_graze
        + (1.0 - py.beta) * tox_pred_y
        + (1.0 - pw.beta) * tox_pred_w
        - p.toxin.delta_m * s.mclr
        - nu_z * s.mclr
        - (aq_d + aq_y + aq_w)
        + dd.k_dep * s.tox_daphnia
        + py.k_dep * s.tox_perch
        + pw.k_dep * s.tox_walleye;

    let d_tox_d = dd.beta * tox_graze + aq_d - (dd.k_dep + mort_d) * s.tox_daphnia - tox_pred_y;
    let d_tox_y = py.beta * tox_pred_y + aq_y - (py.k_dep + mort_y) * s.tox_perch - tox_pred_w;
    let d_tox_w = pw.beta * tox_pred_w + aq_w - (pw.k_dep + mort_w) * s.tox_walleye;

    // Oxygen: photosynthesis, respiration, decomposition BOD, reaeration,
    // hydraulic exchange.
    let o_sat = oxygen_saturation(temp)?;
    let ox = &p.oxygen;
    let d_oxygen = ox.alpha_photo * (mu_c * s.cyano + mu_a * s.algae)
        - ox.alpha_resp_cyano * s.cyano
        - ox.alpha_resp_algae * s.algae
        - ox.alpha_resp_daphnia * s.daphnia
        - ox.alpha_resp_perch * s.perch
        - ox.alpha_resp_walleye * s.walleye
        - ox.alpha_bod * p.cyano.m * s.cyano
        + (ox.k_re / z) * (o_sat - s.oxygen)
        + nu_z * (p.background.o_in - s.oxygen);

    let mut ledger_rates = [0.0; N_LEDGER];
    ledger_rates[ledger::TOX_PRODUCED] = (p.toxin.leak + p.cyano.m) * qt * s.cyano + tox_graze;
    ledger_rates[ledger::TOX_SETTLED] =
        mort_d * s.tox_daphnia + mort_y * s.tox_perch + mort_w * s.tox_walleye;
    ledger_rates[ledger::TOX_DECAYED] = p.toxin.delta_m * s.mclr;
    ledger_rates[ledger::TOX_FLUSHED] = nu_z * s.mclr;
    ledger_rates[ledger::P_INFLOW] = nu_z * p_in;
    ledger_rates[ledger::P_OUTFLOW] =
        nu_z * (s.phosphorus + s.cyano_quota * s.cyano + s.algae_quota * s.algae);
    ledger_rates[ledger::P_SETTLED] = (p.cyano.sink_rate / z) * s.cyano_quota * s.cyano
        + (p.algae.sink_rate / z) * s.algae_quota * s.algae;

    let state = [
        d_cyano,
        d_qc,
        d_algae,
        d_qa,
        d_phosphorus,
        d_daphnia,
        d_perch,
        d_walleye,
        d_mclr,
        d_tox_d,
        d_tox_y,
        d_tox_w,
        d_oxygen,
    ];
    for (i, v) in state.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteDerivative {
                component: STATE_NAMES[i],
                time: t,
            });
        }
    }
    for (i, v) in ledger_rates.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteDerivative {
                component: LEDGER_NAMES[i],
                time: t,
            });
        }
    }
    Ok(Derivatives { state, ledger: ledger_rates })
}
