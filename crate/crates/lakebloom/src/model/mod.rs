//! Stoichiometric food-web model of a stratified lake epilimnion.
//!
//! Two phytoplankton guilds (toxin-producing cyanobacteria and edible
//! algae) compete for phosphorus under Droop quota kinetics, self-shaded
//! light, and cardinal-temperature windows; daphnia graze both guilds,
//! yellow perch eat daphnia, walleye eat perch. Dissolved microcystin-LR
//! is produced by the cyanobacteria and moves through the food chain by
//! dietary absorption and aqueous uptake. Oxygen follows photosynthesis,
//! respiration, decomposition, reaeration, and hydraulic exchange.

mod params;
mod responses;
mod rhs;
mod state;

pub use params::{
    BackgroundParams, ConsumerParams, DaphniaParams, ModelParams, OxygenParams, PhytoParams,
    SurfaceLight, ToxinParams,
};
pub use responses::{
    body_burden, depth_averaged_light_factor, droop_growth_rate, grazing_rates, holling2,
    hypoxia_mortality, oxygen_saturation, phosphorus_uptake, CardinalTemps,
    BURDEN_BIOMASS_FLOOR, OPTICAL_DEPTH_FLOOR,
};
pub use rhs::{ledger, rhs, Derivatives, Forcing, ForcingAt, LEDGER_NAMES, N_LEDGER};
pub use state::{idx, LakeState, Variable, N_STATE, STATE_NAMES};
