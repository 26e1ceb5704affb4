//! Simulation and analysis engine for toxic cyanobacterial bloom dynamics
//! in north-temperate lakes.
//!
//! The crate couples a stoichiometric food-web model (two phytoplankton
//! guilds with dynamic phosphorus quotas, a grazer, two fish trophic
//! levels, dissolved microcystin-LR with bioaccumulation, and epilimnetic
//! oxygen) to a fixed-step integrator, a differential-evolution calibrator,
//! time-dependent Sobol sensitivity analysis, and climate/nutrient
//! scenario sweeps with lake vulnerability indices.

pub mod calendar;
pub mod calibrate;
pub mod cli;
pub mod error;
pub mod io;
pub mod model;
pub mod scenario;
pub mod sensitivity;
pub mod simulate;

pub use error::{Error, Result};
