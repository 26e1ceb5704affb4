//! Model parameters: rate constants, stoichiometry, thermal windows.
//!
//! Defaults describe a north-temperate eutrophic lake and were assembled
//! from published ranges for Microcystis-type cyanobacteria, mixed
//! eukaryotic algae, Daphnia, yellow perch, and walleye. They are a
//! starting point for calibration, not a fitted set.

use serde::{Deserialize, Serialize};

use crate::model::responses::CardinalTemps;
use crate::{Error, Result};

/// One phytoplankton guild with a dynamic phosphorus quota.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhytoParams {
    /// Maximum specific growth rate at optimal temperature and saturating
    /// light and quota. unit: 1/day
    pub mu_max: f64,
    /// Subsistence phosphorus quota; growth stops here. unit: mgP/mgC
    pub q_min: f64,
    /// Storage ceiling for the phosphorus quota. unit: mgP/mgC
    pub q_max: f64,
    /// Maximum phosphorus uptake rate at empty storage. unit: mgP/mgC/day
    pub rho_max: f64,
    /// Half-saturation of dissolved phosphorus for uptake. unit: mgP/L
    pub k_p: f64,
    /// Half-saturation light intensity. unit: umol photons/m^2/s
    pub h_light: f64,
    /// Self-shading contribution to light attenuation. unit: L/mgC/m
    pub k_shade: f64,
    /// Background specific loss (lysis, senescence). unit: 1/day
    pub m: f64,
    /// Lower thermal limit for growth. unit: degC
    pub t_min: f64,
    /// Thermal optimum. unit: degC
    pub t_opt: f64,
    /// Upper thermal limit. unit: degC
    pub t_max: f64,
    /// Settling out of the epilimnion. Zero for buoyancy-regulating
    /// cyanobacteria. unit: m/day
    pub sink_rate: f64,
    /// Growth inhibition by dissolved MC-LR, as 1/(1 + gamma * M).
    /// Zero for the toxin producer itself. unit: L/ug
    pub gamma_inhib: f64,
}

/// A consumer compartment (grazer or fish).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerParams {
    /// Maximum specific ingestion rate. unit: mgC prey/mgC/day
    pub p_max: f64,
    /// Half-saturation prey density. unit: mgC/L
    pub h: f64,
    /// Gross growth efficiency on ingested carbon. unit: dimensionless in [0, 1]
    pub e: f64,
    /// Fixed body phosphorus:carbon ratio. unit: mgP/mgC
    pub theta: f64,
    /// Background specific mortality. unit: 1/day
    pub m: f64,
    /// Lower thermal limit for assimilation. unit: degC
    pub t_min: f64,
    /// Thermal optimum. unit: degC
    pub t_opt: f64,
    /// Upper thermal limit. unit: degC
    pub t_max: f64,
    /// Maximum extra mortality under anoxia. unit: 1/day
    pub m_hyp: f64,
    /// Oxygen level of half-maximal hypoxic mortality. unit: mg/L
    pub o_crit: f64,
    /// Hill exponent of the hypoxic mortality response. unit: dimensionless
    pub hill_n: f64,
    /// Extra mortality per unit toxin body burden. unit: mgC/ug/day
    pub d_tox: f64,
    /// Aqueous MC-LR uptake (gill/surface exposure). unit: L/mgC/day
    pub a_aq: f64,
    /// Fraction of dietary toxin absorbed; the rest is egested back to the
    /// dissolved pool. unit: dimensionless in [0, 1]
    pub beta: f64,
    /// Toxin depuration back to the dissolved pool. unit: 1/day
    pub k_dep: f64,
}

/// Daphnia: the only consumer with a two-prey diet.
///
/// Serialized flat: the consumer fields and the preference weights share
/// one map, and unknown keys are rejected (via the mirror struct below,
/// since serde's `flatten` cannot enforce that itself).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "DaphniaFlat", into = "DaphniaFlat")]
pub struct DaphniaParams {
    pub consumer: ConsumerParams,
    /// Diet preference weight for cyanobacteria. unit: dimensionless in [0, 1]
    pub pref_cyano: f64,
    /// Diet preference weight for algae. unit: dimensionless in [0, 1]
    pub pref_algae: f64,
}

/// The serialized shape of [`DaphniaParams`]: every consumer field plus
/// the two preferences in one strict map. Must list exactly the fields of
/// [`ConsumerParams`]; the round-trip test guards against drift.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename = "DaphniaParams")]
struct DaphniaFlat {
    p_max: f64,
    h: f64,
    e: f64,
    theta: f64,
    m: f64,
    t_min: f64,
    t_opt: f64,
    t_max: f64,
    m_hyp: f64,
    o_crit: f64,
    hill_n: f64,
    d_tox: f64,
    a_aq: f64,
    beta: f64,
    k_dep: f64,
    pref_cyano: f64,
    pref_algae: f64,
}

impl From<DaphniaFlat> for DaphniaParams {
    fn from(f: DaphniaFlat) -> Self {
        DaphniaParams {
            consumer: ConsumerParams {
                p_max: f.p_max,
                h: f.h,
                e: f.e,
                theta: f.theta,
                m: f.m,
                t_min: f.t_min,
                t_opt: f.t_opt,
                t_max: f.t_max,
                m_hyp: f.m_hyp,
                o_crit: f.o_crit,
                hill_n: f.hill_n,
                d_tox: f.d_tox,
                a_aq: f.a_aq,
                beta: f.beta,
                k_dep: f.k_dep,
            },
            pref_cyano: f.pref_cyano,
            pref_algae: f.pref_algae,
        }
    }
}

impl From<DaphniaParams> for DaphniaFlat {
    fn from(d: DaphniaParams) -> Self {
        let c = d.consumer;
        DaphniaFlat {
            p_max: c.p_max,
            h: c.h,
            e: c.e,
            theta: c.theta,
            m: c.m,
            t_min: c.t_min,
            t_opt: c.t_opt,
            t_max: c.t_max,
            m_hyp: c.m_hyp,
            o_crit: c.o_crit,
            hill_n: c.hill_n,
            d_tox: c.d_tox,
            a_aq: c.a_aq,
            beta: c.beta,
            k_dep: c.k_dep,
            pref_cyano: d.pref_cyano,
            pref_algae: d.pref_algae,
        }
    }
}

/// Seasonal surface irradiance when the forcing file carries no light
/// column: mean + amplitude * cos(2 pi (doy - peak_doy) / 365), floored at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceLight {
    /// unit: umol photons/m^2/s
    pub mean: f64,
    /// unit: umol photons/m^2/s
    pub amplitude: f64,
    /// Day of year of peak irradiance. unit: day
    pub peak_doy: f64,
}

impl SurfaceLight {
    pub fn at(&self, t: f64) -> f64 {
        let doy = crate::calendar::day_of_year(t);
        let phase = 2.0 * std::f64::consts::PI * (doy - self.peak_doy) / crate::calendar::DAYS_PER_YEAR;
        (self.mean + self.amplitude * phase.cos()).max(0.0)
    }
}

/// Abiotic setting of the lake and its exchange with the catchment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundParams {
    /// Light attenuation of water plus non-phytoplankton matter. unit: 1/m
    pub k_bg: f64,
    /// Hydraulic exchange velocity with inflow/outflow. unit: m/day
    pub exchange_rate: f64,
    /// Inflow dissolved phosphorus. unit: mgP/L
    pub p_in: f64,
    /// Inflow dissolved oxygen. unit: mg/L
    pub o_in: f64,
    pub light: SurfaceLight,
}

/// Toxin production and fate constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToxinParams {
    /// Fixed MC-LR content of live cyanobacterial cells. unit: ug/mgC
    pub q_tox: f64,
    /// Leakage of cell toxin from live cells into solution. unit: 1/day
    pub leak: f64,
    /// Decay of dissolved MC-LR (photolysis + biodegradation). unit: 1/day
    pub delta_m: f64,
}

/// Oxygen budget constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OxygenParams {
    /// Photosynthetic oxygen yield per carbon fixed. unit: mgO2/mgC
    pub alpha_photo: f64,
    /// Respiration demand per compartment. unit: mgO2/mgC/day
    pub alpha_resp_cyano: f64,
    pub alpha_resp_algae: f64,
    pub alpha_resp_daphnia: f64,
    pub alpha_resp_perch: f64,
    pub alpha_resp_walleye: f64,
    /// Biochemical oxygen demand of decomposing dead cyanobacteria.
    /// unit: mgO2/mgC
    pub alpha_bod: f64,
    /// Surface reaeration piston velocity. unit: m/day
    pub k_re: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub cyano: PhytoParams,
    pub algae: PhytoParams,
    pub daphnia: DaphniaParams,
    pub perch: ConsumerParams,
    pub walleye: ConsumerParams,
    pub toxin: ToxinParams,
    pub oxygen: OxygenParams,
    pub background: BackgroundParams,
    /// When true, phosphorus uptake carries the same thermal factor as
    /// growth; when false only growth is temperature-limited.
    pub uptake_carries_temp: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            cyano: PhytoParams {
                mu_max: 1.15,
                q_min: 0.006,
                q_max: 0.04,
                rho_max: 0.05,
                k_p: 0.02,
                h_light: 40.0,
                k_shade: 0.30,
                m: 0.08,
                t_min: 4.0,
                t_opt: 28.0,
                t_max: 40.0,
                sink_rate: 0.0,
                gamma_inhib: 0.0,
            },
            algae: PhytoParams {
                mu_max: 1.2,
                q_min: 0.004,
                q_max: 0.018,
                rho_max: 0.05,
                k_p: 0.015,
                h_light: 120.0,
                k_shade: 0.25,
                m: 0.10,
                t_min: 0.0,
                t_opt: 18.0,
                t_max: 32.0,
                sink_rate: 0.40,
                gamma_inhib: 0.02,
            },
            daphnia: DaphniaParams {
                consumer: ConsumerParams {
                    p_max: 0.8,
                    h: 0.5,
                    e: 0.6,
                    theta: 0.03,
                    m: 0.03,
                    t_min: 1.0,
                    t_opt: 21.0,
                    t_max: 31.0,
                    m_hyp: 0.3,
                    o_crit: 2.0,
                    hill_n: 4.0,
                    d_tox: 0.5,
                    a_aq: 0.01,
                    beta: 0.4,
                    k_dep: 0.10,
                },
                pref_cyano: 1.0,
                pref_algae: 1.0,
            },
            perch: ConsumerParams {
                p_max: 0.10,
                h: 0.8,
                e: 0.35,
                theta: 0.03,
                m: 0.01,
                t_min: 5.0,
                t_opt: 25.0,
                t_max: 33.0,
                m_hyp: 0.25,
                o_crit: 3.0,
                hill_n: 6.0,
                d_tox: 0.005,
                a_aq: 0.002,
                beta: 0.4,
                k_dep: 0.25,
            },
            walleye: ConsumerParams {
                p_max: 0.1,
                h: 0.2,
                e: 0.35,
                theta: 0.03,
                m: 0.005,
                t_min: 4.0,
                t_opt: 23.0,
                t_max: 30.0,
                m_hyp: 0.3,
                o_crit: 3.5,
                hill_n: 6.0,
                d_tox: 0.005,
                a_aq: 0.003,
                beta: 0.8,
                k_dep: 0.0,
            },
            toxin: ToxinParams {
                q_tox: 2.0,
                leak: 0.02,
                delta_m: 0.05,
            },
            oxygen: OxygenParams {
                alpha_photo: 2.67,
                alpha_resp_cyano: 0.0,
                alpha_resp_algae: 0.0,
                alpha_resp_daphnia: 0.4,
                alpha_resp_perch: 0.08,
                alpha_resp_walleye: 0.08,
                alpha_bod: 3.5,
                k_re: 0.5,
            },
            background: BackgroundParams {
                k_bg: 0.5,
                exchange_rate: 0.05,
                // Below the spring pool: through-flow drains phosphorus on
                // net, so flushing and stratification depth trade off
                // against each other instead of both feeding the bloom.
                p_in: 0.01,
                o_in: 8.0,
                light: SurfaceLight {
                    mean: 350.0,
                    amplitude: 250.0,
                    peak_doy: 172.0,
                },
            },
            uptake_carries_temp: false,
        }
    }
}

fn check_nonneg(value: f64, name: &str) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidParams(format!(
            "{name} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

fn check_fraction(value: f64, name: &str) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParams(format!(
            "{name} must lie in [0, 1], got {value}"
        )));
    }
    Ok(())
}

impl PhytoParams {
    pub fn cardinal_temps(&self) -> Result<CardinalTemps> {
        CardinalTemps::new(self.t_min, self.t_opt, self.t_max)
    }

    fn validate(&self, who: &str) -> Result<()> {
        self.cardinal_temps()
            .map_err(|e| Error::InvalidParams(format!("{who}: {e}")))?;
        for (v, n) in [
            (self.mu_max, "mu_max"),
            (self.rho_max, "rho_max"),
            (self.k_shade, "k_shade"),
            (self.m, "m"),
            (self.sink_rate, "sink_rate"),
            (self.gamma_inhib, "gamma_inhib"),
        ] {
            check_nonneg(v, &format!("{who}.{n}"))?;
        }
        for (v, n) in [(self.k_p, "k_p"), (self.h_light, "h_light")] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{who}.{n} must be positive")));
            }
        }
        if !(self.q_min > 0.0 && self.q_min < self.q_max) {
            return Err(Error::InvalidParams(format!(
                "{who}: quota window requires 0 < q_min < q_max (got {} .. {})",
                self.q_min, self.q_max
            )));
        }
        Ok(())
    }
}

impl ConsumerParams {
    pub fn cardinal_temps(&self) -> Result<CardinalTemps> {
        CardinalTemps::new(self.t_min, self.t_opt, self.t_max)
    }

    fn validate(&self, who: &str) -> Result<()> {
        self.cardinal_temps()
            .map_err(|e| Error::InvalidParams(format!("{who}: {e}")))?;
        for (v, n) in [
            (self.p_max, "p_max"),
            (self.theta, "theta"),
            (self.m, "m"),
            (self.m_hyp, "m_hyp"),
            (self.d_tox, "d_tox"),
            (self.a_aq, "a_aq"),
            (self.k_dep, "k_dep"),
        ] {
            check_nonneg(v, &format!("{who}.{n}"))?;
        }
        for (v, n) in [
            (self.h, "h"),
            (self.o_crit, "o_crit"),
            (self.hill_n, "hill_n"),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{who}.{n} must be positive")));
            }
        }
        check_fraction(self.e, &format!("{who}.e"))?;
        check_fraction(self.beta, &format!("{who}.beta"))?;
        Ok(())
    }
}

impl ModelParams {
    /// Full range/ordering validation. Called once on entry to every
    /// workflow; the right-hand side assumes it has passed.
    pub fn validate(&self) -> Result<()> {
        self.cyano.validate("cyano")?;
        self.algae.validate("algae")?;
        self.daphnia.consumer.validate("daphnia")?;
        check_fraction(self.daphnia.pref_cyano, "daphnia.pref_cyano")?;
        check_fraction(self.daphnia.pref_algae, "daphnia.pref_algae")?;
        self.perch.validate("perch")?;
        self.walleye.validate("walleye")?;
        if self.walleye.k_dep != 0.0 {
            return Err(Error::InvalidParams(
                "walleye.k_dep is fixed at 0 (no depuration in the top predator)".into(),
            ));
        }
        for (v, n) in [
            (self.toxin.q_tox, "toxin.q_tox"),
            (self.toxin.leak, "toxin.leak"),
            (self.toxin.delta_m, "toxin.delta_m"),
            (self.oxygen.alpha_photo, "oxygen.alpha_photo"),
            (self.oxygen.alpha_resp_cyano, "oxygen.alpha_resp_cyano"),
            (self.oxygen.alpha_resp_algae, "oxygen.alpha_resp_algae"),
            (self.oxygen.alpha_resp_daphnia, "oxygen.alpha_resp_daphnia"),
            (self.oxygen.alpha_resp_perch, "oxygen.alpha_resp_perch"),
            (self.oxygen.alpha_resp_walleye, "oxygen.alpha_resp_walleye"),
            (self.oxygen.alpha_bod, "oxygen.alpha_bod"),
            (self.oxygen.k_re, "oxygen.k_re"),
            (self.background.k_bg, "background.k_bg"),
            (self.background.exchange_rate, "background.exchange_rate"),
            (self.background.p_in, "background.p_in"),
            (self.background.o_in, "background.o_in"),
            (self.background.light.mean, "background.light.mean"),
            (self.background.light.amplitude, "background.light.amplitude"),
        ] {
            check_nonneg(v, n)?;
        }
        Ok(())
    }
}

macro_rules! param_table {
    ($(($name:literal, $($path:tt)+)),+ $(,)?) => {
        impl ModelParams {
            /// Read one scalar by its dotted path.
            pub fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $($name => Some(self.$($path)+),)+
                    _ => None,
                }
            }

            /// Write one scalar by its dotted path. Returns false for an
            /// unknown name.
            pub fn set(&mut self, name: &str, value: f64) -> bool {
                match name {
                    $($name => { self.$($path)+ = value; true })+
                    _ => false,
                }
            }

            /// Every addressable scalar parameter name.
            pub fn names() -> &'static [&'static str] {
                &[$($name),+]
            }
        }
    };
}

param_table![
    ("cyano.mu_max", cyano.mu_max),
    ("cyano.q_min", cyano.q_min),
    ("cyano.q_max", cyano.q_max),
    ("cyano.rho_max", cyano.rho_max),
    ("cyano.k_p", cyano.k_p),
    ("cyano.h_light", cyano.h_light),
    ("cyano.k_shade", cyano.k_shade),
    ("cyano.m", cyano.m),
    ("cyano.t_min", cyano.t_min),
    ("cyano.t_opt", cyano.t_opt),
    ("cyano.t_max", cyano.t_max),
    ("cyano.sink_rate", cyano.sink_rate),
    ("cyano.gamma_inhib", cyano.gamma_inhib),
    ("algae.mu_max", algae.mu_max),
    ("algae.q_min", algae.q_min),
    ("algae.q_max", algae.q_max),
    ("algae.rho_max", algae.rho_max),
    ("algae.k_p", algae.k_p),
    ("algae.h_light", algae.h_light),
    ("algae.k_shade", algae.k_shade),
    ("algae.m", algae.m),
    ("algae.t_min", algae.t_min),
    ("algae.t_opt", algae.t_opt),
    ("algae.t_max", algae.t_max),
    ("algae.sink_rate", algae.sink_rate),
    ("algae.gamma_inhib", algae.gamma_inhib),
    ("daphnia.p_max", daphnia.consumer.p_max),
    ("daphnia.h", daphnia.consumer.h),
    ("daphnia.e", daphnia.consumer.e),
    ("daphnia.theta", daphnia.consumer.theta),
    ("daphnia.m", daphnia.consumer.m),
    ("daphnia.t_min", daphnia.consumer.t_min),
    ("daphnia.t_opt", daphnia.consumer.t_opt),
    ("daphnia.t_max", daphnia.consumer.t_max),
    ("daphnia.m_hyp", daphnia.consumer.m_hyp),
    ("daphnia.o_crit", daphnia.consumer.o_crit),
    ("daphnia.hill_n", daphnia.consumer.hill_n),
    ("daphnia.d_tox", daphnia.consumer.d_tox),
    ("daphnia.a_aq", daphnia.consumer.a_aq),
    ("daphnia.beta", daphnia.consumer.beta),
    ("daphnia.k_dep", daphnia.consumer.k_dep),
    ("daphnia.pref_cyano", daphnia.pref_cyano),
    ("daphnia.pref_algae", daphnia.pref_algae),
    ("perch.p_max", perch.p_max),
    ("perch.h", perch.h),
    ("perch.e", perch.e),
    ("perch.theta", perch.theta),
    ("perch.m", perch.m),
    ("perch.t_min", perch.t_min),
    ("perch.t_opt", perch.t_opt),
    ("perch.t_max", perch.t_max),
    ("perch.m_hyp", perch.m_hyp),
    ("perch.o_crit", perch.o_crit),
    ("perch.hill_n", perch.hill_n),
    ("perch.d_tox", perch.d_tox),
    ("perch.a_aq", perch.a_aq),
    ("perch.beta", perch.beta),
    ("perch.k_dep", perch.k_dep),
    ("walleye.p_max", walleye.p_max),
    ("walleye.h", walleye.h),
    ("walleye.e", walleye.e),
    ("walleye.theta", walleye.theta),
    ("walleye.m", walleye.m),
    ("walleye.t_min", walleye.t_min),
    ("walleye.t_opt", walleye.t_opt),
    ("walleye.t_max", walleye.t_max),
    ("walleye.m_hyp", walleye.m_hyp),
    ("walleye.o_crit", walleye.o_crit),
    ("walleye.hill_n", walleye.hill_n),
    ("walleye.d_tox", walleye.d_tox),
    ("walleye.a_aq", walleye.a_aq),
    ("walleye.beta", walleye.beta),
    ("walleye.k_dep", walleye.k_dep),
    ("toxin.q_tox", toxin.q_tox),
    ("toxin.leak", toxin.leak),
    ("toxin.delta_m", toxin.delta_m),
    ("oxygen.alpha_photo", oxygen.alpha_photo),
    ("oxygen.alpha_resp_cyano", oxygen.alpha_resp_cyano),
    ("oxygen.alpha_resp_algae", oxygen.alpha_resp_algae),
    ("oxygen.alpha_resp_daphnia", oxygen.alpha_resp_daphnia),
    ("oxygen.alpha_resp_perch", oxygen.alpha_resp_perch),
    ("oxygen.alpha_resp_walleye", oxygen.alpha_resp_walleye),
    ("oxygen.alpha_bod", oxygen.alpha_bod),
    ("oxygen.k_re", oxygen.k_re),
    ("background.k_bg", background.k_bg),
    ("background.exchange_rate", background.exchange_rate),
    ("background.p_in", background.p_in),
    ("background.o_in", background.o_in),
    ("background.light.mean", background.light.mean),
    ("background.light.amplitude", background.light.amplitude),
    ("background.light.peak_doy", background.light.peak_doy),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ModelParams::default().validate().unwrap();
    }

    #[test]
    fn bad_cardinal_ordering_rejected() {
        let mut p = ModelParams::default();
        p.cyano.t_opt = p.cyano.t_max + 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn walleye_depuration_pinned_to_zero() {
        let mut p = ModelParams::default();
        p.walleye.k_dep = 0.01;
        assert!(p.validate().is_err());
    }

    #[test]
    fn name_table_round_trips_every_entry() {
        let mut p = ModelParams::default();
        for (i, name) in ModelParams::names().iter().enumerate() {
            let probe = 0.125 + i as f64; // exactly representable
            assert!(p.set(name, probe), "{name}");
            assert_eq!(p.get(name), Some(probe), "{name}");
        }
        assert_eq!(p.get("cyano.nonexistent"), None);
        assert!(!p.set("fish.p_max", 1.0));
    }

    #[test]
    fn quota_window_must_be_ordered() {
        let mut p = ModelParams::default();
        p.algae.q_min = p.algae.q_max;
        assert!(p.validate().is_err());
    }

    #[test]
    fn surface_light_peaks_at_peak_doy_and_stays_nonnegative() {
        let l = SurfaceLight {
            mean: 300.0,
            amplitude: 400.0,
            peak_doy: 172.0,
        };
        assert!((l.at(172.0) - 700.0).abs() < 1e-9);
        let mut min = f64::INFINITY;
        for d in 0..3650 {
            min = min.min(l.at(d as f64 / 10.0));
        }
        assert!(min >= 0.0);
    }
}
