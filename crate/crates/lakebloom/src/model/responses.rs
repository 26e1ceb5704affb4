//! Functional responses: thermal limitation, light climate, nutrient
//! uptake, quota-limited growth, grazing, hypoxic mortality, and the
//! oxygen saturation curve.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Below this optical depth the light integral switches to its analytic
/// well-mixed limit.
pub const OPTICAL_DEPTH_FLOOR: f64 = 1e-12;

/// Denominator floor for body burden so the ratio stays finite as a
/// population vanishes.
pub const BURDEN_BIOMASS_FLOOR: f64 = 1e-9;

/// Cardinal temperature window (Rosso-type). Valid windows are ordered and
/// right-skewed: the optimum sits no closer to the lower limit than to the
/// upper one, which keeps the response inside [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardinalTemps {
    t_min: f64,
    t_opt: f64,
    t_max: f64,
}

impl CardinalTemps {
    pub fn new(t_min: f64, t_opt: f64, t_max: f64) -> Result<Self> {
        if !(t_min.is_finite() && t_opt.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidParams("cardinal temperatures must be finite".into()));
        }
        if !(t_min < t_opt && t_opt < t_max) {
            return Err(Error::InvalidParams(format!(
                "cardinal temperatures must satisfy t_min < t_opt < t_max, got {t_min} < {t_opt} < {t_max}"
            )));
        }
        if t_opt - t_min < t_max - t_opt {
            return Err(Error::InvalidParams(format!(
                "cardinal window must be right-skewed (t_opt - t_min >= t_max - t_opt), got {t_min}/{t_opt}/{t_max}"
            )));
        }
        Ok(CardinalTemps { t_min, t_opt, t_max })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_opt(&self) -> f64 {
        self.t_opt
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Thermal limitation factor in [0, 1]: zero outside the window, one
    /// exactly at the optimum.
    pub fn factor(&self, t: f64) -> f64 {
        if !t.is_finite() || t <= self.t_min || t >= self.t_max {
            return 0.0;
        }
        if t == self.t_opt {
            return 1.0;
        }
        let a = self.t_opt - self.t_min;
        let num = (t - self.t_max) * (t - self.t_min) * (t - self.t_min);
        let den = a * (a * (t - self.t_opt) - (self.t_opt - self.t_max) * (self.t_opt + self.t_min - 2.0 * t));
        (num / den).clamp(0.0, 1.0)
    }
}

/// Depth-averaged light limitation of a water column of depth `z` under
/// exponential extinction with total attenuation `k_total` and a Monod
/// response with half-saturation `h`:
///
///   (1 / (k z)) * ln((h + i0) / (h + i0 exp(-k z)))
///
/// For vanishing optical depth this tends to the surface Monod factor
/// i0 / (h + i0), which is used below [`OPTICAL_DEPTH_FLOOR`].
pub fn depth_averaged_light_factor(i0: f64, h: f64, k_total: f64, z: f64) -> f64 {
    debug_assert!(i0 >= 0.0 && h > 0.0 && k_total >= 0.0 && z > 0.0);
    let kz = k_total * z;
    if kz < OPTICAL_DEPTH_FLOOR {
        return i0 / (h + i0);
    }
    ((h + i0) / (h + i0 * (-kz).exp())).ln() / kz
}

/// Droop growth: mu_max * temp * (1 - q_min / q) * light. Zero at the
/// subsistence quota, saturating toward mu_max as the quota fills. Quotas
/// below the subsistence value (transient integrator stages) also give
/// zero rather than a negative or unbounded rate.
pub fn droop_growth_rate(q: f64, mu_max: f64, q_min: f64, temp_factor: f64, light_factor: f64) -> f64 {
    mu_max * temp_factor * (1.0 - q_min / q.max(q_min)) * light_factor
}

/// Phosphorus uptake shut off linearly as the quota approaches its storage
/// ceiling, Monod in dissolved phosphorus. Total in both arguments: the
/// quota term is clamped to [0, 1] and negative dissolved phosphorus takes
/// no uptake.
pub fn phosphorus_uptake(p: f64, q: f64, rho_max: f64, q_min: f64, q_max: f64, k_p: f64) -> f64 {
    let pp = p.max(0.0);
    rho_max * ((q_max - q) / (q_max - q_min)).clamp(0.0, 1.0) * (pp / (k_p + pp))
}

/// Per-capita daphnia ingestion of each prey under a shared saturating
/// functional response with diet preference weights. The two rates sum to
/// strictly less than `p_max` for finite prey densities.
pub fn grazing_rates(
    cyano: f64,
    algae: f64,
    p_max: f64,
    h: f64,
    pref_cyano: f64,
    pref_algae: f64,
) -> (f64, f64) {
    let den = h + pref_cyano * cyano + pref_algae * algae;
    (
        p_max * pref_cyano * cyano / den,
        p_max * pref_algae * algae / den,
    )
}

/// Single-prey saturating ingestion.
pub fn holling2(prey: f64, p_max: f64, h: f64) -> f64 {
    p_max * prey / (h + prey)
}

/// Extra mortality under low oxygen, a decreasing Hill response:
/// m_hyp * o_crit^n / (o_crit^n + o^n).
pub fn hypoxia_mortality(o: f64, m_hyp: f64, o_crit: f64, n: f64) -> f64 {
    let on = o.max(0.0).powf(n);
    let cn = o_crit.powf(n);
    m_hyp * cn / (cn + on)
}

/// Toxin body burden (ug per mgC), floored in the denominator so the ratio
/// stays defined as a population goes extinct.
pub fn body_burden(tox_pool: f64, biomass: f64) -> f64 {
    tox_pool / biomass.max(BURDEN_BIOMASS_FLOOR)
}

/// Freshwater oxygen saturation (mg/L) against temperature (degC), cubic
/// fit valid on [0, 40]; calls outside [-1, 45] are refused.
pub fn oxygen_saturation(t: f64) -> Result<f64> {
    if !t.is_finite() || !(-1.0..=45.0).contains(&t) {
        return Err(Error::Domain(format!(
            "oxygen saturation is defined for temperatures in [-1, 45] degC, got {t}"
        )));
    }
    Ok(14.652 + t * (-0.41022 + t * (0.0079910 + t * (-0.000077774))))
}
