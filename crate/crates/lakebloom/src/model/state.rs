//! Lake state vector and the named-variable registry used across I/O,
//! calibration, and reporting.

use serde::{Deserialize, Serialize};

use crate::model::responses::body_burden;
use crate::{Error, Result};

pub const N_STATE: usize = 13;

/// Component order inside the flat state vector.
pub mod idx {
    pub const CYANO: usize = 0;
    pub const CYANO_QUOTA: usize = 1;
    pub const ALGAE: usize = 2;
    pub const ALGAE_QUOTA: usize = 3;
    pub const PHOSPHORUS: usize = 4;
    pub const DAPHNIA: usize = 5;
    pub const PERCH: usize = 6;
    pub const WALLEYE: usize = 7;
    pub const MCLR: usize = 8;
    pub const TOX_DAPHNIA: usize = 9;
    pub const TOX_PERCH: usize = 10;
    pub const TOX_WALLEYE: usize = 11;
    pub const OXYGEN: usize = 12;
}

pub const STATE_NAMES: [&str; N_STATE] = [
    "cyano",
    "cyano_quota",
    "algae",
    "algae_quota",
    "phosphorus",
    "daphnia",
    "perch",
    "walleye",
    "mclr",
    "tox_daphnia",
    "tox_perch",
    "tox_walleye",
    "oxygen",
];

/// Epilimnion state. Biomasses are carbon densities (mgC/L), quotas are
/// cell phosphorus content (mgP/mgC), dissolved pools are mgP/L (phosphorus),
/// ug/L (microcystin-LR and consumer toxin loads), and mg/L (oxygen).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LakeState {
    pub cyano: f64,
    pub cyano_quota: f64,
    pub algae: f64,
    pub algae_quota: f64,
    pub phosphorus: f64,
    pub daphnia: f64,
    pub perch: f64,
    pub walleye: f64,
    pub mclr: f64,
    pub tox_daphnia: f64,
    pub tox_perch: f64,
    pub tox_walleye: f64,
    pub oxygen: f64,
}

impl LakeState {
    pub fn to_array(&self) -> [f64; N_STATE] {
        [
            self.cyano,
            self.cyano_quota,
            self.algae,
            self.algae_quota,
            self.phosphorus,
            self.daphnia,
            self.perch,
            self.walleye,
            self.mclr,
            self.tox_daphnia,
            self.tox_perch,
            self.tox_walleye,
            self.oxygen,
        ]
    }

    pub fn from_array(a: &[f64; N_STATE]) -> Self {
        LakeState {
            cyano: a[idx::CYANO],
            cyano_quota: a[idx::CYANO_QUOTA],
            algae: a[idx::ALGAE],
            algae_quota: a[idx::ALGAE_QUOTA],
            phosphorus: a[idx::PHOSPHORUS],
            daphnia: a[idx::DAPHNIA],
            perch: a[idx::PERCH],
            walleye: a[idx::WALLEYE],
            mclr: a[idx::MCLR],
            tox_daphnia: a[idx::TOX_DAPHNIA],
            tox_perch: a[idx::TOX_PERCH],
            tox_walleye: a[idx::TOX_WALLEYE],
            oxygen: a[idx::OXYGEN],
        }
    }

    /// Toxin body burden of daphnia (ug MC-LR per mgC).
    pub fn burden_daphnia(&self) -> f64 {
        body_burden(self.tox_daphnia, self.daphnia)
    }

    pub fn burden_perch(&self) -> f64 {
        body_burden(self.tox_perch, self.perch)
    }

    pub fn burden_walleye(&self) -> f64 {
        body_burden(self.tox_walleye, self.walleye)
    }

    /// All state components must be non-negative.
    pub fn validate(&self) -> Result<()> {
        for (value, name) in self.to_array().iter().zip(STATE_NAMES.iter()) {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("state '{name}' is not finite")));
            }
            if *value < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "state '{name}' is negative ({value})"
                )));
            }
        }
        Ok(())
    }
}

/// Named output/observable quantities: the thirteen state components plus
/// the derived per-carbon toxin burdens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Cyano,
    CyanoQuota,
    Algae,
    AlgaeQuota,
    Phosphorus,
    Daphnia,
    Perch,
    Walleye,
    Mclr,
    ToxDaphnia,
    ToxPerch,
    ToxWalleye,
    Oxygen,
    BurdenDaphnia,
    BurdenPerch,
    BurdenWalleye,
}

impl Variable {
    pub const ALL: [Variable; 16] = [
        Variable::Cyano,
        Variable::CyanoQuota,
        Variable::Algae,
        Variable::AlgaeQuota,
        Variable::Phosphorus,
        Variable::Daphnia,
        Variable::Perch,
        Variable::Walleye,
        Variable::Mclr,
        Variable::ToxDaphnia,
        Variable::ToxPerch,
        Variable::ToxWalleye,
        Variable::Oxygen,
        Variable::BurdenDaphnia,
        Variable::BurdenPerch,
        Variable::BurdenWalleye,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variable::Cyano => "cyano",
            Variable::CyanoQuota => "cyano_quota",
            Variable::Algae => "algae",
            Variable::AlgaeQuota => "algae_quota",
            Variable::Phosphorus => "phosphorus",
            Variable::Daphnia => "daphnia",
            Variable::Perch => "perch",
            Variable::Walleye => "walleye",
            Variable::Mclr => "mclr",
            Variable::ToxDaphnia => "tox_daphnia",
            Variable::ToxPerch => "tox_perch",
            Variable::ToxWalleye => "tox_walleye",
            Variable::Oxygen => "oxygen",
            Variable::BurdenDaphnia => "burden_daphnia",
            Variable::BurdenPerch => "burden_perch",
            Variable::BurdenWalleye => "burden_walleye",
        }
    }

    pub fn parse(s: &str) -> Result<Variable> {
        Variable::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown variable '{s}'")))
    }

    /// Canonical reporting unit. Burdens stay in ug/mgC; multiply by 1e-3
    /// for mg/mgC.
    pub fn unit(&self) -> &'static str {
        match self {
            Variable::Cyano | Variable::Algae | Variable::Daphnia | Variable::Perch | Variable::Walleye => "mgC/L",
            Variable::CyanoQuota | Variable::AlgaeQuota => "mgP/mgC",
            Variable::Phosphorus => "mgP/L",
            Variable::Mclr | Variable::ToxDaphnia | Variable::ToxPerch | Variable::ToxWalleye => "ug/L",
            Variable::Oxygen => "mg/L",
            Variable::BurdenDaphnia | Variable::BurdenPerch | Variable::BurdenWalleye => "ug/mgC",
        }
    }

    /// Accepted unit spellings for observation files.
    pub fn unit_aliases(&self) -> &'static [&'static str] {
        match self {
            Variable::Mclr | Variable::ToxDaphnia | Variable::ToxPerch | Variable::ToxWalleye => {
                &["ug/L", "ppb"]
            }
            Variable::BurdenDaphnia | Variable::BurdenPerch | Variable::BurdenWalleye => &["ug/mgC"],
            Variable::Phosphorus => &["mgP/L"],
            Variable::CyanoQuota | Variable::AlgaeQuota => &["mgP/mgC"],
            Variable::Oxygen => &["mg/L"],
            _ => &["mgC/L"],
        }
    }

    pub fn extract(&self, s: &LakeState) -> f64 {
        match self {
            Variable::Cyano => s.cyano,
            Variable::CyanoQuota => s.cyano_quota,
            Variable::Algae => s.algae,
            Variable::AlgaeQuota => s.algae_quota,
            Variable::Phosphorus => s.phosphorus,
            Variable::Daphnia => s.daphnia,
            Variable::Perch => s.perch,
            Variable::Walleye => s.walleye,
            Variable::Mclr => s.mclr,
            Variable::ToxDaphnia => s.tox_daphnia,
            Variable::ToxPerch => s.tox_perch,
            Variable::ToxWalleye => s.tox_walleye,
            Variable::Oxygen => s.oxygen,
            Variable::BurdenDaphnia => s.burden_daphnia(),
            Variable::BurdenPerch => s.burden_perch(),
            Variable::BurdenWalleye => s.burden_walleye(),
        }
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
