//! Run configuration: one strict JSON document describing the lake, the
//! data files, and the workflow sections. Unknown keys are rejected so
//! typos fail loudly instead of silently running defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibrate::{BoundEntry, FitSettings, Normalization, ParameterBounds};
use crate::model::{LakeState, ModelParams, Variable};
use crate::scenario::{GridSettings, ScenarioSpec};
use crate::sensitivity::SobolDesign;
use crate::simulate::SimulationSettings;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub bounds: Vec<BoundEntry>,
    #[serde(default)]
    pub settings: FitSettings,
    #[serde(default)]
    pub normalization: Normalization,
    /// When present, only observations of these variables enter the
    /// objective (data availability rarely covers the full state).
    #[serde(default)]
    pub variables: Option<Vec<Variable>>,
}

impl FitConfig {
    pub fn parameter_bounds(&self) -> Result<ParameterBounds> {
        ParameterBounds::new(self.bounds.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Human-readable run label echoed into reports.
    pub label: String,
    /// Forcing CSV path, resolved relative to the config file.
    #[serde(default)]
    pub forcing: Option<PathBuf>,
    /// Observation CSV path, resolved relative to the config file.
    #[serde(default)]
    pub observations: Option<PathBuf>,
    /// Full parameter set; omit for model defaults.
    #[serde(default)]
    pub params: ModelParams,
    /// Dotted-path scalar overrides applied on top of `params`.
    #[serde(default)]
    pub param_overrides: BTreeMap<String, f64>,
    pub initial_state: LakeState,
    #[serde(default)]
    pub simulation: SimulationSettings,
    /// Default RNG seed for stochastic workflows; the command line can
    /// override it.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub sobol: Option<SobolDesign>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioSpec>,
    #[serde(default)]
    pub vulnerability: Option<GridSettings>,
}

impl RunConfig {
    /// Parse and validate a config file, resolving data paths relative to
    /// its directory.
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(p) = p.as_mut() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        };
        resolve(&mut config.forcing);
        resolve(&mut config.observations);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.effective_params()?;
        self.initial_state
            .validate()
            .map_err(|e| Error::Config(format!("initial_state: {e}")))?;
        self.simulation.validate()?;
        if let Some(fit) = &self.fit {
            fit.parameter_bounds()?;
            fit.settings.validate(fit.bounds.len())?;
        }
        if let Some(sobol) = &self.sobol {
            sobol.validate()?;
        }
        if let Some(grid) = &self.vulnerability {
            grid.validate()?;
        }
        for (i, spec) in self.scenarios.iter().enumerate() {
            spec.validate()
                .map_err(|e| Error::Config(format!("scenarios[{i}]: {e}")))?;
        }
        Ok(())
    }

    /// Parameters with overrides applied and validated.
    pub fn effective_params(&self) -> Result<ModelParams> {
        let mut params = self.params.clone();
        for (name, value) in &self.param_overrides {
            if !params.set(name, *value) {
                return Err(Error::UnknownParameter(name.clone()));
            }
        }
        params.validate()?;
        Ok(params)
    }

    /// Seed precedence: command line, then config, then the fixed default.
    pub fn effective_seed(&self, cli_seed: Option<u64>) -> u64 {
        cli_seed.or(self.seed).unwrap_or(42)
    }

    pub fn forcing_path(&self) -> Result<&Path> {
        self.forcing
            .as_deref()
            .ok_or_else(|| Error::Config("this workflow needs a 'forcing' file".into()))
    }

    pub fn observations_path(&self) -> Result<&Path> {
        self.observations
            .as_deref()
            .ok_or_else(|| Error::Config("this workflow needs an 'observations' file".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn minimal_config_json() -> serde_json::Value {
        serde_json::json!({
            "label": "test lake",
            "initial_state": {
                "cyano": 0.05, "cyano_quota": 0.01,
                "algae": 0.2, "algae_quota": 0.015,
                "phosphorus": 0.05, "daphnia": 0.05,
                "perch": 0.08, "walleye": 0.03,
                "mclr": 0.0, "tox_daphnia": 0.0,
                "tox_perch": 0.0, "tox_walleye": 0.0,
                "oxygen": 12.0
            }
        })
    }

    fn load(value: &serde_json::Value) -> Result<RunConfig> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(value.to_string().as_bytes()).unwrap();
        f.flush().unwrap();
        RunConfig::from_path(f.path())
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config = load(&minimal_config_json()).unwrap();
        assert_eq!(config.label, "test lake");
        assert_eq!(config.params, ModelParams::default());
        assert_eq!(config.simulation, SimulationSettings::default());
        assert_eq!(config.effective_seed(None), 42);
        assert_eq!(config.effective_seed(Some(7)), 7);
        assert!(config.forcing_path().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected_everywhere() {
        let mut v = minimal_config_json();
        v["volume"] = serde_json::json!(3.5);
        let err = load(&v).unwrap_err();
        assert!(err.to_string().contains("volume"), "{err}");

        let mut v = minimal_config_json();
        v["simulation"] = serde_json::json!({"t0": 1.0, "t9": 2.0});
        assert!(load(&v).is_err());

        let mut v = minimal_config_json();
        v["initial_state"]["cyanobacteria"] = serde_json::json!(1.0);
        assert!(load(&v).is_err());
    }

    #[test]
    fn param_overrides_apply_and_validate() {
        let mut v = minimal_config_json();
        v["param_overrides"] = serde_json::json!({"cyano.mu_max": 1.25});
        let config = load(&v).unwrap();
        assert_eq!(config.effective_params().unwrap().cyano.mu_max, 1.25);

        let mut v = minimal_config_json();
        v["param_overrides"] = serde_json::json!({"cyano.mumax": 1.25});
        let err = load(&v).unwrap_err();
        assert!(matches!(err, Error::UnknownParameter(_)), "{err}");

        // Overrides that break a params invariant fail validation.
        let mut v = minimal_config_json();
        v["param_overrides"] = serde_json::json!({"cyano.q_min": 0.9});
        assert!(load(&v).is_err());
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("forcing.csv"),
            "date,temperature_c,epilimnion_m\n2018-01-01,1.0,8.0\n2018-01-02,1.2,8.0\n",
        )
        .unwrap();
        let mut v = minimal_config_json();
        v["forcing"] = serde_json::json!("forcing.csv");
        let config_path = dir.path().join("run.json");
        std::fs::write(&config_path, v.to_string()).unwrap();
        let config = RunConfig::from_path(&config_path).unwrap();
        assert_eq!(config.forcing_path().unwrap(), dir.path().join("forcing.csv"));
        let series = crate::io::load_forcing(config.forcing_path().unwrap()).unwrap();
        assert_eq!(series.samples().len(), 2);
    }

    #[test]
    fn daphnia_params_round_trip_flat_and_reject_typos() {
        let params = ModelParams::default();
        let text = serde_json::to_string(&params).unwrap();
        assert!(text.contains("pref_cyano"));
        let back: ModelParams = serde_json::from_str(&text).unwrap();
        assert_eq!(params, back);
        // A typo inside the daphnia section must fail despite flattening.
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["daphnia"]["p_maxx"] = serde_json::json!(1.0);
        assert!(serde_json::from_value::<ModelParams>(v).is_err());
    }
}
