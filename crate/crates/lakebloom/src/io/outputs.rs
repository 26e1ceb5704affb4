//! Result serialization: wide trajectory CSV, tidy plot-data CSVs, JSON
//! reports, and a manifest hashing every emitted file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::model::{Variable, STATE_NAMES};
use crate::scenario::{CellStatus, SweepItem, VulnerabilityGrid};
use crate::sensitivity::SobolResult;
use crate::simulate::Trajectory;
use crate::{Error, Result};

use super::fmt_float;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// An output directory owned by one run. Every file written through it is
/// tracked, so a failed run can remove its partial outputs and a finished
/// run can hash everything into a manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<OutputDir> {
        fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn track(&mut self, name: &str) {
        if !self.written.iter().any(|n| n == name) {
            self.written.push(name.to_string());
        }
    }

    pub fn written_files(&self) -> &[String] {
        &self.written
    }

    /// Remove everything this run wrote (best effort, for error paths).
    pub fn cleanup(&mut self) {
        for name in self.written.drain(..) {
            let _ = fs::remove_file(self.root.join(name));
        }
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.root.join(name), bytes)?;
        self.track(name);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    fn write_csv<F>(&mut self, name: &str, build: F) -> Result<()>
    where
        F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
    {
        let mut writer = csv::Writer::from_writer(Vec::new());
        build(&mut writer)?;
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
        self.write_bytes(name, &bytes)
    }

    /// Wide per-step table: time, the 13 state variables, and the three
    /// derived toxin burdens.
    pub fn write_trajectory_csv(&mut self, name: &str, traj: &Trajectory) -> Result<()> {
        self.write_csv(name, |w| {
            let mut header = vec!["time".to_string()];
            header.extend(STATE_NAMES.iter().map(|s| s.to_string()));
            header.extend(
                ["burden_daphnia", "burden_perch", "burden_walleye"]
                    .iter()
                    .map(|s| s.to_string()),
            );
            w.write_record(&header)?;
            for (i, state) in traj.states.iter().enumerate() {
                let mut record = vec![fmt_float(traj.times[i])];
                record.extend(state.to_array().iter().map(|v| fmt_float(*v)));
                record.push(fmt_float(state.burden_daphnia()));
                record.push(fmt_float(state.burden_perch()));
                record.push(fmt_float(state.burden_walleye()));
                w.write_record(&record)?;
            }
            Ok(())
        })
    }

    /// Tidy multi-curve sweep table keyed by scenario label. Failed items
    /// contribute no rows (their status lives in the JSON report).
    pub fn write_sweep_csv(&mut self, name: &str, items: &[SweepItem]) -> Result<()> {
        self.write_csv(name, |w| {
            w.write_record(["label", "time", "variable", "value"])?;
            for item in items {
                let run = match &item.outcome {
                    Ok(run) => run,
                    Err(_) => continue,
                };
                for (i, state) in run.trajectory.states.iter().enumerate() {
                    let time = fmt_float(run.trajectory.times[i]);
                    for var in Variable::ALL {
                        w.write_record([
                            item.spec.label.as_str(),
                            time.as_str(),
                            var.name(),
                            fmt_float(var.extract(state)).as_str(),
                        ])?;
                    }
                }
            }
            Ok(())
        })
    }

    /// Long-format index table: one row per output day and factor.
    pub fn write_sobol_csv(&mut self, name: &str, result: &SobolResult) -> Result<()> {
        self.write_csv(name, |w| {
            w.write_record(["time", "factor", "s1", "st", "s1_ci", "st_ci"])?;
            for (t_idx, &t) in result.times.iter().enumerate() {
                for (f_idx, factor) in result.factor_names.iter().enumerate() {
                    w.write_record([
                        fmt_float(t).as_str(),
                        factor.as_str(),
                        fmt_float(result.s1[t_idx][f_idx]).as_str(),
                        fmt_float(result.st[t_idx][f_idx]).as_str(),
                        fmt_float(result.s1_ci[t_idx][f_idx]).as_str(),
                        fmt_float(result.st_ci[t_idx][f_idx]).as_str(),
                    ])?;
                }
            }
            Ok(())
        })
    }

    /// Flat grid table: one row per (exchange rate, depth offset, warming)
    /// cell. Cells without a defined index leave the value empty.
    pub fn write_grid_csv(&mut self, name: &str, grid: &VulnerabilityGrid) -> Result<()> {
        self.write_csv(name, |w| {
            w.write_record(["exchange_rate", "depth_offset", "warming", "index", "status"])?;
            for cell in &grid.cells {
                let status = match cell.status {
                    CellStatus::Ok => "ok",
                    CellStatus::UndefinedBase => "undefined_base",
                    CellStatus::Failed => "failed",
                };
                w.write_record([
                    fmt_float(cell.exchange_rate).as_str(),
                    fmt_float(cell.depth_offset).as_str(),
                    fmt_float(cell.warming).as_str(),
                    cell.index.map(fmt_float).unwrap_or_default().as_str(),
                    status,
                ])?;
            }
            Ok(())
        })
    }

    /// Hash every tracked file into `manifest.json`. The manifest itself
    /// and the run metadata stay out of the listing.
    pub fn write_manifest(&mut self) -> Result<()> {
        #[derive(Serialize)]
        struct Entry {
            path: String,
            bytes: u64,
            sha256: String,
        }
        let mut names = self.written.clone();
        names.sort();
        let mut entries = Vec::with_capacity(names.len());
        for name in names {
            let data = fs::read(self.root.join(&name))?;
            entries.push(Entry {
                path: name,
                bytes: data.len() as u64,
                sha256: sha256_hex(&data),
            });
        }
        let manifest = serde_json::json!({ "files": entries });
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(self.root.join("manifest.json"), bytes)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ForcingAt, LakeState, N_LEDGER};

    fn tiny_trajectory() -> Trajectory {
        let mk = |c: f64| LakeState {
            cyano: c,
            cyano_quota: 0.01,
            algae: 0.2,
            algae_quota: 0.015,
            phosphorus: 0.05,
            daphnia: 0.05,
            perch: 0.08,
            walleye: 0.03,
            mclr: 0.5,
            tox_daphnia: 0.01,
            tox_perch: 0.0,
            tox_walleye: 0.0,
            oxygen: 11.0,
        };
        Trajectory {
            times: vec![1.0, 2.0, 3.0],
            states: vec![mk(0.1), mk(0.2), mk(0.3)],
            ledgers: vec![[0.0; N_LEDGER]; 3],
            forcings: vec![
                ForcingAt { temperature: 5.0, depth: 8.0, light: None, p_in: None };
                3
            ],
            dt: 1.0,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn trajectory_csv_has_one_row_per_stored_step() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_trajectory_csv("trajectory.csv", &tiny_trajectory()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("time,cyano,"));
        assert!(header.ends_with("burden_daphnia,burden_perch,burden_walleye"));
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn manifest_lists_hashes_and_repeated_writes_match() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_trajectory_csv("trajectory.csv", &tiny_trajectory()).unwrap();
        out.write_json("metrics.json", &serde_json::json!({"ok": true})).unwrap();
        out.write_manifest().unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        let files = manifest["files"].as_array().unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(files[0]["path"], "metrics.json");
        let hash_a = files[1]["sha256"].as_str().unwrap().to_string();
        assert_eq!(hash_a.len(), 64);

        // Writing the same content again produces the same hash.
        let dir2 = tempfile::tempdir().unwrap();
        let mut out2 = OutputDir::create(dir2.path()).unwrap();
        out2.write_trajectory_csv("trajectory.csv", &tiny_trajectory()).unwrap();
        out2.write_manifest().unwrap();
        let manifest2: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir2.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest2["files"][0]["sha256"].as_str().unwrap(), hash_a);
    }

    #[test]
    fn cleanup_removes_partial_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_bytes("a.csv", b"x").unwrap();
        out.write_bytes("b.json", b"{}").unwrap();
        assert!(dir.path().join("a.csv").exists());
        out.cleanup();
        assert!(!dir.path().join("a.csv").exists());
        assert!(!dir.path().join("b.json").exists());
    }

    #[test]
    fn emitted_csvs_parse_under_a_strict_reader() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_trajectory_csv("trajectory.csv", &tiny_trajectory()).unwrap();
        let mut reader = csv::ReaderBuilder::new()
            .flexible(false)
            .from_path(dir.path().join("trajectory.csv"))
            .unwrap();
        let mut rows = 0;
        for record in reader.records() {
            let record = record.unwrap();
            assert_eq!(record.len(), 17);
            for field in record.iter().skip(1) {
                field.parse::<f64>().unwrap();
            }
            rows += 1;
        }
        assert_eq!(rows, 3);
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
