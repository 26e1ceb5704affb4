//! Daily forcing series (water temperature, epilimnion depth, optional
//! surface light and inflow phosphorus) with piecewise-linear
//! interpolation and strict CSV ingestion.

use std::path::Path;

use serde::Serialize;

use crate::calendar;
use crate::model::{Forcing, ForcingAt};
use crate::{Error, Result};

use super::{fmt_float, parse_err};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForcingSample {
    /// Day index on the simulation clock (Jan 1 of the anchor year = 1).
    pub day: f64,
    /// unit: degC
    pub temperature: f64,
    /// Epilimnion depth. unit: m
    pub depth: f64,
    /// Surface irradiance. unit: umol photons / m^2 / s
    pub light: Option<f64>,
    /// Inflow phosphorus concentration. unit: mgP/L
    pub p_in: Option<f64>,
}

/// Sorted forcing samples. Lookups between samples interpolate linearly;
/// lookups beyond either end clamp to the nearest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSeries {
    samples: Vec<ForcingSample>,
    pub anchor_year: i32,
}

impl ForcingSeries {
    pub fn new(samples: Vec<ForcingSample>, anchor_year: i32) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "forcing needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let has_light = samples[0].light.is_some();
        let has_p_in = samples[0].p_in.is_some();
        for (i, s) in samples.iter().enumerate() {
            if !s.day.is_finite() || !s.temperature.is_finite() {
                return Err(Error::Domain(format!("forcing sample {i}: non-finite day or temperature")));
            }
            if !(s.depth.is_finite() && s.depth > 0.0) {
                return Err(Error::Domain(format!(
                    "forcing sample {i}: depth must be positive, got {}",
                    s.depth
                )));
            }
            if i > 0 && s.day <= samples[i - 1].day {
                return Err(Error::Domain(format!(
                    "forcing days must be strictly increasing (sample {i}: {} after {})",
                    s.day,
                    samples[i - 1].day
                )));
            }
            if s.light.is_some() != has_light || s.p_in.is_some() != has_p_in {
                return Err(Error::Domain(format!(
                    "forcing sample {i}: optional columns must be present in every sample or none"
                )));
            }
            for (v, n) in [(s.light, "light"), (s.p_in, "p_in")] {
                if let Some(v) = v {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::Domain(format!("forcing sample {i}: bad {n} value {v}")));
                    }
                }
            }
        }
        Ok(ForcingSeries { samples, anchor_year })
    }

    pub fn samples(&self) -> &[ForcingSample] {
        &self.samples
    }

    /// Map a sample-level transform over the series (scenario machinery).
    pub fn map_samples<F>(&self, f: F) -> Result<ForcingSeries>
    where
        F: Fn(ForcingSample) -> ForcingSample,
    {
        ForcingSeries::new(self.samples.iter().copied().map(f).collect(), self.anchor_year)
    }

    pub fn start(&self) -> f64 {
        self.samples[0].day
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].day
    }

    pub fn covers(&self, t0: f64, t1: f64) -> bool {
        t0 >= self.start() - 1e-9 && t1 <= self.end() + 1e-9
    }

    /// Interpolated values plus a flag telling whether `t` fell outside
    /// the series and was clamped to an end sample.
    pub fn interpolate_checked(&self, t: f64) -> (ForcingAt, bool) {
        let at = |s: &ForcingSample| ForcingAt {
            temperature: s.temperature,
            depth: s.depth,
            light: s.light,
            p_in: s.p_in,
        };
        let pos = self.samples.partition_point(|s| s.day < t);
        if pos == 0 {
            return (at(&self.samples[0]), t < self.samples[0].day);
        }
        if pos >= self.samples.len() {
            return (at(&self.samples[self.samples.len() - 1]), true);
        }
        let (a, b) = (&self.samples[pos - 1], &self.samples[pos]);
        let w = (t - a.day) / (b.day - a.day);
        let lerp = |x: f64, y: f64| x + w * (y - x);
        let lerp_opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (Some(x), Some(y)) => Some(lerp(x, y)),
            _ => None,
        };
        (
            ForcingAt {
                temperature: lerp(a.temperature, b.temperature),
                depth: lerp(a.depth, b.depth),
                light: lerp_opt(a.light, b.light),
                p_in: lerp_opt(a.p_in, b.p_in),
            },
            false,
        )
    }

    pub fn interpolate(&self, t: f64) -> ForcingAt {
        self.interpolate_checked(t).0
    }

    /// Like [`interpolate_checked`](Self::interpolate_checked) but renders
    /// the clamp as a warning message for run logs.
    pub fn interpolate_warned(&self, t: f64) -> (ForcingAt, Option<String>) {
        let (at, clamped) = self.interpolate_checked(t);
        let warning = clamped.then(|| {
            format!(
                "forcing lookup at day {t} outside [{}, {}]; clamped to the nearest sample",
                self.start(),
                self.end()
            )
        });
        (at, warning)
    }
}

impl Forcing for ForcingSeries {
    fn at(&self, t: f64) -> ForcingAt {
        self.interpolate(t)
    }

    fn span(&self) -> Option<(f64, f64)> {
        Some((self.start(), self.end()))
    }
}

const REQUIRED_COLUMNS: [&str; 3] = ["date", "temperature_c", "epilimnion_m"];
const OPTIONAL_COLUMNS: [&str; 2] = ["light_umol_m2_s", "p_in_mgP_L"];

fn column_index(headers: &csv::StringRecord, path: &Path) -> Result<Vec<(String, usize)>> {
    let mut seen = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        let h = h.trim();
        if !REQUIRED_COLUMNS.contains(&h) && !OPTIONAL_COLUMNS.contains(&h) {
            return Err(parse_err(path, 1, format!("unknown column '{h}'")));
        }
        if seen.iter().any(|(name, _)| name == h) {
            return Err(parse_err(path, 1, format!("duplicate column '{h}'")));
        }
        seen.push((h.to_string(), i));
    }
    for required in REQUIRED_COLUMNS {
        if !seen.iter().any(|(name, _)| name == required) {
            return Err(parse_err(path, 1, format!("missing column '{required}'")));
        }
    }
    Ok(seen)
}

/// Load a forcing CSV with header
/// `date,temperature_c,epilimnion_m[,light_umol_m2_s][,p_in_mgP_L]`.
/// Dates are ISO `YYYY-MM-DD` on a 365-day calendar; the first record's
/// year anchors day 1.
pub fn load_forcing(path: &Path) -> Result<ForcingSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let columns = column_index(reader.headers()?, path)?;
    let col = |name: &str| columns.iter().find(|(n, _)| n == name).map(|(_, i)| *i);
    let date_col = col("date").expect("validated");
    let temp_col = col("temperature_c").expect("validated");
    let depth_col = col("epilimnion_m").expect("validated");
    let light_col = col("light_umol_m2_s");
    let p_in_col = col("p_in_mgP_L");

    let mut samples = Vec::new();
    let mut anchor_year = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let field = |idx: usize| -> Result<&str> {
            record
                .get(idx)
                .ok_or_else(|| parse_err(path, line, format!("missing field {}", idx + 1)))
        };
        let number = |idx: usize, name: &str| -> Result<f64> {
            let raw = field(idx)?;
            raw.parse::<f64>()
                .map_err(|_| parse_err(path, line, format!("bad {name} value '{raw}'")))
        };
        let (year, month, day) = calendar::parse_date(field(date_col)?)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        let anchor = *anchor_year.get_or_insert(year);
        let day_index = calendar::date_to_day(year, month, day, anchor);
        if let Some(prev) = samples.last() {
            let prev: &ForcingSample = prev;
            if day_index <= prev.day {
                return Err(parse_err(
                    path,
                    line,
                    format!("dates must be strictly increasing ('{}' repeats or goes backwards)", field(date_col)?),
                ));
            }
        }
        let light = light_col.map(|c| number(c, "light_umol_m2_s")).transpose()?;
        let p_in = p_in_col.map(|c| number(c, "p_in_mgP_L")).transpose()?;
        samples.push(ForcingSample {
            day: day_index,
            temperature: number(temp_col, "temperature_c")?,
            depth: number(depth_col, "epilimnion_m")?,
            light,
            p_in,
        });
    }
    ForcingSeries::new(samples, anchor_year.unwrap_or(2018)).map_err(|e| match e {
        Error::Domain(msg) => parse_err(path, 1, msg),
        other => other,
    })
}

/// Write a series back to the CSV schema accepted by [`load_forcing`].
/// Sample days must be whole (they render as dates).
pub fn write_forcing(path: &Path, series: &ForcingSeries) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let has_light = series.samples()[0].light.is_some();
    let has_p_in = series.samples()[0].p_in.is_some();
    let mut header = vec!["date", "temperature_c", "epilimnion_m"];
    if has_light {
        header.push("light_umol_m2_s");
    }
    if has_p_in {
        header.push("p_in_mgP_L");
    }
    writer.write_record(&header)?;
    for s in series.samples() {
        if (s.day - s.day.round()).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "cannot render fractional day {} as a date",
                s.day
            )));
        }
        let mut record = vec![
            calendar::day_to_date(s.day, series.anchor_year),
            fmt_float(s.temperature),
            fmt_float(s.depth),
        ];
        if let Some(v) = s.light {
            record.push(fmt_float(v));
        }
        if let Some(v) = s.p_in {
            record.push(fmt_float(v));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
