//! Day-index calendar: 365-day years, no leap handling.
//!
//! Time inside the engine is a continuous day index `t` where `t = 1.0` is
//! Jan 1 of the anchor year. Dates in I/O files are converted on ingestion.

use crate::{Error, Result};

pub const DAYS_PER_YEAR: f64 = 365.0;

/// Warm season: May 1 through Sep 30 (day-of-year, inclusive).
pub const WARM_SEASON_START: f64 = 121.0;
pub const WARM_SEASON_END: f64 = 273.0;

const MONTH_DAYS: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Day-of-year in [1, 366) for a continuous day index.
pub fn day_of_year(t: f64) -> f64 {
    (t - 1.0).rem_euclid(DAYS_PER_YEAR) + 1.0
}

pub fn in_warm_season(t: f64) -> bool {
    let doy = day_of_year(t);
    (WARM_SEASON_START..=WARM_SEASON_END).contains(&doy)
}

/// Day-of-year of the first day of `month` (1-based).
pub fn month_start_doy(month: u32) -> f64 {
    let mut doy = 1u32;
    for m in MONTH_DAYS.iter().take(month as usize - 1) {
        doy += m;
    }
    doy as f64
}

/// First-of-month output grid for May through October.
pub fn monthly_output_days() -> Vec<f64> {
    (5..=10).map(month_start_doy).collect()
}

/// Parse `YYYY-MM-DD`. Feb 29 is rejected: the engine runs on 365-day years.
pub fn parse_date(s: &str) -> Result<(i32, u32, u32)> {
    let err = |msg: &str| Error::Domain(format!("date '{s}': {msg}"));
    let parts: Vec<&str> = s.trim().split('-').collect();
    if parts.len() != 3 {
        return Err(err("expected YYYY-MM-DD"));
    }
    let year: i32 = parts[0].parse().map_err(|_| err("bad year"))?;
    let month: u32 = parts[1].parse().map_err(|_| err("bad month"))?;
    let day: u32 = parts[2].parse().map_err(|_| err("bad day"))?;
    if !(1..=12).contains(&month) {
        return Err(err("month out of range"));
    }
    if day < 1 || day > MONTH_DAYS[month as usize - 1] {
        return Err(err("day out of range for a 365-day year"));
    }
    Ok((year, month, day))
}

/// Continuous day index of a date relative to `anchor_year` Jan 1 = 1.0.
pub fn date_to_day(year: i32, month: u32, day: u32, anchor_year: i32) -> f64 {
    let doy = month_start_doy(month) + (day - 1) as f64;
    (year - anchor_year) as f64 * DAYS_PER_YEAR + doy
}

/// Inverse of [`date_to_day`] for whole-day indices.
pub fn day_to_date(t: f64, anchor_year: i32) -> String {
    let total = t.round() as i64 - 1;
    let year = anchor_year as i64 + total.div_euclid(365);
    let mut doy = total.rem_euclid(365) as u32 + 1;
    let mut month = 1u32;
    for (i, len) in MONTH_DAYS.iter().enumerate() {
        if doy <= *len {
            month = i as u32 + 1;
            break;
        }
        doy -= len;
    }
    format!("{year:04}-{month:02}-{doy:02}")
}
