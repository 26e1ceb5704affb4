//! Observation CSV ingestion: long-format records of dated measurements
//! with unit validation against each variable's accepted spellings.

use std::path::Path;

use crate::calendar;
use crate::calibrate::{Observation, ObservationSet};
use crate::model::Variable;
use crate::{Error, Result};

use super::{fmt_float, parse_err};

const COLUMNS: [&str; 5] = ["date", "variable", "value", "unit", "weight"];

/// Load an observation CSV with header `date,variable,value,unit[,weight]`.
/// `anchor_year` must match the forcing series so day indices line up.
pub fn load_observations(path: &Path, anchor_year: i32) -> Result<ObservationSet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    for h in headers.iter() {
        if !COLUMNS.contains(&h.trim()) {
            return Err(parse_err(path, 1, format!("unknown column '{h}'")));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let date_col = col("date").ok_or_else(|| parse_err(path, 1, "missing column 'date'".into()))?;
    let var_col = col("variable").ok_or_else(|| parse_err(path, 1, "missing column 'variable'".into()))?;
    let value_col = col("value").ok_or_else(|| parse_err(path, 1, "missing column 'value'".into()))?;
    let unit_col = col("unit").ok_or_else(|| parse_err(path, 1, "missing column 'unit'".into()))?;
    let weight_col = col("weight");

    let mut records = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let field = |idx: usize| -> Result<&str> {
            record
                .get(idx)
                .ok_or_else(|| parse_err(path, line, format!("missing field {}", idx + 1)))
        };
        let (year, month, day) = calendar::parse_date(field(date_col)?)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        let time = calendar::date_to_day(year, month, day, anchor_year);
        let variable = Variable::parse(field(var_col)?)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        let unit = field(unit_col)?;
        if !variable.unit_aliases().contains(&unit) {
            return Err(parse_err(
                path,
                line,
                format!(
                    "unit '{unit}' not valid for {variable}; accepted: {}",
                    variable.unit_aliases().join(", ")
                ),
            ));
        }
        let raw_value = field(value_col)?;
        let value: f64 = raw_value
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad value '{raw_value}'")))?;
        let weight = match weight_col {
            None => 1.0,
            Some(c) => {
                let raw = field(c)?;
                raw.parse::<f64>()
                    .map_err(|_| parse_err(path, line, format!("bad weight '{raw}'")))?
            }
        };
        records.push(Observation {
            time,
            variable,
            value,
            weight,
        });
    }
    ObservationSet::new(records).map_err(|e| match e {
        Error::Domain(msg) => parse_err(path, 1, msg),
        other => other,
    })
}

/// Write observations back to the CSV schema accepted by
/// [`load_observations`]. Times must be whole days.
pub fn write_observations(path: &Path, set: &ObservationSet, anchor_year: i32) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(COLUMNS)?;
    for o in set.records() {
        if (o.time - o.time.round()).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "cannot render fractional day {} as a date",
                o.time
            )));
        }
        writer.write_record([
            calendar::day_to_date(o.time, anchor_year),
            o.variable.name().to_string(),
            fmt_float(o.value),
            o.variable.unit().to_string(),
            fmt_float(o.weight),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_records_with_aliases_and_default_weight() {
        let f = write_tmp(
            "date,variable,value,unit\n\
             2018-06-15,mclr,2.5,ug/L\n\
             2018-06-15,mclr,2.5,ppb\n\
             2018-06-20,oxygen,8.25,mg/L\n\
             2018-07-01,cyano,1.5,mgC/L\n",
        );
        let set = load_observations(f.path(), 2018).unwrap();
        assert_eq!(set.len(), 4);
        let first = set.records()[0];
        assert_eq!(first.variable, Variable::Mclr);
        assert_eq!(first.weight, 1.0);
        assert_eq!(first.time, calendar::date_to_day(2018, 6, 15, 2018));
        assert_eq!(set.records()[0].value, set.records()[1].value);
    }

    #[test]
    fn wrong_unit_is_rejected_with_line_number() {
        let f = write_tmp("date,variable,value,unit\n2018-06-15,mclr,2.5,mol/L\n");
        match load_observations(f.path(), 2018).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("mol/L"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn unknown_variable_and_bad_weight_are_rejected() {
        let f = write_tmp("date,variable,value,unit\n2018-06-15,chloride,2.5,mg/L\n");
        assert!(matches!(
            load_observations(f.path(), 2018).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        let f = write_tmp("date,variable,value,unit,weight\n2018-06-15,oxygen,8.0,mg/L,-1\n");
        assert!(load_observations(f.path(), 2018).is_err());
    }

    #[test]
    fn round_trip_preserves_records() {
        let f = write_tmp(
            "date,variable,value,unit,weight\n\
             2018-06-15,mclr,2.125,ug/L,1.5\n\
             2018-08-01,oxygen,7.0625,mg/L,1.0\n",
        );
        let set = load_observations(f.path(), 2018).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_observations(out.path(), &set, 2018).unwrap();
        let reread = load_observations(out.path(), 2018).unwrap();
        assert_eq!(set.records(), reread.records());
    }
}
