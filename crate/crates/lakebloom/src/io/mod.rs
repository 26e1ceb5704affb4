//! File formats: forcing and observation CSVs, the JSON run
//! configuration, and result serialization with a hashed manifest.

use std::path::Path;

use crate::Error;

pub mod config;
pub mod forcing;
pub mod observations;
pub mod outputs;

pub use config::{FitConfig, RunConfig};
pub use forcing::{load_forcing, write_forcing, ForcingSample, ForcingSeries};
pub use observations::{load_observations, write_observations};
pub use outputs::{sha256_hex, OutputDir};

/// Floats in CSV files carry 17 significant digits so a write/read cycle
/// reproduces the exact bit pattern.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_err(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatted_floats_round_trip_exactly() {
        for v in [0.05, 1.0 / 3.0, 2.5e-17, 123456.789012345678, 0.0, 1e12] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} via {s}");
        }
    }
}
