//! CSV interchange for scan datasets.
//!
//! Ideal datasets use the header `setting,p1,p2,p3,survival`; count
//! datasets use `setting,n1,n2,n3,duration`. Reals are written with nine
//! decimals and lines end in LF.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::{DatasetMode, FringeDataset, FringePoint};

pub const IDEAL_HEADER: &str = "setting,p1,p2,p3,survival";
pub const COUNTS_HEADER: &str = "setting,n1,n2,n3,duration";

pub fn write_dataset(data: &FringeDataset) -> String {
    let mut out = String::new();
    match data.mode {
        DatasetMode::Ideal => {
            out.push_str(IDEAL_HEADER);
            out.push('\n');
            for p in &data.points {
                let [a, b, c] = p.values;
                let _ = writeln!(out, "{:.9},{a:.9},{b:.9},{c:.9},{:.9}", p.setting, a + b + c);
            }
        }
        DatasetMode::Counts { duration, .. } => {
            out.push_str(COUNTS_HEADER);
            out.push('\n');
            for p in &data.points {
                let [a, b, c] = p.values;
                let _ = writeln!(out, "{:.9},{a:.0},{b:.0},{c:.0},{duration:.9}", p.setting);
            }
        }
    }
    out
}

/// Parse a dataset in either schema. For count data the rate is estimated
/// as the mean three-port total per second.
pub fn read_dataset(text: &str) -> Result<FringeDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    let counts = match headers.as_str() {
        IDEAL_HEADER => false,
        COUNTS_HEADER => true,
        other => return Err(Error::Schema(format!("unrecognized header `{other}`"))),
    };
    let mut points = Vec::new();
    let mut durations = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        if rec.len() != 5 {
            return Err(Error::Schema(format!("row {}: expected 5 fields, got {}", line + 1, rec.len())));
        }
        let nums = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Schema(format!("row {}: {e}", line + 1)))?;
        points.push(FringePoint { setting: nums[0], values: [nums[1], nums[2], nums[3]] });
        durations.push(nums[4]);
    }
    if points.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }
    let mode = if counts {
        let duration = durations[0];
        if durations.iter().any(|d| (d - duration).abs() > 1e-9 * duration.abs()) {
            return Err(Error::Schema("duration must be constant across rows".into()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Schema(format!("duration {duration} must be positive")));
        }
        let total: f64 = points.iter().map(|p| p.values.iter().sum::<f64>()).sum();
        let rate = total / (points.len() as f64 * duration);
        DatasetMode::Counts { rate, duration }
    } else {
        DatasetMode::Ideal
    };
    let data = FringeDataset { points, mode };
    data.validate()?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::PathLabel;
    use crate::interferometer::{build_network, default_phase_grid, phase_scan};
    use crate::states::NamedState;
    use crate::stats::noisy_fringe;
    use proptest::prelude::*;

    #[test]
    fn ideal_scan_layout() {
        let data = phase_scan(&build_network(), &NamedState::Nf.state(), PathLabel::F, &default_phase_grid()).unwrap();
        let text = write_dataset(&data);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(IDEAL_HEADER));
        assert_eq!(lines.next(), Some("0.000000000,0.333333333,0.333333333,0.333333333,1.000000000"));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let back = read_dataset(&text).unwrap();
        assert_eq!(back.points.len(), 25);
        assert_eq!(back.mode, DatasetMode::Ideal);
    }

    #[test]
    fn counts_round_trip_exactly() {
        let ideal = phase_scan(&build_network(), &NamedState::V0.state(), PathLabel::F, &default_phase_grid()).unwrap();
        let noisy = noisy_fringe(&ideal, 0.95, 1000.0, 100.0, 4).unwrap();
        let text = write_dataset(&noisy);
        let back = read_dataset(&text).unwrap();
        assert_eq!(write_dataset(&back), text);
        for (a, b) in back.points.iter().zip(&noisy.points) {
            assert_eq!(a.values, b.values);
        }
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(read_dataset("a,b,c\n1,2,3\n"), Err(Error::Schema(_))));
        assert!(matches!(read_dataset("setting,n1,n2,n3,duration\n"), Err(Error::Schema(_))));
        assert!(matches!(read_dataset("setting,n1,n2,n3,duration\n0,1,2,x,1\n"), Err(Error::Schema(_))));
        assert!(matches!(read_dataset("setting,n1,n2,n3,duration\n0,1.5,2,3,1\n"), Err(Error::Schema(_))));
        assert!(matches!(read_dataset("setting,n1,n2,n3,duration\n0,1,2,3,1\n1,1,2,3,2\n"), Err(Error::Schema(_))));
    }

    proptest! {
        #[test]
        fn count_rows_survive_a_round_trip(rows in prop::collection::vec((0.0f64..6.3, 0u32..1_000_000, 0u32..1_000_000, 0u32..1_000_000), 1..30)) {
            let points = rows.iter().map(|&(s, a, b, c)| FringePoint {
                setting: (s * 1e9).round() / 1e9,
                values: [a as f64, b as f64, c as f64],
            }).collect();
            let data = FringeDataset { points, mode: DatasetMode::Counts { rate: 1.0, duration: 100.0 } };
            let text = write_dataset(&data);
            prop_assert_eq!(write_dataset(&read_dataset(&text).unwrap()), text);
        }
    }
}
