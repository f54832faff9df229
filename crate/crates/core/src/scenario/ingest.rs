//! `timestamp,load_kw` CSV reading and writing.
//!
//! Timestamps are ISO-8601 local times (`2019-01-15T13:00:00`). Rows must be
//! strictly increasing. A row with an empty `load_kw` counts as missing.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};

use super::interp::Pchip;
use super::ScenarioError;
use crate::profile::LoadProfile;

pub const CSV_HEADER: [&str; 2] = ["timestamp", "load_kw"];
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// Gaps of this many consecutive missing samples or more make a day unusable.
pub const MAX_FILLABLE_GAP: usize = 3;

/// Result of ingesting one file: complete days plus the days that had to be dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedSeries {
    pub step_minutes: f64,
    pub days: Vec<LoadProfile>,
    pub dropped_days: Vec<NaiveDate>,
    /// Number of samples filled by interpolation across all kept days.
    pub filled_samples: usize,
}

/// Parse a load CSV into per-day profiles.
///
/// The sampling step is the smallest spacing between consecutive rows and must
/// divide a day. Short gaps (up to [`MAX_FILLABLE_GAP`] samples) are filled with
/// the monotone cubic through the day's present samples; days with longer gaps
/// are dropped.
pub fn read_profile_csv<R: Read>(reader: R) -> Result<IngestedSeries, ScenarioError> {
    let rows = parse_rows(reader)?;
    if rows.len() < 2 {
        return Err(ScenarioError::InsufficientData(
            "need at least two rows to infer the sampling step".into(),
        ));
    }
    let step_secs = rows
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).num_seconds())
        .min()
        .expect("two or more rows");
    if step_secs <= 0 || 86_400 % step_secs != 0 {
        return Err(ScenarioError::InvalidConfig(format!(
            "sampling step of {step_secs} s does not divide a day"
        )));
    }
    let slots_per_day = (86_400 / step_secs) as usize;
    let mut by_day: BTreeMap<NaiveDate, Vec<Option<f64>>> = BTreeMap::new();
    for (line, (ts, value)) in rows.iter().enumerate() {
        let since_midnight = (ts.time() - NaiveTime::MIN).num_seconds();
        if since_midnight % step_secs != 0 {
            return Err(ScenarioError::Csv {
                line: line as u64 + 2,
                message: format!("timestamp {ts} is off the {step_secs} s grid"),
            });
        }
        let slot = (since_midnight / step_secs) as usize;
        by_day
            .entry(ts.date())
            .or_insert_with(|| vec![None; slots_per_day])[slot] = *value;
    }
    let step_minutes = step_secs as f64 / 60.0;
    let mut days = Vec::new();
    let mut dropped_days = Vec::new();
    let mut filled_samples = 0;
    for (date, slots) in by_day {
        match fill_day(&slots) {
            Some((values, filled)) => {
                filled_samples += filled;
                days.push(LoadProfile::new(
                    date.and_time(NaiveTime::MIN),
                    step_minutes,
                    values,
                )?);
            }
            None => dropped_days.push(date),
        }
    }
    Ok(IngestedSeries {
        step_minutes,
        days,
        dropped_days,
        filled_samples,
    })
}

fn parse_rows<R: Read>(reader: R) -> Result<Vec<(NaiveDateTime, Option<f64>)>, ScenarioError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(1, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(ScenarioError::Csv {
            line: 1,
            message: format!(
                "expected header `timestamp,load_kw`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows: Vec<(NaiveDateTime, Option<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let ts: NaiveDateTime = record[0].parse().map_err(|e| ScenarioError::Csv {
            line,
            message: format!("bad timestamp `{}`: {e}", &record[0]),
        })?;
        let value = match &record[1] {
            "" => None,
            s => {
                let v: f64 = s.parse().map_err(|e| ScenarioError::Csv {
                    line,
                    message: format!("bad load_kw `{s}`: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(ScenarioError::Csv {
                        line,
                        message: format!("load_kw `{s}` is not finite"),
                    });
                }
                Some(v)
            }
        };
        if let Some((prev, _)) = rows.last() {
            if ts == *prev {
                return Err(ScenarioError::DuplicateTimestamp {
                    line,
                    timestamp: ts,
                });
            }
            if ts < *prev {
                return Err(ScenarioError::UnsortedTimestamps {
                    line,
                    timestamp: ts,
                });
            }
        }
        rows.push((ts, value));
    }
    Ok(rows)
}

fn csv_error(line: u64, e: csv::Error) -> ScenarioError {
    ScenarioError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Fill short gaps of one day; `None` if any gap is too long.
fn fill_day(slots: &[Option<f64>]) -> Option<(Vec<f64>, usize)> {
    let mut run = 0;
    for s in slots {
        run = if s.is_none() { run + 1 } else { 0 };
        if run > MAX_FILLABLE_GAP {
            return None;
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = slots
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|v| (i as f64, v)))
        .unzip();
    let spline = Pchip::new(&xs, &ys)?;
    let mut filled = 0;
    let values = slots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.unwrap_or_else(|| {
                filled += 1;
                spline.eval(i as f64)
            })
        })
        .collect();
    Some((values, filled))
}

/// Write a profile as `timestamp,load_kw` rows.
pub fn write_profile_csv<W: Write>(writer: W, profile: &LoadProfile) -> Result<(), ScenarioError> {
    write_profiles_csv(writer, std::slice::from_ref(profile))
}

/// Write consecutive profiles under a single header.
pub fn write_profiles_csv<W: Write>(
    writer: W,
    profiles: &[LoadProfile],
) -> Result<(), ScenarioError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| ScenarioError::Io(e.to_string());
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for profile in profiles {
        for (i, v) in profile.values().iter().enumerate() {
            wtr.write_record([
                profile.timestamp(i).format(TIMESTAMP_FORMAT).to_string(),
                v.to_string(),
            ])
            .map_err(io)?;
        }
    }
    wtr.flush().map_err(|e| ScenarioError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(rows: &[(&str, &str)]) -> String {
        let mut s = String::from("timestamp,load_kw\n");
        for (t, v) in rows {
            s.push_str(&format!("{t},{v}\n"));
        }
        s
    }

    fn hourly(day: u32, values: &[Option<f64>]) -> Vec<(String, String)> {
        values
            .iter()
            .enumerate()
            .map(|(h, v)| {
                (
                    format!("2019-01-{day:02}T{h:02}:00:00"),
                    v.map_or(String::new(), |v| v.to_string()),
                )
            })
            .collect()
    }

    fn to_csv(rows: &[(String, String)]) -> String {
        let borrowed: Vec<(&str, &str)> =
            rows.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        csv_of(&borrowed)
    }

    #[test]
    fn round_trips_a_day() {
        let p = LoadProfile::new(
            "2019-01-15T00:00:00".parse().unwrap(),
            60.0,
            (0..24).map(|h| 1000.0 + h as f64 * 12.5).collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &p).unwrap();
        let back = read_profile_csv(buf.as_slice()).unwrap();
        assert_eq!(back.days, vec![p]);
        assert!(back.dropped_days.is_empty());
    }

    #[test]
    fn short_gap_is_filled_long_gap_drops_day() {
        let mut day1: Vec<Option<f64>> = (0..24).map(|h| Some(100.0 + h as f64)).collect();
        day1[5] = None;
        day1[6] = None;
        day1[7] = None;
        let mut day2: Vec<Option<f64>> = (0..24).map(|h| Some(100.0 + h as f64)).collect();
        for v in &mut day2[10..14] {
            *v = None;
        }
        let mut rows = hourly(15, &day1);
        rows.extend(hourly(16, &day2));
        let got = read_profile_csv(to_csv(&rows).as_bytes()).unwrap();
        assert_eq!(got.days.len(), 1);
        assert_eq!(got.filled_samples, 3);
        assert_eq!(
            got.dropped_days,
            vec![NaiveDate::from_ymd_opt(2019, 1, 16).unwrap()]
        );
        // Linear data is reproduced by the monotone cubic.
        assert!((got.days[0].values()[6] - 106.0).abs() < 1e-9);
    }

    #[test]
    fn absent_rows_count_as_gaps() {
        let rows: Vec<(String, String)> = hourly(15, &vec![Some(5.0); 24])
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != 12)
            .map(|(_, r)| r)
            .collect();
        let got = read_profile_csv(to_csv(&rows).as_bytes()).unwrap();
        assert_eq!(got.days[0].values(), &[5.0; 24]);
        assert_eq!(got.filled_samples, 1);
    }

    #[test]
    fn rejects_unsorted_and_duplicates() {
        let dup = csv_of(&[
            ("2019-01-15T00:00:00", "1"),
            ("2019-01-15T01:00:00", "1"),
            ("2019-01-15T01:00:00", "2"),
        ]);
        assert!(matches!(
            read_profile_csv(dup.as_bytes()),
            Err(ScenarioError::DuplicateTimestamp { line: 4, .. })
        ));
        let unsorted = csv_of(&[("2019-01-15T02:00:00", "1"), ("2019-01-15T01:00:00", "1")]);
        assert!(matches!(
            read_profile_csv(unsorted.as_bytes()),
            Err(ScenarioError::UnsortedTimestamps { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_bad_header_and_values() {
        assert!(read_profile_csv("time,kw\n".as_bytes()).is_err());
        let bad = csv_of(&[("2019-01-15T00:00:00", "abc"), ("2019-01-15T01:00:00", "1")]);
        assert!(matches!(
            read_profile_csv(bad.as_bytes()),
            Err(ScenarioError::Csv { line: 2, .. })
        ));
        let one = csv_of(&[("2019-01-15T00:00:00", "1")]);
        assert!(matches!(
            read_profile_csv(one.as_bytes()),
            Err(ScenarioError::InsufficientData(_))
        ));
    }
}
