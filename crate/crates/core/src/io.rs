//! CSV ingestion of tick, daily-close and return files.
//!
//! | kind    | header            | notes                                         |
//! |---------|-------------------|-----------------------------------------------|
//! | ticks   | `timestamp,value` | ISO-8601 or epoch seconds, detected per file  |
//! | daily   | `date,close`      | `YYYY-MM-DD`, stored as midnight UTC seconds   |
//! | returns | `return`          | one log return per row                        |
//!
//! Malformed rows either abort the read or are skipped and reported, per
//! [`OnBadRow`]. Line numbers count the header as line 1.

use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::returns::{ReturnSeries, TickSeries};

/// What to do with a row that does not parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnBadRow {
    #[default]
    Fail,
    Skip,
}

impl FromStr for OnBadRow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fail" => Ok(Self::Fail),
            "skip" => Ok(Self::Skip),
            other => Err(Error::param(
                "on_bad_row",
                format!("`{other}` is neither `fail` nor `skip`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadRow {
    pub line: u64,
    pub message: String,
}

/// Parsed data plus the rows that were skipped.
#[derive(Debug, Clone)]
pub struct Ingested<T> {
    pub data: T,
    pub skipped: Vec<BadRow>,
}

#[derive(Clone, Copy, PartialEq)]
enum TimeFormat {
    Epoch,
    Iso,
}

fn parse_time(field: &str, format: TimeFormat) -> std::result::Result<f64, String> {
    match format {
        TimeFormat::Epoch => field
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or_else(|| format!("`{field}` is not an epoch time")),
        TimeFormat::Iso => parse_iso(field),
    }
}

fn parse_iso(field: &str) -> std::result::Result<f64, String> {
    let secs = |dt: NaiveDateTime| {
        let utc = dt.and_utc();
        utc.timestamp() as f64 + utc.timestamp_subsec_nanos() as f64 * 1e-9
    };
    if let Ok(dt) = DateTime::parse_from_rfc3339(field) {
        return Ok(secs(dt.naive_utc()));
    }
    for f in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(field, f) {
            return Ok(secs(dt));
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(field, "%Y-%m-%d") {
        return Ok(secs(d.and_hms_opt(0, 0, 0).expect("midnight exists")));
    }
    Err(format!("`{field}` is not an ISO-8601 time"))
}

fn parse_value(field: &str) -> std::result::Result<f64, String> {
    match field.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{field}` is not a finite number")),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<String> = headers
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    if got.len() != expected.len() || got.iter().zip(expected).any(|(g, e)| g != e) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    Ok(())
}

/// Walks data rows, handing each parsed row to `accept`; bad rows go
/// through the policy.
fn scan<R: Read>(
    reader: R,
    header: &[&str],
    policy: OnBadRow,
    mut accept: impl FnMut(&csv::StringRecord) -> std::result::Result<(), String>,
) -> Result<Vec<BadRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    check_header(
        rdr.headers().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?,
        header,
    )?;
    let mut skipped = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        let outcome = match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) if record.len() != header.len() => Err(format!(
                "expected {} fields, found {}",
                header.len(),
                record.len()
            )),
            Ok(true) => accept(&record),
            Err(e) => Err(e.to_string()),
        };
        let line = record.position().map_or(line, |p| p.line());
        if let Err(message) = outcome {
            match policy {
                OnBadRow::Fail => return Err(Error::Parse { line, message }),
                OnBadRow::Skip => {
                    log::warn!("skipping line {line}: {message}");
                    skipped.push(BadRow { line, message });
                }
            }
        }
    }
    Ok(skipped)
}

/// Reads `timestamp,value` ticks. The timestamp format (epoch seconds or
/// ISO-8601) is taken from the first data row that parses as either.
pub fn read_ticks<R: Read>(reader: R, policy: OnBadRow) -> Result<Ingested<TickSeries>> {
    let mut format = None;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let skipped = scan(reader, &["timestamp", "value"], policy, |rec| {
        let (t, v) = (&rec[0], &rec[1]);
        let fmt = match format {
            Some(f) => f,
            None if t.parse::<f64>().is_ok() => TimeFormat::Epoch,
            None => TimeFormat::Iso,
        };
        let t = parse_time(t, fmt)?;
        let v = parse_value(v)?;
        if v <= 0.0 {
            return Err(format!("index level {v} is not positive"));
        }
        if let Some(&prev) = times.last() {
            if t < prev {
                return Err(format!("timestamp {t} precedes the previous row"));
            }
        }
        format = Some(fmt);
        times.push(t);
        values.push(v);
        Ok(())
    })?;
    if values.is_empty() {
        return Err(Error::EmptyResult("no valid tick rows".into()));
    }
    Ok(Ingested {
        data: TickSeries::new(values, Some(times))?,
        skipped,
    })
}

/// Reads `date,close` daily closures as a time-stamped tick series.
pub fn read_daily<R: Read>(reader: R, policy: OnBadRow) -> Result<Ingested<TickSeries>> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let skipped = scan(reader, &["date", "close"], policy, |rec| {
        let t = parse_iso(&rec[0])?;
        let v = parse_value(&rec[1])?;
        if v <= 0.0 {
            return Err(format!("close {v} is not positive"));
        }
        if times.last().is_some_and(|&p| t < p) {
            return Err(format!("date `{}` precedes the previous row", &rec[0]));
        }
        times.push(t);
        values.push(v);
        Ok(())
    })?;
    if values.is_empty() {
        return Err(Error::EmptyResult("no valid daily rows".into()));
    }
    Ok(Ingested {
        data: TickSeries::new(values, Some(times))?,
        skipped,
    })
}

/// Reads a single-column `return` file as a raw return series.
pub fn read_returns<R: Read>(
    reader: R,
    policy: OnBadRow,
    mean_dt: Option<f64>,
) -> Result<Ingested<ReturnSeries>> {
    let mut returns = Vec::new();
    let skipped = scan(reader, &["return"], policy, |rec| {
        returns.push(parse_value(&rec[0])?);
        Ok(())
    })?;
    if returns.is_empty() {
        return Err(Error::EmptyResult("no valid return rows".into()));
    }
    Ok(Ingested {
        data: ReturnSeries::new(returns, mean_dt)?,
        skipped,
    })
}

pub fn read_ticks_file(path: &Path, policy: OnBadRow) -> Result<Ingested<TickSeries>> {
    read_ticks(open(path)?, policy)
}

pub fn read_daily_file(path: &Path, policy: OnBadRow) -> Result<Ingested<TickSeries>> {
    read_daily(open(path)?, policy)
}

pub fn read_returns_file(
    path: &Path,
    policy: OnBadRow,
    mean_dt: Option<f64>,
) -> Result<Ingested<ReturnSeries>> {
    read_returns(open(path)?, policy, mean_dt)
}

/// Writes a `return` column file.
pub fn write_returns<W: std::io::Write>(writer: W, returns: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["return"]).map_err(err)?;
    for r in returns {
        w.write_record([format!("{r:e}")]).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `timestamp,value` ticks with epoch-second timestamps.
pub fn write_ticks<W: std::io::Write>(writer: W, ticks: &TickSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["timestamp", "value"]).map_err(err)?;
    for (i, v) in ticks.values().iter().enumerate() {
        let t = ticks.timestamps().map_or(i as f64, |ts| ts[i]);
        w.write_record([format!("{t:.3}"), format!("{v}")])
            .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_and_iso_ticks() {
        let epoch = "timestamp,value\n0,100\n19.5,100.5\n40,100.25\n";
        let t = read_ticks(epoch.as_bytes(), OnBadRow::Fail).unwrap().data;
        assert_eq!(t.values(), &[100.0, 100.5, 100.25]);
        assert_eq!(t.mean_dt(), Some(20.0));

        let iso = "timestamp,value\n2001-01-02T09:00:00Z,10\n2001-01-02 09:00:30,11\n";
        let t = read_ticks(iso.as_bytes(), OnBadRow::Fail).unwrap().data;
        assert_eq!(t.mean_dt(), Some(30.0));
    }

    #[test]
    fn bad_rows_carry_line_numbers() {
        let csv = "timestamp,value\n0,100\n1,abc\n2,-5\n3,101\n";
        match read_ticks(csv.as_bytes(), OnBadRow::Fail) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let ok = read_ticks(csv.as_bytes(), OnBadRow::Skip).unwrap();
        assert_eq!(ok.data.values(), &[100.0, 101.0]);
        let lines: Vec<u64> = ok.skipped.iter().map(|b| b.line).collect();
        assert_eq!(lines, vec![3, 4]);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = read_returns("x\n1\n".as_bytes(), OnBadRow::Skip, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn daily_closes() {
        let csv = "date,close\n2020-01-02,100\n2020-01-03,101\n2020-01-06,99\n";
        let t = read_daily(csv.as_bytes(), OnBadRow::Fail).unwrap().data;
        assert_eq!(t.len(), 3);
        assert_eq!(
            t.timestamps().unwrap()[1] - t.timestamps().unwrap()[0],
            86_400.0
        );
    }

    #[test]
    fn returns_round_trip() {
        let mut buf = Vec::new();
        let r = [0.1, -2.5e-5, 3.0];
        write_returns(&mut buf, &r).unwrap();
        let back = read_returns(&buf[..], OnBadRow::Fail, None).unwrap().data;
        assert_eq!(back.returns(), &r);
    }
}
