//! Run artifacts: `timeseries.csv` and `events.json`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so the
//! CSV parses back to the exact logged values on any locale.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{GainReport, ScenarioFile};
use crate::simulator::{Events, SimLog};

pub const SCHEMA_VERSION: u32 = 1;
pub const TIMESERIES: &str = "timeseries.csv";
pub const EVENTS: &str = "events.json";

pub const HEADER: [&str; 13] = [
    "t", "agent", "r", "theta", "gamma", "delta", "tgo", "a_cmd", "a_real", "aT_hat", "topo", "x",
    "y",
];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path} already exists (pass --force to overwrite)")]
    Exists { path: PathBuf },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// One parsed CSV row. `agent` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub agent: usize,
    pub r: f64,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub tgo: f64,
    pub a_cmd: f64,
    pub a_real: f64,
    #[serde(rename = "aT_hat")]
    pub at_hat: f64,
    pub topo: usize,
    pub x: f64,
    pub y: f64,
}

/// Flattens the log into rows, one per agent per sample.
pub fn rows(log: &SimLog) -> impl Iterator<Item = Row> + '_ {
    log.samples.iter().flat_map(|s| {
        s.agents.iter().enumerate().map(move |(i, a)| Row {
            t: s.t,
            agent: i + 1,
            r: a.r,
            theta: a.theta,
            gamma: a.gamma,
            delta: a.delta,
            tgo: a.tgo,
            a_cmd: a.a_cmd,
            a_real: a.a_real,
            at_hat: a.a_t_hat,
            topo: s.topo + 1,
            x: a.x,
            y: a.y,
        })
    })
}

pub fn write_csv<W: Write>(log: &SimLog, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in rows(log) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>, OutputError> {
    let wrap = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .map_err(wrap)
}

/// Structured summary written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub schema_version: u32,
    pub scenario: &'a str,
    pub consensus_time: Option<f64>,
    pub capture_times: &'a [Option<f64>],
    #[serde(rename = "T_f")]
    pub t_f: Option<f64>,
    pub capture_spread: Option<f64>,
    pub events: &'a Events,
    pub gains: &'a GainReport,
    /// The scenario exactly as run, after overrides.
    pub config: &'a ScenarioFile,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes both artifacts into `dir`, refusing to overwrite unless `force`.
pub fn emit(
    log: &SimLog,
    dir: &Path,
    name: &str,
    gains: &GainReport,
    config: &ScenarioFile,
    force: bool,
) -> Result<(PathBuf, PathBuf), OutputError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(TIMESERIES);
    let json_path = dir.join(EVENTS);
    if !force {
        for p in [&csv_path, &json_path] {
            if p.exists() {
                return Err(OutputError::Exists { path: p.clone() });
            }
        }
    }
    let file = fs::File::create(&csv_path).map_err(io(&csv_path))?;
    write_csv(log, std::io::BufWriter::new(file)).map_err(|source| OutputError::Csv {
        path: csv_path.clone(),
        source,
    })?;
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        scenario: name,
        consensus_time: log.events.consensus_time,
        capture_times: &log.events.capture_times,
        t_f: log.events.t_f,
        capture_spread: log.events.capture_spread,
        events: &log.events,
        gains,
        config,
    };
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(&json_path, text + "\n").map_err(io(&json_path))?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{AgentSample, Sample};

    fn empty_log() -> SimLog {
        SimLog {
            samples: vec![],
            spread_trace: vec![],
            events: Events {
                consensus_time: None,
                capture_times: vec![],
                misses: vec![],
                t_f: None,
                capture_spread: None,
                peak_accel: vec![],
                min_range: vec![],
                switch_times: vec![],
            },
        }
    }

    fn synthetic(n: usize, m: usize) -> SimLog {
        let mut log = empty_log();
        for k in 0..m {
            let t = k as f64 * 1e-3;
            let agents = (0..n)
                .map(|i| AgentSample {
                    r: 1e4 - t * 300.0,
                    theta: 0.1 * i as f64,
                    gamma: -0.3,
                    delta: -0.3 - 0.1 * i as f64,
                    tgo: 1.0 / 3.0 + t * std::f64::consts::PI + i as f64,
                    a_cmd: 1e-17 * k as f64,
                    a_real: -2.5,
                    a_t_hat: 0.0,
                    x: 1.0,
                    y: -1.0,
                    fin_c: 0.0,
                    fin_t: 0.0,
                })
                .collect();
            log.samples.push(Sample {
                t,
                topo: 0,
                spread: 0.0,
                a_t: 0.0,
                agents,
            });
        }
        log
    }

    #[test]
    fn empty_log_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&empty_log(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,agent,r,theta,gamma,delta,tgo,a_cmd,a_real,aT_hat,topo,x,y\n"
        );
    }

    #[test]
    fn row_count_and_round_trip() {
        let log = synthetic(5, 100);
        let dir = tempfile::tempdir().unwrap();
        let file = crate::scenario::preset("table1_constant").unwrap();
        let rep = file.resolve().unwrap().1;
        emit(&log, dir.path(), "x", &rep, &file, false).unwrap();
        let back = read_csv(&dir.path().join(TIMESERIES)).unwrap();
        assert_eq!(back.len(), 500);
        let orig: Vec<Row> = rows(&log).collect();
        for (a, b) in orig.iter().zip(&back) {
            assert_eq!(a.tgo.to_bits(), b.tgo.to_bits());
            assert_eq!(a, b);
        }
        let text = std::fs::read_to_string(dir.path().join(TIMESERIES)).unwrap();
        assert!(!text.lines().skip(1).any(|l| l.split(',').count() != 13));
    }

    #[test]
    fn refuses_overwrite_without_force() {
        let log = synthetic(2, 3);
        let dir = tempfile::tempdir().unwrap();
        let file = crate::scenario::preset("table1_constant").unwrap();
        let rep = file.resolve().unwrap().1;
        emit(&log, dir.path(), "x", &rep, &file, false).unwrap();
        let e = emit(&log, dir.path(), "x", &rep, &file, false).unwrap_err();
        assert!(matches!(e, OutputError::Exists { .. }));
        emit(&log, dir.path(), "x", &rep, &file, true).unwrap();
    }
}
