//! Benchmark corpus manifests and the per-run measurement table.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cegis::{infer, CegisError, EngineConfig, Outcome, RunReport};
use crate::frontend::{load, Diagnostics, ElabOptions};
use crate::lang::Program;
use crate::stats::RunStats;
use crate::synth::Synthesizer;

pub const HEADER: [&str; 11] = ["Name", "Size", "Time", "TVT", "TVC", "MVT", "TST", "TSC", "MST", "Outcome", "Mode"];

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad corpus manifest {path}: {source}")]
    Manifest { path: PathBuf, source: toml::de::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, Deserialize)]
pub struct Entry {
    pub name: String,
    pub file: PathBuf,
    /// Expected hanoi outcome kind, e.g. `invariant`.
    pub expect: String,
    #[serde(default)]
    pub ho: bool,
    /// Source of a predicate the inferred invariant should agree with.
    pub oracle: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct Manifest {
    #[serde(default)]
    benchmark: Vec<Entry>,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub dir: PathBuf,
    pub entries: Vec<Entry>,
}

impl Corpus {
    /// Reads a manifest; entry paths are relative to its directory.
    pub fn load(manifest: &Path) -> Result<Corpus, BenchError> {
        let text = std::fs::read_to_string(manifest)
            .map_err(|source| BenchError::Io { path: manifest.to_owned(), source })?;
        let m: Manifest = toml::from_str(&text)
            .map_err(|source| BenchError::Manifest { path: manifest.to_owned(), source })?;
        let dir = manifest.parent().map(Path::to_owned).unwrap_or_default();
        Ok(Corpus { dir, entries: m.benchmark })
    }

    pub fn path(&self, e: &Entry) -> PathBuf {
        self.dir.join(&e.file)
    }

    pub fn source(&self, e: &Entry) -> Result<String, BenchError> {
        let path = self.path(e);
        std::fs::read_to_string(&path).map_err(|source| BenchError::Io { path, source })
    }

    pub fn program(&self, e: &Entry) -> Result<Program, String> {
        let src = self.source(e).map_err(|err| err.to_string())?;
        load(&src, &ElabOptions { ho: e.ho, ..Default::default() })
            .map_err(|d: Diagnostics| d.render(&self.path(e).display().to_string(), &src))
    }
}

/// One line of the measurement table. Times are in seconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    #[serde(rename = "Name")]
    pub name: String,
    #[serde(rename = "Size")]
    pub size: Option<usize>,
    #[serde(rename = "Time")]
    pub time: f64,
    #[serde(rename = "TVT")]
    pub tvt: f64,
    #[serde(rename = "TVC")]
    pub tvc: f64,
    #[serde(rename = "MVT")]
    pub mvt: f64,
    #[serde(rename = "TST")]
    pub tst: f64,
    #[serde(rename = "TSC")]
    pub tsc: f64,
    #[serde(rename = "MST")]
    pub mst: f64,
    #[serde(rename = "Outcome")]
    pub outcome: String,
    #[serde(rename = "Mode")]
    pub mode: String,
}

impl Row {
    pub fn failed(name: &str, mode: &str, outcome: String) -> Row {
        Row {
            name: name.to_owned(),
            size: None,
            time: 0.0,
            tvt: 0.0,
            tvc: 0.0,
            mvt: 0.0,
            tst: 0.0,
            tsc: 0.0,
            mst: 0.0,
            outcome,
            mode: mode.to_owned(),
        }
    }

    /// Averages `runs` (all of one benchmark and mode). The outcome is the
    /// last run's unless any run timed out.
    pub fn from_runs(name: &str, mode: &str, runs: &[RunReport]) -> Row {
        assert!(!runs.is_empty());
        let n = runs.len() as f64;
        let mut total = RunStats::default();
        let mut time = Duration::ZERO;
        for r in runs {
            total.merge(&r.stats);
            time += r.elapsed;
        }
        let last = runs.last().expect("nonempty");
        let outcome = if runs.iter().any(|r| matches!(r.outcome, Outcome::Timeout)) {
            "timeout".to_owned()
        } else {
            last.outcome.kind().to_owned()
        };
        let tvc = total.verify_calls as f64 / n;
        let tsc = total.synth_calls as f64 / n;
        let tvt = total.verify_time.as_secs_f64() / n;
        let tst = total.synth_time.as_secs_f64() / n;
        Row {
            name: name.to_owned(),
            size: last.outcome.predicate().map(|p| p.size()),
            time: time.as_secs_f64() / n,
            tvt,
            tvc,
            mvt: if tvc > 0.0 { tvt / tvc } else { 0.0 },
            tst,
            tsc,
            mst: if tsc > 0.0 { tst / tsc } else { 0.0 },
            outcome,
            mode: mode.to_owned(),
        }
    }
}

/// Runs inference `repeat` times, stopping early after a timeout.
pub fn measure(
    program: &Program,
    synth: &dyn Synthesizer,
    config: &EngineConfig,
    repeat: usize,
) -> Result<Vec<RunReport>, CegisError> {
    let mut runs = Vec::with_capacity(repeat);
    for _ in 0..repeat.max(1) {
        let r = infer(program, synth, config.clone())?;
        let timed_out = matches!(r.outcome, Outcome::Timeout);
        runs.push(r);
        if timed_out {
            break;
        }
    }
    Ok(runs)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "Name,Size,Time,TVT,TVC,MVT,TST,TSC,MST,Outcome,Mode\n");
    }

    #[test]
    fn failed_rows_have_empty_size() {
        let mut out = Vec::new();
        write_csv(&[Row::failed("x", "hanoi", "error".into())], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "x,,0.0,0.0,0.0,0.0,0.0,0.0,0.0,error,hanoi");
    }
}
