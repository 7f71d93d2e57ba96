use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bitstring::Problem;
use crate::eda::TrialRecord;
use crate::error::{Error, Result};

use super::{assemble, SweepConfig, SweepResult};

/// Exact CSV header of a trial file.
pub const CSV_HEADER: [&str; 9] = [
    "problem",
    "n",
    "lambda",
    "mu",
    "trial",
    "seed",
    "generations",
    "evaluations",
    "success",
];

#[derive(Serialize, Deserialize)]
struct Sidecar {
    config: SweepConfig,
    master_seed: u64,
    code_version: String,
    config_hash: String,
    started_at: Option<String>,
    finished_at: Option<String>,
}

/// `dir/stem.meta.json` next to `dir/stem.csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trials".into());
    csv.with_file_name(format!("{stem}.meta.json"))
}

/// Writes the trials to `path` and the metadata to [`sidecar_path`].
pub fn persist(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(CSV_HEADER)?;
    let problem = result.config.problem.as_str();
    for p in &result.points {
        for (trial, t) in p.trials.iter().enumerate() {
            w.write_record([
                problem.to_string(),
                p.n.to_string(),
                p.lambda.to_string(),
                p.mu.to_string(),
                trial.to_string(),
                t.seed.to_string(),
                t.generations.to_string(),
                t.evaluations.to_string(),
                t.success.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let sidecar = Sidecar {
        config: result.config.clone(),
        master_seed: result.config.master_seed,
        code_version: result.code_version.clone(),
        config_hash: result.config_hash.clone(),
        started_at: result.started_at.clone(),
        finished_at: result.finished_at.clone(),
    };
    let meta = sidecar_path(path);
    let mut f = BufWriter::new(File::create(&meta).map_err(|e| Error::io(&meta, e))?);
    serde_json::to_writer_pretty(&mut f, &sidecar)?;
    f.write_all(b"\n").map_err(|e| Error::io(&meta, e))?;
    f.flush().map_err(|e| Error::io(&meta, e))
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, col: usize, path: &Path, line: u64) -> Result<T> {
    let raw = record.get(col).unwrap_or("");
    raw.parse().map_err(|_| Error::Row {
        path: path.to_path_buf(),
        line,
        message: format!("column '{}': cannot parse '{raw}'", CSV_HEADER[col]),
    })
}

/// One parsed row of a trial file.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub problem: Problem,
    pub n: usize,
    pub lambda: usize,
    pub mu: usize,
    pub trial: usize,
    pub record: TrialRecord,
    /// 1-based line in the file.
    pub line: u64,
}

fn schema(path: &Path, message: String) -> Error {
    Error::Schema {
        path: path.to_path_buf(),
        message,
    }
}

/// Parses a trial file, checking the header and every field.
pub fn read_trials(path: &Path) -> Result<Vec<TrialRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut records = r.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(schema(path, "empty file, expected header".into())),
    };
    for (i, expected) in CSV_HEADER.iter().enumerate() {
        match header.get(i) {
            Some(found) if found == *expected => {}
            Some(found) => {
                return Err(schema(
                    path,
                    format!("column {} should be '{expected}', found '{found}'", i + 1),
                ))
            }
            None => return Err(schema(path, format!("missing column '{expected}'"))),
        }
    }
    if header.len() > CSV_HEADER.len() {
        return Err(schema(
            path,
            format!("unexpected column '{}'", &header[CSV_HEADER.len()]),
        ));
    }

    records
        .map(|rec| {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != CSV_HEADER.len() {
                return Err(Error::Row {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
                });
            }
            Ok(TrialRow {
                problem: field(&rec, 0, path, line)?,
                n: field(&rec, 1, path, line)?,
                lambda: field(&rec, 2, path, line)?,
                mu: field(&rec, 3, path, line)?,
                trial: field(&rec, 4, path, line)?,
                record: TrialRecord {
                    seed: field(&rec, 5, path, line)?,
                    generations: field(&rec, 6, path, line)?,
                    evaluations: field(&rec, 7, path, line)?,
                    success: field(&rec, 8, path, line)?,
                },
                line,
            })
        })
        .collect()
}

/// Reads a trial file and its sidecar back into a [`SweepResult`]. Summaries
/// are recomputed, so the result equals the one that was persisted.
pub fn load(path: &Path) -> Result<SweepResult> {
    let meta = sidecar_path(path);
    let text = std::fs::read_to_string(&meta).map_err(|e| Error::io(&meta, e))?;
    let sidecar: Sidecar =
        serde_json::from_str(&text).map_err(|e| schema(&meta, e.to_string()))?;
    let config = sidecar.config;
    if sidecar.master_seed != config.master_seed {
        return Err(schema(&meta, "master_seed disagrees with config".into()));
    }

    let rows = read_trials(path)?;
    let expected_rows = config.repeats * config.n_values.len();
    if rows.len() != expected_rows {
        return Err(schema(
            path,
            format!("expected {expected_rows} rows, found {}", rows.len()),
        ));
    }
    let mut trials: Vec<Vec<TrialRecord>> = vec![Vec::with_capacity(config.repeats); config.n_values.len()];
    for (k, row) in rows.into_iter().enumerate() {
        let (i, t) = (k / config.repeats, k % config.repeats);
        let p = config.params(i, t);
        let found = (row.problem, row.n, row.lambda, row.mu, row.trial);
        if found != (config.problem, p.n, p.lambda, p.mu, t) {
            return Err(Error::Row {
                path: path.to_path_buf(),
                line: row.line,
                message: format!(
                    "expected problem={}, n={}, lambda={}, mu={}, trial={t}, found problem={}, n={}, lambda={}, mu={}, trial={}",
                    config.problem, p.n, p.lambda, p.mu, row.problem, row.n, row.lambda, row.mu, row.trial
                ),
            });
        }
        trials[i].push(row.record);
    }

    let mut result = assemble(config, trials)?;
    if result.config_hash != sidecar.config_hash {
        return Err(schema(&meta, "config_hash does not match config".into()));
    }
    result.code_version = sidecar.code_version;
    result.started_at = sidecar.started_at;
    result.finished_at = sidecar.finished_at;
    Ok(result)
}
