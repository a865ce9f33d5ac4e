//! Feature tables, z-score standardization, one-hot labels and the seeded
//! train/test split.
//!
//! The split shuffle is a Fisher-Yates pass driven by [`Xoshiro256`] seeded
//! from the split seed (see [`crate::rng`] for the exact algorithm), so equal
//! seeds give equal partitions in any implementation.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::audio_io::{Emotion, Provenance};
use crate::matrix::Matrix;
use crate::rng::Xoshiro256;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("need at least {needed} rows, got {rows}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("schema mismatch: expected {expected} columns, found {found}")]
    SchemaMismatch { expected: usize, found: usize },
    #[error("degenerate split: {train} train rows, {test} test rows")]
    DegenerateSplit { train: usize, test: usize },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("non-finite feature in row {row}")]
    NonFinite { row: usize },
    #[error("unknown feature column {0:?}")]
    UnknownColumn(String),
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Features for `N` clips. `source` names the original clip each row was
/// derived from, so augmented rows can be traced back for the leakage guard.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub x: Matrix,
    pub y: Vec<Emotion>,
    pub schema: Vec<String>,
    pub provenance: Vec<Provenance>,
    pub source: Vec<String>,
}

/// Metadata columns that follow the feature columns in `features.csv`.
pub const TABLE_META_COLUMNS: [&str; 3] = ["emotion", "provenance", "source"];

impl FeatureTable {
    pub fn new(
        x: Matrix,
        y: Vec<Emotion>,
        schema: Vec<String>,
        provenance: Vec<Provenance>,
        source: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let n = x.rows();
        if y.len() != n || provenance.len() != n || source.len() != n {
            return Err(DatasetError::Malformed(format!(
                "{n} rows but {} labels, {} provenance tags, {} sources",
                y.len(),
                provenance.len(),
                source.len()
            )));
        }
        if schema.len() != x.cols() {
            return Err(DatasetError::SchemaMismatch { expected: schema.len(), found: x.cols() });
        }
        if let Some(row) = (0..n).find(|&i| x.row(i).iter().any(|v| !v.is_finite())) {
            return Err(DatasetError::NonFinite { row });
        }
        Ok(Self { x, y, schema, provenance, source })
    }

    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureTable {
        FeatureTable {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            schema: self.schema.clone(),
            provenance: idx.iter().map(|&i| self.provenance[i]).collect(),
            source: idx.iter().map(|&i| self.source[i].clone()).collect(),
        }
    }

    /// Keeps only the named columns, in the given order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureTable, DatasetError> {
        let idx = names
            .iter()
            .map(|n| {
                self.schema
                    .iter()
                    .position(|s| s == n)
                    .ok_or_else(|| DatasetError::UnknownColumn(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FeatureTable {
            x: self.x.select_cols(&idx),
            schema: names.to_vec(),
            ..self.clone()
        })
    }

    pub fn class_counts(&self) -> [usize; Emotion::COUNT] {
        let mut counts = [0; Emotion::COUNT];
        for e in &self.y {
            counts[e.index()] += 1;
        }
        counts
    }

    /// Header is the schema followed by `emotion,provenance,source`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DatasetError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.schema.iter().map(String::as_str).chain(TABLE_META_COLUMNS))?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.x.row(i).iter().map(|v| v.to_string()).collect();
            rec.push(self.y[i].to_string());
            rec.push(self.provenance[i].to_string());
            rec.push(self.source[i].clone());
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<FeatureTable, DatasetError> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        let d = header
            .len()
            .checked_sub(TABLE_META_COLUMNS.len())
            .filter(|&d| header[d..] == TABLE_META_COLUMNS)
            .ok_or_else(|| DatasetError::Malformed("header must end with emotion,provenance,source".into()))?;
        let schema = header[..d].to_vec();
        let (mut x, mut y, mut provenance, mut source) = (Matrix::zeros(0, d), vec![], vec![], vec![]);
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| DatasetError::Malformed(format!("row {}: bad {what}", line + 1));
            let row = (0..d)
                .map(|j| rec[j].parse::<f64>().map_err(|_| bad(&schema[j])))
                .collect::<Result<Vec<_>, _>>()?;
            x.push_row(&row);
            y.push(rec[d].parse().map_err(|_| bad("emotion"))?);
            provenance.push(rec[d + 1].parse().map_err(|_| bad("provenance"))?);
            source.push(rec[d + 2].to_owned());
        }
        FeatureTable::new(x, y, schema, provenance, source)
    }
}

/// Per-column z-score transform fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub schema: Vec<String>,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Column means and population standard deviations; zero-variance
    /// columns get scale 1.
    pub fn fit(x: &Matrix, schema: &[String]) -> Result<Self, DatasetError> {
        if x.rows() < 2 {
            return Err(DatasetError::TooFewRows { rows: x.rows(), needed: 2 });
        }
        if schema.len() != x.cols() {
            return Err(DatasetError::SchemaMismatch { expected: schema.len(), found: x.cols() });
        }
        let n = x.rows() as f64;
        let mut mean = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / n).sqrt();
                // Spread at rounding level relative to the column magnitude is no spread.
                if sd <= 1e-12 * m.abs() {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Self { schema: schema.to_vec(), mean, scale })
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix, DatasetError> {
        self.check(x)?;
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self, x: &Matrix) -> Result<Matrix, DatasetError> {
        self.check(x)?;
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = *v * s + m;
            }
        }
        Ok(out)
    }

    fn check(&self, x: &Matrix) -> Result<(), DatasetError> {
        if x.cols() != self.mean.len() {
            return Err(DatasetError::SchemaMismatch { expected: self.mean.len(), found: x.cols() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, DatasetError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, DatasetError> {
        let st: Standardizer = serde_json::from_str(s)?;
        if st.mean.len() != st.scale.len() || st.mean.len() != st.schema.len() {
            return Err(DatasetError::Malformed("mean, scale and schema lengths differ".into()));
        }
        Ok(st)
    }
}

pub fn fit_standardizer(x: &Matrix, schema: &[String]) -> Result<Standardizer, DatasetError> {
    Standardizer::fit(x, schema)
}

pub fn apply_standardizer(s: &Standardizer, x: &Matrix) -> Result<Matrix, DatasetError> {
    s.apply(x)
}

/// `N x 8` indicator matrix in canonical label order.
pub fn one_hot(labels: &[Emotion]) -> Matrix {
    let mut m = Matrix::zeros(labels.len(), Emotion::COUNT);
    for (i, e) in labels.iter().enumerate() {
        m[(i, e.index())] = 1.0;
    }
    m
}

/// Row-wise argmax back to labels; ties go to the lower index.
pub fn decode(m: &Matrix) -> Vec<Emotion> {
    m.iter_rows().map(|row| Emotion::ALL[argmax(row)]).collect()
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: 0.25, seed: 0, shuffle: true }
    }
}

/// Shuffled (if requested) row order with the first `round(n * test_fraction)`
/// positions going to test. Returns `(train, test)`.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DatasetError::InvalidSplit(format!("test fraction {}", spec.test_fraction)));
    }
    if n < 2 {
        return Err(DatasetError::TooFewRows { rows: n, needed: 2 });
    }
    let mut order: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        Xoshiro256::new(spec.seed).shuffle(&mut order);
    }
    let n_test = (n as f64 * spec.test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(DatasetError::DegenerateSplit { train: n - n_test, test: n_test });
    }
    let train = order.split_off(n_test);
    Ok((train, order))
}

/// Splits rows per [`split_indices`], then drops augmented train rows whose
/// source original landed in test.
pub fn split(table: &FeatureTable, spec: &SplitSpec) -> Result<(FeatureTable, FeatureTable), DatasetError> {
    let (train, test) = split_indices(table.len(), spec)?;
    let test_sources: HashSet<&str> = test
        .iter()
        .filter(|&&i| table.provenance[i].is_original())
        .map(|&i| table.source[i].as_str())
        .collect();
    let train: Vec<usize> = train
        .into_iter()
        .filter(|&i| table.provenance[i].is_original() || !test_sources.contains(table.source[i].as_str()))
        .collect();
    if train.is_empty() {
        return Err(DatasetError::DegenerateSplit { train: 0, test: test.len() });
    }
    Ok((table.select_rows(&train), table.select_rows(&test)))
}
