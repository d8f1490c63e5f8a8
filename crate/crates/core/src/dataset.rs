//! Covariates plus outcome, and the dataset CSV format.
//!
//! The CSV has a header row; columns `x1..xd` followed by `y` for
//! regression/classification or `time,event` for survival data.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::{fmt_float, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Regression,
    Classification,
    Survival,
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutcomeKind::Regression => "regression",
            OutcomeKind::Classification => "classification",
            OutcomeKind::Survival => "survival",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Continuous(Vec<f64>),
    /// Labels in {0, 1}.
    Binary(Vec<f64>),
    Survival { time: Vec<f64>, event: Vec<bool> },
}

impl Outcome {
    pub fn len(&self) -> usize {
        match self {
            Outcome::Continuous(y) | Outcome::Binary(y) => y.len(),
            Outcome::Survival { time, .. } => time.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Continuous(_) => OutcomeKind::Regression,
            Outcome::Binary(_) => OutcomeKind::Classification,
            Outcome::Survival { .. } => OutcomeKind::Survival,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Outcome::Continuous(y) => {
                if let Some(i) = y.iter().position(|v| !v.is_finite()) {
                    return Err(Error::InvalidData(format!("non-finite response at row {i}")));
                }
            }
            Outcome::Binary(y) => {
                if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
                    return Err(Error::InvalidData(format!(
                        "label {} at row {i} is not 0 or 1",
                        y[i]
                    )));
                }
            }
            Outcome::Survival { time, event } => {
                if time.len() != event.len() {
                    return Err(Error::Dimension(format!(
                        "{} times but {} event indicators",
                        time.len(),
                        event.len()
                    )));
                }
                if let Some(i) = time.iter().position(|&t| !(t > 0.0 && t.is_finite())) {
                    return Err(Error::InvalidData(format!(
                        "survival time {} at row {i} is not a positive finite number",
                        time[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        match self {
            Outcome::Continuous(y) => Outcome::Continuous(pick(y)),
            Outcome::Binary(y) => Outcome::Binary(pick(y)),
            Outcome::Survival { time, event } => Outcome::Survival {
                time: pick(time),
                event: idx.iter().map(|&i| event[i]).collect(),
            },
        }
    }

    /// Class labels, for stratified splitting.
    pub fn labels(&self) -> Option<&[f64]> {
        match self {
            Outcome::Binary(y) => Some(y),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub outcome: Outcome,
}

impl Dataset {
    pub fn new(x: Matrix, outcome: Outcome) -> Result<Self> {
        if x.rows() != outcome.len() {
            return Err(Error::Dimension(format!(
                "{} covariate rows but {} outcomes",
                x.rows(),
                outcome.len()
            )));
        }
        if !x.is_finite() {
            return Err(Error::InvalidData("covariates contain non-finite values".into()));
        }
        outcome.validate()?;
        Ok(Self { x, outcome })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn kind(&self) -> OutcomeKind {
        self.outcome.kind()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(rows),
            outcome: self.outcome.select(rows),
        }
    }

    pub fn with_columns(&self, cols: &[usize]) -> Self {
        Self {
            x: self.x.select_columns(cols),
            outcome: self.outcome.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.d()).map(|j| format!("x{j}")).collect();
        match self.outcome {
            Outcome::Survival { .. } => header.extend(["time".into(), "event".into()]),
            _ => header.push("y".into()),
        }
        w.write_record(&header)?;
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for i in 0..self.n() {
            record.clear();
            record.extend(self.x.row(i).iter().map(|&v| fmt_float(v)));
            match &self.outcome {
                Outcome::Continuous(y) => record.push(fmt_float(y[i])),
                Outcome::Binary(y) => record.push(format!("{}", y[i] as u8)),
                Outcome::Survival { time, event } => {
                    record.push(fmt_float(time[i]));
                    record.push(if event[i] { "1".into() } else { "0".into() });
                }
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the dataset CSV. `kind` disambiguates the `y` column.
    pub fn read_csv<R: Read>(reader: R, kind: OutcomeKind) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let n_out = if kind == OutcomeKind::Survival { 2 } else { 1 };
        if header.len() < n_out {
            return Err(Error::InvalidData("header has too few columns".into()));
        }
        let d = header.len() - n_out;
        for (j, name) in header[..d].iter().enumerate() {
            if *name != format!("x{}", j + 1) {
                return Err(Error::InvalidData(format!(
                    "column {} is named '{name}', expected 'x{}'",
                    j + 1,
                    j + 1
                )));
            }
        }
        let expected_tail: &[&str] = if kind == OutcomeKind::Survival {
            &["time", "event"]
        } else {
            &["y"]
        };
        if header[d..] != *expected_tail {
            return Err(Error::InvalidData(format!(
                "trailing columns {:?} do not match {:?} for {kind} data",
                &header[d..],
                expected_tail
            )));
        }

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut events = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::InvalidData(format!(
                    "row {} has {} fields, expected {}",
                    line + 1,
                    rec.len(),
                    header.len()
                )));
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::InvalidData(format!(
                        "row {}, column '{}': '{field}' is not a number",
                        line + 1,
                        header[j]
                    ))
                })?;
                if j < d {
                    xs.push(v);
                } else if j == d {
                    ys.push(v);
                } else {
                    if v != 0.0 && v != 1.0 {
                        return Err(Error::InvalidData(format!(
                            "row {}: event indicator '{field}' is not 0 or 1",
                            line + 1
                        )));
                    }
                    events.push(v == 1.0);
                }
            }
        }
        let n = ys.len();
        let x = Matrix::from_vec(n, d, xs)?;
        let outcome = match kind {
            OutcomeKind::Regression => Outcome::Continuous(ys),
            OutcomeKind::Classification => Outcome::Binary(ys),
            OutcomeKind::Survival => Outcome::Survival {
                time: ys,
                event: events,
            },
        };
        Dataset::new(x, outcome)
    }

    /// Reads only the leading `x1..xd` columns of a CSV, ignoring any outcome
    /// columns after them.
    pub fn read_covariates_csv<R: Read>(reader: R) -> Result<Matrix> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let d = header
            .iter()
            .enumerate()
            .take_while(|(j, name)| **name == format!("x{}", j + 1))
            .count();
        let mut xs = Vec::new();
        let mut n = 0;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::InvalidData(format!(
                    "row {} has {} fields, expected {}",
                    line + 1,
                    rec.len(),
                    header.len()
                )));
            }
            for (j, field) in rec.iter().take(d).enumerate() {
                xs.push(field.trim().parse().map_err(|_| {
                    Error::InvalidData(format!("row {}, column 'x{}': '{field}' is not a number", line + 1, j + 1))
                })?);
            }
            n += 1;
        }
        Matrix::from_vec(n, d, xs)
    }
}
