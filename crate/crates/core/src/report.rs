//! Flat CSV rows and JSON summaries.

use std::io::Write;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::experiments::GridPoint;
use crate::params::Params;
use crate::scalar::Real;

/// Full-precision scientific notation used for every number in CSV output.
pub fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.17e}", x.as_f64())
}

/// One profile of a constant scan. Carries everything needed to recompute
/// the ratio offline.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ScanRow<T> {
    pub index: usize,
    pub theorem: String,
    pub family: String,
    pub n: usize,
    pub p: T,
    pub lambda: T,
    pub radius: T,
    pub eps: T,
    pub domain_radius: T,
    pub grad_p: T,
    pub crit: T,
    pub weak: T,
    pub deficit: T,
    pub distance: T,
    pub remainder: T,
    pub ratio: T,
    pub holds: bool,
    /// Empty for admissible rows.
    pub filter_reason: String,
}

impl<T: Real> ScanRow<T> {
    pub fn new(index: usize, params: &Params<T>, point: GridPoint<T>, domain_radius: T) -> Self {
        Self {
            index,
            theorem: String::new(),
            family: String::new(),
            n: params.n,
            p: params.p,
            lambda: point.lambda,
            radius: point.radius,
            eps: point.eps,
            domain_radius,
            grad_p: T::nan(),
            crit: T::nan(),
            weak: T::nan(),
            deficit: T::nan(),
            distance: T::nan(),
            remainder: T::nan(),
            ratio: T::nan(),
            holds: false,
            filter_reason: String::new(),
        }
    }

    pub fn filtered(index: usize, params: &Params<T>, point: GridPoint<T>, domain_radius: T, reason: &str) -> Self {
        Self {
            filter_reason: reason.to_string(),
            ..Self::new(index, params, point, domain_radius)
        }
    }

    pub fn status(&self) -> &'static str {
        if !self.filter_reason.is_empty() {
            "filtered"
        } else if self.holds {
            "pass"
        } else {
            "fail"
        }
    }

    pub const HEADER: [&'static str; 19] = [
        "row",
        "theorem",
        "family",
        "N",
        "p",
        "lambda",
        "R",
        "eps",
        "domain_R",
        "grad_p",
        "crit",
        "weak",
        "deficit",
        "distance",
        "remainder",
        "ratio",
        "status",
        "index",
        "note",
    ];

    pub fn record(&self, row: usize) -> Vec<String> {
        vec![
            row.to_string(),
            self.theorem.clone(),
            self.family.clone(),
            self.n.to_string(),
            fmt_num(self.p),
            fmt_num(self.lambda),
            fmt_num(self.radius),
            fmt_num(self.eps),
            fmt_num(self.domain_radius),
            fmt_num(self.grad_p),
            fmt_num(self.crit),
            fmt_num(self.weak),
            fmt_num(self.deficit),
            fmt_num(self.distance),
            fmt_num(self.remainder),
            fmt_num(self.ratio),
            self.status().to_string(),
            self.index.to_string(),
            self.filter_reason.clone(),
        ]
    }
}

/// A CSV table with a fixed header and string cells.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(LabError::Experiment(format!(
                "row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Table of scan rows; the `row` column is the 0-based position.
    pub fn from_scan<T: Real>(rows: &[ScanRow<T>]) -> Self {
        let mut t = Self::new(&ScanRow::<T>::HEADER);
        t.rows = rows.iter().enumerate().map(|(i, r)| r.record(i)).collect();
        t
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| LabError::Io(e.to_string()))
    }
}

/// Pretty JSON for any serializable summary.
pub fn to_json<S: Serialize>(value: &S) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| LabError::Io(e.to_string()))
}
