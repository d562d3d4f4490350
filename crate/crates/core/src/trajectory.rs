//! Per-iteration scaled error records and their CSV encoding.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Fixed leading columns of every trajectory file.
pub const BASE_COLUMNS: [&str; 5] = ["k", "err_x_scaled", "err_theta_scaled_max", "gamma_max", "alpha_max"];

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub k: usize,
    pub err_x: f64,
    pub err_theta: f64,
    pub gamma_max: f64,
    pub alpha_max: f64,
    /// Values for [`ErrorTrajectory::extra_columns`], in order.
    pub extra: Vec<f64>,
}

/// Which iterations get recorded.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordPolicy {
    Every,
    /// Multiples of the stride, plus the final iteration.
    Stride(usize),
    /// About `per_decade` log-spaced points per decade, plus the final iteration.
    LogSpaced {
        per_decade: usize,
    },
}

impl Default for RecordPolicy {
    fn default() -> Self {
        RecordPolicy::LogSpaced { per_decade: 20 }
    }
}

impl RecordPolicy {
    pub fn records(&self, k: usize, horizon: usize) -> bool {
        if k == 0 || k == horizon {
            return true;
        }
        match *self {
            RecordPolicy::Every => true,
            RecordPolicy::Stride(s) => k.is_multiple_of(s.max(1)),
            RecordPolicy::LogSpaced { per_decade } => {
                if k <= 10 || is_power_of_ten(k) {
                    return true;
                }
                let per = per_decade.max(1) as f64;
                let j = ((k as f64).log10() * per).round();
                let target = 10f64.powf(j / per).round() as usize;
                target == k
            }
        }
    }
}

fn is_power_of_ten(mut k: usize) -> bool {
    while k >= 10 && k.is_multiple_of(10) {
        k /= 10;
    }
    k == 1
}

/// Recorded scaled errors of a single run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTrajectory {
    pub extra_columns: Vec<String>,
    pub rows: Vec<TrajectoryRow>,
}

impl ErrorTrajectory {
    pub fn new(extra_columns: &[&str]) -> Self {
        Self { extra_columns: extra_columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: TrajectoryRow) -> Result<()> {
        if row.extra.len() != self.extra_columns.len() {
            return Err(Error::Dimension { expected: self.extra_columns.len(), got: row.extra.len() });
        }
        if let Some(last) = self.rows.last() {
            if row.k <= last.k {
                return Err(Error::Invariant(format!("trajectory steps must increase ({} after {})", row.k, last.k)));
            }
        }
        let finite = row.err_x.is_finite() && row.err_theta.is_finite() && row.err_x >= 0.0 && row.err_theta >= 0.0;
        if !finite {
            return Err(Error::Invariant(format!("non-finite or negative error at k={}", row.k)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn last(&self) -> Option<&TrajectoryRow> {
        self.rows.last()
    }

    /// Row recorded exactly at step `k`.
    pub fn at(&self, k: usize) -> Option<&TrajectoryRow> {
        self.rows.binary_search_by_key(&k, |r| r.k).ok().map(|i| &self.rows[i])
    }

    pub fn extra(&self, row: &TrajectoryRow, name: &str) -> Option<f64> {
        self.extra_columns.iter().position(|c| c == name).map(|i| row.extra[i])
    }

    pub fn header(&self) -> Vec<String> {
        BASE_COLUMNS.iter().map(|s| s.to_string()).chain(self.extra_columns.iter().cloned()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in &self.rows {
            let mut rec = vec![
                r.k.to_string(),
                fmt_f64(r.err_x),
                fmt_f64(r.err_theta),
                fmt_f64(r.gamma_max),
                fmt_f64(r.alpha_max),
            ];
            rec.extend(r.extra.iter().map(|v| fmt_f64(*v)));
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < BASE_COLUMNS.len() || header.iter().zip(BASE_COLUMNS).any(|(a, b)| a != b) {
            return Err(Error::InvalidModel(format!("unexpected trajectory header {header:?}")));
        }
        let mut t = ErrorTrajectory { extra_columns: header[BASE_COLUMNS.len()..].to_vec(), rows: Vec::new() };
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse::<f64>().map_err(|e| Error::InvalidModel(format!("bad number {:?}: {e}", &rec[i])))
            };
            let k = rec[0].parse::<usize>().map_err(|e| Error::InvalidModel(format!("bad step {:?}: {e}", &rec[0])))?;
            let extra = (BASE_COLUMNS.len()..rec.len()).map(num).collect::<Result<Vec<_>>>()?;
            t.push(TrajectoryRow {
                k,
                err_x: num(1)?,
                err_theta: num(2)?,
                gamma_max: num(3)?,
                alpha_max: num(4)?,
                extra,
            })?;
        }
        Ok(t)
    }
}

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}
