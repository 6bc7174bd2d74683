//! Trajectory CSV files.

use std::io;
use std::path::Path;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 6] = ["t", "E_b", "delta_E", "ergotropy", "trace_dev", "min_eig"];

/// 17 significant digits, `.` decimal point.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of a trajectory CSV, in [`COLUMNS`] order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryTable {
    pub rows: Vec<[f64; 6]>,
}

impl TrajectoryTable {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let rows = (0..traj.len())
            .map(|k| {
                [traj.times[k], traj.e_b[k], traj.delta_e[k], traj.ergotropy[k], traj.trace_dev[k], traj.min_eig[k]]
            })
            .collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = COLUMNS
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Usage(format!("no column '{name}' (columns: {})", COLUMNS.join(", "))))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_to<W: io::Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_value(x)))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        buf
    }

    pub fn read_from<R: io::Read>(source: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
        let header = r.headers()?.clone();
        if header.iter().ne(COLUMNS) {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "expected header '{}', got '{}'",
                    COLUMNS.join(","),
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut rows = Vec::new();
        for (k, record) in r.records().enumerate() {
            let record = record?;
            let line = k + 2;
            if record.len() != COLUMNS.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields, got {}", COLUMNS.len(), record.len()),
                });
            }
            let mut row = [0.0; 6];
            for (slot, field) in row.iter_mut().zip(record.iter()) {
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse { line, msg: format!("bad number '{field}': {e}") })?;
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(io::BufReader::new(file))
    }
}
