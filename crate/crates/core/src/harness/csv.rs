//! Run records and their CSV encoding.
//!
//! Header: `problem,order,nt,dt,mode,executor,error_inf,walltime_s`.
//! Reals carry 17 significant digits in scientific notation; files are
//! UTF-8 with LF line endings.

use std::fmt::Write as _;
use std::io::{self, Write};

pub const HEADER: &str = "problem,order,nt,dt,mode,executor,error_inf,walltime_s";

/// Formats a real with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub order: usize,
    pub nt: usize,
    pub dt: f64,
    pub mode: String,
    /// `serial`, `pipelined`, or `euler` for the plain stepper baseline.
    pub executor: String,
    pub error_inf: f64,
    pub walltime_s: f64,
}

impl RunRecord {
    pub fn to_csv_line(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{}",
            self.problem,
            self.order,
            self.nt,
            format_real(self.dt),
            self.mode,
            self.executor,
            format_real(self.error_inf),
            format_real(self.walltime_s)
        )
        .expect("writing to a String cannot fail");
        s
    }

    /// Parses one data line produced by [`to_csv_line`](Self::to_csv_line).
    pub fn parse_line(line: &str) -> Option<Self> {
        let f: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        if f.len() != 8 {
            return None;
        }
        Some(Self {
            problem: f[0].to_string(),
            order: f[1].parse().ok()?,
            nt: f[2].parse().ok()?,
            dt: f[3].parse().ok()?,
            mode: f[4].to_string(),
            executor: f[5].to_string(),
            error_inf: f[6].parse().ok()?,
            walltime_s: f[7].parse().ok()?,
        })
    }
}

pub fn write_records<W: Write>(mut w: W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.to_csv_line())?;
    }
    Ok(())
}

/// Comment line marking a CSV whose series was cut short.
pub fn incomplete_marker(reason: &str) -> String {
    format!("# incomplete: {}", reason.replace('\n', " "))
}
