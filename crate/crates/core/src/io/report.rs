//! One CSV row per solver run.

use std::fmt::Write;

pub const REPORT_HEADER: &str =
    "instance,mode,seed,unassigned,cost,vehicles_used,wall_time_s,ils_iterations,rnr_iterations";

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub mode: String,
    pub seed: u64,
    pub unassigned: usize,
    pub cost: i64,
    pub vehicles_used: usize,
    pub wall_time_s: f64,
    pub ils_iterations: u64,
    pub rnr_iterations: u64,
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{:.3},{},{}",
            field(&self.instance),
            field(&self.mode),
            self.seed,
            self.unassigned,
            self.cost,
            self.vehicles_used,
            self.wall_time_s,
            self.ils_iterations,
            self.rnr_iterations
        );
        s
    }
}
