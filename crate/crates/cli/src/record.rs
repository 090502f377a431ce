//! One row of sweep output.

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "re_z,im_z,re_E,im_E,err_mixed,n_nodes,region_index,mu,h,time_ns";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SweepRecord {
    pub re_z: f64,
    pub im_z: f64,
    pub re_E: f64,
    pub im_E: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub err_mixed: Option<f64>,
    pub n_nodes: usize,
    pub region_index: usize,
    pub mu: f64,
    pub h: f64,
    pub time_ns: u64,
}

impl SweepRecord {
    /// CSV line without a trailing newline; `{:e}` is shortest round-trip.
    pub fn csv_line(&self) -> String {
        let err = self.err_mixed.map(|e| format!("{e:e}")).unwrap_or_default();
        format!(
            "{:e},{:e},{:e},{:e},{},{},{},{:e},{:e},{}",
            self.re_z, self.im_z, self.re_E, self.im_E, err, self.n_nodes, self.region_index, self.mu, self.h, self.time_ns
        )
    }
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}
