//! One JSON report per run, with a CSV mirror of the tabular fields.
//! Reports are deterministic for a fixed (config, seed) apart from the
//! wall-clock field.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize)]
pub struct QCount {
    pub q: u64,
    pub count: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub q_counts: Vec<QCount>,
    pub dim_estimate: Option<f64>,
    pub bound: Option<i64>,
    pub pass: bool,
    pub warnings: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub wall_clock_ms: u128,
}

impl Report {
    pub fn new(experiment: &str, params: BTreeMap<String, String>, seed: u64) -> Report {
        Report {
            experiment: experiment.to_string(),
            params,
            q_counts: Vec::new(),
            dim_estimate: None,
            bound: None,
            pass: false,
            warnings: Vec::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("experiment,q,count,dim_estimate,bound,pass,seed,version\n");
        if self.q_counts.is_empty() {
            out.push_str(&format!(
                "{},,,{},{},{},{},{}\n",
                self.experiment,
                self.dim_estimate.map_or(String::new(), |d| d.to_string()),
                self.bound.map_or(String::new(), |b| b.to_string()),
                self.pass,
                self.seed,
                self.version
            ));
        }
        for qc in &self.q_counts {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.experiment,
                qc.q,
                qc.count,
                self.dim_estimate.map_or(String::new(), |d| d.to_string()),
                self.bound.map_or(String::new(), |b| b.to_string()),
                self.pass,
                self.seed,
                self.version
            ));
        }
        out
    }

    /// Heuristic dimension from the last two counts: log(N2/N1)/log(q2/q1).
    pub fn estimate_dim(&mut self) {
        if self.q_counts.len() >= 2 {
            let a = &self.q_counts[self.q_counts.len() - 2];
            let b = &self.q_counts[self.q_counts.len() - 1];
            if a.count > 0 && b.count > 0 && a.q != b.q {
                let est = ((b.count as f64).ln() - (a.count as f64).ln())
                    / ((b.q as f64).ln() - (a.q as f64).ln());
                self.dim_estimate = Some(est);
            }
        }
    }
}
