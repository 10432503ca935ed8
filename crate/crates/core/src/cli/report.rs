//! Run reports and their JSON and CSV forms.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use super::cone_input::ConeAnswer;
use super::config::{Command, RunConfig};
use crate::canonical::CanonicalCase;
use crate::error::{Error, Result};
use crate::quadverify::IdentityReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalParams {
    pub case: CanonicalCase,
    pub a: f64,
    pub c: f64,
    pub y: Vec<f64>,
    pub epsilon: f64,
    pub scale: f64,
    /// `(2^k σ / C(n+1,k))^{1/(2k)}`, the feasibility threshold on H in the
    /// negative case.
    pub threshold: f64,
    /// `(2σ / C(n+1,k))^{1/(2k)}`, present when it differs from `threshold`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative_threshold: Option<f64>,
    /// Negative case with `k = 1`.
    pub extrapolated: bool,
    pub metric: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCell {
    pub case: CanonicalCase,
    pub k: usize,
    pub sigma: f64,
    pub h: f64,
    pub feasible: bool,
    pub expected_feasible: bool,
    /// Largest relative error of the measured (σ, H) against the targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: Command,
    pub config: RunConfig,
    pub checks: Vec<IdentityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalParams>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cone: Vec<ConeAnswer>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepCell>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub pass: bool,
    /// Wall-clock seconds per section; not part of the reproducible body.
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: Command, config: RunConfig) -> Self {
        Self {
            command,
            config,
            checks: Vec::new(),
            canonical: None,
            cone: Vec::new(),
            sweep: Vec::new(),
            notes: Vec::new(),
            pass: true,
            timings: BTreeMap::new(),
        }
    }

    pub fn finish(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    /// The report without timings, for reproducibility comparisons.
    pub fn body(&self) -> RunReport {
        RunReport { timings: BTreeMap::new(), ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Argument(format!("report serialization: {e}")))
    }

    /// Convergence table: one row per check.
    pub fn write_checks_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Argument(format!("csv: {e}"));
        w.write_record(["identity", "N", "lhs", "rhs", "abs_gap", "rel_gap", "ratio"]).map_err(io)?;
        for c in &self.checks {
            let ratio = c.ratio.map(|r| r.to_string()).unwrap_or_default();
            w.write_record([
                c.identity.clone(),
                c.resolution.to_string(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.abs_gap.to_string(),
                c.rel_gap.to_string(),
                ratio,
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Argument(format!("csv: {e}")))
    }

    /// Sweep matrix: one row per cell.
    pub fn write_sweep_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Argument(format!("csv: {e}"));
        w.write_record(["case", "k", "sigma", "h", "feasible", "expected_feasible", "round_trip_error"]).map_err(io)?;
        for c in &self.sweep {
            w.write_record([
                format!("{:?}", c.case),
                c.k.to_string(),
                c.sigma.to_string(),
                c.h.to_string(),
                c.feasible.to_string(),
                c.expected_feasible.to_string(),
                c.round_trip_error.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Argument(format!("csv: {e}")))
    }
}

/// Parses a report and checks its internal consistency.
pub fn parse_report(text: &str) -> Result<RunReport> {
    let r: RunReport = serde_json::from_str(text).map_err(|e| Error::Argument(format!("report: {e}")))?;
    if r.pass != r.checks.iter().all(|c| c.pass) {
        return Err(Error::Argument("report verdict disagrees with its checks".into()));
    }
    for c in &r.checks {
        let gap = (c.lhs - c.rhs).abs();
        if !(c.abs_gap == gap || (c.abs_gap - gap).abs() <= 1e-12 * gap.max(1.0)) {
            return Err(Error::Argument(format!("check {} has inconsistent abs_gap", c.identity)));
        }
    }
    Ok(r)
}
