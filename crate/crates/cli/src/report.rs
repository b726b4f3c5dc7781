//! Machine-readable reports and their table rendering.

use std::collections::BTreeMap;
use std::fmt;

use liouville_core::catalog::CheckItem;
use liouville_core::metrisability::Analysis;
use liouville_core::mobility::MobilityReport;
use liouville_core::Metric2D;
use liouville_expr::ZeroVerdict;
use serde::{Deserialize, Serialize};

/// Overall outcome, which also fixes the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub is_zero: bool,
    pub tier: String,
}

impl From<&ZeroVerdict> for ZeroReport {
    fn from(v: &ZeroVerdict) -> Self {
        ZeroReport {
            is_zero: v.is_zero,
            tier: v.tier.to_string(),
        }
    }
}

impl fmt::Display for ZeroReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.is_zero { "zero" } else { "nonzero" };
        write!(f, "{word} ({})", self.tier)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilitySummary {
    pub base: [String; 2],
    /// Kernel dimensions from order 2 upward.
    pub dims: Vec<usize>,
    pub m: Option<usize>,
    pub stop_order: usize,
    pub nondegenerate_exists: bool,
    pub degenerate_subspace_dim: usize,
}

impl From<&MobilityReport> for MobilitySummary {
    fn from(r: &MobilityReport) -> Self {
        MobilitySummary {
            base: [r.base.0.to_string(), r.base.1.to_string()],
            dims: r.dims.clone(),
            m: r.m,
            stop_order: r.stop_order,
            nondegenerate_exists: r.nondegenerate_exists,
            degenerate_subspace_dim: r.degenerate_subspace_dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub case: String,
    pub g11: String,
    pub g12: String,
    pub g22: String,
}

impl MetricSummary {
    pub fn new(case: impl Into<String>, g: &Metric2D) -> Self {
        MetricSummary {
            case: case.into(),
            g11: g.e.to_string(),
            g12: g.f.to_string(),
            g22: g.g.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub subject: String,
    pub check: String,
    pub passed: bool,
    pub tier: String,
}

impl From<&CheckItem> for Check {
    fn from(c: &CheckItem) -> Self {
        Check {
            subject: c.subject.clone(),
            check: c.check.clone(),
            passed: c.passed,
            tier: c.tier.clone(),
        }
    }
}

/// A conserved quantity monitored along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralDrift {
    pub name: String,
    pub expression: String,
    pub initial: f64,
    pub max_abs: f64,
    pub relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub init: [f64; 3],
    pub x_end: f64,
    pub termination: String,
    pub pole_at: Option<f64>,
    pub samples: usize,
    pub last: [f64; 3],
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Largest `|y|` difference between the ODE and the geodesic solution.
    pub geodesic_deviation: Option<f64>,
    /// Largest distance from the fitted line in the flat chart.
    pub flat_chart_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalescenceLine {
    pub epsilon: String,
    pub max_error: f64,
    pub ratio: Option<f64>,
}

/// Everything a command found; the JSON form round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub status: Status,
    #[serde(default)]
    pub verdict: Option<String>,
    #[serde(default)]
    pub l1: Option<ZeroReport>,
    #[serde(default)]
    pub l2: Option<ZeroReport>,
    #[serde(default)]
    pub degenerate_condition: Option<ZeroReport>,
    #[serde(default)]
    pub mobility: Option<MobilitySummary>,
    #[serde(default)]
    pub metric: Option<MetricSummary>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub integrals: Vec<IntegralDrift>,
    #[serde(default)]
    pub dynamics: Option<DynamicsSummary>,
    #[serde(default)]
    pub coalescence: Vec<CoalescenceLine>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Wall-clock milliseconds per stage.
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, subject: impl Into<String>) -> Self {
        Report {
            command: command.to_string(),
            subject: subject.into(),
            status: Status::Ok,
            verdict: None,
            l1: None,
            l2: None,
            degenerate_condition: None,
            mobility: None,
            metric: None,
            checks: Vec::new(),
            integrals: Vec::new(),
            dynamics: None,
            coalescence: Vec::new(),
            notes: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn set_analysis(&mut self, a: &Analysis) {
        self.verdict = Some(a.verdict.to_string());
        self.l1 = Some((&a.flatness.l1).into());
        self.l2 = Some((&a.flatness.l2).into());
        self.degenerate_condition = Some((&a.degenerate_condition).into());
        self.mobility = Some((&a.mobility).into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {}", self.command, self.subject)?;
        let status = match self.status {
            Status::Ok => "ok",
            Status::Failed => "FAILED",
            Status::Inconclusive => "inconclusive",
        };
        writeln!(f, "{:<22} {status}", "status")?;
        if let Some(v) = &self.verdict {
            writeln!(f, "{:<22} {v}", "verdict")?;
        }
        if self.l1.is_some() || self.l2.is_some() {
            writeln!(f, "{:<22} L1 {}, L2 {}", "flatness", opt(&self.l1), opt(&self.l2))?;
        }
        if let Some(d) = &self.degenerate_condition {
            writeln!(f, "{:<22} {d}", "degenerate condition")?;
        }
        if let Some(m) = &self.mobility {
            writeln!(
                f,
                "{:<22} m = {} at ({}, {}), dims {:?} to order {}, nondegenerate {}",
                "mobility",
                opt(&m.m),
                m.base[0],
                m.base[1],
                m.dims,
                m.stop_order,
                m.nondegenerate_exists
            )?;
        }
        if let Some(g) = &self.metric {
            writeln!(f, "{:<22} {}", "metric", g.case)?;
            for (name, c) in [("g11", &g.g11), ("g12", &g.g12), ("g22", &g.g22)] {
                writeln!(f, "  {name:<20} {c}")?;
            }
        }
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{mark}  {:<26} {} [{}]", c.subject, c.check, c.tier)?;
        }
        if let Some(d) = &self.dynamics {
            writeln!(
                f,
                "{:<22} from ({}, {}, {}) towards x = {}: {}",
                "trajectory", d.init[0], d.init[1], d.init[2], d.x_end, d.termination
            )?;
            writeln!(
                f,
                "  {:<20} {} samples, last (x, y, p) = ({:.6}, {:.6}, {:.6})",
                "", d.samples, d.last[0], d.last[1], d.last[2]
            )?;
            if let Some(v) = d.geodesic_deviation {
                writeln!(f, "  {:<20} {v:.3e}", "geodesic deviation")?;
            }
            if let Some(v) = d.flat_chart_residual {
                writeln!(f, "  {:<20} {v:.3e}", "flat chart residual")?;
            }
        }
        for i in &self.integrals {
            let mark = if i.passed { "pass" } else { "FAIL" };
            writeln!(
                f,
                "{mark}  drift of {:<16} {:.3e} relative (tolerance {:.0e}), I = {}",
                i.name, i.relative, i.tolerance, i.expression
            )?;
        }
        if !self.coalescence.is_empty() {
            writeln!(f, "{:<14} {:<14} ratio", "epsilon", "max error")?;
            for r in &self.coalescence {
                writeln!(
                    f,
                    "{:<14} {:<14.6e} {}",
                    r.epsilon,
                    r.max_error,
                    opt(&r.ratio.map(|v| format!("{v:.4}")))
                )?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        for (stage, ms) in &self.timings {
            writeln!(f, "{:<22} {ms:.1} ms", format!("time {stage}"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("coalesce", "alpha = 1, gamma = 1");
        r.coalescence.push(CoalescenceLine {
            epsilon: "1/100".into(),
            max_error: 0.1 + 0.2,
            ratio: None,
        });
        r.coalescence.push(CoalescenceLine {
            epsilon: "1/1000".into(),
            max_error: 3.0000000000000004e-2,
            ratio: Some(9.999999999999998),
        });
        r.timings.insert("total".into(), 12.25);
        r.status = Status::Failed;
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
