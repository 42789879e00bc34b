//! Deterministic artifact serialization: fixed 17-significant-digit float
//! formatting, the records CSV, the run manifest and the verdicts report.

use nlslab_core::criteria::SharpnessReport;
use nlslab_core::model::Scenario;
use nlslab_core::observables::ObservableRecord;
use nlslab_core::solver::RunResult;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// 17 significant digits: round-trips every f64 and keeps repeated runs
/// byte-identical.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn records_csv(records: &[ObservableRecord]) -> String {
    let mut out = String::from(ObservableRecord::CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&rec.to_csv_row());
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub scenario: &'a Scenario,
    pub termination: &'a nlslab_core::solver::Termination,
    pub fingerprint: &'a str,
    pub truncation_warnings: &'a [f64],
    pub wall_time_s: f64,
    pub versions: BTreeMap<&'static str, &'static str>,
}

pub fn manifest_json(scenario: &Scenario, result: &RunResult, wall_time_s: f64) -> String {
    let manifest = Manifest {
        scenario,
        termination: &result.termination,
        fingerprint: &result.fingerprint,
        truncation_warnings: &result.truncation_warnings,
        wall_time_s,
        versions: BTreeMap::from([
            ("nlslab-core", nlslab_core::VERSION),
            ("nlslab-cli", env!("CARGO_PKG_VERSION")),
        ]),
    };
    serde_json::to_string_pretty(&manifest).expect("manifest serialization")
}

pub fn report_json(report: &SharpnessReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization")
}

/// One CSV row per criterion verdict.
pub fn verdicts_csv(report: &SharpnessReport) -> String {
    let mut out = String::from(
        "criterion_id,applicable,fired,direction,sub_condition,time_bound_future,time_bound_past\n",
    );
    for v in &report.verdicts {
        let applicable = v.is_applicable();
        let direction = serde_json::to_value(v.direction).unwrap();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v.criterion_id.as_str(),
            applicable,
            v.fired,
            direction.as_str().unwrap(),
            v.sub_condition.as_deref().unwrap_or(""),
            v.time_bound_future.map(fmt_f64).unwrap_or_default(),
            v.time_bound_past.map(fmt_f64).unwrap_or_default(),
        ));
    }
    out
}

/// Human-readable verdict table for standard output.
pub fn verdicts_table(report: &SharpnessReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:<11} {:<6} {:<7} {:<14} {:>12} {:>12}\n",
        "criterion", "applicable", "fired", "dir", "clause", "T_future", "T_past"
    ));
    for v in &report.verdicts {
        let dir = serde_json::to_value(v.direction).unwrap();
        let fmt_t = |t: Option<f64>| t.map(|t| format!("{t:.6}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<20} {:<11} {:<6} {:<7} {:<14} {:>12} {:>12}\n",
            v.criterion_id.as_str(),
            if v.is_applicable() { "yes" } else { "no" },
            v.fired,
            dir.as_str().unwrap(),
            v.sub_condition.as_deref().unwrap_or("-"),
            fmt_t(v.time_bound_future),
            fmt_t(v.time_bound_past),
        ));
    }
    for imp in &report.implications {
        out.push_str(&format!(
            "implication [{}]: premise={} conclusion={} holds={}\n",
            imp.name, imp.premise_fired, imp.conclusion_fired, imp.holds
        ));
    }
    match (report.time_bound_inertia, report.time_bound_variance) {
        (Some(ti), Some(tv)) => out.push_str(&format!(
            "collapse-time bounds: inertia {ti:.6}, variance {tv:.6} (variance tighter: {})\n",
            report.variance_bound_tighter.unwrap_or(false)
        )),
        (None, Some(tv)) => {
            out.push_str(&format!("collapse-time bounds: variance {tv:.6} (inertia route: none)\n"))
        }
        (Some(ti), None) => {
            out.push_str(&format!("collapse-time bounds: inertia {ti:.6} (variance route: none)\n"))
        }
        (None, None) => out.push_str("collapse-time bounds: none within horizon\n"),
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_digits_and_round_trips() {
        for x in [1.0, -0.3626, 1.0 / 3.0, 6.02e23, 1e-300] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
