//! The four subcommands. Each returns a process exit code from
//! [`crate::exit_codes`] and writes artifacts under the output directory.

use crate::exit_codes;
use crate::output;
use crate::sweep::{self, SweepError, SweepSpec};
use crate::verify;
use nlslab_core::criteria;
use nlslab_core::model::{ModelError, Scenario, WaveFunction};
use nlslab_core::observables::initial_moments;
use nlslab_core::solver::{simulate, simulate_from, SolverError, Termination};
use num_complex::Complex64;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOverrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub threshold: Option<f64>,
}

impl RunOverrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        if let Some(dt) = self.dt {
            scenario.solver.dt = dt;
        }
        if let Some(t_end) = self.t_end {
            scenario.solver.t_end = t_end;
        }
        if let Some(threshold) = self.threshold {
            scenario.solver.blowup_threshold = threshold;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

fn load_scenario(path: &Path, overrides: &RunOverrides) -> Result<Scenario, i32> {
    match Scenario::from_path(path) {
        Ok(mut s) => {
            overrides.apply(&mut s);
            if let Err(e) = s.validate() {
                eprintln!("error: {e}");
                return Err(exit_codes::PARSE);
            }
            Ok(s)
        }
        Err(ModelError::Io(e)) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            Err(exit_codes::IO)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(exit_codes::PARSE)
        }
    }
}

/// Evaluate every criterion for one scenario; the exit code reflects only
/// operational failures, never the verdicts themselves.
pub fn cmd_criteria(
    scenario_path: &Path,
    out_dir: Option<&Path>,
    format: OutputFormat,
    overrides: &RunOverrides,
) -> i32 {
    let scenario = match load_scenario(scenario_path, overrides) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = match scenario_report(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_codes::PARSE;
        }
    };
    match format {
        OutputFormat::Json => println!("{}", output::report_json(&report)),
        OutputFormat::Csv => print!("{}", output::verdicts_csv(&report)),
        OutputFormat::Both => {
            print!("{}", output::verdicts_table(&report));
            println!("{}", output::report_json(&report));
        }
    }
    if let Some(dir) = out_dir {
        if let Err(e) = output::write_file(&dir.join("verdicts.json"), &output::report_json(&report))
        {
            eprintln!("error: writing verdicts: {e}");
            return exit_codes::IO;
        }
    }
    exit_codes::SUCCESS
}

pub fn scenario_report(scenario: &Scenario) -> Result<criteria::SharpnessReport, ModelError> {
    let psi0 = nlslab_core::model::build_initial_state(&scenario.grid, &scenario.ic)?;
    let m = initial_moments(&psi0, &scenario.params, &scenario.potential)
        .map_err(|e| ModelError::InvalidParams(e.to_string()))?;
    Ok(criteria::sharpness_compare(&m, &scenario.params, &scenario.potential))
}

/// Parses the two-column `re im` sample list of the raw import path.
pub fn parse_raw_ic(text: &str, n: usize) -> Result<Vec<Complex64>, String> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if parts.len() != 2 {
            return Err(format!("line {}: expected `re im`, got `{line}`", lineno + 1));
        }
        let re: f64 =
            parts[0].parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let im: f64 =
            parts[1].parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(format!("line {}: non-finite sample", lineno + 1));
        }
        values.push(Complex64::new(re, im));
    }
    if values.len() != n {
        return Err(format!("expected {n} samples, got {}", values.len()));
    }
    Ok(values)
}

/// Integrate one scenario; writes `records.csv` and `manifest.json` into
/// the output directory.
pub fn cmd_simulate(
    scenario_path: &Path,
    out_dir: &Path,
    raw_ic: Option<&Path>,
    format: OutputFormat,
    overrides: &RunOverrides,
) -> i32 {
    let scenario = match load_scenario(scenario_path, overrides) {
        Ok(s) => s,
        Err(code) => return code,
    };

    let started = Instant::now();
    let run = match raw_ic {
        None => simulate(&scenario),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return exit_codes::IO;
                }
            };
            match parse_raw_ic(&text, scenario.grid.num_points) {
                Ok(values) => {
                    let psi0 = WaveFunction { grid: scenario.grid, values };
                    let norm = nlslab_core::observables::norm(&psi0);
                    if (norm - 1.0).abs() > 1e-6 {
                        eprintln!(
                            "warning: raw initial state has norm {norm:.6}; criteria assume unit norm"
                        );
                    }
                    simulate_from(&scenario, psi0)
                }
                Err(e) => {
                    eprintln!("error: raw initial state: {e}");
                    return exit_codes::PARSE;
                }
            }
        }
    };
    let result = match run {
        Ok(r) => r,
        Err(SolverError::Model(e)) => {
            eprintln!("error: {e}");
            return exit_codes::PARSE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit_codes::PARSE;
        }
    };
    let wall_time_s = started.elapsed().as_secs_f64();

    let write = |name: &str, contents: &str| -> Result<(), std::io::Error> {
        output::write_file(&out_dir.join(name), contents)
    };
    let io_result = match format {
        OutputFormat::Csv => write("records.csv", &output::records_csv(&result.records)),
        OutputFormat::Json => {
            write("manifest.json", &output::manifest_json(&scenario, &result, wall_time_s))
        }
        OutputFormat::Both => write("records.csv", &output::records_csv(&result.records))
            .and_then(|_| {
                write("manifest.json", &output::manifest_json(&scenario, &result, wall_time_s))
            }),
    };
    if let Err(e) = io_result {
        eprintln!("error: writing artifacts to {}: {e}", out_dir.display());
        return exit_codes::IO;
    }

    match &result.termination {
        Termination::HorizonReached => {
            println!("horizon reached; {} records", result.records.len());
            exit_codes::SUCCESS
        }
        Termination::BlowupDetected { t_detect, grad_norm } => {
            println!("blow-up detected at t = {t_detect} (gradient norm {grad_norm:.3e})");
            exit_codes::SUCCESS
        }
        Termination::NumericalFailure { t, reason } => {
            eprintln!("numerical failure at t = {t}: {reason}");
            exit_codes::NUMERICAL_FAILURE
        }
    }
}

/// Run the invariant battery; exit 0 iff every check passes.
pub fn cmd_verify(scenario_path: &Path, overrides: &RunOverrides) -> i32 {
    let scenario = match load_scenario(scenario_path, overrides) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match verify::run_battery(&scenario) {
        Ok(results) => {
            print!("{}", verify::render(&results));
            if verify::all_passed(&results) {
                exit_codes::SUCCESS
            } else {
                exit_codes::VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_codes::PARSE
        }
    }
}

/// Expand and evaluate a sweep; writes `sweep.csv` into the output
/// directory (the sweep file's `out_dir` field is the fallback).
pub fn cmd_sweep(sweep_path: &Path, out_dir: Option<&Path>, workers: usize) -> i32 {
    let spec = match SweepSpec::from_path(sweep_path) {
        Ok(s) => s,
        Err(SweepError::Io(e)) => {
            eprintln!("error: cannot read {}: {e}", sweep_path.display());
            return exit_codes::IO;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit_codes::PARSE;
        }
    };
    let csv = match sweep::run_sweep(&spec, workers) {
        Ok(csv) => csv,
        Err(e @ SweepError::CapExceeded { .. }) => {
            eprintln!("error: {e}");
            return exit_codes::CAP_EXCEEDED;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit_codes::PARSE;
        }
    };
    let dir = out_dir
        .map(|p| p.to_path_buf())
        .or_else(|| spec.out_dir.as_ref().map(std::path::PathBuf::from))
        .unwrap_or_else(|| std::path::PathBuf::from("out"));
    if let Err(e) = output::write_file(&dir.join("sweep.csv"), &csv) {
        eprintln!("error: writing sweep to {}: {e}", dir.display());
        return exit_codes::IO;
    }
    println!("{} grid points written to {}", spec.num_points(), dir.join("sweep.csv").display());
    exit_codes::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_ic_parsing() {
        let text = "# comment\n0.5 0.0\n0.25, -0.125\n\n1 2\n";
        let v = parse_raw_ic(text, 3).unwrap();
        assert_eq!(v[1], Complex64::new(0.25, -0.125));
        assert!(parse_raw_ic(text, 4).is_err());
        assert!(parse_raw_ic("0.5\n", 1).is_err());
        assert!(parse_raw_ic("nan 0\n", 1).is_err());
    }
}
