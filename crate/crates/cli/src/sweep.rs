//! Parameter sweeps: a base scenario plus value axes, expanded as a
//! cartesian product and evaluated through the criteria, one CSV row per
//! grid point. Row order is lexicographic in the axis indices regardless of
//! the worker count.

use crate::output::fmt_f64;
use nlslab_core::criteria::{self, CriterionId};
use nlslab_core::model::{ModelError, Potential, Scenario};
use nlslab_core::observables::initial_moments;
use serde::Deserialize;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

pub const DEFAULT_CAP: usize = 10_000;

pub const ALLOWED_PATHS: [&str; 7] = [
    "params.nu",
    "params.mu",
    "ic.p0",
    "ic.x0",
    "ic.beta",
    "ic.sigma",
    "potential.alpha",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("grid has {points} points, above the cap of {cap}")]
    CapExceeded { points: usize, cap: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axes: Vec<Axis>,
    pub cap: Option<usize>,
    pub out_dir: Option<String>,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, SweepError> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| SweepError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, SweepError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.base.validate()?;
        if self.axes.is_empty() {
            return Err(SweepError::Parse("at least one axis is required".into()));
        }
        for axis in &self.axes {
            if !ALLOWED_PATHS.contains(&axis.path.as_str()) {
                return Err(SweepError::Parse(format!(
                    "unknown parameter path `{}` (allowed: {})",
                    axis.path,
                    ALLOWED_PATHS.join(", ")
                )));
            }
            if axis.values.is_empty() {
                return Err(SweepError::Parse(format!("axis `{}` has no values", axis.path)));
            }
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }
}

fn apply(scenario: &mut Scenario, path: &str, value: f64) -> Result<(), SweepError> {
    match path {
        "params.nu" => scenario.params.nu = value,
        "params.mu" => scenario.params.mu = value,
        "ic.p0" => scenario.ic.p0 = value,
        "ic.x0" => scenario.ic.x0 = value,
        "ic.beta" => scenario.ic.beta = value,
        "ic.sigma" => scenario.ic.sigma = value,
        "potential.alpha" => match &mut scenario.potential {
            Potential::Stark { alpha } | Potential::Quadratic { alpha } => *alpha = value,
            Potential::Free => {
                return Err(SweepError::Parse(
                    "potential.alpha axis requires a stark or quadratic base potential".into(),
                ))
            }
        },
        other => return Err(SweepError::Parse(format!("unknown parameter path `{other}`"))),
    }
    Ok(())
}

/// Axis indices of one grid point, lexicographic (first axis slowest).
fn indices(point: usize, axes: &[Axis]) -> Vec<usize> {
    let mut idx = vec![0; axes.len()];
    let mut rem = point;
    for (k, axis) in axes.iter().enumerate().rev() {
        idx[k] = rem % axis.values.len();
        rem /= axis.values.len();
    }
    idx
}

pub fn csv_header(spec: &SweepSpec) -> String {
    let mut cols: Vec<String> = spec.axes.iter().map(|a| a.path.clone()).collect();
    for id in CriterionId::ALL {
        cols.push(format!("{}_fired", id.as_str()));
    }
    cols.push("t_bound_i".into());
    cols.push("t_bound_v".into());
    cols.join(",")
}

fn point_row(spec: &SweepSpec, point: usize) -> String {
    let idx = indices(point, &spec.axes);
    let mut scenario = spec.base.clone();
    let mut cols: Vec<String> = Vec::new();
    let mut valid = true;
    for (axis, &i) in spec.axes.iter().zip(&idx) {
        let value = axis.values[i];
        cols.push(fmt_f64(value));
        if apply(&mut scenario, &axis.path, value).is_err() {
            valid = false;
        }
    }

    let evaluated = if valid {
        scenario.validate().ok().and_then(|_| {
            let psi0 =
                nlslab_core::model::build_initial_state(&scenario.grid, &scenario.ic).ok()?;
            let m = initial_moments(&psi0, &scenario.params, &scenario.potential).ok()?;
            Some(criteria::sharpness_compare(&m, &scenario.params, &scenario.potential))
        })
    } else {
        None
    };

    match evaluated {
        Some(report) => {
            for id in CriterionId::ALL {
                let v = report.verdicts.iter().find(|v| v.criterion_id == id).unwrap();
                cols.push(if !v.is_applicable() {
                    "na".into()
                } else {
                    v.fired.to_string()
                });
            }
            cols.push(report.time_bound_inertia.map(fmt_f64).unwrap_or_default());
            cols.push(report.time_bound_variance.map(fmt_f64).unwrap_or_default());
        }
        None => {
            for _ in CriterionId::ALL {
                cols.push("na".into());
            }
            cols.push(String::new());
            cols.push(String::new());
        }
    }
    cols.join(",")
}

/// Expands and evaluates the sweep with the given worker count. The output
/// is byte-identical for any worker count: rows are assembled by grid-point
/// index, not completion order.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<String, SweepError> {
    spec.validate()?;
    let points = spec.num_points();
    let cap = spec.cap.unwrap_or(DEFAULT_CAP);
    if points > cap {
        return Err(SweepError::CapExceeded { points, cap });
    }

    let rows: Mutex<Vec<Option<String>>> = Mutex::new(vec![None; points]);
    let next = AtomicUsize::new(0);
    let workers = workers.max(1).min(points.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points {
                    break;
                }
                let row = point_row(spec, i);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });

    let mut out = csv_header(spec);
    out.push('\n');
    for row in rows.into_inner().unwrap() {
        out.push_str(&row.expect("every grid point evaluated"));
        out.push('\n');
    }
    Ok(out)
}
