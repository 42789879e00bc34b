//! Strang-split spectral time integrator with observable recording and
//! gradient-norm collapse detection.
//!
//! One step applies `exp(-i dt/2 (V + nu |psi|^2mu))` pointwise, a full
//! kinetic factor `exp(-i dt k^2 / 2)` in Fourier space, and the pointwise
//! half factor again. The pointwise factor is an exact phase rotation
//! (|psi| is invariant under it), so the only splitting error is the
//! kinetic/potential non-commutativity, of second order in dt. Every factor
//! is unitary, which pins the norm to rounding accuracy.

use crate::model::{GridSpec, ModelError, NlsParams, Potential, Scenario, WaveFunction};
use crate::observables::{self, ObsError, ObservableRecord};
use crate::spectral::SpectralOps;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Observable(#[from] ObsError),
    #[error("blow-up threshold {threshold} must exceed the initial gradient norm {initial}")]
    ThresholdTooLow { threshold: f64, initial: f64 },
    #[error("non-finite amplitude at t = {t}")]
    NonFinite { t: f64 },
    #[error("virial residual needs at least 3 records, got {0}")]
    InsufficientRecords(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    HorizonReached,
    BlowupDetected { t_detect: f64, grad_norm: f64 },
    NumericalFailure { t: f64, reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub records: Vec<ObservableRecord>,
    pub termination: Termination,
    /// Scenario provenance, carried so results compared across resolutions
    /// stay attributable.
    pub fingerprint: String,
    /// Record times at which the state stopped decaying at the box edge;
    /// the run continues but is domain-truncation limited from then on.
    pub truncation_warnings: Vec<f64>,
}

/// Cached plans, potential samples and wavenumbers for repeated stepping on
/// one grid.
pub struct Stepper {
    ops: SpectralOps,
    potential_samples: Vec<f64>,
    nu: f64,
    mu: f64,
}

impl Stepper {
    pub fn new(grid: &GridSpec, params: &NlsParams, potential: &Potential) -> Self {
        let ops = SpectralOps::new(grid.num_points, grid.half_width);
        let potential_samples = (0..grid.num_points)
            .map(|j| potential.value(grid.node(j)))
            .collect();
        Stepper { ops, potential_samples, nu: params.nu, mu: params.mu }
    }

    fn density_power(&self, rho: f64) -> f64 {
        // |psi|^(2 mu) from rho = |psi|^2
        if self.mu == 1.0 {
            rho
        } else if self.mu == 2.0 {
            rho * rho
        } else {
            rho.powf(self.mu)
        }
    }

    fn phase_half_step(&self, values: &mut [Complex64], dt: f64) {
        for (v, &pot) in values.iter_mut().zip(&self.potential_samples) {
            let rho = v.norm_sqr();
            let theta = -0.5 * dt * (pot + self.nu * self.density_power(rho));
            *v *= Complex64::from_polar(1.0, theta);
        }
    }

    fn kinetic_full_step(&self, values: &mut [Complex64], dt: f64) {
        self.ops.forward(values);
        for (v, &ksq) in values.iter_mut().zip(self.ops.k_squared()) {
            *v *= Complex64::from_polar(1.0, -0.5 * dt * ksq);
        }
        self.ops.inverse_scaled(values);
    }

    /// One Strang step in place; `dt < 0` steps backward in time.
    pub fn step_in_place(&self, values: &mut [Complex64], dt: f64) {
        self.phase_half_step(values, dt);
        self.kinetic_full_step(values, dt);
        self.phase_half_step(values, dt);
    }

    pub fn all_finite(values: &[Complex64]) -> bool {
        values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// One Strang step as a pure function; builds plans on each call, so use a
/// [`Stepper`] for loops. `dt = 0` is the identity.
pub fn step(
    psi: &WaveFunction,
    params: &NlsParams,
    potential: &Potential,
    dt: f64,
) -> Result<WaveFunction, SolverError> {
    let stepper = Stepper::new(&psi.grid, params, potential);
    let mut values = psi.values.clone();
    stepper.step_in_place(&mut values, dt);
    if !Stepper::all_finite(&values) {
        return Err(SolverError::NonFinite { t: dt });
    }
    Ok(WaveFunction { grid: psi.grid, values })
}

/// Gradient-norm collapse proxy: non-strict crossing of the scenario
/// threshold.
pub fn detect_blowup(record: &ObservableRecord, scenario: &Scenario) -> bool {
    record.grad_norm >= scenario.solver.blowup_threshold
}

/// Integrates the scenario from `t = 0` toward `t_end`, recording every
/// `record_stride` steps (plus the initial and final states). Collapse
/// detection and non-finite amplitudes terminate the run early; both are
/// results, not errors.
pub fn simulate(scenario: &Scenario) -> Result<RunResult, SolverError> {
    scenario.validate()?;
    let psi0 = crate::model::build_initial_state(&scenario.grid, &scenario.ic)?;
    simulate_from(scenario, psi0)
}

/// Same as [`simulate`] but starting from caller-supplied samples (the raw
/// import path); the state must live on the scenario grid.
pub fn simulate_from(scenario: &Scenario, psi0: WaveFunction) -> Result<RunResult, SolverError> {
    scenario.validate()?;
    if psi0.grid != scenario.grid {
        return Err(SolverError::Model(ModelError::InvalidParams(
            "initial state grid does not match the scenario grid".into(),
        )));
    }
    let initial_grad = observables::grad_norm_sq(&psi0).sqrt();
    if scenario.solver.blowup_threshold <= initial_grad {
        return Err(SolverError::ThresholdTooLow {
            threshold: scenario.solver.blowup_threshold,
            initial: initial_grad,
        });
    }

    let params = &scenario.params;
    let potential = &scenario.potential;
    let stepper = Stepper::new(&scenario.grid, params, potential);
    let dt = scenario.solver.dt.copysign(scenario.solver.t_end);
    let n_steps = (scenario.solver.t_end / dt).round().max(1.0) as u64;
    let stride = scenario.solver.record_stride as u64;

    let mut values = psi0.values;
    let mut records = Vec::new();
    let mut truncation_warnings = Vec::new();
    let mut termination = Termination::HorizonReached;

    let capture = |values: &[Complex64],
                       t: f64,
                       records: &mut Vec<ObservableRecord>,
                       warnings: &mut Vec<f64>|
     -> Result<ObservableRecord, SolverError> {
        let psi = WaveFunction { grid: scenario.grid, values: values.to_vec() };
        if !psi.boundary_decay_ok(crate::model::DEFAULT_DECAY_LIMIT) {
            warnings.push(t);
        }
        let rec = observables::record(&psi, params, potential, t)?;
        records.push(rec);
        Ok(rec)
    };

    let rec0 = capture(&values, 0.0, &mut records, &mut truncation_warnings)?;
    if detect_blowup(&rec0, scenario) {
        // threshold validation above makes this unreachable; kept for the
        // raw import path where grad norms can sit at the threshold
        termination = Termination::BlowupDetected { t_detect: 0.0, grad_norm: rec0.grad_norm };
    } else {
        for k in 1..=n_steps {
            stepper.step_in_place(&mut values, dt);
            let t = k as f64 * dt;
            if !Stepper::all_finite(&values) {
                termination =
                    Termination::NumericalFailure { t, reason: "non-finite amplitude".into() };
                break;
            }
            if k % stride == 0 || k == n_steps {
                let rec = capture(&values, t, &mut records, &mut truncation_warnings)?;
                if detect_blowup(&rec, scenario) {
                    termination =
                        Termination::BlowupDetected { t_detect: t, grad_norm: rec.grad_norm };
                    break;
                }
            }
        }
    }

    // residual pass: interior records get the centered-stencil value
    if records.len() >= 3 {
        let residuals = virial_residual(&records, params, potential)?;
        for (rec, r) in records[1..].iter_mut().zip(residuals) {
            rec.virial_residual = r;
        }
    }

    Ok(RunResult {
        records,
        termination,
        fingerprint: scenario.fingerprint(),
        truncation_warnings,
    })
}

/// Central second difference of the recorded inertia against the analytic
/// right-hand side, one value per interior record. The records must be
/// uniformly spaced in time; the trailing record of a run is dropped when
/// it sits off stride.
pub fn virial_residual(
    records: &[ObservableRecord],
    params: &NlsParams,
    potential: &Potential,
) -> Result<Vec<f64>, SolverError> {
    if records.len() < 3 {
        return Err(SolverError::InsufficientRecords(records.len()));
    }
    let h = records[1].t - records[0].t;
    let uniform_len = {
        let mut len = records.len();
        let last_gap = records[len - 1].t - records[len - 2].t;
        if (last_gap - h).abs() > 1e-9 * h.abs() {
            len -= 1;
        }
        len
    };
    if uniform_len < 3 {
        return Err(SolverError::InsufficientRecords(uniform_len));
    }
    let mut out = Vec::with_capacity(uniform_len - 2);
    for k in 1..uniform_len - 1 {
        let second_diff = (records[k - 1].inertia - 2.0 * records[k].inertia
            + records[k + 1].inertia)
            / (h * h);
        let rhs = observables::virial_rhs_of_record(&records[k], params, potential);
        out.push(second_diff - rhs);
    }
    Ok(out)
}
