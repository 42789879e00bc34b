//! Scalar functionals of the state: norms, energy, position/momentum means,
//! moment of inertia, variance, their initial rates, and the right-hand
//! sides of the inertia identity for each potential.
//!
//! Quadrature is the rectangle rule `dx * sum`, which on a periodic grid is
//! spectrally accurate for smooth decaying integrands. Expectation values
//! divide by the squared norm so diagnostics stay meaningful if a run
//! drifts off unit norm; `norm`, `energy`, `lp_power_norm` and
//! `grad_norm_sq` are plain functionals of the samples.

use crate::model::{NlsParams, Potential, WaveFunction};
use crate::spectral;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObsError {
    #[error("zero-norm state")]
    ZeroNorm,
}

/// Discrete L2 norm.
pub fn norm(psi: &WaveFunction) -> f64 {
    norm_sq(psi).sqrt()
}

pub fn norm_sq(psi: &WaveFunction) -> f64 {
    let dx = psi.grid.dx();
    psi.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
}

/// `int |psi|^(2 mu + 2) dx`.
pub fn lp_power_norm(psi: &WaveFunction, mu: f64) -> f64 {
    let dx = psi.grid.dx();
    let p = mu + 1.0;
    psi.values.iter().map(|v| v.norm_sqr().powf(p)).sum::<f64>() * dx
}

/// `int |psi'|^2 dx` with the derivative taken spectrally.
pub fn grad_norm_sq(psi: &WaveFunction) -> f64 {
    let dx = psi.grid.dx();
    let d = spectral::derivative(&psi.values, psi.grid.half_width);
    d.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
}

fn nonzero_norm_sq(psi: &WaveFunction) -> Result<f64, ObsError> {
    let ns = norm_sq(psi);
    if ns == 0.0 {
        Err(ObsError::ZeroNorm)
    } else {
        Ok(ns)
    }
}

/// Mean position `<x> = int x |psi|^2 dx / N^2`.
pub fn mean_position(psi: &WaveFunction) -> Result<f64, ObsError> {
    let ns = nonzero_norm_sq(psi)?;
    let dx = psi.grid.dx();
    let raw: f64 = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| psi.grid.node(j) * v.norm_sqr())
        .sum::<f64>()
        * dx;
    Ok(raw / ns)
}

/// Mean momentum `<p> = Re int conj(psi) (-i psi') dx / N^2`.
pub fn mean_momentum(psi: &WaveFunction) -> Result<f64, ObsError> {
    let ns = nonzero_norm_sq(psi)?;
    let dx = psi.grid.dx();
    let d = spectral::derivative(&psi.values, psi.grid.half_width);
    let raw: f64 = psi
        .values
        .iter()
        .zip(&d)
        .map(|(v, dv)| (v.conj() * Complex64::new(0.0, -1.0) * dv).re)
        .sum::<f64>()
        * dx;
    Ok(raw / ns)
}

use num_complex::Complex64;

/// Moment of inertia `I = <x^2>`.
pub fn moment_of_inertia(psi: &WaveFunction) -> Result<f64, ObsError> {
    let ns = nonzero_norm_sq(psi)?;
    let dx = psi.grid.dx();
    let raw: f64 = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let x = psi.grid.node(j);
            x * x * v.norm_sqr()
        })
        .sum::<f64>()
        * dx;
    Ok(raw / ns)
}

/// Variance `V = I - <x>^2`, the second moment about the packet center.
pub fn variance(psi: &WaveFunction) -> Result<f64, ObsError> {
    let i = moment_of_inertia(psi)?;
    let x = mean_position(psi)?;
    Ok(i - x * x)
}

/// `Re <x psi, p psi> / N^2`, the position-momentum correlation driving the
/// inertia rate.
pub fn xp_correlation(psi: &WaveFunction) -> Result<f64, ObsError> {
    let ns = nonzero_norm_sq(psi)?;
    let dx = psi.grid.dx();
    let d = spectral::derivative(&psi.values, psi.grid.half_width);
    let raw: f64 = psi
        .values
        .iter()
        .zip(&d)
        .enumerate()
        .map(|(j, (v, dv))| {
            let x = psi.grid.node(j);
            // Re[ conj(x psi) * (-i psi') ]
            (x * v.conj() * Complex64::new(0.0, -1.0) * dv).re
        })
        .sum::<f64>()
        * dx;
    Ok(raw / ns)
}

/// Initial inertia rate `dI/dt(0) = 2 Re <x psi, p psi>`.
pub fn idot0(psi: &WaveFunction) -> Result<f64, ObsError> {
    Ok(2.0 * xp_correlation(psi)?)
}

/// Initial variance rate `dV/dt(0) = dI/dt(0) - 2 <x><p>`.
pub fn vdot0(psi: &WaveFunction) -> Result<f64, ObsError> {
    Ok(idot0(psi)? - 2.0 * mean_position(psi)? * mean_momentum(psi)?)
}

/// Conserved energy
/// `E = 1/2 ||psi'||^2 + int V |psi|^2 + nu/(mu+1) ||psi||_{2mu+2}^{2mu+2}`.
pub fn energy(
    psi: &WaveFunction,
    params: &NlsParams,
    potential: &Potential,
) -> Result<f64, ObsError> {
    nonzero_norm_sq(psi)?;
    let dx = psi.grid.dx();
    let kinetic = 0.5 * grad_norm_sq(psi);
    let pot: f64 = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| potential.value(psi.grid.node(j)) * v.norm_sqr())
        .sum::<f64>()
        * dx;
    let nonlinear = params.nu / (params.mu + 1.0) * lp_power_norm(psi, params.mu);
    Ok(kinetic + pot + nonlinear)
}

/// Right-hand side of the inertia identity `d^2I/dt^2 = ...` for the given
/// potential:
///
/// * free:      `4E + 2 nu (mu-2)/(mu+1) P`
/// * linear:    `4E - 6 alpha <x> + 2 nu (mu-2)/(mu+1) P`
/// * quadratic: `4E - 8 alpha I + 2 nu (mu-2)/(mu+1) P`
///
/// with `P = ||psi||_{2mu+2}^{2mu+2}`.
pub fn virial_rhs(
    psi: &WaveFunction,
    params: &NlsParams,
    potential: &Potential,
) -> Result<f64, ObsError> {
    let e = energy(psi, params, potential)?;
    let p = lp_power_norm(psi, params.mu);
    let nonlinear = 2.0 * params.nu * (params.mu - 2.0) / (params.mu + 1.0) * p;
    let pot_term = match potential {
        Potential::Free => 0.0,
        Potential::Stark { alpha } => -6.0 * alpha * mean_position(psi)?,
        Potential::Quadratic { alpha } => -8.0 * alpha * moment_of_inertia(psi)?,
    };
    Ok(4.0 * e + pot_term + nonlinear)
}

/// Same right-hand side recomputed from an already captured record; lets the
/// residual diagnostics run on stored series.
pub fn virial_rhs_of_record(
    rec: &ObservableRecord,
    params: &NlsParams,
    potential: &Potential,
) -> f64 {
    let nonlinear = 2.0 * params.nu * (params.mu - 2.0) / (params.mu + 1.0) * rec.lp_power_norm;
    let pot_term = match potential {
        Potential::Free => 0.0,
        Potential::Stark { alpha } => -6.0 * alpha * rec.x_mean,
        Potential::Quadratic { alpha } => -8.0 * alpha * rec.inertia,
    };
    4.0 * rec.energy + pot_term + nonlinear
}

/// Every scalar the collapse criteria consume, extracted from the initial
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialMoments {
    pub norm: f64,
    pub energy: f64,
    /// `I(0)`
    pub i0: f64,
    /// `dI/dt(0)`
    pub idot0: f64,
    /// `<x>(0)`
    pub x0_mean: f64,
    /// `<p>(0)`
    pub p0_mean: f64,
    /// `V(0) = I(0) - <x>(0)^2`
    pub v0: f64,
    /// `dV/dt(0)`
    pub vdot0: f64,
    /// inertia forcing constant `C_I = 4E`
    pub c_i: f64,
    /// variance forcing constant `C_V = -2<p>^2 - 4 alpha <x>^2 + C_I`;
    /// for the free potential the formal `alpha = 0` value, unset for the
    /// linear potential where the variance equation is not of this form
    pub c_v: Option<f64>,
    /// `||psi||_{2mu+2}^{2mu+2}`
    pub lp_power_norm: f64,
    /// `||psi'||^2`
    pub grad_norm_sq: f64,
}

pub fn initial_moments(
    psi: &WaveFunction,
    params: &NlsParams,
    potential: &Potential,
) -> Result<InitialMoments, ObsError> {
    let e = energy(psi, params, potential)?;
    let x0_mean = mean_position(psi)?;
    let p0_mean = mean_momentum(psi)?;
    let i0 = moment_of_inertia(psi)?;
    let idot = idot0(psi)?;
    let c_i = 4.0 * e;
    let c_v = match potential {
        Potential::Free => Some(c_i - 2.0 * p0_mean * p0_mean),
        Potential::Stark { .. } => None,
        Potential::Quadratic { alpha } => {
            Some(-2.0 * p0_mean * p0_mean - 4.0 * alpha * x0_mean * x0_mean + c_i)
        }
    };
    Ok(InitialMoments {
        norm: norm(psi),
        energy: e,
        i0,
        idot0: idot,
        x0_mean,
        p0_mean,
        v0: i0 - x0_mean * x0_mean,
        vdot0: idot - 2.0 * x0_mean * p0_mean,
        c_i,
        c_v,
        lp_power_norm: lp_power_norm(psi, params.mu),
        grad_norm_sq: grad_norm_sq(psi),
    })
}

/// One time sample of the tracked diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub inertia: f64,
    pub variance: f64,
    pub lp_power_norm: f64,
    pub grad_norm: f64,
    /// Central-difference inertia residual; NaN until the series pass fills
    /// it, and NaN at the series endpoints where the stencil does not fit.
    pub virial_residual: f64,
}

impl ObservableRecord {
    pub const CSV_HEADER: &'static str =
        "t,norm,energy,x_mean,p_mean,I,V,lp_power_norm,grad_norm,virial_residual";

    /// Fixed 17-significant-digit formatting so identical runs serialize to
    /// identical bytes.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.t,
            self.norm,
            self.energy,
            self.x_mean,
            self.p_mean,
            self.inertia,
            self.variance,
            self.lp_power_norm,
            self.grad_norm,
            self.virial_residual
        )
    }
}

/// Captures every diagnostic at once, sharing one spectral derivative.
pub fn record(
    psi: &WaveFunction,
    params: &NlsParams,
    potential: &Potential,
    t: f64,
) -> Result<ObservableRecord, ObsError> {
    let dx = psi.grid.dx();
    let ns = nonzero_norm_sq(psi)?;
    let d = spectral::derivative(&psi.values, psi.grid.half_width);

    let mut x_raw = 0.0;
    let mut i_raw = 0.0;
    let mut p_raw = 0.0;
    let mut grad_sq = 0.0;
    let mut lp = 0.0;
    let mut pot = 0.0;
    let mu_exp = params.mu + 1.0;
    for (j, (v, dv)) in psi.values.iter().zip(&d).enumerate() {
        let x = psi.grid.node(j);
        let rho = v.norm_sqr();
        x_raw += x * rho;
        i_raw += x * x * rho;
        p_raw += (v.conj() * Complex64::new(0.0, -1.0) * dv).re;
        grad_sq += dv.norm_sqr();
        lp += rho.powf(mu_exp);
        pot += potential.value(x) * rho;
    }
    x_raw *= dx;
    i_raw *= dx;
    p_raw *= dx;
    grad_sq *= dx;
    lp *= dx;
    pot *= dx;

    let x_mean = x_raw / ns;
    let inertia = i_raw / ns;
    let energy = 0.5 * grad_sq + pot + params.nu / mu_exp * lp;
    Ok(ObservableRecord {
        t,
        norm: ns.sqrt(),
        energy,
        x_mean,
        p_mean: p_raw / ns,
        inertia,
        variance: inertia - x_mean * x_mean,
        lp_power_norm: lp,
        grad_norm: grad_sq.sqrt(),
        virial_residual: f64::NAN,
    })
}
