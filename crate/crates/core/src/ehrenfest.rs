//! Closed-form mean trajectories `(<x>(t), <p>(t))` for each potential.
//!
//! The position and momentum means of the nonlinear equation obey the
//! classical equations of motion regardless of the nonlinearity, so these
//! closed forms double as the strongest cross-check on the integrator.

use crate::model::Potential;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalState {
    pub x: f64,
    pub p: f64,
}

/// Mean trajectory at time `t` from initial mean position `x0` and mean
/// momentum `p0`:
///
/// * free:              `x = x0 + p0 t`, `p = p0`
/// * linear `alpha*x`:  `x = -alpha t^2/2 + p0 t + x0`, `p = -alpha t + p0`
/// * quadratic, a > 0:  rotation at `lambda = sqrt(2 alpha)`
/// * quadratic, a < 0:  hyperbolic flow at `lambda = sqrt(2|alpha|)`
pub fn classical_trajectory(potential: &Potential, x0: f64, p0: f64, t: f64) -> ClassicalState {
    match potential {
        Potential::Free => ClassicalState { x: x0 + p0 * t, p: p0 },
        Potential::Stark { alpha } => ClassicalState {
            x: -0.5 * alpha * t * t + p0 * t + x0,
            p: -alpha * t + p0,
        },
        Potential::Quadratic { alpha } => {
            let lambda = (2.0 * alpha.abs()).sqrt();
            if *alpha > 0.0 {
                let (s, c) = (lambda * t).sin_cos();
                ClassicalState {
                    x: x0 * c + p0 / lambda * s,
                    p: -lambda * x0 * s + p0 * c,
                }
            } else {
                let s = (lambda * t).sinh();
                let c = (lambda * t).cosh();
                ClassicalState {
                    x: x0 * c + p0 / lambda * s,
                    p: lambda * x0 * s + p0 * c,
                }
            }
        }
    }
}

/// Conserved classical energy `p^2/2 + V(x)` along the trajectory.
pub fn classical_energy(potential: &Potential, state: &ClassicalState) -> f64 {
    0.5 * state.p * state.p + potential.value(state.x)
}
