//! Interpolation inequalities that turn a vanishing second moment into
//! gradient growth, licensing the collapse conclusion drawn by the
//! criteria.

use crate::model::WaveFunction;
use crate::observables::{grad_norm_sq, norm, ObsError};
use serde::Serialize;

/// Second moment of `|f|^2` about an arbitrary reference point `y`;
/// specializes to the moment of inertia at `y = 0` and to the variance at
/// `y = <x>` for unit-norm states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaFunctional {
    pub y: f64,
    pub value: f64,
}

pub fn gamma(f: &WaveFunction, y: f64) -> GammaFunctional {
    let dx = f.grid.dx();
    let value = f
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let d = f.grid.node(j) - y;
            d * d * v.norm_sqr()
        })
        .sum::<f64>()
        * dx;
    GammaFunctional { y, value }
}

/// Sup-norm bound `||f||_inf <= sqrt(2) ||f'||^(1/2) ||f||^(1/2)`.
/// Returns `(lhs, rhs)`; the contract is `lhs <= rhs` up to quadrature
/// error.
pub fn gn_sup_check(f: &WaveFunction) -> Result<(f64, f64), ObsError> {
    let n = norm(f);
    if n == 0.0 {
        return Err(ObsError::ZeroNorm);
    }
    let lhs = f.values.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let rhs = 2.0_f64.sqrt() * grad_norm_sq(f).sqrt().sqrt() * n.sqrt();
    Ok((lhs, rhs))
}

/// Proof-chain constant `C = 2^(q+1) (q+1)` of the interpolation bound:
/// `2(q+1)` from integration by parts times `2^q` from the sup-norm bound.
pub fn interpolation_constant(q: f64) -> f64 {
    2.0_f64.powf(q + 1.0) * (q + 1.0)
}

/// Interpolation bound
/// `||f||_{2q+2}^{2q+2} <= C sqrt(Gamma(y)) ||f||^q ||f'||^(q+1)` with
/// `C = 2^(q+1)(q+1)`. Returns `(lhs, rhs)`.
pub fn interpolation_check(f: &WaveFunction, y: f64, q: f64) -> Result<(f64, f64), ObsError> {
    let n = norm(f);
    if n == 0.0 {
        return Err(ObsError::ZeroNorm);
    }
    let dx = f.grid.dx();
    let lhs = f.values.iter().map(|v| v.norm_sqr().powf(q + 1.0)).sum::<f64>() * dx;
    let rhs = interpolation_constant(q)
        * gamma(f, y).value.sqrt()
        * n.powf(q)
        * grad_norm_sq(f).sqrt().powf(q + 1.0);
    Ok((lhs, rhs))
}
