//! Analytic upper-bound curves for the moment of inertia and the variance,
//! and the first-zero search that turns a bound into a collapse-time bound.

use crate::model::NlsParams;
use crate::observables::InitialMoments;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Default scan horizon for curves whose validity window is all of the
/// real line. A missing zero inside the horizon means "no zero found", not
/// "no collapse".
pub const DEFAULT_HORIZON: f64 = 1e3;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("t = {t} lies outside the validity window |t| <= {window}")]
    OutsideValidityWindow { t: f64, window: f64 },
    #[error("curve starts non-positive at t = 0 (value {value})")]
    DegenerateStart { value: f64 },
    #[error("bound hypothesis violated: nu (mu - 2) = {product} > 0")]
    HypothesisViolated { product: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDirection {
    Future,
    Past,
}

/// The bound curves:
///
/// * `ParabolaM`:  `M(t) = C_I t^2/2 + Idot0 t + I0`, bounds `I` (free);
/// * `ParabolaN`:  `N(t) = M(t) - (<p>0 t + <x>0)^2` expanded, bounds `V` (free);
/// * `StarkQuarticI`: quartic bound on `I` for the linear potential;
/// * `StarkQuadraticV`: quadratic bound on `V` for the linear potential;
/// * `ZetaHarmonic`: solution of `z'' + Omega^2 z = C_V`, bounds `V` only on
///   `|t| <= pi/Omega`;
/// * `ZetaInverted`: solution of `z'' - Omega^2 z = C_V`, bounds `V` on all
///   of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum BoundCurve {
    ParabolaM { c_i: f64, idot0: f64, i0: f64 },
    ParabolaN { coef2: f64, coef1: f64, coef0: f64 },
    StarkQuarticI { alpha: f64, p0: f64, energy: f64, x0: f64, idot0: f64, i0: f64 },
    StarkQuadraticV { coef2: f64, coef1: f64, v0: f64 },
    ZetaHarmonic { omega: f64, v0: f64, vdot0: f64, c_v: f64 },
    ZetaInverted { omega: f64, v0: f64, vdot0: f64, c_v: f64 },
}

impl BoundCurve {
    /// Half-width of the validity window, when finite.
    pub fn validity_window(&self) -> Option<f64> {
        match self {
            BoundCurve::ZetaHarmonic { omega, .. } => Some(PI / omega),
            _ => None,
        }
    }

    /// Curve value with the validity-window check.
    pub fn eval(&self, t: f64) -> Result<f64, BoundError> {
        if let Some(window) = self.validity_window() {
            if t.abs() > window * (1.0 + 1e-12) {
                return Err(BoundError::OutsideValidityWindow { t, window });
            }
        }
        Ok(self.eval_unchecked(t))
    }

    /// Curve value without the window check.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        match *self {
            BoundCurve::ParabolaM { c_i, idot0, i0 } => 0.5 * c_i * t * t + idot0 * t + i0,
            BoundCurve::ParabolaN { coef2, coef1, coef0 } => (coef2 * t + coef1) * t + coef0,
            BoundCurve::StarkQuarticI { alpha, p0, energy, x0, idot0, i0 } => {
                let c4 = 0.25 * alpha * alpha;
                let c3 = -alpha * p0;
                let c2 = 2.0 * energy - 3.0 * alpha * x0;
                (((c4 * t + c3) * t + c2) * t + idot0) * t + i0
            }
            BoundCurve::StarkQuadraticV { coef2, coef1, v0 } => (coef2 * t + coef1) * t + v0,
            BoundCurve::ZetaHarmonic { omega, v0, vdot0, c_v } => {
                let (s, c) = (omega * t).sin_cos();
                vdot0 / omega * s + v0 * c + c_v / (omega * omega) * (1.0 - c)
            }
            BoundCurve::ZetaInverted { omega, v0, vdot0, c_v } => {
                let s = (omega * t).sinh();
                let c = (omega * t).cosh();
                vdot0 / omega * s + v0 * c - c_v / (omega * omega) * (1.0 - c)
            }
        }
    }

    /// Analytic time derivative; drives the dip search in
    /// [`BoundCurve::first_zero`].
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            BoundCurve::ParabolaM { c_i, idot0, .. } => c_i * t + idot0,
            BoundCurve::ParabolaN { coef2, coef1, .. } => 2.0 * coef2 * t + coef1,
            BoundCurve::StarkQuarticI { alpha, p0, energy, x0, idot0, .. } => {
                let c4 = 0.25 * alpha * alpha;
                let c3 = -alpha * p0;
                let c2 = 2.0 * energy - 3.0 * alpha * x0;
                ((4.0 * c4 * t + 3.0 * c3) * t + 2.0 * c2) * t + idot0
            }
            BoundCurve::StarkQuadraticV { coef2, coef1, .. } => 2.0 * coef2 * t + coef1,
            BoundCurve::ZetaHarmonic { omega, v0, vdot0, c_v } => {
                let (s, c) = (omega * t).sin_cos();
                vdot0 * c - v0 * omega * s + c_v / omega * s
            }
            BoundCurve::ZetaInverted { omega, v0, vdot0, c_v } => {
                let s = (omega * t).sinh();
                let c = (omega * t).cosh();
                vdot0 * c + v0 * omega * s + c_v / omega * s
            }
        }
    }

    /// Minimum of the harmonic curve over its validity window; `None` for
    /// the other variants. The sinusoid's critical point always falls inside
    /// the closed window of length one full period, so the closed form
    /// `c - sqrt(a^2 + b^2)` applies; endpoint values are still compared for
    /// robustness.
    pub fn harmonic_min(&self) -> Option<f64> {
        match *self {
            BoundCurve::ZetaHarmonic { omega, v0, vdot0, c_v } => {
                let a = vdot0 / omega;
                let b = v0 - c_v / (omega * omega);
                let c = c_v / (omega * omega);
                let r = (a * a + b * b).sqrt();
                let window = PI / omega;
                let endpoint = self.eval_unchecked(window).min(self.eval_unchecked(-window));
                if r == 0.0 {
                    return Some(c.min(endpoint));
                }
                // zeta_H = r sin(Omega t + phi) + c with cos(phi) = a/r, sin(phi) = b/r
                let phi = b.atan2(a);
                let mut t_min = (-0.5 * PI - phi) / omega;
                if t_min < -window {
                    t_min += 2.0 * PI / omega;
                }
                if t_min.abs() <= window {
                    Some((c - r).min(endpoint))
                } else {
                    Some(endpoint)
                }
            }
            _ => None,
        }
    }

    /// First time with the requested sign at which the curve reaches zero
    /// or below, or `None` if there is no crossing inside the validity
    /// window (harmonic) or the default horizon (all other variants).
    pub fn first_zero(&self, direction: TimeDirection) -> Result<Option<f64>, BoundError> {
        self.first_zero_with_horizon(direction, DEFAULT_HORIZON)
    }

    pub fn first_zero_with_horizon(
        &self,
        direction: TimeDirection,
        horizon: f64,
    ) -> Result<Option<f64>, BoundError> {
        let f0 = self.eval_unchecked(0.0);
        if f0 <= 0.0 {
            return Err(BoundError::DegenerateStart { value: f0 });
        }
        let (end, step) = match *self {
            BoundCurve::ZetaHarmonic { omega, .. } => {
                let window = PI / omega;
                (window, window / 1024.0)
            }
            BoundCurve::ZetaInverted { omega, .. } => {
                (horizon, (1.0 / (8.0 * omega)).min(horizon / 1024.0))
            }
            _ => (horizon, horizon / 8192.0),
        };
        let sign = match direction {
            TimeDirection::Future => 1.0,
            TimeDirection::Past => -1.0,
        };
        // Scan on |t| in (0, end]; g(s) = f(sign * s).
        let g = |s: f64| self.eval_unchecked(sign * s);
        let dg = |s: f64| sign * self.derivative(sign * s);

        let mut s_prev = 0.0;
        let mut dg_prev = dg(0.0);
        let mut k = 1_u64;
        loop {
            let s = (k as f64 * step).min(end);
            let gs = g(s);
            if gs <= 0.0 {
                return Ok(Some(sign * bisect_first_nonpositive(&g, s_prev, s)));
            }
            // Both scan endpoints are positive, but a descending/ascending
            // derivative pair brackets a local minimum whose dip may cross
            // zero entirely between the scan points.
            let dgs = dg(s);
            if dg_prev < 0.0 && dgs > 0.0 {
                let s_min = bisect_derivative_root(&dg, s_prev, s);
                if g(s_min) <= 0.0 {
                    return Ok(Some(sign * bisect_first_nonpositive(&g, s_prev, s_min)));
                }
            }
            if s >= end {
                return Ok(None);
            }
            s_prev = s;
            dg_prev = dgs;
            k += 1;
        }
    }
}

/// Bisection for the first point where `g` becomes non-positive, given
/// `g(lo) > 0 >= g(hi)`; refined to 1e-12 relative width.
fn bisect_first_nonpositive(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if (hi - lo) <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for a sign change of the derivative, `dg(lo) < 0 < dg(hi)`.
fn bisect_derivative_root(dg: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if (hi - lo) <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if dg(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inertia bound for the free potential.
pub fn parabola_m(m: &InitialMoments) -> BoundCurve {
    BoundCurve::ParabolaM { c_i: m.c_i, idot0: m.idot0, i0: m.i0 }
}

/// Variance bound for the free potential, `N(t) = M(t) - (<p>0 t + <x>0)^2`
/// in expanded form.
pub fn parabola_n(m: &InitialMoments) -> BoundCurve {
    BoundCurve::ParabolaN {
        coef2: 0.5 * m.c_i - m.p0_mean * m.p0_mean,
        coef1: m.idot0 - 2.0 * m.p0_mean * m.x0_mean,
        coef0: m.i0 - m.x0_mean * m.x0_mean,
    }
}

/// Variance bound for the harmonic potential, valid on `|t| <= pi/Omega`.
/// `c_v` must be present in the moments.
pub fn zeta_harmonic(m: &InitialMoments, omega: f64) -> BoundCurve {
    BoundCurve::ZetaHarmonic {
        omega,
        v0: m.v0,
        vdot0: m.vdot0,
        c_v: m.c_v.expect("variance forcing constant required for the harmonic bound"),
    }
}

/// Variance bound for the inverted potential, valid for all times.
pub fn zeta_inverted(m: &InitialMoments, omega: f64) -> BoundCurve {
    BoundCurve::ZetaInverted {
        omega,
        v0: m.v0,
        vdot0: m.vdot0,
        c_v: m.c_v.expect("variance forcing constant required for the inverted bound"),
    }
}

/// Inertia (quartic) and variance (quadratic) bounds for the linear
/// potential. Requires `nu (mu - 2) <= 0`, the hypothesis under which the
/// nonlinear term can be dropped from the inequality.
pub fn stark_bounds(
    m: &InitialMoments,
    params: &NlsParams,
    alpha: f64,
) -> Result<(BoundCurve, BoundCurve), BoundError> {
    let product = params.nu * (params.mu - 2.0);
    if product > 0.0 {
        return Err(BoundError::HypothesisViolated { product });
    }
    let quartic = BoundCurve::StarkQuarticI {
        alpha,
        p0: m.p0_mean,
        energy: m.energy,
        x0: m.x0_mean,
        idot0: m.idot0,
        i0: m.i0,
    };
    let quadratic = BoundCurve::StarkQuadraticV {
        coef2: m.grad_norm_sq + 2.0 * params.nu / (params.mu + 1.0) * m.lp_power_norm
            - m.p0_mean * m.p0_mean,
        coef1: m.vdot0,
        v0: m.v0,
    };
    Ok((quartic, quadratic))
}
