//! Collapse criteria: the classical inertia-based conditions for the free
//! equation, the sharper variance-based conditions for all three potentials,
//! and the three reference conditions from earlier work that the sharpness
//! report compares against.
//!
//! Every criterion consumes an [`InitialMoments`] record extracted from the
//! (unit-norm) initial state and returns a structured [`CriterionVerdict`].
//! Non-strict vs strict inequalities follow the source conditions exactly;
//! ties on a strict inequality do not fire.

use crate::bounds::{self, BoundCurve, TimeDirection};
use crate::model::{NlsParams, Potential};
use crate::observables::InitialMoments;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    /// Inertia-parabola condition for the free equation.
    ClassicalFree,
    /// Variance-parabola condition for the free equation.
    EnhancedFree,
    /// Variance-quadratic condition for the linear potential.
    StarkEnhanced,
    /// Windowed variance-sinusoid condition for the harmonic potential.
    HarmonicEnhanced,
    /// Variance-hyperbolic condition for the inverted potential.
    InvertedEnhanced,
    /// Internal-energy reference condition, linear potential.
    StarkReference,
    /// Internal-energy reference condition, harmonic potential.
    HarmonicReference,
    /// Internal-energy reference condition, inverted potential.
    InvertedReference,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::ClassicalFree,
        CriterionId::EnhancedFree,
        CriterionId::StarkEnhanced,
        CriterionId::HarmonicEnhanced,
        CriterionId::InvertedEnhanced,
        CriterionId::StarkReference,
        CriterionId::HarmonicReference,
        CriterionId::InvertedReference,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CriterionId::ClassicalFree => "classical_free",
            CriterionId::EnhancedFree => "enhanced_free",
            CriterionId::StarkEnhanced => "stark_enhanced",
            CriterionId::HarmonicEnhanced => "harmonic_enhanced",
            CriterionId::InvertedEnhanced => "inverted_enhanced",
            CriterionId::StarkReference => "stark_reference",
            CriterionId::HarmonicReference => "harmonic_reference",
            CriterionId::InvertedReference => "inverted_reference",
        }
    }
}

/// Temporal direction of the predicted collapse. `Both` asserts collapse on
/// each side of t = 0, `Either` asserts it on at least one side without
/// resolving which.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Future,
    Past,
    Both,
    Either,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum Applicability {
    Applicable,
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion_id: CriterionId,
    pub applicability: Applicability,
    pub fired: bool,
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_condition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_bound_future: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_bound_past: Option<f64>,
    /// Best guess for `Either` verdicts, from the sign of the bound curve's
    /// slope at zero; advisory only, the criterion itself does not resolve
    /// the side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heuristic_direction: Option<Direction>,
}

impl CriterionVerdict {
    fn not_applicable(id: CriterionId, reason: impl Into<String>) -> Self {
        CriterionVerdict {
            criterion_id: id,
            applicability: Applicability::NotApplicable(reason.into()),
            fired: false,
            direction: Direction::None,
            sub_condition: None,
            time_bound_future: None,
            time_bound_past: None,
            heuristic_direction: None,
        }
    }

    fn not_fired(id: CriterionId) -> Self {
        CriterionVerdict {
            criterion_id: id,
            applicability: Applicability::Applicable,
            fired: false,
            direction: Direction::None,
            sub_condition: None,
            time_bound_future: None,
            time_bound_past: None,
            heuristic_direction: None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.applicability == Applicability::Applicable
    }
}

/// Focusing gate shared by the theorem-backed criteria.
fn focusing_gate(id: CriterionId, params: &NlsParams) -> Option<CriterionVerdict> {
    if params.nu >= 0.0 {
        return Some(CriterionVerdict::not_applicable(
            id,
            format!("requires focusing nonlinearity nu < 0, got nu = {}", params.nu),
        ));
    }
    if params.mu < 2.0 {
        return Some(CriterionVerdict::not_applicable(
            id,
            format!("requires nonlinearity power mu >= 2, got mu = {}", params.mu),
        ));
    }
    None
}

fn zero_or_none(curve: &BoundCurve, dir: TimeDirection) -> Option<f64> {
    curve.first_zero(dir).ok().flatten()
}

/// Verdict skeleton shared by the two free-equation parabola criteria:
/// clause booleans for the future, their time-reflected counterparts for the
/// past, and time bounds from the matching curve.
fn parabola_verdict(
    id: CriterionId,
    curve: BoundCurve,
    future_clause: Option<&'static str>,
    past_clause: Option<&'static str>,
) -> CriterionVerdict {
    let fired = future_clause.is_some() || past_clause.is_some();
    if !fired {
        return CriterionVerdict::not_fired(id);
    }
    let direction = match (future_clause, past_clause) {
        (Some(_), Some(_)) => Direction::Both,
        (Some(_), None) => Direction::Future,
        (None, Some(_)) => Direction::Past,
        (None, None) => unreachable!(),
    };
    let sub_condition = match (future_clause, past_clause) {
        (Some(f), Some(p)) if f == p => Some(f.to_string()),
        (Some(f), Some(p)) => Some(format!("{f}; past: {p}")),
        (Some(f), None) => Some(f.to_string()),
        (None, Some(p)) => Some(format!("past: {p}")),
        (None, None) => unreachable!(),
    };
    CriterionVerdict {
        criterion_id: id,
        applicability: Applicability::Applicable,
        fired: true,
        direction,
        sub_condition,
        time_bound_future: future_clause.and_then(|_| zero_or_none(&curve, TimeDirection::Future)),
        time_bound_past: past_clause.and_then(|_| zero_or_none(&curve, TimeDirection::Past)),
        heuristic_direction: None,
    }
}

/// Inertia-based condition for the free equation: collapse follows if any of
///
/// * case-i:   `C_I < 0`
/// * case-ii:  `C_I = 0` and `dI/dt(0) < 0`
/// * case-iii: `C_I > 0` and `dI/dt(0) <= -sqrt(2 C_I I0)`
///
/// holds. Past-direction firing uses the time-reflected clauses
/// (`dI/dt(0) -> -dI/dt(0)`).
pub fn classical_free(m: &InitialMoments, params: &NlsParams) -> CriterionVerdict {
    let id = CriterionId::ClassicalFree;
    if let Some(v) = focusing_gate(id, params) {
        return v;
    }
    let (c_i, idot, i0) = (m.c_i, m.idot0, m.i0);
    let root = (2.0 * c_i.max(0.0) * i0.max(0.0)).sqrt();
    let future = if c_i < 0.0 {
        Some("case-i")
    } else if c_i == 0.0 && idot < 0.0 {
        Some("case-ii")
    } else if c_i > 0.0 && idot <= -root {
        Some("case-iii")
    } else {
        None
    };
    let past = if c_i < 0.0 {
        Some("case-i")
    } else if c_i == 0.0 && idot > 0.0 {
        Some("case-ii")
    } else if c_i > 0.0 && idot >= root {
        Some("case-iii")
    } else {
        None
    };
    parabola_verdict(id, bounds::parabola_m(m), future, past)
}

/// Variance-based sharpening of [`classical_free`]: with
/// `A = C_I/2 - <p>0^2`, `B = dI/dt(0) - 2 <p>0 <x>0`, `V0 = I0 - <x>0^2`,
/// collapse follows if any of
///
/// * case-i:   `A < 0` (collapse in both directions)
/// * case-ii:  `A = 0` and `B < 0`
/// * case-iii: `A > 0` and `B <= -2 sqrt(A V0)`
///
/// holds; past firing again by time reflection (`B -> -B`).
pub fn enhanced_free(m: &InitialMoments, params: &NlsParams) -> CriterionVerdict {
    let id = CriterionId::EnhancedFree;
    if let Some(v) = focusing_gate(id, params) {
        return v;
    }
    let a = 0.5 * m.c_i - m.p0_mean * m.p0_mean;
    let b = m.idot0 - 2.0 * m.p0_mean * m.x0_mean;
    let v0 = m.i0 - m.x0_mean * m.x0_mean;
    let root = 2.0 * (a.max(0.0) * v0.max(0.0)).sqrt();
    let future = if a < 0.0 {
        Some("case-i")
    } else if a == 0.0 && b < 0.0 {
        Some("case-ii")
    } else if a > 0.0 && b <= -root {
        Some("case-iii")
    } else {
        None
    };
    let past = if a < 0.0 {
        Some("case-i")
    } else if a == 0.0 && b > 0.0 {
        Some("case-ii")
    } else if a > 0.0 && b >= root {
        Some("case-iii")
    } else {
        None
    };
    parabola_verdict(id, bounds::parabola_n(m), future, past)
}

/// Variance-based condition for the linear potential. With
/// `K = ||psi0'||^2 + 2 nu/(mu+1) ||psi0||_{2mu+2}^{2mu+2}` and
/// `S = Re<x psi0, p psi0> - <p>0 <x>0`:
///
/// * case-i:   `K < <p>0^2` — collapse in both directions;
/// * case-ii:  `K = <p>0^2` and `S != 0` — collapse in one direction;
/// * case-iii: `K > <p>0^2` and `S^2 > (K - <p>0^2) V0` — collapse in one
///   direction.
pub fn stark_enhanced(m: &InitialMoments, params: &NlsParams, alpha: f64) -> CriterionVerdict {
    let id = CriterionId::StarkEnhanced;
    let product = params.nu * (params.mu - 2.0);
    if product > 0.0 {
        return CriterionVerdict::not_applicable(
            id,
            format!("variance bound requires nu (mu - 2) <= 0, got {product}"),
        );
    }
    if let Some(v) = focusing_gate(id, params) {
        return v;
    }
    let _ = alpha; // the conditions are independent of the tilt strength
    let k = m.grad_norm_sq + 2.0 * params.nu / (params.mu + 1.0) * m.lp_power_norm;
    let p_sq = m.p0_mean * m.p0_mean;
    let s = 0.5 * m.vdot0;
    let v0 = m.v0;
    let curve = BoundCurve::StarkQuadraticV { coef2: k - p_sq, coef1: m.vdot0, v0 };

    let (clause, direction) = if k < p_sq {
        (Some("case-i"), Direction::Both)
    } else if k == p_sq && s != 0.0 {
        (Some("case-ii"), Direction::Either)
    } else if k > p_sq && s * s > (k - p_sq) * v0 {
        (Some("case-iii"), Direction::Either)
    } else {
        (None, Direction::None)
    };
    match clause {
        None => CriterionVerdict::not_fired(id),
        Some(label) => {
            let heuristic = if direction == Direction::Either {
                Some(if s < 0.0 { Direction::Future } else { Direction::Past })
            } else {
                None
            };
            CriterionVerdict {
                criterion_id: id,
                applicability: Applicability::Applicable,
                fired: true,
                direction,
                sub_condition: Some(label.to_string()),
                time_bound_future: zero_or_none(&curve, TimeDirection::Future),
                time_bound_past: zero_or_none(&curve, TimeDirection::Past),
                heuristic_direction: heuristic,
            }
        }
    }
}

/// Windowed variance condition for the harmonic potential (`alpha > 0`,
/// `Omega = sqrt(8 alpha)`):
///
/// * endpoint clause: `2 C_V / Omega^2 - V0 <= 0` — the bound is non-positive
///   at the window edges, collapse in both directions;
/// * interior-min clause: `Vdot0^2 + V0^2 Omega^2 - 2 V0 C_V >= 0` — the
///   window minimum of the bound is non-positive, collapse on at least one
///   side.
pub fn harmonic_enhanced(m: &InitialMoments, params: &NlsParams, alpha: f64) -> CriterionVerdict {
    let id = CriterionId::HarmonicEnhanced;
    if alpha <= 0.0 {
        return CriterionVerdict::not_applicable(
            id,
            format!("requires a harmonic potential with alpha > 0, got {alpha}"),
        );
    }
    if let Some(v) = focusing_gate(id, params) {
        return v;
    }
    let Some(c_v) = m.c_v else {
        return CriterionVerdict::not_applicable(id, "variance forcing constant unavailable");
    };
    let omega = (8.0 * alpha).sqrt();
    let omega_sq = omega * omega;
    let curve = BoundCurve::ZetaHarmonic { omega, v0: m.v0, vdot0: m.vdot0, c_v };

    let endpoint = 2.0 * c_v / omega_sq - m.v0 <= 0.0;
    let interior = m.vdot0 * m.vdot0 + m.v0 * m.v0 * omega_sq - 2.0 * m.v0 * c_v >= 0.0;
    if endpoint {
        CriterionVerdict {
            criterion_id: id,
            applicability: Applicability::Applicable,
            fired: true,
            direction: Direction::Both,
            sub_condition: Some("endpoint".to_string()),
            time_bound_future: zero_or_none(&curve, TimeDirection::Future),
            time_bound_past: zero_or_none(&curve, TimeDirection::Past),
            heuristic_direction: None,
        }
    } else if interior {
        let heuristic = if m.vdot0 < 0.0 {
            Some(Direction::Future)
        } else if m.vdot0 > 0.0 {
            Some(Direction::Past)
        } else {
            None
        };
        CriterionVerdict {
            criterion_id: id,
            applicability: Applicability::Applicable,
            fired: true,
            direction: Direction::Either,
            sub_condition: Some("interior-min".to_string()),
            time_bound_future: zero_or_none(&curve, TimeDirection::Future),
            time_bound_past: zero_or_none(&curve, TimeDirection::Past),
            heuristic_direction: heuristic,
        }
    } else {
        CriterionVerdict::not_fired(id)
    }
}

/// Variance condition for the inverted potential (`alpha < 0`,
/// `Omega = sqrt(8|alpha|)`). With `a = Vdot0/Omega`,
/// `b = V0 + C_V/Omega^2`, `c = -C_V/Omega^2`:
///
/// * case-i:   `b < -|a|` — collapse in both directions;
/// * case-ii:  `|a| < b` and `sqrt(b^2 - a^2) + c <= 0` — future if `a < 0`,
///   past if `a > 0`;
/// * case-iii: `|a| > |b|` — past if `a > 0`, future if `a < 0`;
/// * case-iv:  `|a| = |b|` and `b c < 0` — past if `a > 0`, future if
///   `a < 0`.
pub fn inverted_enhanced(m: &InitialMoments, params: &NlsParams, alpha: f64) -> CriterionVerdict {
    let id = CriterionId::InvertedEnhanced;
    if alpha >= 0.0 {
        return CriterionVerdict::not_applicable(
            id,
            format!("requires an inverted potential with alpha < 0, got {alpha}"),
        );
    }
    if let Some(v) = focusing_gate(id, params) {
        return v;
    }
    let Some(c_v) = m.c_v else {
        return CriterionVerdict::not_applicable(id, "variance forcing constant unavailable");
    };
    let omega = (8.0 * alpha.abs()).sqrt();
    let omega_sq = omega * omega;
    let a = m.vdot0 / omega;
    let b = m.v0 + c_v / omega_sq;
    let c = -c_v / omega_sq;
    let curve = BoundCurve::ZetaInverted { omega, v0: m.v0, vdot0: m.vdot0, c_v };

    let one_sided = |a: f64| {
        if a < 0.0 {
            Direction::Future
        } else {
            Direction::Past
        }
    };
    let (clause, direction) = if b < -a.abs() {
        (Some("case-i"), Direction::Both)
    } else if a.abs() < b && (b * b - a * a).sqrt() + c <= 0.0 {
        (Some("case-ii"), one_sided(a))
    } else if a.abs() > b.abs() {
        (Some("case-iii"), one_sided(a))
    } else if a.abs() == b.abs() && b * c < 0.0 {
        (Some("case-iv"), one_sided(a))
    } else {
        (None, Direction::None)
    };
    match clause {
        None => CriterionVerdict::not_fired(id),
        Some(label) => {
            let future = matches!(direction, Direction::Both | Direction::Future);
            let past = matches!(direction, Direction::Both | Direction::Past);
            CriterionVerdict {
                criterion_id: id,
                applicability: Applicability::Applicable,
                fired: true,
                direction,
                sub_condition: Some(label.to_string()),
                time_bound_future: future
                    .then(|| zero_or_none(&curve, TimeDirection::Future))
                    .flatten(),
                time_bound_past: past.then(|| zero_or_none(&curve, TimeDirection::Past)).flatten(),
                heuristic_direction: None,
            }
        }
    }
}

/// Internal energy `1/2 ||psi0'||^2 + nu/(mu+1) ||psi0||_{2mu+2}^{2mu+2}`,
/// the free-equation part of the energy the reference conditions test.
fn internal_energy(m: &InitialMoments, params: &NlsParams) -> f64 {
    0.5 * m.grad_norm_sq + params.nu / (params.mu + 1.0) * m.lp_power_norm
}

/// The three literature comparison conditions, one verdict each:
///
/// * linear potential: internal energy `< 0`;
/// * harmonic potential: internal energy `<= 0`;
/// * inverted potential: internal energy
///   `< -|alpha| I0 - sqrt(2|alpha|) |Re<x psi0, p psi0>|`.
///
/// All fire with direction `Both`. A verdict whose potential does not match
/// the scenario's is reported not applicable.
pub fn reference_conditions(
    m: &InitialMoments,
    params: &NlsParams,
    potential: &Potential,
) -> Vec<CriterionVerdict> {
    let internal = internal_energy(m, params);
    let fired_verdict = |id: CriterionId, fired: bool| {
        if fired {
            CriterionVerdict {
                criterion_id: id,
                applicability: Applicability::Applicable,
                fired: true,
                direction: Direction::Both,
                sub_condition: Some("internal-energy".to_string()),
                time_bound_future: None,
                time_bound_past: None,
                heuristic_direction: None,
            }
        } else {
            CriterionVerdict::not_fired(id)
        }
    };

    let stark = match potential {
        Potential::Stark { .. } => fired_verdict(CriterionId::StarkReference, internal < 0.0),
        _ => CriterionVerdict::not_applicable(
            CriterionId::StarkReference,
            "potential is not linear",
        ),
    };
    let harmonic = match potential {
        Potential::Quadratic { alpha } if *alpha > 0.0 => {
            fired_verdict(CriterionId::HarmonicReference, internal <= 0.0)
        }
        _ => CriterionVerdict::not_applicable(
            CriterionId::HarmonicReference,
            "potential is not harmonic",
        ),
    };
    let inverted = match potential {
        Potential::Quadratic { alpha } if *alpha < 0.0 => {
            let xp = 0.5 * m.idot0; // Re<x psi0, p psi0>
            let rhs = -alpha.abs() * m.i0 - (2.0 * alpha.abs()).sqrt() * xp.abs();
            fired_verdict(CriterionId::InvertedReference, internal < rhs)
        }
        _ => CriterionVerdict::not_applicable(
            CriterionId::InvertedReference,
            "potential is not inverted",
        ),
    };
    vec![stark, harmonic, inverted]
}

/// All eight verdicts for one scenario, in [`CriterionId::ALL`] order.
/// Criteria whose potential family does not match are not applicable.
pub fn evaluate_all(
    m: &InitialMoments,
    params: &NlsParams,
    potential: &Potential,
) -> Vec<CriterionVerdict> {
    let free_na = |id: CriterionId| {
        CriterionVerdict::not_applicable(id, "potential is not free")
    };
    let (classical, enhanced) = match potential {
        Potential::Free => (classical_free(m, params), enhanced_free(m, params)),
        _ => (free_na(CriterionId::ClassicalFree), free_na(CriterionId::EnhancedFree)),
    };
    let stark = match potential {
        Potential::Stark { alpha } => stark_enhanced(m, params, *alpha),
        _ => CriterionVerdict::not_applicable(CriterionId::StarkEnhanced, "potential is not linear"),
    };
    let harmonic = match potential {
        Potential::Quadratic { alpha } if *alpha > 0.0 => harmonic_enhanced(m, params, *alpha),
        _ => CriterionVerdict::not_applicable(
            CriterionId::HarmonicEnhanced,
            "potential is not harmonic",
        ),
    };
    let inverted = match potential {
        Potential::Quadratic { alpha } if *alpha < 0.0 => inverted_enhanced(m, params, *alpha),
        _ => CriterionVerdict::not_applicable(
            CriterionId::InvertedEnhanced,
            "potential is not inverted",
        ),
    };
    let mut verdicts = vec![classical, enhanced, stark, harmonic, inverted];
    verdicts.extend(reference_conditions(m, params, potential));
    verdicts
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationCheck {
    pub name: String,
    pub premise_fired: bool,
    pub conclusion_fired: bool,
    /// `premise -> conclusion`
    pub holds: bool,
}

impl ImplicationCheck {
    fn new(name: &str, premise: bool, conclusion: bool) -> Self {
        ImplicationCheck {
            name: name.to_string(),
            premise_fired: premise,
            conclusion_fired: conclusion,
            holds: !premise || conclusion,
        }
    }
}

/// Side-by-side comparison of every applicable criterion: implication
/// checks (reference condition implies the matching enhanced clause,
/// classical implies enhanced), and the pair of future collapse-time bounds
/// from the inertia route and the variance route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub verdicts: Vec<CriterionVerdict>,
    pub implications: Vec<ImplicationCheck>,
    /// First future zero of the inertia bound curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_bound_inertia: Option<f64>,
    /// First future zero of the variance bound curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_bound_variance: Option<f64>,
    /// `|T_variance| <= |T_inertia|` when both exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_bound_tighter: Option<bool>,
    /// Harmonic only: both the endpoint and the interior-min clause hold, so
    /// the interior clause is redundant for this data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic_overlap: Option<bool>,
}

pub fn sharpness_compare(
    m: &InitialMoments,
    params: &NlsParams,
    potential: &Potential,
) -> SharpnessReport {
    let verdicts = evaluate_all(m, params, potential);
    let fired =
        |id: CriterionId| verdicts.iter().find(|v| v.criterion_id == id).is_some_and(|v| v.fired);

    let mut implications = Vec::new();
    let mut harmonic_overlap = None;
    match potential {
        Potential::Free => {
            implications.push(ImplicationCheck::new(
                "classical implies enhanced",
                fired(CriterionId::ClassicalFree),
                fired(CriterionId::EnhancedFree),
            ));
        }
        Potential::Stark { .. } => {
            // reference condition implies the two-sided clause of the
            // enhanced criterion
            let k = m.grad_norm_sq + 2.0 * params.nu / (params.mu + 1.0) * m.lp_power_norm;
            let case_i = k < m.p0_mean * m.p0_mean;
            implications.push(ImplicationCheck::new(
                "reference implies enhanced case-i",
                fired(CriterionId::StarkReference),
                case_i,
            ));
        }
        Potential::Quadratic { alpha } if *alpha > 0.0 => {
            let omega_sq = 8.0 * alpha;
            let endpoint = m.c_v.map(|c_v| 2.0 * c_v / omega_sq - m.v0 <= 0.0).unwrap_or(false);
            let interior = m
                .c_v
                .map(|c_v| m.vdot0 * m.vdot0 + m.v0 * m.v0 * omega_sq - 2.0 * m.v0 * c_v >= 0.0)
                .unwrap_or(false);
            implications.push(ImplicationCheck::new(
                "reference implies enhanced endpoint clause",
                fired(CriterionId::HarmonicReference),
                endpoint,
            ));
            harmonic_overlap = Some(endpoint && interior);
        }
        Potential::Quadratic { alpha } => {
            let omega_sq = 8.0 * alpha.abs();
            let case_i = m
                .c_v
                .map(|c_v| {
                    let a = m.vdot0 / omega_sq.sqrt();
                    let b = m.v0 + c_v / omega_sq;
                    b < -a.abs()
                })
                .unwrap_or(false);
            implications.push(ImplicationCheck::new(
                "reference implies enhanced case-i",
                fired(CriterionId::InvertedReference),
                case_i,
            ));
        }
    }

    let (time_bound_inertia, time_bound_variance) = time_bound_pair(m, params, potential);
    let variance_bound_tighter = match (time_bound_inertia, time_bound_variance) {
        (Some(ti), Some(tv)) => Some(tv.abs() <= ti.abs() + 1e-9),
        _ => None,
    };

    SharpnessReport {
        verdicts,
        implications,
        time_bound_inertia,
        time_bound_variance,
        variance_bound_tighter,
        harmonic_overlap,
    }
}

/// Future zeros of the inertia-route and variance-route bound curves for
/// the scenario's potential. The inertia equation for the quadratic
/// potential has the same constant-forcing form as the variance equation,
/// so it is bounded by the same sinusoid/hyperbolic solution built from
/// `(I0, dI/dt(0), C_I)`.
fn time_bound_pair(
    m: &InitialMoments,
    params: &NlsParams,
    potential: &Potential,
) -> (Option<f64>, Option<f64>) {
    let future = |curve: BoundCurve| zero_or_none(&curve, TimeDirection::Future);
    match potential {
        Potential::Free => (future(bounds::parabola_m(m)), future(bounds::parabola_n(m))),
        Potential::Stark { alpha } => match bounds::stark_bounds(m, params, *alpha) {
            Ok((quartic, quadratic)) => (future(quartic), future(quadratic)),
            Err(_) => (None, None),
        },
        Potential::Quadratic { alpha } => {
            if params.nu * (params.mu - 2.0) > 0.0 {
                return (None, None);
            }
            let omega = (8.0 * alpha.abs()).sqrt();
            let Some(c_v) = m.c_v else { return (None, None) };
            let (i_curve, v_curve) = if *alpha > 0.0 {
                (
                    BoundCurve::ZetaHarmonic { omega, v0: m.i0, vdot0: m.idot0, c_v: m.c_i },
                    BoundCurve::ZetaHarmonic { omega, v0: m.v0, vdot0: m.vdot0, c_v },
                )
            } else {
                (
                    BoundCurve::ZetaInverted { omega, v0: m.i0, vdot0: m.idot0, c_v: m.c_i },
                    BoundCurve::ZetaInverted { omega, v0: m.v0, vdot0: m.vdot0, c_v },
                )
            };
            (future(i_curve), future(v_curve))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_initial_state, GaussianIC, GridSpec};
    use crate::observables::initial_moments;

    fn moments(nu: f64, mu: f64, ic: GaussianIC, potential: &Potential) -> InitialMoments {
        let grid = GridSpec { half_width: 20.0, num_points: 1024 };
        let psi = build_initial_state(&grid, &ic).unwrap();
        initial_moments(&psi, &NlsParams { nu, mu }, potential).unwrap()
    }

    fn params(nu: f64, mu: f64) -> NlsParams {
        NlsParams { nu, mu }
    }

    #[test]
    fn classical_free_rest_gaussian() {
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let v = classical_free(&m, &p);
        assert!(v.fired);
        assert_eq!(v.sub_condition.as_deref(), Some("case-i"));
        assert_eq!(v.direction, Direction::Both);
        // Idot0 = 0, so T = sqrt(-2 I0 / C_I); energy oracle gives ~0.8305
        let expected = (-2.0 * m.i0 / m.c_i).sqrt();
        let t = v.time_bound_future.unwrap();
        assert!((t - expected).abs() < 1e-8);
        assert!((t - 0.8305).abs() < 2e-4, "quadratic-root oracle pin: {t}");
        assert!((v.time_bound_past.unwrap() + expected).abs() < 1e-8);
    }

    #[test]
    fn classical_misses_boosted_state_enhanced_catches_it() {
        let p = params(-10.0, 2.0);
        let ic = GaussianIC { x0: 0.0, p0: 3.0, sigma: 1.0, beta: 0.0 };
        let m = moments(-10.0, 2.0, ic, &Potential::Free);
        // boost identity: E = E_rest + p0^2/2 > 0, Idot0 = 0
        assert!(m.energy > 0.0);
        let classical = classical_free(&m, &p);
        assert!(!classical.fired, "boosted state escapes the inertia parabola");
        let enhanced = enhanced_free(&m, &p);
        assert!(enhanced.fired, "variance route is boost-invariant");
        assert_eq!(enhanced.sub_condition.as_deref(), Some("case-i"));
        assert_eq!(enhanced.direction, Direction::Both);
    }

    #[test]
    fn enhanced_free_coincides_with_classical_at_rest() {
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let c = classical_free(&m, &p);
        let e = enhanced_free(&m, &p);
        assert!(c.fired && e.fired);
        // centered rest data collapses N onto M: identical bounds
        let (tc, te) = (c.time_bound_future.unwrap(), e.time_bound_future.unwrap());
        assert!((tc - te).abs() < 1e-9);
    }

    #[test]
    fn boundary_ties_do_not_fire_strict_clauses() {
        // C_I = 2 p0^2 exactly with Idot0 = 2 p0 x0 exactly: case-ii is
        // strict, so nothing fires (p0 = x0 = 1 keeps the ties exact in
        // floating point)
        let m = InitialMoments {
            norm: 1.0,
            energy: 0.5,
            i0: 1.5,
            idot0: 2.0, // = 2 p0 x0
            x0_mean: 1.0,
            p0_mean: 1.0,
            v0: 0.5,
            vdot0: 0.0,
            c_i: 2.0, // = 2 p0^2
            c_v: None,
            lp_power_norm: 0.1,
            grad_norm_sq: 2.5,
        };
        let v = enhanced_free(&m, &params(-1.0, 2.0));
        assert!(!v.fired);
        assert_eq!(v.direction, Direction::None);
        assert!(v.time_bound_future.is_none() && v.time_bound_past.is_none());
    }

    #[test]
    fn defocusing_or_subcritical_is_not_applicable() {
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let v = classical_free(&m, &params(1.0, 2.0));
        assert!(!v.is_applicable());
        assert!(!v.fired);
        let v = enhanced_free(&m, &params(-1.0, 1.5));
        assert!(!v.is_applicable());
    }

    #[test]
    fn stark_enhanced_cases() {
        let pot = Potential::Stark { alpha: 1.0 };
        // rest Gaussian, nu = -10, mu = 2: leading coefficient ~ -0.7252 < 0
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &pot);
        let v = stark_enhanced(&m, &params(-10.0, 2.0), 1.0);
        assert!(v.fired);
        assert_eq!(v.sub_condition.as_deref(), Some("case-i"));
        assert_eq!(v.direction, Direction::Both);
        assert!(v.time_bound_future.unwrap() > 0.0);
        assert!(v.time_bound_past.unwrap() < 0.0);

        // linear case nu = 0: not applicable (the conclusion needs nu < 0)
        let m0 = moments(0.0, 2.0, GaussianIC::centered(1.0), &pot);
        let v0 = stark_enhanced(&m0, &params(0.0, 2.0), 1.0);
        assert!(!v0.is_applicable());

        // case-iii: chirped centered state with moderate focusing; here
        // S = beta and K = 2 beta^2 + 2 (internal energy), so S^2 - K V0 =
        // -(internal energy) > 0 whenever the internal energy is negative
        let ic = GaussianIC { x0: 0.0, p0: 0.0, sigma: 1.0, beta: 0.5 };
        let m3 = moments(-5.0, 2.0, ic, &pot);
        let k = m3.grad_norm_sq + 2.0 * (-5.0) / 3.0 * m3.lp_power_norm;
        assert!(k > 0.0, "case-iii setup needs K > p0^2 = 0");
        let s = 0.5 * m3.vdot0;
        assert!(s * s > k * m3.v0, "S^2 = {} vs K V0 = {}", s * s, k * m3.v0);
        let v3 = stark_enhanced(&m3, &params(-5.0, 2.0), 1.0);
        assert!(v3.fired);
        assert_eq!(v3.sub_condition.as_deref(), Some("case-iii"));
        assert_eq!(v3.direction, Direction::Either);
        assert_eq!(v3.heuristic_direction, Some(Direction::Past));
    }

    #[test]
    fn harmonic_enhanced_cases() {
        let pot = Potential::Quadratic { alpha: 1.0 };
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &pot);
        // centered rest data: C_V = C_I = 4E with the full energy
        // E = 1/4 + alpha I0 + nu/3 P ~ 0.1374, and the endpoint value
        // 2 C_V / Omega^2 - V0 ~ -0.3626 <= 0 fires the criterion
        assert!((m.c_v.unwrap() - 0.5496).abs() < 1e-4);
        assert!(2.0 * m.c_v.unwrap() / 8.0 - m.v0 < 0.0);
        let v = harmonic_enhanced(&m, &params(-10.0, 2.0), 1.0);
        assert!(v.fired);
        assert_eq!(v.sub_condition.as_deref(), Some("endpoint"));
        assert_eq!(v.direction, Direction::Both);
        let omega = (8.0_f64).sqrt();
        let tf = v.time_bound_future.unwrap();
        assert!(tf > 0.0 && tf <= std::f64::consts::PI / omega);

        // linear data: nu = 0 fails the focusing hypothesis
        let m0 = moments(0.0, 2.0, GaussianIC::centered(1.0), &pot);
        let v0 = harmonic_enhanced(&m0, &params(0.0, 2.0), 1.0);
        assert!(!v0.is_applicable());

        // algebraic boundary: Vdot0 = 0, C_V = Omega^2 V0 exactly fails both
        // clauses (interior expression equals -Omega^2 V0^2 < 0)
        let omega_sq = 8.0;
        let m_edge = InitialMoments {
            norm: 1.0,
            energy: 0.0,
            i0: 0.5,
            idot0: 0.0,
            x0_mean: 0.0,
            p0_mean: 0.0,
            v0: 0.5,
            vdot0: 0.0,
            c_i: 0.0,
            c_v: Some(omega_sq * 0.5),
            lp_power_norm: 0.1,
            grad_norm_sq: 0.5,
        };
        let ve = harmonic_enhanced(&m_edge, &params(-1.0, 2.0), 1.0);
        assert!(!ve.fired);
    }

    #[test]
    fn inverted_enhanced_cases() {
        let pot = Potential::Quadratic { alpha: -1.0 };

        // rest Gaussian nu = -10: a = 0 and b ~ 0.0687 > 0; the case-ii
        // value is b + c = V0 > 0, so nothing fires
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &pot);
        let omega_sq = 8.0;
        let b = m.v0 + m.c_v.unwrap() / omega_sq;
        assert!((b - 0.0687).abs() < 1e-4, "b = {b}");
        assert!(b > 0.0);
        let v = inverted_enhanced(&m, &params(-10.0, 2.0), -1.0);
        assert!(!v.fired, "inverted criterion is strictly harder at rest");

        // deeper focusing nu = -30: b < 0 = -|a|, case-i
        let m30 = moments(-30.0, 2.0, GaussianIC::centered(1.0), &pot);
        let b30 = m30.v0 + m30.c_v.unwrap() / omega_sq;
        assert!(b30 < 0.0);
        let v30 = inverted_enhanced(&m30, &params(-30.0, 2.0), -1.0);
        assert!(v30.fired);
        assert_eq!(v30.sub_condition.as_deref(), Some("case-i"));
        assert_eq!(v30.direction, Direction::Both);
        assert!(v30.time_bound_future.unwrap() > 0.0);
        assert!(v30.time_bound_past.unwrap() < 0.0);

        // synthetic case-i check: a = 1, b = -2 via direct clause arithmetic
        let omega = omega_sq.sqrt();
        let m_direct = InitialMoments {
            norm: 1.0,
            energy: 0.0,
            i0: 1.0,
            idot0: omega, // a = vdot0/omega = 1
            x0_mean: 0.0,
            p0_mean: 0.0,
            v0: 1.0,
            vdot0: omega,
            c_i: 0.0,
            c_v: Some(-3.0 * omega_sq), // b = 1 - 3 = -2
            lp_power_norm: 0.1,
            grad_norm_sq: 0.5,
        };
        let vd = inverted_enhanced(&m_direct, &params(-1.0, 2.0), -1.0);
        assert!(vd.fired);
        assert_eq!(vd.sub_condition.as_deref(), Some("case-i"));
        assert_eq!(vd.direction, Direction::Both);

        // case-iii: chirp makes |a| > |b|, sign of a picks the side
        let ic = GaussianIC { x0: 0.0, p0: 0.0, sigma: 1.0, beta: -0.5 };
        let m_chirp = moments(-10.0, 2.0, ic, &pot);
        let a = m_chirp.vdot0 / omega;
        let b_chirp = m_chirp.v0 + m_chirp.c_v.unwrap() / omega_sq;
        assert!(a.abs() > b_chirp.abs());
        assert!(a < 0.0);
        let vc = inverted_enhanced(&m_chirp, &params(-10.0, 2.0), -1.0);
        assert!(vc.fired);
        assert_eq!(vc.sub_condition.as_deref(), Some("case-iii"));
        assert_eq!(vc.direction, Direction::Future);
        assert!(vc.time_bound_future.is_some());
        assert!(vc.time_bound_past.is_none());
    }

    #[test]
    fn reference_conditions_fire_and_compare() {
        // harmonic: internal energy ~ -0.3626 <= 0 fires
        let pot = Potential::Quadratic { alpha: 1.0 };
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &pot);
        let refs = reference_conditions(&m, &params(-10.0, 2.0), &pot);
        let harmonic =
            refs.iter().find(|v| v.criterion_id == CriterionId::HarmonicReference).unwrap();
        assert!(harmonic.fired);
        assert_eq!(harmonic.direction, Direction::Both);
        // the other two families report not applicable
        assert!(!refs[0].is_applicable());
        assert!(!refs[2].is_applicable());

        // nu = 0: internal energy is positive, nothing fires
        let m0 = moments(0.0, 2.0, GaussianIC::centered(1.0), &pot);
        let refs0 = reference_conditions(&m0, &params(0.0, 2.0), &pot);
        assert!(refs0.iter().all(|v| !v.fired));

        // inverted: nu = -10 misses the threshold -0.5, nu = -30 clears it
        let ipot = Potential::Quadratic { alpha: -1.0 };
        let m10 = moments(-10.0, 2.0, GaussianIC::centered(1.0), &ipot);
        let r10 = reference_conditions(&m10, &params(-10.0, 2.0), &ipot);
        assert!(!r10[2].fired);
        let m30 = moments(-30.0, 2.0, GaussianIC::centered(1.0), &ipot);
        let r30 = reference_conditions(&m30, &params(-30.0, 2.0), &ipot);
        assert!(r30[2].fired);
    }

    #[test]
    fn sharpness_report_free_boost() {
        let p = params(-10.0, 2.0);
        let ic = GaussianIC { x0: 0.0, p0: 3.0, sigma: 1.0, beta: 0.0 };
        let m = moments(-10.0, 2.0, ic, &Potential::Free);
        let report = sharpness_compare(&m, &p, &Potential::Free);
        let imp = &report.implications[0];
        assert!(imp.holds);
        assert!(!imp.premise_fired && imp.conclusion_fired, "strict sharpness gain");
        // variance bound exists, inertia bound does not (C_I > 0, no root)
        assert!(report.time_bound_variance.is_some());
        assert!(report.time_bound_inertia.is_none());
    }

    #[test]
    fn sharpness_report_rest_gaussian_bounds_coincide() {
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let report = sharpness_compare(&m, &p, &Potential::Free);
        let (ti, tv) =
            (report.time_bound_inertia.unwrap(), report.time_bound_variance.unwrap());
        assert!((ti - tv).abs() < 1e-9, "N = M at rest");
        assert_eq!(report.variance_bound_tighter, Some(true));
    }

    #[test]
    fn sharpness_report_harmonic_overlap_flag() {
        let pot = Potential::Quadratic { alpha: 1.0 };
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &pot);
        let report = sharpness_compare(&m, &p, &pot);
        assert!(report.harmonic_overlap.is_some());
        // reference fired here, so the endpoint clause must hold
        assert!(report.implications[0].holds);
        // variance route at least as tight as the inertia route
        if let Some(flag) = report.variance_bound_tighter {
            assert!(flag);
        }
    }

    #[test]
    fn verdicts_are_deterministic() {
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let a = evaluate_all(&m, &p, &Potential::Free);
        let b = evaluate_all(&m, &p, &Potential::Free);
        assert_eq!(a, b);
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb, "byte-identical serialization");
    }

    #[test]
    fn verdict_json_shape() {
        let p = params(-10.0, 2.0);
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let v = classical_free(&m, &p);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["criterion_id"], "classical_free");
        assert_eq!(json["applicability"]["status"], "applicable");
        assert_eq!(json["fired"], true);
        assert_eq!(json["direction"], "both");
        assert!(json["time_bound_future"].is_number());
    }

    #[test]
    fn not_applicable_never_degrades_to_not_fired() {
        let m = moments(-10.0, 2.0, GaussianIC::centered(1.0), &Potential::Free);
        let v = classical_free(&m, &params(1.0, 2.0));
        match &v.applicability {
            Applicability::NotApplicable(reason) => {
                assert!(reason.contains("nu"), "reason names the failed hypothesis")
            }
            Applicability::Applicable => panic!("hypothesis failure must be distinguishable"),
        }
    }
}
