//! Problem setup: grid, equation parameters, potential, Gaussian initial
//! data and the scenario record consumed by the solver and the criteria.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Relative amplitude allowed at the outer 5% of grid nodes before the
/// periodic box is considered too small for the state.
pub const DEFAULT_DECAY_LIMIT: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid width: sigma must be positive, got {0}")]
    InvalidWidth(f64),
    #[error(
        "domain too small: boundary amplitude is {ratio:.3e} of the peak (limit {limit:.1e})"
    )]
    DomainTooSmall { ratio: f64, limit: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Uniform periodic grid on `[-L, L)` with `n` nodes, `x_j = -L + j*dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "n")]
    pub num_points: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, num_points: usize) -> Result<Self, ModelError> {
        let grid = GridSpec { half_width, num_points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(ModelError::InvalidGrid(format!(
                "half-width L must be positive and finite, got {}",
                self.half_width
            )));
        }
        if self.num_points < 16 || !self.num_points.is_power_of_two() {
            return Err(ModelError::InvalidGrid(format!(
                "n must be a power of two >= 16, got {}",
                self.num_points
            )));
        }
        Ok(())
    }

    /// Node spacing `dx = 2L/n`; exact in binary arithmetic since `n` is a
    /// power of two.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.num_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.node(j)).collect()
    }
}

/// Nonlinearity strength and power of `nu |psi|^(2 mu) psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlsParams {
    pub nu: f64,
    pub mu: f64,
}

impl NlsParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !self.nu.is_finite() {
            return Err(ModelError::InvalidParams(format!("nu must be finite, got {}", self.nu)));
        }
        Ok(())
    }
}

/// External potential: none, linear `alpha*x`, or quadratic `alpha*x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    Free,
    Stark { alpha: f64 },
    Quadratic { alpha: f64 },
}

/// Strict parse shape; keeps unknown-key rejection working for the tagged
/// enum (serde does not support `deny_unknown_fields` on internally tagged
/// enums).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSpec {
    kind: String,
    alpha: Option<f64>,
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let spec = PotentialSpec::deserialize(deserializer)?;
        match (spec.kind.as_str(), spec.alpha) {
            ("free", None) => Ok(Potential::Free),
            ("free", Some(_)) => Err(serde::de::Error::custom(
                "potential kind `free` does not take `alpha`",
            )),
            ("stark", Some(alpha)) => Ok(Potential::Stark { alpha }),
            ("quadratic", Some(alpha)) => Ok(Potential::Quadratic { alpha }),
            ("stark", None) | ("quadratic", None) => Err(serde::de::Error::custom(
                "potential kinds `stark` and `quadratic` require `alpha`",
            )),
            (other, _) => Err(serde::de::Error::custom(format!(
                "unknown potential kind `{other}` (expected free|stark|quadratic)"
            ))),
        }
    }
}

impl Potential {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            Potential::Free => Ok(()),
            Potential::Stark { alpha } | Potential::Quadratic { alpha } => {
                if *alpha == 0.0 || !alpha.is_finite() {
                    Err(ModelError::InvalidParams(format!(
                        "potential coefficient alpha must be nonzero and finite, got {alpha}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `V(x)` at a point.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Stark { alpha } => alpha * x,
            Potential::Quadratic { alpha } => alpha * x * x,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Potential::Free => None,
            Potential::Stark { alpha } | Potential::Quadratic { alpha } => Some(*alpha),
        }
    }

    /// Mean-trajectory frequency `lambda = sqrt(2|alpha|)` of the quadratic
    /// potential.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Potential::Quadratic { alpha } => Some((2.0 * alpha.abs()).sqrt()),
            _ => None,
        }
    }

    /// Variance-equation frequency `Omega = 2*lambda = sqrt(8|alpha|)`.
    pub fn omega(&self) -> Option<f64> {
        self.lambda().map(|l| 2.0 * l)
    }
}

/// Gaussian wavepacket
/// `psi0(x) = (pi sigma^2)^(-1/4) exp(-(x-x0)^2/(2 sigma^2) + i p0 x + i beta (x-x0)^2)`.
///
/// The chirp `beta` makes the initial inertia/variance rates nonzero
/// (`dI/dt(0) = 4 beta I0` for centered states), the boost `p0` sets the mean
/// momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianIC {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl GaussianIC {
    pub fn centered(sigma: f64) -> Self {
        GaussianIC { x0: 0.0, p0: 0.0, sigma, beta: 0.0 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(ModelError::InvalidWidth(self.sigma));
        }
        for (name, v) in [("x0", self.x0), ("p0", self.p0), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(ModelError::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Complex samples of the state on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, ModelError> {
        grid.validate()?;
        if values.len() != grid.num_points {
            return Err(ModelError::InvalidParams(format!(
                "sample count {} does not match grid n = {}",
                values.len(),
                grid.num_points
            )));
        }
        Ok(WaveFunction { grid, values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest amplitude on the outer 5% of nodes divided by the overall
    /// peak amplitude; proxy for decay of the state inside the box.
    pub fn boundary_decay_ratio(&self) -> f64 {
        let n = self.grid.num_points;
        let side = (n / 40).max(1);
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self
            .values
            .iter()
            .take(side)
            .chain(self.values.iter().skip(n - side))
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max);
        edge / peak
    }

    pub fn boundary_decay_ok(&self, limit: f64) -> bool {
        self.boundary_decay_ratio() <= limit
    }
}

/// Samples the Gaussian initial state and rescales it so the discrete L2
/// norm is exactly one (the criteria are stated for unit-norm data).
pub fn build_initial_state(grid: &GridSpec, ic: &GaussianIC) -> Result<WaveFunction, ModelError> {
    grid.validate()?;
    ic.validate()?;
    let dx = grid.dx();
    let amp = (std::f64::consts::PI * ic.sigma * ic.sigma).powf(-0.25);
    let mut values = Vec::with_capacity(grid.num_points);
    for j in 0..grid.num_points {
        let x = grid.node(j);
        let d = x - ic.x0;
        let envelope = amp * (-d * d / (2.0 * ic.sigma * ic.sigma)).exp();
        let phase = ic.p0 * x + ic.beta * d * d;
        values.push(Complex64::from_polar(envelope, phase));
    }
    let norm_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    let scale = 1.0 / norm_sq.sqrt();
    for v in &mut values {
        *v *= scale;
    }
    let psi = WaveFunction { grid: *grid, values };
    let ratio = psi.boundary_decay_ratio();
    if ratio > DEFAULT_DECAY_LIMIT {
        return Err(ModelError::DomainTooSmall { ratio, limit: DEFAULT_DECAY_LIMIT });
    }
    Ok(psi)
}

/// Time integrator settings. The sign of `t_end` selects a forward or a
/// backward run; `blowup_threshold` is an absolute gradient-norm level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub dt: f64,
    pub t_end: f64,
    pub blowup_threshold: f64,
    pub record_stride: usize,
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ModelError::InvalidParams(format!("dt must be positive, got {}", self.dt)));
        }
        if self.t_end == 0.0 || !self.t_end.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "t_end must be nonzero and finite, got {}",
                self.t_end
            )));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "blowup_threshold must be positive, got {}",
                self.blowup_threshold
            )));
        }
        if self.record_stride == 0 {
            return Err(ModelError::InvalidParams("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub grid: GridSpec,
    pub params: NlsParams,
    pub potential: Potential,
    pub ic: GaussianIC,
    pub solver: SolverSettings,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.grid.validate()?;
        self.params.validate()?;
        self.potential.validate()?;
        self.ic.validate()?;
        self.solver.validate()?;
        Ok(())
    }

    /// Strict TOML parse: unknown keys anywhere are an error.
    pub fn from_toml_str(text: &str) -> Result<Self, ModelError> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Short provenance string carried by run results.
    pub fn fingerprint(&self) -> String {
        let pot = match self.potential {
            Potential::Free => "free".to_string(),
            Potential::Stark { alpha } => format!("stark(alpha={alpha})"),
            Potential::Quadratic { alpha } => format!("quadratic(alpha={alpha})"),
        };
        format!(
            "n={} L={} dt={} t_end={} {} nu={} mu={}",
            self.grid.num_points,
            self.grid.half_width,
            self.solver.dt,
            self.solver.t_end,
            pot,
            self.params.nu,
            self.params.mu
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec { half_width: 20.0, num_points: 1024 }
    }

    /// Trapezoid quadrature of a real function; the independent oracle for
    /// sampled-state checks (denser grid than the implementation path).
    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = 0.5 * (f(a) + f(b));
        for j in 1..n {
            acc += f(a + j as f64 * h);
        }
        acc * h
    }

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::new(20.0, 1024).is_ok());
        assert!(GridSpec::new(0.0, 1024).is_err());
        assert!(GridSpec::new(20.0, 1000).is_err());
        assert!(GridSpec::new(20.0, 8).is_err());
        let g = grid();
        // dx * n recovers 2L exactly: n is a power of two.
        assert_eq!(g.dx() * g.num_points as f64, 2.0 * g.half_width);
        assert_eq!(g.node(0), -20.0);
    }

    #[test]
    fn gaussian_norm_is_one() {
        let psi = build_initial_state(&grid(), &GaussianIC::centered(1.0)).unwrap();
        let dx = psi.grid.dx();
        let norm_sq: f64 = psi.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        assert!((norm_sq.sqrt() - 1.0).abs() < 1e-12);

        // Continuum oracle: the analytic profile integrates to one as well,
        // so the renormalization factor is within quadrature tolerance of 1.
        let oracle = trapezoid(
            |x| (std::f64::consts::PI).powf(-0.5) * (-x * x).exp(),
            -20.0,
            20.0,
            200_000,
        );
        assert!((oracle - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_profile_is_real_and_even_at_rest() {
        let psi = build_initial_state(&grid(), &GaussianIC::centered(1.0)).unwrap();
        let n = psi.grid.num_points;
        for j in 1..n {
            let v = psi.values[j];
            assert!(v.im.abs() < 1e-15);
            // even about x = 0: node j and node n - j mirror
            assert!((v.re - psi.values[n - j].re).abs() < 1e-12);
        }
        // peak value: closed-form density gives pi^(-1/4) at the center
        let peak = psi.values[n / 2].re;
        let expected = std::f64::consts::PI.powf(-0.25);
        assert!((expected - 0.7511255444649425).abs() < 1e-15);
        assert!((peak - expected).abs() < 1e-10, "peak {peak} vs {expected}");
    }

    #[test]
    fn zero_width_is_rejected() {
        let ic = GaussianIC { x0: 0.0, p0: 0.0, sigma: 0.0, beta: 0.0 };
        match build_initial_state(&grid(), &ic) {
            Err(ModelError::InvalidWidth(s)) => assert_eq!(s, 0.0),
            other => panic!("expected InvalidWidth, got {other:?}"),
        }
    }

    #[test]
    fn wide_state_in_small_box_is_rejected() {
        let g = GridSpec { half_width: 4.0, num_points: 64 };
        let ic = GaussianIC::centered(2.0);
        match build_initial_state(&g, &ic) {
            Err(ModelError::DomainTooSmall { ratio, .. }) => assert!(ratio > 1e-8),
            other => panic!("expected DomainTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn scenario_round_trip_and_strictness() {
        let text = r#"
[grid]
L = 20.0
n = 1024

[params]
nu = -10.0
mu = 2.0

[potential]
kind = "quadratic"
alpha = 1.0

[ic]
x0 = 0.0
p0 = 0.0
sigma = 1.0
beta = 0.0

[solver]
dt = 1e-3
t_end = 2.0
blowup_threshold = 700.0
record_stride = 10
"#;
        let s = Scenario::from_toml_str(text).unwrap();
        assert_eq!(s.grid.num_points, 1024);
        assert_eq!(s.potential, Potential::Quadratic { alpha: 1.0 });
        assert_eq!(s.potential.omega(), Some(8.0_f64.sqrt()));
        assert_eq!(s.potential.lambda(), Some(2.0_f64.sqrt()));

        // unknown keys are an error, in any section
        let bad = text.replace("beta = 0.0", "beta = 0.0\ngamma = 1.0");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(ModelError::Parse(_))));

        // wrong value type is a parse error
        let bad = text.replace("n = 1024", "n = \"abc\"");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(ModelError::Parse(_))));

        // free potential must not carry alpha
        let bad = text.replace("kind = \"quadratic\"", "kind = \"free\"");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(ModelError::Parse(_))));

        // alpha = 0 violates the potential invariant
        let bad = text.replace("alpha = 1.0", "alpha = 0.0");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(ModelError::InvalidParams(_))));
    }

    #[test]
    fn solver_settings_are_validated() {
        let mut s = Scenario::from_toml_str(
            r#"
[grid]
L = 20.0
n = 1024
[params]
nu = -1.0
mu = 1.0
[potential]
kind = "free"
[ic]
x0 = 0.0
p0 = 0.0
sigma = 1.0
beta = 0.0
[solver]
dt = 1e-3
t_end = 1.0
blowup_threshold = 700.0
record_stride = 10
"#,
        )
        .unwrap();
        s.solver.t_end = 0.0;
        assert!(s.validate().is_err());
        s.solver.t_end = -1.0;
        assert!(s.validate().is_ok());
        s.solver.dt = 0.0;
        assert!(s.validate().is_err());
    }
}
