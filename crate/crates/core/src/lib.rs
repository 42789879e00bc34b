//! Numerical laboratory for finite-time collapse of the one-dimensional
//! nonlinear Schrödinger equation with free, linear (Stark) and quadratic
//! potentials.
//!
//! The crate has three layers:
//!
//! * analytic: closed-form mean trajectories ([`ehrenfest`]), upper-bound
//!   curves for the moment of inertia and the variance ([`bounds`]), and the
//!   collapse criteria built on them ([`criteria`]);
//! * numerical: a Strang-split spectral integrator ([`solver`]) together with
//!   the scalar functionals it records ([`observables`]);
//! * checks: the interpolation inequalities that license the collapse
//!   conclusion ([`inequalities`]).
//!
//! Everything is driven by a [`model::Scenario`]: grid, equation parameters,
//! potential, Gaussian initial data and integrator settings.

pub mod bounds;
pub mod criteria;
pub mod ehrenfest;
pub mod inequalities;
pub mod model;
pub mod observables;
pub mod solver;
pub mod spectral;

pub use model::{GaussianIC, GridSpec, ModelError, NlsParams, Potential, Scenario, WaveFunction};
pub use observables::{InitialMoments, ObservableRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
