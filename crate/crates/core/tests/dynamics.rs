//! Cross-module consistency of the integrator against the closed-form mean
//! trajectories and the analytic bound curves.

use nlslab_core::bounds::{self, BoundCurve};
use nlslab_core::ehrenfest::classical_trajectory;
use nlslab_core::model::{GaussianIC, GridSpec, NlsParams, Potential, Scenario, SolverSettings};
use nlslab_core::observables::initial_moments;
use nlslab_core::solver::{simulate, virial_residual, Termination};

fn scenario(nu: f64, mu: f64, potential: Potential, ic: GaussianIC, t_end: f64) -> Scenario {
    Scenario {
        grid: GridSpec { half_width: 20.0, num_points: 1024 },
        params: NlsParams { nu, mu },
        potential,
        ic,
        solver: SolverSettings { dt: 1e-3, t_end, blowup_threshold: 1e3, record_stride: 100 },
    }
}

/// The mean trajectory of the simulated state follows the classical flow
/// for every potential, with the nonlinearity switched on.
#[test]
fn simulated_means_follow_classical_flow() {
    let ic = GaussianIC { x0: 0.5, p0: 0.3, sigma: 1.0, beta: 0.0 };
    let cases = [
        (Potential::Free, ic, 2.0),
        (Potential::Stark { alpha: 1.0 }, ic, 2.0),
        (Potential::Stark { alpha: -1.0 }, ic, 2.0),
        (Potential::Quadratic { alpha: 1.0 }, ic, 2.0),
        // hyperbolic spreading: shorter horizon keeps the state in the box
        (Potential::Quadratic { alpha: -1.0 }, ic, 1.0),
    ];
    for (potential, ic, t_end) in cases {
        let s = scenario(-1.0, 1.0, potential, ic, t_end);
        let result = simulate(&s).unwrap();
        assert_eq!(result.termination, Termination::HorizonReached);
        let mut worst = 0.0_f64;
        for rec in &result.records {
            let c = classical_trajectory(&potential, ic.x0, ic.p0, rec.t);
            worst = worst.max((rec.x_mean - c.x).abs()).max((rec.p_mean - c.p).abs());
        }
        assert!(worst <= 1e-4, "{potential:?}: worst mean deviation {worst:.2e}");
    }
}

/// Backward runs track the classical flow at negative times.
#[test]
fn backward_run_follows_classical_flow() {
    let ic = GaussianIC { x0: 0.5, p0: 0.3, sigma: 1.0, beta: 0.0 };
    let s = scenario(-1.0, 1.0, Potential::Stark { alpha: 1.0 }, ic, -2.0);
    let result = simulate(&s).unwrap();
    for rec in &result.records {
        assert!(rec.t <= 0.0);
        let c = classical_trajectory(&s.potential, ic.x0, ic.p0, rec.t);
        assert!((rec.x_mean - c.x).abs() <= 1e-4);
        assert!((rec.p_mean - c.p).abs() <= 1e-4);
    }
}

/// At the critical power the free-equation inertia parabola is exact, so the
/// measured inertia must sit on (and never above) the bound curve.
#[test]
fn free_inertia_dominated_by_parabola() {
    let mut s = scenario(
        -10.0,
        2.0,
        Potential::Free,
        GaussianIC::centered(1.0),
        1.0,
    );
    s.grid = GridSpec { half_width: 8.0, num_points: 2048 };
    s.solver.dt = 1e-4;
    s.solver.record_stride = 50;
    s.solver.blowup_threshold = 10.0 * 0.5_f64.sqrt();
    let psi0 = nlslab_core::model::build_initial_state(&s.grid, &s.ic).unwrap();
    let m = initial_moments(&psi0, &s.params, &s.potential).unwrap();
    let curve = bounds::parabola_m(&m);

    let result = simulate(&s).unwrap();
    assert!(
        matches!(result.termination, Termination::BlowupDetected { .. }),
        "focusing run should reach the detection level"
    );
    for rec in &result.records {
        let bound = curve.eval_unchecked(rec.t);
        assert!(
            rec.inertia <= bound + 1e-4,
            "t = {}: I = {} exceeds M = {}",
            rec.t,
            rec.inertia,
            bound
        );
    }
}

/// Variance stays below the hyperbolic bound curve for the inverted
/// potential; at mu = 2 the bound is the exact variance evolution.
#[test]
fn inverted_variance_dominated_by_zeta() {
    let mut s = scenario(
        -10.0,
        2.0,
        Potential::Quadratic { alpha: -1.0 },
        GaussianIC::centered(1.0),
        1.0,
    );
    s.grid = GridSpec { half_width: 16.0, num_points: 2048 };
    s.solver.dt = 1e-4;
    s.solver.record_stride = 50;
    s.solver.blowup_threshold = 10.0 * 0.5_f64.sqrt();
    let psi0 = nlslab_core::model::build_initial_state(&s.grid, &s.ic).unwrap();
    let m = initial_moments(&psi0, &s.params, &s.potential).unwrap();
    let curve = bounds::zeta_inverted(&m, s.potential.omega().unwrap());

    let result = simulate(&s).unwrap();
    for rec in &result.records {
        let bound = curve.eval_unchecked(rec.t);
        assert!(
            rec.variance <= bound + 1e-4,
            "t = {}: V = {} exceeds zeta = {}",
            rec.t,
            rec.variance,
            bound
        );
    }
}

/// Halving dt (and with it the record spacing) divides the inertia residual
/// by the expected second-order factor.
#[test]
fn virial_residual_refines_at_second_order() {
    let base = scenario(
        -1.0,
        2.0,
        Potential::Quadratic { alpha: 1.0 },
        GaussianIC::centered(1.0),
        1.0,
    );
    let max_residual = |dt: f64| {
        let mut s = base.clone();
        s.solver.dt = dt;
        s.solver.record_stride = 20;
        let result = simulate(&s).unwrap();
        let res = virial_residual(&result.records, &s.params, &s.potential).unwrap();
        res.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    };
    let coarse = max_residual(2e-3);
    let fine = max_residual(1e-3);
    let order = (coarse / fine).log2();
    assert!(order >= 1.9, "measured order {order:.2} (coarse {coarse:.2e}, fine {fine:.2e})");
}

/// Gradient growth forced by the interpolation inequality: along a
/// collapsing trajectory `||psi'|| >= ||psi||^2 / (2 sqrt(V))` at every
/// record.
#[test]
fn collapse_license_holds_along_trajectory() {
    let mut s = scenario(
        -10.0,
        2.0,
        Potential::Free,
        GaussianIC::centered(1.0),
        1.0,
    );
    s.grid = GridSpec { half_width: 8.0, num_points: 2048 };
    s.solver.dt = 1e-4;
    s.solver.record_stride = 50;
    s.solver.blowup_threshold = 20.0 * 0.5_f64.sqrt();
    let result = simulate(&s).unwrap();
    let mut saw_growth = false;
    for rec in &result.records {
        let license = rec.norm * rec.norm / (2.0 * rec.variance.sqrt());
        assert!(
            rec.grad_norm >= license * (1.0 - 1e-9),
            "t = {}: grad {} below license {}",
            rec.t,
            rec.grad_norm,
            license
        );
        if rec.grad_norm > 10.0 * result.records[0].grad_norm {
            saw_growth = true;
        }
    }
    assert!(saw_growth, "variance shrink must force gradient growth");
}

/// The analytic curves can be rebuilt from stored moments and serialized
/// into the run manifest shape.
#[test]
fn bound_curves_serialize_into_manifest_objects() {
    let grid = GridSpec { half_width: 20.0, num_points: 1024 };
    let psi0 = nlslab_core::model::build_initial_state(&grid, &GaussianIC::centered(1.0)).unwrap();
    let params = NlsParams { nu: -10.0, mu: 2.0 };
    let m = initial_moments(&psi0, &params, &Potential::Free).unwrap();
    let curves: Vec<BoundCurve> = vec![bounds::parabola_m(&m), bounds::parabola_n(&m)];
    let json = serde_json::to_string(&curves).unwrap();
    assert!(json.contains("\"kind\""));
}
