use nlslab_core::bounds;
use nlslab_core::model::*;
use nlslab_core::observables::initial_moments;
use nlslab_core::solver::*;

fn probe(pot: Potential, n: usize, l: f64, dt: f64, thresh_mult: f64) {
    let s = Scenario {
        grid: GridSpec { half_width: l, num_points: n },
        params: NlsParams { nu: -10.0, mu: 2.0 },
        potential: pot,
        ic: GaussianIC::centered(1.0),
        solver: SolverSettings { dt, t_end: 1.0, blowup_threshold: thresh_mult * 0.5_f64.sqrt(), record_stride: ((0.005/dt).round() as usize).max(1) },
    };
    let psi0 = build_initial_state(&s.grid, &s.ic).unwrap();
    let m = initial_moments(&psi0, &s.params, &s.potential).unwrap();
    let r = simulate(&s).unwrap();
    let mut worst = f64::NEG_INFINITY; let mut t_worst = 0.0;
    for rec in &r.records {
        let (val, bound) = match pot {
            Potential::Free => (rec.inertia, bounds::parabola_m(&m).eval_unchecked(rec.t)),
            Potential::Quadratic { alpha } if alpha > 0.0 => (rec.variance, bounds::zeta_harmonic(&m, pot.omega().unwrap()).eval_unchecked(rec.t)),
            _ => (rec.variance, bounds::zeta_inverted(&m, pot.omega().unwrap()).eval_unchecked(rec.t)),
        };
        let excess = val - bound;
        if excess > worst { worst = excess; t_worst = rec.t; }
    }
    let term = match r.termination { Termination::BlowupDetected { t_detect, .. } => format!("detect@{t_detect:.3}"), Termination::HorizonReached => "horizon".into(), _ => "fail".into() };
    println!("{pot:?} n={n} dt={dt:.1e} thr={thresh_mult}x: max_excess={worst:.2e} at t={t_worst:.3} [{term}]");
}

fn main() {
    for dt in [1e-4, 5e-5, 2.5e-5] {
        for thr in [5.0, 10.0, 20.0] {
            probe(Potential::Free, 2048, 8.0, dt, thr);
        }
    }
    for dt in [1e-4, 5e-5, 2.5e-5] {
        probe(Potential::Quadratic { alpha: 1.0 }, 2048, 8.0, dt, 10.0);
        probe(Potential::Quadratic { alpha: -1.0 }, 2048, 16.0, dt, 10.0);
    }
}
