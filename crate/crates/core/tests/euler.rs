mod common;

use std::f64::consts::PI;

use besov_core::construction::{make_u0, ConstructionParams, Dealias};
use besov_core::euler::{
    cfl_bound, remainder, rhs, solve, step, taylor_green, vorticity_rhs, Diagnostics, SolverConfig,
};
use besov_core::littlewood_paley::{besov_norm, build_lp_family, BesovParams};
use besov_core::spectral::{curl, divergence, make_grid, Grid2D, VectorField2};
use besov_core::Error;
use common::random_solenoidal;

fn small() -> Grid2D {
    make_grid(32, 2.0 * PI).unwrap()
}

fn evolve(u: &VectorField2, dt: f64, t: f64) -> VectorField2 {
    solve(u, &SolverConfig::new(dt, t)).unwrap().last().clone()
}

#[test]
fn tendency_is_solenoidal_and_matches_vorticity_form() {
    let u = random_solenoidal(small(), 5, 3);
    let d = Dealias::default();
    let r = rhs(&u, d);
    assert!(divergence(&r).parseval_l2() < 1e-13 * r.parseval_l2());
    let lhs = curl(&r);
    let oracle = vorticity_rhs(&u, d).into_representation(lhs.representation());
    assert!(lhs.sub(&oracle).parseval_l2() < 1e-12 * oracle.parseval_l2());
}

#[test]
fn local_error_is_fifth_order() {
    let u = random_solenoidal(small(), 4, 11);
    let d = Dealias::default();
    let local = |h: f64| {
        let one = step(&u, h, d).unwrap();
        let fine = evolve(&u, h / 16.0, h);
        one.sub(&fine).parseval_l2()
    };
    let ratio = local(0.04) / local(0.02);
    assert!((24.0..40.0).contains(&ratio), "one-step error ratio {ratio}");
}

#[test]
fn global_error_is_fourth_order() {
    let u = random_solenoidal(small(), 4, 12);
    let t = 0.4;
    let reference = evolve(&u, 0.0025, t);
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| evolve(&u, dt, t).sub(&reference).parseval_l2()).collect();
    for pair in errs.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order >= 3.5, "errors {errs:?}");
    }
}

#[test]
fn invariants_are_conserved() {
    let u = random_solenoidal(small(), 4, 21);
    let traj = solve(&u, &SolverConfig::new(0.005, 0.2)).unwrap();
    let (energy, enstrophy) = traj.invariant_drift();
    // RK4 conserves the quadratic invariants up to its truncation error
    assert!(energy < 1e-6 && enstrophy < 1e-6, "drift {energy:e} {enstrophy:e}");
    assert!(traj.max_divergence_ratio() < 1e-12);
    assert!(traj.diagnostics.iter().all(|d| d.time <= 0.2 + 1e-15));
}

#[test]
fn taylor_green_is_steady() {
    let g = small();
    let tg = taylor_green(g);
    assert!(rhs(&tg, Dealias::default()).max_abs() < 1e-13);
    let end = evolve(&tg, 1e-3, 1e-2);
    assert!(end.sub(&tg.clone().into_spectral()).max_abs() < 1e-8);
}

#[test]
fn flow_is_time_reversible() {
    let u = random_solenoidal(small(), 4, 5).into_spectral();
    let d = Dealias::default();
    let mut v = u.clone();
    for _ in 0..10 {
        v = step(&v, 0.01, d).unwrap();
    }
    for _ in 0..10 {
        v = step(&v, -0.01, d).unwrap();
    }
    // backward RK4 inverts forward RK4 only up to the local truncation error
    assert!(v.sub(&u).parseval_l2() < 1e-7 * u.parseval_l2());
}

#[test]
fn snapshots_land_on_requested_times() {
    let u = random_solenoidal(small(), 3, 1);
    let cfg = SolverConfig::new(0.01, 0.05).with_snapshots([0.013, 0.02]);
    let traj = solve(&u, &cfg).unwrap();
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
    assert_eq!(times, vec![0.0, 0.013, 0.02, 0.05]);
    assert!(traj.at(0.013).is_some() && traj.at(0.014).is_none());
}

#[test]
fn oversized_step_is_rejected() {
    let u = random_solenoidal(small(), 3, 1);
    let bound = cfl_bound(&u);
    match solve(&u, &SolverConfig::new(2.0 * bound, 1.0)) {
        Err(Error::Cfl { dt, .. }) => assert_eq!(dt, 2.0 * bound),
        other => panic!("expected CFL error, got {other:?}"),
    }
    assert!(cfl_bound(&VectorField2::zeros(small())).is_infinite());
}

#[test]
fn remainder_is_quadratic_in_time_and_matches_second_derivative() {
    let g = small();
    let fam = build_lp_family(g, -3).unwrap();
    let u = random_solenoidal(g, 4, 8).into_spectral();
    let cfg = SolverConfig::new(1e-3, 1.0);
    let d = cfg.dealias;
    let norm = |v: &VectorField2| besov_norm(v, &BesovParams::homogeneous(0.5, 2.0, -3), &fam).unwrap();

    let ts = [0.004, 0.008, 0.016];
    let ws: Vec<f64> = ts.iter().map(|&t| norm(&remainder(&u, t, &cfg).unwrap())).collect();
    for pair in ws.windows(2) {
        let slope = (pair[1] / pair[0]).log2();
        assert!((1.8..2.2).contains(&slope), "remainder norms {ws:?}");
    }

    // w / t^2 -> (1/2) DF(u)[F(u)], estimated by a centered difference along F
    let f = rhs(&u, d);
    let delta = 1e-4;
    let plus = rhs(&u.lin_comb(1.0, &f, delta), d);
    let minus = rhs(&u.lin_comb(1.0, &f, -delta), d);
    let half_second = plus.sub(&minus).scale(0.25 / delta);
    let t = ts[0];
    let w = remainder(&u, t, &cfg).unwrap().scale(1.0 / (t * t));
    let rel = norm(&w.sub(&half_second)) / norm(&half_second);
    assert!(rel < 0.1, "relative mismatch {rel}");
}

#[test]
fn default_datum_diagnostics_are_tiny_and_finite() {
    let grid = make_grid(512, 24.0 * PI).unwrap();
    let u0 = make_u0(&ConstructionParams { sigma: 2.5, p: 2.0, k: 1, j_trunc: 3, grid }).unwrap();
    let diag = Diagnostics::measure(&u0, 0, 0.0);
    assert!(diag.energy.is_finite() && diag.energy > 0.0);
    assert!(diag.divergence_ratio < 1e-12);
    assert!(cfl_bound(&u0) > 1e-3);
}
