//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line. Tolerances are pinned below. Tests share a lock because
//! the 4096-point cases need most of the available memory.
//!
//! Run with `cargo test --release -p besov-lab-acceptance --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::sync::{Mutex, MutexGuard, OnceLock};

use besov_core::construction::{make_f, make_u0, nonlinear_term, ConstructionParams, Dealias, CARRIER};
use besov_core::euler::{solve, taylor_green, SolverConfig};
use besov_core::littlewood_paley::{besov_norm, build_lp_family, chi, dyadic, phi, BesovParams};
use besov_core::spectral::{divergence, gradient_l2, make_grid, perp_gradient, Grid2D, ScalarField, VectorField2};
use besov_lab::experiments::{default_dt, inflation_time, verify_lemma, Datum};
use besov_lab::{ExperimentReport, InflationRow, LemmaRow, RemainderRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

// criterion 1
const PARTITION_TOL: f64 = 1e-12;
// criterion 2
const BLOCK_SELECTION_TOL: f64 = 1e-10;
// criterion 3
const DIVERGENCE_TOL: f64 = 1e-12;
// criterion 4
const PLATEAU_TOL: f64 = 0.05;
// criterion 5
const DIAGONAL_TOL: f64 = 1e-8;
// criterion 6
const LOWER_BOUND_FRACTION: f64 = 0.5;
const R_N_SPREAD: f64 = 2.0;
const H4_SPREAD: f64 = 0.10;
// criterion 7
const INVARIANT_TOL: f64 = 1e-6;
const STEADY_TOL: f64 = 1e-8;
const RK4_MIN_ORDER: f64 = 3.5;
// criterion 8
const REMAINDER_SLOPE: (f64, f64) = (1.8, 2.2);
const DEPARTURE_SLOPE: (f64, f64) = (0.9, 1.1);
// criterion 9
const INFLATION_FLOOR: f64 = 0.5;
const CONTRAST_DECAY: f64 = 3.0;
// criterion 10
const DFT_TOL: f64 = 1e-12;
const FD_ORDER: (f64, f64) = (1.8, 2.2);

const N_LIST: [u32; 3] = [3, 4, 5];
const EPS: f64 = 0.1;
const REMAINDER_TIMES: [f64; 4] = [1e-3, 2e-3, 4e-3, 8e-3];
const HORIZON: f64 = 1e-2;

fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn verdict(criterion: u32, title: &str, passed: bool, detail: String) -> bool {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("{tag} criterion {criterion} ({title}): {detail}");
    passed
}

fn default_params(n: usize, j_trunc: u32) -> ConstructionParams {
    ConstructionParams {
        sigma: 2.5,
        p: 2.0,
        k: 1,
        j_trunc,
        grid: make_grid(n, 24.0 * PI).unwrap(),
    }
}

fn lemma() -> &'static ExperimentReport<LemmaRow> {
    static REPORT: OnceLock<ExperimentReport<LemmaRow>> = OnceLock::new();
    REPORT.get_or_init(|| verify_lemma(&default_params(2048, 5), &N_LIST).unwrap())
}

struct Flow {
    remainder: ExperimentReport<RemainderRow>,
    inflation: ExperimentReport<InflationRow>,
    energy_drift: f64,
    enstrophy_drift: f64,
}

/// One default trajectory serving every time-dependent criterion.
fn flow() -> &'static Flow {
    static FLOW: OnceLock<Flow> = OnceLock::new();
    FLOW.get_or_init(|| {
        let datum = Datum::new(default_params(2048, 5)).unwrap();
        let cfg = SolverConfig::new(default_dt(&datum.u0), HORIZON);
        let mut times: Vec<f64> = REMAINDER_TIMES.to_vec();
        times.extend(N_LIST.iter().map(|&n| inflation_time(EPS, 1, n)));
        times.push(HORIZON);
        let traj = datum.solve(&times, &cfg).unwrap();
        let (energy_drift, enstrophy_drift) = traj.invariant_drift();
        Flow {
            remainder: datum.remainder_scaling_on(&traj, &REMAINDER_TIMES, &cfg).unwrap(),
            inflation: datum.inflation_on(&traj, EPS, &N_LIST, &cfg).unwrap(),
            energy_drift,
            enstrophy_drift,
        }
    })
}

#[test]
fn criterion_01_partition_of_unity() {
    let _guard = serial();
    let grid = make_grid(2048, 24.0 * PI).unwrap();
    let fam = build_lp_family(grid, -8).unwrap();
    let n = grid.n();
    let defect = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let r = grid.frequency(idx % n).hypot(grid.frequency(idx / n));
            let total = chi(r) + (0..=fam.j_max()).map(|j| phi(r / dyadic(j))).sum::<f64>();
            (total - 1.0).abs()
        })
        .reduce(|| 0.0, f64::max);
    let ok = verdict(1, "partition of unity", defect < PARTITION_TOL, format!("max defect {defect:.3e} < {PARTITION_TOL:e}"));
    assert!(ok);
}

#[test]
fn criterion_02_block_selection() {
    let _guard = serial();
    let grid = make_grid(4096, 24.0 * PI).unwrap();
    let fam = build_lp_family(grid, -8).unwrap();
    let mut worst = 0.0f64;
    for m in [4u32, 5, 6] {
        let f = make_f(&grid, m, 2.5).unwrap();
        let norm = f.parseval_l2();
        for j in -1..=fam.j_max() {
            let on = j == m as i32;
            let err = f.multiplier_l2_norm(|a, b| {
                let w = fam.block_profile(j, a.hypot(b));
                if on { w - 1.0 } else { w }
            });
            worst = worst.max(err / norm);
        }
    }
    let ok = verdict(
        2,
        "block selection, m = 4, 5, 6",
        worst < BLOCK_SELECTION_TOL,
        format!("worst relative leak {worst:.3e} < {BLOCK_SELECTION_TOL:e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_divergence_free_data() {
    let _guard = serial();
    let u0 = make_u0(&default_params(2048, 5)).unwrap();
    let ratio = divergence(&u0).parseval_l2() / gradient_l2(&u0);
    let ok = verdict(3, "divergence-free data", ratio < DIVERGENCE_TOL, format!("||div u0|| / ||grad u0|| = {ratio:.3e}"));
    assert!(ok);
}

#[test]
fn criterion_04_uniform_besov_bound() {
    let _guard = serial();
    let grid = make_grid(4096, 24.0 * PI).unwrap();
    let fam = build_lp_family(grid, -8).unwrap();
    let norm = |j_trunc| {
        let u0 = make_u0(&ConstructionParams { j_trunc, ..default_params(4096, 0) }).unwrap();
        besov_norm(&u0, &BesovParams::inhomogeneous(2.5, 2.0), &fam).unwrap()
    };
    let (b3, b6) = (norm(3), norm(6));
    let change = (b6 - b3).abs() / b3;
    let ok = verdict(
        4,
        "uniform Besov bound",
        change < PLATEAU_TOL,
        format!("||u0||: J=3 {b3:.6e}, J=6 {b6:.6e}, relative change {change:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_diagonal_cancellation() {
    let _guard = serial();
    let rows = &lemma().rows;
    let detail = rows.iter().map(|r| format!("n={} {:.2e}", r.n, r.diag_residual)).collect::<Vec<_>>().join(", ");
    let ok = verdict(
        5,
        "diagonal cancellation",
        rows.iter().all(|r| r.diag_residual < DIAGONAL_TOL),
        format!("{detail} (need < {DIAGONAL_TOL:e})"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_lower_bound() {
    let _guard = serial();
    let rows = &lemma().rows;
    let last = rows.iter().find(|r| r.n == 5).unwrap();
    let fold = |f: fn(f64, f64) -> f64, init, col: fn(&LemmaRow) -> f64| rows.iter().map(col).fold(init, f);
    let (r_max, r_min) = (fold(f64::max, 0.0, |r| r.r_n), fold(f64::min, f64::INFINITY, |r| r.r_n));
    let (h_max, h_min) = (fold(f64::max, 0.0, |r| r.h4_norm), fold(f64::min, f64::INFINITY, |r| r.h4_norm));
    let bound = LOWER_BOUND_FRACTION * CARRIER * CARRIER * last.h4_norm;
    let ok = last.r_n >= bound && r_max / r_min < R_N_SPREAD && (h_max - h_min) / h_min < H4_SPREAD;
    let ratios = rows.iter().map(|r| format!("{:.3}", r.bound_ratio)).collect::<Vec<_>>().join("/");
    let ok = verdict(
        6,
        "lower bound",
        ok,
        format!(
            "r_5 = {:.3e} >= {bound:.3e}; r_n spread {:.3}; ||h4|| spread {:.2e}; r_n / ((17/12)^2 ||h4||) = {ratios}",
            last.r_n,
            r_max / r_min,
            (h_max - h_min) / h_min
        ),
    );
    assert!(ok);
}

fn random_solenoidal(grid: Grid2D, kmax: i64, seed: u64) -> VectorField2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64, f64)> = (0..24)
        .map(|_| {
            let k1 = rng.gen_range(-kmax..=kmax) as f64;
            let k2 = rng.gen_range(-kmax..=kmax) as f64;
            (k1, k2, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let w = 2.0 * PI / grid.period();
    let psi = ScalarField::from_fn(grid, move |x, y| {
        modes.iter().map(|&(a, b, c, ph)| c * (w * (a * x + b * y) + ph).cos()).sum()
    });
    let v = perp_gradient(&psi);
    let scale = 1.0 / v.max_abs();
    v.scale(scale)
}

#[test]
fn criterion_07_solver_oracle() {
    let _guard = serial();
    let small = make_grid(64, 2.0 * PI).unwrap();
    // invariants on an order-one flow and on the default datum
    let u = random_solenoidal(small, 5, 7);
    let traj = solve(&u, &SolverConfig::new(1e-3, HORIZON)).unwrap();
    let (e_rand, z_rand) = traj.invariant_drift();
    let flow = flow();
    let invariants = [e_rand, z_rand, flow.energy_drift, flow.enstrophy_drift];
    let invariants_ok = invariants.iter().all(|d| *d < INVARIANT_TOL);

    let tg = taylor_green(small);
    let end = solve(&tg, &SolverConfig::new(1e-3, HORIZON)).unwrap().last().clone();
    let steady = end.sub(&tg.clone().into_spectral()).max_abs() / tg.max_abs();

    let coarse = make_grid(32, 2.0 * PI).unwrap();
    let u = random_solenoidal(coarse, 4, 9);
    let horizon = 0.4;
    let run = |dt| solve(&u, &SolverConfig::new(dt, horizon)).unwrap().last().clone();
    let reference = run(0.0025);
    let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&dt| run(dt).sub(&reference).parseval_l2()).collect();
    let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);

    let ok = verdict(
        7,
        "solver oracle",
        invariants_ok && steady < STEADY_TOL && order >= RK4_MIN_ORDER,
        format!(
            "drift (energy, enstrophy): random ({e_rand:.2e}, {z_rand:.2e}), datum ({:.2e}, {:.2e}); \
             Taylor-Green {steady:.2e}; RK4 order {order:.3}",
            flow.energy_drift, flow.enstrophy_drift
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_remainder_scaling() {
    let _guard = serial();
    let report = &flow().remainder;
    let w = report.summary.get("remainder_slope").copied().unwrap_or(f64::NAN);
    let d = report.summary.get("departure_slope").copied().unwrap_or(f64::NAN);
    let ok = (REMAINDER_SLOPE.0..=REMAINDER_SLOPE.1).contains(&w) && (DEPARTURE_SLOPE.0..=DEPARTURE_SLOPE.1).contains(&d);
    let ok = verdict(8, "remainder scaling", ok, format!("remainder slope {w:.4}, departure slope {d:.4}"));
    assert!(ok);
}

#[test]
fn criterion_09_inflation() {
    let _guard = serial();
    let report = &flow().inflation;
    let rows = &report.rows;
    let first = &rows[0];
    let min_d = rows.iter().map(|r| r.d_n).fold(f64::INFINITY, f64::min);
    let decay = first.contrast / rows.last().unwrap().contrast;
    let floor_ok = min_d >= INFLATION_FLOOR * first.d_n;
    let detail = rows
        .iter()
        .map(|r| {
            format!(
                "n={} D={:.3e} (block {:?}) contrast={:.3e} block_kn={:.3e}",
                r.n, r.d_n, r.dominant_block, r.contrast, r.block_departure
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    let ok = verdict(
        9,
        "inflation",
        floor_ok && decay >= CONTRAST_DECAY,
        format!(
            "min D / D_3 = {:.3} (need >= {INFLATION_FLOOR}); contrast decay {decay:.3} (need >= {CONTRAST_DECAY}); {detail}",
            min_d / first.d_n
        ),
    );
    assert!(ok);
}

/// Direct periodic convolution with the kernel of a multiplier, all sums explicit.
fn brute_force_multiplier(values: &[f64], n: usize, period: f64, symbol: impl Fn(f64, f64) -> (f64, f64)) -> Vec<f64> {
    let freq = |i: usize| {
        let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
        2.0 * PI * k / period
    };
    let theta = |a: usize, b: usize| 2.0 * PI * ((a * b) % n) as f64 / n as f64;
    // kernel K(j) = sum_k m(xi_k) e^{i k j}; the real part survives for real-valued output
    let kernel: Vec<f64> = (0..n * n)
        .map(|j| {
            let (j1, j2) = (j % n, j / n);
            let mut acc = 0.0;
            for k2 in 0..n {
                for k1 in 0..n {
                    let (re, im) = symbol(freq(k1), freq(k2));
                    let ph = theta(k1, j1) + theta(k2, j2);
                    acc += re * ph.cos() - im * ph.sin();
                }
            }
            acc
        })
        .collect();
    (0..n * n)
        .map(|i| {
            let (i1, i2) = (i % n, i / n);
            let mut acc = 0.0;
            for j2 in 0..n {
                for j1 in 0..n {
                    let d = ((i2 + n - j2) % n) * n + (i1 + n - j1) % n;
                    acc += kernel[d] * values[j2 * n + j1];
                }
            }
            acc / (n * n) as f64
        })
        .collect()
}

fn centered(values: &[f64], n: usize, dx: f64, axis: usize) -> Vec<f64> {
    (0..n * n)
        .map(|idx| {
            let (i1, i2) = (idx % n, idx / n);
            let (fwd, back) = if axis == 0 {
                (values[i2 * n + (i1 + 1) % n], values[i2 * n + (i1 + n - 1) % n])
            } else {
                (values[((i2 + 1) % n) * n + i1], values[((i2 + n - 1) % n) * n + i1])
            };
            (fwd - back) / (2.0 * dx)
        })
        .collect()
}

#[test]
fn criterion_10_oracle_equivalences() {
    let _guard = serial();
    // multipliers against explicit convolution on an 8 x 8 grid
    let grid = make_grid(8, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let values: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = ScalarField::from_physical(grid, values.clone()).unwrap();
    let smooth = |a: f64, b: f64| (-(a * a + b * b) / 5.0).exp() + 0.25 * (a * b).cos();
    let fast = f.apply_real_multiplier(smooth).into_physical();
    let slow = brute_force_multiplier(&values, 8, grid.period(), |a, b| (smooth(a, b), 0.0));
    let mut dft_err = fast.values().iter().zip(&slow).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    // an odd imaginary symbol (derivative along x1, Nyquist column dropped as for real output)
    let nyq = grid.nyquist();
    let deriv = |a: f64, _b: f64| if a.abs() >= nyq { 0.0 } else { a };
    let fast = f
        .apply_multiplier(|a, b| num_complex::Complex64::new(0.0, deriv(a, b)))
        .into_physical();
    let slow = brute_force_multiplier(&values, 8, grid.period(), |a, b| (0.0, deriv(a, b)));
    dft_err = dft_err.max(fast.values().iter().zip(&slow).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));

    // convective term against centered differences across two refinements
    let errs: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&n| {
            let g = make_grid(n, 2.0 * PI).unwrap();
            let u = random_solenoidal(g, 3, 11).into_physical();
            let spec = nonlinear_term(&u, Dealias::default()).into_physical();
            let (a, b) = (u.u1().values().into_owned(), u.u2().values().into_owned());
            let comp = |c: &[f64]| {
                let (d1, d2) = (centered(c, n, g.dx(), 0), centered(c, n, g.dx(), 1));
                ScalarField::from_physical(g, (0..n * n).map(|i| a[i] * d1[i] + b[i] * d2[i]).collect()).unwrap()
            };
            let fd = VectorField2::from_components(comp(&a), comp(&b));
            fd.sub(&spec).lp_norm(2.0).unwrap() / spec.lp_norm(2.0).unwrap()
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let fd_ok = orders.iter().all(|o| (FD_ORDER.0..=FD_ORDER.1).contains(o));
    let ok = verdict(
        10,
        "oracle equivalences",
        dft_err < DFT_TOL && fd_ok,
        format!("multiplier vs explicit convolution {dft_err:.2e}; finite-difference orders {orders:.3?}"),
    );
    assert!(ok);
}
