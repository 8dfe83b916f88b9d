//! Pseudo-spectral 2D incompressible Euler in projected form
//! `du/dt = -P((u . grad) u)`, advanced with classical RK4.

use serde::{Deserialize, Serialize};

use crate::construction::{advect, leray_p, Dealias};
use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm, BesovParams, LpFamily};
use crate::spectral::{curl, divergence, gradient, gradient_l2, Grid2D, VectorField2};

/// Fixed-step solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub dealias: Dealias,
    /// Record diagnostics every this many steps (snapshots are always recorded).
    pub diagnostics_every: usize,
    /// Extra times at which to keep the state; `t_final` is always kept.
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            dealias: Dealias::two_thirds(),
            diagnostics_every: 1,
            snapshot_times: Vec::new(),
        }
    }

    pub fn with_snapshots(mut self, times: impl IntoIterator<Item = f64>) -> Self {
        self.snapshot_times = times.into_iter().collect();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("T", format!("final time must be non-negative, got {}", self.t_final)));
        }
        if let Some(bad) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_final)) {
            return Err(Error::config("snapshot_times", format!("{bad} lies outside [0, T]")));
        }
        Ok(())
    }

    /// Sorted, deduplicated output times including 0 and `t_final`.
    fn output_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self.snapshot_times.clone();
        times.push(0.0);
        times.push(self.t_final);
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
        times
    }
}

/// Advective stability bound `0.5 dx / ||u||_inf`; infinite for `u = 0`.
pub fn cfl_bound(u: &VectorField2) -> f64 {
    let speed = u.max_abs();
    if speed == 0.0 {
        f64::INFINITY
    } else {
        0.5 * u.grid().dx() / speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub step: usize,
    pub time: f64,
    /// `||u||_{L^2}`.
    pub energy: f64,
    /// `||curl u||_{L^2}`.
    pub enstrophy: f64,
    /// `||div u||_{L^2} / ||grad u||_{L^2}`.
    pub divergence_ratio: f64,
}

impl Diagnostics {
    pub fn measure(u: &VectorField2, step: usize, time: f64) -> Self {
        let grad = gradient_l2(u);
        let div = divergence(u).parseval_l2();
        Self {
            step,
            time,
            energy: u.parseval_l2(),
            enstrophy: curl(u).parseval_l2(),
            divergence_ratio: if grad == 0.0 { 0.0 } else { div / grad },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub field: VectorField2,
}

/// Recorded states and per-step diagnostics of one solve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    /// State recorded at `time`, if any.
    pub fn at(&self, time: f64) -> Option<&VectorField2> {
        self.snapshots
            .iter()
            .find(|s| (s.time - time).abs() <= 1e-12 * time.abs().max(1e-3))
            .map(|s| &s.field)
    }

    pub fn last(&self) -> &VectorField2 {
        &self.snapshots.last().expect("trajectory always holds the initial state").field
    }

    /// Largest relative drift of (energy, enstrophy) against the first record.
    pub fn invariant_drift(&self) -> (f64, f64) {
        let first = self.diagnostics[0];
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b };
        self.diagnostics.iter().fold((0.0f64, 0.0f64), |(e, z), d| {
            (e.max(rel(d.energy, first.energy)), z.max(rel(d.enstrophy, first.enstrophy)))
        })
    }

    pub fn max_divergence_ratio(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.divergence_ratio).fold(0.0, f64::max)
    }
}

/// `-P((u . grad) u)`, in the representation of `u`.
pub fn rhs(u: &VectorField2, dealias: Dealias) -> VectorField2 {
    leray_p(&advect(u, u, dealias)).scale(-1.0).into_representation(u.representation())
}

fn rk4(u: &VectorField2, h: f64, dealias: Dealias) -> VectorField2 {
    let u = u.clone().into_spectral();
    let k1 = rhs(&u, dealias);
    let k2 = rhs(&u.lin_comb(1.0, &k1, 0.5 * h), dealias);
    let mut acc = k1.lin_comb(1.0, &k2, 2.0);
    drop(k1);
    let k3 = rhs(&u.lin_comb(1.0, &k2, 0.5 * h), dealias);
    drop(k2);
    acc = acc.lin_comb(1.0, &k3, 2.0);
    let k4 = rhs(&u.lin_comb(1.0, &k3, h), dealias);
    drop(k3);
    acc = acc.lin_comb(1.0, &k4, 1.0);
    leray_p(&u.lin_comb(1.0, &acc, h / 6.0))
}

/// One RK4 step of size `dt` (any sign), re-projected onto divergence-free fields.
/// Output in the representation of `u`.
pub fn step(u: &VectorField2, dt: f64, dealias: Dealias) -> Result<VectorField2> {
    let next = rk4(u, dt, dealias);
    if !next.is_finite() {
        return Err(Error::Diverged { step: 1, time: dt });
    }
    Ok(next.into_representation(u.representation()))
}

/// Integrates from `u0` to `cfg.t_final`, landing exactly on every output time.
pub fn solve(u0: &VectorField2, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let bound = cfl_bound(u0);
    if cfg.dt > bound {
        return Err(Error::Cfl { dt: cfg.dt, bound });
    }
    let every = cfg.diagnostics_every.max(1);
    let mut u = u0.clone().into_spectral();
    let mut diagnostics = vec![Diagnostics::measure(&u, 0, 0.0)];
    let mut snapshots = vec![Snapshot {
        time: 0.0,
        field: u.clone(),
    }];
    let mut steps = 0usize;
    let mut time = 0.0;
    for target in cfg.output_times().into_iter().skip(1) {
        let span = target - time;
        let count = (span / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / count as f64;
        for i in 0..count {
            u = rk4(&u, h, cfg.dealias);
            steps += 1;
            time = if i + 1 == count { target } else { time + h };
            if !u.is_finite() {
                return Err(Error::Diverged { step: steps, time });
            }
            if steps.is_multiple_of(every) || i + 1 == count {
                diagnostics.push(Diagnostics::measure(&u, steps, time));
            }
        }
        snapshots.push(Snapshot {
            time: target,
            field: u.clone(),
        });
    }
    Ok(Trajectory { snapshots, diagnostics })
}

fn at_time(u0: &VectorField2, t: f64, cfg: &SolverConfig) -> Result<VectorField2> {
    if t == 0.0 {
        return Ok(u0.clone().into_spectral());
    }
    let cfg = SolverConfig {
        t_final: t,
        snapshot_times: Vec::new(),
        ..cfg.clone()
    };
    Ok(solve(u0, &cfg)?.last().clone())
}

/// `w(t, u0) = S_t(u0) - u0 - t rhs(u0)` from an already computed state `u_t`.
pub fn remainder_from(u0: &VectorField2, u_t: &VectorField2, t: f64, rhs0: &VectorField2) -> VectorField2 {
    u_t.sub(u0).lin_comb(1.0, rhs0, -t)
}

/// The second-order Taylor remainder of the flow at time `t`. Spectral output.
pub fn remainder(u0: &VectorField2, t: f64, cfg: &SolverConfig) -> Result<VectorField2> {
    let u0 = u0.clone().into_spectral();
    let u_t = at_time(&u0, t, cfg)?;
    Ok(remainder_from(&u0, &u_t, t, &rhs(&u0, cfg.dealias)))
}

/// `||S_t(u0) - u0||_{B^{sigma-1}_{p,inf}}`.
pub fn linear_departure(
    u0: &VectorField2,
    t: f64,
    cfg: &SolverConfig,
    sigma: f64,
    p: f64,
    fam: &LpFamily,
) -> Result<f64> {
    let u_t = at_time(u0, t, cfg)?;
    besov_norm(&u_t.sub(u0), &BesovParams::inhomogeneous(sigma - 1.0, p), fam)
}

/// The steady cellular flow `(sin x1 cos x2, -cos x1 sin x2)`, scaled to the period.
pub fn taylor_green(grid: Grid2D) -> VectorField2 {
    let w = 2.0 * std::f64::consts::PI / grid.period();
    VectorField2::from_fn(
        grid,
        move |x1, x2| (w * x1).sin() * (w * x2).cos(),
        move |x1, x2| -(w * x1).cos() * (w * x2).sin(),
    )
}

/// Vorticity-form tendency `-(u . grad) omega` with `omega = curl u`; used as an
/// independent check of the velocity-form right-hand side.
pub fn vorticity_rhs(u: &VectorField2, dealias: Dealias) -> crate::spectral::ScalarField {
    let omega = curl(&u.clone().into_spectral());
    let g = gradient(&omega);
    // (u . grad) omega is the first component of advecting (omega, 0) by u
    let as_vector = VectorField2::from_components(omega, g.u1().scale(0.0));
    advect(u, &as_vector, dealias).into_components().0.scale(-1.0)
}
