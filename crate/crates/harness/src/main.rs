use std::path::{Path, PathBuf};
use std::process::ExitCode;

use besov_core::construction::{make_u0, ConstructionParams};
use besov_core::euler::SolverConfig;
use besov_core::spectral::make_grid;
use besov_lab::checks::{check_inflation, check_lemma, check_remainder, Check};
use besov_lab::emit::{render, Format, PlotSpec};
use besov_lab::experiments::{attach_sensitivity, default_dt, inflation, remainder_scaling, verify_lemma};
use besov_lab::{ExperimentReport, HarnessError, Row, Thresholds};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "besov-lab", version, about = "Norm-inflation experiments for 2D Euler on lacunary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BESOV_LAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence, Besov plateau, block structure and lower bound of the convective term.
    VerifyLemma {
        #[command(flatten)]
        common: Common,
        /// Block indices n (packet kn).
        #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [3, 4, 5])]
        n: Vec<u32>,
    },
    /// Taylor remainder and departure norms along one trajectory.
    RemainderScaling {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        time: TimeArgs,
    },
    /// Critical-norm departure at t_n = eps 2^{-kn}.
    Inflation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [3, 4, 5])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// All three experiments; `--out` names a directory.
    All {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [3, 4, 5])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 2.5)]
    sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Lacunary gap: packet j sits at block kj.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Truncation of the packet sum.
    #[arg(long = "J", default_value_t = 5)]
    j_trunc: u32,
    #[arg(long = "grid-N", default_value_t = 2048)]
    grid_n: usize,
    /// Period; must be a multiple of 24 pi so every carrier is a lattice mode.
    #[arg(long = "domain-L", default_value_t = 24.0 * std::f64::consts::PI)]
    domain_l: f64,
    /// Output file (directory for `all`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Apply thresholds and exit with 1 if any fails.
    #[arg(long)]
    check: bool,
    /// TOML file overriding default thresholds.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Re-run at N/2 and at 2L and record relative changes.
    #[arg(long)]
    sensitivity: bool,
    /// Column plotted in SVG output (default depends on the experiment).
    #[arg(long)]
    plot_column: Option<String>,
    /// Reference slopes drawn in SVG output.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    guide_slope: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
struct TimeArgs {
    /// Time step; default min(1e-3, CFL/4).
    #[arg(long)]
    dt: Option<f64>,
    /// Remainder horizon: times T/8, T/4, T/2, T unless --times is given.
    #[arg(long = "T", default_value_t = 8e-3)]
    t_final: f64,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    times: Option<Vec<f64>>,
}

impl Common {
    fn params(&self) -> besov_lab::Result<ConstructionParams> {
        let params = ConstructionParams {
            sigma: self.sigma,
            p: self.p,
            k: self.k,
            j_trunc: self.j_trunc,
            grid: make_grid(self.grid_n, self.domain_l)?,
        };
        params.validate()?;
        Ok(params)
    }

    fn plot<R: Row>(&self) -> PlotSpec {
        let mut spec = PlotSpec::default_for::<R>();
        if let Some(c) = &self.plot_column {
            spec.column = c.clone();
        }
        if let Some(g) = &self.guide_slope {
            spec.guides = g.clone();
        }
        spec
    }

    fn thresholds(&self) -> besov_lab::Result<Thresholds> {
        match &self.thresholds {
            Some(path) => Thresholds::load(path),
            None => Ok(Thresholds::default()),
        }
    }
}

impl TimeArgs {
    fn solver(&self, params: &ConstructionParams) -> besov_lab::Result<SolverConfig> {
        let dt = match self.dt {
            Some(dt) => dt,
            None => default_dt(&make_u0(params)?),
        };
        Ok(SolverConfig::new(dt, self.t_final))
    }

    fn times(&self) -> Vec<f64> {
        self.times
            .clone()
            .unwrap_or_else(|| [0.125, 0.25, 0.5, 1.0].iter().map(|f| f * self.t_final).collect())
    }
}

fn write_output(text: &str, path: Option<&Path>) -> besov_lab::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn publish<R: Row>(
    report: &ExperimentReport<R>,
    common: &Common,
    path: Option<&Path>,
    checks: Vec<Check>,
) -> besov_lab::Result<bool> {
    write_output(&render(report, common.format, &common.plot::<R>())?, path)?;
    eprintln!("{}: {:.1} s", report.experiment, report.metadata.wall_time_s);
    if !common.check {
        return Ok(true);
    }
    for c in &checks {
        eprintln!("{}", c.line());
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn run(cli: Cli) -> besov_lab::Result<bool> {
    match cli.command {
        Command::VerifyLemma { common, n } => {
            let params = common.params()?;
            let mut report = verify_lemma(&params, &n)?;
            if common.sensitivity {
                attach_sensitivity(&mut report, |p| verify_lemma(p, &n));
            }
            publish(&report, &common, common.out.as_deref(), check_lemma(&report, &common.thresholds()?))
        }
        Command::RemainderScaling { common, time } => {
            let params = common.params()?;
            let cfg = time.solver(&params)?;
            let times = time.times();
            let mut report = remainder_scaling(&params, &times, &cfg)?;
            if common.sensitivity {
                attach_sensitivity(&mut report, |p| remainder_scaling(p, &times, &cfg));
            }
            publish(&report, &common, common.out.as_deref(), check_remainder(&report, &common.thresholds()?))
        }
        Command::Inflation { common, time, n, eps } => {
            let params = common.params()?;
            let cfg = time.solver(&params)?;
            let mut report = inflation(&params, eps, &n, &cfg)?;
            if common.sensitivity {
                attach_sensitivity(&mut report, |p| inflation(p, eps, &n, &cfg));
            }
            publish(&report, &common, common.out.as_deref(), check_inflation(&report, &common.thresholds()?))
        }
        Command::All { common, time, n, eps } => {
            let params = common.params()?;
            let thr = common.thresholds()?;
            let cfg = time.solver(&params)?;
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
            std::fs::create_dir_all(&dir).map_err(|source| HarnessError::Io {
                path: dir.clone(),
                source,
            })?;
            let file = |name: &str| dir.join(format!("{name}.{}", common.format.extension()));
            let times = time.times();

            let mut lemma = verify_lemma(&params, &n)?;
            let mut rem = remainder_scaling(&params, &times, &cfg)?;
            let mut infl = inflation(&params, eps, &n, &cfg)?;
            if common.sensitivity {
                attach_sensitivity(&mut lemma, |p| verify_lemma(p, &n));
                attach_sensitivity(&mut rem, |p| remainder_scaling(p, &times, &cfg));
                attach_sensitivity(&mut infl, |p| inflation(p, eps, &n, &cfg));
            }
            let a = publish(&lemma, &common, Some(&file("verify_lemma")), check_lemma(&lemma, &thr))?;
            let b = publish(&rem, &common, Some(&file("remainder_scaling")), check_remainder(&rem, &thr))?;
            let c = publish(&infl, &common, Some(&file("inflation")), check_inflation(&infl, &thr))?;
            Ok(a && b && c)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
