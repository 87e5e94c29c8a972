//! `maxlab` command line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::datum::Datum;
use crate::error::{LabError, Result};
use crate::ergodic::{
    certificate, density_deficiency, dirichlet_sweep, kernel::log_slope, search_theta, CertificateReport,
    DensityWitness, MollifierSpec,
};
use crate::experiment::output::{ensure_dir, write_json, write_text, Cell, Csv};
use crate::experiment::packing::packing_check;
use crate::experiment::sweep::{r_sweep_with, SweepOptions};
use crate::params::ExperimentParams;
use crate::propagator::{interference_scan, lambda_samples, InterferenceReport, INTERFERENCE_TOLERANCE};

#[derive(Parser, Debug)]
#[command(name = "maxlab", version, about = "Counterexample data, certificates and exponent sweeps for the Schrödinger maximal estimate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Interference floor on sampled points of Lambda.
    Interfere(Common),
    /// Torus density of a given or searched direction.
    Density(Common),
    /// Fourier density certificate.
    Certify(Common),
    /// L1 norms of the Dirichlet kernel at N = 1, 2, 4, ..
    Dirichlet {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16384)]
        nmax: u64,
    },
    /// Maximal estimates across R and the fitted exponent.
    Sweep(Common),
    /// Volume of the large-value set against R.
    Packing(Common),
}

/// Run configuration: the experiment parameters (all optional, with
/// defaults `n = 3, sigma = 0.15, R = 256`) plus per-command options.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub sigma: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub eps: Option<f64>,
    pub s_exponent: Option<f64>,
    pub quad_order: Option<usize>,
    pub seed: Option<u64>,
    pub sample_count: Option<usize>,
    #[serde(rename = "R_list")]
    pub r_list: Option<Vec<f64>>,
    pub search_budget: Option<usize>,
    pub candidate_count: Option<usize>,
    pub theta: Option<Vec<f64>>,
    pub truncation: Option<u64>,
    pub space_samples: Option<usize>,
    pub perturb: Option<bool>,
    pub allow_wide_tolerance: Option<bool>,
    pub mollifier_order: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                LabError::contract(format!("config file {} not found", path.display()))
            } else {
                LabError::Io {
                    path: path.display().to_string(),
                    source,
                }
            }
        })?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::contract(format!("config file {}: {e}", path.display())))
    }

    fn dims(&self) -> (usize, f64) {
        (self.n.unwrap_or(3), self.sigma.unwrap_or(0.15))
    }

    pub fn params(&self) -> Result<ExperimentParams<f64>> {
        let (n, sigma) = self.dims();
        let mut p = ExperimentParams {
            n,
            sigma,
            r: self.r.unwrap_or(256.0),
            rho: 0.01,
            eps: 0.01,
            s_exponent: 0.0,
            quad_order: 2,
            seed: 0,
            sample_count: 1000,
            allow_wide_tolerance: self.allow_wide_tolerance.unwrap_or(false),
            center_cap: crate::params::DEFAULT_CENTER_CAP,
        };
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.eps {
            p.eps = v;
        }
        if let Some(v) = self.s_exponent {
            p.s_exponent = v;
        }
        if let Some(v) = self.quad_order {
            p.quad_order = v;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = self.sample_count {
            p.sample_count = v;
        }
        p.validate()?;
        Ok(p)
    }

    fn r_list(&self) -> Vec<f64> {
        self.r_list.clone().unwrap_or_else(|| vec![256.0, 1024.0, 4096.0])
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    let (common, job): (Common, Box<dyn FnOnce(&RunConfig, &Path) -> Result<String> + Send>) = match cmd {
        Command::Interfere(c) => (c, Box::new(run_interfere)),
        Command::Density(c) => (c, Box::new(run_density)),
        Command::Certify(c) => (c, Box::new(run_certify)),
        Command::Dirichlet { common, nmax } => (common, Box::new(move |_, out| run_dirichlet(nmax, out))),
        Command::Sweep(c) => (c, Box::new(run_sweep)),
        Command::Packing(c) => (c, Box::new(run_packing)),
    };
    let config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    ensure_dir(&common.out)?;
    match common.threads {
        Some(0) => Err(LabError::contract("--threads must be >= 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| LabError::contract(format!("thread pool: {e}")))?;
            pool.install(|| job(&config, &common.out))
        }
        None => job(&config, &common.out),
    }
}

fn theta_cells(theta: &[f64]) -> Vec<Cell<'static>> {
    theta.iter().map(|&c| Cell::F(c)).collect()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

#[derive(Serialize)]
struct InterfereOutput<'a> {
    params: &'a ExperimentParams<f64>,
    omega_measure: f64,
    ball_count: usize,
    time_count: usize,
    space_samples: usize,
    perturb: bool,
    report: &'a InterferenceReport<f64>,
}

fn run_interfere(cfg: &RunConfig, out: &Path) -> Result<String> {
    let p = cfg.params()?;
    let d = Datum::build(&p, None)?;
    let count = cfg.space_samples.unwrap_or(p.sample_count);
    let perturb = cfg.perturb.unwrap_or(true);
    let xs = lambda_samples(&p, count, p.seed, perturb)?;
    let (report, rows) = interference_scan(&d, &xs, INTERFERENCE_TOLERANCE)?;
    let mut header = numbered("x", p.n);
    header.extend(["t", "re", "im", "modulus", "ratio"].map(String::from));
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for row in &rows {
        let mut cells = theta_cells(&row.x);
        cells.extend([
            Cell::F(row.t),
            Cell::F(row.value.re),
            Cell::F(row.value.im),
            Cell::F(row.value.norm()),
            Cell::F(row.ratio),
        ]);
        csv.row(&cells);
    }
    write_text(out, "interfere.csv", csv.as_str())?;
    write_json(
        out,
        "interfere.json",
        &InterfereOutput {
            params: &p,
            omega_measure: d.omega_measure(),
            ball_count: d.ball_count(),
            time_count: p.time_count(),
            space_samples: count,
            perturb,
            report: &report,
        },
    )?;
    Ok(format!(
        "interfere: min ratio {:.6} over {} evaluations (floor {:.6}, {})",
        report.min_ratio,
        report.evaluations,
        report.floor,
        if report.passed { "pass" } else { "FAIL" }
    ))
}

fn density_csv(n: usize, witnesses: &[&DensityWitness<f64>]) -> Csv {
    let mut header = numbered("theta", n);
    header.extend(["worst_deficiency", "target", "passed", "violations", "samples"].map(String::from));
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for w in witnesses {
        let mut cells = theta_cells(&w.theta);
        cells.extend([
            Cell::F(w.worst_deficiency),
            Cell::F(w.target),
            Cell::B(w.passed),
            Cell::U(w.violations as u64),
            Cell::U(w.samples as u64),
        ]);
        csv.row(&cells);
    }
    csv
}

fn chosen_theta(cfg: &RunConfig, p: &ExperimentParams<f64>, default_candidates: usize) -> Result<DensityWitness<f64>> {
    match &cfg.theta {
        Some(th) => density_deficiency(th, p, p.sample_count, p.seed),
        None => search_theta(p, cfg.candidate_count.unwrap_or(default_candidates), p.seed),
    }
}

#[derive(Serialize)]
struct DensityOutput<'a> {
    params: &'a ExperimentParams<f64>,
    searched: bool,
    witness: &'a DensityWitness<f64>,
}

fn run_density(cfg: &RunConfig, out: &Path) -> Result<String> {
    let p = cfg.params()?;
    let w = chosen_theta(cfg, &p, 64)?;
    write_text(out, "density.csv", density_csv(p.n, &[&w]).as_str())?;
    write_json(
        out,
        "density.json",
        &DensityOutput {
            params: &p,
            searched: cfg.theta.is_none(),
            witness: &w,
        },
    )?;
    Ok(format!(
        "density: worst deficiency {:.6e} against target {:.6e} ({} violations in {} samples)",
        w.worst_deficiency, w.target, w.violations, w.samples
    ))
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    params: &'a ExperimentParams<f64>,
    certificate: &'a CertificateReport<f64>,
    density: &'a DensityWitness<f64>,
}

fn run_certify(cfg: &RunConfig, out: &Path) -> Result<String> {
    let p = cfg.params()?;
    let spec = MollifierSpec::new(&p, cfg.mollifier_order)?;
    let w = chosen_theta(cfg, &p, 16)?;
    let rep = certificate(&w.theta, &p, cfg.truncation, &spec)?;
    let mut header = vec!["R".to_string()];
    header.extend(numbered("theta", p.n));
    header.extend(
        [
            "phi0",
            "eta_mass",
            "gamma_trunc",
            "tail_bound",
            "margin",
            "truncation_radius",
            "certified",
            "asymptotically_certifiable",
            "density_worst_deficiency",
            "density_violations",
        ]
        .map(String::from),
    );
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut cells = vec![Cell::F(rep.r)];
    cells.extend(theta_cells(&rep.theta));
    cells.extend([
        Cell::F(rep.phi0),
        Cell::F(rep.eta_mass),
        Cell::F(rep.gamma_trunc),
        Cell::F(rep.tail_bound),
        Cell::F(rep.margin),
        Cell::U(rep.truncation_radius),
        Cell::B(rep.certified),
        Cell::B(rep.asymptotically_certifiable),
        Cell::F(w.worst_deficiency),
        Cell::U(w.violations as u64),
    ]);
    csv.row(&cells);
    write_text(out, "certify.csv", csv.as_str())?;
    write_json(
        out,
        "certify.json",
        &CertifyOutput {
            params: &p,
            certificate: &rep,
            density: &w,
        },
    )?;
    for warning in &rep.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(format!(
        "certify: margin {:.6e} (phi0*eta_mass {:.6e}, gamma {:.6e}, tail {:.6e}, K = {})",
        rep.margin,
        rep.phi0 * rep.eta_mass,
        rep.gamma_trunc,
        rep.tail_bound,
        rep.truncation_radius
    ))
}

#[derive(Serialize)]
struct DirichletOutput<'a> {
    nmax: u64,
    rows: &'a [crate::ergodic::DirichletRow<f64>],
    final_running_slope: f64,
    /// Least-squares slope against ln N over N >= 16.
    fitted_slope: f64,
    reference_slope: f64,
}

fn run_dirichlet(nmax: u64, out: &Path) -> Result<String> {
    if nmax == 0 {
        return Err(LabError::contract("--nmax must be >= 1"));
    }
    let rows = dirichlet_sweep::<f64>(nmax);
    let mut csv = Csv::new(&["N", "value", "running_slope"]);
    for r in &rows {
        csv.row(&[Cell::U(r.n), Cell::F(r.value), Cell::F(r.running_slope)]);
    }
    write_text(out, "dirichlet.csv", csv.as_str())?;
    let tail: Vec<_> = rows.iter().filter(|r| r.n >= 16).cloned().collect();
    let fitted_slope = if tail.len() >= 2 { log_slope(&tail) } else { f64::NAN };
    let final_running_slope = rows.last().map(|r| r.running_slope).unwrap_or(f64::NAN);
    write_json(
        out,
        "dirichlet.json",
        &DirichletOutput {
            nmax,
            rows: &rows,
            final_running_slope,
            fitted_slope,
            reference_slope: 4.0 / (std::f64::consts::PI * std::f64::consts::PI),
        },
    )?;
    Ok(format!(
        "dirichlet: final running slope {final_running_slope:.6}, fitted slope {fitted_slope:.6}"
    ))
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    params: &'a ExperimentParams<f64>,
    search_budget: usize,
    space_samples: usize,
    #[serde(flatten)]
    report: &'a crate::experiment::sweep::ScalingReport<f64>,
}

fn run_sweep(cfg: &RunConfig, out: &Path) -> Result<String> {
    let p = cfg.params()?;
    let opts = SweepOptions {
        search_budget: cfg.search_budget.unwrap_or(256),
        space_samples: cfg.space_samples.unwrap_or(p.sample_count),
    };
    let rep = r_sweep_with(&p, &cfg.r_list(), &opts)?;
    let mut header: Vec<String> = [
        "R",
        "omega_measure",
        "lambda_coverage_fraction",
        "lhs_lower",
        "lhs_std_error",
        "hs_norm_value",
        "density_deficiency",
    ]
    .map(String::from)
    .to_vec();
    header.extend(numbered("theta", p.n));
    header.push("error".to_string());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut plot = String::from("# log_R log_lhs_lower\n");
    for r in &rep.rows {
        let mut cells = vec![
            Cell::F(r.r),
            Cell::F(r.omega_measure),
            Cell::F(r.lambda_coverage_fraction),
            Cell::F(r.lhs_lower),
            Cell::F(r.lhs_std_error),
            Cell::F(r.hs_norm_value),
            Cell::F(r.density_deficiency),
        ];
        if r.theta.len() == p.n {
            cells.extend(theta_cells(&r.theta));
        } else {
            cells.extend((0..p.n).map(|_| Cell::F(f64::NAN)));
        }
        cells.push(Cell::S(r.error.as_deref().unwrap_or("")));
        csv.row(&cells);
        if r.error.is_none() {
            plot.push_str(&format!(
                "{} {}\n",
                crate::experiment::output::fmt_float(r.r.ln()),
                crate::experiment::output::fmt_float(r.lhs_lower.ln())
            ));
        }
    }
    write_text(out, "sweep.csv", csv.as_str())?;
    write_text(out, "sweep_plot.dat", &plot)?;
    write_json(
        out,
        "sweep.json",
        &SweepOutput {
            params: &p,
            search_budget: opts.search_budget,
            space_samples: opts.space_samples,
            report: &rep,
        },
    )?;
    Ok(format!(
        "sweep: fitted exponent {:.4} +- {:.4}, predicted {:.4}, leave-one-out change {:.4}",
        rep.fitted_exponent, rep.fitted_std_error, rep.predicted, rep.leave_one_out_max_change
    ))
}

fn run_packing(cfg: &RunConfig, out: &Path) -> Result<String> {
    let (n, sigma) = cfg.dims();
    let rep = packing_check(n, sigma, &cfg.r_list())?;
    let mut csv = Csv::new(&["R", "point_count_bound", "neighborhood_volume_bound"]);
    for r in &rep.rows {
        csv.row(&[
            Cell::F(r.r),
            Cell::F(r.point_count_bound),
            Cell::F(r.neighborhood_volume_bound),
        ]);
    }
    write_text(out, "packing.csv", csv.as_str())?;
    write_json(out, "packing.json", &rep)?;
    Ok(format!(
        "packing: exponent 1-(n+2)sigma = {:.6}, conclusion {:?}",
        rep.exponent, rep.conclusion
    ))
}
