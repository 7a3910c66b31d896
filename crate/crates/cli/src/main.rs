//! Command line front end: solves the stationary equilibrium, integrates
//! shock transitions, runs the data-driven calibration scenarios, sweeps the
//! political game, and tabulates the automation regions. Every command emits
//! tidy CSV (atomically when writing to a file) so any plotting tool can
//! consume the results.

mod config;
mod data;
mod output;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use powerecon::calibration::{
    plan_scenario, predicted_series, solve_year, CalibratedPath, ScenarioKind, UnemploymentTarget,
};
use powerecon::dynamics::{integrate_path, PathOptions, ShockKind, ShockSpec};
use powerecon::equilibrium::{
    automation_region, harrod_diagnostics, m_bar_curve, m_tilde_curve, region_domain,
    solve_steady_with,
};
use powerecon::political::threat_sweep;
use powerecon::Error as CoreError;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_OTHER: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_DATA: u8 = 5;

#[derive(Parser)]
#[command(
    name = "powerecon",
    about = "General-equilibrium engine for bargained wages, search unemployment, and task automation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShockArg {
    /// Permanent change in the labor-task mass (ramped).
    Automation,
    /// Permanent change in the balanced growth rate.
    Growth,
    /// Permanent change in the firms' hiring capacity t_w.
    Mobility,
    /// Permanent change in the opportunity cost of employment b.
    Benefit,
    /// Permanent change in the collective-bargaining probability.
    Union,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Tech,
    Inst,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Efficient,
    Nairu,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the stationary equilibrium and report feasibility diagnostics.
    Steady {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override config values, e.g. --set institutions.t_w=4.2
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        /// Also print the canonical key=value parameter log.
        #[arg(long)]
        dump_params: bool,
    },
    /// Integrate the transition path after a permanent shock.
    Path {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, value_enum)]
        shock: ShockArg,
        /// Signed change applied to the shocked parameter.
        #[arg(long, allow_hyphen_values = true)]
        magnitude: f64,
        /// Phase-in of an automation shock, months.
        #[arg(long, default_value_t = 24.0)]
        ramp_months: f64,
        /// Months into the path at which the shock hits.
        #[arg(long, default_value_t = 0.0)]
        t_shock: f64,
        /// Months integrated.
        #[arg(long, default_value_t = 600.0)]
        horizon: f64,
        /// Integration step, months.
        #[arg(long, default_value_t = 0.25)]
        dt: f64,
        /// Emit every n-th step.
        #[arg(long, default_value_t = 4)]
        stride: u32,
    },
    /// Solve one steady state per data year under a counterfactual scenario.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        /// Unemployment series the mobility inversion targets.
        #[arg(long, value_enum, default_value_t = TargetArg::Efficient)]
        target: TargetArg,
        /// Worker threads for the year solves (0 = rayon default).
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Sweep the worker-government game over the threat covariate.
    Political {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Covariate grid as start:stop:count.
        #[arg(long, default_value = "-0.16:0.21:50")]
        phi_grid: String,
    },
    /// Tabulate the automation-region boundaries over the price of capital.
    Regions {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        /// Grid points across [q_min, q_max].
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidParam { .. }
        | CoreError::Degenerate(_)
        | CoreError::Singular(_)
        | CoreError::SurplusExhausted { .. }
        | CoreError::NonPositiveDiscount { .. }
        | CoreError::UndefinedWeights => EXIT_VALIDATION,
        CoreError::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        CoreError::BlowUp { .. }
        | CoreError::NoCapitalSolution { .. }
        | CoreError::NoCrossing { .. }
        | CoreError::RegionUndefined { .. } => EXIT_INFEASIBLE,
        CoreError::UnattainableTarget { .. }
        | CoreError::OutOfRange { .. }
        | CoreError::MissingDatum { .. }
        | CoreError::UnknownField(_) => EXIT_DATA,
    }
}

type Failure = (u8, anyhow::Error);

fn core_err(e: CoreError) -> Failure {
    (core_exit_code(&e), anyhow!(e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err((code, err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Steady {
            config,
            out,
            set,
            dump_params,
        } => cmd_steady(&config, out.as_deref(), &set, dump_params),
        Command::Path {
            config,
            out,
            set,
            shock,
            magnitude,
            ramp_months,
            t_shock,
            horizon,
            dt,
            stride,
        } => cmd_path(
            &config,
            out.as_deref(),
            &set,
            shock,
            magnitude,
            ramp_months,
            t_shock,
            horizon,
            dt,
            stride,
        ),
        Command::Calibrate {
            config,
            data,
            out,
            set,
            scenario,
            target,
            workers,
        } => cmd_calibrate(
            &config,
            &data,
            out.as_deref(),
            &set,
            scenario,
            target,
            workers,
        ),
        Command::Political {
            config,
            out,
            phi_grid,
        } => cmd_political(&config, out.as_deref(), &phi_grid),
        Command::Regions {
            config,
            out,
            set,
            grid,
        } => cmd_regions(&config, out.as_deref(), &set, grid),
    }
}

fn load_config(path: &std::path::Path, set: &[String]) -> Result<config::RunConfig, Failure> {
    config::load(path, set).map_err(|e| {
        // core validation errors keep their own taxonomy
        match e.downcast::<CoreError>() {
            Ok(core) => core_err(core),
            Err(other) => (EXIT_VALIDATION, other),
        }
    })
}

fn write_out(path: Option<&std::path::Path>, content: &str) -> Result<(), Failure> {
    output::write_atomic(path, content).map_err(|e| (EXIT_OTHER, e))
}

fn cmd_steady(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    set: &[String],
    dump_params: bool,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path, set)?;
    if dump_params {
        print!("{}", cfg.params.to_key_value());
    }
    let ss = solve_steady_with(&cfg.params, &cfg.solver).map_err(core_err)?;
    let diag = harrod_diagnostics(&ss, &cfg.params);
    let c = output::cell;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mu,theta,k_hat,c_hat,wage,u_rate,v_rate,labor_share,r_profit,y_hat,y_l,lambda_eff,k_over_qy_annual,mu_min,g_over_delta,harrod_s,chi,feasible"
    );
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        c(ss.mu),
        c(ss.theta),
        c(ss.k_hat),
        c(ss.c_hat),
        c(ss.wage),
        c(ss.u_rate),
        c(ss.v_rate),
        c(ss.labor_share),
        c(ss.r_profit),
        c(ss.y_hat),
        c(ss.y_l),
        c(ss.lambda_eff),
        c(ss.k_over_qy_annual(cfg.params.tech().q_rel)),
        c(diag.mu_min),
        c(diag.g_over_delta),
        c(diag.harrod_s),
        c(diag.chi),
        diag.feasible
    );
    write_out(out, &s)?;
    if !diag.feasible {
        eprintln!(
            "infeasible balanced growth path: {} (mu = {}, g/delta = {}, mu_min = {})",
            diag.reason.unwrap_or("see diagnostics"),
            ss.mu,
            diag.g_over_delta,
            diag.mu_min
        );
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_path(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    set: &[String],
    shock: ShockArg,
    magnitude: f64,
    ramp_months: f64,
    t_shock: f64,
    horizon: f64,
    dt: f64,
    stride: u32,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path, set)?;
    let kind = match shock {
        ShockArg::Automation => ShockKind::Automation { ramp_months },
        ShockArg::Growth => ShockKind::Growth,
        ShockArg::Mobility => ShockKind::Mobility,
        ShockArg::Benefit => ShockKind::OpportunityCost,
        ShockArg::Union => ShockKind::UnionProbability,
    };
    let spec = ShockSpec {
        kind,
        magnitude,
        t_shock,
    };
    let mut opts = PathOptions {
        horizon,
        dt,
        stride: stride.max(1),
        ..PathOptions::default()
    };
    opts.solver = cfg.solver;
    let initial = solve_steady_with(&cfg.params, &cfg.solver).map_err(core_err)?;
    let path = integrate_path(&initial, &spec, &cfg.params, &opts).map_err(core_err)?;
    let c = output::cell;
    let mut s = String::new();
    let _ = writeln!(s, "t,l,u,v,theta,k_hat,c_hat,mu,wage,labor_share,m,m_dot");
    for p in &path {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c(p.t),
            c(p.l),
            c(p.u),
            c(p.v),
            c(p.theta),
            c(p.k_hat),
            c(p.c_hat),
            c(p.mu),
            c(p.wage),
            c(p.labor_share),
            c(p.m),
            c(p.m_dot)
        );
    }
    write_out(out, &s)?;
    Ok(EXIT_OK)
}

fn cmd_calibrate(
    config_path: &std::path::Path,
    data_path: &std::path::Path,
    out: Option<&std::path::Path>,
    set: &[String],
    scenario: ScenarioArg,
    target: TargetArg,
    workers: usize,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path, set)?;
    let rows = data::read_rows(data_path).map_err(|e| (EXIT_DATA, e))?;
    let kind = match scenario {
        ScenarioArg::Tech => ScenarioKind::TechnicalChangeAlone,
        ScenarioArg::Inst => ScenarioKind::InstitutionsAlone,
        ScenarioArg::Both => ScenarioKind::Both,
    };
    let target = match target {
        TargetArg::Efficient => UnemploymentTarget::Efficient,
        TargetArg::Nairu => UnemploymentTarget::Nairu,
    };
    let plan = plan_scenario(&rows, kind, target, &cfg.params, &cfg.solver).map_err(core_err)?;

    // deterministic ordered assembly regardless of the worker count
    let results: Vec<_> = if workers == 1 {
        rows.iter().map(|r| solve_year(&plan, r)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| (EXIT_OTHER, anyhow!(e)))?;
        pool.install(|| rows.par_iter().map(|r| solve_year(&plan, r)).collect())
    };
    let mut path = CalibratedPath {
        kind,
        years: Vec::new(),
        failures: Vec::new(),
    };
    for (row, res) in rows.iter().zip(results) {
        match res {
            Ok(y) => path.years.push(y),
            Err(e) => path.failures.push((row.year, e)),
        }
    }
    if path.failures.len() * 5 > rows.len() {
        for (year, e) in &path.failures {
            eprintln!("  {year}: {e}");
        }
        return Err((
            EXIT_DATA,
            anyhow!(
                "calibration aborted: {} of {} rows failed",
                path.failures.len(),
                rows.len()
            ),
        ));
    }

    let c = output::cell;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario,year,m,t_w,target_u,mu,theta,wage,u_rate,v_rate,labor_share,r_profit,k_over_qy_annual,y_hat"
    );
    for y in &path.years {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            kind.label(),
            y.year,
            c(y.m),
            c(y.t_w),
            y.target_u.map(c).unwrap_or_default(),
            c(y.state.mu),
            c(y.state.theta),
            c(y.state.wage),
            c(y.state.u_rate),
            c(y.state.v_rate),
            c(y.state.labor_share),
            c(y.state.r_profit),
            c(y.k_over_qy_annual),
            c(y.state.y_hat)
        );
    }
    write_out(out, &s)?;
    if !path.failures.is_empty() {
        eprintln!("{} year(s) failed:", path.failures.len());
        for (year, e) in &path.failures {
            eprintln!("  {year}: {e}");
        }
    }
    // keep the extraction path exercised: a bad field name is a hard error
    let _ = predicted_series(&path, "labor_share").map_err(core_err)?;
    Ok(EXIT_OK)
}

fn parse_phi_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        anyhow::bail!("--phi-grid must be start:stop:count, got `{spec}`");
    }
    let start: f64 = parts[0].parse().context("phi-grid start")?;
    let stop: f64 = parts[1].parse().context("phi-grid stop")?;
    let count: usize = parts[2].parse().context("phi-grid count")?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    })
}

fn cmd_political(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    phi_grid: &str,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path, &[])?;
    let game = cfg.political.ok_or_else(|| {
        (
            EXIT_VALIDATION,
            anyhow!("config has no [political] section"),
        )
    })?;
    let grid = parse_phi_grid(phi_grid).map_err(|e| (EXIT_VALIDATION, e))?;
    let points = threat_sweep(&game, &grid).map_err(core_err)?;
    let c = output::cell;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "phi,p_union,p_support,joint_11,joint_12,joint_21,joint_22,residual"
    );
    for p in &points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            c(p.phi),
            c(p.p_union),
            c(p.p_support),
            c(p.joint[0]),
            c(p.joint[1]),
            c(p.joint[2]),
            c(p.joint[3]),
            c(p.residual)
        );
    }
    write_out(out, &s)?;
    Ok(EXIT_OK)
}

fn cmd_regions(
    config_path: &std::path::Path,
    out: Option<&std::path::Path>,
    set: &[String],
    grid: usize,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path, set)?;
    let tech = cfg.params.tech();
    let ss = solve_steady_with(&cfg.params, &cfg.solver).map_err(core_err)?;
    let report = automation_region(tech.q_rel, tech.m, ss.mu, tech).map_err(core_err)?;
    let (q_min, q_bar, q_max) = region_domain(ss.mu, tech).map_err(core_err)?;
    let c = output::cell;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "q,m_bar,m_tilde,q_bar,q_min,q_max,config_q,config_m,config_region"
    );
    let n = grid.max(2);
    for i in 0..n {
        let q = q_min + (q_max - q_min) * i as f64 / (n - 1) as f64;
        let (m_bar, m_tilde) = if q <= q_bar {
            (
                c(m_bar_curve(q, q_bar, tech.sigma, tech.alpha)),
                String::new(),
            )
        } else {
            (
                String::new(),
                c(m_tilde_curve(q, q_bar, tech.sigma, tech.alpha)),
            )
        };
        let _ = writeln!(
            s,
            "{},{m_bar},{m_tilde},{},{},{},{},{},{}",
            c(q),
            c(q_bar),
            c(q_min),
            c(q_max),
            c(tech.q_rel),
            c(tech.m),
            report.region.index()
        );
    }
    write_out(out, &s)?;
    Ok(EXIT_OK)
}
