//! Data-driven calibration: automation recovery, mobility inversion, and
//! the three counterfactual scenarios.
//!
//! Each calendar year is solved as an independent steady state. The
//! labor-task mass comes from inverting the capital-market condition
//! against observed capital-output ratios and returns, and the firms'
//! hiring capacity is inverted so the solved unemployment rate matches the
//! efficient-unemployment target `sqrt(U V)` (or the NAIRU column, when
//! selected). A scenario freezes the parameters it does not study at their
//! full-sample means.

use crate::equilibrium::{solve_steady_with, SolverOptions};
use crate::error::Error;
use crate::math;
use crate::params::{ModelParams, SteadyState, TechnologyParams, TimeSeriesRow};
use crate::solve::bracketed_root;
use crate::Result;
use alloc::vec::Vec;

/// Which parameters are allowed to move through time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Only `g_t` and `m_t` vary.
    TechnicalChangeAlone,
    /// Only `t_w_t`, `b_t`, and `p_union_t` vary.
    InstitutionsAlone,
    /// Everything above varies.
    Both,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::TechnicalChangeAlone => "tech",
            ScenarioKind::InstitutionsAlone => "inst",
            ScenarioKind::Both => "both",
        }
    }
}

/// Unemployment series the mobility inversion targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnemploymentTarget {
    /// `sqrt(U_t V_t)`, the rate minimizing nonproductive job-seeking and
    /// recruiting time.
    Efficient,
    /// Use the unemployment column directly as the equilibrium rate.
    Nairu,
}

impl UnemploymentTarget {
    fn of(self, row: &TimeSeriesRow) -> Result<f64> {
        let u = row.u_data.ok_or(Error::MissingDatum {
            column: "u_data",
            year: row.year,
        })?;
        match self {
            UnemploymentTarget::Nairu => Ok(u),
            UnemploymentTarget::Efficient => {
                let v = row.v_data.ok_or(Error::MissingDatum {
                    column: "v_data",
                    year: row.year,
                })?;
                Ok(math::sqrt(u * v))
            }
        }
    }
}

/// Recover the labor-task mass from one year of data:
/// `1 - m = (K/(qY))_monthly (a_k q)^(1-sigma) (delta_data (1 + mu_data))^sigma`,
/// with the monthly ratio being twelve times the annual one (output is a
/// monthly flow).
pub fn estimate_automation(row: &TimeSeriesRow, tech: &TechnologyParams) -> Result<f64> {
    let ratio_annual = row.k_over_qy_annual.ok_or(Error::MissingDatum {
        column: "k_over_qy_annual",
        year: row.year,
    })?;
    let mu = row.mu_data.ok_or(Error::MissingDatum {
        column: "mu_data",
        year: row.year,
    })?;
    let delta = row.delta_data.ok_or(Error::MissingDatum {
        column: "delta_data",
        year: row.year,
    })?;
    let ratio_monthly = 12.0 * ratio_annual;
    let one_minus_m = ratio_monthly
        * math::powf(tech.a_k * tech.q_rel, 1.0 - tech.sigma)
        * math::powf(delta * (1.0 + mu), tech.sigma);
    if !(one_minus_m > 0.0 && one_minus_m < 1.0) {
        return Err(Error::OutOfRange {
            what: "capital-task share 1 - m",
            value: one_minus_m,
        });
    }
    Ok(1.0 - one_minus_m)
}

/// Invert the firms' hiring capacity against an unemployment target: the
/// `t_w >= 0` whose solved steady state has `u_rate = target_u`.
///
/// Steady-state unemployment falls in `t_w`, so the bracket is expanded
/// geometrically from `[1e-3, 50]` until it straddles the target.
pub fn invert_t_w(target_u: f64, params: &ModelParams, opts: &SolverOptions) -> Result<f64> {
    if !(target_u > 0.0 && target_u < 1.0) {
        return Err(Error::InvalidParam {
            field: "target_u",
            value: target_u,
            constraint: "lie in (0,1)",
        });
    }
    let mut solver = *opts;
    let mut u_of = |t_w: f64| -> Result<f64> {
        let p = params.modify(|_, _, _, i| i.t_w = t_w)?;
        let ss = solve_steady_with(&p, &solver)?;
        solver.mu_initial = ss.mu; // warm start the next evaluation
        Ok(ss.u_rate)
    };
    let (mut lo, mut hi) = (1e-3, 50.0);
    let mut u_lo = u_of(lo)?;
    let u_hi_initial = u_of(hi)?;
    let mut u_hi = u_hi_initial;
    if u_lo < target_u {
        // even near-immobile firms leave unemployment below target; probe t_w = 0
        lo = 0.0;
        u_lo = u_of(0.0)?;
        if u_lo < target_u {
            return Err(Error::UnattainableTarget {
                target: target_u,
                reachable_lo: u_hi,
                reachable_hi: u_lo,
            });
        }
    }
    while u_hi > target_u {
        hi *= 4.0;
        if hi > 1e9 {
            return Err(Error::UnattainableTarget {
                target: target_u,
                reachable_lo: u_hi,
                reachable_hi: u_lo,
            });
        }
        u_hi = u_of(hi)?;
    }
    // verify monotonicity across the bracket before trusting the inversion
    if u_lo < u_hi {
        return Err(Error::NonConvergence {
            what: "mobility inversion (unemployment not decreasing over bracket)",
            iterations: 0,
            residual: u_hi - u_lo,
        });
    }
    let mut inner_err: Option<Error> = None;
    let mut gap = |t_w: f64| match u_of(t_w) {
        Ok(u) => u - target_u,
        Err(e) => {
            inner_err = Some(e);
            f64::NAN
        }
    };
    let root = bracketed_root(
        &mut gap,
        lo,
        hi,
        u_lo - target_u,
        u_hi - target_u,
        1e-10,
        200,
        "mobility inversion",
    );
    match inner_err {
        Some(e) => Err(e),
        None => root,
    }
}

/// One solved calibration year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedYear {
    pub year: i32,
    /// Labor-task mass used for the solve.
    pub m: f64,
    /// Hiring capacity used for the solve.
    pub t_w: f64,
    /// Unemployment target when institutions vary.
    pub target_u: Option<f64>,
    pub state: SteadyState,
    /// Annual capital-output ratio of the solved state.
    pub k_over_qy_annual: f64,
}

/// Frozen context shared by every year of one scenario run.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioPlan {
    pub kind: ScenarioKind,
    pub target: UnemploymentTarget,
    /// Base bundle with non-varying parameters at their sample means
    /// (including the sample-mean mobility inversion).
    pub frozen: ModelParams,
    pub solver: SolverOptions,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0u32;
    for v in values.flatten() {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Compute sample means, freeze the non-varying parameters, and invert the
/// sample-mean mobility.
pub fn plan_scenario(
    data: &[TimeSeriesRow],
    kind: ScenarioKind,
    target: UnemploymentTarget,
    base: &ModelParams,
    solver: &SolverOptions,
) -> Result<ScenarioPlan> {
    if data.is_empty() {
        return Err(Error::OutOfRange {
            what: "calibration rows",
            value: 0.0,
        });
    }
    let m_bar = mean(
        data.iter()
            .map(|r| estimate_automation(r, base.tech()).ok()),
    )
    .ok_or(Error::MissingDatum {
        column: "k_over_qy_annual/mu_data/delta_data",
        year: data[0].year,
    })?;
    let g_bar = mean(data.iter().map(|r| r.g)).ok_or(Error::MissingDatum {
        column: "g",
        year: data[0].year,
    })?;
    let b_bar = mean(data.iter().map(|r| r.b)).ok_or(Error::MissingDatum {
        column: "b",
        year: data[0].year,
    })?;
    let p_bar = mean(data.iter().map(|r| r.p_union)).ok_or(Error::MissingDatum {
        column: "p_union",
        year: data[0].year,
    })?;
    let target_bar = mean(data.iter().map(|r| target.of(r).ok())).ok_or(Error::MissingDatum {
        column: "u_data/v_data",
        year: data[0].year,
    })?;
    let means = base.modify(|t, _, _, i| {
        t.m = m_bar;
        t.g = g_bar;
        i.b = b_bar;
        i.p_union = p_bar;
    })?;
    let t_w_bar = invert_t_w(target_bar, &means, solver)?;
    let frozen = means.modify(|_, _, _, i| i.t_w = t_w_bar)?;
    Ok(ScenarioPlan {
        kind,
        target,
        frozen,
        solver: *solver,
    })
}

/// Solve one calendar year under a scenario plan. Pure and independent
/// across rows, so a caller may fan years out to worker threads.
pub fn solve_year(plan: &ScenarioPlan, row: &TimeSeriesRow) -> Result<CalibratedYear> {
    let tech_varies = matches!(
        plan.kind,
        ScenarioKind::TechnicalChangeAlone | ScenarioKind::Both
    );
    let inst_varies = matches!(
        plan.kind,
        ScenarioKind::InstitutionsAlone | ScenarioKind::Both
    );

    let mut params = plan.frozen;
    if tech_varies {
        let m_t = estimate_automation(row, plan.frozen.tech())?;
        let g_t = row.g.ok_or(Error::MissingDatum {
            column: "g",
            year: row.year,
        })?;
        params = params.modify(|t, _, _, _| {
            t.m = m_t;
            t.g = g_t;
        })?;
    }
    let mut target_u = None;
    if inst_varies {
        let b_t = row.b.ok_or(Error::MissingDatum {
            column: "b",
            year: row.year,
        })?;
        let p_t = row.p_union.ok_or(Error::MissingDatum {
            column: "p_union",
            year: row.year,
        })?;
        params = params.modify(|_, _, _, i| {
            i.b = b_t;
            i.p_union = p_t;
        })?;
        let tgt = plan.target.of(row)?;
        let t_w = invert_t_w(tgt, &params, &plan.solver)?;
        params = params.modify(|_, _, _, i| i.t_w = t_w)?;
        target_u = Some(tgt);
    }
    let state = solve_steady_with(&params, &plan.solver)?;
    Ok(CalibratedYear {
        year: row.year,
        m: params.tech().m,
        t_w: params.inst().t_w,
        target_u,
        state,
        k_over_qy_annual: state.k_over_qy_annual(params.tech().q_rel),
    })
}

/// A scenario's solved years plus any per-year failures.
#[derive(Debug, Clone)]
pub struct CalibratedPath {
    pub kind: ScenarioKind,
    pub years: Vec<CalibratedYear>,
    pub failures: Vec<(i32, Error)>,
}

/// Run a scenario over the whole sample, collecting per-year failures.
/// Aborts only when more than 20% of rows fail.
pub fn run_scenario(
    data: &[TimeSeriesRow],
    kind: ScenarioKind,
    target: UnemploymentTarget,
    base: &ModelParams,
    solver: &SolverOptions,
) -> Result<CalibratedPath> {
    let plan = plan_scenario(data, kind, target, base, solver)?;
    let mut years = Vec::with_capacity(data.len());
    let mut failures = Vec::new();
    for row in data {
        match solve_year(&plan, row) {
            Ok(y) => years.push(y),
            Err(e) => failures.push((row.year, e)),
        }
    }
    if failures.len() * 5 > data.len() {
        return Err(Error::NonConvergence {
            what: "calibration scenario (more than 20% of rows failed)",
            iterations: failures.len() as u32,
            residual: failures.len() as f64 / data.len() as f64,
        });
    }
    Ok(CalibratedPath {
        kind,
        years,
        failures,
    })
}

/// Extract one named column as a tidy `(year, value)` table.
pub fn predicted_series(path: &CalibratedPath, which: &str) -> Result<Vec<(i32, f64)>> {
    let field = |y: &CalibratedYear| -> Option<f64> {
        Some(match which {
            "m" => y.m,
            "t_w" => y.t_w,
            "target_u" => return y.target_u,
            "mu" => y.state.mu,
            "theta" => y.state.theta,
            "k_hat" => y.state.k_hat,
            "c_hat" => y.state.c_hat,
            "wage" => y.state.wage,
            "u_rate" => y.state.u_rate,
            "v_rate" => y.state.v_rate,
            "labor_share" => y.state.labor_share,
            "r_profit" => y.state.r_profit,
            "y_hat" => y.state.y_hat,
            "k_over_qy_annual" => y.k_over_qy_annual,
            _ => return None,
        })
    };
    if path.years.is_empty() {
        // column validity is checkable even on an empty path
        let probe = CalibratedYear {
            year: 0,
            m: 0.5,
            t_w: 1.0,
            target_u: Some(0.0),
            state: dummy_state(),
            k_over_qy_annual: 0.0,
        };
        if field(&probe).is_none() {
            return Err(Error::UnknownField(alloc::string::String::from(which)));
        }
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(path.years.len());
    for y in &path.years {
        match field(y) {
            Some(v) => out.push((y.year, v)),
            None if which == "target_u" => {}
            None => return Err(Error::UnknownField(alloc::string::String::from(which))),
        }
    }
    Ok(out)
}

fn dummy_state() -> SteadyState {
    SteadyState {
        mu: 0.0,
        theta: 0.0,
        k_hat: 0.0,
        c_hat: 0.0,
        wage: 0.0,
        u_rate: 0.0,
        v_rate: 0.0,
        labor_share: 0.0,
        r_profit: 0.0,
        y_hat: 0.0,
        y_l: 0.0,
        lambda_eff: 0.0,
    }
}
