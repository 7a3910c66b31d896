//! Transition paths after small unanticipated permanent shocks.
//!
//! Tightness is a jump variable (it re-solves statically from the current
//! state each instant), unemployment is predetermined, and the
//! capital-consumption block is a saddle: the initial jump of capitalist
//! consumption is pinned by shooting so the path lands on the post-shock
//! steady state. Integration is classical fourth-order Runge-Kutta with
//! the shock regime frozen within each step, so ramps that start and end
//! on step boundaries never degrade the order.

use crate::bargaining::EffectiveDiscount;
use crate::equilibrium::{
    harrod_diagnostics, solve_steady_with, theta_clearing_inner, SolverOptions,
};
use crate::error::Error;
use crate::matching::f_find;
use crate::math;
use crate::params::{ModelParams, SteadyState};
use crate::production::{displacement_per_worker, y_hat};
use crate::Result;
use alloc::vec::Vec;

/// What changes at the shock date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShockKind {
    /// Permanent change in the labor-task mass, phased in linearly over
    /// `ramp_months` (>= 1).
    Automation { ramp_months: f64 },
    /// Permanent change in the balanced growth rate.
    Growth,
    /// Permanent change in the firms' hiring capacity `t_w`.
    Mobility,
    /// Permanent change in the opportunity cost of employment `b`.
    OpportunityCost,
    /// Permanent change in the collective-bargaining probability.
    UnionProbability,
}

/// An unanticipated permanent parameter change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSpec {
    pub kind: ShockKind,
    /// Signed change applied to the shocked parameter.
    pub magnitude: f64,
    /// Months after the path starts at which the shock hits.
    pub t_shock: f64,
}

impl ShockSpec {
    /// Post-shock parameter bundle (validated).
    pub fn apply(&self, pre: &ModelParams) -> Result<ModelParams> {
        if let ShockKind::Automation { ramp_months } = self.kind {
            if !(ramp_months >= 1.0) {
                return Err(Error::InvalidParam {
                    field: "ramp_months",
                    value: ramp_months,
                    constraint: "be at least one month",
                });
            }
        }
        if !(self.t_shock >= 0.0) || !self.t_shock.is_finite() {
            return Err(Error::InvalidParam {
                field: "t_shock",
                value: self.t_shock,
                constraint: "be non-negative and finite",
            });
        }
        let m = self.magnitude;
        pre.modify(|t, _, _, i| match self.kind {
            ShockKind::Automation { .. } => t.m += m,
            ShockKind::Growth => t.g += m,
            ShockKind::Mobility => i.t_w += m,
            ShockKind::OpportunityCost => i.b += m,
            ShockKind::UnionProbability => i.p_union += m,
        })
    }
}

/// One sampled point of an integrated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    /// Months since the path started.
    pub t: f64,
    pub l: f64,
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub k_hat: f64,
    pub c_hat: f64,
    pub mu: f64,
    pub wage: f64,
    pub labor_share: f64,
    pub m: f64,
    pub m_dot: f64,
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct PathOptions {
    /// Months of path emitted. Shooting always integrates to at least the
    /// shock date plus [`CONVERGENCE_HORIZON`] so the landing is checked on
    /// the balanced growth path even for short windows.
    pub horizon: f64,
    /// Runge-Kutta step, months.
    pub dt: f64,
    /// Emit every `stride`-th step.
    pub stride: u32,
    /// Bisection budget for the consumption jump.
    pub shoot_max_iter: u32,
    /// Relative endpoint tolerance against the post-shock steady state.
    pub endpoint_tol: f64,
    pub solver: SolverOptions,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            horizon: 600.0,
            dt: 0.25,
            stride: 4,
            shoot_max_iter: 200,
            endpoint_tol: 1e-4,
            solver: SolverOptions::default(),
        }
    }
}

/// Which force dominates when the pace of automation moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomationRegime {
    /// `|dlambda/dm_dot| < alpha`: the falling effective discount rate wins.
    CapitalizationDominant,
    /// `|dlambda/dm_dot| > alpha`: displacement into unemployment wins.
    DisplacementDominant,
}

/// Classify an automation shock by the separation-rate sensitivity at the
/// ramp's pace, via central finite differences of the effective separation
/// rate in `m_dot`.
pub fn classify_automation_regime(p: &ModelParams, shock: &ShockSpec) -> Result<AutomationRegime> {
    let ramp = match shock.kind {
        ShockKind::Automation { ramp_months } => ramp_months,
        _ => {
            return Err(Error::Degenerate(
                "regime classification applies to automation shocks",
            ))
        }
    };
    let m_dot = shock.magnitude / ramp;
    let h = 1e-7;
    let t = p.tech();
    let lam = |md: f64| -> Result<f64> {
        Ok(p.matching().lambda0
            + displacement_per_worker(t.m, md, t.m_upper_dot(), t.sigma, t.alpha)?)
    };
    let d = (lam(m_dot + h)? - lam(m_dot - h)?) / (2.0 * h);
    Ok(if math::abs(d) > t.alpha {
        AutomationRegime::DisplacementDominant
    } else {
        AutomationRegime::CapitalizationDominant
    })
}

/// Shock regime at one instant along the path.
struct Regime<'a> {
    pre: &'a ModelParams,
    post: &'a ModelParams,
    shock: &'a ShockSpec,
    t_shock: f64,
    ramp_end: f64,
}

impl<'a> Regime<'a> {
    fn new(pre: &'a ModelParams, post: &'a ModelParams, shock: &'a ShockSpec, dt: f64) -> Self {
        // Snap the shock date and ramp end onto step boundaries so every
        // Runge-Kutta step sees a smooth right-hand side.
        let snap = |x: f64| math::floor(x / dt + 0.5) * dt;
        let t_shock = snap(shock.t_shock);
        let ramp_end = match shock.kind {
            ShockKind::Automation { ramp_months } => t_shock + snap(ramp_months).max(dt),
            _ => t_shock,
        };
        Regime {
            pre,
            post,
            shock,
            t_shock,
            ramp_end,
        }
    }

    /// Labor-task mass slope for the step starting at `t_step`.
    fn m_dot(&self, t_step: f64) -> f64 {
        match self.shock.kind {
            ShockKind::Automation { .. } if t_step >= self.t_shock && t_step < self.ramp_end => {
                self.shock.magnitude / (self.ramp_end - self.t_shock)
            }
            _ => 0.0,
        }
    }

    /// Validated parameter bundle for a stage at time `t` inside the step
    /// starting at `t_step`.
    fn params_at(&self, t: f64, t_step: f64) -> Result<ModelParams> {
        if t_step < self.t_shock {
            return Ok(*self.pre);
        }
        match self.shock.kind {
            ShockKind::Automation { .. } => {
                let md = self.m_dot(t_step);
                let m0 = self.pre.tech().m;
                let m = if t >= self.ramp_end {
                    self.post.tech().m
                } else {
                    m0 + self.shock.magnitude * (t - self.t_shock) / (self.ramp_end - self.t_shock)
                };
                self.post.modify(|tech, _, _, _| {
                    tech.m = m;
                    tech.m_dot = md;
                })
            }
            _ => Ok(*self.post),
        }
    }

    /// Anchor rate of return for the arbitrage condition at `t_step`.
    fn mu_star(&self, t_step: f64, mu_pre: f64, mu_post: f64) -> f64 {
        if t_step < self.t_shock {
            mu_pre
        } else {
            mu_post
        }
    }
}

struct Deriv {
    du: f64,
    dk: f64,
    dc: f64,
    theta: f64,
    wage: f64,
    y_hat: f64,
    y_l: f64,
}

fn rhs(
    u: f64,
    k: f64,
    c: f64,
    p_t: &ModelParams,
    mu_star: f64,
    opts: &SolverOptions,
    warm_theta: &mut f64,
) -> Result<Deriv> {
    let tech = p_t.tech();
    let l = 1.0 - u;
    if !(l > 0.0) || !(k > 0.0) {
        return Err(Error::Degenerate("state left the admissible domain"));
    }
    let prod = y_hat(k, tech)?;
    let lam = p_t.matching().lambda0
        + displacement_per_worker(
            tech.m,
            tech.m_dot,
            tech.m_upper_dot(),
            tech.sigma,
            tech.alpha,
        )?;
    let rho_tilde = p_t.rho_tilde();
    let (theta, wage) = theta_clearing_inner(
        &prod,
        EffectiveDiscount(rho_tilde),
        lam,
        p_t,
        opts,
        Some(*warm_theta),
    )?;
    *warm_theta = theta.get();
    let f = f_find(theta, p_t.matching().iota);
    let v = theta.get() * u;
    let du = lam * l - f * u;
    // stationary-deflator drift: alpha (M_dot - m_dot) plus employment growth
    let g_t = tech.alpha * (tech.m_upper_dot() - tech.m_dot) - du / l;
    let delta_t = tech.delta + tech.m_dot / (1.0 - tech.m);
    let q = tech.q_rel;
    let dk = q * (prod.y_hat - c - wage - (p_t.matching().xi * v + p_t.inst().tau) / l)
        - (delta_t + g_t) * k;
    let dc = c / p_t.pref().epsilon * (prod.y_k * q - tech.delta * (1.0 + mu_star));
    Ok(Deriv {
        du,
        dk,
        dc,
        theta: theta.get(),
        wage,
        y_hat: prod.y_hat,
        y_l: prod.y_l,
    })
}

enum RunOutcome {
    Finished {
        u: f64,
        k: f64,
        c: f64,
    },
    Diverged {
        step: u32,
        t: f64,
        k_last: f64,
        what: &'static str,
    },
}

/// Shooting always integrates at least this far so the saddle selection is
/// anchored to the balanced growth path even when a shorter window is shown.
const CONVERGENCE_HORIZON: f64 = 600.0;

/// One forward pass over `total_horizon` months, emitting samples only up to
/// `emit_until`. Consumption starts at `c_pre` and jumps to `c_jump` at the
/// (step-aligned) shock date. When `record` is set, sampled points are
/// appended.
#[allow(clippy::too_many_arguments)]
fn run_path(
    regime: &Regime<'_>,
    u0: f64,
    k0: f64,
    c_pre: f64,
    c_jump: f64,
    mu_pre: f64,
    mu_post: f64,
    opts: &PathOptions,
    total_horizon: f64,
    emit_until: f64,
    mut record: Option<&mut Vec<PathPoint>>,
) -> Result<RunOutcome> {
    let dt = opts.dt;
    let n_steps = (total_horizon / dt + 0.5) as u32;
    let (mut u, mut k, mut c) = (u0, k0, c_pre);
    let mut jumped = false;
    let mut warm = 0.5;

    let sample =
        |t: f64, u: f64, k: f64, c: f64, d: &Deriv, p_t: &ModelParams, out: &mut Vec<PathPoint>| {
            out.push(PathPoint {
                t,
                l: 1.0 - u,
                u,
                v: d.theta * u,
                theta: d.theta,
                k_hat: k,
                c_hat: c,
                mu: d.y_l / d.wage - 1.0,
                wage: d.wage,
                labor_share: d.wage / d.y_hat,
                m: p_t.tech().m,
                m_dot: p_t.tech().m_dot,
            });
        };

    for step in 0..n_steps {
        let t = step as f64 * dt;
        if !jumped && t >= regime.t_shock - 0.5 * dt {
            c = c_jump;
            jumped = true;
        }
        let mu_star = regime.mu_star(t, mu_pre, mu_post);
        let p1 = regime.params_at(t, t)?;
        let stage = |tt: f64, su: f64, sk: f64, sc: f64, warm: &mut f64| -> Result<Deriv> {
            let p_t = regime.params_at(tt, t)?;
            rhs(su, sk, sc, &p_t, mu_star, &opts.solver, warm)
        };

        let k1 = match stage(t, u, k, c, &mut warm) {
            Ok(d) => d,
            Err(_) => {
                return Ok(RunOutcome::Diverged {
                    step,
                    t,
                    k_last: k,
                    what: "labor market ceased to clear",
                })
            }
        };
        if let Some(out) = record.as_deref_mut() {
            let at_window_end = (t - emit_until).abs() < 0.5 * dt;
            if t < emit_until + 0.5 * dt && (step % opts.stride == 0 || at_window_end) {
                sample(t, u, k, c, &k1, &p1, out);
            }
        }
        let half = 0.5 * dt;
        let result = (|| -> Result<(f64, f64, f64)> {
            let k2 = stage(
                t + half,
                u + half * k1.du,
                k + half * k1.dk,
                c + half * k1.dc,
                &mut warm,
            )?;
            let k3 = stage(
                t + half,
                u + half * k2.du,
                k + half * k2.dk,
                c + half * k2.dc,
                &mut warm,
            )?;
            let k4 = stage(
                t + dt,
                u + dt * k3.du,
                k + dt * k3.dk,
                c + dt * k3.dc,
                &mut warm,
            )?;
            Ok((
                u + dt / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du),
                k + dt / 6.0 * (k1.dk + 2.0 * k2.dk + 2.0 * k3.dk + k4.dk),
                c + dt / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc),
            ))
        })();
        match result {
            Ok((nu, nk, nc)) => {
                u = nu;
                k = nk;
                c = nc;
            }
            Err(_) => {
                return Ok(RunOutcome::Diverged {
                    step,
                    t,
                    k_last: k,
                    what: "labor market ceased to clear",
                })
            }
        }
        if !(c > 0.0) || !c.is_finite() {
            return Ok(RunOutcome::Diverged {
                step,
                t,
                k_last: k,
                what: "capitalist consumption hit zero",
            });
        }
        if !(k > 0.0) || !k.is_finite() || !(u > 0.0 && u < 1.0) {
            return Ok(RunOutcome::Diverged {
                step,
                t,
                k_last: k,
                what: "capital stock collapsed",
            });
        }
    }
    // terminal sample when the emission window reaches the integration end
    if let Some(out) = record {
        let t_end = n_steps as f64 * dt;
        if emit_until > t_end - 0.5 * dt {
            let p_t = regime.params_at(t_end, t_end)?;
            let mut w = warm;
            let d = rhs(u, k, c, &p_t, mu_post, &opts.solver, &mut w)?;
            sample(t_end, u, k, c, &d, &p_t, out);
        }
    }
    Ok(RunOutcome::Finished { u, k, c })
}

/// Integrate the economy's response to a shock and return the sampled path.
///
/// `initial` must be the solved steady state for `pre`. The consumption jump
/// at the shock date is found by bisection so the trajectory lands on the
/// post-shock steady state; a path that cannot land (post-shock surplus below
/// the zero-consumption minimum) surfaces as a [`Error::BlowUp`] carrying the
/// step at which the economy left the admissible domain.
pub fn integrate_path(
    initial: &SteadyState,
    shock: &ShockSpec,
    pre: &ModelParams,
    opts: &PathOptions,
) -> Result<Vec<PathPoint>> {
    let post = shock.apply(pre)?;
    let regime = Regime::new(pre, &post, shock, opts.dt);
    let snap = |x: f64| math::floor(x / opts.dt + 0.5) * opts.dt;
    let emit_until = snap(opts.horizon);
    let total_horizon = emit_until.max(snap(shock.t_shock + CONVERGENCE_HORIZON));

    if post == *pre {
        // Null shock: the state is already stationary.
        let mut out = Vec::new();
        match run_path(
            &regime,
            initial.u_rate,
            initial.k_hat,
            initial.c_hat,
            initial.c_hat,
            initial.mu,
            initial.mu,
            opts,
            total_horizon,
            emit_until,
            Some(&mut out),
        )? {
            RunOutcome::Finished { .. } => return Ok(out),
            RunOutcome::Diverged { step, t, what, .. } => {
                return Err(Error::BlowUp { step, t, what })
            }
        }
    }

    let mut post_solver = opts.solver;
    post_solver.mu_initial = initial.mu;
    let post_ss = solve_steady_with(&post, &post_solver)?;
    let diag = harrod_diagnostics(&post_ss, &post);

    if post_ss.c_hat < 0.0 || post_ss.mu <= diag.mu_min {
        // Unfeasible growth path: no saddle to land on. Integrate from the
        // pre-shock consumption level and report where the economy breaks.
        match run_path(
            &regime,
            initial.u_rate,
            initial.k_hat,
            initial.c_hat,
            initial.c_hat,
            initial.mu,
            post_ss.mu,
            opts,
            total_horizon,
            emit_until,
            None,
        )? {
            RunOutcome::Diverged { step, t, what, .. } => {
                return Err(Error::BlowUp { step, t, what });
            }
            RunOutcome::Finished { .. } => {
                return Err(Error::BlowUp {
                    step: (opts.horizon / opts.dt) as u32,
                    t: opts.horizon,
                    what: "post-shock surplus below the zero-consumption minimum",
                });
            }
        }
    }

    // Saddle-path selection: bisect the consumption jump on the sign of the
    // terminal capital gap (capital overshoots the target iff consumption
    // started too low).
    let c_ref = post_ss.c_hat.max(initial.c_hat);
    let mut lo = 0.05 * post_ss.c_hat.min(initial.c_hat);
    let mut hi = 3.0 * c_ref;
    for _ in 0..opts.shoot_max_iter {
        let c0 = 0.5 * (lo + hi);
        let k_last = match run_path(
            &regime,
            initial.u_rate,
            initial.k_hat,
            initial.c_hat,
            c0,
            initial.mu,
            post_ss.mu,
            opts,
            total_horizon,
            emit_until,
            None,
        )? {
            RunOutcome::Finished { k, .. } => k,
            RunOutcome::Diverged { k_last, .. } => k_last,
        };
        if k_last > post_ss.k_hat {
            lo = c0;
        } else {
            hi = c0;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let c0 = 0.5 * (lo + hi);

    let mut out = Vec::new();
    let outcome = run_path(
        &regime,
        initial.u_rate,
        initial.k_hat,
        initial.c_hat,
        c0,
        initial.mu,
        post_ss.mu,
        opts,
        total_horizon,
        emit_until,
        Some(&mut out),
    )?;
    let (u_end, k_end, c_end) = match outcome {
        RunOutcome::Finished { u, k, c } => (u, k, c),
        RunOutcome::Diverged { step, t, what, .. } => return Err(Error::BlowUp { step, t, what }),
    };
    let rel = |a: f64, b: f64| math::abs(a - b) / math::abs(b).max(1e-12);
    let endpoint_gap = rel(u_end, post_ss.u_rate)
        .max(rel(k_end, post_ss.k_hat))
        .max(rel(c_end, post_ss.c_hat));
    if endpoint_gap > opts.endpoint_tol {
        return Err(Error::NonConvergence {
            what: "path endpoint against the post-shock steady state",
            iterations: opts.shoot_max_iter,
            residual: endpoint_gap,
        });
    }
    Ok(out)
}

/// The post-shock steady state a path is expected to land on.
pub fn post_shock_steady(
    shock: &ShockSpec,
    pre: &ModelParams,
    initial_mu: f64,
) -> Result<(ModelParams, SteadyState)> {
    let post = shock.apply(pre)?;
    let opts = SolverOptions {
        mu_initial: initial_mu,
        ..SolverOptions::default()
    };
    let ss = solve_steady_with(&post, &opts)?;
    Ok((post, ss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_steady;
    use crate::params::ModelParams;

    fn setup() -> (ModelParams, SteadyState) {
        let p = ModelParams::baseline();
        let ss = solve_steady(&p).unwrap();
        (p, ss)
    }

    #[test]
    fn null_shock_path_is_flat() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Mobility,
            magnitude: 0.0,
            t_shock: 0.0,
        };
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        assert_eq!(path.len(), 601);
        for pt in &path {
            assert!((pt.u - ss.u_rate).abs() < 1e-8, "u drift at t={}", pt.t);
            assert!((pt.k_hat - ss.k_hat).abs() / ss.k_hat < 1e-8);
            assert!((pt.c_hat - ss.c_hat).abs() / ss.c_hat < 1e-8);
            assert!((pt.theta - ss.theta).abs() / ss.theta < 1e-8);
            assert!((pt.mu - ss.mu).abs() < 1e-8);
            assert!((pt.wage - ss.wage).abs() / ss.wage < 1e-8);
            assert!((pt.u + pt.l - 1.0).abs() < 1e-14);
            assert!((pt.v - pt.theta * pt.u).abs() < 1e-14);
        }
    }

    #[test]
    fn mobility_shock_lands_on_post_steady_state() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Mobility,
            magnitude: 0.1 * p.inst().t_w,
            t_shock: 0.0,
        };
        let (post, post_ss) = post_shock_steady(&shock, &p, ss.mu).unwrap();
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        let end = path.last().unwrap();
        assert!((end.u - post_ss.u_rate).abs() / post_ss.u_rate < 1e-4);
        assert!((end.k_hat - post_ss.k_hat).abs() / post_ss.k_hat < 1e-4);
        assert!((end.c_hat - post_ss.c_hat).abs() / post_ss.c_hat < 1e-4);
        assert!((end.mu - post_ss.mu).abs() / post_ss.mu < 1e-4);
        // asymptotic direction matches the steady-state comparative statics
        assert!(end.mu > ss.mu);
        assert!(end.labor_share < ss.labor_share);
        assert!(end.theta > ss.theta);
        assert!(end.u < ss.u_rate);
        let _ = post;
    }

    #[test]
    fn automation_shock_two_stage_signs() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Automation { ramp_months: 24.0 },
            magnitude: -0.02,
            t_shock: 0.0,
        };
        assert_eq!(
            classify_automation_regime(&p, &shock).unwrap(),
            AutomationRegime::DisplacementDominant
        );
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        let at = |t: f64| {
            *path
                .iter()
                .find(|pt| (pt.t - t).abs() < 1e-9)
                .expect("sample present")
        };
        // stage 1: unemployment and the rate of return end the ramp above
        // their pre-shock values, and U rises monotonically along the ramp
        let end_ramp = at(24.0);
        assert!(end_ramp.u > ss.u_rate);
        assert!(end_ramp.mu > ss.mu);
        assert!(at(12.0).u > at(1.0).u);
        // the ramp is visible in the emitted m / m_dot columns
        assert!((at(12.0).m - (p.tech().m - 0.01)).abs() < 1e-9);
        assert!((at(12.0).m_dot - (-0.02 / 24.0)).abs() < 1e-12);
        assert_eq!(at(30.0).m_dot, 0.0);
        // stage 2 terminal state: labor share lower, unemployment higher,
        // capital-output ratio higher than before the shock
        let end = path.last().unwrap();
        let (_, post_ss) = post_shock_steady(&shock, &p, ss.mu).unwrap();
        assert!((end.k_hat - post_ss.k_hat).abs() / post_ss.k_hat < 1e-4);
        assert!(end.labor_share < ss.labor_share);
        assert!(end.u > ss.u_rate);
        let kqy_pre = ss.k_hat / (p.tech().q_rel * ss.y_hat);
        let kqy_post = end.k_hat / (p.tech().q_rel * (end.wage / end.labor_share));
        assert!(kqy_post > kqy_pre);
    }

    #[test]
    fn impact_rate_of_return_rises_without_collective_channel() {
        // With P = 0 the capitalization term of the collective wage is absent
        // and a displacement-dominant m_dot < 0 raises mu on impact.
        let p = ModelParams::baseline()
            .modify(|_, _, _, i| i.p_union = 0.0)
            .unwrap();
        let ss = solve_steady(&p).unwrap();
        let shock = ShockSpec {
            kind: ShockKind::Automation { ramp_months: 24.0 },
            magnitude: -0.02,
            t_shock: 0.0,
        };
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        // the t = 0 sample is the impact instant: pre-shock states, post-shock regime
        let impact = &path[0];
        assert!(impact.mu > ss.mu, "{} vs {}", impact.mu, ss.mu);
        assert!(path[1].u > ss.u_rate);
    }

    #[test]
    fn growth_shock_lands_and_matches_statics() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Growth,
            magnitude: 1e-4,
            t_shock: 0.0,
        };
        let (_, post_ss) = post_shock_steady(&shock, &p, ss.mu).unwrap();
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        let end = path.last().unwrap();
        assert!((end.k_hat - post_ss.k_hat).abs() / post_ss.k_hat < 1e-4);
        assert!(end.mu < ss.mu);
        assert!(end.labor_share > ss.labor_share);
    }

    #[test]
    fn infeasible_growth_shock_blows_up() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Growth,
            magnitude: 0.005,
            t_shock: 0.0,
        };
        // the post-shock state exists but cannot fund consumption
        let (post, post_ss) = post_shock_steady(&shock, &p, ss.mu).unwrap();
        let diag = harrod_diagnostics(&post_ss, &post);
        assert!(post_ss.c_hat < 0.0 && post_ss.mu < diag.mu_min);
        match integrate_path(&ss, &shock, &p, &PathOptions::default()) {
            Err(Error::BlowUp { step, .. }) => assert!(step > 0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn step_halving_changes_path_below_tolerance() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Mobility,
            magnitude: 0.1 * p.inst().t_w,
            t_shock: 0.0,
        };
        let coarse = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        let fine_opts = PathOptions {
            dt: 0.125,
            stride: 8,
            ..PathOptions::default()
        };
        let fine = integrate_path(&ss, &shock, &p, &fine_opts).unwrap();
        assert_eq!(coarse.len(), fine.len());
        let mut sup = 0.0f64;
        for (a, b) in coarse.iter().zip(fine.iter()) {
            assert!((a.t - b.t).abs() < 1e-9);
            sup = sup
                .max((a.u - b.u).abs())
                .max((a.k_hat - b.k_hat).abs() / ss.k_hat)
                .max((a.c_hat - b.c_hat).abs() / ss.c_hat);
        }
        assert!(sup < 1e-6, "step-halving sup norm {sup}");
    }

    #[test]
    fn beveridge_consistency_along_path() {
        // dU/dt from the state equals the centered slope of the path to O(dt^4)
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Mobility,
            magnitude: 0.1 * p.inst().t_w,
            t_shock: 0.0,
        };
        let opts = PathOptions {
            stride: 1,
            ..PathOptions::default()
        };
        let path = integrate_path(&ss, &shock, &p, &opts).unwrap();
        let lam = ss.lambda_eff; // unchanged by a mobility shock
        for w in path.windows(3).take(200) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let slope = (c.u - a.u) / (c.t - a.t);
            let f = crate::matching::f_find(
                crate::matching::Tightness::new(b.theta).unwrap(),
                p.matching().iota,
            );
            let rhs = lam * (1.0 - b.u) - f * b.u;
            assert!(
                (slope - rhs).abs() < 5e-7,
                "Beveridge slope mismatch at t={}: {slope} vs {rhs}",
                b.t
            );
        }
    }

    #[test]
    fn regime_flips_with_ramp_duration() {
        // |dlambda/dm_dot| falls as the ramp steepens (m_dot more negative),
        // so a fast enough ramp is capitalization-dominant.
        let p = ModelParams::baseline();
        let mk = |months: f64| ShockSpec {
            kind: ShockKind::Automation {
                ramp_months: months,
            },
            magnitude: -0.2,
            t_shock: 0.0,
        };
        assert_eq!(
            classify_automation_regime(&p, &mk(24.0)).unwrap(),
            AutomationRegime::DisplacementDominant
        );
        assert_eq!(
            classify_automation_regime(&p, &mk(1.0)).unwrap(),
            AutomationRegime::CapitalizationDominant
        );
        // bisect the flip point and check the derivative straddles alpha there
        let (mut lo, mut hi) = (1.0, 24.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            match classify_automation_regime(&p, &mk(mid)).unwrap() {
                AutomationRegime::CapitalizationDominant => lo = mid,
                AutomationRegime::DisplacementDominant => hi = mid,
            }
        }
        let t = p.tech();
        let md = -0.2 / (0.5 * (lo + hi));
        let h = 1e-7;
        let lam = |x: f64| {
            p.matching().lambda0
                + displacement_per_worker(t.m, x, t.m_upper_dot(), t.sigma, t.alpha).unwrap()
        };
        let d = ((lam(md + h) - lam(md - h)) / (2.0 * h)).abs();
        assert!((d - t.alpha).abs() < 1e-3, "flip point derivative {d}");
    }

    #[test]
    fn slow_ramp_at_high_automation_is_capitalization_dominant() {
        // push the labor-task mass high enough that the displacement
        // sensitivity at m_dot -> 0 sits below alpha
        let p = ModelParams::baseline()
            .modify(|t, _, _, _| t.m = 0.95)
            .unwrap();
        let shock = ShockSpec {
            kind: ShockKind::Automation { ramp_months: 240.0 },
            magnitude: -0.001,
            t_shock: 0.0,
        };
        assert_eq!(
            classify_automation_regime(&p, &shock).unwrap(),
            AutomationRegime::CapitalizationDominant
        );
    }

    #[test]
    fn shock_validation() {
        let p = ModelParams::baseline();
        let bad_ramp = ShockSpec {
            kind: ShockKind::Automation { ramp_months: 0.5 },
            magnitude: -0.02,
            t_shock: 0.0,
        };
        assert!(bad_ramp.apply(&p).is_err());
        let bad_post = ShockSpec {
            kind: ShockKind::UnionProbability,
            magnitude: 2.0,
            t_shock: 0.0,
        };
        assert!(matches!(
            bad_post.apply(&p),
            Err(Error::InvalidParam {
                field: "p_union",
                ..
            })
        ));
    }

    #[test]
    fn delayed_shock_stays_flat_until_it_hits() {
        let (p, ss) = setup();
        let shock = ShockSpec {
            kind: ShockKind::Mobility,
            magnitude: 0.1 * p.inst().t_w,
            t_shock: 12.0,
        };
        let path = integrate_path(&ss, &shock, &p, &PathOptions::default()).unwrap();
        for pt in path.iter().filter(|pt| pt.t < 12.0 - 1e-9) {
            assert!((pt.u - ss.u_rate).abs() < 1e-8);
            assert!((pt.k_hat - ss.k_hat).abs() / ss.k_hat < 1e-8);
        }
        let end = path.last().unwrap();
        let (_, post_ss) = post_shock_steady(&shock, &p, ss.mu).unwrap();
        assert!((end.k_hat - post_ss.k_hat).abs() / post_ss.k_hat < 1e-4);
    }
}
