//! Stationary labor-market and rate-of-return equilibrium.
//!
//! The rate of return is the fixed point of the map
//!
//! `Phi(mu) = y_L(k(mu)) / w*(theta(k(mu))) - 1`
//!
//! where `k(mu)` clears the capital market (`y_k q = delta (1 + mu)`) and
//! `theta(k)` clears the labor market (bargained wage = labor demand under
//! free entry). `Phi` is iterated with damping because it is a contraction
//! only near the equilibrium. On top of the solved state the module
//! evaluates balanced-growth feasibility (minimum rate of return, implied
//! savings rate) and the automation-region partition of the `(q, m)` plane.

use crate::bargaining::{
    gamma_na, gamma_nb, psi, psi_n, wage_aggregate, wage_collective, wage_individual,
    EffectiveDiscount,
};
use crate::error::Error;
use crate::matching::{f_find, q_fill, Tightness};
use crate::math;
use crate::params::{ModelParams, SteadyState};
use crate::production::{
    effective_separation, task_integral, task_integral_reflected, y_hat, ProductionPoint,
    SIGMA_UNIT_THRESHOLD,
};
use crate::solve::{bracketed_root, damped_fixed_point};
use crate::Result;

/// Tunable solver knobs; the defaults satisfy every stated tolerance.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Starting point for the rate-of-return map.
    pub mu_initial: f64,
    /// Damping factor of the outer iteration.
    pub mu_damping: f64,
    /// Maximum outer iterations.
    pub mu_max_iter: u32,
    /// Residual tolerance on `|Phi(mu) - mu|`.
    pub mu_tol: f64,
    /// Wage-gap tolerance for the tightness solver.
    pub theta_tol: f64,
    /// Upper tightness probed while expanding the bracket.
    pub theta_cap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mu_initial: 0.3,
            mu_damping: 0.5,
            mu_max_iter: 500,
            mu_tol: 1e-11,
            theta_tol: 1e-12,
            theta_cap: 1e12,
        }
    }
}

/// Capital stock clearing the capital market: the unique `k` with
/// `y_k(k) q = delta (1 + mu)`.
///
/// The CES marginal product inverts in closed form. A solution exists only
/// while the required marginal product stays inside the CES range, whose
/// finite end is the asymptote `a_k (1-m)^(1/(sigma-1))`.
pub fn k_of_mu(mu: f64, tech: &crate::params::TechnologyParams) -> Result<f64> {
    if !(mu > -1.0) {
        return Err(Error::InvalidParam {
            field: "mu",
            value: mu,
            constraint: "exceed -1",
        });
    }
    let (s, m) = (tech.sigma, tech.m);
    let target = tech.delta * (1.0 + mu) / tech.q_rel;
    if math::abs(s - 1.0) < SIGMA_UNIT_THRESHOLD {
        // y_k = (1-m)^m a_k^(1-m) m^-m k^-m spans all of (0, inf)
        let num = math::powf(1.0 - m, m) * math::powf(tech.a_k, 1.0 - m) * math::powf(m, -m);
        return Ok(math::powf(num / target, 1.0 / m));
    }
    if m == 0.0 || m == 1.0 {
        return Err(Error::NoCapitalSolution {
            required: target,
            bound: if m == 0.0 { tech.a_k } else { 0.0 },
        });
    }
    let asymptote = tech.a_k * math::powf(1.0 - m, 1.0 / (s - 1.0));
    let solvable = if s < 1.0 {
        target < asymptote
    } else {
        target > asymptote
    };
    if !solvable {
        return Err(Error::NoCapitalSolution {
            required: target,
            bound: asymptote,
        });
    }
    let c = math::powf(1.0 - m, 1.0 / s) * math::powf(tech.a_k, (s - 1.0) / s);
    let b = task_integral(m, s, tech.alpha);
    let k = math::powf(
        (math::powf(target / c, s - 1.0) - c) / math::powf(b, 1.0 / s),
        s / (1.0 - s),
    );
    debug_assert!(k.is_finite() && k > 0.0);
    Ok(k)
}

/// Bargained wage (labor supply) at a given tightness, with the matching
/// rates supplied so one evaluation computes them once.
fn supply_wage_qf(
    theta: Tightness,
    q: f64,
    f: f64,
    prod: &ProductionPoint,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
    p: &ModelParams,
) -> Result<f64> {
    let gf = p.pref().gamma_f;
    let psi_na = psi(gamma_na(gf), rho_tilde, lambda_eff, f);
    let psi_nb = psi(gamma_nb(gf, q), rho_tilde, lambda_eff, f);
    let pn = psi_n(p.inst().t_w, theta, psi_na, psi_nb)?;
    let w_n = wage_individual(p.inst().b, pn, prod.y_l)?;
    if p.inst().p_union == 0.0 {
        return Ok(w_n);
    }
    let pu = psi(p.inst().gamma_u, rho_tilde, lambda_eff, f);
    let w_u = wage_collective(p.inst().b, pu, prod.y_l, prod.y_hat, rho_tilde, lambda_eff)?;
    Ok(wage_aggregate(p.inst().p_union, w_n, w_u))
}

/// Labor demand under free entry: `w_d = y_L - (rho_tilde + lambda) xi / q(theta)`.
fn demand_wage_q(
    q: f64,
    prod: &ProductionPoint,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
    p: &ModelParams,
) -> f64 {
    prod.y_l - (rho_tilde.0 + lambda_eff) * p.matching().xi / q
}

#[cfg(test)]
fn supply_wage(
    theta: Tightness,
    prod: &ProductionPoint,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
    p: &ModelParams,
) -> Result<f64> {
    let q = q_fill(theta, p.matching().iota);
    supply_wage_qf(theta, q, theta.get() * q, prod, rho_tilde, lambda_eff, p)
}

fn demand_wage(
    theta: Tightness,
    prod: &ProductionPoint,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
    p: &ModelParams,
) -> f64 {
    demand_wage_q(
        q_fill(theta, p.matching().iota),
        prod,
        rho_tilde,
        lambda_eff,
        p,
    )
}

/// Clear the labor market at a given capital stock: the tightness where the
/// bargained wage meets labor demand, and the clearing wage.
///
/// Supply rises and demand falls in `theta`, so the crossing is unique; it
/// exists iff supply starts below demand at `theta -> 0`.
pub fn theta_clearing(
    k_hat: f64,
    p: &ModelParams,
    opts: &SolverOptions,
) -> Result<(Tightness, f64)> {
    theta_clearing_at(k_hat, p.rho_tilde(), p, opts, None)
}

/// As [`theta_clearing`] but with the effective discount and separation rate
/// supplied by the caller (the dynamics module varies them along a path) and
/// an optional warm-start guess.
pub fn theta_clearing_at(
    k_hat: f64,
    rho_tilde: f64,
    p: &ModelParams,
    opts: &SolverOptions,
    warm: Option<f64>,
) -> Result<(Tightness, f64)> {
    let prod = y_hat(k_hat, p.tech())?;
    let lambda_eff = effective_separation(p.matching(), p.tech())?;
    theta_clearing_inner(
        &prod,
        EffectiveDiscount(rho_tilde),
        lambda_eff,
        p,
        opts,
        warm,
    )
}

pub(crate) fn theta_clearing_inner(
    prod: &ProductionPoint,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
    p: &ModelParams,
    opts: &SolverOptions,
    warm: Option<f64>,
) -> Result<(Tightness, f64)> {
    if prod.y_l <= p.inst().b {
        return Err(Error::SurplusExhausted {
            y_l: prod.y_l,
            b: p.inst().b,
        });
    }
    if p.inst().p_union > 0.0 && rho_tilde.0 <= 0.0 {
        return Err(Error::NonPositiveDiscount {
            rho_tilde: rho_tilde.0,
        });
    }
    if rho_tilde.0 + lambda_eff <= 0.0 {
        return Err(Error::InvalidParam {
            field: "rho_tilde + lambda_eff",
            value: rho_tilde.0 + lambda_eff,
            constraint: "be positive",
        });
    }
    let gap = |theta: f64| -> f64 {
        let th = Tightness::new(theta).expect("solver keeps theta in range");
        let q = q_fill(th, p.matching().iota);
        let ws = supply_wage_qf(th, q, theta * q, prod, rho_tilde, lambda_eff, p)
            .expect("preconditions checked before solving");
        ws - demand_wage_q(q, prod, rho_tilde, lambda_eff, p)
    };

    // Warm brackets around the previous solution, if the caller has one:
    // a tight one first (path steps move theta very little), then a loose one.
    if let Some(w) = warm {
        if w > 0.0 {
            for factor in [1.02, 1.5] {
                let (lo, hi) = (w / factor, w * factor);
                let (glo, ghi) = (gap(lo), gap(hi));
                if glo < 0.0 && ghi >= 0.0 {
                    let th =
                        bracketed_root(gap, lo, hi, glo, ghi, opts.theta_tol, 200, "tightness")?;
                    let t = Tightness::new(th)?;
                    return Ok((t, demand_wage(t, prod, rho_tilde, lambda_eff, p)));
                }
            }
        }
    }

    // theta -> 0: psi_n needs a strictly positive tightness when t_w = 0
    let lo = if p.inst().t_w > 0.0 { 0.0 } else { 1e-12 };
    let glo = gap(lo);
    if glo >= 0.0 {
        return Err(Error::NoCrossing { gap_at_zero: glo });
    }
    let mut hi = 0.5;
    let mut ghi = gap(hi);
    while ghi < 0.0 {
        hi *= 2.0;
        if hi > opts.theta_cap {
            return Err(Error::NoCrossing { gap_at_zero: glo });
        }
        ghi = gap(hi);
    }
    let th = bracketed_root(gap, lo, hi, glo, ghi, opts.theta_tol, 300, "tightness")?;
    let t = Tightness::new(th)?;
    Ok((t, demand_wage(t, prod, rho_tilde, lambda_eff, p)))
}

/// One evaluation of the rate-of-return map `Phi`.
pub fn phi_map(mu: f64, p: &ModelParams, opts: &SolverOptions) -> Result<f64> {
    let k = k_of_mu(mu, p.tech())?;
    let prod = y_hat(k, p.tech())?;
    let lambda_eff = effective_separation(p.matching(), p.tech())?;
    let (_, wage) = theta_clearing_inner(
        &prod,
        EffectiveDiscount(p.rho_tilde()),
        lambda_eff,
        p,
        opts,
        None,
    )?;
    Ok(prod.y_l / wage - 1.0)
}

/// Solve the stationary equilibrium with default options.
pub fn solve_steady(p: &ModelParams) -> Result<SteadyState> {
    solve_steady_with(p, &SolverOptions::default())
}

/// Solve the stationary equilibrium.
pub fn solve_steady_with(p: &ModelParams, opts: &SolverOptions) -> Result<SteadyState> {
    if p.tech().m_dot != 0.0 {
        return Err(Error::InvalidParam {
            field: "m_dot",
            value: p.tech().m_dot,
            constraint: "be zero in steady-state computations",
        });
    }
    let (mu, _, _) = damped_fixed_point(
        |mu| phi_map(mu, p, opts),
        opts.mu_initial,
        opts.mu_damping,
        opts.mu_tol,
        opts.mu_max_iter,
        "rate-of-return map",
    )?;

    let tech = p.tech();
    let k_hat = k_of_mu(mu, tech)?;
    let prod = y_hat(k_hat, tech)?;
    let lambda_eff = effective_separation(p.matching(), tech)?;
    let (theta, wage) = theta_clearing_inner(
        &prod,
        EffectiveDiscount(p.rho_tilde()),
        lambda_eff,
        p,
        opts,
        None,
    )?;
    let f = f_find(theta, p.matching().iota);
    let u_rate = lambda_eff / (lambda_eff + f);
    let v_rate = theta.get() * u_rate;
    let employment = 1.0 - u_rate;
    let q = tech.q_rel;
    // capitalist consumption from the stationary capital budget
    let c_hat = prod.y_hat
        - wage
        - (p.matching().xi * v_rate + p.inst().tau) / employment
        - (tech.delta + tech.g) * k_hat / q;
    let r_profit = mu * prod.y_hat * q / (k_hat * (1.0 + mu));
    Ok(SteadyState {
        mu,
        theta: theta.get(),
        k_hat,
        c_hat,
        wage,
        u_rate,
        v_rate,
        labor_share: wage / prod.y_hat,
        r_profit,
        y_hat: prod.y_hat,
        y_l: prod.y_l,
        lambda_eff,
    })
}

/// Balanced-growth feasibility diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumDiagnostics {
    /// Minimum rate of return that funds accumulation, taxes, and vacancy
    /// costs with zero capitalist consumption.
    pub mu_min: f64,
    /// Transversality benchmark `g / delta`.
    pub g_over_delta: f64,
    /// Implied savings rate `s = g / (r - chi)`.
    pub harrod_s: f64,
    /// Taxes plus vacancy outlays per unit of capital.
    pub chi: f64,
    /// `mu > g/delta > mu_min` with non-negative capitalist consumption.
    pub feasible: bool,
    /// Why the path is unfeasible, when it is.
    pub reason: Option<&'static str>,
}

/// Evaluate the feasibility block on a solved state.
pub fn harrod_diagnostics(ss: &SteadyState, p: &ModelParams) -> EquilibriumDiagnostics {
    let tech = p.tech();
    let employment = 1.0 - ss.u_rate;
    let chi = tech.q_rel * (p.matching().xi * ss.v_rate + p.inst().tau) / (employment * ss.k_hat);
    let x = (tech.g + chi) * ss.k_hat / (tech.q_rel * ss.y_hat);
    let mu_min = if x < 1.0 {
        x / (1.0 - x)
    } else {
        f64::INFINITY
    };
    let g_over_delta = tech.g / tech.delta;
    let harrod_s = tech.g / (ss.r_profit - chi);
    let mut reason = None;
    if ss.c_hat < 0.0 || ss.mu <= mu_min {
        reason = Some("surplus below the zero-consumption minimum (mu <= mu_min)");
    } else if ss.mu <= g_over_delta {
        reason = Some("transversality fails (mu <= g/delta)");
    } else if g_over_delta <= mu_min {
        reason = Some("growth requirement below the minimum return (g/delta <= mu_min)");
    }
    EquilibriumDiagnostics {
        mu_min,
        g_over_delta,
        harrod_s,
        chi,
        feasible: reason.is_none(),
        reason,
    }
}

/// Which part of the `(q, m)` plane the economy sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomationRegion {
    /// Labor is cheap enough that not every automated task is produced with
    /// capital (`m < m_bar(q)`, `q < q_bar`).
    Region1,
    /// Automated and new tasks raise output and go straight to capital.
    Region2,
    /// New tasks would lower output and are shelved (`m < m_tilde(q)`, `q > q_bar`).
    Region3,
}

impl AutomationRegion {
    pub fn index(self) -> u8 {
        match self {
            AutomationRegion::Region1 => 1,
            AutomationRegion::Region2 => 2,
            AutomationRegion::Region3 => 3,
        }
    }
}

/// Region classification plus every boundary value of the partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionReport {
    pub region: AutomationRegion,
    /// Critical relative price `q_bar = delta (1 + mu) / a_k`.
    pub q_bar: f64,
    /// Left end of the domain, from `delta/(a_k q_min) = w_J(1)`.
    pub q_min: f64,
    /// Right end of the domain, from `delta/(a_k q_max) = w_M(1)`.
    pub q_max: f64,
    /// Boundary below `q_bar` (automation margin), when defined.
    pub m_bar: Option<f64>,
    /// Boundary above `q_bar` (new-task margin), when defined.
    pub m_tilde: Option<f64>,
}

/// Taylor boundary `m_bar(q) ~ sqrt(2/(alpha(1-sigma)) [1 - (q_bar/q)^(sigma-1)])`.
pub fn m_bar_curve(q: f64, q_bar: f64, sigma: f64, alpha: f64) -> f64 {
    let inner = 2.0 / (alpha * (1.0 - sigma)) * (1.0 - math::powf(q_bar / q, sigma - 1.0));
    math::sqrt(inner.max(0.0))
}

/// Taylor boundary `m_tilde(q)` with the `(sigma-1)` factor sign-flipped.
pub fn m_tilde_curve(q: f64, q_bar: f64, sigma: f64, alpha: f64) -> f64 {
    let inner = 2.0 / (alpha * (sigma - 1.0)) * (1.0 - math::powf(q_bar / q, sigma - 1.0));
    math::sqrt(inner.max(0.0))
}

/// Domain endpoints `[q_min, q_max]` around `q_bar`, from the exact
/// ideal-price-index relations at full automation (`w_M = w_J e^{-alpha}`).
pub fn region_domain(mu: f64, tech: &crate::params::TechnologyParams) -> Result<(f64, f64, f64)> {
    if math::abs(tech.sigma - 1.0) < SIGMA_UNIT_THRESHOLD {
        return Err(Error::Degenerate(
            "automation-region boundaries need sigma different from 1",
        ));
    }
    if !(mu > -1.0) {
        return Err(Error::InvalidParam {
            field: "mu",
            value: mu,
            constraint: "exceed -1",
        });
    }
    let q_bar = tech.delta * (1.0 + mu) / tech.a_k;
    let b1 = task_integral(1.0, tech.sigma, tech.alpha);
    let b1_reflected = task_integral_reflected(1.0, tech.sigma, tech.alpha);
    let q_min = q_bar * math::powf(b1, 1.0 / (1.0 - tech.sigma));
    let q_max = q_bar * math::powf(b1_reflected, 1.0 / (1.0 - tech.sigma));
    Ok((q_min, q_bar, q_max))
}

/// Classify `(q, m)` for a given rate of return.
pub fn automation_region(
    q: f64,
    m: f64,
    mu: f64,
    tech: &crate::params::TechnologyParams,
) -> Result<RegionReport> {
    let (q_min, q_bar, q_max) = region_domain(mu, tech)?;
    if q < q_min || q > q_max {
        return Err(Error::RegionUndefined { q, q_min, q_max });
    }
    let (s, a) = (tech.sigma, tech.alpha);
    let (m_bar, m_tilde, region);
    if q <= q_bar {
        let mb = m_bar_curve(q, q_bar, s, a);
        region = if m < mb {
            AutomationRegion::Region1
        } else {
            AutomationRegion::Region2
        };
        m_bar = Some(mb);
        m_tilde = if q == q_bar { Some(0.0) } else { None };
    } else {
        let mt = m_tilde_curve(q, q_bar, s, a);
        region = if m < mt {
            AutomationRegion::Region3
        } else {
            AutomationRegion::Region2
        };
        m_tilde = Some(mt);
        m_bar = None;
    }
    Ok(RegionReport {
        region,
        q_bar,
        q_min,
        q_max,
        m_bar,
        m_tilde,
    })
}
