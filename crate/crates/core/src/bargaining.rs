//! Closed-form wage solutions.
//!
//! The individual protocol is an alternating-offers game where, after a
//! breakdown, either the firm meets a replacement worker (average delay
//! `1/q(theta)`) or the worker meets a replacement firm (average delay
//! `t_w/f(theta)`). Firms move first and respond `gamma_f` times faster.
//! The subgame-perfect split gives the intrinsic powers `Gamma`, and the
//! flow value equations turn those into actual powers `Psi` through the
//! common kernel [`psi`]. The collective protocol is a Nash bargain over
//! the whole workforce, which adds a capitalized aggregate-surplus term to
//! the wage.

use crate::error::Error;
use crate::matching::Tightness;
use crate::Result;

/// Effective discount rate `rho + alpha*m_dot - g`.
///
/// Every `Psi` denominator needs `rho_tilde + lambda_eff > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDiscount(pub f64);

/// Intrinsic power when the worker is first to find a new partner:
/// `Gamma_na = gamma_f / (1 + gamma_f)`.
pub fn gamma_na(gamma_f: f64) -> f64 {
    gamma_f / (1.0 + gamma_f)
}

/// Intrinsic power when the firm is first to find a new partner:
/// `Gamma_nb = gamma_f (1 - q) / (1 + gamma_f + q (1 - gamma_f))`.
///
/// Equals 0 at `q = 1` (instant replacement) and tends to `Gamma_na` as
/// `q -> 0`.
pub fn gamma_nb(gamma_f: f64, q_theta: f64) -> f64 {
    gamma_f * (1.0 - q_theta) / (1.0 + gamma_f + q_theta * (1.0 - gamma_f))
}

/// Actual bargaining power from the flow-value equations:
/// `Psi = Gamma (rho_tilde + lambda + f) / (rho_tilde + lambda + Gamma f)`.
///
/// `Psi = Gamma` at `f = 0`; `Psi -> 1` as `f -> infinity`.
pub fn psi(gamma: f64, rho_tilde: EffectiveDiscount, lambda_eff: f64, f_theta: f64) -> f64 {
    let rl = rho_tilde.0 + lambda_eff;
    gamma * (rl + f_theta) / (rl + gamma * f_theta)
}

/// Average individual power, weighting the two branch powers by who finds a
/// new partner first: `Psi_n = (t_w Psi_nb + theta Psi_na) / (t_w + theta)`.
pub fn psi_n(t_w: f64, theta: Tightness, psi_na: f64, psi_nb: f64) -> Result<f64> {
    let th = theta.get();
    if t_w == 0.0 && th == 0.0 {
        return Err(Error::UndefinedWeights);
    }
    Ok((t_w * psi_nb + th * psi_na) / (t_w + th))
}

/// Individually bargained wage `w_n = b + Psi_n (y_L - b)`.
pub fn wage_individual(b: f64, psi_n: f64, y_l: f64) -> Result<f64> {
    if y_l <= b {
        return Err(Error::SurplusExhausted { y_l, b });
    }
    Ok(b + psi_n * (y_l - b))
}

/// Collectively bargained wage
/// `w_u = b + Psi_u [y_L - b + ((rho_tilde + lambda) / rho_tilde)(y - y_L)]`.
///
/// Capitalizing the aggregate surplus requires `rho_tilde > 0`. The result
/// can exceed `y`; whether the firm can live with that is the equilibrium
/// module's problem, not a constraint here.
pub fn wage_collective(
    b: f64,
    psi_u: f64,
    y_l: f64,
    y_hat: f64,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
) -> Result<f64> {
    if y_l <= b {
        return Err(Error::SurplusExhausted { y_l, b });
    }
    if rho_tilde.0 <= 0.0 {
        return Err(Error::NonPositiveDiscount {
            rho_tilde: rho_tilde.0,
        });
    }
    let capitalization = (rho_tilde.0 + lambda_eff) / rho_tilde.0;
    Ok(b + psi_u * (y_l - b + capitalization * (y_hat - y_l)))
}

/// Aggregate wage `w = w_n + p_union (w_u - w_n)`.
pub fn wage_aggregate(p_union: f64, w_n: f64, w_u: f64) -> f64 {
    w_n + p_union * (w_u - w_n)
}

/// Assemble the full power bundle at one labor-market state.
#[allow(clippy::too_many_arguments)]
pub fn powers(
    gamma_f: f64,
    gamma_u: f64,
    t_w: f64,
    theta: Tightness,
    q_theta: f64,
    f_theta: f64,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
) -> Result<crate::params::BargainingPowers> {
    let g_na = gamma_na(gamma_f);
    let g_nb = gamma_nb(gamma_f, q_theta);
    let psi_na = psi(g_na, rho_tilde, lambda_eff, f_theta);
    let psi_nb = psi(g_nb, rho_tilde, lambda_eff, f_theta);
    let pn = psi_n(t_w, theta, psi_na, psi_nb)?;
    Ok(crate::params::BargainingPowers {
        gamma_na: g_na,
        gamma_nb: g_nb,
        psi_na,
        psi_nb,
        psi_n: pn,
        psi_u: psi(gamma_u, rho_tilde, lambda_eff, f_theta),
    })
}

/// Collective wage premium
/// `w_u - w_n = (Psi_u - Psi_n)(y_L - b) + Psi_u ((rho_tilde + lambda)/rho_tilde)(y - y_L)`.
pub fn wage_premium(
    psi_u: f64,
    psi_n: f64,
    y_l: f64,
    b: f64,
    y_hat: f64,
    rho_tilde: EffectiveDiscount,
    lambda_eff: f64,
) -> Result<f64> {
    if y_l <= b {
        return Err(Error::SurplusExhausted { y_l, b });
    }
    if rho_tilde.0 <= 0.0 {
        return Err(Error::NonPositiveDiscount {
            rho_tilde: rho_tilde.0,
        });
    }
    let capitalization = (rho_tilde.0 + lambda_eff) / rho_tilde.0;
    Ok((psi_u - psi_n) * (y_l - b) + psi_u * capitalization * (y_hat - y_l))
}
