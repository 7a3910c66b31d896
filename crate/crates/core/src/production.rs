//! CES task-based production block.
//!
//! Tasks on a unit continuum are produced either with capital (mass `1-m`,
//! effectiveness `a_k`) or with labor (mass `m`, effectiveness rising in the
//! task index at rate `alpha`). In stationary per-capita units output is
//!
//! `y = [(1-m)^(1/s) (a_k k)^((s-1)/s) + B(m)^(1/s)]^(s/(s-1))`
//!
//! with `B(m)` the labor task-share integral. Marginal products are
//! analytic; finite differences appear only in tests.

use crate::error::Error;
use crate::math;
use crate::params::{MatchingParams, TechnologyParams};
use crate::Result;

/// Switch to the series/Cobb-Douglas limits when `|sigma - 1|` is below this.
pub const SIGMA_UNIT_THRESHOLD: f64 = 1e-6;

/// Output and marginal products at one point of the production surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionPoint {
    pub k_hat: f64,
    pub y_hat: f64,
    /// Marginal product of capital.
    pub y_k: f64,
    /// Marginal product of labor, `y - k*y_k` by constant returns.
    pub y_l: f64,
}

/// Labor task-share integral `B(m) = (e^(alpha (sigma-1) m) - 1) / (alpha (sigma-1))`,
/// with the limit `B -> m` as `sigma -> 1`.
pub fn task_integral(m: f64, sigma: f64, alpha: f64) -> f64 {
    let a = alpha * (sigma - 1.0);
    if math::abs(sigma - 1.0) < SIGMA_UNIT_THRESHOLD {
        m
    } else {
        math::expm1(a * m) / a
    }
}

/// Counterpart integral with the sign of the exponent flipped,
/// `(e^(alpha (1-sigma) m) - 1) / (alpha (1-sigma))`; shows up in the
/// ideal-price-index relations behind the automation regions.
pub fn task_integral_reflected(m: f64, sigma: f64, alpha: f64) -> f64 {
    task_integral(m, 2.0 - sigma, alpha)
}

/// Evaluate stationary output and both marginal products at `k_hat`.
pub fn y_hat(k_hat: f64, tech: &TechnologyParams) -> Result<ProductionPoint> {
    if !(k_hat > 0.0) || !k_hat.is_finite() {
        return Err(Error::InvalidParam {
            field: "k_hat",
            value: k_hat,
            constraint: "be positive and finite",
        });
    }
    let (s, a, m) = (tech.sigma, tech.alpha, tech.m);
    if m >= 1.0 && s < 1.0 {
        return Err(Error::Degenerate(
            "m = 1 with sigma < 1: the capital term vanishes and the economy is labor-only",
        ));
    }
    if math::abs(s - 1.0) < SIGMA_UNIT_THRESHOLD {
        // Cobb-Douglas limit; the CES weights (1-m) and B(m)=m sum to one.
        let y = math::powf(tech.a_k * k_hat / (1.0 - m), 1.0 - m) * math::powf(m, -m);
        let y_k = (1.0 - m) * y / k_hat;
        return Ok(ProductionPoint {
            k_hat,
            y_hat: y,
            y_k,
            y_l: m * y,
        });
    }
    let e = (s - 1.0) / s;
    let b = task_integral(m, s, a);
    let cap_term = math::powf(1.0 - m, 1.0 / s) * math::powf(tech.a_k * k_hat, e);
    let lab_term = math::powf(b, 1.0 / s);
    let y = math::powf(cap_term + lab_term, 1.0 / e);
    let y_k =
        math::powf(y / k_hat, 1.0 / s) * math::powf(1.0 - m, 1.0 / s) * math::powf(tech.a_k, e);
    let y_l = math::powf(y, 1.0 / s) * lab_term;
    Ok(ProductionPoint {
        k_hat,
        y_hat: y,
        y_k,
        y_l,
    })
}

/// Labor share consistent with the rate of return:
/// `Omega = (1+mu)^-1 [1 + ((1-m)/B(m))^(1/s) (a_k k)^((s-1)/s)]^-1`.
///
/// Evaluated at an equilibrium this equals `w / y` exactly, because the wage
/// satisfies `w (1 + mu) = y_L`.
pub fn labor_share(mu: f64, k_hat: f64, tech: &TechnologyParams) -> f64 {
    let (s, a, m) = (tech.sigma, tech.alpha, tech.m);
    let ratio = (1.0 - m) / task_integral(m, s, a);
    let cap = math::powf(ratio, 1.0 / s) * math::powf(tech.a_k * k_hat, (s - 1.0) / s);
    1.0 / ((1.0 + mu) * (1.0 + cap))
}

/// Per-worker technological displacement,
/// `1 - e^(x (M_dot - m_dot)) (e^(x (m + m_dot)) - 1) / (e^(x m) - 1)`
/// with `x = alpha (sigma - 1)`; the total displaced mass is `L` times this.
pub fn displacement_per_worker(
    m: f64,
    m_dot: f64,
    m_upper_dot: f64,
    sigma: f64,
    alpha: f64,
) -> Result<f64> {
    if math::abs(sigma - 1.0) < SIGMA_UNIT_THRESHOLD {
        if m <= 0.0 {
            return Err(Error::Singular("displacement fraction undefined at m = 0"));
        }
        // limit of the exact expression as sigma -> 1
        return Ok(-m_dot / m);
    }
    let x = alpha * (sigma - 1.0);
    let denom = math::expm1(x * m);
    if denom == 0.0 {
        return Err(Error::Singular("displacement fraction undefined at m = 0"));
    }
    Ok(1.0 - math::exp(x * (m_upper_dot - m_dot)) * math::expm1(x * (m + m_dot)) / denom)
}

/// Technological unemployment: mass of workers displaced by automation net
/// of reinstatement from new tasks. Returns `(mass, per_worker)` where
/// `per_worker` is also `dU^A/dL`.
pub fn tech_unemployment(
    employment: f64,
    m: f64,
    m_dot: f64,
    m_upper_dot: f64,
    tech: &TechnologyParams,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&employment) {
        return Err(Error::InvalidParam {
            field: "employment",
            value: employment,
            constraint: "lie in [0,1]",
        });
    }
    if !(0.0..=1.0).contains(&(m + m_dot)) {
        return Err(Error::InvalidParam {
            field: "m + m_dot",
            value: m + m_dot,
            constraint: "lie in [0,1]",
        });
    }
    let per_worker = displacement_per_worker(m, m_dot, m_upper_dot, tech.sigma, tech.alpha)?;
    Ok((employment * per_worker, per_worker))
}

/// Effective separation rate `lambda = lambda0 + dU^A/dL`, with the
/// new-task drift on its balanced-growth value `M_dot = g / alpha`.
pub fn effective_separation(matching: &MatchingParams, tech: &TechnologyParams) -> Result<f64> {
    let per_worker = displacement_per_worker(
        tech.m,
        tech.m_dot,
        tech.m_upper_dot(),
        tech.sigma,
        tech.alpha,
    )?;
    Ok(matching.lambda0 + per_worker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    fn tech() -> TechnologyParams {
        *ModelParams::baseline().tech()
    }

    #[test]
    fn task_integral_limits() {
        assert_eq!(task_integral(0.0, 0.6, 1.4), 0.0);
        // sigma -> 1 collapses to m
        assert_eq!(task_integral(0.88, 1.0, 1.4), 0.88);
        assert_eq!(task_integral(0.88, 1.0 + 5e-7, 1.4), 0.88);
        // frozen from a high-precision evaluation of (e^-0.4928 - 1)/(-0.56)
        assert!((task_integral(0.88, 0.6, 1.4) - 0.6947974293993978).abs() < 1e-15);
    }

    #[test]
    fn euler_identity_on_grid() {
        // y = k y_k + y_l to 1e-10 relative over (k, m, sigma)
        let mut t = tech();
        let mut n = 0;
        for si in 0..5 {
            for mi in 0..5 {
                for ki in 0..4 {
                    t.sigma = [0.4, 0.6, 0.9, 1.0, 1.3][si];
                    t.m = 0.05 + 0.9 * (mi as f64) / 4.0;
                    let k = libm::pow(10.0, -1.0 + 3.0 * (ki as f64) / 3.0);
                    let p = y_hat(k, &t).unwrap();
                    let lhs = p.k_hat * p.y_k + p.y_l;
                    assert!(
                        (lhs - p.y_hat).abs() <= 1e-10 * p.y_hat,
                        "Euler identity fails at sigma={} m={} k={k}",
                        t.sigma,
                        t.m
                    );
                    assert!(p.y_hat > 0.0 && p.y_k > 0.0 && p.y_l > 0.0);
                    n += 1;
                }
            }
        }
        assert_eq!(n, 100);
    }

    #[test]
    fn ces_collapses_to_capital_only_at_m_zero() {
        let mut t = tech();
        t.m = 1e-9;
        let p = y_hat(2.0, &t).unwrap();
        assert!((p.y_hat - t.a_k * 2.0).abs() < 1e-6);
        assert!((p.y_k - t.a_k).abs() < 1e-6);
    }

    #[test]
    fn concave_in_capital() {
        let t = tech();
        let p1 = y_hat(5.0, &t).unwrap();
        let p2 = y_hat(10.0, &t).unwrap();
        assert!(p2.y_hat < 2.0 * p1.y_hat);
        assert!(p2.y_l > p1.y_l);
    }

    #[test]
    fn marginal_product_of_capital_decreasing() {
        let t = tech();
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let k = libm::pow(10.0, -2.0 + 5.0 * i as f64 / 59.0);
            let p = y_hat(k, &t).unwrap();
            assert!(p.y_k < prev, "y_k not decreasing at k={k}");
            prev = p.y_k;
        }
    }

    #[test]
    fn labor_only_economy_flagged() {
        let mut t = tech();
        t.m = 1.0;
        assert!(matches!(y_hat(1.0, &t), Err(Error::Degenerate(_))));
    }

    #[test]
    fn analytic_marginals_match_finite_differences() {
        let t = tech();
        let k = 13.0;
        let h = 1e-6;
        let p = y_hat(k, &t).unwrap();
        let hi = y_hat(k + h, &t).unwrap().y_hat;
        let lo = y_hat(k - h, &t).unwrap().y_hat;
        assert!(((hi - lo) / (2.0 * h) - p.y_k).abs() < 1e-8);
    }

    #[test]
    fn table2_point_labor_share_in_band() {
        // Independent nested-bisection oracle: pick k so y_k q = delta (1+mu)
        // at mu = 0.45 and the data-average labor-task mass m = 0.88, then
        // the implied labor share w/y = y_l / ((1+mu) y) lies in [0.60, 0.66].
        let mut t = tech();
        t.m = 0.88;
        let mu = 0.45;
        let target = t.delta * (1.0 + mu) / t.q_rel;
        let (mut lo, mut hi) = (1e-3, 1e4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if y_hat(mid, &t).unwrap().y_k > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = y_hat(0.5 * (lo + hi), &t).unwrap();
        assert!((p.y_k - target).abs() < 1e-10);
        let share = p.y_l / ((1.0 + mu) * p.y_hat);
        assert!((0.60..=0.66).contains(&share), "share = {share}");
        // Eq-consistency: the closed-form labor share agrees
        let omega = labor_share(mu, p.k_hat, &t);
        assert!((omega - share).abs() < 1e-12);
    }

    #[test]
    fn labor_share_limits() {
        let t = tech();
        // mu -> infinity drives the share to zero
        assert!(labor_share(1e9, 13.0, &t) < 1e-8);
        // the capital term vanishes as k -> infinity for sigma < 1
        // and as k -> 0 for sigma > 1; both leave Omega -> 1/(1+mu)
        let mu = 0.4;
        assert!((labor_share(mu, 1e12, &t) - 1.0 / (1.0 + mu)).abs() < 1e-3);
        let mut t2 = t;
        t2.sigma = 1.2;
        assert!((labor_share(mu, 1e-12, &t2) - 1.0 / (1.0 + mu)).abs() < 1e-3);
    }

    #[test]
    fn displacement_zero_without_technical_change() {
        let (mass, pw) = tech_unemployment(0.95, 0.88, 0.0, 0.0, &tech()).unwrap();
        assert_eq!(mass, 0.0);
        assert_eq!(pw, 0.0);
    }

    #[test]
    fn displacement_at_baseline_growth() {
        // per-worker displacement 1 - e^((sigma-1) g) at M_dot = g/alpha, m_dot = 0;
        // frozen oracle value 6.7976885239642564e-4
        let t = tech();
        let (_, pw) = tech_unemployment(1.0, t.m, 0.0, t.m_upper_dot(), &t).unwrap();
        assert!((pw - 6.7976885239642564e-4).abs() < 1e-15);
        // independent of m when m_dot = 0
        let (_, pw2) = tech_unemployment(1.0, 0.5, 0.0, t.m_upper_dot(), &t).unwrap();
        assert!((pw - pw2).abs() < 1e-15);
    }

    #[test]
    fn displacement_negative_for_gross_substitutes() {
        let mut t = tech();
        t.sigma = 1.2;
        let (_, pw) = tech_unemployment(1.0, t.m, 0.0, t.m_upper_dot(), &t).unwrap();
        assert!(pw < 0.0);
    }

    #[test]
    fn effective_separation_examples() {
        let p = ModelParams::baseline();
        let lam = effective_separation(p.matching(), p.tech()).unwrap();
        assert!((lam - 0.020679768852396426).abs() < 1e-15);
        // g = 0 and m_dot = 0 leave lambda at lambda0
        let p0 = p.modify(|t, _, _, _| t.g = 1e-300).unwrap();
        let lam0 = effective_separation(p0.matching(), p0.tech()).unwrap();
        assert!((lam0 - p.matching().lambda0).abs() < 1e-12);
        // sigma > 1 with g > 0 pushes lambda below lambda0
        let p2 = p.modify(|t, _, _, _| t.sigma = 1.2).unwrap();
        let lam2 = effective_separation(p2.matching(), p2.tech()).unwrap();
        assert!(lam2 < p.matching().lambda0);
    }

    #[test]
    fn displacement_singular_at_m_zero() {
        let t = tech();
        assert!(matches!(
            tech_unemployment(0.5, 0.0, 0.0, 0.001, &t),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn sign_matrix_by_central_differences() {
        // All Table-1 cells for sigma in {0.6, 1.2}: signs of the per-worker
        // displacement in M_dot and m_dot, and its invariance in m.
        let h = 1e-7;
        for &(sigma, s_updot, s_mdot) in &[(0.6, 1.0, -1.0), (1.2, -1.0, -1.0)] {
            let mut t = tech();
            t.sigma = sigma;
            let md = t.m_upper_dot();
            let pw = |m: f64, mdot: f64, updot: f64| {
                displacement_per_worker(m, mdot, updot, t.sigma, t.alpha).unwrap()
            };
            // dU^A_L / dM_dot
            let d_updot = (pw(t.m, 0.0, md + h) - pw(t.m, 0.0, md - h)) / (2.0 * h);
            assert!(d_updot * s_updot > 0.0, "dM sign at sigma={sigma}");
            // dU^A_L / dm_dot
            let d_mdot = (pw(t.m, h, md) - pw(t.m, -h, md)) / (2.0 * h);
            assert!(d_mdot * s_mdot > 0.0, "dm_dot sign at sigma={sigma}");
            // dU^A_L / dm = 0 at m_dot = 0
            let d_m = (pw(t.m + h, 0.0, md) - pw(t.m - h, 0.0, md)) / (2.0 * h);
            assert!(d_m.abs() < 1e-6, "dm sign at sigma={sigma}");
            // dU^A/dL itself: positive when M_dot > 0 iff sigma < 1, flipped for M_dot < 0
            assert!(pw(t.m, 0.0, md) * s_updot > 0.0);
            assert!(pw(t.m, 0.0, -md) * s_updot < 0.0);
        }
    }
}
