//! Shared domain types and parameter validation.
//!
//! The canonical time unit is one month. Every rate stored here (delta,
//! rho, g, lambda0, m_dot, ...) is a monthly rate; use
//! [`annual_to_monthly`] / [`monthly_to_annual`] to convert, compounding
//! through `(1 + x_a) = (1 + x_m)^12`.

use crate::error::Error;
use crate::math;
use crate::Result;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

/// Technology block: CES task structure, capital conversion, and growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechnologyParams {
    /// Elasticity of substitution between capital- and labor-produced tasks.
    pub sigma: f64,
    /// Labor-augmenting gradient over the task index.
    pub alpha: f64,
    /// Capital-augmenting technology level.
    pub a_k: f64,
    /// Depreciation rate, per month.
    pub delta: f64,
    /// Relative price of capital: one unit of output buys `q_rel` units of capital.
    pub q_rel: f64,
    /// Mass of tasks produced with labor; `1 - m` is the capital-task share.
    pub m: f64,
    /// Balanced-growth rate of output per month.
    pub g: f64,
    /// Instantaneous change in the labor-task mass, per month (0 in steady state).
    pub m_dot: f64,
}

impl TechnologyParams {
    /// New-task drift consistent with balanced growth, `M_dot = g / alpha`.
    pub fn m_upper_dot(&self) -> f64 {
        self.g / self.alpha
    }
}

/// Preference block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferenceParams {
    /// Discount rate, per month.
    pub rho: f64,
    /// Capitalists' relative response time in the offer game.
    pub gamma_f: f64,
    /// Intertemporal elasticity of substitution.
    pub epsilon: f64,
}

/// Matching-technology block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingParams {
    /// Curvature of the matching function.
    pub iota: f64,
    /// Exogenous separation rate, per month.
    pub lambda0: f64,
    /// Flow cost of keeping a vacancy open, stationary output units per month.
    pub xi: f64,
}

/// Institution block: everything that shifts bargaining power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstitutionParams {
    /// Relative hiring capacity of firms; higher values weaken workers.
    pub t_w: f64,
    /// Probability that wages are set by collective bargaining.
    pub p_union: f64,
    /// Opportunity cost of employment, stationary output units.
    pub b: f64,
    /// Intrinsic collective bargaining power of labor.
    pub gamma_u: f64,
    /// Lump-sum taxes on capitalists, stationary output units.
    pub tau: f64,
}

/// Validated, immutable parameter bundle.
///
/// Construction goes through [`ModelParams::new`] (or [`validate_params`]),
/// which checks every field invariant once; downstream code never re-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    tech: TechnologyParams,
    pref: PreferenceParams,
    matching: MatchingParams,
    inst: InstitutionParams,
}

fn check(ok: bool, field: &'static str, value: f64, constraint: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            value,
            constraint,
        })
    }
}

impl ModelParams {
    pub fn new(
        tech: TechnologyParams,
        pref: PreferenceParams,
        matching: MatchingParams,
        inst: InstitutionParams,
    ) -> Result<Self> {
        check(tech.sigma > 0.0, "sigma", tech.sigma, "be positive")?;
        check(tech.alpha > 0.0, "alpha", tech.alpha, "be positive")?;
        check(tech.a_k > 0.0, "a_k", tech.a_k, "be positive")?;
        check(
            tech.delta > 0.0 && tech.delta < 1.0,
            "delta",
            tech.delta,
            "lie in (0,1)",
        )?;
        check(tech.q_rel > 0.0, "q_rel", tech.q_rel, "be positive")?;
        check((0.0..=1.0).contains(&tech.m), "m", tech.m, "lie in [0,1]")?;
        check(tech.g.is_finite(), "g", tech.g, "be finite")?;
        check(tech.m_dot.is_finite(), "m_dot", tech.m_dot, "be finite")?;
        check(pref.rho > 0.0, "rho", pref.rho, "be positive")?;
        check(pref.gamma_f > 0.0, "gamma_f", pref.gamma_f, "be positive")?;
        check(pref.epsilon > 0.0, "epsilon", pref.epsilon, "be positive")?;
        check(matching.iota > 0.0, "iota", matching.iota, "be positive")?;
        check(
            matching.lambda0 > 0.0 && matching.lambda0 < 1.0,
            "lambda0",
            matching.lambda0,
            "lie in (0,1)",
        )?;
        check(matching.xi > 0.0, "xi", matching.xi, "be positive")?;
        check(inst.t_w >= 0.0, "t_w", inst.t_w, "be non-negative")?;
        check(
            (0.0..=1.0).contains(&inst.p_union),
            "p_union",
            inst.p_union,
            "lie in [0,1]",
        )?;
        check(inst.b >= 0.0, "b", inst.b, "be non-negative")?;
        check(
            inst.gamma_u > 0.0 && inst.gamma_u < 1.0,
            "gamma_u",
            inst.gamma_u,
            "lie in (0,1)",
        )?;
        check(inst.tau >= 0.0, "tau", inst.tau, "be non-negative")?;
        Ok(ModelParams {
            tech,
            pref,
            matching,
            inst,
        })
    }

    pub fn tech(&self) -> &TechnologyParams {
        &self.tech
    }

    pub fn pref(&self) -> &PreferenceParams {
        &self.pref
    }

    pub fn matching(&self) -> &MatchingParams {
        &self.matching
    }

    pub fn inst(&self) -> &InstitutionParams {
        &self.inst
    }

    /// Copy the bundle, apply `f` to the unpacked blocks, and re-validate.
    pub fn modify(
        &self,
        f: impl FnOnce(
            &mut TechnologyParams,
            &mut PreferenceParams,
            &mut MatchingParams,
            &mut InstitutionParams,
        ),
    ) -> Result<Self> {
        let mut tech = self.tech;
        let mut pref = self.pref;
        let mut matching = self.matching;
        let mut inst = self.inst;
        f(&mut tech, &mut pref, &mut matching, &mut inst);
        ModelParams::new(tech, pref, matching, inst)
    }

    /// Effective discount rate `rho + alpha*m_dot - g`.
    pub fn rho_tilde(&self) -> f64 {
        self.pref.rho + self.tech.alpha * self.tech.m_dot - self.tech.g
    }

    /// Flat `section.key=value` form for reproducibility logs.
    ///
    /// Values use the shortest decimal representation that parses back to
    /// the same bits, so a round trip through [`ModelParams::from_key_value`]
    /// is exact.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    fn entries(&self) -> [(&'static str, f64); 18] {
        [
            ("technology.sigma", self.tech.sigma),
            ("technology.alpha", self.tech.alpha),
            ("technology.a_k", self.tech.a_k),
            ("technology.delta_monthly", self.tech.delta),
            ("technology.q", self.tech.q_rel),
            ("technology.m", self.tech.m),
            ("technology.g_monthly", self.tech.g),
            ("technology.m_dot_monthly", self.tech.m_dot),
            ("preferences.rho_monthly", self.pref.rho),
            ("preferences.gamma_f", self.pref.gamma_f),
            ("preferences.epsilon", self.pref.epsilon),
            ("matching.iota", self.matching.iota),
            ("matching.lambda0_monthly", self.matching.lambda0),
            ("matching.xi", self.matching.xi),
            ("institutions.t_w", self.inst.t_w),
            ("institutions.p_union", self.inst.p_union),
            ("institutions.b", self.inst.b),
            ("institutions.gamma_u", self.inst.gamma_u),
        ]
    }

    /// Parse the flat key=value form emitted by [`ModelParams::to_key_value`].
    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut tech = TechnologyParams {
            sigma: f64::NAN,
            alpha: f64::NAN,
            a_k: f64::NAN,
            delta: f64::NAN,
            q_rel: f64::NAN,
            m: f64::NAN,
            g: f64::NAN,
            m_dot: 0.0,
        };
        let mut pref = PreferenceParams {
            rho: f64::NAN,
            gamma_f: f64::NAN,
            epsilon: f64::NAN,
        };
        let mut matching = MatchingParams {
            iota: f64::NAN,
            lambda0: f64::NAN,
            xi: f64::NAN,
        };
        let mut inst = InstitutionParams {
            t_w: f64::NAN,
            p_union: f64::NAN,
            b: f64::NAN,
            gamma_u: f64::NAN,
            tau: 0.0,
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or(Error::InvalidParam {
                field: "key_value",
                value: f64::NAN,
                constraint: "be of the form section.key=value",
            })?;
            let v: f64 = val.trim().parse().map_err(|_| Error::InvalidParam {
                field: "key_value",
                value: f64::NAN,
                constraint: "have a parseable numeric value",
            })?;
            match key.trim() {
                "technology.sigma" => tech.sigma = v,
                "technology.alpha" => tech.alpha = v,
                "technology.a_k" => tech.a_k = v,
                "technology.delta_monthly" => tech.delta = v,
                "technology.delta_annual" => tech.delta = annual_to_monthly(v),
                "technology.q" => tech.q_rel = v,
                "technology.m" => tech.m = v,
                "technology.g_monthly" => tech.g = v,
                "technology.g_annual" => tech.g = annual_to_monthly(v),
                "technology.m_dot_monthly" => tech.m_dot = v,
                "preferences.rho_monthly" => pref.rho = v,
                "preferences.rho_annual" => pref.rho = annual_to_monthly(v),
                "preferences.gamma_f" => pref.gamma_f = v,
                "preferences.epsilon" => pref.epsilon = v,
                "matching.iota" => matching.iota = v,
                "matching.lambda0_monthly" => matching.lambda0 = v,
                "matching.lambda0_annual" => matching.lambda0 = annual_to_monthly(v),
                "matching.xi" => matching.xi = v,
                "institutions.t_w" => inst.t_w = v,
                "institutions.p_union" => inst.p_union = v,
                "institutions.b" => inst.b = v,
                "institutions.gamma_u" => inst.gamma_u = v,
                "institutions.tau" => inst.tau = v,
                _ => {
                    return Err(Error::InvalidParam {
                        field: "key_value",
                        value: v,
                        constraint: "use a known section.key name",
                    })
                }
            }
        }
        ModelParams::new(tech, pref, matching, inst)
    }

    /// Postwar-US baseline at a monthly frequency. The labor-task mass and
    /// the firms' hiring capacity are set so the solved state matches the
    /// sample-average labor share (~0.63), annual capital-output ratio
    /// (~1.5), and vacancy rate (~3%).
    pub fn baseline() -> Self {
        ModelParams::new(
            TechnologyParams {
                sigma: 0.6,
                alpha: 1.4,
                a_k: 0.022,
                delta: annual_to_monthly(0.07),
                q_rel: 0.35,
                m: 0.861,
                g: 0.0017,
                m_dot: 0.0,
            },
            PreferenceParams {
                rho: 0.0222,
                gamma_f: 0.45,
                epsilon: 1.0,
            },
            MatchingParams {
                iota: 1.25,
                lambda0: 0.02,
                xi: 8.0,
            },
            InstitutionParams {
                t_w: 3.66,
                p_union: 0.25,
                b: 0.06,
                gamma_u: 0.5,
                tau: 0.0,
            },
        )
        .expect("baseline parameters are valid")
    }
}

/// Validate a bundle assembled from raw blocks.
pub fn validate_params(
    tech: TechnologyParams,
    pref: PreferenceParams,
    matching: MatchingParams,
    inst: InstitutionParams,
) -> Result<ModelParams> {
    ModelParams::new(tech, pref, matching, inst)
}

/// Convert an annual rate to its compounding monthly equivalent.
pub fn annual_to_monthly(x_annual: f64) -> f64 {
    math::powf(1.0 + x_annual, 1.0 / 12.0) - 1.0
}

/// Convert a monthly rate to its compounding annual equivalent.
pub fn monthly_to_annual(x_monthly: f64) -> f64 {
    math::powf(1.0 + x_monthly, 12.0) - 1.0
}

/// The solved stationary equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Rate of return on capital (markup over unit cost).
    pub mu: f64,
    /// Labor-market tightness V/U.
    pub theta: f64,
    /// Stationary per-capita capital.
    pub k_hat: f64,
    /// Stationary capitalist consumption.
    pub c_hat: f64,
    /// Stationary real wage.
    pub wage: f64,
    /// Unemployment rate.
    pub u_rate: f64,
    /// Vacancy rate.
    pub v_rate: f64,
    /// Labor share of output.
    pub labor_share: f64,
    /// Rate of profit per unit of capital value.
    pub r_profit: f64,
    /// Stationary per-capita output.
    pub y_hat: f64,
    /// Marginal product of labor.
    pub y_l: f64,
    /// Effective separation rate (exogenous plus technological displacement).
    pub lambda_eff: f64,
}

impl SteadyState {
    /// Annualized capital-output ratio `k_hat / (q * y_hat) / 12`.
    pub fn k_over_qy_annual(&self, q_rel: f64) -> f64 {
        self.k_hat / (q_rel * self.y_hat) / 12.0
    }

    /// Check the defining identities without re-solving. Returns the worst
    /// relative violation among wage*(1+mu)=y_L, U=lambda/(lambda+f), and
    /// labor_share=w/y.
    pub fn identity_residual(&self, iota: f64) -> f64 {
        let markup = math::abs(self.wage * (1.0 + self.mu) - self.y_l) / self.y_l;
        let f = crate::matching::f_find(crate::matching::Tightness::new(self.theta).unwrap(), iota);
        let bev = math::abs(self.u_rate - self.lambda_eff / (self.lambda_eff + f))
            / self.u_rate.max(1e-12);
        let share =
            math::abs(self.labor_share - self.wage / self.y_hat) / self.labor_share.max(1e-12);
        markup.max(bev).max(share)
    }
}

/// Bargaining-power bundle (intrinsic Gamma's and actual Psi's).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargainingPowers {
    pub gamma_na: f64,
    pub gamma_nb: f64,
    pub psi_na: f64,
    pub psi_nb: f64,
    pub psi_n: f64,
    pub psi_u: f64,
}

impl BargainingPowers {
    /// Protocol ordering `psi_nb <= psi_n <= psi_na`.
    pub fn ordered(&self) -> bool {
        self.psi_nb <= self.psi_n + 1e-15 && self.psi_n <= self.psi_na + 1e-15
    }
}

/// One calendar observation of exogenous drivers and calibration targets.
///
/// All rates are monthly; ingest code converts annual columns on the way in.
/// Missing observations are `None`, never silently zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub year: i32,
    /// Union-membership share.
    pub p_union: Option<f64>,
    /// Labor-productivity growth, monthly.
    pub g: Option<f64>,
    /// Opportunity cost of employment, model units.
    pub b: Option<f64>,
    /// Annual capital-output ratio K/(qY) from data.
    pub k_over_qy_annual: Option<f64>,
    /// Data rate of return.
    pub mu_data: Option<f64>,
    /// Data depreciation rate, monthly.
    pub delta_data: Option<f64>,
    /// Unemployment rate.
    pub u_data: Option<f64>,
    /// Vacancy rate.
    pub v_data: Option<f64>,
}

/// A container for per-year calibration output.
pub type YearSeries = Vec<(i32, f64)>;

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> ModelParams {
        ModelParams::baseline()
    }

    #[test]
    fn baseline_accepted() {
        let p = table2();
        assert_eq!(p.tech().sigma, 0.6);
        assert_eq!(p.pref().gamma_f, 0.45);
        assert_eq!(p.matching().iota, 1.25);
        assert_eq!(p.inst().p_union, 0.25);
        // delta from the 7% annual target
        assert!((p.tech().delta - 0.005654145387405274).abs() < 1e-15);
    }

    #[test]
    fn sigma_zero_rejected() {
        let err = table2()
            .modify(|t, _, _, _| t.sigma = 0.0)
            .expect_err("sigma = 0 must be rejected");
        match err {
            Error::InvalidParam { field, .. } => assert_eq!(field, "sigma"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn m_above_one_rejected() {
        let err = table2()
            .modify(|t, _, _, _| t.m = 1.2)
            .expect_err("m = 1.2 must be rejected");
        match err {
            Error::InvalidParam { field, value, .. } => {
                assert_eq!(field, "m");
                assert_eq!(value, 1.2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn nan_rejected() {
        assert!(table2().modify(|_, p, _, _| p.rho = f64::NAN).is_err());
    }

    #[test]
    fn key_value_round_trip_is_bit_exact() {
        let p = table2()
            .modify(|t, _, _, i| {
                t.sigma = 0.6000000000000301;
                i.t_w = 3.6600000000077;
            })
            .unwrap();
        let text = p.to_key_value();
        let q = ModelParams::from_key_value(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.tech().sigma.to_bits(), q.tech().sigma.to_bits());
        assert_eq!(p.inst().t_w.to_bits(), q.inst().t_w.to_bits());
    }

    #[test]
    fn annual_monthly_conversion_compounds() {
        let m = annual_to_monthly(0.07);
        assert!((monthly_to_annual(m) - 0.07).abs() < 1e-14);
        assert!((libm::pow(1.0 + m, 12.0) - 1.07).abs() < 1e-14);
    }
}
