//! Matching technology.
//!
//! Meetings come from the constant-returns aggregator
//! `G(U, V) = U*V / (U^iota + V^iota)^(1/iota)`, which keeps both the
//! vacancy-filling rate `q(theta) = G/V` and the job-finding rate
//! `f(theta) = G/U` inside (0, 1] for every tightness without ad-hoc
//! truncation.

use crate::error::Error;
use crate::math;
use crate::Result;

/// Vacancy-unemployment ratio, `theta = V/U >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tightness(f64);

impl Tightness {
    pub fn new(theta: f64) -> Result<Self> {
        if theta >= 0.0 && theta.is_finite() {
            Ok(Tightness(theta))
        } else {
            Err(Error::InvalidParam {
                field: "theta",
                value: theta,
                constraint: "be finite and non-negative",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Probability rate of filling a vacancy, `q(theta) = (1 + theta^iota)^(-1/iota)`.
///
/// Strictly decreasing, `q(0) = 1`, `q -> 0` as `theta -> inf`. The true
/// value never leaves (0, 1]; the clamp only removes last-ulp rounding spill.
pub fn q_fill(theta: Tightness, iota: f64) -> f64 {
    let t = theta.get();
    if t == 0.0 {
        return 1.0;
    }
    math::powf(1.0 + math::powf(t, iota), -1.0 / iota).min(1.0)
}

/// Job-finding rate `f(theta) = theta * q(theta)`, strictly increasing in [0, 1).
///
/// As with [`q_fill`], the exact value stays below one for every finite
/// tightness; the clamp covers rounding at extreme `theta^iota`.
pub fn f_find(theta: Tightness, iota: f64) -> f64 {
    (theta.get() * q_fill(theta, iota)).min(1.0)
}

/// Meeting flow for raw stocks, `G(U, V)`; homogeneous of degree one.
pub fn meetings(u: f64, v: f64, iota: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    u * v / math::powf(math::powf(u, iota) + math::powf(v, iota), 1.0 / iota)
}

/// Stationary unemployment on the `U_dot = 0` locus,
/// `U = lambda / (lambda + f(theta))`.
pub fn beveridge_u(lambda_eff: f64, theta: Tightness, iota: f64) -> f64 {
    lambda_eff / (lambda_eff + f_find(theta, iota))
}

#[cfg(test)]
mod tests {
    use super::*;

    const IOTA: f64 = 1.25;

    fn th(x: f64) -> Tightness {
        Tightness::new(x).unwrap()
    }

    #[test]
    fn q_at_zero_is_one() {
        assert_eq!(q_fill(th(0.0), IOTA), 1.0);
    }

    #[test]
    fn q_vanishes_at_large_theta() {
        assert!(q_fill(th(1e12), IOTA) < 1e-10);
    }

    #[test]
    fn q_at_unit_tightness() {
        // 2^(-1/1.25), frozen from a high-precision evaluation of the closed form
        assert!((q_fill(th(1.0), IOTA) - 0.5743491774985175).abs() < 1e-15);
    }

    #[test]
    fn f_is_theta_times_q() {
        for &t in &[0.0, 0.01, 0.3, 1.0, 4.0, 50.0] {
            let f = f_find(th(t), IOTA);
            assert_eq!(f, (t * q_fill(th(t), IOTA)).min(1.0));
        }
        assert_eq!(f_find(th(0.0), IOTA), 0.0);
        assert!((f_find(th(1.0), IOTA) - 0.5743491774985175).abs() < 1e-15);
        assert!(f_find(th(1e12), IOTA) > 1.0 - 1e-10);
    }

    #[test]
    fn rates_are_valid_probabilities_and_monotone() {
        // log-spaced grid; q strictly decreasing, f strictly increasing
        let mut prev_q = f64::INFINITY;
        let mut prev_f = -1.0;
        for i in 0..200 {
            let t = libm::pow(10.0, -4.0 + 8.0 * i as f64 / 199.0);
            let q = q_fill(th(t), IOTA);
            let f = f_find(th(t), IOTA);
            assert!(q > 0.0 && q <= 1.0, "q out of range at theta={t}");
            assert!((0.0..1.0).contains(&f), "f out of range at theta={t}");
            assert!(q < prev_q, "q not decreasing at theta={t}");
            assert!(f > prev_f, "f not increasing at theta={t}");
            prev_q = q;
            prev_f = f;
        }
    }

    #[test]
    fn meetings_homogeneous_degree_one() {
        for &(u, v) in &[(0.05, 0.03), (0.2, 0.01), (0.8, 0.9)] {
            let g = meetings(u, v, IOTA);
            for &s in &[0.5, 2.0, 10.0] {
                let gs = meetings(s * u, s * v, IOTA);
                assert!(
                    (gs - s * g).abs() <= 1e-15 * gs.abs().max(1.0),
                    "not degree-1 at ({u},{v}) scale {s}"
                );
            }
        }
    }

    #[test]
    fn beveridge_examples() {
        // lambda = f(theta) => U = 1/2
        let t = th(1.0);
        let f = f_find(t, IOTA);
        assert!((beveridge_u(f, t, IOTA) - 0.5).abs() < 1e-15);
        // theta = 0 => f = 0 => U = 1
        assert_eq!(beveridge_u(0.02, th(0.0), IOTA), 1.0);
        // lambda = 0.02136 with theta solving f(theta) = 0.4.
        // Root and quotient frozen from a scalar root-finder oracle:
        // theta = 0.54335999922986914, U = 0.050692994114296564.
        let theta_star = 0.543_359_999_229_869_14;
        assert!((f_find(th(theta_star), IOTA) - 0.4).abs() < 1e-12);
        let u = beveridge_u(0.02136, th(theta_star), IOTA);
        assert!((u - 0.050692994114296564).abs() < 1e-12);
    }

    #[test]
    fn negative_theta_rejected() {
        assert!(Tightness::new(-0.1).is_err());
        assert!(Tightness::new(f64::NAN).is_err());
    }
}
