//! Quantal-response equilibrium of the worker-government 2x2 game.
//!
//! Workers choose collective vs individual bargaining, the government
//! chooses high vs low institutional support, and both respond with logit
//! precision to the expected payoff of each action given the other side's
//! mixing. The fixed point of the two logit maps gives the probability of
//! collective bargaining and of government support; a covariate `phi`
//! (the external political threat) shifts designated payoff cells.

use crate::error::Error;
use crate::math;
use crate::Result;
use alloc::vec::Vec;

/// Payoff structure with logit precisions. `u_w[j][i]` and `u_g[j][i]` are
/// indexed by government state `j` (0 = high support) and worker choice `i`
/// (0 = collective).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoliticalGame {
    pub u_w: [[f64; 2]; 2],
    pub u_g: [[f64; 2]; 2],
    pub lambda_w: f64,
    pub lambda_g: f64,
}

impl PoliticalGame {
    pub fn validate(&self) -> Result<()> {
        for row in self.u_w.iter().chain(self.u_g.iter()) {
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidParam {
                        field: "payoff",
                        value: v,
                        constraint: "be finite",
                    });
                }
            }
        }
        for (name, v) in [("lambda_w", self.lambda_w), ("lambda_g", self.lambda_g)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParam {
                    field: if name == "lambda_w" {
                        "lambda_w"
                    } else {
                        "lambda_g"
                    },
                    value: v,
                    constraint: "be non-negative and finite",
                });
            }
        }
        Ok(())
    }
}

/// Solved mixed-strategy equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QreSolution {
    /// Probability of collective bargaining, P(U = 1).
    pub p_union: f64,
    /// Probability of high government support, P(S = 1).
    pub p_support: f64,
    /// Final fixed-point residual (max over the two maps).
    pub residual: f64,
}

/// Logistic response `1 / (1 + e^(-x))`, overflow-safe at extreme precisions.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + math::exp(-x))
    } else {
        let e = math::exp(x);
        e / (1.0 + e)
    }
}

/// Worker logit response given the government's mixing.
fn worker_response(game: &PoliticalGame, p_support: f64) -> f64 {
    let e = |i: usize| p_support * game.u_w[0][i] + (1.0 - p_support) * game.u_w[1][i];
    sigmoid(game.lambda_w * (e(0) - e(1)))
}

/// Government logit response given the workers' mixing.
fn support_response(game: &PoliticalGame, p_union: f64) -> f64 {
    let e = |j: usize| p_union * game.u_g[j][0] + (1.0 - p_union) * game.u_g[j][1];
    sigmoid(game.lambda_g * (e(0) - e(1)))
}

const QRE_TOL: f64 = 1e-12;
const QRE_MAX_ITER: u32 = 10_000;

/// Solve the simultaneous logit fixed point by damped iteration from (0.5, 0.5).
pub fn solve_qre(game: &PoliticalGame) -> Result<QreSolution> {
    game.validate()?;
    let damping = 0.5;
    let (mut p, mut s) = (0.5, 0.5);
    let mut residual = f64::INFINITY;
    // short history for cycle detection at extreme precisions: the damped
    // map can revisit earlier points while the residual stays large
    let mut history = [(f64::NAN, f64::NAN); 8];
    for i in 0..QRE_MAX_ITER {
        let zp = worker_response(game, s);
        let zs = support_response(game, p);
        residual = math::abs(zp - p).max(math::abs(zs - s));
        if residual < QRE_TOL {
            return Ok(QreSolution {
                p_union: p,
                p_support: s,
                residual,
            });
        }
        if i > 100 && residual > 1e-6 {
            let revisited = history
                .iter()
                .any(|&(hp, hs)| math::abs(p - hp) < 1e-14 && math::abs(s - hs) < 1e-14);
            if revisited {
                return Err(Error::NonConvergence {
                    what: "quantal-response fixed point (cycling)",
                    iterations: i,
                    residual,
                });
            }
        }
        history[(i as usize) % history.len()] = (p, s);
        p += damping * (zp - p);
        s += damping * (zs - s);
    }
    Err(Error::NonConvergence {
        what: "quantal-response fixed point",
        iterations: QRE_MAX_ITER,
        residual,
    })
}

/// A game family indexed by the threat covariate: `payoff + slope * phi`
/// cell by cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatGame {
    pub base: PoliticalGame,
    /// phi-slopes added to the worker payoff cells.
    pub slope_w: [[f64; 2]; 2],
    /// phi-slopes added to the government payoff cells.
    pub slope_g: [[f64; 2]; 2],
}

impl ThreatGame {
    /// Instantiate the game at a covariate value.
    pub fn at(&self, phi: f64) -> PoliticalGame {
        let mut g = self.base;
        for j in 0..2 {
            for i in 0..2 {
                g.u_w[j][i] += self.slope_w[j][i] * phi;
                g.u_g[j][i] += self.slope_g[j][i] * phi;
            }
        }
        g
    }

    /// Reference threat-sweep parameterization: only the
    /// collective/high-support worker cell and the government's high-support
    /// row load on the covariate.
    pub fn reference() -> Self {
        ThreatGame {
            base: PoliticalGame {
                u_w: [[1.0, 1.0], [1.0, 1.0]],
                u_g: [[0.5, 0.3], [0.3, 0.5]],
                lambda_w: 6.0,
                lambda_g: 11.0,
            },
            slope_w: [[0.75, 0.0], [0.0, 0.0]],
            slope_g: [[0.5, 0.5], [0.0, 0.0]],
        }
    }
}

/// Joint outcome probabilities at one covariate value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub phi: f64,
    pub p_union: f64,
    pub p_support: f64,
    /// P(U=1) P(S=1), P(U=1) P(S=2), P(U=2) P(S=1), P(U=2) P(S=2).
    pub joint: [f64; 4],
    pub residual: f64,
}

/// Solve the equilibrium across a covariate grid.
pub fn threat_sweep(game: &ThreatGame, phi_grid: &[f64]) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let sol = solve_qre(&game.at(phi))?;
        let (p, s) = (sol.p_union, sol.p_support);
        out.push(SweepPoint {
            phi,
            p_union: p,
            p_support: s,
            joint: [p * s, p * (1.0 - s), (1.0 - p) * s, (1.0 - p) * (1.0 - s)],
            residual: sol.residual,
        });
    }
    Ok(out)
}
