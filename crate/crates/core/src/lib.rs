//! Numerical engine for a continuous-time general-equilibrium model of
//! bargained wages, search unemployment, and task automation.
//!
//! The economy produces with a CES aggregate over a task continuum split
//! between capital and labor. Wages come from an alternating-offers
//! bargaining protocol (individual or collective), the rate of return on
//! capital is a markup realized after sale, and the stationary equilibrium
//! is the fixed point of a damped contraction map over that rate. On top
//! of the steady-state solver the crate provides balanced-growth
//! feasibility diagnostics, saddle-path transition dynamics after permanent
//! parameter shocks, a quantal-response political game for the probability
//! of collective bargaining, and a rolling-steady-state calibration
//! pipeline that recovers the automation measure and worker mobility from
//! annual data.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the command
//! line front end live in the companion `powerecon-cli` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)`-style guards intentionally reject NaN alongside the sign;
// frozen oracle constants keep every digit the oracle printed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

extern crate alloc;

pub mod bargaining;
pub mod calibration;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod matching;
mod math;
pub mod params;
pub mod political;
pub mod production;
pub mod solve;

pub use error::Error;
pub use params::{
    InstitutionParams, MatchingParams, ModelParams, PreferenceParams, SteadyState, TechnologyParams,
};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
