use alloc::string::String;
use core::fmt;

/// Everything that can go wrong while validating parameters or solving.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain. Reports the first offending field.
    InvalidParam {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    /// Inputs outside the region where the operation is defined
    /// (e.g. the labor-only CES limit at m = 1 with sigma < 1).
    Degenerate(&'static str),
    /// Denominator vanishes (e.g. displacement fraction at m = 0).
    Singular(&'static str),
    /// Bargaining has no surplus to split: y_L <= b.
    SurplusExhausted { y_l: f64, b: f64 },
    /// The collective wage capitalizes the aggregate surplus over rho_tilde,
    /// which requires rho_tilde > 0.
    NonPositiveDiscount { rho_tilde: f64 },
    /// psi_n weights are 0/0 at t_w = theta = 0.
    UndefinedWeights,
    /// No capital stock delivers the required marginal product.
    NoCapitalSolution { required: f64, bound: f64 },
    /// Labor supply exceeds labor demand for every tightness.
    NoCrossing { gap_at_zero: f64 },
    /// An iterative solver ran out of iterations.
    NonConvergence {
        what: &'static str,
        iterations: u32,
        residual: f64,
    },
    /// The relative price of capital falls outside [q_min, q_max].
    RegionUndefined { q: f64, q_min: f64, q_max: f64 },
    /// A transition path left the economically meaningful domain.
    BlowUp {
        step: u32,
        t: f64,
        what: &'static str,
    },
    /// The unemployment target cannot be reached by any mobility in the bracket.
    UnattainableTarget {
        target: f64,
        reachable_lo: f64,
        reachable_hi: f64,
    },
    /// A data-driven estimate landed outside its admissible range.
    OutOfRange { what: &'static str, value: f64 },
    /// A required observation is absent from a data row.
    MissingDatum { column: &'static str, year: i32 },
    /// Unknown field name requested from a calibrated path.
    UnknownField(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParam {
                field,
                value,
                constraint,
            } => write!(f, "{field} must {constraint} (got {value})"),
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
            Error::Singular(what) => write!(f, "singular input: {what}"),
            Error::SurplusExhausted { y_l, b } => write!(
                f,
                "no bargaining surplus: marginal product of labor {y_l} does not exceed the outside option {b}"
            ),
            Error::NonPositiveDiscount { rho_tilde } => write!(
                f,
                "collective wage requires a positive effective discount rate (rho_tilde = {rho_tilde})"
            ),
            Error::UndefinedWeights => {
                write!(f, "psi_n weights undefined: t_w and theta are both zero")
            }
            Error::NoCapitalSolution { required, bound } => write!(
                f,
                "no capital stock attains the required marginal product {required} (attainable bound {bound})"
            ),
            Error::NoCrossing { gap_at_zero } => write!(
                f,
                "labor supply never crosses labor demand; wage gap at theta -> 0 is {gap_at_zero}"
            ),
            Error::NonConvergence {
                what,
                iterations,
                residual,
            } => write!(f, "{what} did not converge after {iterations} iterations (residual {residual})"),
            Error::RegionUndefined { q, q_min, q_max } => write!(
                f,
                "relative price of capital {q} outside the region domain [{q_min}, {q_max}]"
            ),
            Error::BlowUp { step, t, what } => write!(
                f,
                "economically unfeasible growth path: {what} at step {step} (t = {t} months)"
            ),
            Error::UnattainableTarget {
                target,
                reachable_lo,
                reachable_hi,
            } => write!(
                f,
                "unemployment target {target} outside the achievable range [{reachable_lo}, {reachable_hi}]"
            ),
            Error::OutOfRange { what, value } => {
                write!(f, "{what} out of range: {value}")
            }
            Error::MissingDatum { column, year } => {
                write!(f, "missing {column} observation for {year}")
            }
            Error::UnknownField(name) => write!(f, "unknown series field: {name}"),
        }
    }
}

impl core::error::Error for Error {}
