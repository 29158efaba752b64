//! Outage probability of an IRS-assisted wireless link, computed four ways.
//!
//! The composite channel gain behind an N-element reflecting surface is a sum
//! of N independent Rayleigh-product terms, optionally plus one direct-link
//! Rayleigh term. Outage is the lower-tail CDF of that gain evaluated at a
//! threshold derived from the transmit SNR and the link geometry. This crate
//! computes that tail by four independent routes and cross-validates them:
//!
//! * [`chernoff`]: exponential upper bound, minimized over the tilt with
//!   gradient descent plus backtracking line search,
//! * [`saddlepoint`]: asymptotic CDF and PDF built from the saddlepoint of
//!   the log-Laplace transform, with the matching rate function,
//! * [`clt`]: Gaussian baseline from summed moments, accurate near the mean
//!   and deliberately untouched in the tail so its failure there is visible,
//! * [`montecarlo`]: seeded, partitionable simulation of the exact channel.
//!
//! Tail values reach 1e-8 and far below at high SNR, and several analytic
//! prefactors overflow on their own for moderate N, so probabilities are
//! carried in natural-log domain ([`LogProb`]) end to end; linear values
//! appear only at output boundaries.

pub mod chernoff;
pub mod cli;
pub mod clt;
pub mod laplace;
pub mod montecarlo;
pub mod saddlepoint;
pub mod specfun;
pub mod sysmodel;

pub use specfun::LogProb;

/// Which estimator produced a value. Labels match the CLI method names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Chernoff,
    Saddlepoint,
    SaddlepointLeading,
    Clt,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Chernoff => "chernoff",
            Method::Saddlepoint => "saddlepoint",
            Method::SaddlepointLeading => "saddlepoint-leading",
            Method::Clt => "clt",
            Method::MonteCarlo => "mc",
        }
    }
}

/// A tail probability in log domain, tagged with its producer and a validity
/// flag. Asymptotic formulas are only meaningful in part of the parameter
/// space; outside it `valid` is false and `log_prob` must not be trusted.
#[derive(Debug, Clone, Copy)]
pub struct TailValue {
    pub log_prob: LogProb,
    pub method: Method,
    pub valid: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("empty sequence passed to {op}")]
    EmptySequence { op: &'static str },
    #[error(
        "no positive-tilt saddlepoint: x/N = {ratio} is not below the mean per-element gain {mean}"
    )]
    SaddlepointAboveMean { ratio: f64, mean: f64 },
    #[error("adaptive quadrature did not reach tolerance {tol} within its refinement budget")]
    QuadratureBudget { tol: f64 },
    #[error("diversity fit needs at least two strictly increasing gamma_t points")]
    DegenerateCurve,
    #[error("outside the asymptotic validity region: need s < 2N/e, got s = {s} with N = {n}")]
    OutsideValidity { s: f64, n: u32 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
