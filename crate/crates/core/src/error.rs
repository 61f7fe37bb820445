use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("evaluation point outside the certified convergence region: rho*|z| = {0}")]
    Divergence(f64),

    #[error("truncation tail is not certified for |z| = {0}")]
    Uncertified(f64),

    #[error("pole at z = {0}")]
    Pole(String),

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("solver did not converge after {0} iterations")]
    NotConverged(usize),

    #[error("weight vanishes at r0 = {0}")]
    ZeroDenominator(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
