use thiserror::Error;

use crate::graph::Violation;

/// Errors raised by graph construction, spectral computation and evolution.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unbound parameter {0}")]
    UnboundParameter(String),

    #[error("invalid graph: {}", format_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("vertex degree must be at least 1")]
    ZeroDegree,

    #[error("root refinement failed on k-interval [{lo}, {hi}] (sigma_min = {sigma:e})")]
    RefinementFailure { lo: f64, hi: f64, sigma: f64 },

    #[error("interpolated secular polynomial has unstable degree (leading coefficient {leading:e})")]
    DegenerateLeadingCoefficient { leading: f64 },

    #[error("secular polynomial degree {degree} exceeds the configured limit")]
    LatticeTooLarge { degree: usize },

    #[error("{0} did not converge")]
    NoConvergence(String),

    #[error("edge lengths are not rationally dependent within tolerance")]
    NotRational,

    #[error("spectrum covers {available} eigenvalues but {requested} were requested; increase k_max")]
    InsufficientRange { requested: usize, available: usize },

    #[error("spectral gap vanishes (lambda_1 = {0:e})")]
    ZeroGap(f64),

    #[error("move policy yields no legal candidate")]
    NoLegalMove,

    #[error("every candidate failed: {0}")]
    AllCandidatesFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
