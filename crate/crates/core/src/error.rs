use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid fading profile: {0}")]
    InvalidProfile(String),

    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error {error:e})"
    )]
    NoConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("estimated Gram matrix is singular")]
    RankDeficient,

    #[error("unsupported QAM order {0} (expected 4, 16, 64 or 256)")]
    UnsupportedQam(u32),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
