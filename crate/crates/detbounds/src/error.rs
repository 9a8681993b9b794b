use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series tail could not be certified below tolerance within {max_terms} terms")]
    NonConvergent { max_terms: usize },

    #[error("matrix entry ({i},{j}) is negative; a nonnegative matrix is required")]
    NotNonnegative { i: usize, j: usize },

    #[error("order {n} exceeds the supported limit {limit}")]
    OrderTooLarge { n: usize, limit: usize },

    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("row {i} is not strictly diagonally dominant (h_{i} = {h})")]
    NotDiagonallyDominant { i: usize, h: String },

    #[error("hypothesis violated: {detail}")]
    HypothesisViolated { detail: String },

    #[error("no skew-Hadamard construction applies to order {n} (tried: {tried})")]
    Unconstructible { n: usize, tried: String },

    #[error("order {n} is invalid: skew-Hadamard orders above 2 are multiples of 4")]
    InvalidOrder { n: usize },

    #[error("the closed form is not a polynomial for odd order {n} > 1")]
    NotPolynomial { n: usize },

    #[error("search exceeded the configured deadline; partial results are unusable")]
    Timeout,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
