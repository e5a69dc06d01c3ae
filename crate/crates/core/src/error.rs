use std::io;

/// Errors produced by the affine-group toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("modulus mismatch: (p={p1}, d={d1}) vs (p={p2}, d={d2})")]
    ModulusMismatch { p1: u32, d1: usize, p2: u32, d2: usize },

    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("matrix has determinant {det} mod {p}, expected 1")]
    NotUnimodular { det: u32, p: u32 },

    #[error("|SL_{d}(F_{p})| = {count} exceeds the enumeration cap {cap}")]
    EnumerationCap { d: usize, p: u32, count: u128, cap: u64 },

    #[error("group order {order} exceeds the indexing cap {cap}")]
    GroupOrderCap { order: u128, cap: u64 },

    #[error("product set reached {size} elements, above the cap {cap}")]
    ProductSetCap { size: usize, cap: usize },

    #[error("representation space of size {size} exceeds the cap {cap}")]
    SpaceTooLarge { size: usize, cap: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last change {delta:e})")]
    NonConvergence { iterations: usize, delta: f64 },

    #[error("input function is identically zero")]
    ZeroInput,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("dual-action consistency check failed: {0}")]
    Consistency(String),

    #[error("search exhausted: {0}")]
    Exhausted(String),

    #[error("bad SL enumeration cache file: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
