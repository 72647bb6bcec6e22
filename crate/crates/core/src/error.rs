use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A site index was outside `1..=n_sites`.
    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    /// Two operator arguments addressed the same site.
    #[error("two-site operator applied to identical sites ({0}, {0})")]
    CoincidentSites(usize),
    /// Chain length exceeds what dense state vectors support.
    #[error("chain of {0} sites exceeds the supported maximum of {max}", max = crate::tensor::MAX_SITES)]
    ChainTooLarge(usize),
    /// A basis index had bits outside the chain.
    #[error("basis index {index:#x} out of range for {n_sites} sites")]
    IndexOutOfRange { index: usize, n_sites: usize },
    /// Two states or parameter lists that must agree in size did not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// A weight denominator phi(t + eta) fell below the singularity guard.
    #[error("spectral parameter sits on a weight pole: |phi(t + eta)| = {0:.3e}")]
    PoleProximity(f64),
    /// eta itself is degenerate: phi(eta) vanishes, so every exchange weight would.
    #[error("degenerate anisotropy: |phi(eta)| = {0:.3e}")]
    DegenerateEta(f64),
    /// Parameters that must stay apart (denominators, Vandermonde factors) collided.
    #[error("coincident parameters in {context}: separation {separation:.3e}")]
    CoincidentParameters {
        context: &'static str,
        separation: f64,
    },
    /// Operation requires pairwise distinct inhomogeneities but the chain is (partly) homogeneous.
    #[error("{0} requires pairwise distinct inhomogeneities")]
    HomogeneousChain(&'static str),
    /// Iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// Two roots of a candidate solution collapsed onto each other.
    #[error("root collision: minimal separation {0:.3e}")]
    RootCollision(f64),
    /// A linear solve met a numerically singular matrix.
    #[error("singular linear system in {0}")]
    SingularSystem(&'static str),
    /// A state with zero norm where a normalized quantity was requested.
    #[error("state has zero norm")]
    ZeroNorm,
    /// Problem size exceeds a safety cap.
    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    /// Catch-all for invalid argument combinations.
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
