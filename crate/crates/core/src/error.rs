//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or verifying a flow.
#[derive(Debug, Clone, Error)]
pub enum StokesError {
    /// Spherical-harmonic index out of bounds (|m| > n or n < 0).
    #[error("invalid spherical-harmonic index n={n}, m={m}")]
    InvalidIndex { n: i64, m: i64 },

    /// Evaluation outside the mathematical domain (e.g. a singular radial
    /// profile at r = 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// Fluid parameters violate positivity or nu = mu/rho.
    #[error("invalid fluid parameters: {0}")]
    InvalidParams(String),

    /// A flow spec fails one of its defining balances.
    #[error("flow-spec validation failed: {0}")]
    Spec(String),

    /// The forcing contains a mode annihilated by the heat operator, so the
    /// particular-solution series does not exist.
    #[error("resonant forcing: {0}")]
    Resonance(String),

    /// A constructor precondition fails (non-heat-type input, nonzero initial
    /// divergence, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A 1/r pressure mode: its generating potential would need log r, which
    /// the separable mode family cannot represent.
    #[error("pressure contains a decaying monopole (1/r) mode with no representable potential")]
    Monopole,

    /// Nonzero spherically-symmetric content in r.V or r.(curl V); such flux
    /// is annihilated by the transverse operator and cannot be decomposed.
    #[error("monopole flux: {0}")]
    MonopoleFlux(String),

    /// Decomposition input is not divergence-free.
    #[error("field is not divergence-free: max |div V| = {max_div:.3e} exceeds {tol:.3e}")]
    NotDivergenceFree { max_div: f64, tol: f64 },

    /// Angular grid cannot resolve the requested band limit.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// Synthesis requested outside the tabulated radial nodes or times.
    #[error("extrapolation outside tabulated data: {0}")]
    Extrapolation(String),

    /// The candidate pressure gradient has a nonzero circulation: no
    /// single-valued pressure exists.
    #[error(
        "pressure gradient is path-dependent: closed-loop integral = {loop_integral:.9e} \
         (tolerance {tol:.3e})"
    )]
    PathDependence { loop_integral: f64, tol: f64 },

    /// Requested quadrature tolerance unreachable with the given node counts.
    #[error("quadrature budget too small: {0}")]
    QuadratureBudget(String),

    /// An exact operation would leave the separable mode family.
    #[error("not representable in the separable mode family: {0}")]
    Unrepresentable(String),

    /// Input file parsing / schema problems.
    #[error("input format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, StokesError>;
