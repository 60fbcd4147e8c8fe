//! Core algorithms for studying correlations of the divisor error term and
//! second moments of partial sums of convolved periodic multiplicative
//! functions.
//!
//! The crate is organized around five areas:
//!
//! - [`arith`], [`exact`], [`mf`], [`convolve`]: exact multiplicative
//!   machinery (factorization, Gaussian-rational values, the validated
//!   class of periodic multiplicative functions, Dirichlet convolution and
//!   the coefficient vector g = f1 * f2 * mu * mu);
//! - [`delta`]: the divisor summatory function, its error term, a segmented
//!   tau sieve and the truncated oscillating-series approximation;
//! - [`special`]: closed-form constants (zeta values, tau correlation sums,
//!   correlation limits, the second-moment limit);
//! - [`quadform`]: gcd/lcm-structured matrices, Sylvester certificates,
//!   diagonalization determinants and the conjugation identity for
//!   prime-power correlation matrices;
//! - [`moment`]: exact piecewise integration of correlation and
//!   second-moment integrals over [1, X] with deterministic chunked
//!   parallelism.
//!
//! [`selftest`] packages the acceptance checks so the test suite and the
//! CLI expose identical criteria.

pub mod arith;
pub mod convolve;
pub mod delta;
pub mod exact;
pub mod mf;
pub mod moment;
pub mod quadform;
pub mod selftest;
pub mod special;

pub use arith::{divisors, factorize, gcd, lcm, mu, tau, Factorization};
pub use convolve::{dirichlet_convolve, g_coefficients, CoefficientVector, ValueMap};
pub use delta::{
    delta, delta_or_zero, divisor_summatory, tau_segment, voronoi_delta, DeltaContext,
    TauSegment, TauStream, EULER_MASCHERONI,
};
pub use exact::ExactScalar;
pub use mf::{ConditionViolation, MultiplicativeFunction, PeriodicMF, Validation};
pub use moment::{
    convergence_report, correlation_integral, identity_check, second_moment_integral,
    theta_correlation, MomentParams, MomentSeries, ThetaKind,
};
pub use quadform::{
    build_conjugation, build_matrix, check_conjugation_identity, pd_certificate,
    pd_certificate_for_modulus, selberg_determinant, sylvester_pd, tensor_factor_check,
    ConjugationMatrix, DivisorClosedSet, GcdLcmMatrix, PdCertificate,
};
pub use special::{
    beta, correlation_limit, phi, phi_star, second_moment_limit, tau_correlation_partial,
    tau_correlation_sum, zeta, CorrelationConstant,
};

/// Errors across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot factorize 0")]
    ZeroFactorization,
    #[error("period must be positive")]
    InvalidPeriod,
    #[error("cannot parse rational {0:?}")]
    RationalParse(String),
    #[error("no value supplied for divisor {0}")]
    MissingDivisorValue(u64),
    #[error("{0}")]
    Validation(crate::mf::ValidationFailure),
    #[error("sieve range [{lo}, {hi}] outside [1, {cap}]")]
    SieveRange { lo: u64, hi: u64, cap: u64 },
    #[error("segment of {requested} entries exceeds budget of {budget}; use smaller segments")]
    SieveBudget { requested: u64, budget: u64 },
    #[error("error term requires x >= 1, got {0}")]
    DeltaDomain(f64),
    #[error("zeta requires s > 1 + 1e-6, got {0}")]
    ZetaDomain(f64),
    #[error("correlation sum requires gcd(c, d) = 1, got c={c}, d={d}")]
    NotCoprime { c: u64, d: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("second-moment limit must be positive, got {0}; this indicates an implementation bug")]
    NonPositiveLimit(f64),
    #[error("imaginary part {0:e} of the bilinear form exceeds 1e-10")]
    ResidualImaginary(f64),
    #[error("index set is not divisor closed: missing divisor {0}")]
    NotDivisorClosed(u64),
    #[error("index set is not product closed: missing products {0:?}")]
    NotProductClosed(Vec<u64>),
    #[error("matrix is not symmetric: |M[{i}][{j}] - M[{j}][{i}]| = {dev:e}")]
    NotSymmetric { i: usize, j: usize, dev: f64 },
    #[error("generating function violates p^(1/4) phi(p) in (0,1) at p={p}: {value}")]
    InadmissibleWeight { p: u64, value: f64 },
    #[error("no weight or split value supplied for {0}")]
    WeightUndefined(u64),
    #[error("conjugation needs dimension K >= 2, got {0}")]
    ConjugationDimension(usize),
    #[error("matrix identity deviates by {dev:e} at entry ({i}, {j})")]
    IdentityDeviation { i: usize, j: usize, dev: f64 },
    #[error("leading principal minor {index} is not positive: {value}")]
    NonPositiveMinor { index: usize, value: f64 },
    #[error("grid must be strictly increasing and within [1, {cap}]: {msg}")]
    BadGrid { cap: f64, msg: String },
    #[error("theta must be positive, got {0}")]
    ThetaDomain(f64),
    #[error("partial-sum identity deviates by {dev:e} at x = {x} (tolerance 1e-4)")]
    IdentityCheckFailed { x: f64, dev: f64 },
    #[error("convergence report needs at least 4 grid points with usable residuals")]
    DegenerateResiduals,
    #[error("scaled exact accumulation exceeded the integer range")]
    ExactOverflow,
}
