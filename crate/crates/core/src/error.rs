//! Error type shared by the whole crate.
//!
//! Numerical guards (degenerate immersions, singular forms, parabolic points)
//! and usage errors (points outside the chart, under-determined fits, bad
//! configuration) all funnel into [`GeomError`] so that callers — in
//! particular the CLI — can distinguish "the surface genuinely fails the
//! check" from "the request never made sense".

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    /// The requested parameter point lies outside the patch domain.
    #[error("parameter point ({u}, {v}) is outside the chart domain")]
    OutOfDomain { u: f64, v: f64 },

    /// |x_u × x_v| fell below the immersion threshold: the map is not an
    /// immersion at this point (or the chart is broken).
    #[error("degenerate immersion: |x_u x x_v| = {norm:.3e}")]
    DegenerateImmersion { norm: f64 },

    /// det g is numerically zero; the first fundamental form cannot be
    /// inverted.
    #[error("singular metric: det g = {det:.3e}")]
    SingularMetric { det: f64 },

    /// The selected form is degenerate (for II/III that happens on the
    /// parabolic locus K = 0, where the third form collapses).
    #[error("singular form ({reason}): det = {det:.3e}")]
    SingularForm { det: f64, reason: String },

    /// A finite-difference stencil would step outside the chart domain.
    #[error("FD stencil of radius {radius:.3e} around ({u}, {v}) leaves the domain")]
    StencilOutsideDomain { u: f64, v: f64, radius: f64 },

    /// Too few usable sample points survived the guards for the requested fit.
    #[error("only {got} usable samples, need at least {need}: {context}")]
    InsufficientSamples {
        got: usize,
        need: usize,
        context: String,
    },

    /// The least-squares design matrix is rank deficient; Λ is not
    /// identifiable from these samples.
    #[error("rank-deficient fit: design matrix rank {rank} < {need}")]
    RankDeficient { rank: usize, need: usize },

    /// Polynomial reconstruction nodes are too close to collinear/coincident
    /// for a stable Vandermonde solve.
    #[error("ill-conditioned Vandermonde system (cond ~ {cond:.3e}) for degree {degree}")]
    IllConditionedVandermonde { degree: usize, cond: f64 },

    /// A ruled curve pair violates the normalization <a', b> = 0, |b| = 1,
    /// |b'| = 1 that the closed forms assume.
    #[error("curve pair normalization violated at s = {s}: {what} = {value:.3e}")]
    NormalizationViolated { s: f64, what: String, value: f64 },

    /// Surface parameters outside the family's admissible range
    /// (e.g. a quadric coefficient that must be nonzero).
    #[error("invalid surface parameters: {0}")]
    InvalidParams(String),

    /// Malformed run configuration (unknown family, missing keys, bad grid).
    #[error("configuration error: {0}")]
    Config(String),
}

impl GeomError {
    /// True for errors that indicate a bad request rather than a numerical
    /// finding about the surface. The CLI maps these to exit code 2.
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            GeomError::Config(_) | GeomError::InvalidParams(_)
        )
    }
}
