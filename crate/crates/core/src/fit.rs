//! Sampling patches and fitting the pointwise relation Δ^III x = Λ x (+ B).
//!
//! A surface has coordinate functions of finite Chen type 1 with respect to
//! the third form exactly when a single constant 3×3 matrix Λ reproduces
//! Δ^III x at every point. We test that numerically: sample the chart, apply
//! the operator, solve the overdetermined linear system for Λ by least
//! squares, and look at the worst normalized residual. The affine mode adds
//! a constant column B, which absorbs translations of the surface
//! (Δ^III x is translation invariant while x is not).

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::GeomError;
use crate::operators::{delta3_position, OperatorSample, Tolerances};
use crate::surface::{parabolic_guard, ParamPoint, SurfacePatch};

/// Above this condition number of the design matrix the normal equations
/// lose roughly half the mantissa; switch to an SVD solve.
const COND_SWITCH: f64 = 1e8;

/// Relative singular-value cutoff for rank decisions.
const RANK_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// Δ^III x = Λ x (9 unknowns, needs ≥ 6 samples).
    Strict,
    /// Δ^III x = Λ x + B (12 unknowns, needs ≥ 8 samples).
    Affine,
}

impl FitMode {
    fn unknowns(&self) -> usize {
        match self {
            FitMode::Strict => 3,
            FitMode::Affine => 4,
        }
    }

    fn min_samples(&self) -> usize {
        match self {
            FitMode::Strict => 6,
            FitMode::Affine => 8,
        }
    }
}

/// Result of the least-squares fit.
#[derive(Debug, Clone)]
pub struct LambdaFit {
    pub lambda: Matrix3<f64>,
    /// Present in affine mode only.
    pub translation: Option<Vector3<f64>>,
    /// max_i |y_i − Λ x_i − B| / (1 + |y_i|)
    pub residual_max: f64,
    /// Root mean square of the normalized residuals.
    pub residual_rms: f64,
    pub n_samples: usize,
    pub mode: FitMode,
    /// Condition number of the design matrix.
    pub condition: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    /// Λ ≈ 0: coordinates are harmonic for the third form (minimal surfaces).
    NullType,
    /// Λ ≈ 2·I: the sphere signature.
    SphereType,
    /// A consistent constant Λ exists but matches neither special pattern.
    GeneralLambda,
    /// No constant Λ reproduces Δ^III x on this patch.
    NotCoordinateFiniteType,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::NullType => "null-type",
            VerdictKind::SphereType => "sphere-type",
            VerdictKind::GeneralLambda => "general-lambda",
            VerdictKind::NotCoordinateFiniteType => "not-coordinate-finite-type",
        }
    }
}

impl std::str::FromStr for VerdictKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, GeomError> {
        match s {
            "null-type" => Ok(VerdictKind::NullType),
            "sphere-type" => Ok(VerdictKind::SphereType),
            "general-lambda" => Ok(VerdictKind::GeneralLambda),
            "not-coordinate-finite-type" => Ok(VerdictKind::NotCoordinateFiniteType),
            other => Err(GeomError::Config(format!(
                "unknown verdict '{other}' (expected null-type, sphere-type, \
                 general-lambda or not-coordinate-finite-type)"
            ))),
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub fit: LambdaFit,
    /// Threshold used for both residual acceptance and Λ-pattern matching.
    pub tau: f64,
}

/// Cell-center grid over the chart, filtered through the patch guard, the
/// immersion check and the parabolic guard. Fails when fewer than 6 points
/// survive — nothing useful can be fitted then.
pub fn sample_domain(
    surface: &SurfacePatch,
    n_u: usize,
    n_v: usize,
    tol: &Tolerances,
) -> Result<Vec<ParamPoint>, GeomError> {
    if n_u * n_v < 9 {
        return Err(GeomError::Config(format!(
            "sampling grid {n_u}x{n_v} has fewer than 9 cells"
        )));
    }
    let mut pts = Vec::new();
    for p in surface.domain.grid(n_u, n_v) {
        if let Some(g) = surface.guard() {
            if !g.admits(p, tol.eps_q) {
                continue;
            }
        }
        match surface.bundle_at(p) {
            Ok(b) if parabolic_guard(&b, tol.eps_k) => pts.push(p),
            _ => {}
        }
    }
    if pts.len() < 6 {
        return Err(GeomError::InsufficientSamples {
            got: pts.len(),
            need: 6,
            context: format!("guarded grid on '{}'", surface.name()),
        });
    }
    Ok(pts)
}

/// Random in-domain points surviving the same guards as [`sample_domain`].
/// Rejection sampling; gives up (returning what it has) after 200·n draws.
pub fn sample_random_guarded(
    surface: &SurfacePatch,
    n: usize,
    rng: &mut impl rand::Rng,
    tol: &Tolerances,
) -> Vec<ParamPoint> {
    let mut pts = Vec::with_capacity(n);
    // Margin keeps FD stencils of the operators inside the chart.
    let margin = 2.0 * tol.fd_step;
    let inner = surface.domain.shrunk(margin);
    for _ in 0..200 * n {
        if pts.len() == n {
            break;
        }
        let p = inner.sample(rng);
        if let Some(g) = surface.guard() {
            if !g.admits(p, tol.eps_q) {
                continue;
            }
        }
        if matches!(surface.bundle_at(p), Ok(b) if parabolic_guard(&b, tol.eps_k)) {
            pts.push(p);
        }
    }
    pts
}

/// Apply Δ^III at each point. Points whose FD stencil trips a guard are
/// dropped (they sit too close to the admissible boundary); hard errors
/// (domain, degeneracy of the chart itself) propagate.
pub fn collect_samples(
    surface: &SurfacePatch,
    points: &[ParamPoint],
    tol: &Tolerances,
) -> Result<Vec<OperatorSample>, GeomError> {
    let mut samples = Vec::with_capacity(points.len());
    for &p in points {
        match delta3_position(surface, p, tol) {
            Ok(s) => samples.push(s),
            Err(GeomError::SingularForm { .. }) | Err(GeomError::StencilOutsideDomain { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(samples)
}

/// Least-squares solve for Λ (and B in affine mode) from operator samples.
pub fn fit_lambda(samples: &[OperatorSample], mode: FitMode) -> Result<LambdaFit, GeomError> {
    let n = samples.len();
    if n < mode.min_samples() {
        return Err(GeomError::InsufficientSamples {
            got: n,
            need: mode.min_samples(),
            context: format!("{mode:?} fit"),
        });
    }
    let k = mode.unknowns();
    let m = DMatrix::from_fn(n, k, |i, j| {
        if j < 3 {
            samples[i].x[j]
        } else {
            1.0
        }
    });
    let y = DMatrix::from_fn(n, 3, |i, c| samples[i].value[c]);

    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let rank = svd.rank(smax * RANK_EPS);
    if rank < k {
        return Err(GeomError::RankDeficient { rank, need: k });
    }
    let condition = smax / smin;

    // All three ambient targets share the design matrix, so solve them as one
    // multi-column system.
    let sol = if condition <= COND_SWITCH {
        let mtm = m.transpose() * &m;
        let mty = m.transpose() * &y;
        match mtm.cholesky() {
            Some(chol) => chol.solve(&mty),
            None => svd
                .solve(&y, smax * RANK_EPS)
                .map_err(|e| GeomError::Config(format!("SVD solve failed: {e}")))?,
        }
    } else {
        svd.solve(&y, smax * RANK_EPS)
            .map_err(|e| GeomError::Config(format!("SVD solve failed: {e}")))?
    };

    let mut lambda = Matrix3::zeros();
    for c in 0..3 {
        for j in 0..3 {
            lambda[(c, j)] = sol[(j, c)];
        }
    }
    let translation = match mode {
        FitMode::Strict => None,
        FitMode::Affine => Some(Vector3::new(sol[(3, 0)], sol[(3, 1)], sol[(3, 2)])),
    };

    let b = translation.unwrap_or_else(Vector3::zeros);
    let mut max_r: f64 = 0.0;
    let mut sum_sq = 0.0;
    for s in samples {
        let r = (s.value - lambda * s.x - b).norm() / (1.0 + s.value.norm());
        max_r = max_r.max(r);
        sum_sq += r * r;
    }

    Ok(LambdaFit {
        lambda,
        translation,
        residual_max: max_r,
        residual_rms: (sum_sq / n as f64).sqrt(),
        n_samples: n,
        mode,
        condition,
    })
}

/// Decide the verdict from a fit: residuals first, then the Λ pattern.
pub fn classify(fit: LambdaFit, tau: f64) -> Verdict {
    let kind = if fit.residual_max >= tau {
        VerdictKind::NotCoordinateFiniteType
    } else if fit.lambda.amax() < tau {
        VerdictKind::NullType
    } else if (fit.lambda - Matrix3::identity() * 2.0).amax() < tau {
        VerdictKind::SphereType
    } else {
        VerdictKind::GeneralLambda
    };
    Verdict { kind, fit, tau }
}

/// Grid-sample a patch, apply Δ^III, fit and classify in one call.
pub fn fit_surface(
    surface: &SurfacePatch,
    n_u: usize,
    n_v: usize,
    mode: FitMode,
    tol: &Tolerances,
) -> Result<Verdict, GeomError> {
    let pts = sample_domain(surface, n_u, n_v, tol)?;
    let samples = collect_samples(surface, &pts, tol)?;
    let fit = fit_lambda(&samples, mode)?;
    Ok(classify(fit, tol.tau))
}
