//! Surface patches, order-2 jets and the three fundamental forms.
//!
//! A [`SurfacePatch`] bundles a chart domain with a closure producing the
//! order-2 jet (position plus first and second partials) of an immersion
//! x(u, v) into E^3. From a jet, [`form_bundle`] assembles the first form g,
//! the second form b with respect to n = x_u × x_v / |x_u × x_v|, the third
//! form e = b g⁻¹ b, and the curvatures K = det b / det g,
//! H = tr(g⁻¹ b) / 2. The sign of H (and of b) depends on the orientation of
//! the chart; K and e do not.

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::GeomError;
use crate::fd;

pub type Vec3 = Vector3<f64>;

/// |x_u × x_v| at or below this is treated as a failed immersion.
pub const IMMERSION_EPS: f64 = 1e-12;
/// det g at or below this is treated as a singular metric.
pub const METRIC_DET_EPS: f64 = 1e-14;

/// A point in the parameter chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub u: f64,
    pub v: f64,
}

impl ParamPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// Closed rectangular chart domain [u0, u1] × [v0, v1].
#[derive(Debug, Clone, Copy)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        assert!(u0 < u1 && v0 < v1, "empty domain [{u0},{u1}]x[{v0},{v1}]");
        Self { u0, u1, v0, v1 }
    }

    pub fn contains(&self, p: ParamPoint) -> bool {
        const SLACK: f64 = 1e-12;
        p.u >= self.u0 - SLACK
            && p.u <= self.u1 + SLACK
            && p.v >= self.v0 - SLACK
            && p.v <= self.v1 + SLACK
    }

    /// Cell-center grid: n_u × n_v points strictly inside the rectangle, so
    /// FD stencils of the default radius stay inside the domain.
    pub fn grid(&self, n_u: usize, n_v: usize) -> Vec<ParamPoint> {
        let du = (self.u1 - self.u0) / n_u as f64;
        let dv = (self.v1 - self.v0) / n_v as f64;
        let mut pts = Vec::with_capacity(n_u * n_v);
        for i in 0..n_u {
            for j in 0..n_v {
                pts.push(ParamPoint::new(
                    self.u0 + (i as f64 + 0.5) * du,
                    self.v0 + (j as f64 + 0.5) * dv,
                ));
            }
        }
        pts
    }

    /// Uniform random point in the rectangle.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> ParamPoint {
        ParamPoint::new(
            rng.random_range(self.u0..self.u1),
            rng.random_range(self.v0..self.v1),
        )
    }

    /// Shrink every side by `margin` (used to keep FD stencils interior).
    pub fn shrunk(&self, margin: f64) -> Domain {
        Domain::new(
            self.u0 + margin,
            self.u1 - margin,
            self.v0 + margin,
            self.v1 - margin,
        )
    }
}

/// Order-2 jet of the immersion at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct Jet2 {
    pub x: Vec3,
    pub x_u: Vec3,
    pub x_v: Vec3,
    pub x_uu: Vec3,
    pub x_uv: Vec3,
    pub x_vv: Vec3,
}

impl Jet2 {
    /// Unnormalized normal x_u × x_v.
    pub fn normal_raw(&self) -> Vec3 {
        self.x_u.cross(&self.x_v)
    }
}

/// Symmetric 2×2 tensor (a fundamental form evaluated at a point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor2 {
    pub f11: f64,
    pub f12: f64,
    pub f22: f64,
}

impl SymTensor2 {
    pub fn new(f11: f64, f12: f64, f22: f64) -> Self {
        Self { f11, f12, f22 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.f11 * self.f22 - self.f12 * self.f12
    }

    pub fn trace(&self) -> f64 {
        self.f11 + self.f22
    }

    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.f11, self.f12, self.f12, self.f22)
    }

    /// Inverse as a symmetric tensor; fails on numerically singular input.
    pub fn inverse(&self) -> Result<SymTensor2, GeomError> {
        let det = self.det();
        if det.abs() <= METRIC_DET_EPS {
            return Err(GeomError::SingularMetric { det });
        }
        Ok(SymTensor2::new(
            self.f22 / det,
            -self.f12 / det,
            self.f11 / det,
        ))
    }

    /// max_ij |f_ij|
    pub fn max_abs(&self) -> f64 {
        self.f11.abs().max(self.f12.abs()).max(self.f22.abs())
    }

    /// Entrywise max |self − other|.
    pub fn max_abs_diff(&self, other: &SymTensor2) -> f64 {
        (self.f11 - other.f11)
            .abs()
            .max((self.f12 - other.f12).abs())
            .max((self.f22 - other.f22).abs())
    }

    pub fn scale(&self, c: f64) -> SymTensor2 {
        SymTensor2::new(c * self.f11, c * self.f12, c * self.f22)
    }
}

/// Third fundamental form e = b g⁻¹ b.
///
/// For the unit sphere e = g; for a plane b = 0 and e = 0. At parabolic
/// points (det b = 0) e is degenerate but still well defined as long as g is
/// invertible.
pub fn third_form(g: &SymTensor2, b: &SymTensor2) -> Result<SymTensor2, GeomError> {
    let det = g.det();
    if det <= METRIC_DET_EPS {
        return Err(GeomError::SingularMetric { det });
    }
    let m = b.as_matrix() * g.as_matrix().try_inverse().expect("det checked") * b.as_matrix();
    // Exactly symmetric in exact arithmetic; average away the rounding skew.
    Ok(SymTensor2::new(
        m[(0, 0)],
        0.5 * (m[(0, 1)] + m[(1, 0)]),
        m[(1, 1)],
    ))
}

/// All three fundamental forms plus normal and curvatures at one point.
#[derive(Debug, Clone, Copy)]
pub struct FormBundle {
    pub g: SymTensor2,
    pub b: SymTensor2,
    pub e: SymTensor2,
    pub n: Vec3,
    pub k: f64,
    pub h: f64,
}

/// Assemble the full form bundle from a jet. Fails if the jet is not an
/// immersion or the metric is numerically singular.
pub fn form_bundle(jet: &Jet2) -> Result<FormBundle, GeomError> {
    let w = jet.normal_raw();
    let wn = w.norm();
    if wn <= IMMERSION_EPS {
        return Err(GeomError::DegenerateImmersion { norm: wn });
    }
    let n = w / wn;
    let g = SymTensor2::new(
        jet.x_u.dot(&jet.x_u),
        jet.x_u.dot(&jet.x_v),
        jet.x_v.dot(&jet.x_v),
    );
    let b = SymTensor2::new(jet.x_uu.dot(&n), jet.x_uv.dot(&n), jet.x_vv.dot(&n));
    let e = third_form(&g, &b)?;
    let det_g = g.det();
    let k = b.det() / det_g;
    let h = 0.5 * (g.f22 * b.f11 - 2.0 * g.f12 * b.f12 + g.f11 * b.f22) / det_g;
    Ok(FormBundle { g, b, e, n, k, h })
}

/// Gauss curvature guard: true when the point is safely away from the
/// parabolic locus, i.e. |K| > eps_k, so II and III are nondegenerate.
pub fn parabolic_guard(bundle: &FormBundle, eps_k: f64) -> bool {
    bundle.k.abs() > eps_k
}

/// Normal and its first partials, computed analytically from the jet:
/// with w = x_u × x_v, n_i = (w_i − n ⟨n, w_i⟩)/|w|.
pub fn gauss_map_jet(jet: &Jet2) -> Result<(Vec3, Vec3, Vec3), GeomError> {
    let w = jet.normal_raw();
    let wn = w.norm();
    if wn <= IMMERSION_EPS {
        return Err(GeomError::DegenerateImmersion { norm: wn });
    }
    let n = w / wn;
    let w_u = jet.x_uu.cross(&jet.x_v) + jet.x_u.cross(&jet.x_uv);
    let w_v = jet.x_uv.cross(&jet.x_v) + jet.x_u.cross(&jet.x_vv);
    let n_u = (w_u - n * n.dot(&w_u)) / wn;
    let n_v = (w_v - n * n.dot(&w_v)) / wn;
    Ok((n, n_u, n_v))
}

pub type JetFn = Arc<dyn Fn(ParamPoint) -> Jet2 + Send + Sync>;
pub type PositionFn = Arc<dyn Fn(ParamPoint) -> Vec3 + Send + Sync>;

/// Extra admissibility predicate attached to a patch, consulted when
/// sampling. Ruled patches guard the striction region via the value of
/// q = det g; other families use an arbitrary chart predicate.
#[derive(Clone)]
pub enum SampleGuard {
    /// Point admitted iff the guarded quantity stays ≥ eps_q.
    StrictionQ(Arc<dyn Fn(ParamPoint) -> f64 + Send + Sync>),
    /// Point admitted iff the predicate holds.
    Chart(Arc<dyn Fn(ParamPoint) -> bool + Send + Sync>),
}

impl SampleGuard {
    pub fn admits(&self, p: ParamPoint, eps_q: f64) -> bool {
        match self {
            SampleGuard::StrictionQ(f) => f(p) >= eps_q,
            SampleGuard::Chart(f) => f(p),
        }
    }
}

/// A parametric surface patch: named chart domain plus jet evaluator.
#[derive(Clone)]
pub struct SurfacePatch {
    name: String,
    pub domain: Domain,
    params: Vec<(String, f64)>,
    jet: JetFn,
    guard: Option<SampleGuard>,
}

impl std::fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl SurfacePatch {
    pub fn new(name: impl Into<String>, domain: Domain, jet: JetFn) -> Self {
        Self {
            name: name.into(),
            domain,
            params: Vec::new(),
            jet,
            guard: None,
        }
    }

    pub fn with_guard(mut self, guard: SampleGuard) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    /// Replace the display name (configs may override the family default).
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn guard(&self) -> Option<&SampleGuard> {
        self.guard.as_ref()
    }

    /// Evaluate the order-2 jet, checking the domain and the immersion
    /// condition.
    pub fn eval_jet(&self, p: ParamPoint) -> Result<Jet2, GeomError> {
        if !self.domain.contains(p) {
            return Err(GeomError::OutOfDomain { u: p.u, v: p.v });
        }
        let jet = (self.jet)(p);
        let norm = jet.normal_raw().norm();
        if norm <= IMMERSION_EPS {
            return Err(GeomError::DegenerateImmersion { norm });
        }
        Ok(jet)
    }

    /// Raw jet closure call: no domain or immersion checks. Scalar-field
    /// adapters use this at stencil points that the caller has already
    /// validated as a group.
    pub(crate) fn raw_jet(&self, p: ParamPoint) -> Jet2 {
        (self.jet)(p)
    }

    /// Jet evaluation without the domain check, for FD stencil interiors that
    /// have already been validated collectively.
    pub(crate) fn eval_jet_unchecked(&self, p: ParamPoint) -> Result<Jet2, GeomError> {
        let jet = (self.jet)(p);
        let norm = jet.normal_raw().norm();
        if norm <= IMMERSION_EPS {
            return Err(GeomError::DegenerateImmersion { norm });
        }
        Ok(jet)
    }

    pub fn position(&self, p: ParamPoint) -> Result<Vec3, GeomError> {
        Ok(self.eval_jet(p)?.x)
    }

    /// Full form bundle at a point.
    pub fn bundle_at(&self, p: ParamPoint) -> Result<FormBundle, GeomError> {
        form_bundle(&self.eval_jet(p)?)
    }

    /// Ambient rotation R·x. K and H are invariant; n rotates with R.
    /// `r` must be orthogonal with det +1 (not re-checked here).
    pub fn rotated(&self, r: Matrix3<f64>) -> SurfacePatch {
        let jet = Arc::clone(&self.jet);
        let new_jet: JetFn = Arc::new(move |p| {
            let j = jet(p);
            Jet2 {
                x: r * j.x,
                x_u: r * j.x_u,
                x_v: r * j.x_v,
                x_uu: r * j.x_uu,
                x_uv: r * j.x_uv,
                x_vv: r * j.x_vv,
            }
        });
        SurfacePatch {
            name: format!("{} (rotated)", self.name),
            domain: self.domain,
            params: self.params.clone(),
            jet: new_jet,
            guard: self.guard.clone(),
        }
    }

    /// Ambient translation x + t. Only the position entry of the jet moves.
    pub fn translated(&self, t: Vec3) -> SurfacePatch {
        let jet = Arc::clone(&self.jet);
        let new_jet: JetFn = Arc::new(move |p| {
            let mut j = jet(p);
            j.x += t;
            j
        });
        SurfacePatch {
            name: format!("{} (translated)", self.name),
            domain: self.domain,
            params: self.params.clone(),
            jet: new_jet,
            guard: self.guard.clone(),
        }
    }

    /// Chart reparametrization (u, v) ↦ (u + c·v, v). Geometric quantities
    /// (K, H, n, Δ of ambient functions) must be invariant under this; the
    /// new domain is the largest rectangle whose image stays inside the old
    /// one, so the old u-width must exceed |c| times the v-width.
    pub fn sheared_chart(&self, c: f64) -> SurfacePatch {
        let d = self.domain;
        let (u0, u1) = if c >= 0.0 {
            (d.u0 - c * d.v0, d.u1 - c * d.v1)
        } else {
            (d.u0 - c * d.v1, d.u1 - c * d.v0)
        };
        assert!(
            u0 < u1,
            "shear {c} leaves no admissible u-interval in [{}, {}]",
            d.u0,
            d.u1
        );
        let map = move |p: ParamPoint| ParamPoint::new(p.u + c * p.v, p.v);
        let jet = Arc::clone(&self.jet);
        let new_jet: JetFn = Arc::new(move |p| {
            let j = jet(map(p));
            Jet2 {
                x: j.x,
                x_u: j.x_u,
                x_v: j.x_u * c + j.x_v,
                x_uu: j.x_uu,
                x_uv: j.x_uu * c + j.x_uv,
                x_vv: j.x_uu * (c * c) + j.x_uv * (2.0 * c) + j.x_vv,
            }
        });
        let guard = self.guard.as_ref().map(|g| match g {
            SampleGuard::StrictionQ(f) => {
                let f = Arc::clone(f);
                SampleGuard::StrictionQ(Arc::new(move |p| f(map(p))))
            }
            SampleGuard::Chart(f) => {
                let f = Arc::clone(f);
                SampleGuard::Chart(Arc::new(move |p| f(map(p))))
            }
        });
        SurfacePatch {
            name: format!("{} (sheared chart)", self.name),
            domain: Domain::new(u0, u1, d.v0, d.v1),
            params: self.params.clone(),
            jet: new_jet,
            guard,
        }
    }
}

/// Build a jet evaluator from a bare position map by central differencing
/// (step `h`, one Richardson level). Intended for user-supplied surfaces
/// where analytic partials are unavailable; the resulting second partials
/// carry O(h⁴) truncation error.
pub fn fd_jet(position: PositionFn, h: f64) -> JetFn {
    Arc::new(move |p: ParamPoint| {
        let fu = |u: f64| position(ParamPoint::new(u, p.v));
        let fv = |v: f64| position(ParamPoint::new(p.u, v));
        let fuv = |u: f64, v: f64| position(ParamPoint::new(u, v));
        Jet2 {
            x: position(p),
            x_u: fd::deriv1(fu, p.u, h),
            x_v: fd::deriv1(fv, p.v, h),
            x_uu: fd::deriv2(fu, p.u, h),
            x_uv: fd::deriv_mixed(fuv, p.u, p.v, h),
            x_vv: fd::deriv2(fv, p.v, h),
        }
    })
}
