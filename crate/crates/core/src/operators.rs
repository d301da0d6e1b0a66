//! Beltrami operators with respect to a chosen fundamental form.
//!
//! For a nondegenerate symmetric form F = (F_ij) with inverse (F^ij) and
//! f = det F, the first operator is ∇^F(φ, ψ) = F^ij φ_i ψ_j and the second
//! (the Laplacian) is
//!
//! ```text
//! Δ^F φ = −(1/√|f|) ∂_j ( √|f| F^ij φ_i )
//! ```
//!
//! The leading minus sign makes Δ positive semidefinite on flat charts
//! (Δ = −∂²_u − ∂²_v for F = id), which is the convention under which the
//! position vector of an origin-centered unit sphere satisfies Δ^III x = 2x.
//!
//! The inner factor w^j = √|f| F^ij φ_i is evaluated analytically at stencil
//! points; only the outer divergence is taken numerically (central quotient
//! with one Richardson level, step [`Tolerances::fd_step`]).

use std::sync::Arc;

use crate::error::GeomError;
use crate::fd;
use crate::surface::{
    form_bundle, gauss_map_jet, parabolic_guard, FormBundle, ParamPoint, SurfacePatch, SymTensor2,
    Vec3,
};

/// Numerical guard levels and step sizes shared across the crate.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Parabolic guard: points with |K| ≤ eps_k are rejected for II/III.
    pub eps_k: f64,
    /// Ruled striction guard: points with q < eps_q are rejected.
    pub eps_q: f64,
    /// Classification threshold for residuals and Λ-pattern matching.
    pub tau: f64,
    /// Step of the outer central differences.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_k: 1e-6,
            eps_q: 1e-6,
            tau: 1e-4,
            fd_step: 1e-4,
        }
    }
}

/// Which fundamental form the operator is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormSelector {
    First,
    Second,
    Third,
}

impl FormSelector {
    pub fn pick(&self, bundle: &FormBundle) -> SymTensor2 {
        match self {
            FormSelector::First => bundle.g,
            FormSelector::Second => bundle.b,
            FormSelector::Third => bundle.e,
        }
    }

    /// II and III degenerate exactly on the parabolic locus K = 0; the first
    /// form needs no curvature guard.
    fn needs_parabolic_guard(&self) -> bool {
        !matches!(self, FormSelector::First)
    }
}

type ValueFn = Arc<dyn Fn(ParamPoint) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(ParamPoint) -> [f64; 2] + Send + Sync>;
type HessFn = Arc<dyn Fn(ParamPoint) -> [f64; 3] + Send + Sync>;

/// A scalar function on the chart together with its first partials
/// (and optionally second partials, used by closed-form operator checks).
#[derive(Clone)]
pub struct ScalarField {
    value: ValueFn,
    grad: GradFn,
    hess: Option<HessFn>,
}

impl ScalarField {
    pub fn new(value: ValueFn, grad: GradFn) -> Self {
        Self {
            value,
            grad,
            hess: None,
        }
    }

    pub fn with_hessian(mut self, hess: HessFn) -> Self {
        self.hess = Some(hess);
        self
    }

    /// Field from a bare value closure; the gradient falls back to central
    /// differences with step `h`.
    pub fn from_value_fd(value: ValueFn, h: f64) -> Self {
        let v = Arc::clone(&value);
        let grad: GradFn = Arc::new(move |p| {
            [
                fd::deriv1(|u| v(ParamPoint::new(u, p.v)), p.u, h),
                fd::deriv1(|vv| v(ParamPoint::new(p.u, vv)), p.v, h),
            ]
        });
        Self::new(value, grad)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Arc::new(move |_| c), Arc::new(|_| [0.0, 0.0]))
    }

    /// Polynomial field Σ coeffs[j][k] u^j v^k with analytic derivatives.
    pub fn poly(coeffs: Vec<Vec<f64>>) -> Self {
        let c1 = coeffs.clone();
        let c2 = coeffs.clone();
        let value: ValueFn = Arc::new(move |p| crate::catalog::poly2_jet(&coeffs, p.u, p.v)[0]);
        let grad: GradFn = Arc::new(move |p| {
            let j = crate::catalog::poly2_jet(&c1, p.u, p.v);
            [j[1], j[2]]
        });
        let hess: HessFn = Arc::new(move |p| {
            let j = crate::catalog::poly2_jet(&c2, p.u, p.v);
            [j[3], j[4], j[5]]
        });
        Self::new(value, grad).with_hessian(hess)
    }

    /// The ambient coordinate function x_axis restricted to the surface.
    pub fn coordinate(surface: &SurfacePatch, axis: usize) -> Self {
        assert!(axis < 3);
        let s1 = surface.clone();
        let s2 = surface.clone();
        let value: ValueFn = Arc::new(move |p| s1.raw_jet(p).x[axis]);
        let grad: GradFn = Arc::new(move |p| {
            let j = s2.raw_jet(p);
            [j.x_u[axis], j.x_v[axis]]
        });
        Self::new(value, grad)
    }

    /// Component of the unit normal n as a function on the chart.
    ///
    /// Panics if evaluated where the immersion degenerates; operator code
    /// validates stencils (via the form bundle) before calling in.
    pub fn gauss_component(surface: &SurfacePatch, axis: usize) -> Self {
        assert!(axis < 3);
        let s1 = surface.clone();
        let s2 = surface.clone();
        let value: ValueFn = Arc::new(move |p| {
            let (n, _, _) = gauss_map_jet(&s1.raw_jet(p)).expect("immersion degenerated");
            n[axis]
        });
        let grad: GradFn = Arc::new(move |p| {
            let (_, n_u, n_v) = gauss_map_jet(&s2.raw_jet(p)).expect("immersion degenerated");
            [n_u[axis], n_v[axis]]
        });
        Self::new(value, grad)
    }

    /// Pointwise linear combination Σ cᵢ·fieldᵢ (derivatives included).
    pub fn linear_combination(terms: Vec<(f64, ScalarField)>) -> Self {
        let t1 = terms.clone();
        let t2 = terms.clone();
        let value: ValueFn = Arc::new(move |p| t1.iter().map(|(c, f)| c * f.value(p)).sum());
        let grad: GradFn = Arc::new(move |p| {
            let mut g = [0.0, 0.0];
            for (c, f) in &t2 {
                let d = f.grad(p);
                g[0] += c * d[0];
                g[1] += c * d[1];
            }
            g
        });
        let all_hess = terms.iter().all(|(_, f)| f.hess.is_some());
        let field = Self::new(value, grad);
        if all_hess {
            field.with_hessian(Arc::new(move |p| {
                let mut h = [0.0; 3];
                for (c, f) in &terms {
                    let hh = (f.hess.as_ref().unwrap())(p);
                    for i in 0..3 {
                        h[i] += c * hh[i];
                    }
                }
                h
            }))
        } else {
            field
        }
    }

    pub fn value(&self, p: ParamPoint) -> f64 {
        (self.value)(p)
    }

    pub fn grad(&self, p: ParamPoint) -> [f64; 2] {
        (self.grad)(p)
    }

    /// Second partials [φ_uu, φ_uv, φ_vv]: analytic when attached, otherwise
    /// central differences of the gradient with step `h`.
    pub fn hessian(&self, p: ParamPoint, h: f64) -> [f64; 3] {
        if let Some(hess) = &self.hess {
            return hess(p);
        }
        let gu = fd::deriv1(|u| self.grad(ParamPoint::new(u, p.v))[0], p.u, h);
        let gv = fd::deriv1(|v| self.grad(ParamPoint::new(p.u, v))[1], p.v, h);
        let guv = fd::deriv1(|v| self.grad(ParamPoint::new(p.u, v))[0], p.v, h);
        [gu, guv, gv]
    }
}

/// First Beltrami operator ∇^F(φ, ψ) = F^ij φ_i ψ_j from the differentials
/// of the two fields at a point.
pub fn nabla(form: &SymTensor2, dphi: [f64; 2], dpsi: [f64; 2]) -> Result<f64, GeomError> {
    let det = form.det();
    if det.abs() <= crate::surface::METRIC_DET_EPS {
        return Err(GeomError::SingularForm {
            det,
            reason: "first Beltrami operator on a degenerate form".into(),
        });
    }
    let inv = SymTensor2::new(form.f22 / det, -form.f12 / det, form.f11 / det);
    Ok(inv.f11 * dphi[0] * dpsi[0]
        + inv.f12 * (dphi[0] * dpsi[1] + dphi[1] * dpsi[0])
        + inv.f22 * dphi[1] * dpsi[1])
}

/// The flux vector w^j(q) = √|det F| F^ij φ_i at one stencil point.
fn flux(
    surface: &SurfacePatch,
    form: FormSelector,
    phi: &ScalarField,
    q: ParamPoint,
    tol: &Tolerances,
) -> Result<[f64; 2], GeomError> {
    let bundle = form_bundle(&surface.eval_jet_unchecked(q)?)?;
    if form.needs_parabolic_guard() && !parabolic_guard(&bundle, tol.eps_k) {
        return Err(GeomError::SingularForm {
            det: bundle.b.det(),
            reason: format!(
                "parabolic guard |K| = {:.3e} <= {:.1e} at ({:.6}, {:.6})",
                bundle.k.abs(),
                tol.eps_k,
                q.u,
                q.v
            ),
        });
    }
    let f = form.pick(&bundle);
    let det = f.det();
    if det.abs() <= crate::surface::METRIC_DET_EPS {
        return Err(GeomError::SingularForm {
            det,
            reason: format!("form degenerate at ({:.6}, {:.6})", q.u, q.v),
        });
    }
    let sq = det.abs().sqrt();
    let d = phi.grad(q);
    let inv = SymTensor2::new(f.f22 / det, -f.f12 / det, f.f11 / det);
    Ok([
        sq * (inv.f11 * d[0] + inv.f12 * d[1]),
        sq * (inv.f12 * d[0] + inv.f22 * d[1]),
    ])
}

/// Second Beltrami operator Δ^F φ at `p`.
///
/// The full FD stencil (offsets ±h, ±h/2 along each axis) must lie inside the
/// chart domain; for II/III every stencil point must also pass the parabolic
/// guard.
pub fn laplace_beltrami(
    surface: &SurfacePatch,
    form: FormSelector,
    phi: &ScalarField,
    p: ParamPoint,
    tol: &Tolerances,
) -> Result<f64, GeomError> {
    let h = tol.fd_step;
    for (du, dv) in [
        (0.0, 0.0),
        (h, 0.0),
        (-h, 0.0),
        (0.0, h),
        (0.0, -h),
    ] {
        if !surface
            .domain
            .contains(ParamPoint::new(p.u + du, p.v + dv))
        {
            return Err(GeomError::StencilOutsideDomain {
                u: p.u,
                v: p.v,
                radius: h,
            });
        }
    }

    // Trigger the guards once for p itself, then read √|det F| there.
    flux(surface, form, phi, p, tol)?;
    let bundle = form_bundle(&surface.eval_jet_unchecked(p)?)?;
    let sqf = form.pick(&bundle).det().abs().sqrt();

    let w_u = |du: f64| -> Result<f64, GeomError> {
        Ok(flux(surface, form, phi, ParamPoint::new(p.u + du, p.v), tol)?[0])
    };
    let w_v = |dv: f64| -> Result<f64, GeomError> {
        Ok(flux(surface, form, phi, ParamPoint::new(p.u, p.v + dv), tol)?[1])
    };

    // Central quotients at h and h/2, Richardson-combined.
    let d_u = {
        let coarse = (w_u(h)? - w_u(-h)?) * (0.5 / h);
        let fine = (w_u(h / 2.0)? - w_u(-h / 2.0)?) / h;
        (4.0 * fine - coarse) / 3.0
    };
    let d_v = {
        let coarse = (w_v(h)? - w_v(-h)?) * (0.5 / h);
        let fine = (w_v(h / 2.0)? - w_v(-h / 2.0)?) / h;
        (4.0 * fine - coarse) / 3.0
    };

    Ok(-(d_u + d_v) / sqf)
}

/// Δ^III applied to one position sample, with the pointwise invariants that
/// classification and reporting want alongside.
#[derive(Debug, Clone, Copy)]
pub struct OperatorSample {
    pub point: ParamPoint,
    /// Position x(p).
    pub x: Vec3,
    /// Δ^III x at p, componentwise.
    pub value: Vec3,
    pub k: f64,
    pub h_mean: f64,
    pub n: Vec3,
}

/// Apply Δ^III to all three coordinate functions at `p`.
pub fn delta3_position(
    surface: &SurfacePatch,
    p: ParamPoint,
    tol: &Tolerances,
) -> Result<OperatorSample, GeomError> {
    let jet = surface.eval_jet(p)?;
    let bundle = form_bundle(&jet)?;
    let mut value = Vec3::zeros();
    for axis in 0..3 {
        let phi = ScalarField::coordinate(surface, axis);
        value[axis] = laplace_beltrami(surface, FormSelector::Third, &phi, p, tol)?;
    }
    Ok(OperatorSample {
        point: p,
        x: jet.x,
        value,
        k: bundle.k,
        h_mean: bundle.h,
        n: bundle.n,
    })
}

/// Apply Δ^III to the components of the Gauss map at `p`. Since III is the
/// pullback of the round metric under n, the result equals 2n wherever n is
/// an immersion — a strong self-check of the whole operator pipeline.
pub fn delta3_gauss(
    surface: &SurfacePatch,
    p: ParamPoint,
    tol: &Tolerances,
) -> Result<Vec3, GeomError> {
    let mut value = Vec3::zeros();
    for axis in 0..3 {
        let phi = ScalarField::gauss_component(surface, axis);
        value[axis] = laplace_beltrami(surface, FormSelector::Third, &phi, p, tol)?;
    }
    Ok(value)
}

/// Residual of the structural identity
/// Δ^III x = ∇^III(2H/K, n) − (2H/K) n at `p` (Euclidean norm over the three
/// components). Both sides are computed through independent code paths: the
/// left by the generic Laplacian, the right from the curvature ratio field
/// and the analytic Gauss-map differential.
pub fn check_identity_eq2(
    surface: &SurfacePatch,
    p: ParamPoint,
    tol: &Tolerances,
) -> Result<f64, GeomError> {
    let lhs = delta3_position(surface, p, tol)?.value;

    let ratio = |q: ParamPoint| -> Result<f64, GeomError> {
        let b = form_bundle(&surface.eval_jet_unchecked(q)?)?;
        if !parabolic_guard(&b, tol.eps_k) {
            return Err(GeomError::SingularForm {
                det: b.b.det(),
                reason: format!("parabolic point in ratio stencil at ({:.6}, {:.6})", q.u, q.v),
            });
        }
        Ok(2.0 * b.h / b.k)
    };

    let h = tol.fd_step;
    // Fallible central quotient for the ratio gradient.
    let sample = |du: f64, dv: f64| ratio(ParamPoint::new(p.u + du, p.v + dv));
    let d_of = |a: f64, b: f64, c: f64, d: f64, h: f64| {
        let coarse = (a - b) * (0.5 / h);
        let fine = (c - d) / h;
        (4.0 * fine - coarse) / 3.0
    };
    let dr_u = d_of(
        sample(h, 0.0)?,
        sample(-h, 0.0)?,
        sample(h / 2.0, 0.0)?,
        sample(-h / 2.0, 0.0)?,
        h,
    );
    let dr_v = d_of(
        sample(0.0, h)?,
        sample(0.0, -h)?,
        sample(0.0, h / 2.0)?,
        sample(0.0, -h / 2.0)?,
        h,
    );

    let jet = surface.eval_jet(p)?;
    let bundle = form_bundle(&jet)?;
    let (n, n_u, n_v) = gauss_map_jet(&jet)?;
    let f = ratio(p)?;
    let mut rhs = Vec3::zeros();
    for axis in 0..3 {
        let grad_n = [n_u[axis], n_v[axis]];
        rhs[axis] = nabla(&bundle.e, [dr_u, dr_v], grad_n)? - f * n[axis];
    }
    Ok((lhs - rhs).norm())
}
