//! The two canonical quadric charts and their closed-form fundamental
//! tensors, auxiliary identities, and third-form Laplacians.
//!
//! Kind I is the central family z² − ax² − by² = c (abc ≠ 0) in the graph
//! chart x = (u, v, √ω) with ω = c + au² + bv²; all components rationalize
//! through the two polynomials ω and T = c + a(a+1)u² + b(b+1)v².
//! Kind II is the paraboloid z = (a/2)x² + (b/2)y² (a, b > 0).
//!
//! Everything closed-form in here is double-checked elsewhere against the
//! generic kernel (`surface::form_bundle`, `operators::laplace_beltrami`);
//! the closed forms exist so that the eigenfunction analysis — which
//! coordinates Δ^III can map into the span of {u, v, z} — can be read off
//! polynomially rather than numerically.

use std::sync::Arc;

use crate::error::GeomError;
use crate::fit::{classify, collect_samples, fit_lambda, sample_domain, FitMode, Verdict};
use crate::operators::{ScalarField, Tolerances};
use crate::surface::{Domain, Jet2, ParamPoint, SampleGuard, SurfacePatch, SymTensor2, Vec3};

/// ω and T must exceed this for a kind-I chart point to count as usable.
pub const CHART_EPS: f64 = 1e-3;

/// z² − ax² − by² = c with abc ≠ 0, chart x(u, v) = (u, v, √ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadric1Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeomError> {
        if a == 0.0 || b == 0.0 || c == 0.0 || !(a * b * c).is_finite() {
            return Err(GeomError::InvalidParams(format!(
                "central quadric needs a·b·c ≠ 0, got a={a}, b={b}, c={c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    /// ω(u, v) = c + au² + bv² (the squared height of the chart).
    pub fn omega(&self, u: f64, v: f64) -> f64 {
        self.c + self.a * u * u + self.b * v * v
    }

    /// T(u, v) = c + a(a+1)u² + b(b+1)v²; ω·det g = T and the unit normal
    /// carries 1/√T.
    pub fn t_aux(&self, u: f64, v: f64) -> f64 {
        self.c + self.a * (self.a + 1.0) * u * u + self.b * (self.b + 1.0) * v * v
    }

    /// True where the chart and its normal are healthy (ω, T > CHART_EPS).
    pub fn in_domain(&self, u: f64, v: f64) -> bool {
        self.omega(u, v) > CHART_EPS && self.t_aux(u, v) > CHART_EPS
    }

    /// A chart rectangle on which `in_domain` holds comfortably for the
    /// parameter signature at hand. Heuristic but deliberate: it avoids the
    /// coordinate axes (where the odd closed forms vanish identically and
    /// carry no fit information) and keeps ω bounded well away from 0.
    pub fn default_domain(&self) -> Domain {
        let (a, b, c) = (self.a, self.b, self.c);
        if c > 0.0 && a < 0.0 && b < 0.0 {
            // Ellipsoid-like: ω = c − |a|u² − |b|v² stays ≥ 0.55c on the
            // square below.
            let m = (0.45 * c / (a.abs() + b.abs())).sqrt();
            Domain::new(0.15 * m, m, 0.15 * m, m)
        } else if c < 0.0 && a > 0.0 {
            // ω needs au² to overcome |c|: push u past the waist.
            let u0 = ((c.abs() + 0.5) / a).sqrt();
            let u1 = ((c.abs() + 1.5) / a).sqrt();
            Domain::new(u0, u1, 0.1, 0.5)
        } else {
            Domain::new(0.1, 0.9, 0.1, 0.9)
        }
    }

    pub fn surface(&self) -> SurfacePatch {
        self.surface_on(self.default_domain())
    }

    pub fn surface_on(&self, domain: Domain) -> SurfacePatch {
        let q = *self;
        let jet = Arc::new(move |p: ParamPoint| {
            let (u, v) = (p.u, p.v);
            let w = q.omega(u, v);
            let sw = w.max(0.0).sqrt();
            // Guard against the sqrt edge: outside the chart the jet decays
            // to a degenerate immersion which eval_jet rejects.
            if sw <= 0.0 {
                return Jet2 {
                    x: Vec3::new(u, v, 0.0),
                    x_u: Vec3::zeros(),
                    x_v: Vec3::zeros(),
                    x_uu: Vec3::zeros(),
                    x_uv: Vec3::zeros(),
                    x_vv: Vec3::zeros(),
                };
            }
            let w32 = sw * w;
            Jet2 {
                x: Vec3::new(u, v, sw),
                x_u: Vec3::new(1.0, 0.0, q.a * u / sw),
                x_v: Vec3::new(0.0, 1.0, q.b * v / sw),
                x_uu: Vec3::new(0.0, 0.0, q.a * (q.c + q.b * v * v) / w32),
                x_uv: Vec3::new(0.0, 0.0, -q.a * q.b * u * v / w32),
                x_vv: Vec3::new(0.0, 0.0, q.b * (q.c + q.a * u * u) / w32),
            }
        });
        let qg = *self;
        SurfacePatch::new(
            format!("quadric1(a={},b={},c={})", self.a, self.b, self.c),
            domain,
            jet,
        )
        .with_params(vec![
            ("a".into(), self.a),
            ("b".into(), self.b),
            ("c".into(), self.c),
        ])
        .with_guard(SampleGuard::Chart(Arc::new(move |p: ParamPoint| {
            qg.in_domain(p.u, p.v)
        })))
    }

    /// Unit normal (−au, −bv, √ω)/√T of the chart orientation x_u × x_v.
    pub fn normal(&self, u: f64, v: f64) -> Vec3 {
        let st = self.t_aux(u, v).sqrt();
        Vec3::new(-self.a * u, -self.b * v, self.omega(u, v).sqrt()) / st
    }

    /// The three auxiliary polynomials (A, B, C) that rationalize the third
    /// fundamental tensor:
    /// A = (auv)² + (au²+c)² + a²u²ω,
    /// B = uv[c(a+b) + ab(u²+v²+ω)],
    /// C = (buv)² + (bv²+c)² + b²v²ω.
    pub fn aux_abc(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = self.omega(u, v);
        let big_a = (a * u * v).powi(2) + (a * u * u + c).powi(2) + a * a * u * u * w;
        let big_b = u * v * (c * (a + b) + a * b * (u * u + v * v + w));
        let big_c = (b * u * v).powi(2) + (b * v * v + c).powi(2) + b * b * v * v * w;
        (big_a, big_b, big_c)
    }

    /// Partial derivatives (A_u, A_v, B_u, B_v, C_u, C_v).
    pub fn aux_partials(&self, u: f64, v: f64) -> (f64, f64, f64, f64, f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = self.omega(u, v);
        let a_u =
            2.0 * a * a * u * v * v + 4.0 * a * u * (a * u * u + c) + 2.0 * a * a * u * w
                + 2.0 * a * a * a * u * u * u;
        let a_v = 2.0 * a * a * u * u * v + 2.0 * a * a * b * u * u * v;
        let d = c * (a + b) + a * b * (u * u + v * v + w);
        let b_u = v * d + 2.0 * a * b * u * u * v * (1.0 + a);
        let b_v = u * d + 2.0 * a * b * u * v * v * (1.0 + b);
        let c_u = 2.0 * b * b * u * v * v + 2.0 * a * b * b * u * v * v;
        let c_v =
            2.0 * b * b * u * u * v + 4.0 * b * v * (b * v * v + c) + 2.0 * b * b * v * w
                + 2.0 * b * b * b * v * v * v;
        (a_u, a_v, b_u, b_v, c_u, c_v)
    }

    /// The closed-form fundamental tensors (g, b, e) of the chart.
    pub fn forms(&self, u: f64, v: f64) -> (SymTensor2, SymTensor2, SymTensor2) {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = self.omega(u, v);
        let t = self.t_aux(u, v);
        let st = t.sqrt();
        let g = SymTensor2 {
            f11: 1.0 + (a * u) * (a * u) / w,
            f12: a * b * u * v / w,
            f22: 1.0 + (b * v) * (b * v) / w,
        };
        let bb = SymTensor2 {
            f11: a * (c + b * v * v) / (w * st),
            f12: -a * b * u * v / (w * st),
            f22: b * (c + a * u * u) / (w * st),
        };
        let (big_a, big_b, big_c) = self.aux_abc(u, v);
        let wt2 = w * t * t;
        let e = SymTensor2 {
            f11: a * a * big_c / wt2,
            f12: -a * b * big_b / wt2,
            f22: b * b * big_a / wt2,
        };
        (g, bb, e)
    }

    /// Residuals of the six polynomial identities that collapse the
    /// first-order part of the operator:
    ///
    /// 1. bA_u + aB_v = au[5ab(a+1)u² + 5ab(b+1)v² + c(3ab+5b+a)]
    /// 2. aC_v + bB_u = bv[5ab(a+1)u² + 5ab(b+1)v² + c(3ab+5a+b)]
    /// 3. uA + vB = [c + a(a+1)u² + a(b+1)v²]uω
    /// 4. uB + vC = [c + b(a+1)u² + b(b+1)v²]vω
    /// 5. (a+1)uA + (b+1)vB = u[c(a+1) + a(a+1)u² + a(b+1)v²]T
    /// 6. (b+1)vC + (a+1)uB = v[c(b+1) + b(a+1)u² + b(b+1)v²]T
    pub fn identities(&self, u: f64, v: f64) -> [f64; 6] {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = self.omega(u, v);
        let t = self.t_aux(u, v);
        let (big_a, big_b, big_c) = self.aux_abc(u, v);
        let (a_u, _a_v, b_u, b_v, _c_u, c_v) = self.aux_partials(u, v);
        let block1 = 5.0 * a * b * (a + 1.0) * u * u + 5.0 * a * b * (b + 1.0) * v * v;
        [
            b * a_u + a * b_v - a * u * (block1 + c * (3.0 * a * b + 5.0 * b + a)),
            a * c_v + b * b_u - b * v * (block1 + c * (3.0 * a * b + 5.0 * a + b)),
            u * big_a + v * big_b
                - (c + a * (a + 1.0) * u * u + a * (b + 1.0) * v * v) * u * w,
            u * big_b + v * big_c
                - (c + b * (a + 1.0) * u * u + b * (b + 1.0) * v * v) * v * w,
            (a + 1.0) * u * big_a + (b + 1.0) * v * big_b
                - u * (c * (a + 1.0) + a * (a + 1.0) * u * u + a * (b + 1.0) * v * v) * t,
            (b + 1.0) * v * big_c + (a + 1.0) * u * big_b
                - v * (c * (b + 1.0) + b * (a + 1.0) * u * u + b * (b + 1.0) * v * v) * t,
        ]
    }

    /// The second identity with its prefactor written `av` instead of
    /// `bv` — an easy transcription slip. It breaks the a ↔ b, u ↔ v
    /// symmetry with identity 1 and does not hold for a ≠ b; it is kept
    /// here only so a test can demonstrate the failure.
    pub fn identity2_av_variant(&self, u: f64, v: f64) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let (_, _, b_u, _, _, c_v) = self.aux_partials(u, v);
        let block1 = 5.0 * a * b * (a + 1.0) * u * u + 5.0 * a * b * (b + 1.0) * v * v;
        a * c_v + b * b_u - a * v * (block1 + c * (3.0 * a * b + 5.0 * a + b))
    }

    /// Closed forms of (Δ^III u, Δ^III v):
    /// Δ^III u = −(uT/c²)[3(a+1)u² + 3(b+1)v² + c(3b+a+2ab)/(ab)] and the
    /// v-counterpart with a and b exchanged in the constant block.
    pub fn delta3_coords(&self, u: f64, v: f64) -> (f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let t = self.t_aux(u, v);
        let quad = 3.0 * (a + 1.0) * u * u + 3.0 * (b + 1.0) * v * v;
        let du = -u * t / (c * c) * (quad + c * (3.0 * b + a + 2.0 * a * b) / (a * b));
        let dv = -v * t / (c * c) * (quad + c * (b + 3.0 * a + 2.0 * a * b) / (a * b));
        (du, dv)
    }

    /// Δ^III φ assembled from the closed operator coefficients (second
    /// order in b²A, 2abB, a²C; first order collapsed through the six
    /// identities' left sides). Needs φ's gradient and hessian; `h` is the
    /// step used if the hessian falls back to differences.
    pub fn operator(&self, phi: &ScalarField, u: f64, v: f64, h: f64) -> f64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = self.omega(u, v);
        let t = self.t_aux(u, v);
        let (big_a, big_b, big_c) = self.aux_abc(u, v);
        let (a_u, _a_v, b_u, b_v, _c_u, c_v) = self.aux_partials(u, v);
        let p = ParamPoint::new(u, v);
        let [pu, pv] = phi.grad(p);
        let [puu, puv, pvv] = phi.hessian(p, h);
        let abc2 = (a * b * c) * (a * b * c);
        let second =
            -t / abc2 * (b * b * big_a * puu + 2.0 * a * b * big_b * puv + a * a * big_c * pvv);
        let first_flat =
            -t / abc2 * (b * (b * a_u + a * b_v) * pu + a * (a * c_v + b * b_u) * pv);
        let first_omega = t / abc2
            * (a * b * b / w * (u * big_a + v * big_b) * pu
                + a * a * b / w * (u * big_b + v * big_c) * pv);
        let first_t = 1.0 / abc2
            * (a * b * b * ((a + 1.0) * u * big_a + (b + 1.0) * v * big_b) * pu
                + a * a * b * ((b + 1.0) * v * big_c + (a + 1.0) * u * big_b) * pv);
        second + first_flat + first_omega + first_t
    }
}

/// z = (a/2)x² + (b/2)y², a > 0, b > 0, chart x(u, v) = (u, v, z(u, v)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric2Params {
    pub a: f64,
    pub b: f64,
}

impl Quadric2Params {
    pub fn new(a: f64, b: f64) -> Result<Self, GeomError> {
        if !(a > 0.0 && b > 0.0) || !(a * b).is_finite() {
            return Err(GeomError::InvalidParams(format!(
                "paraboloid needs a > 0 and b > 0, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// det g = 1 + (au)² + (bv)².
    pub fn g_det(&self, u: f64, v: f64) -> f64 {
        1.0 + (self.a * u) * (self.a * u) + (self.b * v) * (self.b * v)
    }

    pub fn surface(&self) -> SurfacePatch {
        self.surface_on(Domain::new(-0.8, 0.8, -0.8, 0.8))
    }

    pub fn surface_on(&self, domain: Domain) -> SurfacePatch {
        let q = *self;
        let jet = Arc::new(move |p: ParamPoint| {
            let (u, v) = (p.u, p.v);
            Jet2 {
                x: Vec3::new(u, v, 0.5 * q.a * u * u + 0.5 * q.b * v * v),
                x_u: Vec3::new(1.0, 0.0, q.a * u),
                x_v: Vec3::new(0.0, 1.0, q.b * v),
                x_uu: Vec3::new(0.0, 0.0, q.a),
                x_uv: Vec3::zeros(),
                x_vv: Vec3::new(0.0, 0.0, q.b),
            }
        });
        SurfacePatch::new(
            format!("quadric2(a={},b={})", self.a, self.b),
            domain,
            jet,
        )
        .with_params(vec![("a".into(), self.a), ("b".into(), self.b)])
    }

    /// Closed-form (g, b, e); everything rationalizes through det g alone.
    pub fn forms(&self, u: f64, v: f64) -> (SymTensor2, SymTensor2, SymTensor2) {
        let (a, b) = (self.a, self.b);
        let gd = self.g_det(u, v);
        let sg = gd.sqrt();
        let g = SymTensor2 {
            f11: 1.0 + (a * u) * (a * u),
            f12: a * b * u * v,
            f22: 1.0 + (b * v) * (b * v),
        };
        let bb = SymTensor2 {
            f11: a / sg,
            f12: 0.0,
            f22: b / sg,
        };
        let e = SymTensor2 {
            f11: a * a / (gd * gd) * (1.0 + b * b * v * v),
            f12: -a * a * b * b / (gd * gd) * u * v,
            f22: b * b / (gd * gd) * (1.0 + a * a * u * u),
        };
        (g, bb, e)
    }

    /// (Δ^III u, Δ^III v) = (−2u·det g, −2v·det g).
    pub fn delta3_coords(&self, u: f64, v: f64) -> (f64, f64) {
        let gd = self.g_det(u, v);
        (-2.0 * u * gd, -2.0 * v * gd)
    }

    /// Δ^III φ from the closed coefficients:
    /// −g(1+a²u²)/a²·φ_uu − g(1+b²v²)/b²·φ_vv − 2uvg·φ_uv − 2ug·φ_u − 2vg·φ_v.
    pub fn operator(&self, phi: &ScalarField, u: f64, v: f64, h: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let gd = self.g_det(u, v);
        let p = ParamPoint::new(u, v);
        let [pu, pv] = phi.grad(p);
        let [puu, puv, pvv] = phi.hessian(p, h);
        -gd * (1.0 + a * a * u * u) / (a * a) * puu
            - gd * (1.0 + b * b * v * v) / (b * b) * pvv
            - 2.0 * u * v * gd * puv
            - 2.0 * u * gd * pu
            - 2.0 * v * gd * pv
    }
}

/// Either canonical quadric chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadricFamily {
    KindOne(Quadric1Params),
    KindTwo(Quadric2Params),
}

impl QuadricFamily {
    pub fn surface(&self) -> SurfacePatch {
        match self {
            QuadricFamily::KindOne(q) => q.surface(),
            QuadricFamily::KindTwo(q) => q.surface(),
        }
    }
}

/// One sample the fit could not explain, ranked by its relative residual.
#[derive(Debug, Clone, Copy)]
pub struct WitnessPoint {
    pub point: ParamPoint,
    pub residual: f64,
}

/// Verdict for a quadric patch plus the points that pin the verdict down.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub surface: String,
    pub verdict: Verdict,
    pub witnesses: Vec<WitnessPoint>,
}

/// Grid-sample the patch, fit the best strict Λ, and classify. When the
/// verdict is "no Λ works", the report carries the three points where the
/// best possible fit fails hardest — a finite, checkable certificate.
pub fn no_solution_witness(
    surface: &SurfacePatch,
    tol: &Tolerances,
) -> Result<WitnessReport, GeomError> {
    let pts = sample_domain(surface, 6, 6, tol)?;
    let samples = collect_samples(surface, &pts, tol)?;
    let fit = fit_lambda(&samples, FitMode::Strict)?;
    let lambda = fit.lambda;
    let mut ranked: Vec<WitnessPoint> = samples
        .iter()
        .map(|s| WitnessPoint {
            point: s.point,
            residual: (s.value - lambda * s.x).norm() / (1.0 + s.value.norm()),
        })
        .collect();
    ranked.sort_by(|p, q| q.residual.total_cmp(&p.residual));
    let verdict = classify(fit, tol.tau);
    let witnesses = if verdict.kind == crate::fit::VerdictKind::NotCoordinateFiniteType {
        ranked.truncate(3);
        ranked
    } else {
        Vec::new()
    };
    Ok(WitnessReport {
        surface: surface.name().to_string(),
        verdict,
        witnesses,
    })
}
