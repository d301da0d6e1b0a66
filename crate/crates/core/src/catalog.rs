//! Built-in surface families with analytic order-2 jets.
//!
//! These are the reference patches the checks and the CLI operate on:
//! spheres (the only closed examples with Δ^III x = 2x), helicoids and the
//! catenoid (minimal, Δ^III x = 0), and polynomial Monge patches for
//! config-driven custom surfaces. Ruled surfaces built from curve pairs live
//! in [`crate::ruled`]; the two quadric families in [`crate::quadric`].

use std::sync::Arc;

use crate::surface::{Domain, Jet2, JetFn, ParamPoint, SampleGuard, SurfacePatch, Vec3};

/// Sphere of radius `r` centered at `center`, chart
/// x = center + r (cos u cos v, sin u cos v, sin v) away from the poles.
pub fn sphere(r: f64, center: Vec3) -> SurfacePatch {
    assert!(r > 0.0, "sphere radius must be positive, got {r}");
    let jet: JetFn = Arc::new(move |p: ParamPoint| {
        let (su, cu) = p.u.sin_cos();
        let (sv, cv) = p.v.sin_cos();
        Jet2 {
            x: center + r * Vec3::new(cu * cv, su * cv, sv),
            x_u: r * Vec3::new(-su * cv, cu * cv, 0.0),
            x_v: r * Vec3::new(-cu * sv, -su * sv, cv),
            x_uu: r * Vec3::new(-cu * cv, -su * cv, 0.0),
            x_uv: r * Vec3::new(su * sv, -cu * sv, 0.0),
            x_vv: r * Vec3::new(-cu * cv, -su * cv, -sv),
        }
    });
    SurfacePatch::new("sphere", Domain::new(0.15, 1.35, -0.55, 0.55), jet).with_params(vec![
        ("radius".into(), r),
        ("cx".into(), center.x),
        ("cy".into(), center.y),
        ("cz".into(), center.z),
    ])
}

/// Helicoid x(s, t) = ((λ+t) cos s, (λ+t) sin s, c5·s) with pitch c5 ≠ 0.
///
/// The parameter roles match the ruled-surface normalization: s is arclength
/// along the unit directrix circle β = (cos s, sin s, 0), t the ruling
/// parameter, and λ shifts the rulings off the striction curve.
pub fn helicoid(c5: f64, lambda: f64) -> SurfacePatch {
    helicoid_full(c5, lambda, Vec3::zeros())
}

/// Helicoid with an additional ambient offset:
/// x = (c2 + (λ+t) cos s, c4 + (λ+t) sin s, c5 s + c6),
/// offset = (c2, c4, c6).
pub fn helicoid_full(c5: f64, lambda: f64, offset: Vec3) -> SurfacePatch {
    assert!(c5 != 0.0, "helicoid pitch c5 must be nonzero");
    let jet: JetFn = Arc::new(move |p: ParamPoint| {
        let (ss, cs) = p.u.sin_cos();
        let t = lambda + p.v;
        Jet2 {
            x: Vec3::new(offset.x + t * cs, offset.y + t * ss, c5 * p.u + offset.z),
            x_u: Vec3::new(-t * ss, t * cs, c5),
            x_v: Vec3::new(cs, ss, 0.0),
            x_uu: Vec3::new(-t * cs, -t * ss, 0.0),
            x_uv: Vec3::new(-ss, cs, 0.0),
            x_vv: Vec3::zeros(),
        }
    });
    let q = move |p: ParamPoint| {
        let t = lambda + p.v;
        t * t + c5 * c5
    };
    SurfacePatch::new(
        "helicoid",
        Domain::new(0.0, std::f64::consts::PI, 0.5, 2.0),
        jet,
    )
    .with_guard(SampleGuard::StrictionQ(Arc::new(q)))
    .with_params(vec![("c5".into(), c5), ("lambda".into(), lambda)])
}

/// Catenoid x(u, v) = (c cosh(v/c) cos u, c cosh(v/c) sin u, v), c > 0.
/// Minimal (H ≡ 0), with K = −1 / (c² cosh⁴(v/c)).
pub fn catenoid(c: f64) -> SurfacePatch {
    assert!(c > 0.0, "catenoid waist radius must be positive, got {c}");
    let jet: JetFn = Arc::new(move |p: ParamPoint| {
        let (su, cu) = p.u.sin_cos();
        let ch = (p.v / c).cosh();
        let sh = (p.v / c).sinh();
        Jet2 {
            x: Vec3::new(c * ch * cu, c * ch * su, p.v),
            x_u: Vec3::new(-c * ch * su, c * ch * cu, 0.0),
            x_v: Vec3::new(sh * cu, sh * su, 1.0),
            x_uu: Vec3::new(-c * ch * cu, -c * ch * su, 0.0),
            x_uv: Vec3::new(-sh * su, sh * cu, 0.0),
            x_vv: Vec3::new(ch / c * cu, ch / c * su, 0.0),
        }
    });
    SurfacePatch::new("catenoid", Domain::new(0.1, 2.0, -0.8, 0.8), jet)
        .with_params(vec![("c".into(), c)])
}

/// Bivariate polynomial value and partials up to order 2.
/// `coeffs[j][k]` multiplies u^j v^k.
pub(crate) fn poly2_jet(coeffs: &[Vec<f64>], u: f64, v: f64) -> [f64; 6] {
    // Zero-coefficient monomials of negative degree: x^(−1) etc. never
    // contribute because the factor j·(j−1)… in front is already zero, so a
    // clamped power is safe.
    fn pw(x: f64, e: i32) -> f64 {
        if e < 0 {
            0.0
        } else {
            x.powi(e)
        }
    }
    let mut out = [0.0; 6]; // z, z_u, z_v, z_uu, z_uv, z_vv
    for (j, row) in coeffs.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (ji, ki) = (j as i32, k as i32);
            let (jf, kf) = (j as f64, k as f64);
            out[0] += c * pw(u, ji) * pw(v, ki);
            out[1] += c * jf * pw(u, ji - 1) * pw(v, ki);
            out[2] += c * kf * pw(u, ji) * pw(v, ki - 1);
            out[3] += c * jf * (jf - 1.0) * pw(u, ji - 2) * pw(v, ki);
            out[4] += c * jf * kf * pw(u, ji - 1) * pw(v, ki - 1);
            out[5] += c * kf * (kf - 1.0) * pw(u, ji) * pw(v, ki - 2);
        }
    }
    out
}

/// Monge patch z = Σ coeffs[j][k] u^j v^k over an explicit domain, with
/// analytic jets. This is the "custom" family driven from config files.
pub fn monge_polynomial(coeffs: Vec<Vec<f64>>, domain: Domain) -> SurfacePatch {
    let jet: JetFn = Arc::new(move |p: ParamPoint| {
        let [z, zu, zv, zuu, zuv, zvv] = poly2_jet(&coeffs, p.u, p.v);
        Jet2 {
            x: Vec3::new(p.u, p.v, z),
            x_u: Vec3::new(1.0, 0.0, zu),
            x_v: Vec3::new(0.0, 1.0, zv),
            x_uu: Vec3::new(0.0, 0.0, zuu),
            x_uv: Vec3::new(0.0, 0.0, zuv),
            x_vv: Vec3::new(0.0, 0.0, zvv),
        }
    });
    SurfacePatch::new("custom-grid", domain, jet)
}
