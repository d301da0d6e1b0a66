//! Randomized algebraic properties. Everything here must hold for *any*
//! admissible input, so inputs are drawn by proptest instead of being
//! pinned; failures shrink to a minimal counterexample. Finite-difference
//! heavy properties run with reduced case counts to keep the suite quick.

use delta3::catalog;
use delta3::fd::{deriv1, deriv2, deriv_mixed};
use delta3::operators::{laplace_beltrami, nabla, FormSelector, ScalarField};
use delta3::quadric::Quadric1Params;
use delta3::ruled::{chebyshev_nodes, vandermonde_fit, TPoly};
use delta3::surface::{ParamPoint, SurfacePatch, SymTensor2};
use delta3::Tolerances;
use nalgebra::Vector3;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

/// One of the four closed-form catalog families with randomized parameters.
fn catalog_surface() -> impl Strategy<Value = SurfacePatch> {
    prop_oneof![
        (0.5..3.0f64).prop_map(|r| catalog::sphere(r, Vector3::zeros())),
        ((0.5..2.0f64), (-1.0..1.0f64)).prop_map(|(c5, lam)| catalog::helicoid(c5, lam)),
        (0.7..2.0f64).prop_map(catalog::catenoid),
        ((0.5..2.0f64), (0.5..2.0f64))
            .prop_map(|(a, b)| delta3::quadric::Quadric2Params::new(a, b).unwrap().surface()),
    ]
}

/// A point in the interior of the patch domain (barycentric draw with a
/// safety margin so FD stencils stay inside).
fn interior(surface: &SurfacePatch, tu: f64, tv: f64) -> ParamPoint {
    let d = surface.domain;
    ParamPoint::new(
        d.u0 + (d.u1 - d.u0) * (0.08 + 0.84 * tu),
        d.v0 + (d.v1 - d.v0) * (0.08 + 0.84 * tv),
    )
}

/// Symmetric positive form with controlled conditioning: off-diagonal set
/// as a correlation factor so the determinant stays safely positive.
fn spd_form() -> impl Strategy<Value = SymTensor2> {
    ((0.3..3.0f64), (0.3..3.0f64), (-0.9..0.9f64)).prop_map(|(f11, f22, rho)| SymTensor2 {
        f11,
        f12: rho * (f11 * f22).sqrt(),
        f22,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The form bundle is internally consistent at any guarded point:
    /// positive metric, unit normal, Cayley–Hamilton for the shape
    /// operator, and the determinant relation it implies.
    #[test]
    fn bundle_identities_hold_everywhere(
        surface in catalog_surface(),
        tu in 0.0..1.0f64,
        tv in 0.0..1.0f64,
    ) {
        let p = interior(&surface, tu, tv);
        let bundle = match surface.bundle_at(p) {
            Ok(b) => b,
            Err(_) => return Ok(()), // guard rejected the draw; nothing to assert
        };
        prop_assert!(bundle.g.f11 > 0.0 && bundle.g.det() > 0.0, "metric must be SPD");
        prop_assert!((bundle.n.norm() - 1.0).abs() < 1e-12, "normal must be unit");

        let (g, b, e, k, h) = (bundle.g, bundle.b, bundle.e, bundle.k, bundle.h);
        let scale = e.max_abs().max(g.max_abs()).max(1.0);
        let ch = SymTensor2 {
            f11: e.f11 - 2.0 * h * b.f11 + k * g.f11,
            f12: e.f12 - 2.0 * h * b.f12 + k * g.f12,
            f22: e.f22 - 2.0 * h * b.f22 + k * g.f22,
        };
        prop_assert!(ch.max_abs() / scale < 1e-10, "Cayley–Hamilton failed: {}", ch.max_abs());
        prop_assert!(
            (e.det() - k * k * g.det()).abs() / (scale * scale) < 1e-10,
            "det III must equal K² det I"
        );
    }

    /// The first-order bracket ∇(φ, ψ) is symmetric and linear in each
    /// slot for any positive form.
    #[test]
    fn nabla_is_symmetric_and_bilinear(
        form in spd_form(),
        dphi in prop::array::uniform2(-2.0..2.0f64),
        dchi in prop::array::uniform2(-2.0..2.0f64),
        dpsi in prop::array::uniform2(-2.0..2.0f64),
        c in -3.0..3.0f64,
    ) {
        let n_pp = nabla(&form, dphi, dpsi).unwrap();
        let n_ps = nabla(&form, dpsi, dphi).unwrap();
        prop_assert!((n_pp - n_ps).abs() <= 1e-12 * n_pp.abs().max(1.0), "bracket must be symmetric");

        let combined = [dphi[0] + c * dchi[0], dphi[1] + c * dchi[1]];
        let lhs = nabla(&form, combined, dpsi).unwrap();
        let rhs = n_pp + c * nabla(&form, dchi, dpsi).unwrap();
        prop_assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
            "bracket must be linear: {lhs} vs {rhs}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Δ is linear: Δ(αφ + βψ) = αΔφ + βΔψ, checked with the full FD
    /// kernel on the unit sphere.
    #[test]
    fn laplacian_is_linear(
        coeffs_phi in prop::array::uniform3(-2.0..2.0f64),
        coeffs_psi in prop::array::uniform2(-2.0..2.0f64),
        alpha in -2.0..2.0f64,
        beta in -2.0..2.0f64,
        tu in 0.0..1.0f64,
        tv in 0.0..1.0f64,
    ) {
        let surface = catalog::sphere(1.0, Vector3::zeros());
        let p = interior(&surface, tu, tv);
        let phi = ScalarField::poly(vec![
            vec![coeffs_phi[0], coeffs_phi[1]],
            vec![coeffs_phi[2]],
        ]);
        let psi = ScalarField::poly(vec![vec![coeffs_psi[0]], vec![0.0, coeffs_psi[1]]]);
        let combo = ScalarField::linear_combination(vec![
            (alpha, phi.clone()),
            (beta, psi.clone()),
        ]);
        for form in [FormSelector::First, FormSelector::Third] {
            let d_phi = laplace_beltrami(&surface, form, &phi, p, &tol()).unwrap();
            let d_psi = laplace_beltrami(&surface, form, &psi, p, &tol()).unwrap();
            let d_combo = laplace_beltrami(&surface, form, &combo, p, &tol()).unwrap();
            let expected = alpha * d_phi + beta * d_psi;
            prop_assert!(
                (d_combo - expected).abs() <= 1e-7 * expected.abs().max(1.0),
                "linearity broke: {d_combo} vs {expected}"
            );
        }
    }

    /// Constants are annihilated by Δ for any form and surface.
    #[test]
    fn constants_are_annihilated(
        surface in catalog_surface(),
        value in -5.0..5.0f64,
        tu in 0.0..1.0f64,
        tv in 0.0..1.0f64,
    ) {
        let p = interior(&surface, tu, tv);
        let field = ScalarField::constant(value);
        for form in [FormSelector::First, FormSelector::Third] {
            match laplace_beltrami(&surface, form, &field, p, &tol()) {
                Ok(v) => prop_assert!(
                    v.abs() < 1e-9 * value.abs().max(1.0),
                    "Δ(const) must vanish, got {v}"
                ),
                Err(_) => return Ok(()), // guard rejected the stencil
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Construction trims trailing zeros without changing the function.
    #[test]
    fn tpoly_trim_preserves_evaluation(
        base in prop::collection::vec(-4.0..4.0f64, 1..7),
        zeros in 0usize..3,
        t in -2.0..2.0f64,
    ) {
        let mut padded = base.clone();
        padded.extend(std::iter::repeat(0.0).take(zeros));
        let poly = TPoly::new(padded.clone());

        // Horner on the untrimmed vector is the reference.
        let mut reference = 0.0;
        for &c in padded.iter().rev() {
            reference = reference * t + c;
        }
        prop_assert!((poly.eval(t) - reference).abs() <= 1e-12 * reference.abs().max(1.0));
        prop_assert_eq!(poly.coeff(padded.len() + 3), 0.0, "coefficients past the end are zero");
    }

    /// Fitting point samples of a polynomial returns its coefficients.
    #[test]
    fn vandermonde_recovers_polynomials(
        coeffs in prop::collection::vec(-3.0..3.0f64, 1..6),
    ) {
        let poly = TPoly::new(coeffs.clone());
        let nodes = chebyshev_nodes(0.7, 2.1, 9);
        let values: Vec<f64> = nodes.iter().map(|&t| poly.eval(t)).collect();
        let fitted = vandermonde_fit(&nodes, &values, coeffs.len() - 1).unwrap();
        prop_assert!(
            fitted.max_coeff_diff(&poly) < 1e-7,
            "fit drifted by {}",
            fitted.max_coeff_diff(&poly)
        );
    }

    /// The difference stencils reproduce exact derivatives of cubics.
    #[test]
    fn stencils_match_cubic_derivatives(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        c in -2.0..2.0f64,
        d in -2.0..2.0f64,
        x in -1.0..1.0f64,
    ) {
        let f = |x: f64| a + b * x + c * x * x + d * x * x * x;
        let h = 1e-4;
        let d1 = deriv1(f, x, h);
        let d2 = deriv2(f, x, h);
        let exact1 = b + 2.0 * c * x + 3.0 * d * x * x;
        let exact2 = 2.0 * c + 6.0 * d * x;
        prop_assert!((d1 - exact1).abs() < 1e-7 * exact1.abs().max(1.0));
        prop_assert!((d2 - exact2).abs() < 1e-4 * exact2.abs().max(1.0));

        let g = move |x: f64, y: f64| a * x + b * y + c * x * y + d * x * x * y * y;
        let dm = deriv_mixed(g, x, 0.3, h);
        let exact_m = c + 4.0 * d * x * 0.3;
        prop_assert!((dm - exact_m).abs() < 1e-6 * exact_m.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The six exact identities of the central family hold at any valid
    /// chart point for any ball-like parameter triple.
    #[test]
    fn central_quadric_identities_hold(
        a in -2.5..-0.4f64,
        b in -2.5..-0.4f64,
        c in 0.6..3.0f64,
        tu in 0.0..1.0f64,
        tv in 0.0..1.0f64,
    ) {
        let params = Quadric1Params::new(a, b, c).unwrap();
        let d = params.default_domain();
        let u = d.u0 + (d.u1 - d.u0) * tu;
        let v = d.v0 + (d.v1 - d.v0) * tv;
        prop_assume!(params.in_domain(u, v));
        let (ba, bb, bc) = params.aux_abc(u, v);
        let scale = ba.abs().max(bb.abs()).max(bc.abs()).max(1.0);
        for (i, r) in params.identities(u, v).into_iter().enumerate() {
            prop_assert!(
                r.abs() / scale < 1e-10,
                "identity {} residual {} at ({}, {})",
                i + 1, r, u, v
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Curvatures are invariant under the linear reparametrization
    /// (u, v) ↦ (u + cv, v) for any admissible shear.
    #[test]
    fn shear_preserves_curvatures(
        surface in catalog_surface(),
        shear in -0.7..0.7f64,
        tu in 0.0..1.0f64,
        tv in 0.0..1.0f64,
    ) {
        let sheared = surface.sheared_chart(shear);
        let q = interior(&sheared, tu, tv);
        let p = ParamPoint::new(q.u + shear * q.v, q.v);
        prop_assume!(surface.domain.contains(p));
        let b0 = match surface.bundle_at(p) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        let b1 = sheared.bundle_at(q).unwrap();
        prop_assert!(
            (b0.k - b1.k).abs() <= 1e-9 * b0.k.abs().max(1.0),
            "Gauss curvature moved under shear: {} vs {}",
            b0.k, b1.k
        );
        prop_assert!(
            (b0.h - b1.h).abs() <= 1e-9 * b0.h.abs().max(1.0),
            "mean curvature moved under shear: {} vs {}",
            b0.h, b1.h
        );
    }
}
