//! The verification battery: ten numbered checks covering every major
//! numerical claim this crate makes, from the sphere's Δ^III x = 2x
//! eigenvalue through the ruled closed forms to quadric classification.
//!
//! Each criterion is self-contained, seeded, and returns a pass/fail plus a
//! one-line detail; the `verify` CLI subcommand and the acceptance tests
//! both run through [`run_criterion`] so there is exactly one definition of
//! "does this kernel behave".

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog;
use crate::fit::{fit_surface, sample_random_guarded, FitMode, VerdictKind};
use crate::operators::{
    check_identity_eq2, delta3_position, laplace_beltrami, FormSelector, ScalarField, Tolerances,
};
use crate::quadric::{no_solution_witness, Quadric1Params, Quadric2Params};
use crate::report::CriterionReport;
use crate::ruled::{
    adjudicate_t1, chebyshev_nodes, coefficient_equations, helicoid_pair, probe_coefficients,
    q_closed_forms, q_poly, random_pair, ruled_invariants, ruled_surface, twisted_pair,
    CoeffVariant,
};
use crate::surface::{form_bundle, ParamPoint, SurfacePatch, Vec3};

/// Eigenvalue / matrix-entry agreement for the catalog surfaces.
const EIG_TOL: f64 = 1e-5;
/// Pointwise residual for the curvature-ratio identity.
const IDENTITY_TOL: f64 = 1e-5;
/// Relative coefficient agreement, probed vs closed.
const PROBE_REL_TOL: f64 = 1e-4;
/// Residual bound for the helicoid equation system.
const EQ_TOL: f64 = 1e-8;
/// Fits worse than this are confidently "no solution".
const SWEEP_RESIDUAL_MIN: f64 = 1e-3;
/// Relative tolerance for exact tensor identities.
const SUITE_REL_TOL: f64 = 1e-10;
/// Agreement across reparametrized charts.
const SHEAR_TOL: f64 = 1e-5;

/// Identifier and display name of one criterion.
#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "sphere-eigenvalue-two" },
    Criterion { id: 2, name: "helicoid-harmonic-coordinates" },
    Criterion { id: 3, name: "catenoid-harmonic-coordinates" },
    Criterion { id: 4, name: "curvature-ratio-identity" },
    Criterion { id: 5, name: "ruled-coefficient-reconstruction" },
    Criterion { id: 6, name: "helicoid-equation-system" },
    Criterion { id: 7, name: "central-quadric-classification" },
    Criterion { id: 8, name: "paraboloid-exclusion" },
    Criterion { id: 9, name: "tensor-identity-suite" },
    Criterion { id: 10, name: "shear-chart-invariance" },
];

fn name_of(id: u32) -> &'static str {
    CRITERIA
        .iter()
        .find(|c| c.id == id)
        .map(|c| c.name)
        .unwrap_or("unknown")
}

/// Run one criterion; failures inside the computation (not just threshold
/// misses) turn into failed reports with the error as detail.
pub fn run_criterion(id: u32, seed: u64) -> CriterionReport {
    let tol = Tolerances::default();
    let outcome = match id {
        1 => sphere_eigenvalue(&tol),
        2 => helicoid_null(&tol),
        3 => catenoid_null(&tol),
        4 => ratio_identity(&tol, seed),
        5 => ruled_reconstruction(&tol, seed),
        6 => helicoid_equations(),
        7 => central_sweep(&tol),
        8 => paraboloid_sweep(&tol),
        9 => tensor_suite(&tol, seed),
        10 => shear_invariance(&tol),
        other => Err(crate::GeomError::Config(format!(
            "no criterion with id {other} (valid: 1..=10)"
        ))),
    };
    match outcome {
        Ok((passed, detail)) => CriterionReport {
            id,
            name: name_of(id),
            passed,
            detail,
        },
        Err(e) => CriterionReport {
            id,
            name: name_of(id),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Run the full battery in order.
pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.id, seed)).collect()
}

type Outcome = Result<(bool, String), crate::GeomError>;

fn sphere_eigenvalue(tol: &Tolerances) -> Outcome {
    let mut worst_entry: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut all_sphere = true;
    for r in [0.5, 1.0, 2.0, 5.0] {
        let surface = catalog::sphere(r, Vec3::zeros());
        let verdict = fit_surface(&surface, 6, 6, FitMode::Strict, tol)?;
        worst_entry = worst_entry.max((verdict.fit.lambda - Matrix3::identity() * 2.0).amax());
        worst_residual = worst_residual.max(verdict.fit.residual_max);
        all_sphere &= verdict.kind == VerdictKind::SphereType;
    }
    let passed = all_sphere && worst_entry < EIG_TOL && worst_residual < EIG_TOL;
    Ok((
        passed,
        format!(
            "4 radii: worst |Λ−2I| {worst_entry:.2e}, worst residual {worst_residual:.2e}"
        ),
    ))
}

fn helicoid_null(tol: &Tolerances) -> Outcome {
    let mut worst_entry: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut all_null = true;
    let mut count = 0;
    for c5 in [0.5, 1.0, 2.0] {
        for lambda in [0.0, 1.0] {
            let surface = catalog::helicoid(c5, lambda);
            let verdict = fit_surface(&surface, 6, 6, FitMode::Strict, tol)?;
            worst_entry = worst_entry.max(verdict.fit.lambda.amax());
            worst_residual = worst_residual.max(verdict.fit.residual_max);
            all_null &= verdict.kind == VerdictKind::NullType;
            count += 1;
        }
    }
    let passed = all_null && worst_entry < EIG_TOL && worst_residual < EIG_TOL;
    Ok((
        passed,
        format!("{count} pitch/offset combinations: worst |Λ| {worst_entry:.2e}, worst residual {worst_residual:.2e}"),
    ))
}

fn catenoid_null(tol: &Tolerances) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all_null = true;
    for c in [1.0, 1.5] {
        let verdict = fit_surface(&catalog::catenoid(c), 6, 6, FitMode::Strict, tol)?;
        worst = worst
            .max(verdict.fit.lambda.amax())
            .max(verdict.fit.residual_max);
        all_null &= verdict.kind == VerdictKind::NullType;
    }
    Ok((
        all_null && worst < EIG_TOL,
        format!("2 scales: worst |Λ| / residual {worst:.2e}"),
    ))
}

fn ratio_identity(tol: &Tolerances, seed: u64) -> Outcome {
    let surfaces: Vec<SurfacePatch> = vec![
        catalog::sphere(1.0, Vec3::zeros()),
        catalog::helicoid(1.0, 0.0),
        catalog::catenoid(1.0),
        Quadric1Params::new(-1.0, -2.0, 1.0)?.surface(),
        Quadric2Params::new(1.0, 2.0)?.surface(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    let mut thin = Vec::new();
    for surface in &surfaces {
        let mut per_surface = 0;
        for p in sample_random_guarded(surface, 60, &mut rng, tol) {
            match check_identity_eq2(surface, p, tol) {
                Ok(residual) => {
                    worst = worst.max(residual);
                    checked += 1;
                    per_surface += 1;
                    if per_surface >= 25 {
                        break;
                    }
                }
                // Stencil clipped a guard boundary; the next draw will do.
                Err(_) => continue,
            }
        }
        if per_surface < 25 {
            thin.push(format!("{} ({per_surface})", surface.name()));
        }
    }
    let passed = thin.is_empty() && worst < IDENTITY_TOL;
    Ok((
        passed,
        if thin.is_empty() {
            format!(
                "{checked} guarded points ({} surfaces × ≥25), worst residual {worst:.2e}",
                surfaces.len()
            )
        } else {
            format!("under-sampled surfaces: {}", thin.join(", "))
        },
    ))
}

fn ruled_reconstruction(tol: &Tolerances, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
    let mut worst_rel: f64 = 0.0;
    let mut pairs_checked = 0;

    let check_pair = |pair: &crate::ruled::CurvePair, s0: f64| -> Result<f64, crate::GeomError> {
        let surface = ruled_surface(pair, (s0 - 0.3, s0 + 0.3), (0.6, 2.2))?;
        let nodes = chebyshev_nodes(0.7, 2.1, 8);
        let probed = probe_coefficients(&surface, s0, &nodes, tol)?;
        let closed = q_closed_forms(&ruled_invariants(pair, s0));
        let mut rel: f64 = 0.0;
        for ((_, p), (_, c)) in probed.as_array().iter().zip(closed.as_array().iter()) {
            rel = rel.max(p.max_coeff_diff(c) / c.max_abs_coeff().max(1.0));
        }
        Ok(rel)
    };

    worst_rel = worst_rel.max(check_pair(&twisted_pair(), 0.35)?);
    pairs_checked += 1;
    for _ in 0..5 {
        let pair = random_pair(&mut rng);
        worst_rel = worst_rel.max(check_pair(&pair, 0.0)?);
        pairs_checked += 1;
    }
    let all_ok = worst_rel < PROBE_REL_TOL;

    let adj = adjudicate_t1(&twisted_pair(), 0.35, tol)?;
    let adjudicated = adj.matched == Some(CoeffVariant::ThreeThree);
    let passed = all_ok && adjudicated;
    Ok((
        passed,
        format!(
            "{pairs_checked} pairs, worst relative coefficient deviation {worst_rel:.2e}; ambiguous t¹ term matched {}",
            adj.matched.map(|m| m.as_str()).unwrap_or("neither")
        ),
    ))
}

fn helicoid_equations() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c5, lam) in [(1.0, 0.0), (0.7, 0.4), (2.0, 1.0)] {
        let pair = helicoid_pair(c5, lam);
        for s in [0.2, 1.1] {
            let inv = ruled_invariants(&pair, s);
            let eqs =
                coefficient_equations(&inv, &pair.alpha(s), &pair.beta(s), &Matrix3::zeros());
            for e in &eqs {
                worst = worst.max(e.norm());
            }
        }
    }
    Ok((
        worst < EQ_TOL,
        format!("3 pitch/offset pairs × 2 stations × 6 equations, worst residual {worst:.2e}"),
    ))
}

fn central_sweep(tol: &Tolerances) -> Outcome {
    let values = [-1.0, -0.5, -2.0];
    let mut sphere_hits = 0;
    let mut rejected = 0;
    let mut misclassified = Vec::new();
    let mut weakest_rejection = f64::INFINITY;
    for a in values {
        for b in values {
            let q = Quadric1Params::new(a, b, 1.0)?;
            let report = no_solution_witness(&q.surface(), tol)?;
            let is_sphere_params = a == -1.0 && b == -1.0;
            match report.verdict.kind {
                VerdictKind::SphereType if is_sphere_params => sphere_hits += 1,
                VerdictKind::NotCoordinateFiniteType if !is_sphere_params => {
                    rejected += 1;
                    weakest_rejection = weakest_rejection.min(report.verdict.fit.residual_max);
                }
                other => misclassified.push(format!("(a={a}, b={b}) -> {}", other.as_str())),
            }
        }
    }
    let passed = sphere_hits == 1
        && rejected == 8
        && misclassified.is_empty()
        && weakest_rejection > SWEEP_RESIDUAL_MIN;
    Ok((
        passed,
        if misclassified.is_empty() {
            format!(
                "9 parameter pairs: 1 sphere, 8 rejected (weakest residual {weakest_rejection:.2e})"
            )
        } else {
            format!("misclassified: {}", misclassified.join("; "))
        },
    ))
}

fn paraboloid_sweep(tol: &Tolerances) -> Outcome {
    let values = [0.5, 1.0, 2.0];
    let mut rejected = 0;
    let mut weakest = f64::INFINITY;
    let mut coord_worst: f64 = 0.0;
    for a in values {
        for b in values {
            let q = Quadric2Params::new(a, b)?;
            let surface = q.surface();
            let report = no_solution_witness(&surface, tol)?;
            if report.verdict.kind == VerdictKind::NotCoordinateFiniteType {
                rejected += 1;
                weakest = weakest.min(report.verdict.fit.residual_max);
            }
            // Closed coordinate forms against the generic kernel.
            for p in [ParamPoint::new(0.3, -0.2), ParamPoint::new(-0.5, 0.4)] {
                let sample = delta3_position(&surface, p, tol)?;
                let (du, dv) = q.delta3_coords(p.u, p.v);
                let scale = sample.value.norm().max(1.0);
                coord_worst = coord_worst
                    .max((sample.value.x - du).abs() / scale)
                    .max((sample.value.y - dv).abs() / scale);
            }
        }
    }
    let passed = rejected == 9 && weakest > SWEEP_RESIDUAL_MIN && coord_worst < IDENTITY_TOL;
    Ok((
        passed,
        format!(
            "9/9 rejected (weakest residual {weakest:.2e}); closed coordinate forms within {coord_worst:.2e} of kernel"
        ),
    ))
}

fn tensor_suite(tol: &Tolerances, seed: u64) -> Outcome {
    let quad1 = Quadric1Params::new(-1.0, -2.0, 1.0)?;
    let quad2 = Quadric2Params::new(1.0, 2.0)?;
    let twisted = twisted_pair();
    let surfaces: Vec<SurfacePatch> = vec![
        catalog::sphere(1.2, Vec3::new(0.3, -0.2, 0.5)),
        catalog::helicoid(0.8, 0.3),
        catalog::catenoid(1.1),
        quad1.surface(),
        quad2.surface(),
        ruled_surface(&twisted, (0.1, 1.1), (0.6, 2.2))?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x09);
    let mut points_checked = 0usize;
    let mut worst_rel: f64 = 0.0;
    let mut worst_const: f64 = 0.0;
    for (idx, surface) in surfaces.iter().enumerate() {
        let pts = sample_random_guarded(surface, 100, &mut rng, tol);
        if pts.len() < 50 {
            return Ok((false, format!("only {} guarded points on '{}'", pts.len(), surface.name())));
        }
        for (i, &p) in pts.iter().enumerate() {
            let bundle = form_bundle(&surface.eval_jet(p)?)?;
            let scale = bundle.e.max_abs().max(bundle.g.max_abs()).max(1.0);
            // Cayley–Hamilton for the shape operator: e − 2H·b + K·g = 0.
            let ch = crate::surface::SymTensor2 {
                f11: bundle.e.f11 - 2.0 * bundle.h * bundle.b.f11 + bundle.k * bundle.g.f11,
                f12: bundle.e.f12 - 2.0 * bundle.h * bundle.b.f12 + bundle.k * bundle.g.f12,
                f22: bundle.e.f22 - 2.0 * bundle.h * bundle.b.f22 + bundle.k * bundle.g.f22,
            };
            worst_rel = worst_rel.max(ch.max_abs() / scale);
            // det e = K² det g.
            let det_dev =
                (bundle.e.det() - bundle.k * bundle.k * bundle.g.det()).abs() / scale.powi(2);
            worst_rel = worst_rel.max(det_dev);
            // Family-specific exact identities.
            if idx == 3 {
                let ids = quad1.identities(p.u, p.v);
                let (ba, bb, bc) = quad1.aux_abc(p.u, p.v);
                let s = ba.abs().max(bb.abs()).max(bc.abs()).max(1.0);
                for r in ids {
                    worst_rel = worst_rel.max(r.abs() / s);
                }
            }
            if idx == 5 {
                let inv = ruled_invariants(&twisted, p.u);
                let qv = q_poly(&inv).eval(p.v);
                let k_closed = -inv.a * inv.a / (qv * qv);
                worst_rel = worst_rel.max((bundle.k - k_closed).abs() / k_closed.abs());
            }
            // Constants are annihilated — checked sparsely, it needs the
            // full FD machinery.
            if i < 5 {
                let one = ScalarField::constant(1.0);
                for form in [FormSelector::First, FormSelector::Third] {
                    if let Ok(val) = laplace_beltrami(surface, form, &one, p, tol) {
                        worst_const = worst_const.max(val.abs());
                    }
                }
            }
            points_checked += 1;
        }
    }
    let passed = worst_rel < SUITE_REL_TOL && worst_const < 1e-9;
    Ok((
        passed,
        format!(
            "{points_checked} points over {} surfaces: worst identity deviation {worst_rel:.2e}, worst Δ(const) {worst_const:.2e}",
            surfaces.len()
        ),
    ))
}

fn shear_invariance(tol: &Tolerances) -> Outcome {
    let shear = 0.3;
    let surfaces = vec![
        catalog::sphere(1.0, Vec3::zeros()),
        catalog::helicoid(1.0, 0.5),
        catalog::catenoid(1.0),
        Quadric2Params::new(1.0, 2.0)?.surface(),
    ];
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    let mut thin = Vec::new();
    for original in &surfaces {
        let mut per_surface = 0usize;
        let sheared = original.sheared_chart(shear);
        let inner = sheared.domain.shrunk(5.0 * tol.fd_step);
        for q in inner.grid(3, 3) {
            let p = ParamPoint::new(q.u + shear * q.v, q.v);
            if !original.domain.contains(p) {
                continue;
            }
            if let Some(g) = original.guard() {
                if !g.admits(p, tol.eps_q) {
                    continue;
                }
            }
            let b0 = match original.bundle_at(p) {
                Ok(b) => b,
                Err(_) => continue,
            };
            let b1 = sheared.bundle_at(q)?;
            worst = worst.max((b0.k - b1.k).abs() / b0.k.abs().max(1.0));
            worst = worst.max((b0.h - b1.h).abs() / b0.h.abs().max(1.0));
            worst = worst.max((b0.n - b1.n).norm());
            let d0 = match delta3_position(original, p, tol) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let d1 = match delta3_position(&sheared, q, tol) {
                Ok(s) => s,
                Err(_) => continue,
            };
            worst = worst.max((d0.value - d1.value).norm() / d0.value.norm().max(1.0));
            compared += 1;
            per_surface += 1;
        }
        if per_surface < 3 {
            thin.push(original.name().to_string());
        }
    }
    let passed = compared >= 12 && thin.is_empty() && worst < SHEAR_TOL;
    let detail = if thin.is_empty() {
        format!("{compared} point pairs across {} charts, worst deviation {worst:.2e}", surfaces.len())
    } else {
        format!("under-sampled charts: {}", thin.join(", "))
    };
    Ok((passed, detail))
}
