//! Ruled surfaces x(s, t) = α(s) + t·β(s) and the closed-form coefficient
//! polynomials of their third-form Laplacian.
//!
//! Everything here assumes the normalized frame
//!
//! ```text
//! ⟨α′, β⟩ = 0,    |β| = 1,    |β′| = 1,
//! ```
//!
//! under which the metric is diag(q, 1) with q = t² + 2λt + κ and the whole
//! operator Δ^III collapses to
//! Q1 ∂²_s + Q2 ∂²_st + Q3 ∂_s + Q4 ∂_t + Q5 ∂²_t, where the Q_i are
//! polynomials in t of degree ≤ 6 whose coefficients are built from six
//! scalar invariants of the curve pair (and their s-derivatives):
//!
//! ```text
//! κ = ⟨α′, α′⟩          λ = ⟨α′, β′⟩          A = (α′, β, β′)
//! μ = (β′, β, β″)       ν = (α′, β, β″) + (β′, β, α″)
//! ρ = (α′, β, α″)       q = t² + 2λt + κ      p = μt² + νt + ρ
//! ```
//!
//! The module provides both directions: evaluating the closed forms from the
//! invariants, and recovering the same polynomials numerically by probing
//! the generic Laplacian with monomial test functions — the two must agree
//! coefficient by coefficient, which is the strongest cross-check the crate
//! performs. One tabulated source of the t¹ equation disagrees with the
//! expansion it was derived from; [`adjudicate_t1`] settles that dispute by
//! measurement.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3};

use crate::error::GeomError;
use crate::fd;
use crate::operators::{laplace_beltrami, FormSelector, ScalarField, Tolerances};
use crate::surface::{Domain, Jet2, JetFn, ParamPoint, SampleGuard, SurfacePatch, Vec3};

/// Normalization residuals above this fail [`CurvePair::validate`].
pub const NORMALIZATION_EPS: f64 = 1e-10;

/// Step for s-derivatives of the invariants.
const INVARIANT_FD_STEP: f64 = 1e-4;

/// Condition-number limit for the polynomial reconstruction solve.
const VANDERMONDE_COND_MAX: f64 = 1e8;

/// Value and first two derivatives of a space curve at one parameter.
#[derive(Debug, Clone, Copy)]
pub struct CurveJet {
    pub value: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

pub type CurveFn = Arc<dyn Fn(f64) -> CurveJet + Send + Sync>;

/// Directrix α and unit ruling direction β defining a ruled surface.
#[derive(Clone)]
pub struct CurvePair {
    name: String,
    alpha: CurveFn,
    beta: CurveFn,
}

impl CurvePair {
    pub fn new(name: impl Into<String>, alpha: CurveFn, beta: CurveFn) -> Self {
        Self {
            name: name.into(),
            alpha,
            beta,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self, s: f64) -> CurveJet {
        (self.alpha)(s)
    }

    pub fn beta(&self, s: f64) -> CurveJet {
        (self.beta)(s)
    }

    /// Check the frame normalization ⟨α′, β⟩ = 0, |β| = 1, |β′| = 1 at the
    /// given parameters. The closed forms are meaningless without it.
    pub fn validate(&self, s_values: &[f64]) -> Result<(), GeomError> {
        for &s in s_values {
            let a = self.alpha(s);
            let b = self.beta(s);
            let checks = [
                ("<alpha', beta>", a.d1.dot(&b.value)),
                ("|beta| - 1", b.value.norm() - 1.0),
                ("|beta'| - 1", b.d1.norm() - 1.0),
            ];
            for (what, value) in checks {
                if value.abs() > NORMALIZATION_EPS {
                    return Err(GeomError::NormalizationViolated {
                        s,
                        what: what.into(),
                        value,
                    });
                }
            }
        }
        Ok(())
    }
}

fn triple(u: &Vec3, v: &Vec3, w: &Vec3) -> f64 {
    u.dot(&v.cross(w))
}

/// The six scalar invariants κ, λ, μ, ν, ρ, A of a normalized pair at one
/// parameter, together with their s-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct RuledInvariants {
    pub kappa: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub rho: f64,
    pub a: f64,
    pub dkappa: f64,
    pub dlambda: f64,
    pub dmu: f64,
    pub dnu: f64,
    pub drho: f64,
    pub da: f64,
}

fn raw_invariants(pair: &CurvePair, s: f64) -> [f64; 6] {
    let a = pair.alpha(s);
    let b = pair.beta(s);
    [
        a.d1.dot(&a.d1),
        a.d1.dot(&b.d1),
        triple(&b.d1, &b.value, &b.d2),
        triple(&a.d1, &b.value, &b.d2) + triple(&b.d1, &b.value, &a.d2),
        triple(&a.d1, &b.value, &a.d2),
        triple(&a.d1, &b.value, &b.d1),
    ]
}

/// Evaluate the invariants at `s`; the s-derivatives come from central
/// differences of the invariant values themselves (this implicitly
/// differentiates through β″ and α″ without needing third curve
/// derivatives analytically).
pub fn ruled_invariants(pair: &CurvePair, s: f64) -> RuledInvariants {
    let vals = raw_invariants(pair, s);
    let mut derivs = [0.0; 6];
    for (i, d) in derivs.iter_mut().enumerate() {
        *d = fd::deriv1(|ss| raw_invariants(pair, ss)[i], s, INVARIANT_FD_STEP);
    }
    RuledInvariants {
        kappa: vals[0],
        lambda: vals[1],
        mu: vals[2],
        nu: vals[3],
        rho: vals[4],
        a: vals[5],
        dkappa: derivs[0],
        dlambda: derivs[1],
        dmu: derivs[2],
        dnu: derivs[3],
        drho: derivs[4],
        da: derivs[5],
    }
}

/// Build the surface patch x(s, t) = α(s) + t·β(s) on the given ranges.
/// Validates the normalization up front and attaches a striction guard
/// rejecting points where q = det g falls under eps_q.
pub fn ruled_surface(
    pair: &CurvePair,
    s_range: (f64, f64),
    t_range: (f64, f64),
) -> Result<SurfacePatch, GeomError> {
    let probes: Vec<f64> = (0..9)
        .map(|i| s_range.0 + (s_range.1 - s_range.0) * i as f64 / 8.0)
        .collect();
    pair.validate(&probes)?;

    let p_alpha = pair.alpha.clone();
    let p_beta = pair.beta.clone();
    let jet: JetFn = Arc::new(move |p: ParamPoint| {
        let a = p_alpha(p.u);
        let b = p_beta(p.u);
        Jet2 {
            x: a.value + p.v * b.value,
            x_u: a.d1 + p.v * b.d1,
            x_v: b.value,
            x_uu: a.d2 + p.v * b.d2,
            x_uv: b.d1,
            x_vv: Vec3::zeros(),
        }
    });
    let g_alpha = pair.alpha.clone();
    let g_beta = pair.beta.clone();
    let q_of = move |p: ParamPoint| {
        let a = g_alpha(p.u);
        let b = g_beta(p.u);
        let kappa = a.d1.dot(&a.d1);
        let lambda = a.d1.dot(&b.d1);
        p.v * p.v + 2.0 * lambda * p.v + kappa
    };
    Ok(SurfacePatch::new(
        format!("ruled:{}", pair.name),
        Domain::new(s_range.0, s_range.1, t_range.0, t_range.1),
        jet,
    )
    .with_guard(SampleGuard::StrictionQ(Arc::new(q_of))))
}

/// Dense polynomial in t, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TPoly {
    coeffs: Vec<f64>,
}

impl TPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of t^k (0 beyond the stored degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    /// max_k |self_k − other_k| over the union of coefficient indices.
    pub fn max_coeff_diff(&self, other: &TPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).fold(0.0, |m: f64, k| m.max((self.coeff(k) - other.coeff(k)).abs()))
    }
}

/// q(t) = t² + 2λt + κ.
pub fn q_poly(inv: &RuledInvariants) -> TPoly {
    TPoly::new(vec![inv.kappa, 2.0 * inv.lambda, 1.0])
}

/// p(t) = μt² + νt + ρ.
pub fn p_poly(inv: &RuledInvariants) -> TPoly {
    TPoly::new(vec![inv.rho, inv.nu, inv.mu])
}

/// The five coefficient polynomials of
/// Δ^III = Q1 ∂²_s + Q2 ∂²_st + Q3 ∂_s + Q4 ∂_t + Q5 ∂²_t.
#[derive(Debug, Clone)]
pub struct CoeffPolys {
    pub q1: TPoly,
    pub q2: TPoly,
    pub q3: TPoly,
    pub q4: TPoly,
    pub q5: TPoly,
}

impl CoeffPolys {
    pub fn as_array(&self) -> [(&'static str, &TPoly); 5] {
        [
            ("Q1", &self.q1),
            ("Q2", &self.q2),
            ("Q3", &self.q3),
            ("Q4", &self.q4),
            ("Q5", &self.q5),
        ]
    }
}

/// Closed forms of Q1…Q5 from the invariants (expanded t-polynomials).
pub fn q_closed_forms(inv: &RuledInvariants) -> CoeffPolys {
    let RuledInvariants {
        kappa: k,
        lambda: l,
        mu,
        nu,
        rho: r,
        a,
        dkappa: dk,
        dlambda: dl,
        dmu,
        dnu,
        drho: dr,
        da,
    } = *inv;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);

    let q1 = TPoly::new(vec![-k / a2, -2.0 * l / a2, -1.0 / a2]);

    let q2 = TPoly::new(vec![
        2.0 * k * r / a3,
        2.0 * (2.0 * l * r + k * nu) / a3,
        2.0 * (2.0 * l * nu + r + k * mu) / a3,
        2.0 * (2.0 * l * mu + nu) / a3,
        2.0 * mu / a3,
    ]);

    let q3 = TPoly::new(vec![
        (0.5 * dk * a - l * r + k * nu) / a3,
        (l * nu - r + 2.0 * k * mu + dl * a) / a3,
        3.0 * l * mu / a3,
        mu / a3,
    ]);

    let q4 = TPoly::new(vec![
        (k * dr * a - k * r * da - 0.5 * dk * r * a + l * r * r - k * l * a2 - 2.0 * k * nu * r)
            / a4,
        (k * dnu * a - k * nu * da - 0.5 * dk * nu * a + 2.0 * l * dr * a - 2.0 * l * r * da
            - dl * r * a
            - k * a2
            - 2.0 * l * l * a2
            - 2.0 * k * nu * nu
            + r * r
            - 2.0 * l * nu * r
            - 4.0 * k * mu * r)
            / a4,
        (k * dmu * a - k * mu * da - 0.5 * dk * mu * a + 2.0 * l * dnu * a
            - 2.0 * l * nu * da
            - dl * nu * a
            - r * da
            + dr * a
            - 3.0 * l * a2
            - 3.0 * l * nu * nu
            - 6.0 * l * mu * r
            - 6.0 * k * mu * nu)
            / a4,
        (dnu * a - nu * da + 2.0 * l * dmu * a - 2.0 * l * mu * da - dl * mu * a - a2
            - 10.0 * l * mu * nu
            - 2.0 * mu * r
            - nu * nu
            - 4.0 * k * mu * mu)
            / a4,
        (dmu * a - mu * da - 4.0 * mu * nu - 7.0 * l * mu * mu) / a4,
        -3.0 * mu * mu / a4,
    ]);

    let q5 = TPoly::new(vec![
        -(k * r * r + k * k * a2) / a4,
        -(2.0 * l * r * r + 2.0 * k * nu * r + 4.0 * l * k * a2) / a4,
        -(r * r + 4.0 * l * nu * r + 2.0 * k * mu * r + k * nu * nu + 4.0 * l * l * a2
            + 2.0 * k * a2)
            / a4,
        -(2.0 * nu * r + 4.0 * l * mu * r + 2.0 * l * nu * nu + 2.0 * k * mu * nu + 4.0 * l * a2)
            / a4,
        -(2.0 * mu * r + nu * nu + 4.0 * l * mu * nu + k * mu * mu + a2) / a4,
        -(2.0 * mu * nu + 2.0 * l * mu * mu) / a4,
        -(mu * mu) / a4,
    ]);

    CoeffPolys { q1, q2, q3, q4, q5 }
}

/// The same five coefficients straight from their compact rational forms
/// (ratios of q, p, their partials and A). Used as an internal consistency
/// check against the expanded polynomials.
pub fn q_compact_eval(inv: &RuledInvariants, t: f64) -> [f64; 5] {
    let a = inv.a;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let q = q_poly(inv).eval(t);
    let p = p_poly(inv).eval(t);
    let q_t = 2.0 * t + 2.0 * inv.lambda;
    let p_t = 2.0 * inv.mu * t + inv.nu;
    let q_s = 2.0 * inv.dlambda * t + inv.dkappa;
    let p_s = inv.dmu * t * t + inv.dnu * t + inv.drho;
    [
        -q / a2,
        2.0 * q * p / a3,
        q_s / (2.0 * a2) + q * p_t / a3 - p * q_t / (2.0 * a3),
        q * p_s / a3 - p * q_s / (2.0 * a3) - p * q * inv.da / a4 - q * q_t / (2.0 * a2)
            + p * p * q_t / (2.0 * a4)
            - 2.0 * q * p * p_t / a4,
        -(q * q / a2 + q * p * p / a4),
    ]
}

/// Chebyshev points of the first kind mapped to [a, b].
pub fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n > 0 && a < b);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (0..n)
        .map(|k| mid + half * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

/// Least-squares polynomial fit of the given degree through (nodes, values).
///
/// The solve runs in the affinely rescaled variable τ = (t − mid)/half to
/// keep the Vandermonde condition number harmless, then maps the
/// coefficients back to the raw t basis exactly (binomial expansion).
pub fn vandermonde_fit(nodes: &[f64], values: &[f64], degree: usize) -> Result<TPoly, GeomError> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    let cols = degree + 1;
    if n < cols {
        return Err(GeomError::InsufficientSamples {
            got: n,
            need: cols,
            context: format!("degree-{degree} polynomial fit"),
        });
    }
    let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);

    let m = DMatrix::from_fn(n, cols, |i, j| ((nodes[i] - mid) / half).powi(j as i32));
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !cond.is_finite() || cond > VANDERMONDE_COND_MAX {
        return Err(GeomError::IllConditionedVandermonde { degree, cond });
    }
    let rhs = DMatrix::from_fn(n, 1, |i, _| values[i]);
    let sol = svd
        .solve(&rhs, smax * 1e-13)
        .map_err(|e| GeomError::Config(format!("Vandermonde solve failed: {e}")))?;

    // Map Σ c_k τ^k back to powers of t via (t − mid)^k expansion.
    let mut binom = vec![vec![0.0_f64; cols]; cols];
    for k in 0..cols {
        binom[k][0] = 1.0;
        for j in 1..=k {
            binom[k][j] = binom[k - 1][j - 1] + if j < k { binom[k - 1][j] } else { 0.0 };
        }
    }
    let mut out = vec![0.0_f64; cols];
    for k in 0..cols {
        let ck = sol[(k, 0)] / half.powi(k as i32);
        for j in 0..=k {
            out[j] += ck * binom[k][j] * (-mid).powi((k - j) as i32);
        }
    }
    Ok(TPoly::new(out))
}

/// Drop reconstructed coefficients that are pure fit noise: anything below
/// `floor` relative to the polynomial's own scale.
fn denoise(p: TPoly, floor: f64) -> TPoly {
    let scale = p.max_abs_coeff().max(1.0);
    TPoly::new(
        p.coeffs()
            .iter()
            .map(|&c| if c.abs() < floor * scale { 0.0 } else { c })
            .collect(),
    )
}

/// Recover Q1…Q5 at fixed s by probing the generic third-form Laplacian
/// with the monomials s, t, s², st, t² along the ruling and fitting
/// degree-≤6 polynomials through the probed values.
///
/// At each node t_i the five probes give a triangular system:
/// Δs = Q3, Δt = Q4, Δ(s²) = 2Q1 + 2s·Q3, Δ(st) = Q2 + t·Q3 + s·Q4,
/// Δ(t²) = 2Q5 + 2t·Q4.
pub fn probe_coefficients(
    surface: &SurfacePatch,
    s: f64,
    t_nodes: &[f64],
    tol: &Tolerances,
) -> Result<CoeffPolys, GeomError> {
    let f_s = ScalarField::poly(vec![vec![0.0], vec![1.0]]);
    let f_t = ScalarField::poly(vec![vec![0.0, 1.0]]);
    let f_ss = ScalarField::poly(vec![vec![0.0], vec![0.0], vec![1.0]]);
    let f_st = ScalarField::poly(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
    let f_tt = ScalarField::poly(vec![vec![0.0, 0.0, 1.0]]);

    let n = t_nodes.len();
    let mut vals = [const { Vec::new() }; 5];
    for v in &mut vals {
        v.reserve(n);
    }
    for &t in t_nodes {
        let p = ParamPoint::new(s, t);
        let lap =
            |f: &ScalarField| laplace_beltrami(surface, FormSelector::Third, f, p, tol);
        let d_s = lap(&f_s)?;
        let d_t = lap(&f_t)?;
        let d_ss = lap(&f_ss)?;
        let d_st = lap(&f_st)?;
        let d_tt = lap(&f_tt)?;
        let q3 = d_s;
        let q4 = d_t;
        vals[0].push(0.5 * (d_ss - 2.0 * s * q3)); // Q1
        vals[1].push(d_st - t * q3 - s * q4); // Q2
        vals[2].push(q3);
        vals[3].push(q4);
        vals[4].push(0.5 * (d_tt - 2.0 * t * q4)); // Q5
    }

    let fit = |values: &Vec<f64>, deg: usize| -> Result<TPoly, GeomError> {
        Ok(denoise(vandermonde_fit(t_nodes, values, deg)?, 1e-7))
    };
    Ok(CoeffPolys {
        q1: fit(&vals[0], 2)?,
        q2: fit(&vals[1], 4)?,
        q3: fit(&vals[2], 3)?,
        q4: fit(&vals[3], 5)?,
        q5: fit(&vals[4], 6)?,
    })
}

/// The six vector equations obtained by expanding A⁴(Δ^III x − Λx) in powers
/// of t; index k holds the coefficient of t^k. A surface is coordinate
/// finite type with matrix Λ exactly when all six vanish identically in s.
pub fn coefficient_equations(
    inv: &RuledInvariants,
    alpha: &CurveJet,
    beta: &CurveJet,
    lambda_mat: &Matrix3<f64>,
) -> [Vec3; 6] {
    let RuledInvariants {
        kappa: k,
        lambda: l,
        mu,
        nu,
        rho: r,
        a,
        dkappa: dk,
        dlambda: dl,
        dmu,
        dnu,
        drho: dr,
        da,
    } = *inv;
    let (a2, a4) = (a * a, a * a * a * a);
    let b = beta.value;
    let b1 = beta.d1;
    let b2 = beta.d2;
    let al1 = alpha.d1;
    let al2 = alpha.d2;

    let e5 = b * (-3.0 * mu * mu);
    let e4 = b * (dmu * a - mu * da - 4.0 * mu * nu - 7.0 * l * mu * mu) + b1 * (3.0 * mu * a);
    let e3 = al1 * (mu * a) - b2 * a2
        + b1 * (2.0 * nu * a + 7.0 * l * mu * a)
        + b * (dnu * a - nu * da + 2.0 * l * dmu * a - 2.0 * l * mu * da - dl * mu * a - a2
            - 10.0 * l * mu * nu
            - 2.0 * mu * r
            - nu * nu
            - 4.0 * k * mu * mu);
    let e2 = b
        * (k * dmu * a - k * mu * da - 0.5 * dk * mu * a + 2.0 * l * dnu * a
            - 2.0 * l * nu * da
            - dl * nu * a
            - r * da
            + dr * a
            - 3.0 * l * a2
            - 3.0 * l * nu * nu
            - 6.0 * l * mu * r
            - 6.0 * k * mu * nu)
        + al1 * (3.0 * l * mu * a)
        - b2 * (2.0 * l * a2)
        - al2 * a2
        + b1 * ((dl * a + 5.0 * l * nu + 4.0 * k * mu + r) * a);
    let e1 = b1 * ((0.5 * dk * a + 3.0 * k * nu + 3.0 * l * r) * a)
        + b * (k * dnu * a - k * nu * da - 0.5 * dk * nu * a + 2.0 * l * dr * a
            - 2.0 * l * r * da
            - dl * r * a
            - k * a2
            - 2.0 * l * l * a2
            - 2.0 * k * nu * nu
            + r * r
            - 2.0 * l * nu * r
            - 4.0 * k * mu * r)
        - al2 * (2.0 * l * a2)
        - b2 * (k * a2)
        + al1 * ((l * nu - r + 2.0 * k * mu + dl * a) * a)
        - a4 * (lambda_mat * b);
    let e0 = b
        * (k * dr * a - k * r * da - 0.5 * dk * r * a + l * r * r - k * l * a2 - 2.0 * k * nu * r)
        - al2 * (k * a2)
        + b1 * (2.0 * k * r * a)
        + al1 * ((0.5 * dk * a - l * r + k * nu) * a)
        - a4 * (lambda_mat * alpha.value);

    [e0, e1, e2, e3, e4, e5]
}

/// The two candidate forms of the t¹ β′-coefficient (divided by A): the
/// expansion-derived `3κν + 3λρ` and the alternative `2κν + 4λρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffVariant {
    ThreeThree,
    TwoFour,
}

impl CoeffVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoeffVariant::ThreeThree => "3kn+3lr",
            CoeffVariant::TwoFour => "2kn+4lr",
        }
    }
}

/// Outcome of measuring A⁴([Q2]₁ + [Q3]₀) against both candidates.
#[derive(Debug, Clone, Copy)]
pub struct T1Adjudication {
    pub probed: f64,
    pub candidate_three_three: f64,
    pub candidate_two_four: f64,
    pub separation: f64,
    pub matched: Option<CoeffVariant>,
}

/// Decide which candidate form of the t¹ coefficient is correct by probing
/// the operator numerically at `s`. The candidates differ by A(κν − λρ), so
/// the probe point must have κν ≠ λρ to discriminate.
pub fn adjudicate_t1(
    pair: &CurvePair,
    s: f64,
    tol: &Tolerances,
) -> Result<T1Adjudication, GeomError> {
    let surface = ruled_surface(pair, (s - 0.3, s + 0.3), (0.6, 2.2))?;
    let nodes = chebyshev_nodes(0.7, 2.1, 8);
    let probed_polys = probe_coefficients(&surface, s, &nodes, tol)?;
    let inv = ruled_invariants(pair, s);
    let a4 = inv.a.powi(4);
    let probed = a4 * (probed_polys.q2.coeff(1) + probed_polys.q3.coeff(0));

    let base = 0.5 * inv.dkappa * inv.a;
    let candidate_three_three =
        inv.a * (base + 3.0 * inv.kappa * inv.nu + 3.0 * inv.lambda * inv.rho);
    let candidate_two_four =
        inv.a * (base + 2.0 * inv.kappa * inv.nu + 4.0 * inv.lambda * inv.rho);
    let separation = (candidate_three_three - candidate_two_four).abs();

    let err_a = (probed - candidate_three_three).abs();
    let err_b = (probed - candidate_two_four).abs();
    let scale = probed.abs().max(1.0);
    // Decidable only when the candidates are far apart relative to probe
    // noise, and exactly one of them explains the measurement.
    let matched = if separation < 1e-6 * scale {
        None
    } else if err_a < 0.05 * separation && err_b > 0.5 * separation {
        Some(CoeffVariant::ThreeThree)
    } else if err_b < 0.05 * separation && err_a > 0.5 * separation {
        Some(CoeffVariant::TwoFour)
    } else {
        None
    };

    Ok(T1Adjudication {
        probed,
        candidate_three_three,
        candidate_two_four,
        separation,
        matched,
    })
}

/// α = (λ cos s, λ sin s, c5·s), β = (cos s, sin s, 0): the helicoid as a
/// normalized ruled pair. All of μ, ν, ρ vanish; A = c5.
pub fn helicoid_pair(c5: f64, lambda: f64) -> CurvePair {
    assert!(c5 != 0.0);
    let alpha: CurveFn = Arc::new(move |s: f64| {
        let (sn, cs) = s.sin_cos();
        CurveJet {
            value: Vec3::new(lambda * cs, lambda * sn, c5 * s),
            d1: Vec3::new(-lambda * sn, lambda * cs, c5),
            d2: Vec3::new(-lambda * cs, -lambda * sn, 0.0),
        }
    });
    let beta: CurveFn = Arc::new(|s: f64| {
        let (sn, cs) = s.sin_cos();
        CurveJet {
            value: Vec3::new(cs, sn, 0.0),
            d1: Vec3::new(-sn, cs, 0.0),
            d2: Vec3::new(-cs, -sn, 0.0),
        }
    });
    CurvePair::new(format!("helicoid(c5={c5},lambda={lambda})"), alpha, beta)
}

/// A non-helicoidal normalized pair built by projecting the twisted curve
/// γ = (sin 2s, cos 2s, s) onto the normalization constraint against
/// β = (cos s, sin s, 0):
/// α = (sin 2s/2 − sin 4s/4, cos 2s/2 + cos 4s/4, s).
/// Invariants: κ = 3 − 2cos 6s, λ = −2 sin 3s, μ = ν = 0, ρ = −6 cos 3s,
/// A = 1.
pub fn twisted_pair() -> CurvePair {
    let alpha: CurveFn = Arc::new(|s: f64| {
        let (s2, c2) = (2.0 * s).sin_cos();
        let (s4, c4) = (4.0 * s).sin_cos();
        CurveJet {
            value: Vec3::new(0.5 * s2 - 0.25 * s4, 0.5 * c2 + 0.25 * c4, s),
            d1: Vec3::new(c2 - c4, -s2 - s4, 1.0),
            d2: Vec3::new(-2.0 * s2 + 4.0 * s4, -2.0 * c2 - 4.0 * c4, 0.0),
        }
    });
    let beta: CurveFn = Arc::new(|s: f64| {
        let (sn, cs) = s.sin_cos();
        CurveJet {
            value: Vec3::new(cs, sn, 0.0),
            d1: Vec3::new(-sn, cs, 0.0),
            d2: Vec3::new(-cs, -sn, 0.0),
        }
    });
    CurvePair::new("twisted", alpha, beta)
}

/// Normalized pair whose ruling direction β sweeps a circle of latitude
/// z = z0 on the unit sphere (so μ = −z0/r ≠ 0), with
/// α′ = (a0 + a1·s)β′ + (b0 + b1·s)(β × β′). The antiderivative α is exact.
/// q = (t + a(s))² + b(s)² stays away from 0 as long as b does.
pub fn latitude_pair(a0: f64, a1: f64, b0: f64, b1: f64, z0: f64, offset: Vec3) -> CurvePair {
    assert!(z0.abs() < 1.0, "latitude z0 must satisfy |z0| < 1");
    let r = (1.0 - z0 * z0).sqrt();
    let w = 1.0 / r;

    let beta_parts = move |s: f64| {
        let (sn, cs) = (w * s).sin_cos();
        (sn, cs)
    };
    let beta: CurveFn = Arc::new(move |s: f64| {
        let (sn, cs) = beta_parts(s);
        CurveJet {
            value: Vec3::new(r * cs, r * sn, z0),
            d1: Vec3::new(-sn, cs, 0.0),
            d2: Vec3::new(-w * cs, -w * sn, 0.0),
        }
    });
    let alpha: CurveFn = Arc::new(move |s: f64| {
        let (sn, cs) = beta_parts(s);
        let bval = Vec3::new(r * cs, r * sn, z0);
        let b1v = Vec3::new(-sn, cs, 0.0);
        let b2v = Vec3::new(-w * cs, -w * sn, 0.0);
        // β × β′ and its integral / antiderivative bookkeeping.
        let cross = Vec3::new(-z0 * cs, -z0 * sn, r);
        let cross_d = Vec3::new(z0 * w * sn, -z0 * w * cs, 0.0);
        let int_beta = Vec3::new(r * r * sn, -r * r * cs, z0 * s);
        let int_cross = Vec3::new(-z0 * r * sn, z0 * r * cs, r * s);
        let int_int_cross = Vec3::new(z0 * r * r * cs, z0 * r * r * sn, 0.5 * r * s * s);
        let a_s = a0 + a1 * s;
        let b_s = b0 + b1 * s;
        CurveJet {
            value: offset
                + a0 * bval
                + a1 * (s * bval - int_beta)
                + b0 * int_cross
                + b1 * (s * int_cross - int_int_cross),
            d1: a_s * b1v + b_s * cross,
            d2: a1 * b1v + a_s * b2v + b1 * cross + b_s * cross_d,
        }
    });
    CurvePair::new(
        format!("latitude(a={a0}+{a1}s,b={b0}+{b1}s,z0={z0})"),
        alpha,
        beta,
    )
}

/// Random non-helicoidal pair for sweep tests; parameters are drawn from
/// ranges where the striction guard is comfortable (b bounded away from 0)
/// and μ ≠ 0.
pub fn random_pair(rng: &mut impl rand::Rng) -> CurvePair {
    let a0 = rng.random_range(0.4..1.5);
    let a1 = rng.random_range(-0.3..0.3);
    let b0 = rng.random_range(0.7..1.6);
    let b1 = rng.random_range(-0.25..0.25);
    let z0 = rng.random_range(0.25..0.6);
    let offset = Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    latitude_pair(a0, a1, b0, b1, z0, offset)
}

/// [`random_pair`] with a self-contained deterministic generator, for
/// callers that only carry a seed.
pub fn random_pair_seeded(seed: u64) -> CurvePair {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_pair(&mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: Tolerances = Tolerances {
        eps_k: 1e-6,
        eps_q: 1e-6,
        tau: 1e-4,
        fd_step: 1e-4,
    };

    fn synthetic_invariants() -> RuledInvariants {
        RuledInvariants {
            kappa: 2.3,
            lambda: -0.7,
            mu: 0.4,
            nu: 1.1,
            rho: -0.9,
            a: 1.3,
            dkappa: 0.5,
            dlambda: 0.2,
            dmu: -0.1,
            dnu: 0.3,
            drho: 0.8,
            da: -0.4,
        }
    }

    #[test]
    fn tpoly_eval_and_trim() {
        let p = TPoly::new(vec![1.0, -2.0, 0.5, 0.0, 0.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 2.0);
        assert_eq!(p.coeff(7), 0.0);
        assert_eq!(TPoly::new(vec![]).degree(), 0);
    }

    #[test]
    fn helicoid_pair_is_normalized_with_trivial_invariants() {
        let pair = helicoid_pair(1.0, 0.0);
        pair.validate(&[0.0, 0.7, 2.0]).unwrap();
        let inv = ruled_invariants(&pair, 0.9);
        assert!((inv.kappa - 1.0).abs() < 1e-12);
        assert!(inv.lambda.abs() < 1e-12);
        assert!(inv.mu.abs() < 1e-12);
        assert!(inv.nu.abs() < 1e-12);
        assert!(inv.rho.abs() < 1e-12);
        assert!((inv.a - 1.0).abs() < 1e-12);
        for d in [inv.dkappa, inv.dlambda, inv.dmu, inv.dnu, inv.drho, inv.da] {
            assert!(d.abs() < 1e-9, "nonzero invariant derivative {d:.3e}");
        }

        let tilted = helicoid_pair(0.7, 0.4);
        let inv = ruled_invariants(&tilted, 1.3);
        assert!((inv.kappa - (0.49 + 0.16)).abs() < 1e-12);
        assert!((inv.lambda - 0.4).abs() < 1e-12);
        assert!((inv.a - 0.7).abs() < 1e-12);
    }

    #[test]
    fn broken_normalization_is_rejected() {
        let alpha: CurveFn = Arc::new(|s: f64| CurveJet {
            value: Vec3::new(0.0, 0.0, s),
            d1: Vec3::new(0.0, 0.0, 1.0),
            d2: Vec3::zeros(),
        });
        // β has length 2: the |β| = 1 check must fire.
        let beta: CurveFn = Arc::new(|s: f64| {
            let (sn, cs) = s.sin_cos();
            CurveJet {
                value: Vec3::new(2.0 * cs, 2.0 * sn, 0.0),
                d1: Vec3::new(-2.0 * sn, 2.0 * cs, 0.0),
                d2: Vec3::new(-2.0 * cs, -2.0 * sn, 0.0),
            }
        });
        let pair = CurvePair::new("broken", alpha, beta);
        let err = pair.validate(&[0.3]).unwrap_err();
        assert!(matches!(err, GeomError::NormalizationViolated { .. }), "{err}");
        assert!(ruled_surface(&pair, (0.0, 1.0), (0.5, 1.5)).is_err());
    }

    #[test]
    fn twisted_pair_invariants_match_hand_closed_forms() {
        let pair = twisted_pair();
        pair.validate(&[0.0, 0.35, 1.1]).unwrap();
        for s in [0.3, 0.7, 1.4] {
            let inv = ruled_invariants(&pair, s);
            assert!((inv.kappa - (3.0 - 2.0 * (6.0 * s).cos())).abs() < 1e-11, "kappa at {s}");
            assert!((inv.lambda + 2.0 * (3.0 * s).sin()).abs() < 1e-11, "lambda at {s}");
            assert!(inv.mu.abs() < 1e-11);
            assert!(inv.nu.abs() < 1e-11);
            assert!((inv.rho + 6.0 * (3.0 * s).cos()).abs() < 1e-11, "rho at {s}");
            assert!((inv.a - 1.0).abs() < 1e-11);
            // Derivatives against the differentiated closed forms.
            assert!((inv.dkappa - 12.0 * (6.0 * s).sin()).abs() < 1e-7);
            assert!((inv.dlambda + 6.0 * (3.0 * s).cos()).abs() < 1e-7);
            assert!((inv.drho - 18.0 * (3.0 * s).sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn latitude_pair_invariants_match_construction() {
        let (a0, a1, b0, b1, z0) = (0.9, 0.15, 1.1, -0.2, 0.4);
        let pair = latitude_pair(a0, a1, b0, b1, z0, Vec3::new(0.3, -0.2, 0.8));
        pair.validate(&[-0.4, 0.0, 0.5]).unwrap();
        let r = (1.0 - z0 * z0).sqrt();
        let w = 1.0 / r;
        for s in [-0.3, 0.2, 0.6] {
            let inv = ruled_invariants(&pair, s);
            let a_s = a0 + a1 * s;
            let b_s = b0 + b1 * s;
            let mu = -z0 * w;
            assert!((inv.kappa - (a_s * a_s + b_s * b_s)).abs() < 1e-11);
            assert!((inv.lambda - a_s).abs() < 1e-11);
            assert!((inv.mu - mu).abs() < 1e-11);
            assert!((inv.nu - (2.0 * a_s * mu - b1)).abs() < 1e-11);
            assert!(
                (inv.rho - ((a_s * a_s + b_s * b_s) * mu - a_s * b1 + a1 * b_s)).abs() < 1e-11
            );
            assert!((inv.a - b_s).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_forms_match_compact_rational_forms() {
        let inv = synthetic_invariants();
        let polys = q_closed_forms(&inv);
        for t in [-1.3, 0.0, 0.8, 2.6] {
            let compact = q_compact_eval(&inv, t);
            let expanded = [
                polys.q1.eval(t),
                polys.q2.eval(t),
                polys.q3.eval(t),
                polys.q4.eval(t),
                polys.q5.eval(t),
            ];
            for i in 0..5 {
                assert!(
                    (compact[i] - expanded[i]).abs() < 1e-12 * compact[i].abs().max(1.0),
                    "Q{} at t={t}: compact {} vs expanded {}",
                    i + 1,
                    compact[i],
                    expanded[i]
                );
            }
        }
    }

    #[test]
    fn helicoid_closed_forms_take_known_shape() {
        let inv = ruled_invariants(&helicoid_pair(1.0, 0.0), 0.4);
        let polys = q_closed_forms(&inv);
        // Q1 = −q = −(t² + 1); Q2 = Q3 = 0; Q4 = −(t³ + t); Q5 = −q².
        assert!(polys.q1.max_coeff_diff(&TPoly::new(vec![-1.0, 0.0, -1.0])) < 1e-10);
        assert!(polys.q2.max_abs_coeff() < 1e-10);
        assert!(polys.q3.max_abs_coeff() < 1e-10);
        assert!(polys.q4.max_coeff_diff(&TPoly::new(vec![0.0, -1.0, 0.0, -1.0])) < 1e-9);
        assert!(polys.q5.max_coeff_diff(&TPoly::new(vec![-1.0, 0.0, -2.0, 0.0, -1.0])) < 1e-9);
    }

    #[test]
    fn ruled_surface_matches_curvature_closed_form() {
        let pair = twisted_pair();
        let surface = ruled_surface(&pair, (0.0, 1.2), (0.6, 2.2)).unwrap();
        for p in surface.domain.grid(4, 4) {
            let inv = ruled_invariants(&pair, p.u);
            let q = q_poly(&inv).eval(p.v);
            let bundle = surface.bundle_at(p).unwrap();
            let k_closed = -inv.a * inv.a / (q * q);
            assert!(
                (bundle.k - k_closed).abs() < 1e-8 * k_closed.abs().max(1.0),
                "K mismatch at {:?}: {} vs {}",
                p,
                bundle.k,
                k_closed
            );
        }
    }

    #[test]
    fn probed_coefficients_match_closed_forms_on_helicoid() {
        let pair = helicoid_pair(1.0, 0.0);
        let surface = ruled_surface(&pair, (0.2, 1.4), (0.6, 2.2)).unwrap();
        let nodes = chebyshev_nodes(0.7, 2.1, 8);
        let s0 = 0.8;
        let probed = probe_coefficients(&surface, s0, &nodes, &TOL).unwrap();
        let closed = q_closed_forms(&ruled_invariants(&pair, s0));
        // Q3 really is identically zero …
        assert!(probed.q3.max_abs_coeff() < 1e-6, "Q3 = {:?}", probed.q3);
        // … but Q4 = −(t³ + t) is not, despite superficial symmetry with Q3:
        // the probe must reproduce it, not flatten it.
        assert!(closed.q4.max_abs_coeff() > 0.5);
        for (name, p, c) in [
            ("Q1", &probed.q1, &closed.q1),
            ("Q2", &probed.q2, &closed.q2),
            ("Q4", &probed.q4, &closed.q4),
            ("Q5", &probed.q5, &closed.q5),
        ] {
            let tol = 1e-4 * c.max_abs_coeff().max(1.0);
            assert!(
                p.max_coeff_diff(c) < tol,
                "{name}: probed {:?} vs closed {:?}",
                p,
                c
            );
        }
    }

    #[test]
    fn probed_coefficients_match_closed_forms_on_twisted_pair() {
        let pair = twisted_pair();
        let s0 = 0.35;
        let surface = ruled_surface(&pair, (s0 - 0.3, s0 + 0.3), (0.6, 2.2)).unwrap();
        let nodes = chebyshev_nodes(0.7, 2.1, 8);
        let probed = probe_coefficients(&surface, s0, &nodes, &TOL).unwrap();
        let closed = q_closed_forms(&ruled_invariants(&pair, s0));
        for ((name, p), (_, c)) in probed.as_array().iter().zip(closed.as_array().iter()) {
            let tol = 1e-4 * c.max_abs_coeff().max(1.0);
            assert!(
                p.max_coeff_diff(c) < tol,
                "{name}: probed {:?} vs closed {:?}",
                p,
                c
            );
        }
    }

    #[test]
    fn operator_expansion_reconstructs_position_laplacian() {
        // Δ^III x assembled from the closed-form coefficients and curve jets
        // must agree with the generic operator applied to the coordinates.
        let pair = twisted_pair();
        let surface = ruled_surface(&pair, (0.1, 0.9), (0.6, 2.2)).unwrap();
        let (s0, t0) = (0.5, 1.3);
        let inv = ruled_invariants(&pair, s0);
        let polys = q_closed_forms(&inv);
        let a = pair.alpha(s0);
        let b = pair.beta(s0);
        let assembled = a.d2 * polys.q1.eval(t0)
            + b.d1 * polys.q2.eval(t0)
            + a.d1 * polys.q3.eval(t0)
            + b.value * polys.q4.eval(t0)
            + (b.d2 * polys.q1.eval(t0) + b.d1 * polys.q3.eval(t0)) * t0;
        let generic = crate::operators::delta3_position(&surface, ParamPoint::new(s0, t0), &TOL)
            .unwrap()
            .value;
        assert!(
            (assembled - generic).norm() < 1e-5 * generic.norm().max(1.0),
            "assembled {:?} vs generic {:?}",
            assembled,
            generic
        );
    }

    #[test]
    fn coefficient_equations_vanish_exactly_for_helicoids() {
        for (c5, lam) in [(1.0, 0.0), (0.7, 0.4), (2.0, 1.0)] {
            let pair = helicoid_pair(c5, lam);
            for s in [0.2, 1.1] {
                let inv = ruled_invariants(&pair, s);
                let eqs = coefficient_equations(
                    &inv,
                    &pair.alpha(s),
                    &pair.beta(s),
                    &Matrix3::zeros(),
                );
                for (k, e) in eqs.iter().enumerate() {
                    assert!(
                        e.norm() < 1e-8,
                        "t^{k} equation = {:?} for helicoid({c5},{lam}) at s={s}",
                        e
                    );
                }
            }
        }
    }

    #[test]
    fn coefficient_equations_reject_the_twisted_pair() {
        // No constant Λ satisfies the system for this pair; with Λ = 0 the
        // low-order equations must be visibly violated.
        let pair = twisted_pair();
        let inv = ruled_invariants(&pair, 0.4);
        let eqs =
            coefficient_equations(&inv, &pair.alpha(0.4), &pair.beta(0.4), &Matrix3::zeros());
        let worst = eqs.iter().map(|e| e.norm()).fold(0.0, f64::max);
        assert!(worst > 1e-2, "worst residual only {worst:.3e}");
    }

    #[test]
    fn equation_polynomial_matches_generic_operator_with_arbitrary_lambda() {
        // Σ_k E_k t^k must equal A⁴(Δ^III x − Λ x) for any Λ, not just
        // solutions — this pins every term of the transcription.
        let pair = twisted_pair();
        let surface = ruled_surface(&pair, (0.1, 0.9), (0.6, 2.2)).unwrap();
        let lambda_mat = Matrix3::new(1.0, 0.2, 0.0, -0.3, 2.0, 0.1, 0.0, 0.4, 3.0);
        let (s0, t0) = (0.45_f64, 1.7_f64);
        let inv = ruled_invariants(&pair, s0);
        let eqs = coefficient_equations(&inv, &pair.alpha(s0), &pair.beta(s0), &lambda_mat);
        let poly_val: Vec3 = eqs
            .iter()
            .enumerate()
            .map(|(k, e)| e * t0.powi(k as i32))
            .sum();
        let p = ParamPoint::new(s0, t0);
        let sample = crate::operators::delta3_position(&surface, p, &TOL).unwrap();
        let direct = inv.a.powi(4) * (sample.value - lambda_mat * sample.x);
        assert!(
            (poly_val - direct).norm() < 1e-4 * direct.norm().max(1.0),
            "polynomial {:?} vs direct {:?}",
            poly_val,
            direct
        );
    }

    #[test]
    fn adjudication_singles_out_the_expansion_variant() {
        // κν ≠ λρ at this probe point, so the candidates are separated.
        let pair = twisted_pair();
        let adj = adjudicate_t1(&pair, 0.35, &TOL).unwrap();
        assert!(adj.separation > 0.1, "separation {:.3e}", adj.separation);
        assert_eq!(adj.matched, Some(CoeffVariant::ThreeThree), "{adj:?}");
    }

    #[test]
    fn random_pairs_are_valid_and_probeable() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pair = random_pair(&mut rng);
        pair.validate(&[-0.2, 0.0, 0.3]).unwrap();
        let inv = ruled_invariants(&pair, 0.1);
        assert!(inv.mu.abs() > 0.2, "mu = {} should be away from 0", inv.mu);
        let surface = ruled_surface(&pair, (-0.3, 0.3), (0.6, 2.2)).unwrap();
        let nodes = chebyshev_nodes(0.7, 2.1, 8);
        let probed = probe_coefficients(&surface, 0.0, &nodes, &TOL).unwrap();
        let closed = q_closed_forms(&ruled_invariants(&pair, 0.0));
        for ((name, p), (_, c)) in probed.as_array().iter().zip(closed.as_array().iter()) {
            let tol = 1e-4 * c.max_abs_coeff().max(1.0);
            assert!(p.max_coeff_diff(c) < tol, "{name}: {:?} vs {:?}", p, c);
        }
    }

    #[test]
    fn chebyshev_nodes_and_vandermonde_guards() {
        let nodes = chebyshev_nodes(0.7, 2.1, 8);
        assert_eq!(nodes.len(), 8);
        assert!(nodes.iter().all(|&t| (0.7..=2.1).contains(&t)));

        // Exact reconstruction of a cubic through the nodes.
        let target = TPoly::new(vec![0.5, -1.0, 0.0, 2.0]);
        let values: Vec<f64> = nodes.iter().map(|&t| target.eval(t)).collect();
        let fitted = vandermonde_fit(&nodes, &values, 3).unwrap();
        assert!(fitted.max_coeff_diff(&target) < 1e-10);

        // Coincident nodes are hopeless.
        let bad = vec![1.0; 8];
        let vals = vec![0.0; 8];
        assert!(matches!(
            vandermonde_fit(&bad, &vals, 3),
            Err(GeomError::IllConditionedVandermonde { .. })
        ));
    }
}
