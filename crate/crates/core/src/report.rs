//! Serializable result shapes shared by the CLI and the verification suite.
//!
//! Every JSON document carries `schema` (bumped on breaking shape changes)
//! and an optional epoch-seconds `timestamp`; omitting the timestamp makes
//! output byte-for-byte reproducible, which the CLI exposes as a flag. CSV
//! output is deliberately minimal: header row, comma separation, RFC-style
//! quoting, LF line endings.

use serde::Serialize;

use crate::fit::{FitMode, Verdict};
use crate::ruled::{CoeffPolys, T1Adjudication};

/// Version of all JSON document shapes produced by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Current wall-clock time as Unix seconds (0 if the clock is broken).
pub fn now_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn mode_str(mode: FitMode) -> &'static str {
    match mode {
        FitMode::Strict => "strict",
        FitMode::Affine => "affine",
    }
}

/// Result of fitting Δ^III x = Λx (+ B) on one surface.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub schema: u32,
    pub surface: String,
    pub mode: &'static str,
    pub n_samples: usize,
    /// Row-major Λ.
    pub lambda: [f64; 9],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<[f64; 3]>,
    pub residual_max: f64,
    pub residual_rms: f64,
    pub condition: f64,
    pub tau: f64,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl FitReport {
    pub fn from_verdict(surface: &str, v: &Verdict, timestamp: Option<u64>) -> Self {
        let m = &v.fit.lambda;
        let lambda = [
            m[(0, 0)], m[(0, 1)], m[(0, 2)],
            m[(1, 0)], m[(1, 1)], m[(1, 2)],
            m[(2, 0)], m[(2, 1)], m[(2, 2)],
        ];
        Self {
            schema: SCHEMA_VERSION,
            surface: surface.to_string(),
            mode: mode_str(v.fit.mode),
            n_samples: v.fit.n_samples,
            lambda,
            translation: v.fit.translation.map(|t| [t.x, t.y, t.z]),
            residual_max: v.fit.residual_max,
            residual_rms: v.fit.residual_rms,
            condition: v.fit.condition,
            tau: v.tau,
            verdict: v.kind.as_str(),
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("surface:      {}\n", self.surface));
        out.push_str(&format!(
            "fit:          {} over {} samples (cond {:.3e})\n",
            self.mode, self.n_samples, self.condition
        ));
        for r in 0..3 {
            out.push_str(&format!(
                "  lambda[{r}]   [{:+.6e} {:+.6e} {:+.6e}]\n",
                self.lambda[3 * r],
                self.lambda[3 * r + 1],
                self.lambda[3 * r + 2]
            ));
        }
        if let Some(t) = self.translation {
            out.push_str(&format!(
                "  shift       [{:+.6e} {:+.6e} {:+.6e}]\n",
                t[0], t[1], t[2]
            ));
        }
        out.push_str(&format!(
            "residual:     max {:.3e}, rms {:.3e} (tau {:.1e})\n",
            self.residual_max, self.residual_rms, self.tau
        ));
        out.push_str(&format!("verdict:      {}\n", self.verdict));
        out
    }
}

/// A Λ-fit plus the pointwise exact-identity battery on the same grid.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub fit: FitReport,
    /// Worst relative deviation across the built-in tensor identities.
    pub identity_max: f64,
    /// Guarded points the identities were evaluated at.
    pub identity_points: usize,
    /// Worst |Δ 1| over the probe points (constants must be annihilated).
    pub const_max: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.fit.to_text();
        out.push_str(&format!(
            "identities:   max {:.3e} over {} points; max |Δ 1| {:.3e}\n",
            self.identity_max, self.identity_points, self.const_max
        ));
        out.push_str(&format!(
            "check:        {}\n",
            if self.passed { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// One reconstructed operator coefficient next to its closed form.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffEntry {
    pub name: &'static str,
    /// Ascending coefficients of the closed-form polynomial in t.
    pub closed: Vec<f64>,
    /// Ascending coefficients reconstructed from the probed operator.
    pub probed: Vec<f64>,
    pub max_deviation: f64,
}

/// Outcome of deciding the ambiguous t¹ coefficient by measurement.
#[derive(Debug, Clone, Serialize)]
pub struct AdjudicationReport {
    pub probed: f64,
    pub candidate_three_three: f64,
    pub candidate_two_four: f64,
    pub separation: f64,
    /// "3kn+3lr", "2kn+4lr", or null when the probe cannot tell.
    pub matched: Option<&'static str>,
}

impl AdjudicationReport {
    pub fn from_adjudication(adj: &T1Adjudication) -> Self {
        Self {
            probed: adj.probed,
            candidate_three_three: adj.candidate_three_three,
            candidate_two_four: adj.candidate_two_four,
            separation: adj.separation,
            matched: adj.matched.map(|m| m.as_str()),
        }
    }
}

/// Closed-form vs probed operator coefficients for one ruled pair.
#[derive(Debug, Clone, Serialize)]
pub struct RuledCoeffsReport {
    pub schema: u32,
    pub pair: String,
    pub s: f64,
    pub coefficients: Vec<CoeffEntry>,
    pub max_deviation: f64,
    pub adjudication: AdjudicationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl RuledCoeffsReport {
    pub fn new(
        pair: &str,
        s: f64,
        closed: &CoeffPolys,
        probed: &CoeffPolys,
        adjudication: &T1Adjudication,
        timestamp: Option<u64>,
    ) -> Self {
        let mut coefficients = Vec::with_capacity(5);
        let mut worst: f64 = 0.0;
        for ((name, c), (_, p)) in closed.as_array().iter().zip(probed.as_array().iter()) {
            let dev = c.max_coeff_diff(p);
            worst = worst.max(dev);
            coefficients.push(CoeffEntry {
                name,
                closed: c.coeffs().to_vec(),
                probed: p.coeffs().to_vec(),
                max_deviation: dev,
            });
        }
        Self {
            schema: SCHEMA_VERSION,
            pair: pair.to_string(),
            s,
            coefficients,
            max_deviation: worst,
            adjudication: AdjudicationReport::from_adjudication(adjudication),
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("pair:         {} at s = {}\n", self.pair, self.s));
        for e in &self.coefficients {
            out.push_str(&format!(
                "  {}  closed {:?}\n      probed {:?}  (max dev {:.3e})\n",
                e.name, e.closed, e.probed, e.max_deviation
            ));
        }
        out.push_str(&format!("max deviation: {:.3e}\n", self.max_deviation));
        let a = &self.adjudication;
        out.push_str(&format!(
            "t^1 check:    probed {:+.6e}; candidates {:+.6e} / {:+.6e}; matched {}\n",
            a.probed,
            a.candidate_three_three,
            a.candidate_two_four,
            a.matched.unwrap_or("undecided")
        ));
        out
    }
}

/// One row of the quadric family sweep.
#[derive(Debug, Clone, Serialize)]
pub struct QuadricTableRow {
    /// "central" (z² − ax² − by² = c) or "paraboloid" (z = ax²/2 + by²/2).
    pub family: &'static str,
    pub a: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub verdict: String,
    pub residual_max: f64,
    /// Worst deviation of the family's exact identities over the sampled
    /// points (closed coordinate forms vs the generic kernel for the
    /// paraboloid family).
    pub identity_max: f64,
    pub lambda_diag: [f64; 3],
}

/// Serialize sweep rows as CSV (header + one line per row, LF endings).
pub fn quadric_table_csv(rows: &[QuadricTableRow]) -> String {
    let mut out = String::new();
    out.push_str(&csv_row(&[
        "family",
        "a",
        "b",
        "c",
        "verdict",
        "residual_max",
        "identity_max",
        "lambda_11",
        "lambda_22",
        "lambda_33",
    ]));
    for r in rows {
        let c = r.c.map_or(String::new(), |c| format!("{c}"));
        out.push_str(&csv_row(&[
            r.family,
            &format!("{}", r.a),
            &format!("{}", r.b),
            &c,
            &r.verdict,
            &format!("{:.6e}", r.residual_max),
            &format!("{:.6e}", r.identity_max),
            &format!("{:.6e}", r.lambda_diag[0]),
            &format!("{:.6e}", r.lambda_diag[1]),
            &format!("{:.6e}", r.lambda_diag[2]),
        ]));
    }
    out
}

/// Reading used for the paraboloid's third coordinate in the sweep: the
/// operator is applied to the actual chart height, not to any auxiliary
/// radical expression.
pub const PARABOLOID_X3_NOTE: &str =
    "paraboloid third coordinate taken as the chart height z = a u^2/2 + b v^2/2";

/// JSON form of the sweep, wrapped with schema and optional timestamp.
#[derive(Debug, Clone, Serialize)]
pub struct QuadricTableReport {
    pub schema: u32,
    pub note: &'static str,
    pub rows: Vec<QuadricTableRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl QuadricTableReport {
    pub fn new(rows: Vec<QuadricTableRow>, timestamp: Option<u64>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            note: PARABOLOID_X3_NOTE,
            rows,
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// One verification criterion's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the whole verification battery.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub passed_all: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl VerifyReport {
    pub fn new(seed: u64, criteria: Vec<CriterionReport>, timestamp: Option<u64>) -> Self {
        let passed_all = criteria.iter().all(|c| c.passed);
        Self {
            schema: SCHEMA_VERSION,
            seed,
            criteria,
            passed_all,
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&format!(
                "criterion {:>2} [{}] {} — {}\n",
                c.id,
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed_all { "pass" } else { "FAIL" }
        ));
        out
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Quote a CSV field when it contains a comma, quote, or newline.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Join fields into one LF-terminated CSV line.
fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields
        .iter()
        .map(|f| csv_escape(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}
