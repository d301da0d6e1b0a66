//! TOML descriptions of surfaces, so the CLI (and tests) can build any
//! supported patch from a small declarative file instead of code.
//!
//! A config names a `family` and supplies numeric `params`; families with a
//! chart choice accept an optional `domain` override, and the polynomial
//! Monge patch (`custom-grid`) takes its height function as a coefficient
//! matrix. Example:
//!
//! ```toml
//! name = "tilted helicoid"
//! family = "helicoid"
//!
//! [params]
//! c5 = 0.7
//! lambda = 0.4
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::catalog;
use crate::error::GeomError;
use crate::quadric::{Quadric1Params, Quadric2Params};
use crate::ruled;
use crate::surface::{Domain, SurfacePatch, Vec3};

/// Chart rectangle as written in TOML: `domain = { u = [a, b], v = [c, d] }`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct DomainConfig {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl DomainConfig {
    pub fn to_domain(self) -> Result<Domain, GeomError> {
        if !(self.u[0] < self.u[1] && self.v[0] < self.v[1]) {
            return Err(GeomError::Config(format!(
                "domain bounds must be increasing, got u = {:?}, v = {:?}",
                self.u, self.v
            )));
        }
        Ok(Domain::new(self.u[0], self.u[1], self.v[0], self.v[1]))
    }
}

/// One surface description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    /// Optional display name; defaults to the family's own naming.
    pub name: Option<String>,
    /// One of: sphere, helicoid, catenoid, ruled, quadric1, quadric2,
    /// custom-grid.
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub domain: Option<DomainConfig>,
    /// custom-grid: expected total degree of the height polynomial
    /// (validated against `coeffs` when present).
    pub degree: Option<usize>,
    /// custom-grid: height z(u, v) = Σ coeffs[j][k] u^j v^k.
    pub coeffs: Option<Vec<Vec<f64>>>,
    /// ruled: which curve pair ("helicoid", "twisted", "latitude").
    pub curves: Option<String>,
}

impl SurfaceConfig {
    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn required(&self, key: &str) -> Result<f64, GeomError> {
        self.params.get(key).copied().ok_or_else(|| {
            GeomError::Config(format!(
                "family '{}' requires parameter '{}'",
                self.family, key
            ))
        })
    }
}

/// Parse a config from TOML text.
pub fn parse(text: &str) -> Result<SurfaceConfig, GeomError> {
    toml::from_str(text).map_err(|e| GeomError::Config(format!("invalid surface config: {e}")))
}

/// Read and parse a config file.
pub fn load(path: impl AsRef<Path>) -> Result<SurfaceConfig, GeomError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| GeomError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

fn apply_name(cfg: &SurfaceConfig, surface: SurfacePatch) -> SurfacePatch {
    match &cfg.name {
        Some(n) => surface.renamed(n.clone()),
        None => surface,
    }
}

/// Build the patch a config describes.
pub fn surface_from_config(cfg: &SurfaceConfig) -> Result<SurfacePatch, GeomError> {
    let domain = cfg.domain.map(|d| d.to_domain()).transpose()?;
    let mut surface = match cfg.family.as_str() {
        "sphere" => {
            let r = cfg.param("radius", 1.0);
            if r <= 0.0 {
                return Err(GeomError::Config(format!("sphere radius must be > 0, got {r}")));
            }
            let center = Vec3::new(
                cfg.param("center_x", 0.0),
                cfg.param("center_y", 0.0),
                cfg.param("center_z", 0.0),
            );
            catalog::sphere(r, center)
        }
        "helicoid" => {
            let c5 = cfg.param("c5", 1.0);
            if c5 == 0.0 {
                return Err(GeomError::Config("helicoid pitch c5 must be nonzero".into()));
            }
            catalog::helicoid(c5, cfg.param("lambda", 0.0))
        }
        "catenoid" => {
            let c = cfg.param("c", 1.0);
            if c <= 0.0 {
                return Err(GeomError::Config(format!("catenoid scale must be > 0, got {c}")));
            }
            catalog::catenoid(c)
        }
        "ruled" => {
            let pair = match cfg.curves.as_deref() {
                Some("helicoid") | None => {
                    let c5 = cfg.param("c5", 1.0);
                    if c5 == 0.0 {
                        return Err(GeomError::Config("ruled helicoid pair needs c5 ≠ 0".into()));
                    }
                    ruled::helicoid_pair(c5, cfg.param("lambda", 0.0))
                }
                Some("twisted") => ruled::twisted_pair(),
                Some("latitude") => {
                    let z0 = cfg.param("z0", 0.4);
                    if z0.abs() >= 1.0 {
                        return Err(GeomError::Config(format!(
                            "latitude pair needs |z0| < 1, got {z0}"
                        )));
                    }
                    ruled::latitude_pair(
                        cfg.param("a0", 0.9),
                        cfg.param("a1", 0.0),
                        cfg.param("b0", 1.1),
                        cfg.param("b1", 0.0),
                        z0,
                        Vec3::zeros(),
                    )
                }
                Some(other) => {
                    return Err(GeomError::Config(format!(
                        "unknown ruled curve pair '{other}' (expected helicoid, twisted, or latitude)"
                    )))
                }
            };
            let dom = domain.unwrap_or(Domain::new(0.0, 1.0, 0.6, 2.2));
            let s = ruled::ruled_surface(&pair, (dom.u0, dom.u1), (dom.v0, dom.v1))?;
            return Ok(apply_name(cfg, s));
        }
        "quadric1" => {
            let q = Quadric1Params::new(
                cfg.required("a")?,
                cfg.required("b")?,
                cfg.required("c")?,
            )?;
            return Ok(apply_name(
                cfg,
                match domain {
                    Some(d) => q.surface_on(d),
                    None => q.surface(),
                },
            ));
        }
        "quadric2" => {
            let q = Quadric2Params::new(cfg.required("a")?, cfg.required("b")?)?;
            return Ok(apply_name(
                cfg,
                match domain {
                    Some(d) => q.surface_on(d),
                    None => q.surface(),
                },
            ));
        }
        "custom-grid" => {
            let coeffs = cfg.coeffs.clone().ok_or_else(|| {
                GeomError::Config("custom-grid needs a 'coeffs' matrix".into())
            })?;
            if coeffs.is_empty() || coeffs.iter().all(|row| row.is_empty()) {
                return Err(GeomError::Config("custom-grid coeffs must be nonempty".into()));
            }
            if let Some(deg) = cfg.degree {
                let max_deg = coeffs
                    .iter()
                    .enumerate()
                    .flat_map(|(j, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, c)| **c != 0.0)
                            .map(move |(k, _)| j + k)
                    })
                    .max()
                    .unwrap_or(0);
                if max_deg != deg {
                    return Err(GeomError::Config(format!(
                        "custom-grid declares degree {deg} but coeffs have total degree {max_deg}"
                    )));
                }
            }
            let dom = domain.unwrap_or(Domain::new(-1.0, 1.0, -1.0, 1.0));
            catalog::monge_polynomial(coeffs, dom)
        }
        other => {
            return Err(GeomError::Config(format!(
                "unknown surface family '{other}' (expected sphere, helicoid, catenoid, ruled, quadric1, quadric2, or custom-grid)"
            )))
        }
    };
    if let Some(d) = domain {
        surface.domain = d;
    }
    Ok(apply_name(cfg, surface))
}
