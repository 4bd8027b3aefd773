//! Flat `key = value` experiment configuration.
//!
//! The format is UTF-8 text, one `key = value` pair per line, `#` starting a
//! comment; no nesting. Points are comma-separated coordinates, lists of
//! points are separated by semicolons, and `inf` is accepted for the sup-norm
//! exponent:
//!
//! ```text
//! experiment = counterexample
//! domain     = halfplane
//! normal     = 0, 1
//! offset     = 0
//! norm       = pnorm
//! p          = inf
//! seed       = 0
//! out_dir    = out
//! ```

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::normed_space::NormSpec;
use crate::paths::MetricKind;
use crate::solver::{BallConstraint, SolverParams, Stencil};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

fn bad(key: &str, detail: impl std::fmt::Display) -> Error {
    Error::Config(format!("key `{key}`: {detail}"))
}

impl ExperimentConfig {
    pub fn empty() -> Self {
        ExperimentConfig::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ExperimentConfig { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => parse_f64(s).map_err(|e| bad(key, e)),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e| bad(key, e)),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        match self.get("seed") {
            None => Ok(0),
            Some(s) => s.parse().map_err(|e| bad("seed", e)),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out_dir").unwrap_or("out"))
    }

    pub fn experiment(&self) -> Option<&str> {
        self.get("experiment")
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|t| parse_f64(t.trim()).map_err(|e| bad(key, e)))
                .collect(),
        }
    }

    pub fn point(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_point(s).map(Some).map_err(|e| bad(key, e)),
        }
    }

    pub fn point_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        Ok(self.point(key)?.unwrap_or_else(|| default.to_vec()))
    }

    pub fn points_or(&self, key: &str, default: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        match self.get(key) {
            None => Ok(default.iter().map(|p| p.to_vec()).collect()),
            Some(s) => s
                .split(';')
                .map(|t| parse_point(t).map_err(|e| bad(key, e)))
                .collect(),
        }
    }

    /// Domain from `domain = punctured | halfplane | polytope | box | polygon
    /// | lshape` plus its variant-specific numeric keys; punctured at the
    /// origin when absent.
    pub fn domain(&self) -> Result<Domain> {
        match self.get("domain").unwrap_or("punctured") {
            "punctured" => {
                let punctures = self.points_or("punctures", &[&[0.0, 0.0]])?;
                Domain::punctured(punctures)
            }
            "halfplane" | "halfspace" => {
                let normal = self.point_or("normal", &[0.0, 1.0])?;
                let offset = self.f64_or("offset", 0.0)?;
                Domain::half_space(normal, offset)
            }
            "box" => {
                let lo = self.point_or("box_lo", &[-6.0, -6.0])?;
                let hi = self.point_or("box_hi", &[6.0, 0.0])?;
                Domain::axis_aligned_box(&lo, &hi)
            }
            "polytope" => {
                let rows = self
                    .get("halfspaces")
                    .ok_or_else(|| bad("halfspaces", "required for domain = polytope"))?;
                let mut halfspaces = Vec::new();
                for row in rows.split(';') {
                    let nums = parse_point(row).map_err(|e| bad("halfspaces", e))?;
                    if nums.len() < 3 {
                        return Err(bad("halfspaces", "each entry needs a1,...,an,b"));
                    }
                    let (a, b) = nums.split_at(nums.len() - 1);
                    halfspaces.push((a.to_vec(), b[0]));
                }
                Domain::convex_polytope(halfspaces)
            }
            "polygon" => {
                let pts = self
                    .get("polygon")
                    .ok_or_else(|| bad("polygon", "required for domain = polygon"))?;
                let vertices = pts
                    .split(';')
                    .map(|t| parse_point(t).map_err(|e| bad("polygon", e)))
                    .collect::<Result<Vec<_>>>()?;
                Domain::polygon(vertices)
            }
            "lshape" => Ok(Domain::l_shape(self.f64_or("lshape_scale", 1.0)?)),
            other => Err(bad("domain", format!("unknown variant `{other}`"))),
        }
    }

    /// Norm from `norm = pnorm | weighted`, `p`, `dim`, `weights`; Euclidean
    /// plane when absent.
    pub fn norm(&self) -> Result<NormSpec> {
        let p = self.f64_or("p", 2.0)?;
        match self.get("norm").unwrap_or("pnorm") {
            "pnorm" => NormSpec::p_norm(p, self.usize_or("dim", 2)?),
            "weighted" => {
                let w = self
                    .get("weights")
                    .ok_or_else(|| bad("weights", "required for norm = weighted"))?;
                NormSpec::weighted_p_norm(p, parse_point(w).map_err(|e| bad("weights", e))?)
            }
            other => Err(bad("norm", format!("unknown norm kind `{other}`"))),
        }
    }

    pub fn metric_or(&self, default: MetricKind) -> Result<MetricKind> {
        match self.get("metric") {
            None => Ok(default),
            Some("k") | Some("quasihyperbolic") => Ok(MetricKind::QuasiHyperbolic),
            Some("j") | Some("distance-ratio") => Ok(MetricKind::DistanceRatio),
            Some(other) => Err(bad("metric", format!("expected k or j, got `{other}`"))),
        }
    }

    /// Solver parameters with the documented defaults, plus the optional
    /// `ball_center` / `ball_radius` / `ball_metric` constraint triple.
    pub fn solver_params(&self) -> Result<SolverParams> {
        let defaults = SolverParams::default();
        let stencil = match self.usize_or("stencil", 16)? {
            8 => Stencil::Eight,
            16 => Stencil::Sixteen,
            n => return Err(bad("stencil", format!("expected 8 or 16, got {n}"))),
        };
        let ball_constraint = match self.point("ball_center")? {
            None => None,
            Some(center) => Some(BallConstraint {
                center,
                radius: self.f64_or("ball_radius", std::f64::consts::LN_2)?,
                metric: self.metric_or(MetricKind::QuasiHyperbolic)?,
            }),
        };
        Ok(SolverParams {
            grid_spacing: self.f64_or("grid_spacing", defaults.grid_spacing)?,
            grid_margin: self.f64_or("grid_margin", defaults.grid_margin)?,
            neighbor_stencil: stencil,
            refine_rounds: self.usize_or("refine_rounds", defaults.refine_rounds)?,
            refine_step: self.f64_or("refine_step", defaults.refine_step)?,
            quad_tol: self.f64_or("quad_tol", defaults.quad_tol)?,
            ball_constraint,
        })
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    match t {
        "inf" | "Inf" | "INF" | "infinity" => Ok(f64::INFINITY),
        _ => t.parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}")),
    }
}

fn parse_point(s: &str) -> std::result::Result<Vec<f64>, String> {
    let coords: std::result::Result<Vec<f64>, String> =
        s.split(',').map(|t| parse_f64(t.trim())).collect();
    let coords = coords?;
    if coords.is_empty() {
        return Err("empty point".into());
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_points() {
        let cfg = ExperimentConfig::parse(
            "# comment\nexperiment = ball\ncenter = 0, -1\nradius=0.5 # trailing\np = inf\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment(), Some("ball"));
        assert_eq!(cfg.point("center").unwrap().unwrap(), vec![0.0, -1.0]);
        assert_eq!(cfg.f64_or("radius", 1.0).unwrap(), 0.5);
        assert!(cfg.f64_or("p", 2.0).unwrap().is_infinite());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ExperimentConfig::parse("just words\n").is_err());
        let cfg = ExperimentConfig::parse("radius = abc\n").unwrap();
        assert!(matches!(cfg.f64_or("radius", 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn builds_domains_and_norms() {
        let cfg = ExperimentConfig::parse(
            "domain = halfplane\nnormal = 0,1\noffset = 0\nnorm = pnorm\np = inf\ndim = 2\n",
        )
        .unwrap();
        let dom = cfg.domain().unwrap();
        assert!(dom.contains(&[0.0, -1.0]).unwrap());
        let norm = cfg.norm().unwrap();
        assert_eq!(norm.norm(&[1.0, -2.0]).unwrap(), 2.0);

        let cfg = ExperimentConfig::parse("domain = punctured\npunctures = 0,0; 3,0\n").unwrap();
        let dom = cfg.domain().unwrap();
        assert!(!dom.contains(&[3.0, 0.0]).unwrap());

        let cfg = ExperimentConfig::parse("domain = box\nbox_lo = -1,-1\nbox_hi = 1,1\n").unwrap();
        assert!(cfg.domain().unwrap().contains(&[0.0, 0.0]).unwrap());

        let cfg = ExperimentConfig::parse("domain = polytope\nhalfspaces = 0,1,0; -1,0,-6\n")
            .unwrap();
        assert!(cfg.domain().unwrap().contains(&[0.0, -1.0]).unwrap());
    }

    #[test]
    fn solver_params_defaults_and_constraint() {
        let cfg = ExperimentConfig::parse("ball_center = 0,-1\nball_radius = 0.7\n").unwrap();
        let p = cfg.solver_params().unwrap();
        assert_eq!(p.grid_spacing, 0.05);
        assert_eq!(p.refine_rounds, 200);
        let bc = p.ball_constraint.unwrap();
        assert_eq!(bc.center, vec![0.0, -1.0]);
        assert_eq!(bc.radius, 0.7);
    }
}
