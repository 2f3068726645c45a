//! Run configuration: one JSON document, unknown keys rejected.

use std::path::Path;

use juliadim::conditions::{self, OscParams, Region};
use juliadim::julia::{CloudMethod, JuliaParams, Viewport};
use juliadim::words::PruningPolicy;
use juliadim::{Metric, MultiMap};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultimapSpec {
    Name(String),
    Inline(MultiMap),
}

impl MultimapSpec {
    pub fn resolve(&self) -> Result<MultiMap, CliError> {
        match self {
            MultimapSpec::Name(n) => Ok(conditions::example(n).map_err(|e| CliError::Schema(e.to_string()))?.multimap),
            MultimapSpec::Inline(m) => Ok(m.clone()),
        }
    }

    pub fn catalog_name(&self) -> Option<&str> {
        match self {
            MultimapSpec::Name(n) => Some(n),
            MultimapSpec::Inline(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub multimap: MultimapSpec,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub seed: u64,
    /// Base point for pressure and measures; chosen automatically when absent.
    #[serde(default)]
    pub base_point: Option<[f64; 2]>,
    #[serde(default)]
    pub render: Option<RenderConfig>,
    #[serde(default)]
    pub dimension: Option<DimensionConfig>,
    #[serde(default)]
    pub measure: Option<MeasureConfig>,
    #[serde(default)]
    pub check: Option<CheckConfig>,
    #[serde(default)]
    pub family_c0: Option<FamilyConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JuliaConfig {
    pub method: CloudMethod,
    pub depth: usize,
    pub length: usize,
    pub burn_in: usize,
    pub segments: usize,
    pub budget: u64,
}

impl Default for JuliaConfig {
    fn default() -> Self {
        let p = JuliaParams::default();
        JuliaConfig { method: p.method, depth: p.depth, length: p.length, burn_in: p.burn_in, segments: p.segments, budget: p.budget }
    }
}

impl JuliaConfig {
    pub fn params(&self, seed: u64) -> JuliaParams {
        JuliaParams {
            method: self.method,
            depth: self.depth,
            length: self.length,
            burn_in: self.burn_in,
            segments: self.segments,
            seed,
            budget: self.budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub julia: JuliaConfig,
    /// Fitted to the cloud when absent.
    pub viewport: Option<Viewport>,
    /// Pixels along the longer side of a fitted viewport.
    pub pixels: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { julia: JuliaConfig::default(), viewport: None, pixels: 800 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxCountConfig {
    pub decades: f64,
    pub steps: usize,
}

impl Default for BoxCountConfig {
    fn default() -> Self {
        BoxCountConfig { decades: 2.0, steps: 10 }
    }
}

fn default_t_grid() -> Vec<f64> {
    (0..=200).map(|k| k as f64 / 100.0).collect()
}

fn default_tol_t() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionConfig {
    /// Smallest and largest transfer-sum depth; the largest drives the
    /// headline estimate.
    pub n_range: [usize; 2],
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_tol_t")]
    pub tol_t: f64,
    #[serde(default)]
    pub pruning: PruningPolicy,
    #[serde(default)]
    pub julia: JuliaConfig,
    #[serde(default)]
    pub boxcount: BoxCountConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiiConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for RadiiConfig {
    fn default() -> Self {
        RadiiConfig { min: 1e-3, max: 1e-1, count: 9 }
    }
}

impl RadiiConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|k| self.min * (self.max / self.min).powf(k as f64 / (self.count - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    /// Exponent; the Bowen root of a preliminary pass when absent.
    pub t: Option<f64>,
    /// Discount; the pressure at `t` plus `s_offset` when absent.
    pub s: Option<f64>,
    pub s_offset: f64,
    pub truncation: usize,
    /// Transfer-sum depth of the preliminary Bowen-root pass.
    pub bowen_n: usize,
    pub pruning: PruningPolicy,
    pub centers: usize,
    pub radii: RadiiConfig,
    pub julia: JuliaConfig,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            t: None,
            s: None,
            s_offset: 0.05,
            truncation: 10,
            bowen_n: 8,
            pruning: PruningPolicy::default(),
            centers: 50,
            radii: RadiiConfig::default(),
            julia: JuliaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiHypConfig {
    pub depth: usize,
    pub dist_tol: f64,
}

impl Default for SemiHypConfig {
    fn default() -> Self {
        SemiHypConfig { depth: 10, dist_tol: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscConfig {
    pub grid: usize,
    pub bounds: Option<[f64; 4]>,
    pub mc_samples: usize,
}

impl Default for OscConfig {
    fn default() -> Self {
        let p = OscParams::default();
        OscConfig { grid: p.grid, bounds: p.bounds, mc_samples: p.mc_samples }
    }
}

impl OscConfig {
    pub fn params(&self, seed: u64) -> OscParams {
        OscParams { grid: self.grid, bounds: self.bounds, mc_samples: self.mc_samples, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// The catalog region when absent.
    pub region: Option<Region>,
    pub osc: OscConfig,
    pub semihyp: SemiHypConfig,
    pub julia: JuliaConfig,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { region: None, osc: OscConfig::default(), semihyp: SemiHypConfig::default(), julia: JuliaConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub d1: usize,
    pub d: usize,
    pub r: f64,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    cfg.multimap.resolve()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_name_and_defaults() {
        let cfg = parse(r#"{"multimap":"pm2"}"#).unwrap();
        assert_eq!(cfg.metric, Metric::Euclidean);
        assert_eq!(cfg.multimap.catalog_name(), Some("pm2"));
        assert!(cfg.dimension.is_none());
    }

    #[test]
    fn inline_multimap() {
        let cfg = parse(r#"{"multimap":{"generators":[{"num":[[0,0],[3,0]],"den":[[1,0]]},{"num":[[-2,0],[3,0]],"den":[[1,0]]}]}}"#).unwrap();
        assert_eq!(cfg.multimap.resolve().unwrap().len(), 2);
    }

    #[test]
    fn schema_errors() {
        for bad in [
            r#"{"multimap":"pm2","bogus":1}"#,
            r#"{"multimap":"nope"}"#,
            r#"{"multimap":"pm2","dimension":{}}"#,
            r#"{"multimap":"pm2","render":{"pixelz":3}}"#,
            r#"{"multimap":{"generators":[{"num":[[1,0]],"den":[[1,0]]},{"num":[[0,0],[1,0]],"den":[[1,0]]}]}}"#,
        ] {
            assert!(matches!(parse(bad), Err(CliError::Schema(_))), "{bad}");
        }
    }

    #[test]
    fn radii_are_geometric() {
        let r = RadiiConfig { min: 1e-3, max: 1e-1, count: 3 }.values();
        assert!((r[1] - 1e-2).abs() < 1e-15);
    }
}
