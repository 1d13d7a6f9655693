//! Run configuration shared by every verb.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub z_vertex_bound: usize,
    pub z_length_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subdivision_budget: u32,
    /// Search bounds; `None` means `|W| + 2` vertices and `2·len(w₀)` entries.
    pub search_bounds: Option<Bounds>,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subdivision_budget: peano_core::DEFAULT_BUDGET,
            search_bounds: None,
            seed: 0,
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.subdivision_budget < 1 {
            bail!("subdivision_budget must be at least 1");
        }
        if let Some(b) = self.search_bounds {
            if b.z_vertex_bound < 1 || b.z_length_bound < 1 {
                bail!("search bounds must be at least 1");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.subdivision_budget, 4);
        assert_eq!(cfg.output_format, OutputFormat::Json);
        let dot: RunConfig = serde_json::from_str(
            r#"{"output_format":"dot","search_bounds":{"z_vertex_bound":6,"z_length_bound":10}}"#,
        )
        .unwrap();
        assert_eq!(dot.output_format, OutputFormat::Dot);
        assert_eq!(dot.search_bounds.unwrap().z_length_bound, 10);
        assert!(serde_json::from_str::<RunConfig>(r#"{"budget": 3}"#).is_err());
    }

    #[test]
    fn zero_budget_is_rejected() {
        let cfg = RunConfig {
            subdivision_budget: 0,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
