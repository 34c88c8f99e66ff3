//! The JSON run configuration and its CLI flag overrides. Fixed schema:
//!
//! ```json
//! {"catalog":{"dim":8,"seed":7},
//!  "grid":{"s":2.0,"K":8,"levels":9},
//!  "probe":{"seed":11,"random_count":64,"support_cap":3},
//!  "limits":{"subset_cap":5000000,"vertex_cap":16,"m_max":0},
//!  "outputs":{"dir":"out","formats":["csv","json"]}}
//! ```
//!
//! `m_max = 0` means the full range 1..=n. Seeds pin every random draw, so a
//! fixed config yields byte-identical reports.

use serde::{Deserialize, Serialize};

use greedylab_core::probe::ProbeConfig;
use greedylab_core::verify::HarnessConfig;

use crate::AppError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub catalog: CatalogConfig,
    pub grid: GridConfig,
    pub probe: ProbeSection,
    pub limits: LimitsConfig,
    pub outputs: OutputsConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatalogConfig {
    pub dim: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub custom_basis_files: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub s: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub levels: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub seed: u64,
    pub random_count: usize,
    pub support_cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    pub subset_cap: u64,
    pub vertex_cap: usize,
    /// 0 = full range 1..=n.
    pub m_max: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub dir: String,
    pub formats: Vec<String>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            dim: 8,
            seed: 7,
            custom_basis_files: Vec::new(),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            s: 2.0,
            k: 8,
            levels: 9,
        }
    }
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            seed: 11,
            random_count: 64,
            support_cap: 3,
        }
    }
}

impl Default for LimitsConfig {
    fn default() -> Self {
        LimitsConfig {
            subset_cap: 5_000_000,
            vertex_cap: 16,
            m_max: 0,
        }
    }
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            dir: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub grid_s: Option<f64>,
    pub grid_k: Option<usize>,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: Option<&str>, overrides: &Overrides) -> Result<RunConfig, AppError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| AppError::Usage(format!("cannot read config {p}: {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| AppError::Usage(format!("bad config {p}: {e}")))?
            }
            None => RunConfig::default(),
        };
        if let Some(dim) = overrides.dim {
            config.catalog.dim = dim;
        }
        if let Some(seed) = overrides.seed {
            config.catalog.seed = seed;
        }
        if let Some(s) = overrides.grid_s {
            config.grid.s = s;
        }
        if let Some(k) = overrides.grid_k {
            config.grid.k = k;
        }
        if let Some(out) = &overrides.out {
            config.outputs.dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if self.catalog.dim < 2 {
            return Err(AppError::Usage("catalog.dim must be at least 2".into()));
        }
        if !(self.grid.s > 1.0) || !self.grid.s.is_finite() {
            return Err(AppError::Usage(format!(
                "grid.s must be finite and > 1, got {}",
                self.grid.s
            )));
        }
        if self.grid.k == 0 {
            return Err(AppError::Usage("grid.K must be at least 1".into()));
        }
        if self.grid.levels < self.grid.k + 1 {
            return Err(AppError::Usage(format!(
                "grid.levels must be >= K + 1 (got levels={}, K={})",
                self.grid.levels, self.grid.k
            )));
        }
        if self.limits.subset_cap == 0 || self.limits.vertex_cap == 0 {
            return Err(AppError::Usage("limits caps must be positive".into()));
        }
        for fmt in &self.outputs.formats {
            if fmt != "csv" && fmt != "json" {
                return Err(AppError::Usage(format!("unknown output format {fmt}")));
            }
        }
        Ok(())
    }

    pub fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            seed: self.probe.seed,
            random_count: self.probe.random_count,
            support_cap: self.probe.support_cap,
            grid_s: self.grid.s,
            grid_levels: self.grid.levels,
            grid_valued: true,
        }
    }

    pub fn harness_config(&self) -> HarnessConfig {
        HarnessConfig {
            grid_s: self.grid.s,
            grid_k: self.grid.k,
            levels: self.grid.levels,
            probe: self.probe_config(),
            m_max: if self.limits.m_max == 0 {
                None
            } else {
                Some(self.limits.m_max)
            },
            sigma_support_cap: self.limits.subset_cap.min(100_000),
            vertex_cap: self.limits.vertex_cap,
            succ_max_card: None,
            cu_max_dim: 4,
        }
    }
}

/// Worker-thread cap: GREEDYLAB_THREADS, else min(available parallelism, 8).
pub fn thread_count() -> usize {
    if let Ok(value) = std::env::var("GREEDYLAB_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let config = RunConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.catalog.dim, 8);
        assert_eq!(back.grid.k, 8);
    }

    #[test]
    fn schema_keys_are_exact() {
        let text = r#"{"catalog":{"dim":4,"seed":1},
            "grid":{"s":2.0,"K":4,"levels":6},
            "probe":{"seed":2,"random_count":16,"support_cap":2},
            "limits":{"subset_cap":1000,"vertex_cap":16,"m_max":4},
            "outputs":{"dir":"x","formats":["csv"]}}"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(config.grid.k, 4);
        assert_eq!(config.limits.m_max, 4);
        // unknown keys are rejected
        let bad = r#"{"grid":{"s":2.0,"K":4,"levels":6,"extra":1}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut config = RunConfig::default();
        config.grid.k = 0;
        assert!(config.validate().is_err());
        let mut config = RunConfig::default();
        config.grid.levels = config.grid.k; // needs K + 1
        assert!(config.validate().is_err());
    }
}
