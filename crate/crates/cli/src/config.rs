use std::path::Path;

use anyhow::bail;
use serde::{Deserialize, Serialize};
use skbench::analysis::ResourceModel;
use skbench::benchmark::{BenchConfig, Method};

/// Settings file layout. Every section and key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bench: BenchConfig,
    pub estimate: EstimateConfig,
    pub report: ReportConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlopSource {
    /// Published per-step polynomials.
    Reference,
    /// Quadratics fitted to operation counts measured here.
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub sizes: Vec<usize>,
    pub flops_per_second: f64,
    /// When absent, calibrated so the anchor row reproduces `anchor_days`.
    pub seconds_per_toffoli: Option<f64>,
    pub anchor_method: Method,
    pub anchor_n: usize,
    pub anchor_days: f64,
    pub flop_source: FlopSource,
    pub flop_sizes: Vec<usize>,
    pub flop_instances: usize,
    pub flop_steps: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            sizes: vec![64, 128],
            flops_per_second: ResourceModel::default().flops_per_second,
            seconds_per_toffoli: None,
            anchor_method: Method::Grover,
            anchor_n: 64,
            anchor_days: 2.0e9,
            flop_source: FlopSource::Reference,
            flop_sizes: (10..=50).step_by(5).collect(),
            flop_instances: 10,
            flop_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub ratio_gap_sizes: Vec<usize>,
    pub ratio_gap_instances: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            ratio_gap_sizes: (8..=18).collect(),
            ratio_gap_instances: 100,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("reading config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| anyhow::Error::new(ConfigError(format!("{}: {e}", path.display()))))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.bench
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        let est = &self.estimate;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(est.flops_per_second) || est.seconds_per_toffoli.is_some_and(|s| !positive(s))
        {
            bail!(ConfigError("hardware rates must be positive".into()));
        }
        if !est.anchor_method.is_quantum() {
            bail!(ConfigError(format!(
                "anchor method {} is not quantum",
                est.anchor_method
            )));
        }
        if self
            .report
            .ratio_gap_sizes
            .iter()
            .any(|&n| n < 2 || n > self.bench.spectrum_cap)
        {
            bail!(ConfigError(
                "ratio-gap sizes must lie within the spectrum cap".into()
            ));
        }
        Ok(())
    }
}

/// Invalid settings or inputs; mapped to its own exit code.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `8,9,12` or `8-13` (inclusive) or a mix of both.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| format!("bad size {part:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad size {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad size {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(out)
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<Method>().map_err(|e| e.to_string()))
        .collect()
}
