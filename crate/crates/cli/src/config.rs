//! Experiment configuration files.
//!
//! ```json
//! {
//!   "channel": { "recipe": { "kind": "orthogonal_bsc", "p2": 0.05, "p3": 0.2 } },
//!   "distribution": { "search": { "grid_resolution": 8 } },
//!   "sim": { "n": 16, "blocks": 4, "rate": 0.25, "r2": 0.5, "epsilon": 0.3,
//!            "decoder": "sliding", "metric": "max_score", "trials": 200 },
//!   "output": { "path": "out.csv", "format": "csv" }
//! }
//! ```
//!
//! `channel` holds exactly one of `recipe` or `path`, `distribution` exactly
//! one of `explicit` or `search`. Relative channel paths are resolved
//! against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use relaylab_core::sim::{DecoderKind, Metric, SimParams};
use relaylab_core::{
    load_channel_file, make_channel, ChannelRecipe, CodingDistribution, RelayChannelSpec,
    SearchConfig,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSource {
    Recipe(ChannelRecipe),
    Path(PathBuf),
}

impl ChannelSource {
    pub fn load(&self, base: &Path) -> Result<RelayChannelSpec> {
        match self {
            Self::Recipe(r) => Ok(make_channel(r)?),
            Self::Path(p) => {
                let path = base.join(p);
                Ok(load_channel_file(&path)?)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Recipe(r) => r.label(),
            Self::Path(p) => format!("file({})", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub grid_resolution: usize,
    /// Defaults to `|Y2| + 1`.
    #[serde(default)]
    pub yhat_max_size: Option<usize>,
    #[serde(default = "yes")]
    pub include_degenerate: bool,
}

fn yes() -> bool {
    true
}

impl SearchSpec {
    pub fn resolve(&self, ch: &RelayChannelSpec) -> SearchConfig {
        let mut cfg = SearchConfig::for_channel(ch, self.grid_resolution);
        if let Some(k) = self.yhat_max_size {
            cfg.yhat_max_size = k;
        }
        cfg.include_degenerate = self.include_degenerate;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSource {
    Explicit(CodingDistribution),
    Search(SearchSpec),
}

fn default_trials() -> usize {
    100
}

fn one() -> usize {
    1
}

fn default_decoder() -> DecoderKind {
    DecoderKind::Sliding
}

fn default_metric() -> Metric {
    Metric::MaxScore
}

/// Simulation parameters plus the trial count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n: usize,
    pub blocks: usize,
    pub rate: f64,
    pub r2: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    #[serde(default = "one")]
    pub last_block_multiplier: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl SimSection {
    pub fn params(&self) -> SimParams {
        SimParams {
            n: self.n,
            blocks: self.blocks,
            rate: self.rate,
            r2: self.r2,
            epsilon: self.epsilon,
            seed: self.seed,
            decoder: self.decoder,
            metric: self.metric,
            last_block_multiplier: self.last_block_multiplier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSource,
    #[serde(default)]
    pub distribution: Option<DistributionSource>,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config file; the returned directory anchors relative paths.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg =
            Self::from_json(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn distribution(&self) -> Result<&DistributionSource> {
        self.distribution
            .as_ref()
            .context("config has no `distribution` section")
    }

    pub fn sim(&self) -> Result<&SimSection> {
        self.sim.as_ref().context("config has no `sim` section")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "channel": {"recipe": {"kind": "orthogonal_bsc", "p2": 0.05, "p3": 0.2}},
                "distribution": {"search": {"grid_resolution": 8}},
                "sim": {"n": 16, "blocks": 4, "rate": 0.25, "r2": 0.5, "epsilon": 0.3},
                "output": {"format": "json"}
            }"#,
        )
        .unwrap();
        let sim = cfg.sim().unwrap();
        assert_eq!(sim.trials, 100);
        assert_eq!(sim.decoder, DecoderKind::Sliding);
        assert_eq!(sim.metric, Metric::MaxScore);
        assert_eq!(cfg.output.format, Format::Json);
        let ch = cfg.channel.load(Path::new(".")).unwrap();
        let DistributionSource::Search(s) = cfg.distribution().unwrap() else {
            panic!()
        };
        let resolved = s.resolve(&ch);
        assert_eq!(resolved.yhat_max_size, 3);
        assert!(resolved.include_degenerate);
    }

    #[test]
    fn explicit_distribution() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "channel": {"recipe": {"kind": "deterministic"}},
                "distribution": {"explicit": {"p_x1": [0.5, 0.5], "p_x2": [0.5, 0.5],
                                              "q": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]}}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            cfg.distribution().unwrap(),
            DistributionSource::Explicit(_)
        ));
        assert!(cfg.sim().is_err());
    }

    #[test]
    fn rejects_both_or_neither_channel_source() {
        assert!(ExperimentConfig::from_json(
            r#"{"channel": {"recipe": {"kind": "deterministic"}, "path": "x.json"}}"#
        )
        .is_err());
        assert!(ExperimentConfig::from_json(r#"{"channel": {}}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"channel": {"path": "x.json"}, "bogus": 1}"#).is_err()
        );
    }

    #[test]
    fn missing_channel_file_names_path() {
        let cfg = ExperimentConfig::from_json(r#"{"channel": {"path": "no/such/channel.json"}}"#)
            .unwrap();
        let err = cfg.channel.load(Path::new("/tmp")).unwrap_err();
        assert!(format!("{err:#}").contains("no/such/channel.json"));
    }
}
