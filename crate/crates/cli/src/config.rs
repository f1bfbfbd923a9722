//! Pipeline configuration, read from JSON.

use std::path::PathBuf;

use clustex_core::error::{Error, Result};
use clustex_core::fcps::FcpsShape;
use clustex_core::mlp::MlpConfig;
use clustex_core::sfit::SfitParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub clustering: ClusteringConfig,
    pub split: SplitConfig,
    #[serde(default)]
    pub mlp: MlpConfig,
    #[serde(default)]
    pub sfit: SfitParams,
    /// How many top significant features to report per cluster.
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// How many top difference-score features to report per cluster.
    #[serde(default = "default_centroid_top_k")]
    pub centroid_top_k: usize,
    /// Run the per-cluster significance tests on all rows instead of the
    /// held-out inference split.
    #[serde(default)]
    pub sfit_on_all_data: bool,
    pub output_dir: PathBuf,
}

fn default_top_k() -> usize {
    5
}

fn default_centroid_top_k() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSource {
    Csv {
        path: PathBuf,
        #[serde(default = "default_true")]
        has_header: bool,
        #[serde(default)]
        label_column: Option<String>,
    },
    Generate {
        shape: FcpsShape,
        #[serde(default)]
        n: Option<usize>,
        seed: u64,
        #[serde(default)]
        noise: f64,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterAlgo {
    Kmeans,
    Ward,
}

impl std::fmt::Display for ClusterAlgo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusterAlgo::Kmeans => "kmeans",
            ClusterAlgo::Ward => "ward",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringConfig {
    pub algorithm: ClusterAlgo,
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_min_cluster_size")]
    pub min_cluster_size: usize,
}

fn default_max_iter() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-6
}

fn default_min_cluster_size() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub fractions: Vec<f64>,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.split.fractions.len() != 3 {
            return Err(Error::Invalid(
                "split.fractions must have exactly 3 entries (train, validation, inference)".into(),
            ));
        }
        if self.clustering.k == 0 {
            return Err(Error::Invalid("clustering.k must be >= 1".into()));
        }
        if self.clustering.min_cluster_size == 0 {
            return Err(Error::Invalid("clustering.min_cluster_size must be >= 1".into()));
        }
        if self.top_k == 0 || self.centroid_top_k == 0 {
            return Err(Error::Invalid("top_k and centroid_top_k must be >= 1".into()));
        }
        self.mlp.validate()?;
        self.sfit.validate()?;
        if let InputSource::Generate { shape, n, .. } = &self.input {
            if let Some(n) = n {
                if *n < 2 * shape.cluster_count() {
                    return Err(Error::Invalid(format!("generate.n {n} too small for {shape}")));
                }
            }
        }
        Ok(())
    }
}
