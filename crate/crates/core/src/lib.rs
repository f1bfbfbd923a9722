//! Explain clusterings by training a classifier on the cluster labels and
//! testing, per cluster, which features (and feature interactions) carry
//! statistically significant predictive power, alongside a centroid
//! difference-score baseline.
//!
//! The crate is organized around the pipeline's stages:
//!
//! * [`data`]: dataset model, CSV ingestion, standardization, one-hot
//!   encoding, intercept handling and seeded splitting.
//! * [`fcps`]: seeded generators for the nine FCPS-style benchmark shapes.
//! * [`cluster`]: k-means, Ward agglomerative clustering, adjusted Rand
//!   index and small-cluster dropping.
//! * [`mlp`]: the feed-forward classifier interrogated by the explainer.
//! * [`sfit`]: masked-input feature significance with exact sign tests,
//!   median confidence intervals, higher-order interactions and
//!   per-cluster runs.
//! * [`centroid`]: the centroid difference-score baseline and overlap
//!   scoring.
//!
//! Everything is deterministic given the seeds in the various configs.

pub mod centroid;
pub mod cluster;
pub mod data;
pub mod error;
pub mod fcps;
pub mod matrix;
pub mod mlp;
pub mod sfit;

pub use error::{Error, Result};
