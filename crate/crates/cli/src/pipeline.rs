//! End-to-end pipeline: standardize, cluster, drop small clusters, label,
//! split, train, evaluate, per-cluster significance tests, centroid
//! baseline and overlap, all written to disk as deterministic JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clustex_core::centroid::{difference_scores, overlap, top_k_by_difference};
use clustex_core::cluster::{adjusted_rand_index, agglomerative_ward, drop_small_clusters, kmeans, ClusterAssignment};
use clustex_core::data::{add_intercept, load_csv, split, standardize, Dataset, SplitSpec};
use clustex_core::error::Error as CoreError;
use clustex_core::fcps::{generate, GenSpec};
use clustex_core::mlp::{train, MlpModel};
use clustex_core::sfit::{rank_features, sfit_per_cluster, SfitReport};
use serde_json::json;

use crate::config::{ClusterAlgo, InputSource, PipelineConfig};

/// A pipeline failure, tagged with the stage that raised it.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub source: CoreError,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage '{}': {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

trait StageContext<T> {
    fn stage(self, name: &'static str) -> Result<T, PipelineError>;
}

impl<T> StageContext<T> for Result<T, CoreError> {
    fn stage(self, name: &'static str) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage: name, source })
    }
}

/// Everything the run produced, plus the summary value written to disk.
#[derive(Debug)]
pub struct PipelineOutcome {
    pub summary: serde_json::Value,
    pub files: Vec<PathBuf>,
    pub model: MlpModel,
    pub assignment: ClusterAssignment,
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    cfg.validate().stage("config")?;

    // Load or generate the raw data; any labels it carries are kept aside
    // as ground truth for agreement scoring only.
    let raw = match &cfg.input {
        InputSource::Csv {
            path,
            has_header,
            label_column,
        } => load_csv(path, *has_header, label_column.as_deref()).stage("load")?,
        InputSource::Generate { shape, n, seed, noise } => {
            let spec = GenSpec::new(*shape, n.unwrap_or_else(|| shape.default_n()), *seed, *noise)
                .stage("load")?;
            generate(&spec).stage("load")?
        }
    };
    let truth = raw.labels().map(<[usize]>::to_vec);

    let (standardized, _scaling) = standardize(&raw.without_labels()).stage("standardize")?;

    let assignment = match cfg.clustering.algorithm {
        ClusterAlgo::Kmeans => kmeans(
            &standardized,
            cfg.clustering.k,
            cfg.clustering.seed,
            cfg.clustering.max_iter,
            cfg.clustering.tol,
        )
        .stage("cluster")?,
        ClusterAlgo::Ward => agglomerative_ward(&standardized, cfg.clustering.k).stage("cluster")?,
    };

    // Agreement with the input labels, when the input had any.
    let ari = match &truth {
        Some(t) => {
            let t_assign = ClusterAssignment::from_labels(t.clone(), "input", BTreeMap::new())
                .stage("cluster")?;
            Some(adjusted_rand_index(&assignment, &t_assign).stage("cluster")?)
        }
        None => None,
    };

    let (assignment, kept) =
        drop_small_clusters(&assignment, &standardized, cfg.clustering.min_cluster_size)
            .stage("drop-small-clusters")?;

    let labeled = kept.with_labels(assignment.labels.clone()).stage("label")?;
    let with_intercept = add_intercept(&labeled).stage("intercept")?;

    let split_spec = SplitSpec {
        fractions: cfg.split.fractions.clone(),
        seed: cfg.split.seed,
    };
    let parts = split(&with_intercept, &split_spec).stage("split")?;
    let (train_set, val_set, inference_set) = (&parts[0], &parts[1], &parts[2]);

    let model = train(train_set, val_set, &cfg.mlp).stage("train")?;
    let accuracy = model.accuracy(inference_set).stage("evaluate")?;

    let sfit_data = if cfg.sfit_on_all_data {
        &with_intercept
    } else {
        inference_set
    };

    let mut warnings: Vec<String> = Vec::new();
    let mut cluster_reports: Vec<(usize, Option<SfitReport>)> = Vec::new();
    for c in 1..=assignment.n_clusters() {
        match sfit_per_cluster(&model, sfit_data, c, &cfg.sfit) {
            Ok(report) => cluster_reports.push((c, Some(report))),
            Err(CoreError::TooFewSamples { got, min }) => {
                warnings.push(format!(
                    "cluster {c}: only {got} inference rows (< {min}), significance tests skipped"
                ));
                cluster_reports.push((c, None));
            }
            Err(e) => return Err(PipelineError { stage: "sfit", source: e }),
        }
    }

    let centroid_report = difference_scores(&labeled, &assignment).stage("centroid")?;

    // Per-cluster summaries and SFIT/centroid overlap.
    let mut cluster_values: Vec<serde_json::Value> = Vec::new();
    let mut overlaps: Vec<usize> = Vec::new();
    for (c, report) in &cluster_reports {
        let centroid_top = top_k_by_difference(&centroid_report, *c, cfg.centroid_top_k)
            .stage("overlap")?;
        let value = match report {
            Some(report) => {
                let first_order: Vec<&clustex_core::sfit::SfitEntry> =
                    report.entries_of_order(1).collect();
                let mut ranked: Vec<&clustex_core::sfit::SfitEntry> = first_order
                    .iter()
                    .filter(|e| e.significant)
                    .copied()
                    .collect();
                ranked.sort_by(|a, b| {
                    b.median
                        .total_cmp(&a.median)
                        .then_with(|| a.features.cmp(&b.features))
                });
                let top_names: Vec<String> = ranked
                    .iter()
                    .take(cfg.top_k)
                    .map(|e| report.entry_label(e))
                    .collect();
                let ov = overlap(&top_names, &centroid_top);
                overlaps.push(ov);

                let interactions: Vec<serde_json::Value> = report
                    .entries
                    .iter()
                    .filter(|e| e.order >= 2)
                    .map(|e| {
                        json!({
                            "features": e.features.names(&report.feature_names),
                            "median": e.median,
                            "p_value": e.p_value,
                            "significant": e.significant,
                        })
                    })
                    .collect();
                let top_entries: Vec<serde_json::Value> = rank_features(report, cfg.top_k)
                    .iter()
                    .map(|e| {
                        json!({
                            "features": e.features.names(&report.feature_names),
                            "median": e.median,
                            "ci": [e.ci_lower, e.ci_upper],
                        })
                    })
                    .collect();
                json!({
                    "cluster": c,
                    "size": assignment.sizes[c - 1],
                    "n_sfit_rows": report.entries.first().map_or(0, |e| e.n_total),
                    "sfit_file": format!("sfit_cluster_{c}.json"),
                    "significant_features": report.significant_first_order(),
                    "top_features": top_names,
                    "top_entries": top_entries,
                    "interactions": interactions,
                    "centroid_top": centroid_top,
                    "overlap": ov,
                })
            }
            None => json!({
                "cluster": c,
                "size": assignment.sizes[c - 1],
                "sfit_file": serde_json::Value::Null,
                "centroid_top": centroid_top,
                "overlap": serde_json::Value::Null,
            }),
        };
        cluster_values.push(value);
    }

    let mean_overlap = if overlaps.is_empty() {
        serde_json::Value::Null
    } else {
        json!(overlaps.iter().sum::<usize>() as f64 / overlaps.len() as f64)
    };

    let config_echo = serde_json::to_value(cfg).map_err(CoreError::from).stage("write")?;
    let summary = json!({
        "config": config_echo,
        "n_rows_input": raw.n(),
        "n_rows": labeled.n(),
        "feature_names": labeled.feature_names(),
        "cluster_sizes": assignment.sizes,
        "dropped_clusters": assignment.params.get("dropped_clusters").cloned().unwrap_or_default(),
        "ari_vs_input_labels": ari,
        "split_sizes": parts.iter().map(Dataset::n).collect::<Vec<_>>(),
        "accuracy_inference": accuracy,
        "model_fingerprint": model.fingerprint(),
        "clusters": cluster_values,
        "mean_overlap": mean_overlap,
        "warnings": warnings,
    });

    // Write everything.
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out).map_err(CoreError::from).stage("write")?;
    let mut files = Vec::new();

    let labels_path = out.join("labels.csv");
    write_text(&labels_path, &assignment.to_label_csv()).stage("write")?;
    files.push(labels_path);

    let sidecar = json!({
        "algorithm": assignment.algorithm,
        "params": assignment.params,
        "sizes": assignment.sizes,
    });
    let sidecar_path = out.join("labels.json");
    write_json(&sidecar_path, &sidecar).stage("write")?;
    files.push(sidecar_path);

    let model_path = out.join("model.json");
    let model_json = model.to_json().stage("write")?;
    write_text(&model_path, &model_json).stage("write")?;
    files.push(model_path);

    for (c, report) in &cluster_reports {
        if let Some(report) = report {
            let path = out.join(format!("sfit_cluster_{c}.json"));
            let text = report.to_json_string().stage("write")?;
            write_text(&path, &text).stage("write")?;
            files.push(path);
        }
    }

    let centroid_path = out.join("centroid.json");
    let centroid_json = centroid_report.to_json_string(cfg.centroid_top_k).stage("write")?;
    write_text(&centroid_path, &centroid_json).stage("write")?;
    files.push(centroid_path);

    let summary_path = out.join("summary.json");
    write_json(&summary_path, &summary).stage("write")?;
    files.push(summary_path);

    Ok(PipelineOutcome {
        summary,
        files,
        model,
        assignment,
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CoreError> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CoreError> {
    std::fs::write(path, text)?;
    Ok(())
}
