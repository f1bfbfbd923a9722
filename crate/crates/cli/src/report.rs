//! Renders pipeline output files as aligned plain-text tables.

use std::path::Path;

use clustex_core::centroid::format_difference_table;
use clustex_core::error::{Error, Result};
use clustex_core::sfit::format_sfit_table;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct SfitFile {
    cluster: Option<usize>,
    entries: Vec<SfitFileEntry>,
}

#[derive(Debug, Deserialize)]
struct SfitFileEntry {
    features: Vec<String>,
    order: usize,
    median: f64,
    ci: [f64; 2],
    significant: bool,
}

#[derive(Debug, Deserialize)]
struct CentroidFile {
    clusters: Vec<CentroidFileCluster>,
}

#[derive(Debug, Deserialize)]
struct CentroidFileCluster {
    cluster: usize,
    scores: Vec<CentroidFileScore>,
}

#[derive(Debug, Deserialize)]
struct CentroidFileScore {
    feature: String,
    #[serde(rename = "D")]
    d: f64,
}

/// Renders every report file found in `dir`. Expects at least one of
/// `sfit_cluster_*.json` / `centroid.json` to exist.
pub fn render_report(dir: &Path) -> Result<String> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.display().to_string()));
    }
    let mut out = String::new();

    let summary_path = dir.join("summary.json");
    if summary_path.exists() {
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary_path)?)?;
        out.push_str("Summary\n");
        if let Some(acc) = value["accuracy_inference"].as_f64() {
            out.push_str(&format!("  classifier accuracy (inference split): {acc:.4}\n"));
        }
        if let Some(ari) = value["ari_vs_input_labels"].as_f64() {
            out.push_str(&format!("  adjusted Rand index vs input labels: {ari:.4}\n"));
        }
        if let Some(mo) = value["mean_overlap"].as_f64() {
            out.push_str(&format!("  mean SFIT/centroid top-feature overlap: {mo:.2}\n"));
        }
        out.push('\n');
    }

    let mut sfit_paths: Vec<(usize, std::path::PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(rest) = name.strip_prefix("sfit_cluster_") {
            if let Some(c) = rest.strip_suffix(".json").and_then(|s| s.parse::<usize>().ok()) {
                sfit_paths.push((c, path));
            }
        }
    }
    sfit_paths.sort();

    let mut rendered_any = false;
    for (c, path) in &sfit_paths {
        let file: SfitFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        out.push_str(&format!("Cluster {c} - significant features\n"));
        out.push_str(&render_sfit_entries(&file.entries));
        out.push('\n');
        debug_assert_eq!(file.cluster, Some(*c));
        rendered_any = true;
    }

    let centroid_path = dir.join("centroid.json");
    if centroid_path.exists() {
        let file: CentroidFile = serde_json::from_str(&std::fs::read_to_string(&centroid_path)?)?;
        for cluster in &file.clusters {
            let mut rows: Vec<(String, f64)> = cluster
                .scores
                .iter()
                .map(|s| (s.feature.clone(), s.d))
                .collect();
            rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            out.push_str(&format!("Cluster {} - centroid difference scores\n", cluster.cluster));
            out.push_str(&format_difference_table(&rows));
            out.push('\n');
        }
        rendered_any = true;
    }

    if !rendered_any {
        return Err(Error::MissingFile(format!(
            "{}: no sfit_cluster_*.json or centroid.json",
            dir.display()
        )));
    }
    Ok(out)
}

fn render_sfit_entries(entries: &[SfitFileEntry]) -> String {
    let mut significant: Vec<&SfitFileEntry> = entries.iter().filter(|e| e.significant).collect();
    significant.sort_by(|a, b| b.median.total_cmp(&a.median).then_with(|| a.features.cmp(&b.features)));
    let rows: Vec<(String, f64, f64, f64)> = significant
        .iter()
        .map(|e| {
            let label = if e.order == 1 {
                e.features[0].clone()
            } else {
                e.features.join(", ")
            };
            (label, e.median, e.ci[0], e.ci[1])
        })
        .collect();
    format_sfit_table(&rows)
}
