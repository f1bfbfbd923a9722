//! Centroid difference scores: how far each cluster's feature means sit
//! from the global means, in global standard deviations. The comparison
//! baseline for the significance-based reports.

use serde_json::json;

use crate::cluster::ClusterAssignment;
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterScores {
    pub cluster: usize,
    /// Feature means over the cluster's rows (intercept excluded).
    pub centroid: Vec<f64>,
    /// |cluster mean - global mean| / global population std, per feature.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidReport {
    pub feature_names: Vec<String>,
    pub global_means: Vec<f64>,
    pub global_stds: Vec<f64>,
    pub clusters: Vec<ClusterScores>,
}

impl CentroidReport {
    pub fn cluster(&self, c: usize) -> Result<&ClusterScores> {
        self.clusters
            .iter()
            .find(|cs| cs.cluster == c)
            .ok_or(Error::UnknownCluster(c))
    }

    /// JSON form: per cluster the centroid, every feature's score as
    /// `{feature, D}`, and the `top_k` highest-scoring feature names.
    pub fn to_json_value(&self, top_k: usize) -> serde_json::Value {
        let clusters: Vec<serde_json::Value> = self
            .clusters
            .iter()
            .map(|cs| {
                let scores: Vec<serde_json::Value> = self
                    .feature_names
                    .iter()
                    .zip(&cs.scores)
                    .map(|(name, d)| json!({"feature": name, "D": d}))
                    .collect();
                let top = top_k_by_difference(self, cs.cluster, top_k)
                    .expect("cluster exists in its own report");
                json!({
                    "cluster": cs.cluster,
                    "centroid": cs.centroid,
                    "scores": scores,
                    "top_k": top,
                })
            })
            .collect();
        json!({
            "feature_names": self.feature_names,
            "clusters": clusters,
        })
    }

    pub fn to_json_string(&self, top_k: usize) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value(top_k))?)
    }
}

/// Mean of every feature over the rows of cluster `c` (intercept excluded).
pub fn centroid(d: &Dataset, a: &ClusterAssignment, c: usize) -> Result<Vec<f64>> {
    if a.n() != d.n() {
        return Err(Error::LengthMismatch(a.n(), d.n()));
    }
    let members = a.members(c);
    if members.is_empty() {
        return Err(Error::UnknownCluster(c));
    }
    let p = d.p();
    let mut mean = vec![0.0f64; p];
    for &i in &members {
        for (m, v) in mean.iter_mut().zip(d.feature_row(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= members.len() as f64;
    }
    Ok(mean)
}

/// Difference scores for every cluster and feature, using the global mean
/// and global population standard deviation of the dataset actually passed.
pub fn difference_scores(d: &Dataset, a: &ClusterAssignment) -> Result<CentroidReport> {
    if a.n() != d.n() {
        return Err(Error::LengthMismatch(a.n(), d.n()));
    }
    let n = d.n() as f64;
    let p = d.p();
    let mut global_means = Vec::with_capacity(p);
    let mut global_stds = Vec::with_capacity(p);
    for j in 0..p {
        let col = d.feature_column(j);
        let mean = col.iter().sum::<f64>() / n;
        let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        if std <= 0.0 {
            return Err(Error::DegenerateFeature(d.feature_names()[j].clone()));
        }
        global_means.push(mean);
        global_stds.push(std);
    }

    let mut clusters = Vec::with_capacity(a.n_clusters());
    for c in 1..=a.n_clusters() {
        let center = centroid(d, a, c)?;
        let scores = center
            .iter()
            .enumerate()
            .map(|(j, m)| (m - global_means[j]).abs() / global_stds[j])
            .collect();
        clusters.push(ClusterScores {
            cluster: c,
            centroid: center,
            scores,
        });
    }
    Ok(CentroidReport {
        feature_names: d.feature_names().to_vec(),
        global_means,
        global_stds,
        clusters,
    })
}

/// Feature names of cluster `c` ranked by descending difference score, ties
/// toward the lower feature index; at most `k` names.
pub fn top_k_by_difference(r: &CentroidReport, c: usize, k: usize) -> Result<Vec<String>> {
    let cs = r.cluster(c)?;
    let mut order: Vec<usize> = (0..cs.scores.len()).collect();
    order.sort_by(|&a, &b| cs.scores[b].total_cmp(&cs.scores[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|j| r.feature_names[j].clone())
        .collect())
}

/// Size of the set intersection of two feature-name lists.
pub fn overlap<S: AsRef<str>, T: AsRef<str>>(sfit_top: &[S], centroid_top: &[T]) -> usize {
    sfit_top
        .iter()
        .filter(|s| centroid_top.iter().any(|t| t.as_ref() == s.as_ref()))
        .count()
}

/// "Variable | Score of difference" rows, aligned.
pub fn format_difference_table(rows: &[(String, f64)]) -> String {
    let mut out = String::new();
    let name_w = rows
        .iter()
        .map(|r| r.0.len())
        .chain(std::iter::once("Variable".len()))
        .max()
        .unwrap();
    out.push_str(&format!("{:<name_w$}  {:>20}\n", "Variable", "Score of difference"));
    for (name, d) in rows {
        out.push_str(&format!("{name:<name_w$}  {d:>20.6}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterAssignment;
    use crate::data::{standardize, Dataset};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn dataset(rows: &[Vec<f64>]) -> Dataset {
        let names = (1..=rows[0].len()).map(|j| format!("x{j}")).collect();
        Dataset::from_rows(rows, names).unwrap()
    }

    fn assignment(labels: Vec<usize>) -> ClusterAssignment {
        ClusterAssignment::from_labels(labels, "test", BTreeMap::new()).unwrap()
    }

    #[test]
    fn centroid_is_columnwise_mean() {
        let d = dataset(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![10.0, 10.0]]);
        let a = assignment(vec![1, 1, 2]);
        assert_eq!(centroid(&d, &a, 1).unwrap(), vec![2.0, 3.0]);
        assert_eq!(centroid(&d, &a, 2).unwrap(), vec![10.0, 10.0]);
        let all = assignment(vec![1, 1, 1]);
        let g = centroid(&d, &all, 1).unwrap();
        assert!((g[0] - 14.0 / 3.0).abs() < 1e-12);
        assert!(matches!(centroid(&d, &a, 3), Err(Error::UnknownCluster(3))));
    }

    #[test]
    fn score_zero_when_cluster_mean_matches_global() {
        // Both clusters share the same feature-2 mean.
        let d = dataset(&[vec![0.0, 5.0], vec![2.0, 7.0], vec![10.0, 5.0], vec![12.0, 7.0]]);
        let a = assignment(vec![1, 1, 2, 2]);
        let r = difference_scores(&d, &a).unwrap();
        assert!(r.clusters[0].scores[1].abs() < 1e-12);
        assert!(r.clusters[1].scores[1].abs() < 1e-12);
        assert!(r.clusters[0].scores[0] > 0.9);
    }

    #[test]
    fn score_arithmetic() {
        // {2, 1,1,1,1,1,1, 0}: global mean 1, population std 0.5. The
        // singleton cluster at 2 scores |2 - 1| / 0.5 = 2.
        let mut rows = vec![vec![2.0]];
        rows.extend(std::iter::repeat(vec![1.0]).take(6));
        rows.push(vec![0.0]);
        let d = dataset(&rows);
        let a = assignment(vec![1, 2, 2, 2, 2, 2, 2, 2]);
        let r = difference_scores(&d, &a).unwrap();
        assert!((r.global_means[0] - 1.0).abs() < 1e-15);
        assert!((r.global_stds[0] - 0.5).abs() < 1e-15);
        assert!((r.clusters[0].scores[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_feature_rejected() {
        let d = dataset(&[vec![1.0, 3.0], vec![1.0, 4.0]]);
        let a = assignment(vec![1, 2]);
        assert!(matches!(
            difference_scores(&d, &a),
            Err(Error::DegenerateFeature(name)) if name == "x1"
        ));
    }

    #[test]
    fn tight_blobs_at_plus_minus_one_score_one() {
        // Two equal clusters drawn around -1/+1 with tiny spread: the global
        // std tends to 1, so each cluster scores ~1. Verified against a
        // direct sample-level computation.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eps = 1e-4;
        let rows: Vec<Vec<f64>> = (0..400)
            .map(|i| {
                let c = if i % 2 == 0 { -1.0 } else { 1.0 };
                vec![c + eps * crate::fcps::normal(&mut rng)]
            })
            .collect();
        let labels: Vec<usize> = (0..400).map(|i| (i % 2) + 1).collect();
        let d = dataset(&rows);
        let a = assignment(labels.clone());
        let r = difference_scores(&d, &a).unwrap();

        // Oracle: recompute from raw samples.
        let col: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let gm = col.iter().sum::<f64>() / 400.0;
        let gs = (col.iter().map(|v| (v - gm).powi(2)).sum::<f64>() / 400.0).sqrt();
        for c in 1..=2usize {
            let members: Vec<f64> = (0..400).filter(|&i| labels[i] == c).map(|i| col[i]).collect();
            let cm = members.iter().sum::<f64>() / members.len() as f64;
            let oracle = (cm - gm).abs() / gs;
            let got = r.clusters[c - 1].scores[0];
            assert!((got - oracle).abs() < 1e-12);
            assert!((got - 1.0).abs() < 0.01, "score {got}");
        }
    }

    #[test]
    fn affine_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(0.0..10.0)])
            .collect();
        let labels: Vec<usize> = (0..60).map(|i| (i % 3) + 1).collect();
        let d = dataset(&rows);
        let a = assignment(labels);
        let r = difference_scores(&d, &a).unwrap();

        let transformed: Vec<Vec<f64>> = rows.iter().map(|r| vec![2.5 * r[0] - 7.0, r[1]]).collect();
        let dt = dataset(&transformed);
        let rt = difference_scores(&dt, &a).unwrap();
        for (c, ct) in r.clusters.iter().zip(&rt.clusters) {
            for (s, st) in c.scores.iter().zip(&ct.scores) {
                assert!((s - st).abs() < 1e-9, "{s} vs {st}");
            }
        }
    }

    #[test]
    fn standardized_identity_and_weighted_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rows: Vec<Vec<f64>> = (0..90)
            .map(|_| vec![rng.random_range(-4.0..9.0), rng.random_range(-2.0..2.0)])
            .collect();
        let labels: Vec<usize> = (0..90).map(|i| if i < 30 { 1 } else if i < 50 { 2 } else { 3 }).collect();
        let d = dataset(&rows);
        let (std, _) = standardize(&d).unwrap();
        let a = assignment(labels);
        let r = difference_scores(&std, &a).unwrap();
        for cs in &r.clusters {
            let center = centroid(&std, &a, cs.cluster).unwrap();
            for (s, m) in cs.scores.iter().zip(&center) {
                assert!((s - m.abs()).abs() < 1e-9);
            }
        }
        // Weighted cluster-mean deviations cancel.
        for j in 0..2 {
            let total: f64 = r
                .clusters
                .iter()
                .map(|cs| a.sizes[cs.cluster - 1] as f64 * (cs.centroid[j] - r.global_means[j]))
                .sum();
            assert!(total.abs() < 1e-9, "feature {j}: {total}");
        }
    }

    #[test]
    fn top_k_ordering_and_bounds() {
        let r = CentroidReport {
            feature_names: vec!["f2".into(), "f3".into(), "f4".into()],
            global_means: vec![0.0; 3],
            global_stds: vec![1.0; 3],
            clusters: vec![ClusterScores {
                cluster: 1,
                centroid: vec![0.83, 0.81, 0.79],
                scores: vec![0.83, 0.81, 0.79],
            }],
        };
        assert_eq!(top_k_by_difference(&r, 1, 2).unwrap(), vec!["f2", "f3"]);
        assert_eq!(top_k_by_difference(&r, 1, 10).unwrap(), vec!["f2", "f3", "f4"]);
        assert!(top_k_by_difference(&r, 1, 0).unwrap().is_empty());
        assert!(matches!(top_k_by_difference(&r, 2, 1), Err(Error::UnknownCluster(2))));
    }

    #[test]
    fn overlap_counts_intersection() {
        let a = ["gpm", "at_turn", "lt_debt", "curr_debt", "npm"];
        assert_eq!(overlap(&a, &a), 5);
        assert_eq!(overlap(&a, &["x", "y"]), 0);
        // The published cluster-1 comparison: 4 of the 5 significant names
        // appear among the top-10 difference scores.
        let centroid_top = [
            "opmbd",
            "at_turn",
            "opmad",
            "cfm",
            "sale_invcap",
            "ps",
            "curr_debt",
            "npm",
            "gpm",
            "ptpm",
        ];
        assert_eq!(overlap(&a, &centroid_top), 4);
    }
}
