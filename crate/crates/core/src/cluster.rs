//! Clustering algorithms and partition-agreement scoring.
//!
//! All distance computations skip the intercept column when one is present.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// A partition of dataset rows into clusters `1..=C`, plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub algorithm: String,
    pub params: BTreeMap<String, String>,
}

impl ClusterAssignment {
    /// Builds an assignment from 1-based labels, checking every cluster in
    /// `1..=C` is nonempty.
    pub fn from_labels(labels: Vec<usize>, algorithm: &str, params: BTreeMap<String, String>) -> Result<Self> {
        let c = labels.iter().copied().max().unwrap_or(0);
        if c == 0 {
            return Err(Error::Invalid("empty assignment".into()));
        }
        let mut sizes = vec![0usize; c];
        for &l in &labels {
            if l == 0 {
                return Err(Error::BadLabel { label: 0, n_classes: c });
            }
            sizes[l - 1] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::UnknownCluster(empty + 1));
        }
        Ok(ClusterAssignment {
            labels,
            sizes,
            algorithm: algorithm.to_string(),
            params,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    /// Row indices belonging to cluster `c` (1-based).
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == c).collect()
    }

    /// The single-column CSV form (`label` header plus one value per row).
    pub fn to_label_csv(&self) -> String {
        let mut out = String::from("label\n");
        for l in &self.labels {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd k-means from k-means++ initialization. Stops when the largest
/// centroid shift drops below `tol` or after `max_iter` sweeps.
pub fn kmeans(d: &Dataset, k: usize, seed: u64, max_iter: usize, tol: f64) -> Result<ClusterAssignment> {
    let (assignment, _history) = kmeans_with_history(d, k, seed, max_iter, tol)?;
    Ok(assignment)
}

pub(crate) fn kmeans_with_history(
    d: &Dataset,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<(ClusterAssignment, Vec<f64>)> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let rows: Vec<&[f64]> = (0..n).map(|i| d.feature_row(i)).collect();
    let dim = rows[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(rows[rng.random_range(0..n)].to_vec());
    let mut d2: Vec<f64> = rows.iter().map(|r| squared_distance(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // All remaining mass at distance zero: take the first row not yet
            // duplicating a centroid, or any row.
            (0..n).find(|&i| d2[i] > 0.0).unwrap_or_else(|| rng.random_range(0..n))
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        centroids.push(rows[next].to_vec());
        let last = centroids.last().unwrap();
        for (i, r) in rows.iter().enumerate() {
            let dist = squared_distance(r, last);
            if dist < d2[i] {
                d2[i] = dist;
            }
        }
    }

    let mut assign = vec![0usize; n];
    let mut history: Vec<f64> = Vec::new();
    for _ in 0..max_iter {
        // Assignment sweep; ties go to the lowest centroid index.
        let mut inertia = 0.0;
        for (i, r) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let dist = squared_distance(r, centroid);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            assign[i] = best;
            inertia += best_d;
        }
        if let Some(&prev) = history.last() {
            debug_assert!(inertia <= prev * (1.0 + 1e-12) + 1e-12, "inertia rose: {prev} -> {inertia}");
        }
        history.push(inertia);

        // Update sweep.
        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, r) in rows.iter().enumerate() {
            counts[assign[i]] += 1;
            for (s, v) in sums[assign[i]].iter_mut().zip(*r) {
                *s += v;
            }
        }
        // Re-seed any emptied cluster with the row farthest from its centroid.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[assign[i]] > 1)
                    .max_by(|&a, &b| {
                        squared_distance(rows[a], &centroids[assign[a]])
                            .total_cmp(&squared_distance(rows[b], &centroids[assign[b]]))
                    })
                    .ok_or(Error::InvalidK { k, n })?;
                counts[assign[far]] -= 1;
                for (s, v) in sums[assign[far]].iter_mut().zip(rows[far]) {
                    *s -= v;
                }
                assign[far] = c;
                counts[c] = 1;
                sums[c] = rows[far].to_vec();
            }
        }

        let mut max_shift: f64 = 0.0;
        for c in 0..k {
            let mut shift = 0.0;
            for j in 0..dim {
                let new = sums[c][j] / counts[c] as f64;
                shift += (new - centroids[c][j]).powi(2);
                centroids[c][j] = new;
            }
            max_shift = max_shift.max(shift.sqrt());
        }
        if max_shift < tol {
            break;
        }
    }

    // Final assignment against the last centroids.
    let mut inertia = 0.0;
    for (i, r) in rows.iter().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let dist = squared_distance(r, centroid);
            if dist < best_d {
                best_d = dist;
                best = c;
            }
        }
        assign[i] = best;
        inertia += best_d;
    }
    history.push(inertia);

    let labels: Vec<usize> = assign.iter().map(|&c| c + 1).collect();
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("seed".into(), seed.to_string());
    params.insert("max_iter".into(), max_iter.to_string());
    params.insert("tol".into(), format!("{tol}"));
    params.insert("inertia".into(), format!("{inertia}"));
    let assignment = relabel_nonempty(labels, "kmeans", params)?;
    Ok((assignment, history))
}

/// Relabels so clusters are numbered 1..C' by first appearance order of the
/// original indices, dropping empty ones.
fn relabel_nonempty(labels: Vec<usize>, algorithm: &str, params: BTreeMap<String, String>) -> Result<ClusterAssignment> {
    let max = labels.iter().copied().max().unwrap_or(0);
    let mut present: Vec<bool> = vec![false; max + 1];
    for &l in &labels {
        present[l] = true;
    }
    let mut remap = vec![0usize; max + 1];
    let mut next = 0;
    for l in 1..=max {
        if present[l] {
            next += 1;
            remap[l] = next;
        }
    }
    let relabeled: Vec<usize> = labels.iter().map(|&l| remap[l]).collect();
    ClusterAssignment::from_labels(relabeled, algorithm, params)
}

/// Total within-cluster sum of squared distances to cluster means.
pub fn within_cluster_ss(d: &Dataset, a: &ClusterAssignment) -> Result<f64> {
    if a.n() != d.n() {
        return Err(Error::LengthMismatch(a.n(), d.n()));
    }
    let dim = d.feature_row(0).len();
    let c = a.n_clusters();
    let mut sums = vec![vec![0.0f64; dim]; c];
    let mut counts = vec![0usize; c];
    for i in 0..d.n() {
        let cl = a.labels[i] - 1;
        counts[cl] += 1;
        for (s, v) in sums[cl].iter_mut().zip(d.feature_row(i)) {
            *s += v;
        }
    }
    let mut total = 0.0;
    for i in 0..d.n() {
        let cl = a.labels[i] - 1;
        total += d
            .feature_row(i)
            .iter()
            .enumerate()
            .map(|(j, v)| (v - sums[cl][j] / counts[cl] as f64).powi(2))
            .sum::<f64>();
    }
    Ok(total)
}

/// One merge step of the agglomerative dendrogram. `cost` is the increase in
/// total within-cluster sum of squares caused by the merge.
#[derive(Debug, Clone, PartialEq)]
pub struct WardMerge {
    pub left: usize,
    pub right: usize,
    pub cost: f64,
    pub merged_size: usize,
}

/// Full Ward dendrogram (n-1 merges). Clusters are identified by the
/// smallest row index they contain; ties in merge cost break toward the
/// lexicographically smallest pair.
pub fn ward_dendrogram(d: &Dataset) -> Result<Vec<WardMerge>> {
    let n = d.n();
    if n == 0 {
        return Err(Error::TooFewSamples { got: 0, min: 1 });
    }
    // Pairwise squared Euclidean distances double as the initial Ward
    // distances: D2(A,B) = 2 * |A||B|/(|A|+|B|) * ||cA - cB||^2.
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d2 = squared_distance(d.feature_row(i), d.feature_row(j));
            dist[i * n + j] = d2;
            dist[j * n + i] = d2;
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<usize> = vec![1; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for _ in 1..n {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if active[j] && dist[i * n + j] < best_d {
                    best_d = dist[i * n + j];
                    best = (i, j);
                }
            }
        }
        let (a, b) = best;
        merges.push(WardMerge {
            left: a,
            right: b,
            cost: best_d / 2.0,
            merged_size: size[a] + size[b],
        });

        // Lance-Williams update for Ward, writing the merged cluster into
        // slot a (the smaller index).
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for v in 0..n {
            if !active[v] || v == a || v == b {
                continue;
            }
            let sv = size[v] as f64;
            let updated = ((sa + sv) * dist[a * n + v] + (sb + sv) * dist[b * n + v]
                - sv * dist[a * n + b])
                / (sa + sb + sv);
            dist[a * n + v] = updated;
            dist[v * n + a] = updated;
        }
        size[a] += size[b];
        active[b] = false;
    }
    Ok(merges)
}

/// Agglomerative clustering with Ward linkage, cut at `k` clusters.
pub fn agglomerative_ward(d: &Dataset, k: usize) -> Result<ClusterAssignment> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let merges = ward_dendrogram(d)?;

    // Union-find replay of the first n-k merges.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in merges.iter().take(n - k) {
        let (ra, rb) = (find(&mut parent, m.left), find(&mut parent, m.right));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }

    // Number clusters 1..k in order of their smallest member row.
    let mut label_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut labels = vec![0usize; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let next = label_of_root.len() + 1;
        let label = *label_of_root.entry(root).or_insert(next);
        labels[i] = label;
    }

    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("linkage".into(), "ward".into());
    ClusterAssignment::from_labels(labels, "ward", params)
}

/// Adjusted Rand index between two partitions of the same rows, in [-1, 1].
/// Two identical trivial partitions (agreement with zero chance variance)
/// score 1.
pub fn adjusted_rand_index(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch(a.n(), b.n()));
    }
    let n = a.n();
    let (ca, cb) = (a.n_clusters(), b.n_clusters());
    let mut table = vec![0usize; ca * cb];
    for i in 0..n {
        table[(a.labels[i] - 1) * cb + (b.labels[i] - 1)] += 1;
    }
    let choose2 = |m: usize| -> f64 { (m * m.saturating_sub(1)) as f64 / 2.0 };

    let index: f64 = table.iter().map(|&m| choose2(m)).sum();
    let sum_a: f64 = a.sizes.iter().map(|&m| choose2(m)).sum();
    let sum_b: f64 = b.sizes.iter().map(|&m| choose2(m)).sum();
    let total = choose2(n);
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if (max - expected).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Removes rows belonging to clusters smaller than `min_size`, re-indexing
/// the survivors 1..C' in their original order.
pub fn drop_small_clusters(
    a: &ClusterAssignment,
    d: &Dataset,
    min_size: usize,
) -> Result<(ClusterAssignment, Dataset)> {
    if a.n() != d.n() {
        return Err(Error::LengthMismatch(a.n(), d.n()));
    }
    if min_size < 1 {
        return Err(Error::Invalid("min_size must be >= 1".into()));
    }
    let keep_cluster: Vec<bool> = a.sizes.iter().map(|&s| s >= min_size).collect();
    if keep_cluster.iter().all(|&k| !k) {
        return Err(Error::AllClustersDropped(min_size));
    }
    let mut remap = vec![0usize; a.n_clusters() + 1];
    let mut next = 0;
    for (c, &keep) in keep_cluster.iter().enumerate() {
        if keep {
            next += 1;
            remap[c + 1] = next;
        }
    }
    let kept_rows: Vec<usize> = (0..a.n()).filter(|&i| keep_cluster[a.labels[i] - 1]).collect();
    let labels: Vec<usize> = kept_rows.iter().map(|&i| remap[a.labels[i]]).collect();

    let dropped: Vec<String> = keep_cluster
        .iter()
        .enumerate()
        .filter(|(_, &k)| !k)
        .map(|(c, _)| (c + 1).to_string())
        .collect();
    let mut params = a.params.clone();
    params.insert("min_cluster_size".into(), min_size.to_string());
    params.insert("dropped_clusters".into(), dropped.join(" "));

    let assignment = ClusterAssignment::from_labels(labels, &a.algorithm, params)?;
    let dataset = d.select_rows(&kept_rows)?;
    Ok((assignment, dataset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::fcps::{generate, FcpsShape, GenSpec};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: &[Vec<f64>]) -> Dataset {
        let names = (1..=rows[0].len()).map(|j| format!("x{j}")).collect();
        Dataset::from_rows(rows, names).unwrap()
    }

    /// Independent ARI oracle: O(n^2) pair counting straight from the
    /// definition.
    fn ari_bruteforce(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let mut n11: f64 = 0.0; // same in both
        let mut n00: f64 = 0.0; // different in both
        let mut n10: f64 = 0.0; // same in a only
        let mut n01: f64 = 0.0; // same in b only
        for i in 0..n {
            for j in i + 1..n {
                match (a[i] == a[j], b[i] == b[j]) {
                    (true, true) => n11 += 1.0,
                    (false, false) => n00 += 1.0,
                    (true, false) => n10 += 1.0,
                    (false, true) => n01 += 1.0,
                }
            }
        }
        let total = n11 + n00 + n10 + n01;
        let expected = (n11 + n10) * (n11 + n01) / total;
        let max = 0.5 * ((n11 + n10) + (n11 + n01));
        if (max - expected).abs() < 1e-12 {
            return 1.0;
        }
        (n11 - expected) / (max - expected)
    }

    fn assignment(labels: Vec<usize>) -> ClusterAssignment {
        ClusterAssignment::from_labels(labels, "test", BTreeMap::new()).unwrap()
    }

    #[test]
    fn kmeans_k1_inertia_is_total_scatter() {
        let rows = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]];
        let d = dataset(&rows);
        let a = kmeans(&d, 1, 0, 50, 1e-9).unwrap();
        assert_eq!(a.n_clusters(), 1);
        let inertia = within_cluster_ss(&d, &a).unwrap();
        // Total variance x n: mean (1,1), each point at squared distance 2.
        assert!((inertia - 8.0).abs() < 1e-12);
    }

    #[test]
    fn kmeans_k_equals_n_gives_singletons() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 3.0, -(i as f64)]).collect();
        let d = dataset(&rows);
        let a = kmeans(&d, 6, 3, 100, 1e-9).unwrap();
        assert_eq!(a.sizes, vec![1; 6]);
        assert!(within_cluster_ss(&d, &a).unwrap() < 1e-12);
    }

    #[test]
    fn kmeans_recovers_two_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for i in 0..120 {
            let c = i % 2;
            let cx = if c == 0 { -5.0 } else { 5.0 };
            rows.push(vec![
                cx + 0.2 * crate::fcps::normal(&mut rng),
                0.2 * crate::fcps::normal(&mut rng),
            ]);
            truth.push(c + 1);
        }
        let d = dataset(&rows);
        let a = kmeans(&d, 2, 1, 100, 1e-9).unwrap();
        let t = assignment(truth);
        let ari = adjusted_rand_index(&a, &t).unwrap();
        assert!((ari - 1.0).abs() < 1e-12, "ari {ari}");
        assert!((ari - ari_bruteforce(&a.labels, &t.labels)).abs() < 1e-12);
    }

    #[test]
    fn kmeans_invalid_k() {
        let d = dataset(&[vec![0.0], vec![1.0]]);
        assert!(matches!(kmeans(&d, 0, 0, 10, 1e-6), Err(Error::InvalidK { .. })));
        assert!(matches!(kmeans(&d, 3, 0, 10, 1e-6), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn kmeans_inertia_non_increasing() {
        let d = generate(&GenSpec::new(FcpsShape::Lsun, 300, 4, 0.0).unwrap()).unwrap();
        for seed in 0..5 {
            let (_, history) = kmeans_with_history(&d, 3, seed, 100, 0.0).unwrap();
            for w in history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "inertia rose {w:?}");
            }
        }
    }

    #[test]
    fn kmeans_deterministic_per_seed() {
        let d = generate(&GenSpec::new(FcpsShape::Tetra, 200, 8, 0.0).unwrap()).unwrap();
        let a = kmeans(&d, 4, 11, 100, 1e-9).unwrap();
        let b = kmeans(&d, 4, 11, 100, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ward_two_points_single_merge() {
        let d = dataset(&[vec![0.0], vec![1.0]]);
        let a = agglomerative_ward(&d, 1).unwrap();
        assert_eq!(a.labels, vec![1, 1]);
        let merges = ward_dendrogram(&d).unwrap();
        assert_eq!(merges.len(), 1);
        // Merging two unit-separated points raises WCSS by 1/2.
        assert!((merges[0].cost - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ward_k_equals_n_no_merges() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let d = dataset(&rows);
        let a = agglomerative_ward(&d, 5).unwrap();
        assert_eq!(a.sizes, vec![1; 5]);
        assert_eq!(a.labels, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn ward_recovers_hepta() {
        let d = generate(&GenSpec::new(FcpsShape::Hepta, 210, 1, 0.0).unwrap()).unwrap();
        let truth = assignment(d.labels().unwrap().to_vec());
        let a = agglomerative_ward(&d, 7).unwrap();
        let ari = adjusted_rand_index(&a, &truth).unwrap();
        assert!(ari >= 0.99, "ward hepta ari {ari}");
        assert!((ari - ari_bruteforce(&a.labels, &truth.labels)).abs() < 1e-9);
    }

    #[test]
    fn ward_merge_costs_non_decreasing() {
        let d = generate(&GenSpec::new(FcpsShape::Lsun, 150, 2, 0.0).unwrap()).unwrap();
        let merges = ward_dendrogram(&d).unwrap();
        for w in merges.windows(2) {
            assert!(
                w[1].cost >= w[0].cost - 1e-9 * w[0].cost.abs().max(1.0),
                "cost decreased: {} -> {}",
                w[0].cost,
                w[1].cost
            );
        }
    }

    #[test]
    fn ward_deterministic() {
        let d = generate(&GenSpec::new(FcpsShape::Tetra, 120, 3, 0.0).unwrap()).unwrap();
        let a = agglomerative_ward(&d, 4).unwrap();
        let b = agglomerative_ward(&d, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ari_identical_partitions() {
        let a = assignment(vec![1, 1, 2, 2, 3]);
        assert!((adjusted_rand_index(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ari_one_cluster_vs_singletons_is_zero() {
        let a = assignment(vec![1, 1, 1, 1]);
        let b = assignment(vec![1, 2, 3, 4]);
        let ari = adjusted_rand_index(&a, &b).unwrap();
        assert!(ari.abs() < 1e-12, "ari {ari}");
        assert!((ari - ari_bruteforce(&a.labels, &b.labels)).abs() < 1e-12);
    }

    #[test]
    fn ari_permutation_invariant_and_symmetric() {
        let a = assignment(vec![1, 1, 2, 2, 3, 3, 1, 2]);
        // Relabel 1->3, 2->1, 3->2.
        let permuted = assignment(a.labels.iter().map(|&l| (l % 3) + 1).collect());
        assert!((adjusted_rand_index(&a, &permuted).unwrap() - 1.0).abs() < 1e-12);

        let b = assignment(vec![2, 1, 2, 1, 3, 3, 3, 1]);
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-15);
        assert!((ab - ari_bruteforce(&a.labels, &b.labels)).abs() < 1e-12);
    }

    #[test]
    fn ari_length_mismatch() {
        let a = assignment(vec![1, 2]);
        let b = assignment(vec![1, 2, 1]);
        assert!(matches!(adjusted_rand_index(&a, &b), Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn ari_matches_bruteforce_on_random_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.random_range(4..40);
            let ca = rng.random_range(1..5usize);
            let cb = rng.random_range(1..5usize);
            let mut la: Vec<usize> = (0..n).map(|_| rng.random_range(1..=ca)).collect();
            let mut lb: Vec<usize> = (0..n).map(|_| rng.random_range(1..=cb)).collect();
            // Guarantee all clusters appear.
            for c in 1..=ca {
                la[c % n] = c;
            }
            for c in 1..=cb {
                lb[(c + 1) % n] = c;
            }
            let a = assignment(la);
            let b = assignment(lb);
            let fast = adjusted_rand_index(&a, &b).unwrap();
            let slow = ari_bruteforce(&a.labels, &b.labels);
            assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
        }
    }

    #[test]
    fn drop_small_clusters_paper_pattern() {
        // Sizes 201/277/139/60/5; the 5-member cluster goes.
        let mut labels = Vec::new();
        for (c, &s) in [201usize, 277, 139, 60, 5].iter().enumerate() {
            labels.extend(std::iter::repeat(c + 1).take(s));
        }
        let rows: Vec<Vec<f64>> = labels.iter().map(|&l| vec![l as f64]).collect();
        let d = dataset(&rows);
        let a = assignment(labels);
        let (after, kept) = drop_small_clusters(&a, &d, 10).unwrap();
        assert_eq!(after.n_clusters(), 4);
        assert_eq!(after.sizes, vec![201, 277, 139, 60]);
        assert_eq!(kept.n(), 677);
        assert_eq!(after.params.get("dropped_clusters").unwrap(), "5");
    }

    #[test]
    fn drop_small_clusters_min_one_is_identity() {
        let labels = vec![1, 2, 2, 3];
        let rows: Vec<Vec<f64>> = labels.iter().map(|&l| vec![l as f64]).collect();
        let d = dataset(&rows);
        let a = assignment(labels.clone());
        let (after, kept) = drop_small_clusters(&a, &d, 1).unwrap();
        assert_eq!(after.labels, labels);
        assert_eq!(kept, d);
    }

    #[test]
    fn drop_small_clusters_all_dropped() {
        let labels = vec![1, 2];
        let rows = vec![vec![0.0], vec![1.0]];
        let d = dataset(&rows);
        let a = assignment(labels);
        assert!(matches!(
            drop_small_clusters(&a, &d, 5),
            Err(Error::AllClustersDropped(5))
        ));
    }
}
