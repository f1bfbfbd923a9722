//! Single Feature Introduction Test: per-feature (and feature-interaction)
//! significance for a trained classifier.
//!
//! For every tested feature set S, each row is run through the model twice:
//! once with only the intercept coordinate kept (all other inputs zeroed)
//! and once with the intercept plus the coordinates in S. The per-row loss
//! difference, shaved by the robustness margin beta, feeds an exact sign
//! test against a fair coin, and the set's importance is the median
//! difference with a nonparametric order-statistic confidence interval.
//!
//! No sub-models are refit anywhere: masking inputs stands in for refitting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::mlp::MlpModel;

/// A sorted set of input coordinates, excluding the intercept (column 0).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureSet(Vec<usize>);

impl FeatureSet {
    /// Sorted, deduplicated, intercept-free set. Empty input is rejected;
    /// use [`FeatureSet::empty`] for the intercept-only baseline.
    pub fn new(cols: Vec<usize>) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::EmptyFeatureSet);
        }
        if cols.contains(&0) {
            return Err(Error::InterceptInFeatureSet);
        }
        let mut cols = cols;
        cols.sort_unstable();
        cols.dedup();
        Ok(FeatureSet(cols))
    }

    pub fn empty() -> Self {
        FeatureSet(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, col: usize) -> bool {
        self.0.binary_search(&col).is_ok()
    }

    pub fn columns(&self) -> &[usize] {
        &self.0
    }

    pub fn with_column(&self, col: usize) -> Result<Self> {
        let mut cols = self.0.clone();
        cols.push(col);
        FeatureSet::new(cols)
    }

    /// All strict subsets with one fewer element, in lexicographic order;
    /// a singleton yields the empty (intercept-only) set.
    pub fn subsets_one_smaller(&self) -> Vec<FeatureSet> {
        if self.order() <= 1 {
            return vec![FeatureSet::empty()];
        }
        let mut subsets: Vec<FeatureSet> = (0..self.0.len())
            .map(|skip| {
                FeatureSet(
                    self.0
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &c)| c)
                        .collect(),
                )
            })
            .collect();
        subsets.sort();
        subsets
    }

    /// Feature names for the columns (column `c` maps to `names[c-1]`).
    pub fn names(&self, feature_names: &[String]) -> Vec<String> {
        self.0.iter().map(|&c| feature_names[c - 1].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SfitParams {
    pub alpha: f64,
    pub beta: f64,
    pub max_order: usize,
    /// Also test every pair at order 2 (when p <= 10), not only pairs that
    /// extend a significant first-order feature.
    pub all_pairs: bool,
}

impl Default for SfitParams {
    fn default() -> Self {
        SfitParams {
            alpha: 0.05,
            beta: 0.05,
            max_order: 1,
            all_pairs: true,
        }
    }
}

impl SfitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Invalid(format!("alpha {} outside (0,1)", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::Invalid(format!("beta {} outside [0,1)", self.beta)));
        }
        if !(1..=3).contains(&self.max_order) {
            return Err(Error::Invalid(format!("max_order {} outside 1..=3", self.max_order)));
        }
        Ok(())
    }
}

/// Test outcome for one feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct SfitEntry {
    pub features: FeatureSet,
    pub order: usize,
    /// Median of (1-beta) * baseline loss - masked-set loss; the importance.
    pub median: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// Sign test against the set's best strict sub-model (the intercept-only
    /// model at order 1).
    pub p_value: f64,
    pub significant: bool,
    pub n_positive: usize,
    pub n_total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfitReport {
    pub params: SfitParams,
    /// Cluster the run was restricted to, if any.
    pub cluster: Option<usize>,
    pub model_fingerprint: String,
    pub feature_names: Vec<String>,
    pub entries: Vec<SfitEntry>,
}

impl SfitReport {
    pub fn entries_of_order(&self, order: usize) -> impl Iterator<Item = &SfitEntry> {
        self.entries.iter().filter(move |e| e.order == order)
    }

    /// Significant first-order feature names, by ascending column.
    pub fn significant_first_order(&self) -> Vec<String> {
        self.entries_of_order(1)
            .filter(|e| e.significant)
            .map(|e| e.features.names(&self.feature_names).join(""))
            .collect()
    }

    pub fn entry_label(&self, e: &SfitEntry) -> String {
        e.features.names(&self.feature_names).join(", ")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "features": e.features.names(&self.feature_names),
                    "order": e.order,
                    "median": e.median,
                    "ci": [e.ci_lower, e.ci_upper],
                    "p_value": e.p_value,
                    "n_positive": e.n_positive,
                    "n_total": e.n_total,
                    "significant": e.significant,
                })
            })
            .collect();
        json!({
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "max_order": self.params.max_order,
                "all_pairs": self.params.all_pairs,
            },
            "cluster": self.cluster,
            "model_fingerprint": self.model_fingerprint,
            "feature_names": self.feature_names,
            "entries": entries,
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }

    /// Aligned text table of the significant entries, by descending median.
    pub fn to_text_table(&self) -> String {
        let ranked = rank_features(self, self.entries.len());
        let rows: Vec<(String, f64, f64, f64)> = ranked
            .iter()
            .map(|e| (self.entry_label(e), e.median, e.ci_lower, e.ci_upper))
            .collect();
        format_sfit_table(&rows)
    }
}

/// "Variable | Median | CI lower | CI upper" rows, aligned.
pub fn format_sfit_table(rows: &[(String, f64, f64, f64)]) -> String {
    let mut out = String::new();
    let name_w = rows
        .iter()
        .map(|r| r.0.len())
        .chain(std::iter::once("Variable".len()))
        .max()
        .unwrap();
    out.push_str(&format!(
        "{:<name_w$}  {:>12}  {:>12}  {:>12}\n",
        "Variable", "Median", "CI lower", "CI upper"
    ));
    if rows.is_empty() {
        out.push_str("(no significant features)\n");
        return out;
    }
    for (name, median, lo, hi) in rows {
        out.push_str(&format!(
            "{name:<name_w$}  {median:>12.6}  {lo:>12.6}  {hi:>12.6}\n"
        ));
    }
    out
}

/// Keeps the intercept (coordinate 0) and the coordinates in `s`; zeroes
/// everything else. The empty set yields the intercept-only input.
pub fn mask(x: &[f64], s: &FeatureSet) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if let Some(&max) = s.columns().last() {
        if max >= x.len() {
            return Err(Error::DimensionMismatch {
                expected: max + 1,
                got: x.len(),
            });
        }
    }
    let mut out = vec![0.0; x.len()];
    out[0] = x[0];
    for &c in s.columns() {
        out[c] = x[c];
    }
    Ok(out)
}

pub(crate) fn delta_from_losses(baseline: f64, masked: f64, beta: f64) -> f64 {
    (1.0 - beta) * baseline - masked
}

/// (1-beta) * loss(intercept only) - loss(intercept plus S) for one row.
pub fn delta(model: &MlpModel, x: &[f64], y: usize, s: &FeatureSet, beta: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    let baseline = model.loss(&mask(x, &FeatureSet::empty())?, y)?;
    let masked = model.loss(&mask(x, s)?, y)?;
    Ok(delta_from_losses(baseline, masked, beta))
}

/// Exact one-sided tail P(X >= n_pos) for X ~ Binomial(n, 1/2). Uses exact
/// integer arithmetic up to n = 64 and a compensated downward term
/// recurrence beyond.
pub fn binom_test_greater(n_pos: usize, n: usize) -> Result<f64> {
    if n == 0 || n_pos > n {
        return Err(Error::InvalidCounts { n_pos, n });
    }
    if n_pos == 0 {
        return Ok(1.0);
    }
    if n <= 64 {
        // C(n, n_pos) by exact multiplicative steps, then walk the tail up.
        let mut coef: u128 = 1;
        for i in 0..n_pos {
            coef = coef * (n - i) as u128 / (i + 1) as u128;
        }
        let mut tail: u128 = 0;
        let mut k = n_pos;
        loop {
            tail += coef;
            if k == n {
                break;
            }
            coef = coef * (n - k) as u128 / (k + 1) as u128;
            k += 1;
        }
        return Ok(tail as f64 / 2.0f64.powi(n as i32));
    }

    // term = C(n,k)/2^n walked downward from k = n; Kahan summation keeps
    // the accumulated error at a few ulps.
    let mut term = 0.5f64.powi(n as i32);
    let mut sum = term;
    let mut comp = 0.0f64;
    for k in (n_pos..n).rev() {
        term = term * (k + 1) as f64 / (n - k) as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum.min(1.0))
}

/// Standard normal quantile (Wichura's AS241, |relative error| well below
/// the 1e-9 documented tolerance).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Invalid(format!("quantile probability {p} outside (0,1)")));
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * poly(&A, r) / poly(&B, r));
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    Ok(if q < 0.0 { -val } else { val })
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_5,
    1.331_416_678_917_843_8e2,
    1.971_590_950_306_551_3e3,
    1.373_169_376_550_946_1e4,
    4.592_195_393_154_987e4,
    6.726_577_092_700_87e4,
    3.343_057_558_358_813e4,
    2.509_080_928_730_122_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091e1,
    6.871_870_074_920_579e2,
    5.394_196_021_424_751e3,
    2.121_379_430_158_66e4,
    3.930_789_580_009_271e4,
    2.872_908_573_572_194_3e4,
    5.226_495_278_852_545_5e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_545,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    2.417_807_251_774_506e-1,
    2.272_384_498_926_918_4e-2,
    7.745_450_142_783_414e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_8,
    1.676_384_830_183_803_8,
    6.897_673_349_851e-1,
    1.481_039_764_274_800_8e-1,
    1.519_866_656_361_645_7e-2,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    2.965_605_718_285_048_7e-1,
    2.653_218_952_657_612_3e-2,
    1.242_660_947_388_078_4e-3,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const F: [f64; 7] = [
    1.0,
    5.998_322_065_558_88e-1,
    1.369_298_809_227_358e-1,
    1.487_536_129_085_061_5e-2,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-6,
    1.421_511_758_316_446e-15,
];

/// Nonparametric confidence interval for a median: the order statistics at
/// the normal-approximation indices, clamped into range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianCi {
    pub lower: f64,
    pub upper: f64,
    /// 1-based order-statistic indices actually used.
    pub lo_index: usize,
    pub hi_index: usize,
}

pub fn median_ci(deltas: &[f64], alpha: f64) -> Result<MedianCi> {
    let n2 = deltas.len();
    if n2 < 2 {
        return Err(Error::TooFewSamples { got: n2, min: 2 });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!("alpha {alpha} outside (0,1)")));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = median_ci_indices(n2, alpha)?;
    Ok(MedianCi {
        lower: sorted[lo - 1],
        upper: sorted[hi - 1],
        lo_index: lo,
        hi_index: hi,
    })
}

/// 1-based indices floor((n+1)/2 - q*sqrt(n)/2) and ceil((n+1)/2 + q*sqrt(n)/2)
/// with q the 1-alpha/2 standard normal quantile, clamped to [1, n].
pub fn median_ci_indices(n2: usize, alpha: f64) -> Result<(usize, usize)> {
    let q = normal_quantile(1.0 - alpha / 2.0)?;
    let center = (n2 as f64 + 1.0) / 2.0;
    let half = q * (n2 as f64).sqrt() / 2.0;
    let lo = (center - half).floor().max(1.0) as usize;
    let hi = ((center + half).ceil() as usize).min(n2);
    Ok((lo.min(n2), hi.max(1)))
}

/// Lower-middle order statistic, consistent with the CI being order
/// statistics (an interpolated midpoint could fall outside them).
pub(crate) fn median_lower(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() - 1) / 2]
}

/// First-order run over every feature, with a CI attached to each entry
/// whether significant or not.
pub fn sfit_first_order(model: &MlpModel, d2: &Dataset, params: &SfitParams) -> Result<SfitReport> {
    let mut p1 = params.clone();
    p1.max_order = 1;
    run_sfit(model, d2, &p1, None)
}

/// Hierarchical interaction run: order-k candidates extend an order-(k-1)
/// tested set by a significant first-order feature (plus, optionally, every
/// pair when p <= 10). Importance stays on the intercept-baseline scale;
/// the sign test compares each set against its best strict sub-model.
pub fn sfit_higher_order(model: &MlpModel, d2: &Dataset, params: &SfitParams) -> Result<SfitReport> {
    if params.max_order < 2 {
        return Err(Error::Invalid("higher-order run requires max_order >= 2".into()));
    }
    run_sfit(model, d2, params, None)
}

/// Runs SFIT on the rows labeled `cluster` only; the loss stays the full
/// multi-class cross-entropy.
pub fn sfit_per_cluster(
    model: &MlpModel,
    d2: &Dataset,
    cluster: usize,
    params: &SfitParams,
) -> Result<SfitReport> {
    let labels = d2.labels().ok_or(Error::LabelMissing)?;
    let rows: Vec<usize> = (0..d2.n()).filter(|&i| labels[i] == cluster).collect();
    if rows.is_empty() {
        return Err(Error::UnknownCluster(cluster));
    }
    if rows.len() < 20 {
        return Err(Error::TooFewSamples {
            got: rows.len(),
            min: 20,
        });
    }
    let sub = d2.select_rows(&rows)?;
    run_sfit(model, &sub, params, Some(cluster))
}

fn run_sfit(
    model: &MlpModel,
    d2: &Dataset,
    params: &SfitParams,
    cluster: Option<usize>,
) -> Result<SfitReport> {
    params.validate()?;
    let labels = d2.labels().ok_or(Error::LabelMissing)?.to_vec();
    if d2.width() != model.input_width {
        return Err(Error::DimensionMismatch {
            expected: model.input_width,
            got: d2.width(),
        });
    }
    if !d2.has_intercept() {
        return Err(Error::Invalid("SFIT requires the intercept column".into()));
    }
    let p = d2.p();
    let n2 = d2.n();
    if n2 < 2 {
        return Err(Error::TooFewSamples { got: n2, min: 2 });
    }

    let masked_losses = |s: &FeatureSet| -> Result<Vec<f64>> {
        (0..n2)
            .map(|i| model.loss(&mask(d2.row(i), s)?, labels[i]))
            .collect()
    };

    let mut cache: BTreeMap<FeatureSet, Vec<f64>> = BTreeMap::new();
    cache.insert(FeatureSet::empty(), masked_losses(&FeatureSet::empty())?);

    let mut entries: Vec<SfitEntry> = Vec::new();
    let mut tested_prev: Vec<FeatureSet> = Vec::new();
    let mut significant_singles: Vec<usize> = Vec::new();

    // Order 1: every feature.
    for col in 1..=p {
        let set = FeatureSet::new(vec![col])?;
        let entry = build_entry(&set, params, &mut cache, &masked_losses)?;
        if entry.significant {
            significant_singles.push(col);
        }
        tested_prev.push(set);
        entries.push(entry);
    }

    for order in 2..=params.max_order {
        let mut candidates: BTreeSet<FeatureSet> = BTreeSet::new();
        for t in &tested_prev {
            for &f in &significant_singles {
                if !t.contains(f) {
                    candidates.insert(t.with_column(f)?);
                }
            }
        }
        if order == 2 && params.all_pairs && p <= 10 {
            for a in 1..=p {
                for b in a + 1..=p {
                    candidates.insert(FeatureSet::new(vec![a, b])?);
                }
            }
        }
        tested_prev = candidates.iter().cloned().collect();
        for set in &tested_prev {
            entries.push(build_entry(set, params, &mut cache, &masked_losses)?);
        }
    }

    Ok(SfitReport {
        params: params.clone(),
        cluster,
        model_fingerprint: model.fingerprint(),
        feature_names: d2.feature_names().to_vec(),
        entries,
    })
}

fn build_entry(
    set: &FeatureSet,
    params: &SfitParams,
    cache: &mut BTreeMap<FeatureSet, Vec<f64>>,
    masked_losses: &dyn Fn(&FeatureSet) -> Result<Vec<f64>>,
) -> Result<SfitEntry> {
    if !cache.contains_key(set) {
        let losses = masked_losses(set)?;
        cache.insert(set.clone(), losses);
    }

    // Reference sub-model for the sign test: the strict subset one smaller
    // with minimal median loss (ties to the lexicographically smallest),
    // which is the intercept-only baseline at order 1.
    let mut best_subset: Option<(FeatureSet, f64)> = None;
    for t in set.subsets_one_smaller() {
        if !cache.contains_key(&t) {
            let losses = masked_losses(&t)?;
            cache.insert(t.clone(), losses);
        }
        let med = median_lower(&cache[&t]);
        let better = match &best_subset {
            None => true,
            Some((_, best_med)) => med < *best_med,
        };
        if better {
            best_subset = Some((t, med));
        }
    }
    let (t_star, _) = best_subset.expect("at least one subset");

    let n2 = cache[set].len();
    let beta = params.beta;
    let baseline = &cache[&FeatureSet::empty()];
    let set_losses = &cache[set];
    let reference = &cache[&t_star];

    let importance_deltas: Vec<f64> = baseline
        .iter()
        .zip(set_losses)
        .map(|(&l0, &ls)| delta_from_losses(l0, ls, beta))
        .collect();
    let test_deltas: Vec<f64> = reference
        .iter()
        .zip(set_losses)
        .map(|(&lt, &ls)| delta_from_losses(lt, ls, beta))
        .collect();

    let n_positive = test_deltas.iter().filter(|&&d| d > 0.0).count();
    let p_value = binom_test_greater(n_positive, n2)?;
    let ci = median_ci(&importance_deltas, params.alpha)?;
    Ok(SfitEntry {
        features: set.clone(),
        order: set.order(),
        median: median_lower(&importance_deltas),
        ci_lower: ci.lower,
        ci_upper: ci.upper,
        p_value,
        significant: p_value < params.alpha,
        n_positive,
        n_total: n2,
    })
}

/// Significant entries by descending median, ties toward the smaller
/// feature columns; at most `k` of them.
pub fn rank_features<'r>(report: &'r SfitReport, k: usize) -> Vec<&'r SfitEntry> {
    let mut significant: Vec<&SfitEntry> = report.entries.iter().filter(|e| e.significant).collect();
    significant.sort_by(|a, b| {
        b.median
            .total_cmp(&a.median)
            .then_with(|| a.features.cmp(&b.features))
    });
    significant.truncate(k);
    significant
}
