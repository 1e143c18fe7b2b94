//! Dataset manifests, the BA/AP/AUC metrics and per-subset evaluation
//! reports.

use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agg::{AggregatedScore, AggregationMethod};
use crate::crop::CropperConfig;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};

/// Subset name reserved for the shared pool of real images that
/// synthetic-only subsets are evaluated against.
pub const REAL_POOL_SUBSET: &str = "real-pool";

/// One dataset entry: image path, binary label, subset name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    /// 0 = real, 1 = synthetic.
    pub label: u8,
    pub subset: String,
}

/// The evaluation dataset: unique paths, labels in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

/// An image-level score joined with its ground-truth label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScore<S> {
    pub image_id: String,
    pub score: S,
    pub label: u8,
    pub subset: String,
}

/// BA/AP/AUC for one evaluated subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetMetrics {
    pub subset: String,
    pub ba: f64,
    pub ap: f64,
    pub auc: f64,
    pub positives: usize,
    pub negatives: usize,
}

/// Unweighted means across subsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverallMetrics {
    pub ba: f64,
    pub ap: f64,
    pub auc: f64,
}

/// The full evaluation report: per-subset and overall metrics plus the run
/// configuration that produced the scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: CropperConfig,
    pub aggregation: AggregationMethod,
    pub threshold: f64,
    pub positives: usize,
    pub negatives: usize,
    pub subsets: Vec<SubsetMetrics>,
    pub overall: OverallMetrics,
}

fn split_counts<S: Scalar>(items: &[LabeledScore<S>]) -> (usize, usize) {
    let positives = items.iter().filter(|i| i.label == 1).count();
    (positives, items.len() - positives)
}

/// Balanced accuracy `(TPR + TNR) / 2` with prediction `score >= threshold`.
pub fn balanced_accuracy<S: Scalar>(items: &[LabeledScore<S>], threshold: f64) -> Result<f64> {
    let (positives, negatives) = split_counts(items);
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            context: "balanced accuracy input".into(),
        });
    }
    let mut true_pos = 0usize;
    let mut true_neg = 0usize;
    for item in items {
        let predicted_synthetic = to_f64(item.score) >= threshold;
        match (item.label, predicted_synthetic) {
            (1, true) => true_pos += 1,
            (0, false) => true_neg += 1,
            _ => {}
        }
    }
    let tpr = true_pos as f64 / positives as f64;
    let tnr = true_neg as f64 / negatives as f64;
    Ok((tpr + tnr) / 2.0)
}

/// Area under the ROC curve as the Mann-Whitney statistic: wins plus half
/// credit for ties over all positive-negative pairs. Computed by sorting and
/// walking tie groups; the arithmetic is exact integer counting, so the
/// result matches the all-pairs oracle bit for bit.
pub fn auc<S: Scalar>(items: &[LabeledScore<S>]) -> Result<f64> {
    let (positives, negatives) = split_counts(items);
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            context: "AUC input".into(),
        });
    }

    let mut pairs: Vec<(S, u8)> = items.iter().map(|i| (i.score, i.label)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are finite"));

    // Twice the Mann-Whitney numerator, so ties contribute integers.
    let mut numerator2 = 0u64;
    let mut negatives_below = 0u64;
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i;
        let mut pos_in_group = 0u64;
        let mut neg_in_group = 0u64;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            match pairs[j].1 {
                1 => pos_in_group += 1,
                _ => neg_in_group += 1,
            }
            j += 1;
        }
        numerator2 += pos_in_group * (2 * negatives_below + neg_in_group);
        negatives_below += neg_in_group;
        i = j;
    }
    let denominator2 = 2 * positives as u64 * negatives as u64;
    Ok(numerator2 as f64 / denominator2 as f64)
}

/// Average precision: items ranked by descending score (ties broken by stable
/// input order), `AP = (1/P) * sum of precision@k over positive ranks k`.
pub fn average_precision<S: Scalar>(items: &[LabeledScore<S>]) -> Result<f64> {
    let (positives, _) = split_counts(items);
    if positives == 0 {
        return Err(Error::NoPositives);
    }
    let mut ranked: Vec<&LabeledScore<S>> = items.iter().collect();
    ranked.sort_by(|a, b| b.score.partial_cmp(&a.score).expect("scores are finite"));

    let mut seen_positives = 0usize;
    let mut sum = 0.0f64;
    for (k, item) in ranked.iter().enumerate() {
        if item.label == 1 {
            seen_positives += 1;
            sum += seen_positives as f64 / (k + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

/// Joins the dataset manifest with aggregated scores and computes per-subset
/// and overall metrics.
///
/// Subsets holding only synthetic images are evaluated against the shared
/// `real-pool` subset; that pool is not reported as a subset of its own.
/// The overall row is the unweighted mean across evaluated subsets.
pub fn evaluate<S: Scalar>(
    manifest: &DatasetManifest,
    aggregated: &[AggregatedScore<S>],
    config: &CropperConfig,
    aggregation: &AggregationMethod,
    threshold: f64,
) -> Result<EvalReport> {
    let mut by_id: HashMap<&str, S> = HashMap::with_capacity(aggregated.len());
    for agg in aggregated {
        if by_id.insert(agg.image_id.as_str(), agg.score).is_some() {
            return Err(Error::DuplicateScore {
                id: agg.image_id.clone(),
            });
        }
    }

    let mut labeled: Vec<LabeledScore<S>> = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let image_id = crate::manifest::image_id_for_path(&entry.path);
        let score = *by_id.get(image_id.as_str()).ok_or(Error::MissingScore {
            id: entry.path.display().to_string(),
        })?;
        labeled.push(LabeledScore {
            image_id,
            score,
            label: entry.label,
            subset: entry.subset.clone(),
        });
    }

    // Subsets in first-appearance order.
    let mut subset_names: Vec<&str> = Vec::new();
    for item in &labeled {
        if item.subset != REAL_POOL_SUBSET && !subset_names.contains(&item.subset.as_str()) {
            subset_names.push(&item.subset);
        }
    }
    if subset_names.is_empty() {
        return Err(Error::EmptyInput);
    }
    let real_pool: Vec<&LabeledScore<S>> = labeled
        .iter()
        .filter(|i| i.subset == REAL_POOL_SUBSET)
        .collect();

    let mut subsets = Vec::with_capacity(subset_names.len());
    for name in subset_names {
        let mut items: Vec<LabeledScore<S>> = labeled
            .iter()
            .filter(|i| i.subset == name)
            .cloned()
            .collect();
        let (pos, neg) = split_counts(&items);
        if pos > 0 && neg == 0 {
            if real_pool.is_empty() {
                return Err(Error::SingleClass {
                    context: format!("subset {name:?}"),
                });
            }
            items.extend(real_pool.iter().map(|i| (*i).clone()));
        } else if pos == 0 {
            return Err(Error::SingleClass {
                context: format!("subset {name:?}"),
            });
        }
        let (pos, neg) = split_counts(&items);
        subsets.push(SubsetMetrics {
            subset: name.to_string(),
            ba: balanced_accuracy(&items, threshold)?,
            ap: average_precision(&items)?,
            auc: auc(&items)?,
            positives: pos,
            negatives: neg,
        });
    }

    let count = subsets.len() as f64;
    let overall = OverallMetrics {
        ba: subsets.iter().map(|s| s.ba).sum::<f64>() / count,
        ap: subsets.iter().map(|s| s.ap).sum::<f64>() / count,
        auc: subsets.iter().map(|s| s.auc).sum::<f64>() / count,
    };
    let (positives, negatives) = split_counts(&labeled);
    Ok(EvalReport {
        config: config.clone(),
        aggregation: *aggregation,
        threshold,
        positives,
        negatives,
        subsets,
        overall,
    })
}
