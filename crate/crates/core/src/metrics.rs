//! Risk-relevant evaluation metrics: the spatial-coverage score and its
//! regression target, Pearson correlation for the proxy validation, RMSE,
//! and the recall / true-positive / false-negative analyses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alignment::{align_frame, MatchThresholds};
use crate::error::{Error, Result};
use crate::geometry::{dr, iog, Object25D};

/// Spatial-coverage score of a prediction against one ground truth:
/// IoG(P, G) * DR(d_P, d_G). 1 means the prediction fully covers the ground
/// truth and is no farther than it.
pub fn usc_pair(p: &Object25D, g: &Object25D) -> f64 {
    iog(&p.rect(), &g.rect()) * dr(p.d, g.d)
}

/// Frame-level coverage: per-ground-truth scores, their mean, and the
/// regression target 1 - mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UscScore {
    pub per_gt: Vec<(usize, f64)>,
    pub mean_usc: f64,
    pub target: f64,
}

/// Score a frame: pair predictions with ground truths using the alignment
/// procedure (Hungarian on center distance, threshold gating); matched
/// ground truths score `usc_pair`, unmatched score 0. The mean runs over
/// all ground truths; with no ground truths there is no coverage
/// obligation (mean 1, target 0).
pub fn usc_frame(preds: &[Object25D], gts: &[Object25D], t: &MatchThresholds) -> UscScore {
    if gts.is_empty() {
        return UscScore {
            per_gt: Vec::new(),
            mean_usc: 1.0,
            target: 0.0,
        };
    }
    let alignment = align_frame(preds, gts, t);
    let mut per_gt: Vec<(usize, f64)> = (0..gts.len()).map(|i| (i, 0.0)).collect();
    for pair in &alignment.pairs {
        per_gt[pair.reference].1 = usc_pair(&preds[pair.pred], &gts[pair.reference]);
    }
    let mean_usc = per_gt.iter().map(|(_, v)| v).sum::<f64>() / gts.len() as f64;
    UscScore {
        per_gt,
        mean_usc,
        target: 1.0 - mean_usc,
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Root mean squared error between an estimate series and a target series.
pub fn rmse(est: &[f64], tgt: &[f64]) -> Result<f64> {
    if est.len() != tgt.len() {
        return Err(Error::LengthMismatch {
            left: est.len(),
            right: tgt.len(),
        });
    }
    if est.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let sum: f64 = est.iter().zip(tgt).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sum / est.len() as f64).sqrt())
}

/// The three object sets of one frame, as used by the dataset-level
/// experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameObjects {
    pub condition: String,
    /// Detector predictions.
    pub preds: Vec<Object25D>,
    /// Depth-retrieved safety-critical objects.
    pub retrieved: Vec<Object25D>,
    /// Ground-truth annotations.
    pub gts: Vec<Object25D>,
}

/// The proxy validation: per frame, measure the predictions against the
/// retrieved objects and against the ground truths, then correlate the two
/// per-frame series. Returns (r for mean IoU, r for mean RDD).
pub fn correlation_experiment(
    frames: &[FrameObjects],
    t: &MatchThresholds,
) -> Result<(f64, f64)> {
    let mut s_iou = Vec::with_capacity(frames.len());
    let mut s_rdd = Vec::with_capacity(frames.len());
    let mut g_iou = Vec::with_capacity(frames.len());
    let mut g_rdd = Vec::with_capacity(frames.len());
    for f in frames {
        let s = align_frame(&f.preds, &f.retrieved, t);
        let g = align_frame(&f.preds, &f.gts, t);
        s_iou.push(s.mean_iou);
        s_rdd.push(s.mean_rdd);
        g_iou.push(g.mean_iou);
        g_rdd.push(g.mean_rdd);
    }
    Ok((pearson(&s_iou, &g_iou)?, pearson(&s_rdd, &g_rdd)?))
}

/// Recall bookkeeping for one condition at one threshold setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    /// Condition label annotated with the threshold setting.
    pub condition: String,
    pub gt_count: usize,
    /// Ground truths recalled by the depth-retrieved objects.
    pub retrieved_by_s: usize,
    /// Ground truths recalled by the detector predictions.
    pub retrieved_by_p: usize,
    /// Of the detector's true positives, how many the retrieval approves:
    /// (retrieved, total).
    pub approved_tp: (usize, usize),
    /// Of the detector's false negatives, how many the retrieval identifies:
    /// (retrieved, total).
    pub identified_fn: (usize, usize),
}

impl RecallReport {
    pub fn recall_by_s(&self) -> f64 {
        ratio(self.retrieved_by_s, self.gt_count)
    }

    pub fn recall_by_p(&self) -> f64 {
        ratio(self.retrieved_by_p, self.gt_count)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Which ground truths are matched by the given prediction set.
fn recalled(objects: &[Object25D], gts: &[Object25D], t: &MatchThresholds) -> Vec<bool> {
    let mut hit = vec![false; gts.len()];
    for pair in align_frame(objects, gts, t).pairs {
        hit[pair.reference] = true;
    }
    hit
}

/// Per condition and per threshold setting: recall of the ground truths by
/// the retrieved set and by the detector, plus the detector TP/FN partition
/// and how much of each the retrieval recovers.
pub fn recall_analysis(
    frames: &[FrameObjects],
    t_strict: &MatchThresholds,
    t_loose: &MatchThresholds,
) -> Result<Vec<RecallReport>> {
    if frames.iter().any(|f| f.condition.is_empty()) {
        return Err(Error::InvalidConfig(
            "frame without a condition label".to_string(),
        ));
    }
    let mut by_condition: BTreeMap<&str, Vec<&FrameObjects>> = BTreeMap::new();
    for f in frames {
        by_condition.entry(f.condition.as_str()).or_default().push(f);
    }
    let mut reports = Vec::new();
    for (condition, frames) in &by_condition {
        for t in [t_strict, t_loose] {
            let mut report = RecallReport {
                condition: format!("{condition} ({}, {})", t.alpha, t.beta),
                gt_count: 0,
                retrieved_by_s: 0,
                retrieved_by_p: 0,
                approved_tp: (0, 0),
                identified_fn: (0, 0),
            };
            for f in frames {
                let by_p = recalled(&f.preds, &f.gts, t);
                let by_s = recalled(&f.retrieved, &f.gts, t);
                report.gt_count += f.gts.len();
                for (p_hit, s_hit) in by_p.iter().zip(&by_s) {
                    if *s_hit {
                        report.retrieved_by_s += 1;
                    }
                    if *p_hit {
                        report.retrieved_by_p += 1;
                        report.approved_tp.1 += 1;
                        if *s_hit {
                            report.approved_tp.0 += 1;
                        }
                    } else {
                        report.identified_fn.1 += 1;
                        if *s_hit {
                            report.identified_fn.0 += 1;
                        }
                    }
                }
            }
            reports.push(report);
        }
    }
    Ok(reports)
}
