//! Frame-level alignment between detector predictions and a reference set of
//! safety-critical objects: Hungarian matching on box-center distance,
//! threshold gating, worst-score assignment for unmatched references, and
//! aggregation to frame means.

use serde::{Deserialize, Serialize};

use crate::assignment::{hungarian, CostMatrix};
use crate::geometry::{iou, rdd, Object25D};

/// Matching gates: a candidate pair survives only if IoU > alpha and
/// |RDD| < beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchThresholds {
    pub alpha: f64,
    pub beta: f64,
}

impl MatchThresholds {
    pub fn new(alpha: f64, beta: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta));
        Self { alpha, beta }
    }

    pub fn accepts(&self, pair_iou: f64, pair_rdd: f64) -> bool {
        pair_iou > self.alpha && pair_rdd.abs() < self.beta
    }
}

impl Default for MatchThresholds {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            beta: 0.2,
        }
    }
}

/// One surviving match, with the measures computed on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pred: usize,
    pub reference: usize,
    pub iou: f64,
    pub rdd: f64,
}

/// Alignment of one frame. Every reference index appears exactly once:
/// either in `pairs` or in `unmatched_refs`. Unmatched predictions do not
/// enter the aggregates; they are visible as the prediction indices absent
/// from `pairs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_refs: Vec<usize>,
    pub mean_iou: f64,
    pub mean_rdd: f64,
}

impl AlignmentResult {
    /// Prediction indices that did not survive matching.
    pub fn unmatched_preds(&self, n_preds: usize) -> Vec<usize> {
        let mut used = vec![false; n_preds];
        for p in &self.pairs {
            used[p.pred] = true;
        }
        (0..n_preds).filter(|&i| !used[i]).collect()
    }
}

/// Align predictions with references. Hungarian matching on center distance
/// proposes pairs; pairs failing the thresholds are dissolved (both members
/// become unmatched). Each reference contributes its pair's (iou, rdd), or
/// the worst scores (0, 1) when unmatched. Means run over all references;
/// an empty reference set yields the no-evidence convention (1, 0).
pub fn align_frame(
    preds: &[Object25D],
    refs: &[Object25D],
    t: &MatchThresholds,
) -> AlignmentResult {
    if refs.is_empty() {
        return AlignmentResult {
            pairs: Vec::new(),
            unmatched_refs: Vec::new(),
            mean_iou: 1.0,
            mean_rdd: 0.0,
        };
    }
    let mut pairs = Vec::new();
    let mut matched = vec![false; refs.len()];
    if !preds.is_empty() {
        let cost = CostMatrix::from_fn(preds.len(), refs.len(), |p, r| {
            preds[p].center_distance(&refs[r])
        });
        for (p, r) in hungarian(&cost) {
            let pair_iou = iou(&preds[p].rect(), &refs[r].rect());
            let pair_rdd = rdd(preds[p].d, refs[r].d);
            if t.accepts(pair_iou, pair_rdd) {
                pairs.push(MatchedPair {
                    pred: p,
                    reference: r,
                    iou: pair_iou,
                    rdd: pair_rdd,
                });
                matched[r] = true;
            }
        }
    }
    let unmatched_refs: Vec<usize> = (0..refs.len()).filter(|&r| !matched[r]).collect();
    let n = refs.len() as f64;
    let sum_iou: f64 = pairs.iter().map(|p| p.iou).sum();
    let sum_rdd: f64 = pairs.iter().map(|p| p.rdd).sum::<f64>() + unmatched_refs.len() as f64;
    AlignmentResult {
        pairs,
        unmatched_refs,
        mean_iou: sum_iou / n,
        mean_rdd: sum_rdd / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(cx: f64, cy: f64, w: f64, h: f64, d: f64) -> Object25D {
        Object25D::new(cx, cy, w, h, d)
    }

    #[test]
    fn perfect_predictions() {
        let refs = vec![obj(10.0, 10.0, 8.0, 8.0, 5.0), obj(40.0, 12.0, 6.0, 6.0, 9.0)];
        let preds = refs.clone();
        let r = align_frame(&preds, &refs, &MatchThresholds::new(0.5, 0.1));
        assert_eq!(r.pairs.len(), 2);
        assert!(r.unmatched_refs.is_empty());
        assert_eq!(r.mean_iou, 1.0);
        assert_eq!(r.mean_rdd, 0.0);
    }

    #[test]
    fn no_predictions_worst_scores() {
        let refs = vec![obj(10.0, 10.0, 8.0, 8.0, 5.0), obj(40.0, 12.0, 6.0, 6.0, 9.0)];
        let r = align_frame(&[], &refs, &MatchThresholds::default());
        assert_eq!(r.mean_iou, 0.0);
        assert_eq!(r.mean_rdd, 1.0);
        assert_eq!(r.unmatched_refs, vec![0, 1]);
    }

    #[test]
    fn empty_reference_convention() {
        let preds = vec![obj(10.0, 10.0, 8.0, 8.0, 5.0)];
        let r = align_frame(&preds, &[], &MatchThresholds::default());
        assert_eq!(r.mean_iou, 1.0);
        assert_eq!(r.mean_rdd, 0.0);
        assert!(r.pairs.is_empty());
        assert_eq!(r.unmatched_preds(1), vec![0]);
    }

    #[test]
    fn low_iou_pair_dissolved() {
        // overlap exists but iou ~ 0.39 < alpha = 0.5
        let refs = vec![obj(10.0, 10.0, 10.0, 10.0, 5.0)];
        let preds = vec![obj(14.0, 10.0, 10.0, 10.0, 5.0)];
        let r = align_frame(&preds, &refs, &MatchThresholds::new(0.5, 0.1));
        assert!(r.pairs.is_empty());
        assert_eq!(r.unmatched_refs, vec![0]);
        assert_eq!(r.mean_iou, 0.0);
        assert_eq!(r.mean_rdd, 1.0);
    }

    #[test]
    fn depth_gate_dissolves() {
        let refs = vec![obj(10.0, 10.0, 10.0, 10.0, 5.0)];
        let preds = vec![obj(10.0, 10.0, 10.0, 10.0, 8.0)]; // rdd = 0.6
        let strict = align_frame(&preds, &refs, &MatchThresholds::new(0.3, 0.2));
        assert!(strict.pairs.is_empty());
        let loose = align_frame(&preds, &refs, &MatchThresholds::new(0.3, 0.7));
        assert_eq!(loose.pairs.len(), 1);
        assert!((loose.mean_rdd - 0.6).abs() < 1e-12);
    }

    #[test]
    fn crossed_objects_matched_by_center_distance() {
        let refs = vec![
            obj(10.0, 10.0, 8.0, 8.0, 5.0),
            obj(50.0, 10.0, 8.0, 8.0, 12.0),
        ];
        // predictions listed in swapped order
        let preds = vec![
            obj(50.0, 10.0, 8.0, 8.0, 12.0),
            obj(10.0, 10.0, 8.0, 8.0, 5.0),
        ];
        let r = align_frame(&preds, &refs, &MatchThresholds::new(0.5, 0.1));
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.mean_iou, 1.0);
    }

    #[test]
    fn extra_unmatched_reference_moves_means_toward_worst() {
        let refs = vec![obj(10.0, 10.0, 8.0, 8.0, 5.0)];
        let preds = refs.clone();
        let base = align_frame(&preds, &refs, &MatchThresholds::default());
        let mut refs2 = refs.clone();
        refs2.push(obj(100.0, 80.0, 6.0, 6.0, 15.0));
        let more = align_frame(&preds, &refs2, &MatchThresholds::default());
        assert!(more.mean_iou <= base.mean_iou);
        assert!(more.mean_rdd >= base.mean_rdd);
    }
}
