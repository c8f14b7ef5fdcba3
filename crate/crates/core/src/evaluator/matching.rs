use super::EvalError;

/// Intersection over union of two `[x, y, w, h]` boxes.
pub fn iou(a: [f64; 4], b: [f64; 4]) -> Result<f64, EvalError> {
    for r in [a, b] {
        if !(r[2] > 0.0 && r[3] > 0.0) {
            return Err(EvalError::ZeroArea(r));
        }
    }
    Ok(iou_unchecked(&a, &b))
}

pub(crate) fn iou_unchecked(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let iw = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
    let ih = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    inter / (a[2] * a[3] + b[2] * b[3] - inter)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    /// Matched ground-truth index per detection, `None` for a false positive.
    pub det_matches: Vec<Option<usize>>,
    pub gt_matched: Vec<bool>,
}

impl MatchResult {
    pub fn true_positives(&self) -> Vec<bool> {
        self.det_matches.iter().map(Option::is_some).collect()
    }
}

/// Greedy matching for one image and category. `dets` must already be in
/// descending score order.
pub fn match_greedy(
    dets: &[[f64; 4]],
    gts: &[[f64; 4]],
    thresh: f64,
) -> Result<MatchResult, EvalError> {
    let ious = iou_matrix(dets, gts)?;
    let ignore = vec![false; gts.len()];
    let det_matches = assign(&ious, gts.len(), &ignore, thresh);
    let mut gt_matched = vec![false; gts.len()];
    for g in det_matches.iter().flatten() {
        gt_matched[*g] = true;
    }
    Ok(MatchResult {
        det_matches,
        gt_matched,
    })
}

pub(crate) fn iou_matrix(dets: &[[f64; 4]], gts: &[[f64; 4]]) -> Result<Vec<Vec<f64>>, EvalError> {
    dets.iter()
        .map(|d| gts.iter().map(|g| iou(*d, *g)).collect())
        .collect()
}

/// Each detection in turn takes the unmatched ground truth with the highest
/// IoU at or above `thresh`, lowest index on ties. Ground truth that is not
/// ignored is always preferred over ignored ground truth.
pub(crate) fn assign(
    ious: &[Vec<f64>],
    num_gt: usize,
    gt_ignore: &[bool],
    thresh: f64,
) -> Vec<Option<usize>> {
    let mut taken = vec![false; num_gt];
    ious.iter()
        .map(|row| {
            let best = |want_ignored: bool| {
                let mut best: Option<(usize, f64)> = None;
                for g in 0..num_gt {
                    if taken[g] || gt_ignore[g] != want_ignored || row[g] < thresh {
                        continue;
                    }
                    if best.map_or(true, |(_, v)| row[g] > v) {
                        best = Some((g, row[g]));
                    }
                }
                best.map(|(g, _)| g)
            };
            let m = best(false).or_else(|| best(true));
            if let Some(g) = m {
                taken[g] = true;
            }
            m
        })
        .collect()
}

/// Number of points on the recall grid `{0, 0.01, ..., 1}`.
pub const RECALL_POINTS: usize = 101;

/// 101-point interpolated AP from ranked true/false positive flags.
/// Undefined when `num_gt` is zero.
pub fn average_precision(tps: &[bool], num_gt: usize) -> Option<f64> {
    if num_gt == 0 {
        return None;
    }
    // Cumulative true positives and precision per rank.
    let mut cum = Vec::with_capacity(tps.len());
    let mut prec = Vec::with_capacity(tps.len());
    let mut tp = 0usize;
    for (k, &hit) in tps.iter().enumerate() {
        tp += hit as usize;
        cum.push(tp);
        prec.push(tp as f64 / (k + 1) as f64);
    }
    for k in (0..prec.len().saturating_sub(1)).rev() {
        prec[k] = prec[k].max(prec[k + 1]);
    }
    let mut sum = 0.0;
    let mut k = 0;
    for i in 0..RECALL_POINTS {
        // Recall tp/num_gt reaches i/100 exactly when 100·tp ≥ i·num_gt.
        while k < cum.len() && cum[k] * 100 < i * num_gt {
            k += 1;
        }
        if k < cum.len() {
            sum += prec[k];
        }
    }
    Some(sum / RECALL_POINTS as f64)
}

/// Fraction of ground truth recovered by the ranked detections.
pub fn recall(tps: &[bool], num_gt: usize) -> Option<f64> {
    (num_gt > 0).then(|| tps.iter().filter(|&&t| t).count() as f64 / num_gt as f64)
}
