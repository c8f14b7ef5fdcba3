//! COCO-style detection scoring: greedy IoU matching, 101-point
//! interpolated AP over an IoU sweep, and size-bucketed AP/AR.
//!
//! Detections are ranked per category by descending score. Equal scores
//! keep ground-truth image order, then prediction file order. Ground truth
//! marked `iscrowd` is treated as ignored.

mod matching;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocoio::{CocoDataset, SizeBucket, SizeBuckets};

pub use matching::{average_precision, iou, match_greedy, recall, MatchResult, RECALL_POINTS};
pub use report::{report, ReportLayout};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("box {0:?} has zero area")]
    ZeroArea([f64; 4]),
    #[error("detection {index}: {reason}")]
    InvalidDetection { index: usize, reason: String },
    #[error("detection {index}: unknown category id {category_id}")]
    UnknownCategory { index: usize, category_id: u64 },
    #[error("detection {index}: unknown image id {image_id}")]
    UnknownImage { index: usize, image_id: u64 },
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// One entry of a COCO results file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub image_id: u64,
    pub category_id: u64,
    pub bbox: [f64; 4],
    pub score: f64,
}

impl Detection {
    fn check(&self) -> Result<(), String> {
        let [x, y, w, h] = self.bbox;
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(format!("non-finite bbox {:?}", self.bbox));
        }
        if !(w > 0.0 && h > 0.0) {
            return Err(format!("bbox {:?} has non-positive size", self.bbox));
        }
        if !(0.0..=1.0).contains(&self.score) {
            return Err(format!("score {} outside [0, 1]", self.score));
        }
        Ok(())
    }
}

/// Reads a JSON array of detections and checks each one.
pub fn load_predictions(path: &Path) -> Result<Vec<Detection>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let dets: Vec<Detection> = serde_json::from_str(&text).map_err(|source| EvalError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    for (index, d) in dets.iter().enumerate() {
        d.check()
            .map_err(|reason| EvalError::InvalidDetection { index, reason })?;
    }
    Ok(dets)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub iou_sweep: Vec<f64>,
    pub size_metric_iou: f64,
    pub buckets: SizeBuckets,
    /// Detections kept per image and category, highest scores first.
    pub max_dets: usize,
    /// `None` reports per-class AP averaged over the sweep; `Some(t)`
    /// reports per-class AP at the single threshold `t`.
    pub per_class_iou: Option<f64>,
}

impl EvalConfig {
    pub fn coco_sweep() -> Vec<f64> {
        (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::InvalidConfig(m));
        if self.iou_sweep.is_empty() {
            return bad("empty IoU sweep".into());
        }
        let in_range = |t: f64| t > 0.0 && t <= 1.0;
        if !self.iou_sweep.iter().all(|&t| in_range(t)) {
            return bad(format!("IoU thresholds {:?} must lie in (0, 1]", self.iou_sweep));
        }
        if !self.iou_sweep.windows(2).all(|w| w[0] < w[1]) {
            return bad(format!("IoU thresholds {:?} must be strictly increasing", self.iou_sweep));
        }
        for t in [Some(self.size_metric_iou), self.per_class_iou].into_iter().flatten() {
            if !in_range(t) {
                return bad(format!("IoU threshold {t} must lie in (0, 1]"));
            }
        }
        if self.max_dets == 0 {
            return bad("max_dets must be at least 1".into());
        }
        let b = &self.buckets;
        if SizeBuckets::new(b.small_max(), b.medium_max()).is_none() {
            return bad(format!(
                "size buckets need 0 < small_max < medium_max, got {} and {}",
                b.small_max(),
                b.medium_max()
            ));
        }
        Ok(())
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iou_sweep: EvalConfig::coco_sweep(),
            size_metric_iou: 0.5,
            buckets: SizeBuckets::default(),
            max_dets: 100,
            per_class_iou: None,
        }
    }
}

/// Metrics in `[0, 1]`; `None` where no ground truth exists to score.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(rename = "mAP")]
    pub map: Option<f64>,
    #[serde(rename = "AP_S")]
    pub ap_small: Option<f64>,
    #[serde(rename = "AP_M")]
    pub ap_medium: Option<f64>,
    #[serde(rename = "AP_L")]
    pub ap_large: Option<f64>,
    #[serde(rename = "AR_S")]
    pub ar_small: Option<f64>,
    #[serde(rename = "AR_M")]
    pub ar_medium: Option<f64>,
    #[serde(rename = "AR_L")]
    pub ar_large: Option<f64>,
    /// Keyed by category id.
    pub per_class_ap: BTreeMap<u64, Option<f64>>,
    pub category_names: BTreeMap<u64, String>,
}

impl EvalResult {
    pub fn ap(&self, bucket: SizeBucket) -> Option<f64> {
        match bucket {
            SizeBucket::Small => self.ap_small,
            SizeBucket::Medium => self.ap_medium,
            SizeBucket::Large => self.ap_large,
        }
    }

    pub fn ar(&self, bucket: SizeBucket) -> Option<f64> {
        match bucket {
            SizeBucket::Small => self.ar_small,
            SizeBucket::Medium => self.ar_medium,
            SizeBucket::Large => self.ar_large,
        }
    }

    /// Every scalar metric in report order followed by per-class values.
    pub fn values(&self) -> Vec<Option<f64>> {
        let mut v = vec![
            self.map,
            self.ap_small,
            self.ap_medium,
            self.ap_large,
            self.ar_small,
            self.ar_medium,
            self.ar_large,
        ];
        v.extend(self.per_class_ap.values().copied());
        v
    }
}

struct GtBox {
    bbox: [f64; 4],
    area: f64,
    ignore: bool,
}

/// Detections and ground truth for one (image, category) pair.
struct Cell {
    class: usize,
    image_rank: usize,
    gts: Vec<GtBox>,
    /// `(score, input index, bbox)` in ranking order, truncated.
    dets: Vec<(f64, usize, [f64; 4])>,
    ious: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Tp,
    Fp,
    Ignored,
}

/// Scope of one matching pass.
#[derive(Clone, Copy)]
struct Pass {
    thresh: f64,
    bucket: Option<SizeBucket>,
}

/// Per-class AP and recall of one pass; `None` for classes without
/// ground truth in scope.
struct PassScores {
    ap: Vec<Option<f64>>,
    recall: Vec<Option<f64>>,
}

pub fn evaluate(
    preds: &[Detection],
    gt: &CocoDataset,
    cfg: &EvalConfig,
) -> Result<EvalResult, EvalError> {
    cfg.validate()?;
    let classes: Vec<u64> = {
        let mut c: Vec<u64> = gt.categories.iter().map(|c| c.id).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let class_index: BTreeMap<u64, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut image_ids: Vec<u64> = gt.images.iter().map(|i| i.id).collect();
    image_ids.sort_unstable();
    let image_rank: BTreeMap<u64, usize> = image_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    for (index, d) in preds.iter().enumerate() {
        d.check()
            .map_err(|reason| EvalError::InvalidDetection { index, reason })?;
        if !class_index.contains_key(&d.category_id) {
            return Err(EvalError::UnknownCategory {
                index,
                category_id: d.category_id,
            });
        }
        if !image_rank.contains_key(&d.image_id) {
            return Err(EvalError::UnknownImage {
                index,
                image_id: d.image_id,
            });
        }
    }

    let mut cells: BTreeMap<(usize, usize), Cell> = BTreeMap::new();
    for a in &gt.annotations {
        let (Some(&c), Some(&i)) = (class_index.get(&a.category_id), image_rank.get(&a.image_id)) else {
            continue;
        };
        cell_entry(&mut cells, c, i).gts.push(GtBox {
            bbox: a.bbox,
            area: a.area,
            ignore: a.iscrowd != 0,
        });
    }
    for (index, d) in preds.iter().enumerate() {
        cell_entry(&mut cells, class_index[&d.category_id], image_rank[&d.image_id])
            .dets
            .push((d.score, index, d.bbox));
    }
    let mut cells: Vec<Cell> = cells.into_values().collect();
    cells.par_iter_mut().try_for_each(|c| {
        c.dets.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        c.dets.truncate(cfg.max_dets);
        let dets: Vec<[f64; 4]> = c.dets.iter().map(|d| d.2).collect();
        let gts: Vec<[f64; 4]> = c.gts.iter().map(|g| g.bbox).collect();
        c.ious = matching::iou_matrix(&dets, &gts)?;
        Ok::<_, EvalError>(())
    })?;

    let run = |pass: Pass| score_pass(&cells, classes.len(), pass, &cfg.buckets);
    let sweep: Vec<PassScores> = cfg
        .iou_sweep
        .iter()
        .map(|&t| run(Pass { thresh: t, bucket: None }))
        .collect();
    let sized: Vec<PassScores> = SizeBucket::ALL
        .iter()
        .map(|&b| {
            run(Pass {
                thresh: cfg.size_metric_iou,
                bucket: Some(b),
            })
        })
        .collect();

    let per_class: Vec<Option<f64>> = match cfg.per_class_iou {
        None => (0..classes.len())
            .map(|k| mean(sweep.iter().map(|p| p.ap[k])))
            .collect(),
        Some(t) => run(Pass { thresh: t, bucket: None }).ap,
    };
    let map = mean(sweep.iter().flat_map(|p| p.ap.iter().copied()));

    Ok(EvalResult {
        map,
        ap_small: mean(sized[0].ap.iter().copied()),
        ap_medium: mean(sized[1].ap.iter().copied()),
        ap_large: mean(sized[2].ap.iter().copied()),
        ar_small: mean(sized[0].recall.iter().copied()),
        ar_medium: mean(sized[1].recall.iter().copied()),
        ar_large: mean(sized[2].recall.iter().copied()),
        per_class_ap: classes.iter().copied().zip(per_class).collect(),
        category_names: gt.categories.iter().map(|c| (c.id, c.name.clone())).collect(),
    })
}

fn cell_entry(cells: &mut BTreeMap<(usize, usize), Cell>, class: usize, image: usize) -> &mut Cell {
    cells.entry((class, image)).or_insert_with(|| Cell {
        class,
        image_rank: image,
        gts: Vec::new(),
        dets: Vec::new(),
        ious: Vec::new(),
    })
}

/// Mean of the defined values; `None` if there are none.
fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn score_pass(cells: &[Cell], num_classes: usize, pass: Pass, buckets: &SizeBuckets) -> PassScores {
    let in_scope = |area: f64| pass.bucket.map_or(true, |b| buckets.bucket(area) == b);
    let matched: Vec<(Vec<Outcome>, usize)> = cells
        .par_iter()
        .map(|c| {
            let ignore: Vec<bool> = c.gts.iter().map(|g| g.ignore || !in_scope(g.area)).collect();
            let assigned = matching::assign(&c.ious, c.gts.len(), &ignore, pass.thresh);
            let outcomes = assigned
                .iter()
                .zip(&c.dets)
                .map(|(m, d)| match m {
                    Some(g) if ignore[*g] => Outcome::Ignored,
                    Some(_) => Outcome::Tp,
                    None if !in_scope(d.2[2] * d.2[3]) => Outcome::Ignored,
                    None => Outcome::Fp,
                })
                .collect();
            (outcomes, ignore.iter().filter(|i| !**i).count())
        })
        .collect();

    let mut ranked: Vec<Vec<(f64, usize, usize, bool)>> = vec![Vec::new(); num_classes];
    let mut num_gt = vec![0usize; num_classes];
    for (c, (outcomes, n)) in cells.iter().zip(&matched) {
        num_gt[c.class] += n;
        for (d, o) in c.dets.iter().zip(outcomes) {
            if *o != Outcome::Ignored {
                ranked[c.class].push((d.0, c.image_rank, d.1, *o == Outcome::Tp));
            }
        }
    }
    let mut ap = Vec::with_capacity(num_classes);
    let mut rec = Vec::with_capacity(num_classes);
    for (dets, n) in ranked.iter_mut().zip(num_gt) {
        dets.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let tps: Vec<bool> = dets.iter().map(|d| d.3).collect();
        ap.push(average_precision(&tps, n));
        rec.push(recall(&tps, n));
    }
    PassScores { ap, recall: rec }
}

pub fn write_result(result: &EvalResult, path: &Path) -> Result<(), EvalError> {
    let json = serde_json::to_string_pretty(result).map_err(|source| EvalError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, json + "\n").map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}
