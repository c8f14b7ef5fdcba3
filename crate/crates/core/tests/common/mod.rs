//! Reference implementations used as oracles. Nothing here calls into the
//! library code under test except for plain data types.
#![allow(dead_code)]

use std::collections::BTreeMap;

use checksynth::cocoio::{Attributes, CocoAnnotation, CocoDataset, CocoImage};
use checksynth::evaluator::{Detection, EvalResult};
use rand::Rng;

// ---------------------------------------------------------------- amounts

/// Builds the legal-line words by splitting the zero-padded dollar digits
/// into three-digit groups.
pub fn oracle_words(cents: u64) -> String {
    const UNITS: [&str; 10] = [
        "", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    ];
    const TEENS: [&str; 10] = [
        "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
        "eighteen", "nineteen",
    ];
    const TENS: [&str; 10] = [
        "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    ];
    let digits: Vec<usize> = format!("{:09}", cents / 100)
        .bytes()
        .map(|b| (b - b'0') as usize)
        .collect();
    let mut words: Vec<String> = Vec::new();
    for (g, scale) in digits.chunks(3).zip(["million", "thousand", ""]) {
        let (h, t, u) = (g[0], g[1], g[2]);
        if h + t + u == 0 {
            continue;
        }
        if h > 0 {
            words.push(format!("{} hundred", UNITS[h]));
        }
        match t {
            0 if u > 0 => words.push(UNITS[u].to_string()),
            0 => {}
            1 => words.push(TEENS[u].to_string()),
            _ if u == 0 => words.push(TENS[t].to_string()),
            _ => words.push(format!("{}-{}", TENS[t], UNITS[u])),
        }
        if !scale.is_empty() {
            words.push(scale.to_string());
        }
    }
    let mut s = if words.is_empty() {
        "zero".to_string()
    } else {
        words.join(" ")
    };
    s[..1].make_ascii_uppercase();
    format!("{s} and {:02}/100", cents % 100)
}

/// Inverse of the legal-line format: "... and NN/100" back to cents.
pub fn parse_words(s: &str) -> Option<u64> {
    let (words, frac) = s.rsplit_once(" and ")?;
    let cents: u64 = frac.strip_suffix("/100")?.parse().ok()?;
    if frac.len() != 6 || cents > 99 {
        return None;
    }
    let value = |w: &str| -> Option<u64> {
        let table = [
            "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
            "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
            "eighteen", "nineteen",
        ];
        let tens = [
            "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
        ];
        table
            .iter()
            .position(|t| *t == w)
            .map(|i| i as u64)
            .or_else(|| tens.iter().position(|t| *t == w).map(|i| 20 + 10 * i as u64))
    };
    let (mut total, mut current) = (0u64, 0u64);
    for token in words.to_lowercase().split([' ', '-']) {
        match token {
            "hundred" => current *= 100,
            "thousand" => {
                total += current * 1_000;
                current = 0;
            }
            "million" => {
                total += current * 1_000_000;
                current = 0;
            }
            w => current += value(w)?,
        }
    }
    Some((total + current) * 100 + cents)
}

/// "$D.CC" back to cents.
pub fn parse_courtesy(s: &str) -> Option<u64> {
    let (d, c) = s.strip_prefix('$')?.split_once('.')?;
    if c.len() != 2 {
        return None;
    }
    Some(d.parse::<u64>().ok()? * 100 + c.parse::<u64>().ok()?)
}

// -------------------------------------------------------------- geometry

/// IoU of integer boxes by counting unit cells.
pub fn cell_iou(a: [i64; 4], b: [i64; 4]) -> f64 {
    let inside = |r: [i64; 4], x: i64, y: i64| x >= r[0] && x < r[0] + r[2] && y >= r[1] && y < r[1] + r[3];
    let mut inter = 0i64;
    for y in a[1]..a[1] + a[3] {
        for x in a[0]..a[0] + a[2] {
            if inside(b, x, y) {
                inter += 1;
            }
        }
    }
    let union = a[2] * a[3] + b[2] * b[3] - inter;
    inter as f64 / union as f64
}

// ------------------------------------------------------------ morphology

/// Neighborhood minimum by scanning the full clamped window.
pub fn brute_min_filter(px: &[u8], w: usize, h: usize, channels: usize, r: usize) -> Vec<u8> {
    let mut out = vec![0u8; px.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..channels {
                let mut m = u8::MAX;
                for yy in y.saturating_sub(r)..=(y + r).min(h - 1) {
                    for xx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                        m = m.min(px[(yy * w + xx) * channels + c]);
                    }
                }
                out[(y * w + x) * channels + c] = m;
            }
        }
    }
    out
}

// ------------------------------------------------------------- evaluator

#[derive(Debug, Clone)]
pub struct MicroInstance {
    pub gt: CocoDataset,
    pub preds: Vec<Detection>,
    pub max_dets: usize,
}

/// Up to 5 images with up to 4 ground-truth boxes each, integer
/// coordinates, areas spanning all size buckets, and detections that are
/// jittered copies of ground truth or random boxes. Scores come from a
/// small set so ties occur.
pub fn micro_instance<R: Rng>(rng: &mut R) -> MicroInstance {
    let mut gt = CocoDataset::empty("val");
    let n_images = rng.gen_range(1..=5);
    let mut ann_id = 1;
    let mut preds = Vec::new();
    let cats = [1u64, 2, 3, 5, 6];
    let rand_box = |rng: &mut R| -> [i64; 4] {
        let side = |rng: &mut R| match rng.gen_range(0..3) {
            0 => rng.gen_range(2..30),
            1 => rng.gen_range(20..90),
            _ => rng.gen_range(60..130),
        };
        let (w, h) = (side(rng), side(rng));
        [rng.gen_range(0..=200 - w.min(200)), rng.gen_range(0..=200 - h.min(200)), w, h]
    };
    for img in 0..n_images {
        let image_id = 10 + 3 * img as u64;
        gt.images.push(CocoImage {
            id: image_id,
            file_name: format!("{image_id}.png"),
            width: 200,
            height: 200,
        });
        let n_gt = rng.gen_range(0..=4);
        let mut boxes = Vec::new();
        for _ in 0..n_gt {
            let b = rand_box(rng);
            let cat = cats[rng.gen_range(0..cats.len())];
            boxes.push((cat, b));
            gt.annotations.push(CocoAnnotation {
                id: ann_id,
                image_id,
                category_id: cat,
                bbox: b.map(|v| v as f64),
                area: (b[2] * b[3]) as f64,
                iscrowd: 0,
                attributes: Attributes::default(),
            });
            ann_id += 1;
        }
        let n_det = rng.gen_range(0..=6);
        for _ in 0..n_det {
            let (cat, b) = if !boxes.is_empty() && rng.gen_bool(0.7) {
                let (cat, b) = boxes[rng.gen_range(0..boxes.len())];
                let j = |rng: &mut R, v: i64, lo: i64| (v + rng.gen_range(-4..=4)).max(lo);
                let nb = [j(rng, b[0], 0), j(rng, b[1], 0), j(rng, b[2], 1), j(rng, b[3], 1)];
                let cat = if rng.gen_bool(0.9) { cat } else { cats[rng.gen_range(0..cats.len())] };
                (cat, nb)
            } else {
                (cats[rng.gen_range(0..cats.len())], rand_box(rng))
            };
            preds.push(Detection {
                image_id,
                category_id: cat,
                bbox: b.map(|v| v as f64),
                score: rng.gen_range(1..=10) as f64 / 10.0,
            });
        }
    }
    // Shuffle so file order differs from image order.
    for i in (1..preds.len()).rev() {
        preds.swap(i, rng.gen_range(0..=i));
    }
    let max_dets = if rng.gen_bool(0.25) { rng.gen_range(1..=3) } else { 100 };
    MicroInstance { gt, preds, max_dets }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Size {
    All,
    Small,
    Medium,
    Large,
}

fn size_of(area: f64) -> Size {
    if area < 1024.0 {
        Size::Small
    } else if area < 9216.0 {
        Size::Medium
    } else {
        Size::Large
    }
}

fn in_size(area: f64, s: Size) -> bool {
    s == Size::All || size_of(area) == s
}

/// Per class: (ranked tp flags of non-ignored detections, non-ignored gt count).
fn brute_pass(inst: &MicroInstance, cat: u64, t: f64, s: Size) -> (Vec<bool>, usize) {
    let mut image_ids: Vec<u64> = inst.gt.images.iter().map(|i| i.id).collect();
    image_ids.sort();
    let mut ranked: Vec<(f64, usize, usize, bool)> = Vec::new();
    let mut npos = 0;
    for (rank, &img) in image_ids.iter().enumerate() {
        let gts: Vec<&CocoAnnotation> = inst
            .gt
            .annotations
            .iter()
            .filter(|a| a.image_id == img && a.category_id == cat)
            .collect();
        let ignored: Vec<bool> = gts.iter().map(|g| !in_size(g.area, s)).collect();
        npos += ignored.iter().filter(|i| !**i).count();

        let mut dets: Vec<(usize, &Detection)> = inst
            .preds
            .iter()
            .enumerate()
            .filter(|(_, d)| d.image_id == img && d.category_id == cat)
            .collect();
        // Highest score first; equal scores by file order.
        dets.sort_by(|a, b| b.1.score.partial_cmp(&a.1.score).unwrap().then(a.0.cmp(&b.0)));
        dets.truncate(inst.max_dets);

        let mut used = vec![false; gts.len()];
        for (order, d) in dets {
            let db = d.bbox.map(|v| v as i64);
            // All eligible candidates, best first: non-ignored before
            // ignored, then higher IoU, then lower index.
            let mut cands: Vec<(bool, f64, usize)> = gts
                .iter()
                .enumerate()
                .filter(|(g, _)| !used[*g])
                .map(|(g, a)| (ignored[g], cell_iou(db, a.bbox.map(|v| v as i64)), g))
                .filter(|(_, iou, _)| *iou >= t)
                .collect();
            cands.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(b.1.partial_cmp(&a.1).unwrap())
                    .then(a.2.cmp(&b.2))
            });
            match cands.first() {
                Some(&(ign, _, g)) => {
                    used[g] = true;
                    if !ign {
                        ranked.push((d.score, rank, order, true));
                    }
                }
                None => {
                    if in_size(d.bbox[2] * d.bbox[3], s) {
                        ranked.push((d.score, rank, order, false));
                    }
                }
            }
        }
    }
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    (ranked.into_iter().map(|r| r.3).collect(), npos)
}

/// Interpolated AP as the mean over r in {0, .01, ..., 1} of the best
/// precision at any rank whose recall reaches r.
pub fn brute_ap(tps: &[bool], npos: usize) -> Option<f64> {
    if npos == 0 {
        return None;
    }
    let mut total = 0.0;
    for i in 0..=100usize {
        let mut best = 0.0f64;
        let mut tp = 0usize;
        for (k, &hit) in tps.iter().enumerate() {
            tp += hit as usize;
            if tp * 100 >= i * npos {
                best = best.max(tp as f64 / (k + 1) as f64);
            }
        }
        total += best;
    }
    Some(total / 101.0)
}

fn brute_recall(tps: &[bool], npos: usize) -> Option<f64> {
    (npos > 0).then(|| tps.iter().filter(|t| **t).count() as f64 / npos as f64)
}

fn avg(v: &[Option<f64>]) -> Option<f64> {
    let d: Vec<f64> = v.iter().flatten().copied().collect();
    (!d.is_empty()).then(|| d.iter().sum::<f64>() / d.len() as f64)
}

/// Full result with the default sweep 0.50:0.05:0.95, size metrics at 0.5.
pub fn brute_evaluate(inst: &MicroInstance) -> EvalResult {
    let mut cats: Vec<u64> = inst.gt.categories.iter().map(|c| c.id).collect();
    cats.sort();
    let sweep: Vec<f64> = (0..10).map(|i| 0.5 + 0.05 * i as f64).map(|t| (t * 100.0).round() / 100.0).collect();
    let mut per_class = BTreeMap::new();
    let mut all_aps = Vec::new();
    for &c in &cats {
        let aps: Vec<Option<f64>> = sweep
            .iter()
            .map(|&t| {
                let (tps, n) = brute_pass(inst, c, t, Size::All);
                brute_ap(&tps, n)
            })
            .collect();
        per_class.insert(c, avg(&aps));
        all_aps.extend(aps);
    }
    let sized = |s: Size| {
        let mut aps = Vec::new();
        let mut ars = Vec::new();
        for &c in &cats {
            let (tps, n) = brute_pass(inst, c, 0.5, s);
            aps.push(brute_ap(&tps, n));
            ars.push(brute_recall(&tps, n));
        }
        (avg(&aps), avg(&ars))
    };
    let (ap_s, ar_s) = sized(Size::Small);
    let (ap_m, ar_m) = sized(Size::Medium);
    let (ap_l, ar_l) = sized(Size::Large);
    EvalResult {
        map: avg(&all_aps),
        ap_small: ap_s,
        ap_medium: ap_m,
        ap_large: ap_l,
        ar_small: ar_s,
        ar_medium: ar_m,
        ar_large: ar_l,
        per_class_ap: per_class,
        category_names: inst.gt.categories.iter().map(|c| (c.id, c.name.clone())).collect(),
    }
}

/// Largest absolute difference between two results, or `None` if one is
/// defined where the other is not.
pub fn result_distance(a: &EvalResult, b: &EvalResult) -> Option<f64> {
    let (va, vb) = (a.values(), b.values());
    if va.len() != vb.len() || a.per_class_ap.keys().ne(b.per_class_ap.keys()) {
        return None;
    }
    let mut worst = 0.0f64;
    for (x, y) in va.iter().zip(&vb) {
        match (x, y) {
            (Some(x), Some(y)) => worst = worst.max((x - y).abs()),
            (None, None) => {}
            _ => return None,
        }
    }
    Some(worst)
}
