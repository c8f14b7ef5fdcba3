use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CocoDataset;
use crate::composer::CheckClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeBucket {
    Small,
    Medium,
    Large,
}

impl SizeBucket {
    pub const ALL: [SizeBucket; 3] = [SizeBucket::Small, SizeBucket::Medium, SizeBucket::Large];

    pub fn label(self) -> &'static str {
        match self {
            SizeBucket::Small => "Small",
            SizeBucket::Medium => "Medium",
            SizeBucket::Large => "Large",
        }
    }
}

/// Area thresholds in pixels². An area below `small_max` is small, below
/// `medium_max` medium, anything else large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeBuckets {
    small_max: f64,
    medium_max: f64,
}

impl SizeBuckets {
    pub fn new(small_max: f64, medium_max: f64) -> Option<Self> {
        (small_max > 0.0 && small_max < medium_max).then_some(SizeBuckets {
            small_max,
            medium_max,
        })
    }

    pub fn small_max(&self) -> f64 {
        self.small_max
    }

    pub fn medium_max(&self) -> f64 {
        self.medium_max
    }

    pub fn bucket(&self, area: f64) -> SizeBucket {
        if area < self.small_max {
            SizeBucket::Small
        } else if area < self.medium_max {
            SizeBucket::Medium
        } else {
            SizeBucket::Large
        }
    }
}

impl Default for SizeBuckets {
    fn default() -> Self {
        SizeBuckets {
            small_max: 32.0 * 32.0,
            medium_max: 96.0 * 96.0,
        }
    }
}

/// Per-category `[small, medium, large]` annotation counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStats {
    pub rows: BTreeMap<u64, [usize; 3]>,
    pub names: BTreeMap<u64, String>,
}

impl SizeStats {
    pub fn row(&self, category_id: u64) -> [usize; 3] {
        self.rows.get(&category_id).copied().unwrap_or_default()
    }

    pub fn total(&self, category_id: u64) -> usize {
        self.row(category_id).iter().sum()
    }

    /// Category ids with the check classes first, in table order.
    fn ordered_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = TABLE_ORDER.iter().map(|c| c.id()).collect();
        ids.extend(self.rows.keys().filter(|id| CheckClass::from_id(**id).is_none()));
        ids
    }

    fn label(&self, id: u64) -> String {
        CheckClass::from_id(id)
            .map(|c| c.label().to_string())
            .or_else(|| self.names.get(&id).cloned())
            .unwrap_or_else(|| format!("category {id}"))
    }
}

const TABLE_ORDER: [CheckClass; 6] = [
    CheckClass::AmountCourtesy,
    CheckClass::AmountLegal,
    CheckClass::Date,
    CheckClass::Payee,
    CheckClass::SignatureForged,
    CheckClass::SignatureGenuine,
];

pub fn compute_stats(dataset: &CocoDataset, buckets: &SizeBuckets) -> SizeStats {
    let mut stats = SizeStats::default();
    for c in &dataset.categories {
        stats.rows.insert(c.id, [0; 3]);
        stats.names.insert(c.id, c.name.clone());
    }
    for a in &dataset.annotations {
        let b = buckets.bucket(a.area) as usize;
        stats.rows.entry(a.category_id).or_default()[b] += 1;
    }
    stats
}

/// Renders one `Small Medium Large` column group per split.
pub fn format_stats_table(splits: &[(&str, &SizeStats)]) -> String {
    let mut ids: Vec<u64> = Vec::new();
    for (_, s) in splits {
        for id in s.ordered_ids() {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
    }
    let labels: Vec<String> = ids
        .iter()
        .map(|&id| {
            splits
                .iter()
                .map(|(_, s)| s.label(id))
                .next()
                .unwrap_or_else(|| format!("category {id}"))
        })
        .collect();
    let lw = labels.iter().map(|l| l.chars().count()).max().unwrap_or(5).max(5);
    let cw = 8;

    let mut out = String::new();
    write!(out, "{:lw$}", "").unwrap();
    for (name, _) in splits {
        write!(out, " | {:^width$}", name, width = 3 * cw + 2).unwrap();
    }
    out.push('\n');
    write!(out, "{:lw$}", "Class").unwrap();
    for _ in splits {
        out.push_str(" |");
        for b in SizeBucket::ALL {
            write!(out, " {:>cw$}", b.label()).unwrap();
        }
    }
    out.push('\n');
    for (id, label) in ids.iter().zip(&labels) {
        write!(out, "{label:lw$}").unwrap();
        for (_, s) in splits {
            out.push_str(" |");
            for n in s.row(*id) {
                write!(out, " {n:>cw$}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocoio::{Attributes, CocoAnnotation, CocoImage};

    fn ds_with(areas: &[(u64, f64, f64)]) -> CocoDataset {
        let mut ds = CocoDataset::empty("train");
        ds.images.push(CocoImage {
            id: 1,
            file_name: "x.png".into(),
            width: 1000,
            height: 1000,
        });
        for (i, &(cat, w, h)) in areas.iter().enumerate() {
            ds.annotations.push(CocoAnnotation {
                id: i as u64 + 1,
                image_id: 1,
                category_id: cat,
                bbox: [0.0, 0.0, w, h],
                area: w * h,
                iscrowd: 0,
                attributes: Attributes::default(),
            });
        }
        ds
    }

    #[test]
    fn single_small() {
        let s = compute_stats(&ds_with(&[(3, 10.0, 10.0)]), &SizeBuckets::default());
        assert_eq!(s.row(3), [1, 0, 0]);
        assert_eq!(s.row(1), [0, 0, 0]);
    }

    #[test]
    fn boundaries_are_strict() {
        let b = SizeBuckets::default();
        assert_eq!(b.bucket(1023.0), SizeBucket::Small);
        assert_eq!(b.bucket(1024.0), SizeBucket::Medium);
        assert_eq!(b.bucket(9215.0), SizeBucket::Medium);
        assert_eq!(b.bucket(9216.0), SizeBucket::Large);
    }

    #[test]
    fn invalid_thresholds() {
        assert!(SizeBuckets::new(0.0, 10.0).is_none());
        assert!(SizeBuckets::new(10.0, 10.0).is_none());
        assert!(SizeBuckets::new(1.0, 2.0).is_some());
    }

    #[test]
    fn table_layout() {
        let s = compute_stats(
            &ds_with(&[(1, 10.0, 10.0), (1, 50.0, 50.0), (5, 200.0, 80.0)]),
            &SizeBuckets::default(),
        );
        let e = compute_stats(&CocoDataset::empty("val"), &SizeBuckets::default());
        let t = format_stats_table(&[("train", &s), ("val", &e)]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("Class"));
        let small = lines[1].find("Small").unwrap();
        assert!(small < lines[1].find("Medium").unwrap());
        assert!(lines[2].starts_with("Amount (Courtesy)"));
        assert!(lines[6].starts_with("Signature (F)"));
        assert!(lines[7].starts_with("Signature (G)"));
        let nums: Vec<usize> = lines[2]
            .split(|c: char| c == '|' || c.is_whitespace())
            .filter_map(|t| t.parse().ok())
            .collect();
        assert_eq!(nums, vec![1, 1, 0, 0, 0, 0]);
    }
}
