//! COCO-format dataset files with per-annotation attributes, split
//! assignment and size-bucket statistics.
//!
//! Layout written by [`write_dataset`]:
//!
//! ```text
//! <out>/instances_<split>.json
//! <out>/images/<split>/<split>_000001.png
//! ```

mod split;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composer::{CheckClass, FieldFill, GeneratedCheck, SignatureMeta};

pub use split::{assign_splits, Split, SplitConfig, SplitKey};
pub use stats::{compute_stats, format_stats_table, SizeBucket, SizeBuckets, SizeStats};

#[derive(Debug, Error)]
pub enum CocoError {
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
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("dataset has {} invariant violation(s): {}", .0.len(), summarize(.0))]
    Invalid(Vec<Violation>),
    #[error("requested {requested} {class} checks for splits but only {available} available")]
    Insufficient {
        class: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("no writer-disjoint partition satisfies the requested split counts")]
    WriterDisjointInfeasible,
}

fn summarize(v: &[Violation]) -> String {
    let mut s = v
        .iter()
        .take(5)
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ");
    if v.len() > 5 {
        s.push_str("; ...");
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateImageId(u64),
    DuplicateAnnotationId(u64),
    DuplicateCategoryId(u64),
    DanglingImage { annotation: u64, image_id: u64 },
    UnknownCategory { annotation: u64, category_id: u64 },
    BboxOutsideImage { annotation: u64, bbox: [f64; 4] },
    NonPositiveBbox { annotation: u64, bbox: [f64; 4] },
    AreaMismatch { annotation: u64, area: f64, expected: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateImageId(id) => write!(f, "duplicate image id {id}"),
            Violation::DuplicateAnnotationId(id) => write!(f, "duplicate annotation id {id}"),
            Violation::DuplicateCategoryId(id) => write!(f, "duplicate category id {id}"),
            Violation::DanglingImage {
                annotation,
                image_id,
            } => write!(f, "annotation {annotation} references missing image {image_id}"),
            Violation::UnknownCategory {
                annotation,
                category_id,
            } => write!(f, "annotation {annotation} references missing category {category_id}"),
            Violation::BboxOutsideImage { annotation, bbox } => {
                write!(f, "annotation {annotation} bbox {bbox:?} outside image")
            }
            Violation::NonPositiveBbox { annotation, bbox } => {
                write!(f, "annotation {annotation} bbox {bbox:?} has non-positive size")
            }
            Violation::AreaMismatch {
                annotation,
                area,
                expected,
            } => write!(f, "annotation {annotation} area {area} ≠ w·h = {expected}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetInfo {
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub split: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ink: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub person_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    pub bbox: [f64; 4],
    pub area: f64,
    #[serde(default)]
    pub iscrowd: u8,
    #[serde(default)]
    pub attributes: Attributes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u64,
    pub name: String,
    #[serde(default)]
    pub supercategory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoDataset {
    #[serde(default)]
    pub info: DatasetInfo,
    pub images: Vec<CocoImage>,
    pub annotations: Vec<CocoAnnotation>,
    pub categories: Vec<CocoCategory>,
}

/// The six check classes with their fixed ids.
pub fn check_categories() -> Vec<CocoCategory> {
    CheckClass::ALL
        .iter()
        .map(|c| CocoCategory {
            id: c.id(),
            name: c.name().to_string(),
            supercategory: if c.is_signature() { "signature" } else { "field" }.to_string(),
        })
        .collect()
}

impl CocoDataset {
    pub fn empty(split: &str) -> Self {
        CocoDataset {
            info: DatasetInfo {
                description: "synthetic bank checks".into(),
                split: split.into(),
            },
            images: Vec::new(),
            annotations: Vec::new(),
            categories: check_categories(),
        }
    }

    /// Builds records for `checks`, numbering images and annotations from 1.
    /// `file_names[i]` is the image path stored for `checks[i]`.
    pub fn from_checks(checks: &[GeneratedCheck], split: &str, file_names: &[String]) -> Self {
        assert_eq!(checks.len(), file_names.len());
        let mut ds = CocoDataset::empty(split);
        for (check, file_name) in checks.iter().zip(file_names) {
            ds.push_check(check, file_name.clone());
        }
        ds
    }

    /// Appends one image record and its annotations with the next free ids.
    pub fn push_check(&mut self, check: &GeneratedCheck, file_name: String) {
        self.push_entry(ImageEntry::of(check, file_name));
    }

    fn push_entry(&mut self, entry: ImageEntry) {
        let image_id = self.images.iter().map(|i| i.id).max().unwrap_or(0) + 1;
        let mut ann_id = self.annotations.iter().map(|a| a.id).max().unwrap_or(0) + 1;
        self.images.push(CocoImage {
            id: image_id,
            file_name: entry.file_name,
            width: entry.width,
            height: entry.height,
        });
        for fill in entry.fills {
            let signature = fill.class.is_signature();
            self.annotations.push(CocoAnnotation {
                id: ann_id,
                image_id,
                category_id: fill.class.id(),
                bbox: fill.bbox.to_xywh(),
                area: fill.bbox.area() as f64,
                iscrowd: 0,
                attributes: Attributes {
                    ink: Some(fill.ink.name.to_string()),
                    person_id: signature.then(|| entry.signature.person_id.clone()),
                    forged: signature.then_some(entry.signature.forged),
                },
            });
            ann_id += 1;
        }
    }

    /// Every invariant violation, in a stable order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut images = BTreeMap::new();
        for img in &self.images {
            if images.insert(img.id, (img.width, img.height)).is_some() {
                v.push(Violation::DuplicateImageId(img.id));
            }
        }
        let mut cats = BTreeSet::new();
        for c in &self.categories {
            if !cats.insert(c.id) {
                v.push(Violation::DuplicateCategoryId(c.id));
            }
        }
        let mut ann_ids = BTreeSet::new();
        for a in &self.annotations {
            if !ann_ids.insert(a.id) {
                v.push(Violation::DuplicateAnnotationId(a.id));
            }
            if !cats.contains(&a.category_id) {
                v.push(Violation::UnknownCategory {
                    annotation: a.id,
                    category_id: a.category_id,
                });
            }
            let [x, y, w, h] = a.bbox;
            if !(w > 0.0 && h > 0.0) {
                v.push(Violation::NonPositiveBbox {
                    annotation: a.id,
                    bbox: a.bbox,
                });
            } else if (a.area - w * h).abs() > 1e-6 * (w * h).max(1.0) {
                v.push(Violation::AreaMismatch {
                    annotation: a.id,
                    area: a.area,
                    expected: w * h,
                });
            }
            match images.get(&a.image_id) {
                None => v.push(Violation::DanglingImage {
                    annotation: a.id,
                    image_id: a.image_id,
                }),
                Some(&(iw, ih)) => {
                    if x < 0.0 || y < 0.0 || x + w > iw as f64 || y + h > ih as f64 {
                        v.push(Violation::BboxOutsideImage {
                            annotation: a.id,
                            bbox: a.bbox,
                        });
                    }
                }
            }
        }
        v
    }

    pub fn category_name(&self, id: u64) -> Option<&str> {
        self.categories.iter().find(|c| c.id == id).map(|c| c.name.as_str())
    }
}

/// Parses and validates an annotation file.
pub fn read_dataset(path: &Path) -> Result<CocoDataset, CocoError> {
    let text = std::fs::read_to_string(path).map_err(|source| CocoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let ds: CocoDataset = serde_json::from_str(&text).map_err(|source| CocoError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let violations = ds.validate();
    if violations.is_empty() {
        Ok(ds)
    } else {
        Err(CocoError::Invalid(violations))
    }
}

pub fn annotation_file_name(split: &str) -> String {
    format!("instances_{split}.json")
}

/// What the annotation file needs from a check once its pixels are on disk.
struct ImageEntry {
    file_name: String,
    width: u32,
    height: u32,
    signature: SignatureMeta,
    fills: Vec<FieldFill>,
}

impl ImageEntry {
    fn of(check: &GeneratedCheck, file_name: String) -> Self {
        ImageEntry {
            file_name,
            width: check.image.width(),
            height: check.image.height(),
            signature: check.signature.clone(),
            fills: check.fills.clone(),
        }
    }
}

/// Relative path of the `index`-th (0-based) image of a split.
pub fn image_file_name(split: &str, index: usize) -> String {
    format!("images/{split}/{split}_{:06}.png", index + 1)
}

/// Writes images under `images/<split>/` and `instances_<split>.json` into
/// `out_dir`. Returns the dataset as written.
pub fn write_dataset(
    checks: &[GeneratedCheck],
    split: &str,
    out_dir: &Path,
) -> Result<CocoDataset, CocoError> {
    write_dataset_with(checks.len(), split, out_dir, |i| Ok(checks[i].clone()))
}

/// Like [`write_dataset`], but produces check `i` on demand with `render`
/// so that only a bounded batch of images is held in memory. Checks are
/// rendered in parallel; ids follow `i`.
pub fn write_dataset_with<E, F>(
    count: usize,
    split: &str,
    out_dir: &Path,
    render: F,
) -> Result<CocoDataset, E>
where
    F: Fn(usize) -> Result<GeneratedCheck, E> + Sync,
    E: From<CocoError> + Send,
{
    const BATCH: usize = 256;
    let img_dir = out_dir.join("images").join(split);
    std::fs::create_dir_all(&img_dir).map_err(|source| CocoError::Io {
        path: img_dir.clone(),
        source,
    })?;
    let mut ds = CocoDataset::empty(split);
    for start in (0..count).step_by(BATCH) {
        let entries: Vec<ImageEntry> = (start..(start + BATCH).min(count))
            .into_par_iter()
            .map(|i| {
                let check = render(i)?;
                let name = image_file_name(split, i);
                let path = out_dir.join(&name);
                check
                    .image
                    .save(&path)
                    .map_err(|source| CocoError::Image { path, source })?;
                Ok(ImageEntry::of(&check, name))
            })
            .collect::<Result<_, E>>()?;
        for e in entries {
            ds.push_entry(e);
        }
    }
    let violations = ds.validate();
    if !violations.is_empty() {
        return Err(CocoError::Invalid(violations).into());
    }
    write_annotations(&ds, &out_dir.join(annotation_file_name(split)))?;
    Ok(ds)
}

pub fn write_annotations(ds: &CocoDataset, path: &Path) -> Result<(), CocoError> {
    let json = serde_json::to_string_pretty(ds).map_err(|source| CocoError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, json + "\n").map_err(|source| CocoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
