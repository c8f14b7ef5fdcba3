//! On-disk sample layout written by `extract` and read by `generate`.
//!
//! ```text
//! <dir>/samples.json
//! <dir>/s00000_crop.png   8-bit luminance crop
//! <dir>/s00000_mask.png   0 = background, 255 = ink
//! ```

use std::path::{Path, PathBuf};

use image::GrayImage;
use serde::{Deserialize, Serialize};

use super::{Pen, SheetError, SignatureSample};
use crate::geom::Rect;
use crate::raster::Mask;

pub const SAMPLES_INDEX_FILE: &str = "samples.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: usize,
    pub person_id: String,
    pub forged: bool,
    pub pen: Pen,
    pub sheet: String,
    /// Box as drawn on the sheet, before tight-cropping.
    pub source_box: Rect,
    pub crop_file: String,
    pub mask_file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplesIndex {
    pub samples: Vec<SampleRecord>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SheetError + '_ {
    move |source| SheetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn img_err(path: &Path) -> impl FnOnce(image::ImageError) -> SheetError + '_ {
    move |source| SheetError::Image {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every sample as a crop/mask PNG pair plus `samples.json`.
/// `provenance` pairs each sample with its sheet file name and drawn box.
pub fn write_samples(
    dir: &Path,
    samples: &[(SignatureSample, String, Rect)],
) -> Result<SamplesIndex, SheetError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut records = Vec::with_capacity(samples.len());
    for (id, (sample, sheet, source_box)) in samples.iter().enumerate() {
        let crop_file = format!("s{id:05}_crop.png");
        let mask_file = format!("s{id:05}_mask.png");
        let crop_path = dir.join(&crop_file);
        sample.crop().save(&crop_path).map_err(img_err(&crop_path))?;
        let mask_path = dir.join(&mask_file);
        sample
            .mask()
            .to_image()
            .save(&mask_path)
            .map_err(img_err(&mask_path))?;
        records.push(SampleRecord {
            id,
            person_id: sample.person_id().to_string(),
            forged: sample.forged(),
            pen: sample.pen(),
            sheet: sheet.clone(),
            source_box: *source_box,
            crop_file,
            mask_file,
        });
    }
    let index = SamplesIndex { samples: records };
    let index_path = dir.join(SAMPLES_INDEX_FILE);
    let json = serde_json::to_string_pretty(&index).map_err(|source| SheetError::Index {
        path: index_path.clone(),
        source,
    })?;
    std::fs::write(&index_path, json + "\n").map_err(io_err(&index_path))?;
    Ok(index)
}

/// Loads the samples listed in an index file. Relative image paths resolve
/// against the index file's directory.
pub fn load_samples(index_path: &Path) -> Result<Vec<SignatureSample>, SheetError> {
    let text = std::fs::read_to_string(index_path).map_err(io_err(index_path))?;
    let index: SamplesIndex =
        serde_json::from_str(&text).map_err(|source| SheetError::Index {
            path: index_path.to_path_buf(),
            source,
        })?;
    let base = index_path.parent().map(Path::to_path_buf).unwrap_or_default();
    index
        .samples
        .iter()
        .map(|rec| {
            let crop = read_gray(&base.join(&rec.crop_file))?;
            let mask = Mask::from_image(&read_gray(&base.join(&rec.mask_file))?);
            SignatureSample::new(rec.person_id.clone(), rec.forged, rec.pen, crop, mask)
        })
        .collect()
}

fn read_gray(path: &PathBuf) -> Result<GrayImage, SheetError> {
    Ok(image::open(path).map_err(img_err(path))?.to_luma8())
}
