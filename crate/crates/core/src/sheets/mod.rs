//! Signature collection sheets: manifest ingestion, cropping, binarization
//! and protocol validation.

mod manifest;
mod store;
mod validate;

use std::path::PathBuf;

use image::GrayImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Rect;
use crate::raster::Mask;

pub use manifest::{load_manifest, parse_manifest, SheetAnnotation, SheetBox};
pub use store::{load_samples, write_samples, SampleRecord, SamplesIndex, SAMPLES_INDEX_FILE};
pub use validate::{
    validate_collection, validate_collection_with_roster, CollectionProtocol, PersonReport,
    PersonTally, ProtocolFlag, ValidationReport,
};

/// Default ink threshold on 8-bit luminance.
pub const DEFAULT_THRESHOLD: u8 = 160;

#[derive(Debug, Error)]
pub enum SheetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: rect outside bounds ({x}, {y}, {w}, {h})")]
    RectOutsideBounds {
        line: u64,
        x: i64,
        y: i64,
        w: i64,
        h: i64,
    },
    #[error("rect {rect:?} outside bounds of {width}x{height} sheet")]
    CropOutOfBounds { rect: Rect, width: u32, height: u32 },
    #[error("zero-area box {0:?}")]
    ZeroArea(Rect),
    #[error("no ink pixels under threshold {threshold} in box {rect:?}")]
    EmptyMask { rect: Rect, threshold: u8 },
    #[error("sample invariant violated: {0}")]
    InvalidSample(String),
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: {source}")]
    Index {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pen {
    Ballpoint,
    Pencil,
}

impl Pen {
    /// Manifest code: `bp` or `pc`.
    pub fn code(self) -> &'static str {
        match self {
            Pen::Ballpoint => "bp",
            Pen::Pencil => "pc",
        }
    }

    pub fn from_code(s: &str) -> Option<Pen> {
        match s {
            "bp" => Some(Pen::Ballpoint),
            "pc" => Some(Pen::Pencil),
            _ => None,
        }
    }
}

/// One tight-cropped, binarized signature.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSample {
    person_id: String,
    forged: bool,
    pen: Pen,
    crop: GrayImage,
    mask: Mask,
}

impl SignatureSample {
    /// Checks that crop and mask agree in size, that the mask holds ink, and
    /// that the ink touches all four edges.
    pub fn new(
        person_id: impl Into<String>,
        forged: bool,
        pen: Pen,
        crop: GrayImage,
        mask: Mask,
    ) -> Result<Self, SheetError> {
        let person_id = person_id.into();
        if person_id.is_empty() {
            return Err(SheetError::InvalidSample("empty person_id".into()));
        }
        if crop.dimensions() != mask.dimensions() {
            return Err(SheetError::InvalidSample(format!(
                "crop {:?} and mask {:?} differ in size",
                crop.dimensions(),
                mask.dimensions()
            )));
        }
        match mask.ink_bounds() {
            None => return Err(SheetError::InvalidSample("mask has no ink".into())),
            Some(b) if b != Rect::new(0, 0, mask.width(), mask.height()) => {
                return Err(SheetError::InvalidSample(format!(
                    "mask is not tight: ink bounds {b:?}"
                )))
            }
            Some(_) => {}
        }
        Ok(SignatureSample {
            person_id,
            forged,
            pen,
            crop,
            mask,
        })
    }

    pub fn person_id(&self) -> &str {
        &self.person_id
    }

    pub fn forged(&self) -> bool {
        self.forged
    }

    pub fn pen(&self) -> Pen {
        self.pen
    }

    pub fn crop(&self) -> &GrayImage {
        &self.crop
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn dimensions(&self) -> (u32, u32) {
        self.mask.dimensions()
    }
}

/// Copies `rect` out of `sheet`. Output pixel `(i, j)` is sheet pixel
/// `(rect.x + i, rect.y + j)`.
pub fn crop_signature(sheet: &GrayImage, rect: Rect) -> Result<GrayImage, SheetError> {
    if rect.is_empty() {
        return Err(SheetError::ZeroArea(rect));
    }
    if !rect.fits_in(sheet.width(), sheet.height()) {
        return Err(SheetError::CropOutOfBounds {
            rect,
            width: sheet.width(),
            height: sheet.height(),
        });
    }
    Ok(GrayImage::from_fn(rect.w, rect.h, |i, j| {
        *sheet.get_pixel(rect.x + i, rect.y + j)
    }))
}

/// Pixels strictly darker than `threshold` are ink.
pub fn binarize(crop: &GrayImage, threshold: u8) -> Mask {
    Mask::from_fn(crop.width(), crop.height(), |x, y| {
        crop.get_pixel(x, y)[0] < threshold
    })
}

/// Crop, binarize, then shrink both rasters to the ink bounding box.
pub fn extract_sample(
    sheet: &GrayImage,
    rect: Rect,
    person_id: &str,
    forged: bool,
    pen: Pen,
    threshold: u8,
) -> Result<SignatureSample, SheetError> {
    let crop = crop_signature(sheet, rect)?;
    let mask = binarize(&crop, threshold);
    let tight = mask
        .ink_bounds()
        .ok_or(SheetError::EmptyMask { rect, threshold })?;
    let crop = crop_signature(&crop, tight)?;
    let mask = mask.crop(tight);
    SignatureSample::new(person_id, forged, pen, crop, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Luma;

    fn gradient(w: u32, h: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| Luma([((x * 7 + y * 13) % 256) as u8]))
    }

    #[test]
    fn identity_crop() {
        let g = gradient(20, 12);
        assert_eq!(crop_signature(&g, Rect::new(0, 0, 20, 12)).unwrap(), g);
    }

    #[test]
    fn point_crop() {
        let g = gradient(20, 12);
        let c = crop_signature(&g, Rect::new(5, 5, 1, 1)).unwrap();
        assert_eq!(c.dimensions(), (1, 1));
        assert_eq!(c.get_pixel(0, 0), g.get_pixel(5, 5));
    }

    #[test]
    fn window_sum_matches_scan() {
        let g = gradient(40, 30);
        let r = Rect::new(11, 7, 10, 4);
        let c = crop_signature(&g, r).unwrap();
        let got: u64 = c.pixels().map(|p| p[0] as u64).sum();
        let mut want = 0u64;
        for (x, y, p) in g.enumerate_pixels() {
            if (11..21).contains(&x) && (7..11).contains(&y) {
                want += p[0] as u64;
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn crop_errors() {
        let g = gradient(10, 10);
        assert!(matches!(
            crop_signature(&g, Rect::new(0, 0, 0, 3)),
            Err(SheetError::ZeroArea(_))
        ));
        assert!(matches!(
            crop_signature(&g, Rect::new(5, 5, 6, 1)),
            Err(SheetError::CropOutOfBounds { .. })
        ));
    }

    #[test]
    fn binarize_extremes() {
        let white = GrayImage::from_pixel(7, 3, Luma([255]));
        assert_eq!(binarize(&white, 128).count_ink(), 0);
        let black = GrayImage::from_pixel(7, 3, Luma([0]));
        assert_eq!(binarize(&black, 128).count_ink(), 21);
    }

    #[test]
    fn binarize_ramp_counts_columns() {
        let ramp = GrayImage::from_fn(256, 3, |x, _| Luma([x as u8]));
        let m = binarize(&ramp, 100);
        let ink_cols = (0..256).filter(|&x| (0..3).all(|y| m.get(x, y))).count();
        let any_ink_cols = (0..256).filter(|&x| (0..3).any(|y| m.get(x, y))).count();
        assert_eq!(ink_cols, 100);
        assert_eq!(any_ink_cols, 100);
    }

    #[test]
    fn extract_is_tight() {
        let mut sheet = GrayImage::from_pixel(50, 40, Luma([250]));
        for x in 12..30 {
            sheet.put_pixel(x, 20, Luma([10]));
        }
        sheet.put_pixel(20, 15, Luma([40]));
        let s = extract_sample(&sheet, Rect::new(5, 5, 40, 30), "p1", false, Pen::Pencil, 160)
            .unwrap();
        assert_eq!(s.dimensions(), (18, 6));
        assert_eq!(s.mask().ink_bounds(), Some(Rect::new(0, 0, 18, 6)));
        assert_eq!(s.crop().get_pixel(8, 0)[0], 40);
    }

    #[test]
    fn extract_blank_box_fails() {
        let sheet = GrayImage::from_pixel(50, 40, Luma([250]));
        assert!(matches!(
            extract_sample(&sheet, Rect::new(0, 0, 10, 10), "p", false, Pen::Ballpoint, 160),
            Err(SheetError::EmptyMask { .. })
        ));
    }

    #[test]
    fn sample_rejects_loose_mask() {
        let crop = GrayImage::from_pixel(3, 3, Luma([0]));
        let mut mask = Mask::new(3, 3);
        mask.set(1, 1, true);
        assert!(SignatureSample::new("p", false, Pen::Ballpoint, crop, mask).is_err());
    }
}
