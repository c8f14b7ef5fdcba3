//! Dark-stroke dilation.
//!
//! On light paper with dark ink, growing the ink is a neighborhood minimum
//! over intensities. The square element is separable, so each pass runs a
//! horizontal then a vertical running minimum. Neighborhoods are clamped to
//! the image, which is equivalent to padding with +∞.

use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Pixel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorphologyError {
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuringElement {
    radius: u32,
    iterations: u32,
}

impl StructuringElement {
    /// Square `(2r+1)²` element applied `iterations` times.
    pub fn square(radius: u32, iterations: u32) -> Result<Self, MorphologyError> {
        if radius == 0 {
            return Err(MorphologyError::ZeroRadius);
        }
        if iterations == 0 {
            return Err(MorphologyError::ZeroIterations);
        }
        Ok(StructuringElement { radius, iterations })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        StructuringElement {
            radius: 1,
            iterations: 1,
        }
    }
}

/// Per channel, replaces each pixel with the minimum over its square
/// neighborhood, `se.iterations()` times.
pub fn dilate_dark<P>(
    image: &ImageBuffer<P, Vec<u8>>,
    se: StructuringElement,
) -> ImageBuffer<P, Vec<u8>>
where
    P: Pixel<Subpixel = u8>,
{
    let (w, h) = image.dimensions();
    let channels = P::CHANNEL_COUNT as usize;
    let mut data = image.as_raw().clone();
    let mut scratch = vec![0u8; data.len()];
    for _ in 0..se.iterations {
        min_pass(&data, &mut scratch, w, h, channels, se.radius, true);
        min_pass(&scratch, &mut data, w, h, channels, se.radius, false);
    }
    ImageBuffer::from_raw(w, h, data).expect("buffer size unchanged")
}

/// Keeps 8-bit gray and RGBA buffers as they are; anything else goes
/// through 8-bit RGB.
pub fn dilate_dynamic(image: &DynamicImage, se: StructuringElement) -> DynamicImage {
    match image {
        DynamicImage::ImageLuma8(g) => DynamicImage::ImageLuma8(dilate_dark(g, se)),
        DynamicImage::ImageRgba8(rgba) => DynamicImage::ImageRgba8(dilate_dark(rgba, se)),
        other => DynamicImage::ImageRgb8(dilate_dark(&other.to_rgb8(), se)),
    }
}

fn min_pass(
    src: &[u8],
    dst: &mut [u8],
    w: u32,
    h: u32,
    channels: usize,
    radius: u32,
    horizontal: bool,
) {
    let (w, h, r) = (w as usize, h as usize, radius as usize);
    let (lines, len) = if horizontal { (h, w) } else { (w, h) };
    let at = |line: usize, i: usize, c: usize| {
        let (x, y) = if horizontal { (i, line) } else { (line, i) };
        (y * w + x) * channels + c
    };
    let mut window = std::collections::VecDeque::with_capacity(2 * r + 1);
    for line in 0..lines {
        for c in 0..channels {
            // Monotone deque of indices with increasing values.
            window.clear();
            let mut next = 0usize;
            for i in 0..len {
                let hi = (i + r).min(len - 1);
                while next <= hi {
                    let v = src[at(line, next, c)];
                    while window.back().is_some_and(|&j| src[at(line, j, c)] >= v) {
                        window.pop_back();
                    }
                    window.push_back(next);
                    next += 1;
                }
                let lo = i.saturating_sub(r);
                while window.front().is_some_and(|&j| j < lo) {
                    window.pop_front();
                }
                dst[at(line, i, c)] = src[at(line, *window.front().unwrap(), c)];
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusReport {
    pub processed: usize,
    pub skipped: Vec<SkippedFile>,
}

/// Dilates every decodable image in `in_dir` (non-recursive) and writes it
/// to `out_dir` under the same file name. Undecodable or unwritable files
/// are skipped and listed in the report.
pub fn preprocess_corpus(
    in_dir: &Path,
    out_dir: &Path,
    se: StructuringElement,
) -> Result<CorpusReport, MorphologyError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| MorphologyError::Io { path, source }
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(in_dir)
        .map_err(io(in_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;

    let results: Vec<Result<(), SkippedFile>> = files
        .par_iter()
        .map(|path| {
            let skip = |reason: String| SkippedFile {
                path: path.clone(),
                reason,
            };
            let img = image::open(path).map_err(|e| skip(e.to_string()))?;
            let out = dilate_dynamic(&img, se);
            let name = path.file_name().expect("listed files have names");
            out.save(out_dir.join(name)).map_err(|e| skip(e.to_string()))
        })
        .collect();

    let mut report = CorpusReport::default();
    for r in results {
        match r {
            Ok(()) => report.processed += 1,
            Err(s) => report.skipped.push(s),
        }
    }
    Ok(report)
}

/// Pointwise `a <= b` over all channels. Dimensions must match.
pub fn pointwise_le(a: &DynamicImage, b: &DynamicImage) -> bool {
    let (a, b) = (a.to_rgba8(), b.to_rgba8());
    a.dimensions() == b.dimensions() && a.as_raw().iter().zip(b.as_raw()).all(|(x, y)| x <= y)
}
