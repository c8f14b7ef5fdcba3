//! Small raster types that sit next to the `image` crate buffers: binary ink
//! masks and fractional opacity maps.

use image::{DynamicImage, GrayImage, Luma, RgbImage};

use crate::geom::Rect;

/// Binary raster, `true` = ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Mask {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Mask {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.index(x, y);
        self.data[i] = v;
    }

    pub fn count_ink(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Tight bounding box of the ink pixels, `None` if the mask is empty.
    pub fn ink_bounds(&self) -> Option<Rect> {
        bounds_where(self.width, self.height, |x, y| self.get(x, y))
    }

    pub fn crop(&self, r: Rect) -> Mask {
        Mask::from_fn(r.w, r.h, |x, y| self.get(r.x + x, r.y + y))
    }

    /// 0 for background, 255 for ink.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            Luma([if self.get(x, y) { 255 } else { 0 }])
        })
    }

    /// Inverse of [`Mask::to_image`]; any non-zero value is ink.
    pub fn from_image(img: &GrayImage) -> Mask {
        Mask::from_fn(img.width(), img.height(), |x, y| img.get_pixel(x, y)[0] != 0)
    }

    fn index(&self, x: u32, y: u32) -> usize {
        assert!(x < self.width && y < self.height, "mask index out of range");
        y as usize * self.width as usize + x as usize
    }
}

/// Opacity raster with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMap {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl AlphaMap {
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f32) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        AlphaMap {
            width,
            height,
            data,
        }
    }

    pub fn from_mask(mask: &Mask) -> Self {
        AlphaMap::from_fn(mask.width(), mask.height(), |x, y| {
            if mask.get(x, y) {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn uniform(width: u32, height: u32, value: f32) -> Self {
        AlphaMap::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[f32] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }

    /// Tight box around every pixel with non-zero opacity.
    pub fn support_bounds(&self) -> Option<Rect> {
        bounds_where(self.width, self.height, |x, y| self.get(x, y) > 0.0)
    }

    /// Bilinear resampling to `new_w × new_h` with pixel-center alignment and
    /// edge clamping. Resampling to the same size is the identity.
    pub fn resize_bilinear(&self, new_w: u32, new_h: u32) -> AlphaMap {
        assert!(new_w > 0 && new_h > 0, "resample target must be non-empty");
        if (new_w, new_h) == (self.width, self.height) {
            return self.clone();
        }
        let sx = self.width as f64 / new_w as f64;
        let sy = self.height as f64 / new_h as f64;
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        AlphaMap::from_fn(new_w, new_h, |x, y| {
            let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
            let x0 = fx.floor() as u32;
            let y0 = fy.floor() as u32;
            let x1 = (x0 + 1).min(self.width - 1);
            let y1 = (y0 + 1).min(self.height - 1);
            let tx = fx - x0 as f64;
            let ty = fy - y0 as f64;
            let top = self.get(x0, y0) as f64 * (1.0 - tx) + self.get(x1, y0) as f64 * tx;
            let bot = self.get(x0, y1) as f64 * (1.0 - tx) + self.get(x1, y1) as f64 * tx;
            (top * (1.0 - ty) + bot * ty) as f32
        })
    }
}

fn bounds_where(width: u32, height: u32, pred: impl Fn(u32, u32) -> bool) -> Option<Rect> {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
    let mut any = false;
    for y in 0..height {
        for x in 0..width {
            if pred(x, y) {
                any = true;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    any.then(|| Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
}

/// Rec.601 luma with integer rounding.
pub fn rec601_luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Converts any decoded image to 8-bit luminance. Color sources go through
/// [`rec601_luma`]; grayscale sources are passed through unchanged.
pub fn to_luminance(img: &DynamicImage) -> GrayImage {
    match img {
        DynamicImage::ImageLuma8(g) => g.clone(),
        other => {
            let rgb: RgbImage = other.to_rgb8();
            GrayImage::from_fn(rgb.width(), rgb.height(), |x, y| {
                let p = rgb.get_pixel(x, y).0;
                Luma([rec601_luma(p[0], p[1], p[2])])
            })
        }
    }
}
