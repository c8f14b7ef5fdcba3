use image::RgbImage;
use rand::Rng;

use super::blend::blend_layer_in_place;
use super::{ComposeError, GlyphAtlas};
use crate::geom::Rect;
use crate::inkaug::{apply_placement, sample_placement, InkColor, SignatureLayer};
use crate::raster::AlphaMap;

/// Slant of the built-in hand, in columns per row.
const SHEAR: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedField {
    pub image: RgbImage,
    /// Tight box around the rendered ink, inside the field region.
    pub bbox: Rect,
}

/// Lays out `text` as a single slanted strip with per-glyph baseline and
/// spacing jitter. Two draws per character.
pub fn render_text_layer<R: Rng + ?Sized>(
    text: &str,
    atlas: &GlyphAtlas,
    rng: &mut R,
) -> Result<AlphaMap, ComposeError> {
    if text.trim().is_empty() {
        return Err(ComposeError::EmptyText);
    }
    let glyph_h = atlas.height();
    let strip_h = glyph_h + 1;
    let mut placed = Vec::new();
    let mut cursor = 0u32;
    for c in text.chars() {
        let g = atlas.glyph(c).ok_or(ComposeError::MissingGlyph(c))?;
        let dy: u32 = rng.gen_range(0..=1);
        let gap: u32 = rng.gen_range(1..=2);
        placed.push((cursor, dy + glyph_h - g.height(), g));
        cursor += g.width() + gap;
    }
    let max_shift = ((strip_h - 1) as f64 * SHEAR).round() as u32;
    let strip_w = cursor + max_shift;
    let mut data = vec![0f32; strip_w as usize * strip_h as usize];
    for (x0, y0, g) in placed {
        for gy in 0..g.height() {
            let y = y0 + gy;
            let shift = ((strip_h - 1 - y) as f64 * SHEAR).round() as u32;
            for gx in 0..g.width() {
                let x = x0 + gx + shift;
                let i = y as usize * strip_w as usize + x as usize;
                data[i] = data[i].max(g.get(gx, gy));
            }
        }
    }
    let strip = AlphaMap::from_fn(strip_w, strip_h, |x, y| data[(y * strip_w + x) as usize]);
    // Leading/trailing spaces would leave blank margins in the box.
    let b = strip.support_bounds().ok_or(ComposeError::EmptyText)?;
    Ok(AlphaMap::from_fn(b.w, b.h, |x, y| strip.get(b.x + x, b.y + y)))
}

/// Renders `text` in `ink` somewhere inside `region` and blends it with the
/// darkening rule. The text is scaled to between 75% and 95% of the largest
/// size that fits, never below `min_scale`.
#[allow(clippy::too_many_arguments)]
pub fn render_field<R: Rng + ?Sized>(
    image: &RgbImage,
    region: Rect,
    text: &str,
    ink: InkColor,
    atlas: &GlyphAtlas,
    min_scale: f64,
    rng: &mut R,
) -> Result<RenderedField, ComposeError> {
    let mut out = image.clone();
    let bbox = render_field_in_place(&mut out, region, text, ink, atlas, min_scale, rng)?;
    Ok(RenderedField { image: out, bbox })
}

pub(crate) fn render_field_in_place<R: Rng + ?Sized>(
    image: &mut RgbImage,
    region: Rect,
    text: &str,
    ink: InkColor,
    atlas: &GlyphAtlas,
    min_scale: f64,
    rng: &mut R,
) -> Result<Rect, ComposeError> {
    if !region.fits_in(image.width(), image.height()) || region.is_empty() {
        return Err(ComposeError::OutOfBounds {
            position: region,
            width: image.width(),
            height: image.height(),
        });
    }
    let strip = render_text_layer(text, atlas, rng)?;
    let dims = strip.dimensions();
    let fit = crate::inkaug::fitting_scale(dims, &region);
    if fit < min_scale {
        return Err(ComposeError::TextDoesNotFit {
            text: text.to_string(),
            region_w: region.w,
            region_h: region.h,
            min_scale,
        });
    }
    let lo = min_scale.max(0.75 * fit);
    let hi = lo.max(0.95 * fit);
    let placement = sample_placement(dims, &region, (lo, hi), rng)?;
    let layer = SignatureLayer {
        color: ink,
        alpha: strip,
    };
    let (scaled, rel) = apply_placement(&layer, &placement);
    let abs = rel.offset_by(&region);
    blend_layer_in_place(image, &scaled, abs)?;
    let tight = scaled.alpha.support_bounds().unwrap_or(Rect::new(0, 0, abs.w, abs.h));
    Ok(tight.offset_by(&abs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inkaug::{InkName, InkPalette};
    use crate::seed::stream_from_u64;
    use image::Rgb;

    fn white(w: u32, h: u32) -> RgbImage {
        RgbImage::from_pixel(w, h, Rgb([255, 255, 255]))
    }

    fn ink() -> InkColor {
        InkPalette::default().color(InkName::DarkBlue)
    }

    #[test]
    fn empty_text_is_an_error() {
        let img = white(100, 40);
        let atlas = GlyphAtlas::builtin();
        let mut rng = stream_from_u64(0);
        let err = render_field(&img, Rect::new(0, 0, 100, 40), "", ink(), &atlas, 1.0, &mut rng)
            .unwrap_err();
        assert_eq!(err.to_string(), "empty text");
    }

    #[test]
    fn single_glyph_strictly_inside() {
        let img = white(300, 200);
        let region = Rect::new(50, 40, 200, 120);
        let atlas = GlyphAtlas::builtin();
        let mut rng = stream_from_u64(1);
        let r = render_field(&img, region, "A", ink(), &atlas, 1.0, &mut rng).unwrap();
        assert!(region.contains_rect(&r.bbox));
        assert!(r.bbox.area() < region.area());
        // Only pixels in the box changed.
        for (x, y, p) in r.image.enumerate_pixels() {
            let inside = x >= r.bbox.x
                && y >= r.bbox.y
                && (x as u64) < r.bbox.right()
                && (y as u64) < r.bbox.bottom();
            if !inside {
                assert_eq!(p.0, [255, 255, 255]);
            }
        }
    }

    #[test]
    fn box_is_tight() {
        let img = white(400, 80);
        let atlas = GlyphAtlas::builtin();
        let mut rng = stream_from_u64(2);
        let r = render_field(&img, Rect::new(10, 10, 380, 60), "$1234.56", ink(), &atlas, 1.0, &mut rng)
            .unwrap();
        let changed = |x: u32, y: u32| r.image.get_pixel(x, y).0 != [255, 255, 255];
        let b = r.bbox;
        assert!((b.x..b.x + b.w).any(|x| changed(x, b.y)));
        assert!((b.x..b.x + b.w).any(|x| changed(x, b.y + b.h - 1)));
        assert!((b.y..b.y + b.h).any(|y| changed(b.x, y)));
        assert!((b.y..b.y + b.h).any(|y| changed(b.x + b.w - 1, y)));
    }

    #[test]
    fn deterministic() {
        let img = white(300, 60);
        let atlas = GlyphAtlas::builtin();
        let region = Rect::new(5, 5, 290, 50);
        let a = render_field(&img, region, "Hello there", ink(), &atlas, 1.0, &mut stream_from_u64(9))
            .unwrap();
        let b = render_field(&img, region, "Hello there", ink(), &atlas, 1.0, &mut stream_from_u64(9))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_small_region() {
        let img = white(100, 100);
        let atlas = GlyphAtlas::builtin();
        let mut rng = stream_from_u64(3);
        let err = render_field(&img, Rect::new(0, 0, 30, 5), "Long text", ink(), &atlas, 1.0, &mut rng)
            .unwrap_err();
        assert!(matches!(err, ComposeError::TextDoesNotFit { .. }));
    }

    #[test]
    fn missing_glyph() {
        let mut rng = stream_from_u64(4);
        assert!(matches!(
            render_text_layer("€5", &GlyphAtlas::builtin(), &mut rng),
            Err(ComposeError::MissingGlyph('€'))
        ));
    }
}
