use image::RgbImage;

use super::ComposeError;
use crate::geom::Rect;
use crate::inkaug::SignatureLayer;

/// Darkening alpha blend: per channel,
/// `out = min(bg, round(alpha * ink + (1 - alpha) * bg))`.
///
/// `position` must lie inside the background and match the layer size.
pub fn blend_layer(
    background: &RgbImage,
    layer: &SignatureLayer,
    position: Rect,
) -> Result<RgbImage, ComposeError> {
    let mut out = background.clone();
    blend_layer_in_place(&mut out, layer, position)?;
    Ok(out)
}

pub(crate) fn blend_layer_in_place(
    image: &mut RgbImage,
    layer: &SignatureLayer,
    position: Rect,
) -> Result<(), ComposeError> {
    if !position.fits_in(image.width(), image.height()) {
        return Err(ComposeError::OutOfBounds {
            position,
            width: image.width(),
            height: image.height(),
        });
    }
    let (lw, lh) = layer.dimensions();
    if (lw, lh) != (position.w, position.h) {
        return Err(ComposeError::SizeMismatch {
            layer_w: lw,
            layer_h: lh,
            pos_w: position.w,
            pos_h: position.h,
        });
    }
    let ink = layer.color.rgb;
    for y in 0..lh {
        for x in 0..lw {
            let a = layer.alpha.get(x, y) as f64;
            if a <= 0.0 {
                continue;
            }
            let px = image.get_pixel_mut(position.x + x, position.y + y);
            for c in 0..3 {
                let bg = px[c];
                let mixed = (a * ink[c] as f64 + (1.0 - a) * bg as f64).round() as u8;
                px[c] = bg.min(mixed);
            }
        }
    }
    Ok(())
}
