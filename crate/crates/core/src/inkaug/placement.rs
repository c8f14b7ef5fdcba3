use rand::Rng;

use super::{InkError, SignatureLayer};
use crate::geom::Rect;

/// Scale factor plus offset of the scaled box relative to the region origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub scale: f64,
    pub offset: (u32, u32),
}

impl Placement {
    pub fn identity() -> Self {
        Placement {
            scale: 1.0,
            offset: (0, 0),
        }
    }

    pub fn scaled_dims(&self, dims: (u32, u32)) -> (u32, u32) {
        scaled_dims(dims, self.scale)
    }

    /// Box of the scaled signature relative to the region origin.
    pub fn box_for(&self, dims: (u32, u32)) -> Rect {
        let (w, h) = self.scaled_dims(dims);
        Rect::new(self.offset.0, self.offset.1, w, h)
    }
}

pub(crate) fn scaled_dims((w, h): (u32, u32), scale: f64) -> (u32, u32) {
    let sw = ((w as f64 * scale).round() as u32).max(1);
    let sh = ((h as f64 * scale).round() as u32).max(1);
    (sw, sh)
}

/// Largest scale at which `dims` fits in `region`.
pub fn fitting_scale(dims: (u32, u32), region: &Rect) -> f64 {
    (region.w as f64 / dims.0 as f64).min(region.h as f64 / dims.1 as f64)
}

/// Draws a scale uniformly from `[lo, min(hi, fit)]`, where `fit` is the
/// largest scale keeping the signature inside `region`, then an offset
/// uniformly over all positions that keep the scaled box inside the region.
///
/// Always consumes one `f64` and two integer draws.
pub fn sample_placement<R: Rng + ?Sized>(
    sig_dims: (u32, u32),
    region: &Rect,
    (lo, hi): (f64, f64),
    rng: &mut R,
) -> Result<Placement, InkError> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(InkError::BadScaleRange { lo, hi });
    }
    assert!(sig_dims.0 > 0 && sig_dims.1 > 0, "signature must be non-empty");
    let fit = fitting_scale(sig_dims, region);
    let does_not_fit = || InkError::DoesNotFit {
        sig_w: sig_dims.0,
        sig_h: sig_dims.1,
        region_w: region.w,
        region_h: region.h,
        lo,
        max_fit: fit,
    };
    if lo > fit {
        return Err(does_not_fit());
    }
    let hi = hi.min(fit);
    let u: f64 = rng.gen();
    let scale = lo + u * (hi - lo);
    let (sw, sh) = scaled_dims(sig_dims, scale);
    if sw > region.w || sh > region.h {
        return Err(does_not_fit());
    }
    let dx = rng.gen_range(0..=region.w - sw);
    let dy = rng.gen_range(0..=region.h - sh);
    Ok(Placement {
        scale,
        offset: (dx, dy),
    })
}

/// Resamples the layer to the placement's scale (bilinear) and returns it
/// with its box relative to the region.
pub fn apply_placement(layer: &SignatureLayer, placement: &Placement) -> (SignatureLayer, Rect) {
    let dims = layer.dimensions();
    let (w, h) = placement.scaled_dims(dims);
    let alpha = layer.alpha.resize_bilinear(w, h);
    (
        SignatureLayer {
            color: layer.color,
            alpha,
        },
        placement.box_for(dims),
    )
}
