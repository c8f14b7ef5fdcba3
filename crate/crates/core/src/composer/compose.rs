use std::collections::BTreeMap;

use image::RgbImage;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::blend::blend_layer_in_place;
use super::render::render_field_in_place;
use super::{fake_fields, CheckClass, CheckTemplate, ComposeError, FakeFieldConfig, FieldClass, GlyphAtlas};
use crate::geom::Rect;
use crate::inkaug::{
    apply_placement, fitting_scale, recolor, sample_ink, sample_placement, InkColor,
    InkDistribution, InkName, InkPalette,
};
use crate::sheets::SignatureSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComposeConfig {
    pub palette: InkPalette,
    pub ink_weights: InkDistribution,
    /// Signature scale bounds as fractions of the largest scale that fits
    /// the signature region.
    pub scale_range: (f64, f64),
    /// Lower bound on glyph scale for field text.
    pub text_min_scale: f64,
    pub fields: FakeFieldConfig,
}

impl Default for ComposeConfig {
    fn default() -> Self {
        ComposeConfig {
            palette: InkPalette::default(),
            ink_weights: InkDistribution::reference(),
            scale_range: (0.6, 0.95),
            text_min_scale: 1.0,
            fields: FakeFieldConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureMeta {
    pub person_id: String,
    pub forged: bool,
    pub ink: InkName,
}

/// One annotated field on a composed check. `text` is `None` for the
/// signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldFill {
    pub class: CheckClass,
    pub text: Option<String>,
    pub ink: InkColor,
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCheck {
    pub image: RgbImage,
    pub template_id: String,
    pub signature: SignatureMeta,
    /// Exactly five fills, one per present class.
    pub fills: Vec<FieldFill>,
}

impl GeneratedCheck {
    pub fn field_boxes(&self) -> BTreeMap<CheckClass, Rect> {
        self.fills.iter().map(|f| (f.class, f.bbox)).collect()
    }

    pub fn signature_class(&self) -> CheckClass {
        CheckClass::for_field(FieldClass::Signature, self.signature.forged)
    }
}

/// Samples the signature ink from `cfg`, then composes as
/// [`compose_check_with_ink`].
pub fn compose_check<R: Rng + ?Sized>(
    template: &CheckTemplate,
    sample: &SignatureSample,
    atlas: &GlyphAtlas,
    rng: &mut R,
    cfg: &ComposeConfig,
) -> Result<GeneratedCheck, ComposeError> {
    let ink = sample_ink(&cfg.ink_weights, &cfg.palette, rng);
    compose_check_with_ink(template, sample, ink, atlas, rng, cfg)
}

/// Places the recolored signature inside the template's signature region,
/// then fills payee, date, courtesy and legal amounts with fake data, each
/// in an independently drawn ink.
pub fn compose_check_with_ink<R: Rng + ?Sized>(
    template: &CheckTemplate,
    sample: &SignatureSample,
    ink: InkColor,
    atlas: &GlyphAtlas,
    rng: &mut R,
    cfg: &ComposeConfig,
) -> Result<GeneratedCheck, ComposeError> {
    let mut image = template.background.clone();

    let region = template.regions.signature;
    let layer = recolor(sample, ink)?;
    let fit = fitting_scale(layer.dimensions(), &region);
    let (lo, hi) = cfg.scale_range;
    let placement = sample_placement(layer.dimensions(), &region, (lo * fit, hi * fit), rng)?;
    let (scaled, rel) = apply_placement(&layer, &placement);
    let abs = rel.offset_by(&region);
    blend_layer_in_place(&mut image, &scaled, abs)?;
    let sig_box = scaled
        .alpha
        .support_bounds()
        .map(|b| b.offset_by(&abs))
        .unwrap_or(abs);

    let mut fills = vec![FieldFill {
        class: CheckClass::for_field(FieldClass::Signature, sample.forged()),
        text: None,
        ink,
        bbox: sig_box,
    }];

    let fake = fake_fields(rng, &cfg.fields)?;
    for (field, text) in [
        (FieldClass::Payee, fake.payee),
        (FieldClass::Date, fake.date),
        (FieldClass::AmountCourtesy, fake.courtesy),
        (FieldClass::AmountLegal, fake.legal),
    ] {
        let field_ink = sample_ink(&cfg.ink_weights, &cfg.palette, rng);
        let bbox = render_field_in_place(
            &mut image,
            template.regions.get(field),
            &text,
            field_ink,
            atlas,
            cfg.text_min_scale,
            rng,
        )?;
        fills.push(FieldFill {
            class: CheckClass::for_field(field, false),
            text: Some(text),
            ink: field_ink,
            bbox,
        });
    }

    Ok(GeneratedCheck {
        image,
        template_id: template.template_id.clone(),
        signature: SignatureMeta {
            person_id: sample.person_id().to_string(),
            forged: sample.forged(),
            ink: ink.name,
        },
        fills,
    })
}
