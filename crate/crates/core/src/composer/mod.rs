//! Check templates, ink blending, fake field contents and full check
//! composition.

mod blend;
mod compose;
mod fake;
mod glyphs;
mod render;
mod template;
mod words;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Rect;
use crate::inkaug::InkError;

pub use blend::blend_layer;
pub use compose::{
    compose_check, compose_check_with_ink, ComposeConfig, FieldFill, GeneratedCheck, SignatureMeta,
};
pub use fake::{fake_fields, format_courtesy, DateFormat, FakeFieldConfig, FakeFields};
pub use glyphs::{GlyphAtlas, ATLAS_MANIFEST};
pub use render::{render_field, render_text_layer, RenderedField};
pub use template::{load_templates, synthetic_template, write_templates, CheckTemplate, FieldRegions};
pub use words::{amount_to_words, MAX_CENTS};

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("position {position:?} outside {width}x{height} background")]
    OutOfBounds {
        position: Rect,
        width: u32,
        height: u32,
    },
    #[error("layer is {layer_w}x{layer_h} but position is {pos_w}x{pos_h}")]
    SizeMismatch {
        layer_w: u32,
        layer_h: u32,
        pos_w: u32,
        pos_h: u32,
    },
    #[error("amount {0} cents out of range (max {max})", max = MAX_CENTS - 1)]
    AmountOutOfRange(u64),
    #[error("empty text")]
    EmptyText,
    #[error("no glyph for {0:?}")]
    MissingGlyph(char),
    #[error("text {text:?} cannot fit {region_w}x{region_h} region at scale {min_scale}")]
    TextDoesNotFit {
        text: String,
        region_w: u32,
        region_h: u32,
        min_scale: f64,
    },
    #[error("name pool is empty")]
    EmptyNamePool,
    #[error("inverted range: {0}")]
    InvertedRange(String),
    #[error("template {id}: {message}")]
    InvalidTemplate { id: String, message: String },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Ink(#[from] InkError),
}

/// Field regions on a check template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldClass {
    Payee,
    Date,
    AmountCourtesy,
    AmountLegal,
    Signature,
}

impl FieldClass {
    pub const ALL: [FieldClass; 5] = [
        FieldClass::Payee,
        FieldClass::Date,
        FieldClass::AmountCourtesy,
        FieldClass::AmountLegal,
        FieldClass::Signature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldClass::Payee => "payee",
            FieldClass::Date => "date",
            FieldClass::AmountCourtesy => "amount_courtesy",
            FieldClass::AmountLegal => "amount_legal",
            FieldClass::Signature => "signature",
        }
    }
}

/// Annotation classes. The discriminant is the COCO category id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckClass {
    AmountCourtesy = 1,
    AmountLegal = 2,
    Date = 3,
    Payee = 4,
    SignatureGenuine = 5,
    SignatureForged = 6,
}

impl CheckClass {
    pub const ALL: [CheckClass; 6] = [
        CheckClass::AmountCourtesy,
        CheckClass::AmountLegal,
        CheckClass::Date,
        CheckClass::Payee,
        CheckClass::SignatureGenuine,
        CheckClass::SignatureForged,
    ];

    pub fn id(self) -> u64 {
        self as u64
    }

    pub fn from_id(id: u64) -> Option<CheckClass> {
        CheckClass::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckClass::AmountCourtesy => "amount_courtesy",
            CheckClass::AmountLegal => "amount_legal",
            CheckClass::Date => "date",
            CheckClass::Payee => "payee",
            CheckClass::SignatureGenuine => "signature_genuine",
            CheckClass::SignatureForged => "signature_forged",
        }
    }

    /// Human-readable label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            CheckClass::AmountCourtesy => "Amount (Courtesy)",
            CheckClass::AmountLegal => "Amount (Legal)",
            CheckClass::Date => "Date",
            CheckClass::Payee => "Payee",
            CheckClass::SignatureGenuine => "Signature (G)",
            CheckClass::SignatureForged => "Signature (F)",
        }
    }

    pub fn for_field(field: FieldClass, forged: bool) -> CheckClass {
        match field {
            FieldClass::Payee => CheckClass::Payee,
            FieldClass::Date => CheckClass::Date,
            FieldClass::AmountCourtesy => CheckClass::AmountCourtesy,
            FieldClass::AmountLegal => CheckClass::AmountLegal,
            FieldClass::Signature if forged => CheckClass::SignatureForged,
            FieldClass::Signature => CheckClass::SignatureGenuine,
        }
    }

    pub fn is_signature(self) -> bool {
        matches!(self, CheckClass::SignatureGenuine | CheckClass::SignatureForged)
    }
}

impl fmt::Display for CheckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_ids_are_fixed() {
        let ids: Vec<(u64, &str)> = CheckClass::ALL.iter().map(|c| (c.id(), c.name())).collect();
        assert_eq!(
            ids,
            vec![
                (1, "amount_courtesy"),
                (2, "amount_legal"),
                (3, "date"),
                (4, "payee"),
                (5, "signature_genuine"),
                (6, "signature_forged"),
            ]
        );
        assert_eq!(CheckClass::from_id(6), Some(CheckClass::SignatureForged));
        assert_eq!(CheckClass::from_id(7), None);
    }
}
