//! Check templates and the template definition file.
//!
//! ```toml
//! [[templates]]
//! id = "t01"
//! background = "t01.png"      # relative to this file
//! [templates.regions]
//! payee = [90, 81, 330, 37]
//! date = [408, 32, 168, 37]
//! amount_courtesy = [444, 81, 132, 37]
//! amount_legal = [24, 130, 480, 37]
//! signature = [330, 184, 246, 70]
//! ```

use std::path::Path;

use image::{Rgb, RgbImage};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ComposeError, FieldClass};
use crate::geom::Rect;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRegions {
    pub payee: Rect,
    pub date: Rect,
    pub amount_courtesy: Rect,
    pub amount_legal: Rect,
    pub signature: Rect,
}

impl FieldRegions {
    pub fn get(&self, field: FieldClass) -> Rect {
        match field {
            FieldClass::Payee => self.payee,
            FieldClass::Date => self.date,
            FieldClass::AmountCourtesy => self.amount_courtesy,
            FieldClass::AmountLegal => self.amount_legal,
            FieldClass::Signature => self.signature,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckTemplate {
    pub template_id: String,
    pub background: RgbImage,
    pub regions: FieldRegions,
}

impl CheckTemplate {
    pub fn new(
        template_id: impl Into<String>,
        background: RgbImage,
        regions: FieldRegions,
    ) -> Result<Self, ComposeError> {
        let t = CheckTemplate {
            template_id: template_id.into(),
            background,
            regions,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<(), ComposeError> {
        let invalid = |message: String| ComposeError::InvalidTemplate {
            id: self.template_id.clone(),
            message,
        };
        if self.template_id.is_empty() {
            return Err(invalid("empty id".into()));
        }
        let (w, h) = self.background.dimensions();
        for f in FieldClass::ALL {
            let r = self.regions.get(f);
            if r.is_empty() {
                return Err(invalid(format!("{} region is empty", f.as_str())));
            }
            if !r.fits_in(w, h) {
                return Err(invalid(format!(
                    "{} region {r:?} outside {w}x{h} background",
                    f.as_str()
                )));
            }
        }
        for (i, a) in FieldClass::ALL.iter().enumerate() {
            for b in &FieldClass::ALL[i + 1..] {
                if self.regions.get(*a) == self.regions.get(*b) {
                    return Err(invalid(format!(
                        "{} and {} share a region",
                        a.as_str(),
                        b.as_str()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TemplateFile {
    templates: Vec<TemplateEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateEntry {
    id: String,
    background: String,
    regions: FieldRegions,
}

pub fn load_templates(path: &Path) -> Result<Vec<CheckTemplate>, ComposeError> {
    let text = std::fs::read_to_string(path).map_err(|source| ComposeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: TemplateFile = toml::from_str(&text).map_err(|e| ComposeError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut seen = std::collections::BTreeSet::new();
    file.templates
        .into_iter()
        .map(|e| {
            if !seen.insert(e.id.clone()) {
                return Err(ComposeError::InvalidTemplate {
                    id: e.id,
                    message: "duplicate template id".into(),
                });
            }
            let bg_path = base.join(&e.background);
            let bg = image::open(&bg_path)
                .map_err(|source| ComposeError::Image {
                    path: bg_path.clone(),
                    source,
                })?
                .to_rgb8();
            CheckTemplate::new(e.id, bg, e.regions)
        })
        .collect()
}

/// Writes backgrounds as `<id>.png` next to a `templates.toml`.
pub fn write_templates(dir: &Path, templates: &[CheckTemplate]) -> Result<(), ComposeError> {
    std::fs::create_dir_all(dir).map_err(|source| ComposeError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::new();
    for t in templates {
        let file = format!("{}.png", t.template_id);
        let path = dir.join(&file);
        t.background
            .save(&path)
            .map_err(|source| ComposeError::Image { path, source })?;
        entries.push(TemplateEntry {
            id: t.template_id.clone(),
            background: file,
            regions: t.regions,
        });
    }
    let text = toml::to_string(&TemplateFile { templates: entries }).expect("templates serialize");
    let path = dir.join("templates.toml");
    std::fs::write(&path, text).map_err(|source| ComposeError::Io { path, source })
}

/// Procedural check: pastel gradient, guilloche-style wave bands, printed
/// field rules, and the standard field layout with small per-template
/// jitter. Deterministic in `(id, seed)`.
pub fn synthetic_template(id: &str, width: u32, height: u32, seed: u64) -> CheckTemplate {
    assert!(width >= 200 && height >= 90, "synthetic checks need at least 200x90");
    let mut rng = seed::stream(seed, id, 0);
    let tint: [f64; 3] = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
    let freq = rng.gen_range(0.03..0.07);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let (wf, hf) = (width as f64, height as f64);
    let mut bg = RgbImage::from_fn(width, height, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let g = xf / wf * 0.5 + yf / hf * 0.5;
        let wave = ((xf * freq + phase).sin() * 6.0 + yf * 0.35).sin();
        let band = if wave > 0.92 { 40.0 } else { 0.0 };
        let c = |i: usize| (235.0 - 25.0 * g * tint[i] - band * (1.0 - tint[i] * 0.5)).round() as u8;
        Rgb([c(0), c(1), c(2)])
    });

    let j = |rng: &mut seed::Stream, v: f64| v + rng.gen_range(-0.01..0.01);
    let rect = |fx: f64, fy: f64, fw: f64, fh: f64| {
        Rect::new(
            (fx * wf) as u32,
            (fy * hf) as u32,
            ((fw * wf) as u32).max(8),
            ((fh * hf) as u32).max(8),
        )
    };
    let regions = FieldRegions {
        date: rect(j(&mut rng, 0.68), j(&mut rng, 0.12), 0.28, 0.14),
        payee: rect(j(&mut rng, 0.15), j(&mut rng, 0.30), 0.55, 0.14),
        amount_courtesy: rect(j(&mut rng, 0.74), j(&mut rng, 0.30), 0.22, 0.14),
        amount_legal: rect(j(&mut rng, 0.04), j(&mut rng, 0.48), 0.80, 0.14),
        signature: rect(j(&mut rng, 0.55), j(&mut rng, 0.68), 0.41, 0.26),
    };
    // Printed rules under each handwritten field.
    for f in FieldClass::ALL {
        let r = regions.get(f);
        let y = (r.bottom() as u32).min(height - 1);
        for x in r.x..(r.right() as u32).min(width) {
            bg.put_pixel(x, y, Rgb([70, 70, 80]));
        }
    }
    CheckTemplate::new(id, bg, regions).expect("synthetic layout is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_is_valid_and_deterministic() {
        let a = synthetic_template("t1", 600, 270, 5);
        let b = synthetic_template("t1", 600, 270, 5);
        assert_eq!(a, b);
        let c = synthetic_template("t2", 600, 270, 5);
        assert_ne!(a.background, c.background);
    }

    #[test]
    fn rejects_region_outside_background() {
        let t = synthetic_template("t", 300, 135, 0);
        let mut regions = t.regions;
        regions.signature = Rect::new(290, 0, 20, 20);
        assert!(CheckTemplate::new("t", t.background.clone(), regions).is_err());
        let mut regions = t.regions;
        regions.date = regions.payee;
        assert!(CheckTemplate::new("t", t.background, regions).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ts = vec![
            synthetic_template("a", 300, 135, 1),
            synthetic_template("b", 300, 135, 2),
        ];
        write_templates(dir.path(), &ts).unwrap();
        let back = load_templates(&dir.path().join("templates.toml")).unwrap();
        assert_eq!(back, ts);
    }
}
